// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "quadprop/anchors.hpp"
#include "quadprop/boxcoder.hpp"
#include "quadprop/config.hpp"
#include "quadprop/dota_io.hpp"
#include "quadprop/error.hpp"
#include "quadprop/eval.hpp"
#include "quadprop/geometry.hpp"
#include "quadprop/image_io.hpp"
#include "quadprop/losses.hpp"
#include "quadprop/model.hpp"
#include "quadprop/parallel.hpp"
#include "quadprop/postprocess.hpp"
#include "quadprop/rng.hpp"
#include "quadprop/synth.hpp"
