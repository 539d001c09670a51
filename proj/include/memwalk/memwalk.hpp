// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "memwalk/kernel.hpp"
#include "memwalk/monte_carlo.hpp"
#include "memwalk/quadrature.hpp"
#include "memwalk/rng.hpp"
#include "memwalk/sampler.hpp"
#include "memwalk/shape.hpp"
#include "memwalk/special_functions.hpp"
#include "memwalk/theory.hpp"
