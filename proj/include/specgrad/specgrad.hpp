//
// specgrad - Copyright 2026 the specgrad authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include "specgrad/analysis.hpp"
#include "specgrad/bench.hpp"
#include "specgrad/householder.hpp"
#include "specgrad/problems.hpp"
#include "specgrad/rng.hpp"
#include "specgrad/solver.hpp"
#include "specgrad/stepsize.hpp"
#include "specgrad/test_functions.hpp"
#include "specgrad/vector_ops.hpp"
