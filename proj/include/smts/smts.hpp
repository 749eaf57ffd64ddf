#pragma once

// Umbrella header for the smoothed two-sample test library.

#include "smts/distributions.hpp"
#include "smts/efficiency.hpp"
#include "smts/kernels.hpp"
#include "smts/quadrature.hpp"
#include "smts/rank_tests.hpp"
#include "smts/rng.hpp"
#include "smts/simulation.hpp"
#include "smts/smoothed_tests.hpp"
#include "smts/special.hpp"
