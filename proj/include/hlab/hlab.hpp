#pragma once
// Umbrella header.

#include "hlab/barriers.hpp"
#include "hlab/checks.hpp"
#include "hlab/coefficients.hpp"
#include "hlab/common.hpp"
#include "hlab/config.hpp"
#include "hlab/covering.hpp"
#include "hlab/experiment_config.hpp"
#include "hlab/experiments.hpp"
#include "hlab/geometry.hpp"
#include "hlab/quadrature.hpp"
#include "hlab/solution_io.hpp"
#include "hlab/solver.hpp"
#include "hlab/svg.hpp"
#include "hlab/weights.hpp"
