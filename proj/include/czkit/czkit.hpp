#pragma once

// Numerical toolkit for singular integral operators: kernel smoothness
// seminorms, principal-value application on grids, Calderon-Zygmund /
// Whitney / NTV decompositions, and weak-type verification machinery.

#include "cz_decomposition.hpp"
#include "dyadic.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "kernel.hpp"
#include "maximal.hpp"
#include "ntv_decomposition.hpp"
#include "operator.hpp"
#include "parallel.hpp"
#include "proof_trace.hpp"
#include "seminorm.hpp"
#include "test_functions.hpp"
#include "verify.hpp"
#include "version.hpp"
#include "whitney.hpp"
