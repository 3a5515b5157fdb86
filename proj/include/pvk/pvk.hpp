#pragma once

// Exact-arithmetic computations with Poisson vector bundles in polynomial
// trivializations: Maurer-Cartan checks, secondary characteristic classes,
// isotropy representations, dilation homotopies, and formal normalization.

#include "pvk/bundle.hpp"
#include "pvk/errors.hpp"
#include "pvk/json_io.hpp"
#include "pvk/lie.hpp"
#include "pvk/linalg.hpp"
#include "pvk/multivector.hpp"
#include "pvk/normalize.hpp"
#include "pvk/poisson.hpp"
#include "pvk/poly.hpp"
#include "pvk/poly_matrix.hpp"
#include "pvk/scalar.hpp"
