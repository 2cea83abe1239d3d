#pragma once

// Gromov-Hausdorff machinery on finite metric spaces: exact (pointed)
// distances at desk scale, approximation pairs with the sandwich constants,
// explicit admissible-metric constructions, length-space diagnostics, a
// pointed-convergence harness, and subsequence certificates standing in for
// ultrafilters.

#include "ghkit/admissible.hpp"
#include "ghkit/approximation.hpp"
#include "ghkit/convergence.hpp"
#include "ghkit/errors.hpp"
#include "ghkit/generators.hpp"
#include "ghkit/gh.hpp"
#include "ghkit/hausdorff.hpp"
#include "ghkit/length.hpp"
#include "ghkit/net.hpp"
#include "ghkit/space.hpp"
#include "ghkit/sublimits.hpp"
