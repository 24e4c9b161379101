#include "sdelab/quadrature.hpp"

// Header-only templates; this translation unit exists so the target has a
// stable home for any future non-template quadrature helpers.
