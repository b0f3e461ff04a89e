#pragma once

#include <functional>

namespace edgetap::detail {

// Adaptive 15-point Gauss-Kronrod integration on [lo, hi]. Intervals are
// bisected until the Kronrod/Gauss difference on each piece is below its share
// of abs_tol or at the rounding-noise level of the piece, or max_depth is reached.
double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double abs_tol, int max_depth = 40);

}  // namespace edgetap::detail
