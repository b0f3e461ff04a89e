#pragma once

#include <array>
#include <functional>

namespace edgetap::detail {

template <std::size_t N>
using Point = std::array<double, N>;

struct NelderMeadOptions {
  double f_tolerance = 1e-11;
  double x_tolerance = 1e-9;
  int max_evaluations = 20000;
};

// Minimizes f starting from a simplex around x0 with per-axis steps. Restarts
// from the incumbent until a restart no longer improves the value.
template <std::size_t N>
Point<N> nelder_mead(const std::function<double(const Point<N>&)>& f,
                     Point<N> x0, const Point<N>& steps,
                     const NelderMeadOptions& options = {});

}  // namespace edgetap::detail
