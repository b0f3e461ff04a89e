#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edgetap::detail {
namespace {

template <std::size_t N>
struct Vertex {
  Point<N> x;
  double f;
};

template <std::size_t N>
Point<N> combine(const Point<N>& a, const Point<N>& b, double t) {
  // a + t (b - a)
  Point<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

template <std::size_t N>
double safe_eval(const std::function<double(const Point<N>&)>& f, const Point<N>& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : HUGE_VAL;
}

template <std::size_t N>
Vertex<N> run_once(const std::function<double(const Point<N>&)>& f, const Point<N>& x0,
                   const Point<N>& steps, const NelderMeadOptions& options,
                   int& evaluations) {
  std::array<Vertex<N>, N + 1> simplex;
  simplex[0] = {x0, safe_eval(f, x0)};
  for (std::size_t i = 0; i < N; ++i) {
    Point<N> x = x0;
    x[i] += steps[i];
    simplex[i + 1] = {x, safe_eval(f, x)};
  }
  evaluations += static_cast<int>(N + 1);

  const auto by_value = [](const Vertex<N>& a, const Vertex<N>& b) { return a.f < b.f; };
  while (evaluations < options.max_evaluations) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    const Vertex<N>& best = simplex.front();
    Vertex<N>& worst = simplex.back();

    double spread = 0.0;
    for (std::size_t v = 1; v <= N; ++v) {
      for (std::size_t i = 0; i < N; ++i) {
        spread = std::max(spread, std::abs(simplex[v].x[i] - best.x[i]));
      }
    }
    if (std::abs(worst.f - best.f) <= options.f_tolerance && spread <= options.x_tolerance) {
      break;
    }

    Point<N> centroid{};
    for (std::size_t v = 0; v < N; ++v) {
      for (std::size_t i = 0; i < N; ++i) centroid[i] += simplex[v].x[i] / N;
    }

    const Point<N> reflected = combine(centroid, worst.x, -1.0);
    const double f_reflected = safe_eval(f, reflected);
    ++evaluations;
    if (f_reflected < best.f) {
      const Point<N> expanded = combine(centroid, worst.x, -2.0);
      const double f_expanded = safe_eval(f, expanded);
      ++evaluations;
      worst = f_expanded < f_reflected ? Vertex<N>{expanded, f_expanded}
                                       : Vertex<N>{reflected, f_reflected};
      continue;
    }
    if (f_reflected < simplex[N - 1].f) {
      worst = {reflected, f_reflected};
      continue;
    }
    const bool outside = f_reflected < worst.f;
    const Point<N> contracted =
        outside ? combine(centroid, reflected, 0.5) : combine(centroid, worst.x, 0.5);
    const double f_contracted = safe_eval(f, contracted);
    ++evaluations;
    if (f_contracted < std::min(f_reflected, worst.f)) {
      worst = {contracted, f_contracted};
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t v = 1; v <= N; ++v) {
      simplex[v].x = combine(best.x, simplex[v].x, 0.5);
      simplex[v].f = safe_eval(f, simplex[v].x);
    }
    evaluations += static_cast<int>(N);
  }
  return *std::min_element(simplex.begin(), simplex.end(), by_value);
}

}  // namespace

template <std::size_t N>
Point<N> nelder_mead(const std::function<double(const Point<N>&)>& f, Point<N> x0,
                     const Point<N>& steps, const NelderMeadOptions& options) {
  int evaluations = 0;
  Vertex<N> incumbent = run_once(f, x0, steps, options, evaluations);
  Point<N> restart_steps = steps;
  while (evaluations < options.max_evaluations) {
    for (auto& s : restart_steps) s *= 0.5;
    const Vertex<N> next = run_once(f, incumbent.x, restart_steps, options, evaluations);
    const bool improved = next.f < incumbent.f - options.f_tolerance;
    if (next.f < incumbent.f) incumbent = next;
    if (!improved) break;
  }
  return incumbent.x;
}

template Point<3> nelder_mead<3>(const std::function<double(const Point<3>&)>&, Point<3>,
                                 const Point<3>&, const NelderMeadOptions&);

}  // namespace edgetap::detail
