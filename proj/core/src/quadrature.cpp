#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace edgetap::detail {
namespace {

// Nodes and weights of the 7-point Gauss / 15-point Kronrod pair on [-1, 1].
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  double value;
  double error;
};

Estimate gauss_kronrod_15(const std::function<double(double)>& f, double lo,
                          double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f_center = f(center);
  double kronrod = f_center * kKronrodWeights[7];
  double gauss = f_center * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * pair;
    // Odd Kronrod indices coincide with the Gauss nodes.
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

double recurse(const std::function<double(double)>& f, double lo, double hi,
               const Estimate& whole, double tol, int depth) {
  // Differences below a few dozen ulps of the piece are rounding noise.
  const double noise = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(whole.value);
  if (whole.error <= tol || whole.error <= noise || depth <= 0) return whole.value;
  const double mid = 0.5 * (lo + hi);
  const Estimate left = gauss_kronrod_15(f, lo, mid);
  const Estimate right = gauss_kronrod_15(f, mid, hi);
  return recurse(f, lo, mid, left, 0.5 * tol, depth - 1) +
         recurse(f, mid, hi, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, double abs_tol, int max_depth) {
  if (lo == hi) return 0.0;
  if (hi < lo) return -integrate_adaptive(f, hi, lo, abs_tol, max_depth);
  return recurse(f, lo, hi, gauss_kronrod_15(f, lo, hi), abs_tol, max_depth);
}

}  // namespace edgetap::detail
