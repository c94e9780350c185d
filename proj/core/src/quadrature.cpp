#include "omckit/quadrature.hpp"

#include <array>
#include <cmath>

namespace omckit {

namespace {

// QUADPACK qk15 nodes/weights on [-1, 1].
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct PanelResult {
  double kronrod;
  double gauss;
  double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);

  const double fc = f(mid);
  double kron = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    kron += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fsum;
  }
  kron *= half;
  gauss *= half;
  return {kron, gauss, std::fabs(kron - gauss)};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             const PanelResult& whole, double rel_tol, double abs_tol,
             int depth) {
  const double tol =
      std::max(abs_tol, rel_tol * std::max(std::fabs(whole.kronrod), 1e-300));
  if (whole.err <= tol || depth <= 0) return whole.kronrod;
  const double mid = 0.5 * (a + b);
  const PanelResult left = gk15(f, a, mid);
  const PanelResult right = gk15(f, mid, b);
  return adapt(f, a, mid, left, rel_tol, abs_tol * 0.5, depth - 1) +
         adapt(f, mid, b, right, rel_tol, abs_tol * 0.5, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  // Pre-split into a few panels so a narrow feature cannot hide from the
  // first error estimate.
  constexpr int pre = 8;
  const double step = (b - a) / pre;
  double total = 0.0;
  for (int i = 0; i < pre; ++i) {
    const double lo = a + i * step;
    const double hi = (i == pre - 1) ? b : lo + step;
    total += adapt(f, lo, hi, gk15(f, lo, hi), opts.rel_tol, opts.abs_tol,
                   opts.max_depth);
  }
  return total;
}

double integrate_peaked(const std::function<double(double)>& f, double center,
                        double width, const QuadratureOptions& opts) {
  const double w = std::fabs(width);
  const double core_lo = center - 64.0 * w;
  const double core_hi = center + 64.0 * w;
  double total = integrate(f, core_lo, core_hi, opts);
  // tails: x = center +/- 64 w / t for t in (0, 1]
  const auto tail = [&](double sign) {
    const std::function<double(double)> g = [&, sign](double t) {
      const double off = 64.0 * w / t;
      return f(center + sign * off) * off / t;
    };
    return integrate(g, 1e-12, 1.0, opts);
  };
  total += tail(+1.0) + tail(-1.0);
  return total;
}

}  // namespace omckit
