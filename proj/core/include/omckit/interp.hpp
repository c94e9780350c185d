#pragma once

#include <vector>

namespace omckit {

/// Shape-preserving piecewise-cubic interpolant (Fritsch-Carlson slopes).
/// No overshoot between knots; linear extrapolation beyond the ends.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  std::size_t size() const { return x_.size(); }

 private:
  std::vector<double> x_, y_, slope_;
};

/// Pchip in log-log space: positive x and y only. Evaluates to
/// exp(p(log x)), so the interpolant stays strictly positive and power-law
/// segments are reproduced exactly.
class LogLogPchip {
 public:
  LogLogPchip() = default;
  LogLogPchip(const std::vector<double>& x, const std::vector<double>& y);

  double operator()(double x) const;

 private:
  Pchip core_;
};

}  // namespace omckit
