#include "omckit/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "omckit/errors.hpp"

namespace omckit {

nlohmann::json FitResult::to_json() const {
  return nlohmann::json{{"parameters", parameters},
                        {"uncertainties", uncertainties},
                        {"residual_norm", residual_norm},
                        {"converged", converged},
                        {"iterations", iterations},
                        {"warnings", warnings}};
}

FitResult FitResult::from_json(const nlohmann::json& j) {
  FitResult r;
  r.parameters = j.at("parameters").get<std::map<std::string, double>>();
  r.uncertainties = j.at("uncertainties").get<std::map<std::string, double>>();
  r.residual_norm = j.at("residual_norm").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  if (j.contains("warnings"))
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

namespace {

double cost_of(const std::vector<double>& r) {
  double c = 0.0;
  for (double v : r) c += v * v;
  return 0.5 * c;
}

// Cholesky solve of (A + lambda diag(A)) x = b; returns false if not SPD.
bool solve_damped(std::vector<std::vector<double>> a, std::vector<double> b,
                  double lambda, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i][i];
    a[i][i] = d + lambda * std::max(d, 1e-300);
  }
  // in-place Cholesky
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        a[i][i] = std::sqrt(s);
      } else {
        a[i][j] = s / a[j][j];
      }
    }
  }
  // forward/back substitution
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i][k] * b[k];
    b[i] = s / a[i][i];
  }
  x.assign(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k][ii] * x[k];
    x[ii] = s / a[ii][ii];
  }
  return true;
}

// Inverse via Cholesky; returns false if singular.
bool invert_spd(const std::vector<std::vector<double>>& a,
                std::vector<std::vector<double>>& inv) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<double> e(n, 0.0), x;
    e[col] = 1.0;
    if (!solve_damped(a, e, 0.0, x)) return false;
    for (std::size_t row = 0; row < n; ++row) inv[row][col] = x[row];
  }
  return true;
}

}  // namespace

LsqSolution least_squares(const ResidualFn& residuals,
                          std::vector<double> init, const LsqOptions& opts,
                          bool scale_covariance_by_reduced_chisq) {
  const std::size_t n = init.size();
  if (n == 0) throw DomainError("least_squares: empty parameter vector");
  const bool bounded = !opts.lower.empty() || !opts.upper.empty();
  if (bounded &&
      ((!opts.lower.empty() && opts.lower.size() != n) ||
       (!opts.upper.empty() && opts.upper.size() != n)))
    throw DomainError("least_squares: bounds size mismatch");

  auto clamp = [&](std::vector<double>& x) {
    if (!bounded) return;
    for (std::size_t i = 0; i < n; ++i) {
      if (!opts.lower.empty()) x[i] = std::max(x[i], opts.lower[i]);
      if (!opts.upper.empty()) x[i] = std::min(x[i], opts.upper[i]);
    }
  };

  LsqSolution sol;
  clamp(init);
  std::vector<double> x = init;
  std::vector<double> r = residuals(x);
  const std::size_t m = r.size();
  for (double v : r)
    if (!std::isfinite(v))
      throw DomainError("least_squares: residual not finite at init");
  double cost = cost_of(r);
  if (opts.record_trace) sol.cost_trace.push_back(cost);

  double lambda = 0.0;  // undamped first so linear problems solve in one step
  bool singular_warned = false;
  std::vector<std::vector<double>> jac(m, std::vector<double>(n));
  std::vector<std::vector<double>> jtj(n, std::vector<double>(n));
  std::vector<double> grad(n);

  int iter = 0;
  bool converged = false;
  for (; iter < opts.max_iterations && !converged; ++iter) {
    // central-difference Jacobian; fall back to one-sided at a bound
    for (std::size_t j = 0; j < n; ++j) {
      const double h = 3e-6 * std::max(std::fabs(x[j]), 1e-8);
      std::vector<double> xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      clamp(xp);
      clamp(xm);
      const double hj = xp[j] - xm[j];
      if (hj == 0.0) {
        for (std::size_t i = 0; i < m; ++i) jac[i][j] = 0.0;
        continue;
      }
      const std::vector<double> rp = residuals(xp);
      const std::vector<double> rm = residuals(xm);
      for (std::size_t i = 0; i < m; ++i) jac[i][j] = (rp[i] - rm[i]) / hj;
    }

    for (std::size_t a = 0; a < n; ++a) {
      grad[a] = 0.0;
      for (std::size_t i = 0; i < m; ++i) grad[a] += jac[i][a] * r[i];
      for (std::size_t b = 0; b <= a; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += jac[i][a] * jac[i][b];
        jtj[a][b] = s;
        jtj[b][a] = s;
      }
    }

    // column degeneracy check
    for (std::size_t a = 0; a < n && !singular_warned; ++a) {
      if (jtj[a][a] <= 1e-300) {
        sol.warnings.push_back("singular-jacobian: parameter index " +
                               std::to_string(a) +
                               " has no effect on the residuals");
        singular_warned = true;
      }
    }

    // projected-gradient convergence test
    double gmax = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      double g = grad[a];
      if (bounded) {
        const bool at_lo =
            !opts.lower.empty() && x[a] <= opts.lower[a] && g > 0.0;
        const bool at_hi =
            !opts.upper.empty() && x[a] >= opts.upper[a] && g < 0.0;
        if (at_lo || at_hi) g = 0.0;
      }
      gmax = std::max(gmax, std::fabs(g));
    }
    if (gmax < opts.gradient_tol * std::max(1.0, cost)) {
      converged = true;
      break;
    }

    // try damped steps until one decreases the cost
    bool accepted = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      std::vector<double> step;
      std::vector<double> neg_grad(n);
      for (std::size_t a = 0; a < n; ++a) neg_grad[a] = -grad[a];
      if (!solve_damped(jtj, neg_grad, lambda, step)) {
        if (!singular_warned) {
          sol.warnings.push_back("singular-jacobian: normal equations not SPD");
          singular_warned = true;
        }
        lambda = lambda == 0.0 ? 1e-4 : lambda * 10.0;
        continue;
      }
      std::vector<double> xt(n);
      for (std::size_t a = 0; a < n; ++a) xt[a] = x[a] + step[a];
      clamp(xt);

      double snorm = 0.0, xnorm = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        snorm += (xt[a] - x[a]) * (xt[a] - x[a]);
        xnorm += x[a] * x[a];
      }
      if (std::sqrt(snorm) <
          opts.step_tol * (1.0 + std::sqrt(xnorm))) {
        converged = true;
        break;
      }

      std::vector<double> rt = residuals(xt);
      bool finite = true;
      for (double v : rt)
        if (!std::isfinite(v)) {
          finite = false;
          break;
        }
      const double ct = finite ? cost_of(rt) : std::numeric_limits<double>::infinity();
      if (finite && ct < cost) {
        x = std::move(xt);
        r = std::move(rt);
        cost = ct;
        lambda = lambda < 1e-12 ? 0.0 : lambda / 3.0;
        accepted = true;
        if (opts.record_trace) sol.cost_trace.push_back(cost);
        break;
      }
      lambda = lambda == 0.0 ? 1e-4 : lambda * 4.0;
    }
    if (converged) break;
    if (!accepted) {
      converged = true;  // no productive step left at any damping
      break;
    }
  }

  sol.x = x;
  sol.cost = cost;
  sol.iterations = iter;
  sol.converged = converged;
  if (!converged)
    sol.warnings.push_back("non-convergence: iteration limit reached");

  // covariance from the local quadratic model
  {
    std::vector<std::vector<double>> cov;
    if (invert_spd(jtj, cov)) {
      double scale = 1.0;
      if (scale_covariance_by_reduced_chisq && m > n)
        scale = 2.0 * cost / static_cast<double>(m - n);
      sol.covariance.assign(n, std::vector<double>(n));
      sol.sigma.assign(n, 0.0);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b)
          sol.covariance[a][b] = cov[a][b] * scale;
        sol.sigma[a] = std::sqrt(std::max(sol.covariance[a][a], 0.0));
      }
    } else {
      sol.sigma.assign(n, 0.0);
      sol.covariance.assign(n, std::vector<double>(n, 0.0));
      if (!singular_warned)
        sol.warnings.push_back("singular-jacobian: covariance unavailable");
    }
  }
  return sol;
}

FitResult make_fit_result(const LsqSolution& sol,
                          const std::vector<std::string>& names) {
  if (names.size() != sol.x.size())
    throw DomainError("make_fit_result: name/parameter count mismatch");
  FitResult r;
  for (std::size_t i = 0; i < names.size(); ++i) {
    r.parameters[names[i]] = sol.x[i];
    r.uncertainties[names[i]] = sol.sigma[i];
  }
  r.residual_norm = std::sqrt(2.0 * sol.cost);
  r.converged = sol.converged;
  r.iterations = sol.iterations;
  r.warnings = sol.warnings;
  return r;
}

}  // namespace omckit
