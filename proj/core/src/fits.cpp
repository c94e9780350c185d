#include "omckit/fits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "omckit/calibration.hpp"
#include "omckit/constants.hpp"
#include "omckit/errors.hpp"

namespace omckit {

namespace {

struct SpectrumStats {
  std::size_t peak_index = 0;
  double peak = 0.0;
  double floor = 0.0;
  double floor_std = 0.0;
  double width_init_hz = 0.0;
  double area_init = 0.0;
};

SpectrumStats peak_stats(const Spectrum& spec) {
  spec.validate();
  const std::size_t n = spec.size();
  SpectrumStats st;

  // floor from the outer quartiles of the frequency span
  std::vector<double> outer;
  outer.reserve(n / 2 + 2);
  for (std::size_t i = 0; i < n; ++i)
    if (i < n / 4 || i >= n - n / 4) outer.push_back(spec.psd[i]);
  std::sort(outer.begin(), outer.end());
  st.floor = outer[outer.size() / 2];
  double var = 0.0;
  for (double v : outer) var += (v - st.floor) * (v - st.floor);
  st.floor_std = std::sqrt(var / static_cast<double>(outer.size()));

  st.peak_index = static_cast<std::size_t>(
      std::max_element(spec.psd.begin(), spec.psd.end()) - spec.psd.begin());
  st.peak = spec.psd[st.peak_index];

  // second moment of (psd - floor) over the above-half-max support
  const double half = st.floor + 0.5 * (st.peak - st.floor);
  double w_sum = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.psd[i] <= half) continue;
    const double w = spec.psd[i] - st.floor;
    w_sum += w;
    m1 += w * spec.frequency_hz[i];
    m2 += w * spec.frequency_hz[i] * spec.frequency_hz[i];
  }
  const double df = spec.f_step();
  if (w_sum > 0.0) {
    const double mean = m1 / w_sum;
    const double var_f = std::max(m2 / w_sum - mean * mean, df * df / 12.0);
    st.width_init_hz = std::sqrt(8.0 * std::log(2.0) * var_f);
  } else {
    st.width_init_hz = 2.0 * df;
  }
  st.area_init = std::max(
      (st.peak - st.floor) * constants::pi * st.width_init_hz / 2.0, 1e-300);
  return st;
}

void require_peak(const SpectrumStats& st) {
  if (!((st.peak - st.floor) > 3.0 * st.floor_std))
    throw NoPeakError("no resolvable peak: amplitude " +
                      std::to_string(st.peak - st.floor) + " vs 3x floor std " +
                      std::to_string(3.0 * st.floor_std));
}

std::vector<double> bin_sigmas(const Spectrum& spec,
                               const LineshapeFitOptions& opts) {
  std::vector<double> sigma(spec.size(), 1.0);
  if (opts.n_avg > 0) {
    const double rel = 1.0 / std::sqrt(static_cast<double>(opts.n_avg));
    for (std::size_t i = 0; i < spec.size(); ++i)
      sigma[i] = std::max(std::fabs(spec.psd[i]) * rel, 1e-300);
  }
  return sigma;
}

// Weighting by the measured bin values biases the fit low (downward
// fluctuations get the larger weights). One reweighting pass against the
// fitted model removes the first-order bias.
void reweight_from_model(std::vector<double>& sigma, int n_avg,
                         const std::function<double(std::size_t)>& model_at) {
  if (n_avg <= 0) return;
  const double rel = 1.0 / std::sqrt(static_cast<double>(n_avg));
  for (std::size_t i = 0; i < sigma.size(); ++i)
    sigma[i] = std::max(std::fabs(model_at(i)) * rel, 1e-300);
}

}  // namespace

LineshapeFit fit_lorentzian(const Spectrum& spec,
                            const LineshapeFitOptions& opts) {
  const SpectrumStats st = peak_stats(spec);
  require_peak(st);
  std::vector<double> sigma = bin_sigmas(spec, opts);
  const double df = spec.f_step();

  // params: center, gamma_l, area, floor
  std::vector<double> init = {spec.frequency_hz[st.peak_index],
                              st.width_init_hz, st.area_init, st.floor};
  LsqOptions lo;
  lo.lower = {spec.f_start(), 1e-3 * df, 0.0,
              -std::numeric_limits<double>::infinity()};
  lo.upper = {spec.frequency_hz.back(),
              spec.frequency_hz.back() - spec.f_start(),
              std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity()};

  const auto model_at = [&](std::span<const double> p, std::size_t i) {
    return p[3] + lorentzian_psd(p[2], p[1], p[0], spec.frequency_hz[i]);
  };
  const auto residuals = [&](std::span<const double> p) {
    std::vector<double> r(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i)
      r[i] = (model_at(p, i) - spec.psd[i]) / sigma[i];
    return r;
  };

  LsqSolution sol =
      least_squares(residuals, init, lo, /*scale_cov=*/opts.n_avg == 0);
  if (opts.n_avg > 0) {
    const std::vector<double> x = sol.x;
    reweight_from_model(sigma, opts.n_avg,
                        [&](std::size_t i) { return model_at(x, i); });
    sol = least_squares(residuals, sol.x, lo, false);
  }
  LineshapeFit fit;
  fit.params = {sol.x[0], sol.x[1], 0.0, sol.x[2], sol.x[3]};
  fit.sigma = {sol.sigma[0], sol.sigma[1], 0.0, sol.sigma[2], sol.sigma[3]};
  fit.result = make_fit_result(
      sol, {"center_hz", "gamma_l_hz", "area", "floor"});
  return fit;
}

LineshapeFit fit_voigt(const Spectrum& spec, const LineshapeFitOptions& opts) {
  const SpectrumStats st = peak_stats(spec);
  require_peak(st);
  std::vector<double> sigma = bin_sigmas(spec, opts);
  const double df = spec.f_step();
  const bool fixed_l = opts.fixed_gamma_l_hz.has_value();

  const auto model_at = [&](std::span<const double> p, double f) {
    LineshapeParams line;
    line.center_hz = p[0];
    line.gamma_l_hz = fixed_l ? *opts.fixed_gamma_l_hz : p[1];
    line.gamma_g_hz = fixed_l ? p[1] : p[2];
    line.area = fixed_l ? p[2] : p[3];
    line.floor = 0.0;
    const double floor = fixed_l ? p[3] : p[4];
    return floor + voigt_psd(line, f);
  };
  const auto residuals = [&](std::span<const double> p) {
    std::vector<double> r(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i)
      r[i] = (model_at(p, spec.frequency_hz[i]) - spec.psd[i]) / sigma[i];
    return r;
  };

  const double f0 = spec.frequency_hz[st.peak_index];
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> init;
  LsqOptions lo;
  std::vector<std::string> names;
  if (fixed_l) {
    init = {f0, 0.5 * st.width_init_hz, st.area_init, st.floor};
    lo.lower = {spec.f_start(), 0.0, 0.0, -inf};
    lo.upper = {spec.frequency_hz.back(), 10.0 * st.width_init_hz +
                spec.frequency_hz.back() - spec.f_start(), inf, inf};
    names = {"center_hz", "gamma_g_hz", "area", "floor"};
  } else {
    init = {f0, 0.5 * st.width_init_hz, 0.5 * st.width_init_hz, st.area_init,
            st.floor};
    lo.lower = {spec.f_start(), 1e-3 * df, 0.0, 0.0, -inf};
    const double span = spec.frequency_hz.back() - spec.f_start();
    lo.upper = {spec.frequency_hz.back(), span, span, inf, inf};
    names = {"center_hz", "gamma_l_hz", "gamma_g_hz", "area", "floor"};
  }

  LsqSolution sol =
      least_squares(residuals, init, lo, /*scale_cov=*/opts.n_avg == 0);
  if (opts.n_avg > 0) {
    const std::vector<double> x = sol.x;
    reweight_from_model(
        sigma, opts.n_avg,
        [&](std::size_t i) { return model_at(x, spec.frequency_hz[i]); });
    sol = least_squares(residuals, sol.x, lo, false);
  }
  LineshapeFit fit;
  if (fixed_l) {
    fit.params = {sol.x[0], *opts.fixed_gamma_l_hz, sol.x[1], sol.x[2],
                  sol.x[3]};
    fit.sigma = {sol.sigma[0], 0.0, sol.sigma[1], sol.sigma[2], sol.sigma[3]};
  } else {
    fit.params = {sol.x[0], sol.x[1], sol.x[2], sol.x[3], sol.x[4]};
    fit.sigma = {sol.sigma[0], sol.sigma[1], sol.sigma[2], sol.sigma[3],
                 sol.sigma[4]};
  }
  fit.result = make_fit_result(sol, names);

  const double snr =
      st.floor_std > 0.0 ? (st.peak - st.floor) / st.floor_std : inf;
  const double gl = std::max(fit.params.gamma_l_hz, 1e-300);
  const double ratio = fit.params.gamma_g_hz / gl;
  if ((ratio < 0.1 || ratio > 10.0) && snr < 10.0)
    fit.result.warnings.push_back(
        "width-degeneracy: gamma_g/gamma_l = " + std::to_string(ratio) +
        " at SNR " + std::to_string(snr) +
        "; widths weakly identifiable");
  return fit;
}

PowerLawFit fit_power_law(std::span<const double> x,
                          std::span<const double> y,
                          std::span<const double> y_err) {
  const std::size_t n = x.size();
  if (y.size() != n)
    throw DomainError("fit_power_law: x/y size mismatch");
  if (!y_err.empty() && y_err.size() != n)
    throw DomainError("fit_power_law: error vector size mismatch");
  if (n < 2)
    throw DomainError("fit_power_law: need >= 2 points (underdetermined)");

  std::vector<double> lx(n), ly(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw DomainError("fit_power_law: data must be strictly positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    if (!y_err.empty()) {
      if (!(y_err[i] > 0.0))
        throw DomainError("fit_power_law: errors must be > 0");
      const double s = y_err[i] / y[i];
      w[i] = 1.0 / (s * s);
    } else {
      w[i] = 1.0;
    }
  }

  // centered weighted regression
  const double sw = std::accumulate(w.begin(), w.end(), 0.0);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += w[i] * lx[i];
    my += w[i] * ly[i];
  }
  mx /= sw;
  my /= sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
    sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0))
    throw DomainError("fit_power_law: x values are all identical");

  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double var_slope = 1.0 / sxx;
  double var_intercept = 1.0 / sw + mx * mx / sxx;
  if (y_err.empty() && n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ly[i] - (intercept + slope * lx[i]);
      rss += w[i] * r * r;
    }
    const double s2 = rss / static_cast<double>(n - 2);
    var_slope *= s2;
    var_intercept *= s2;
  }

  PowerLawFit fit;
  fit.exponent = slope;
  fit.exponent_sigma = std::sqrt(var_slope);
  fit.amplitude = std::exp(intercept);
  fit.amplitude_sigma = fit.amplitude * std::sqrt(var_intercept);
  fit.result.parameters = {{"amplitude", fit.amplitude},
                           {"exponent", fit.exponent}};
  fit.result.uncertainties = {{"amplitude", fit.amplitude_sigma},
                              {"exponent", fit.exponent_sigma}};
  double rn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::sqrt(w[i]) * (ly[i] - (intercept + slope * lx[i]));
    rn += r * r;
  }
  fit.result.residual_norm = std::sqrt(rn);
  fit.result.converged = true;
  fit.result.iterations = 0;  // closed form
  return fit;
}

namespace {

// back-action shape normalized to 1 at delta = +omega_m
double backaction_shape(const DeviceParams& dev, double delta_hz) {
  return gamma_om(dev, {delta_hz, 1.0}) /
         gamma_om(dev, {dev.omega_m_hz, 1.0});
}

}  // namespace

AreaDetuningFit fit_area_vs_detuning(const std::vector<AreaDetuningPoint>& pts,
                                     const DeviceParams& dev, double n_c) {
  (void)n_c;  // shape functions are n_c independent; kept for the interface
  if (pts.size() < 3)
    throw InsufficientDataError(
        "fit_area_vs_detuning: need >= 3 detuning points");

  std::vector<double> env(pts.size()), shape(pts.size()), sig(pts.size());
  double max_area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    env[i] = transduction(dev, pts[i].delta_hz).envelope;
    shape[i] = backaction_shape(dev, pts[i].delta_hz);
    sig[i] = pts[i].area_err > 0.0 ? pts[i].area_err : 1.0;
    max_area = std::max(max_area, pts[i].area);
  }
  const bool have_errors =
      std::any_of(pts.begin(), pts.end(),
                  [](const AreaDetuningPoint& p) { return p.area_err > 0.0; });

  const auto residuals = [&](std::span<const double> p) {
    std::vector<double> r(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double denom = std::max(1.0 + p[1] * shape[i], 1e-4);
      const double model = p[0] * env[i] / denom;
      r[i] = (model - pts[i].area) / sig[i];
    }
    return r;
  };

  LsqOptions lo;
  lo.lower = {0.0, 0.0};
  lo.upper = {std::numeric_limits<double>::infinity(), 1e3};
  const LsqSolution sol = least_squares(residuals, {2.0 * max_area, 1.0}, lo,
                                        /*scale_cov=*/!have_errors);

  AreaDetuningFit fit;
  fit.amplitude = sol.x[0];
  fit.cooperativity = sol.x[1];
  fit.cooperativity_sigma = sol.sigma[1];
  fit.result = make_fit_result(sol, {"amplitude", "cooperativity"});

  // C = 0 null model has a closed-form amplitude
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double wi = 1.0 / (sig[i] * sig[i]);
    num += wi * env[i] * pts[i].area;
    den += wi * env[i] * env[i];
  }
  fit.null_amplitude = den > 0.0 ? num / den : 0.0;
  double rn = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = (fit.null_amplitude * env[i] - pts[i].area) / sig[i];
    rn += r * r;
  }
  fit.null_residual_norm = std::sqrt(rn);
  return fit;
}

FitResult fit_jitter_vs_detuning(const std::vector<DetuningWidthPoint>& pts,
                                 const DeviceParams& dev, double n_c,
                                 double cooperativity) {
  if (pts.size() < 3)
    throw InsufficientDataError(
        "fit_jitter_vs_detuning: need >= 3 detuning points");
  if (!(cooperativity >= 0.0))
    throw DomainError("fit_jitter_vs_detuning: cooperativity must be >= 0");

  std::vector<double> shape(pts.size()), sig(pts.size());
  double min_w = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    shape[i] = backaction_shape(dev, pts[i].delta_hz);
    sig[i] = pts[i].fwhm_err_hz > 0.0 ? pts[i].fwhm_err_hz : 1.0;
    min_w = std::min(min_w, pts[i].fwhm_hz);
  }
  const bool have_errors = std::any_of(
      pts.begin(), pts.end(),
      [](const DetuningWidthPoint& p) { return p.fwhm_err_hz > 0.0; });

  const auto residuals = [&](std::span<const double> p) {
    std::vector<double> r(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double gl =
          std::max(p[0] * (1.0 + cooperativity * shape[i]), 0.0);
      const double model = voigt_fwhm(gl, p[1]);
      r[i] = (model - pts[i].fwhm_hz) / sig[i];
    }
    return r;
  };

  LsqOptions lo;
  lo.lower = {0.0, 0.0};
  const LsqSolution sol =
      least_squares(residuals, {0.3 * min_w, 0.8 * min_w}, lo,
                    /*scale_cov=*/!have_errors);

  FitResult out = make_fit_result(sol, {"gamma_i_hz", "gamma_g_hz"});
  // g0 implied by gamma_om(omega_m) = C * gamma_i at this n_c
  const double gamma_i = sol.x[0];
  const double half_kappa_sq = 0.25 * dev.kappa_hz * dev.kappa_hz;
  const double filter =
      1.0 / half_kappa_sq -
      1.0 / (4.0 * dev.omega_m_hz * dev.omega_m_hz + half_kappa_sq);
  double g0 = 0.0, g0_sigma = 0.0;
  if (n_c > 0.0 && cooperativity > 0.0 && gamma_i > 0.0) {
    g0 = std::sqrt(cooperativity * gamma_i /
                   (n_c * dev.kappa_hz * filter));
    g0_sigma = 0.5 * g0 * sol.sigma[0] / gamma_i;
  }
  out.parameters["g0_hz"] = g0;
  out.uncertainties["g0_hz"] = g0_sigma;
  return out;
}

FitResult fit_g0_from_linewidths(const std::vector<CoolingCurvePoint>& pts,
                                 const DeviceParams& dev,
                                 G0Estimator estimator) {
  // (n_c, gamma_om, sigma) series for the through-origin linear fit
  std::vector<double> xs, ys, ss;
  bool have_errors = false;

  if (estimator == G0Estimator::LinewidthDifference) {
    // pair red and blue linewidths at matching n_c
    std::vector<const CoolingCurvePoint*> red, blue;
    for (const auto& p : pts) {
      if (p.detuning_sign > 0) red.push_back(&p);
      if (p.detuning_sign < 0) blue.push_back(&p);
    }
    for (const auto* r : red) {
      if (!(r->n_c > 0.0)) continue;
      for (const auto* b : blue) {
        if (std::fabs(b->n_c - r->n_c) > 1e-9 * r->n_c) continue;
        xs.push_back(r->n_c);
        ys.push_back(0.5 * (r->linewidth_hz - b->linewidth_hz));
        const double s2 = r->linewidth_err_hz * r->linewidth_err_hz +
                          b->linewidth_err_hz * b->linewidth_err_hz;
        ss.push_back(s2 > 0.0 ? 0.5 * std::sqrt(s2) : 1.0);
        if (s2 > 0.0) have_errors = true;
        break;
      }
    }
  } else {
    // gamma_om from the calibrated occupancy against the fridge bath:
    // <n> = n_f / (1 + C)  =>  C = n_f/<n> - 1, gamma_om = gamma_red C/(1+C)
    for (const auto& p : pts) {
      if (p.detuning_sign <= 0 || !(p.n_c > 0.0)) continue;
      if (!(p.occupancy > 0.0) || !(p.t_f_k > 0.0)) continue;
      const double n_f = bose_einstein(dev.omega_m_hz, p.t_f_k);
      if (!(n_f > p.occupancy)) continue;  // no net cooling: skip
      const double c = n_f / p.occupancy - 1.0;
      xs.push_back(p.n_c);
      ys.push_back(p.linewidth_hz * c / (1.0 + c));
      double s2 = 0.0;
      if (p.occupancy_err > 0.0) {
        const double dc = n_f * p.occupancy_err / (p.occupancy * p.occupancy);
        const double d_go_dc = p.linewidth_hz / ((1.0 + c) * (1.0 + c));
        s2 += d_go_dc * d_go_dc * dc * dc;
      }
      if (p.linewidth_err_hz > 0.0) {
        const double d_go_dw = c / (1.0 + c);
        s2 += d_go_dw * d_go_dw * p.linewidth_err_hz * p.linewidth_err_hz;
      }
      ss.push_back(s2 > 0.0 ? std::sqrt(s2) : 1.0);
      if (s2 > 0.0) have_errors = true;
    }
  }

  std::set<long long> distinct;
  for (double x : xs) distinct.insert(llround(x * 1e12));
  if (distinct.size() < 2)
    throw InsufficientDataError(
        "fit_g0_from_linewidths: need >= 2 distinct n_c values with usable "
        "data, got " +
        std::to_string(distinct.size()));

  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double w = 1.0 / (ss[i] * ss[i]);
    sxy += w * xs[i] * ys[i];
    sxx += w * xs[i] * xs[i];
  }
  const double slope = sxy / sxx;
  double var_slope = 1.0 / sxx;
  if (!have_errors && xs.size() > 1) {
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - slope * xs[i];
      rss += r * r;
    }
    var_slope *= rss / static_cast<double>(xs.size() - 1);
  }

  FitResult out;
  out.converged = slope > 0.0;
  if (!(slope > 0.0))
    out.warnings.push_back("negative back-action slope; g0 undefined");
  const double g0 = slope > 0.0 ? std::sqrt(slope * dev.kappa_hz / 4.0) : 0.0;
  const double g0_sigma =
      slope > 0.0 ? 0.5 * g0 * std::sqrt(var_slope) / slope : 0.0;
  out.parameters = {{"g0_hz", g0}, {"slope_hz_per_photon", slope}};
  out.uncertainties = {{"g0_hz", g0_sigma},
                       {"slope_hz_per_photon", std::sqrt(var_slope)}};
  double rn = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = (ys[i] - slope * xs[i]) / ss[i];
    rn += r * r;
  }
  out.residual_norm = std::sqrt(rn);
  out.iterations = 0;
  return out;
}

// ---------------------------------------------------------------------------
// bath-model joint fit

namespace {

struct BathProblem {
  const std::vector<CoolingCurvePoint>* pts;
  const DeviceParams* dev;
  double np_amplitude;
  double np_exponent;
  std::vector<double> log_knots;  // ln n_c at knots
  std::vector<double> n_f;        // per point
  std::vector<double> n_p;        // per point
  std::vector<double> gamma_om;   // per point
  std::vector<double> sigma;      // per point

  // theta = [ln gamma_0, ln gamma_p(knot_0..K-1)]
  std::vector<double> residuals(std::span<const double> theta) const {
    const double gamma_0 = std::exp(theta[0]);
    std::vector<double> ky(log_knots.size());
    for (std::size_t k = 0; k < ky.size(); ++k) ky[k] = theta[1 + k];
    const Pchip curve(log_knots, ky);

    std::vector<double> r(pts->size());
    for (std::size_t i = 0; i < pts->size(); ++i) {
      const auto& p = (*pts)[i];
      const double gp = std::exp(curve(std::log(p.n_c)));
      const double total = gamma_0 + gp + gamma_om[i];
      double model;
      if (total > 1e-9) {
        model = (gamma_0 * n_f[i] + gp * n_p[i]) / total;
      } else {
        model = 1e12;  // unstable trial point: reject via huge residual
      }
      r[i] = (model - p.occupancy) / sigma[i];
    }
    return r;
  }

  // knots-only residuals at fixed gamma_0 (for the profile)
  std::vector<double> residuals_fixed_gamma0(double log_gamma_0,
                                             std::span<const double> ky_in)
      const {
    std::vector<double> theta(1 + ky_in.size());
    theta[0] = log_gamma_0;
    for (std::size_t k = 0; k < ky_in.size(); ++k) theta[1 + k] = ky_in[k];
    return residuals(theta);
  }
};

}  // namespace

double BathModelFit::gamma_p(double n_c) const {
  if (!(n_c > 0.0)) throw DomainError("BathModelFit::gamma_p: n_c must be > 0");
  const LogLogPchip curve(knot_n_c, knot_gamma_p_hz);
  return curve(n_c);
}

double BathModelFit::occupancy(const DeviceParams& dev, double n_c,
                               double t_f_k, int detuning_sign) const {
  const double gp = gamma_p(n_c);
  const double nf = t_f_k > 0.0 ? bose_einstein(dev.omega_m_hz, t_f_k) : 0.0;
  const double np = np_amplitude * std::pow(n_c, np_exponent);
  const double delta = detuning_sign == 0
                           ? 0.0
                           : (detuning_sign > 0 ? dev.omega_m_hz
                                                : -dev.omega_m_hz);
  const double gom = gamma_om(dev, {delta, n_c});
  const double total = gamma_0_hz + gp + gom;
  if (!(total > 0.0))
    throw InstabilityError("BathModelFit::occupancy: total damping <= 0");
  return (gamma_0_hz * nf + gp * np) / total;
}

double BathModelFit::asymmetry(const DeviceParams& dev, double n_c,
                               double t_f_k) const {
  const double red = occupancy(dev, n_c, t_f_k, +1);
  const double blue = occupancy(dev, n_c, t_f_k, -1);
  return (blue + 1.0) / red - 1.0;
}

BathModelFit fit_bath_model(const std::vector<CoolingCurvePoint>& pts,
                            const DeviceParams& dev, double np_amplitude,
                            double np_exponent, const BathFitOptions& opts) {
  if (pts.empty())
    throw InsufficientDataError("fit_bath_model: no data points");
  for (const auto& p : pts)
    if (!(p.n_c > 0.0))
      throw DomainError("fit_bath_model: all points need n_c > 0");

  std::vector<std::string> warnings;
  std::set<long long> temps;
  for (const auto& p : pts) temps.insert(llround(p.t_f_k * 1e9));
  if (temps.size() < 2)
    warnings.push_back(
        "non-identifiability: single fridge temperature; gamma_0 and "
        "gamma_p(n_c) are degenerate");

  BathProblem prob;
  prob.pts = &pts;
  prob.dev = &dev;
  prob.np_amplitude = np_amplitude;
  prob.np_exponent = np_exponent;

  double nc_min = pts.front().n_c, nc_max = pts.front().n_c;
  for (const auto& p : pts) {
    nc_min = std::min(nc_min, p.n_c);
    nc_max = std::max(nc_max, p.n_c);
  }

  std::size_t n_knots;
  if (opts.per_point) {
    std::set<long long> keys;
    for (const auto& p : pts) keys.insert(llround(std::log(p.n_c) * 1e9));
    n_knots = std::max<std::size_t>(keys.size(), 2);
    prob.log_knots.clear();
    for (long long k : keys)
      prob.log_knots.push_back(static_cast<double>(k) * 1e-9);
    if (prob.log_knots.size() == 1) {
      prob.log_knots.push_back(prob.log_knots.front() + 0.1);
      n_knots = 2;
    }
  } else {
    const double decades = std::log10(nc_max / nc_min);
    n_knots = std::max<std::size_t>(
        2, static_cast<std::size_t>(
               std::lround(opts.knots_per_decade * decades)) +
               1);
    prob.log_knots.resize(n_knots);
    const double lo = std::log(nc_min), hi = std::log(nc_max);
    for (std::size_t k = 0; k < n_knots; ++k)
      prob.log_knots[k] =
          lo + (hi - lo) * static_cast<double>(k) /
                   static_cast<double>(n_knots - 1);
  }

  prob.n_f.resize(pts.size());
  prob.n_p.resize(pts.size());
  prob.gamma_om.resize(pts.size());
  prob.sigma.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    prob.n_f[i] = p.t_f_k > 0.0 ? bose_einstein(dev.omega_m_hz, p.t_f_k) : 0.0;
    prob.n_p[i] = np_amplitude * std::pow(p.n_c, np_exponent);
    const double delta =
        p.detuning_sign == 0
            ? 0.0
            : (p.detuning_sign > 0 ? dev.omega_m_hz : -dev.omega_m_hz);
    prob.gamma_om[i] = gamma_om(dev, {delta, p.n_c});
    prob.sigma[i] = p.occupancy_err > 0.0 ? p.occupancy_err : 1.0;
  }

  // crude knot init from the nearest data point, single-bath inversion
  std::vector<double> knot_init(n_knots);
  for (std::size_t k = 0; k < n_knots; ++k) {
    double best_d = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = std::fabs(std::log(pts[i].n_c) - prob.log_knots[k]);
      if (d < best_d) {
        best_d = d;
        best_i = i;
      }
    }
    const auto& p = pts[best_i];
    const double denom = std::max(prob.n_p[best_i] - p.occupancy, 1e-6);
    double gp = (prob.gamma_om[best_i] + 100.0) * p.occupancy / denom;
    gp = std::clamp(gp, 1e-2, 1e7);
    knot_init[k] = std::log(gp);
  }

  LsqOptions lo;
  lo.lower.assign(1 + n_knots, std::log(1e-3));
  lo.upper.assign(1 + n_knots, std::log(1e8));
  lo.max_iterations = 500;

  const auto run_from = [&](double gamma0_init) {
    std::vector<double> init(1 + n_knots);
    init[0] = std::log(gamma0_init);
    for (std::size_t k = 0; k < n_knots; ++k) init[1 + k] = knot_init[k];
    return least_squares(
        [&prob](std::span<const double> th) { return prob.residuals(th); },
        init, lo, /*scale_cov=*/false);
  };

  LsqSolution best = run_from(100.0);
  if (opts.starts > 1) {
    const std::vector<double> scales = {0.03, 0.1, 0.3, 3.0, 10.0, 30.0, 100.0};
    for (int s = 0; s < std::min<int>(opts.starts - 1,
                                      static_cast<int>(scales.size()));
         ++s) {
      LsqSolution trial = run_from(100.0 * scales[s]);
      if (trial.cost < best.cost) best = trial;
    }
  }

  BathModelFit fit;
  fit.gamma_0_hz = std::exp(best.x[0]);
  fit.np_amplitude = np_amplitude;
  fit.np_exponent = np_exponent;
  fit.knot_n_c.resize(n_knots);
  fit.knot_gamma_p_hz.resize(n_knots);
  fit.knot_gamma_p_log_sigma.resize(n_knots);
  for (std::size_t k = 0; k < n_knots; ++k) {
    fit.knot_n_c[k] = std::exp(prob.log_knots[k]);
    fit.knot_gamma_p_hz[k] = std::exp(best.x[1 + k]);
    fit.knot_gamma_p_log_sigma[k] = best.sigma[1 + k];
  }

  // quadratic-model sigma for gamma_0 (fallback, and MC-cheap path)
  double sigma_quad = fit.gamma_0_hz * best.sigma[0];

  if (opts.profile_gamma_0) {
    // profile likelihood: chi^2(gamma_0) re-optimized over the knots
    const double chi2_min = 2.0 * best.cost;
    const double step_ln =
        best.sigma[0] > 1e-6 && best.sigma[0] < 2.0 ? best.sigma[0] : 0.3;
    LsqOptions klo;
    klo.lower.assign(n_knots, std::log(1e-3));
    klo.upper.assign(n_knots, std::log(1e8));

    const auto profile_chi2 = [&](double lg0) {
      std::vector<double> kin(best.x.begin() + 1, best.x.end());
      const LsqSolution s = least_squares(
          [&prob, lg0](std::span<const double> ky) {
            return prob.residuals_fixed_gamma0(lg0, ky);
          },
          kin, klo, false);
      return 2.0 * s.cost;
    };

    const auto crossing = [&](double direction) {
      double prev_lg = best.x[0];
      double prev_chi = chi2_min;
      for (int i = 1; i <= 12; ++i) {
        const double lg = best.x[0] + direction * step_ln * i;
        const double chi = profile_chi2(lg);
        if (chi >= chi2_min + 1.0) {
          const double frac =
              (chi2_min + 1.0 - prev_chi) / std::max(chi - prev_chi, 1e-12);
          return std::fabs(prev_lg + frac * (lg - prev_lg) - best.x[0]);
        }
        prev_lg = lg;
        prev_chi = chi;
      }
      return 12.0 * step_ln;  // flat direction: report the scan width
    };

    const double up = crossing(+1.0);
    const double down = crossing(-1.0);
    const double half_width_ln = 0.5 * (up + down);
    fit.gamma_0_sigma_hz = fit.gamma_0_hz * half_width_ln;
    if (half_width_ln >= 12.0 * step_ln - 1e-9)
      warnings.push_back("gamma_0 profile likelihood is flat; sigma poorly "
                         "constrained");
  } else {
    fit.gamma_0_sigma_hz = sigma_quad;
  }

  // gamma_om >> gamma_i everywhere: the bath split is unconstrained
  bool all_dominated = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (prob.gamma_om[i] < 50.0 * (fit.gamma_0_hz + fit.gamma_p(pts[i].n_c)))
      all_dominated = false;
  }
  if (all_dominated)
    warnings.push_back(
        "non-identifiability: back-action damping dominates gamma_0 + "
        "gamma_p at every point");

  fit.result = make_fit_result(best, [&] {
    std::vector<std::string> names = {"ln_gamma_0"};
    for (std::size_t k = 0; k < n_knots; ++k)
      names.push_back("ln_gamma_p_knot_" + std::to_string(k));
    return names;
  }());
  fit.result.parameters["gamma_0_hz"] = fit.gamma_0_hz;
  fit.result.uncertainties["gamma_0_hz"] = fit.gamma_0_sigma_hz;
  for (const auto& w : warnings) fit.result.warnings.push_back(w);
  return fit;
}

}  // namespace omckit
