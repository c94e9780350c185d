#pragma once

#include <optional>
#include <span>
#include <vector>

#include "omckit/interp.hpp"
#include "omckit/least_squares.hpp"
#include "omckit/lineshape.hpp"
#include "omckit/physics.hpp"
#include "omckit/spectrum.hpp"

namespace omckit {

/// One measured point of a cooling curve: occupancy and linewidth versus
/// photon number at a given detuning sign (+1 red, -1 blue, 0 resonant).
struct CoolingCurvePoint {
  double n_c = 0.0;
  double occupancy = 0.0;
  double occupancy_err = 0.0;
  double linewidth_hz = 0.0;
  double linewidth_err_hz = 0.0;
  int detuning_sign = +1;
  double t_f_k = 0.0;
};

struct LineshapeFitOptions {
  // n_avg > 0 weights each bin by psd/sqrt(n_avg); 0 means unit weights.
  int n_avg = 0;
  // Voigt only: freeze the Lorentzian width at this value.
  std::optional<double> fixed_gamma_l_hz;
};

struct LineshapeFit {
  LineshapeParams params;
  LineshapeParams sigma;  // 1-sigma per field; 0 for frozen fields
  FitResult result;
};

/// Lorentzian + flat floor. Initializes center at the argmax, width from the
/// second moment above half max, floor from the outer-quartile median.
/// Throws NoPeakError when the peak does not clear 3x the floor scatter.
LineshapeFit fit_lorentzian(const Spectrum& spec,
                            const LineshapeFitOptions& opts = {});

/// Voigt + flat floor; separates gamma_l and gamma_g. A degeneracy warning
/// is attached when the width ratio leaves [0.1, 10] at SNR < 10.
LineshapeFit fit_voigt(const Spectrum& spec,
                       const LineshapeFitOptions& opts = {});

/// Weighted power-law fit y = amplitude * x^exponent by linear regression
/// in log-log space. Errors, when given, are 1-sigma on y.
struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  double amplitude_sigma = 0.0;
  double exponent_sigma = 0.0;
  FitResult result;
};
PowerLawFit fit_power_law(std::span<const double> x,
                          std::span<const double> y,
                          std::span<const double> y_err = {});

/// Mechanical-mode area versus probe detuning at fixed n_c; fits
/// area = amplitude * envelope(delta) / (1 + C * w(delta)) where w is the
/// back-action shape normalized to 1 at delta = omega_m, and also evaluates
/// the C -> 0 null model.
struct AreaDetuningPoint {
  double delta_hz = 0.0;
  double area = 0.0;
  double area_err = 0.0;
};
struct AreaDetuningFit {
  double cooperativity = 0.0;
  double cooperativity_sigma = 0.0;
  double amplitude = 0.0;
  double null_amplitude = 0.0;       // best C = 0 model
  double null_residual_norm = 0.0;
  FitResult result;
};
AreaDetuningFit fit_area_vs_detuning(const std::vector<AreaDetuningPoint>& pts,
                                     const DeviceParams& dev, double n_c);

/// Time-averaged linewidth versus detuning with the cooperativity
/// constrained: fwhm(delta) = voigt_fwhm(gamma_i (1 + C w(delta)), gamma_g).
/// Returns gamma_i_hz, gamma_g_hz, and the g0_hz implied by the constraint.
struct DetuningWidthPoint {
  double delta_hz = 0.0;
  double fwhm_hz = 0.0;
  double fwhm_err_hz = 0.0;
};
FitResult fit_jitter_vs_detuning(const std::vector<DetuningWidthPoint>& pts,
                                 const DeviceParams& dev, double n_c,
                                 double cooperativity);

/// g0 from detuned linewidth sweeps. LinewidthDifference uses
/// gamma_om = (gamma_red - gamma_blue)/2 per n_c; CalibratedCooperativity
/// derives gamma_om from the calibrated red-detuned occupancy against the
/// fridge bath (valid where the fridge bath dominates, e.g. 4 K data).
/// Both then fit gamma_om = (4 g0^2 / kappa) n_c through the origin.
enum class G0Estimator { LinewidthDifference, CalibratedCooperativity };
FitResult fit_g0_from_linewidths(const std::vector<CoolingCurvePoint>& pts,
                                 const DeviceParams& dev,
                                 G0Estimator estimator =
                                     G0Estimator::LinewidthDifference);

/// Joint two-bath occupancy fit over cooling curves at multiple fridge
/// temperatures: one fridge coupling gamma_0 plus a positive gamma_p(n_c)
/// table on log-spaced knots, interpolated shape-preservingly in log-log.
struct BathFitOptions {
  int knots_per_decade = 4;
  bool per_point = false;        // solve gamma_p pointwise instead of knots
  bool profile_gamma_0 = true;   // profile-likelihood sigma for gamma_0
  int starts = 1;                // optional multi-start (e.g. 8)
};
struct BathModelFit {
  double gamma_0_hz = 0.0;
  double gamma_0_sigma_hz = 0.0;
  std::vector<double> knot_n_c;
  std::vector<double> knot_gamma_p_hz;
  std::vector<double> knot_gamma_p_log_sigma;  // sigma of ln gamma_p
  double np_amplitude = 0.0;
  double np_exponent = 0.0;
  FitResult result;

  double gamma_p(double n_c) const;
  double gamma_i(double n_c) const { return gamma_0_hz + gamma_p(n_c); }
  double occupancy(const DeviceParams& dev, double n_c, double t_f_k,
                   int detuning_sign) const;
  double asymmetry(const DeviceParams& dev, double n_c, double t_f_k) const;
};
BathModelFit fit_bath_model(const std::vector<CoolingCurvePoint>& pts,
                            const DeviceParams& dev, double np_amplitude,
                            double np_exponent,
                            const BathFitOptions& opts = {});

}  // namespace omckit
