#pragma once

namespace omckit {

/// Voigt decomposition of a noise peak. Widths are FWHM in ordinary
/// frequency; `area` is the integral over f of the peak above `floor`
/// (equal to <n> or <n>+1 once calibrated).
struct LineshapeParams {
  double center_hz = 0.0;
  double gamma_l_hz = 0.0;  // Lorentzian FWHM (energy damping)
  double gamma_g_hz = 0.0;  // Gaussian FWHM (frequency jitter)
  double area = 0.0;
  double floor = 0.0;

  void validate() const;
};

/// Unit-area-scaled Lorentzian density over ordinary frequency:
/// value = area * (gamma/2pi) / ((f-center)^2 + (gamma/2)^2).
/// Integral over f equals `area`; peak value is 4*area/(2 pi gamma).
double lorentzian_psd(double area, double gamma_hz, double center_hz,
                      double f_hz);

/// Gaussian density with FWHM `fwhm_hz`, integral `area`.
double gaussian_psd(double area, double fwhm_hz, double center_hz,
                    double f_hz);

/// Voigt density: Lorentzian (FWHM gamma_l) convolved with a unit-area
/// Gaussian (FWHM gamma_g), scaled by params.area, plus params.floor.
/// Degenerate widths fall back to the exact pure profiles.
double voigt_psd(const LineshapeParams& params, double f_hz);

/// Accurate closed-form approximation of the Voigt FWHM:
/// 0.5346 gamma_l + sqrt(0.2166 gamma_l^2 + gamma_g^2).
double voigt_fwhm(double gamma_l_hz, double gamma_g_hz);

}  // namespace omckit
