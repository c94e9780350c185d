#include "omckit/lineshape.hpp"

#include <cmath>

#include "omckit/constants.hpp"
#include "omckit/errors.hpp"
#include "omckit/special.hpp"

namespace omckit {

namespace {
constexpr double kTwoSqrtTwoLnTwo = 2.3548200450309493;  // FWHM/sigma
constexpr double kSqrtTwoPi = 2.5066282746310002;
}  // namespace

void LineshapeParams::validate() const {
  if (gamma_l_hz < 0.0 || gamma_g_hz < 0.0)
    throw DomainError("LineshapeParams: widths must be >= 0");
  if (!(gamma_l_hz + gamma_g_hz > 0.0))
    throw DomainError("LineshapeParams: gamma_l + gamma_g must be > 0");
  if (area < 0.0) throw DomainError("LineshapeParams: area must be >= 0");
}

double lorentzian_psd(double area, double gamma_hz, double center_hz,
                      double f_hz) {
  if (!(gamma_hz > 0.0)) throw DomainError("lorentzian_psd: gamma must be > 0");
  const double half = 0.5 * gamma_hz;
  const double d = f_hz - center_hz;
  return area * gamma_hz / (2.0 * constants::pi) / (d * d + half * half);
}

double gaussian_psd(double area, double fwhm_hz, double center_hz,
                    double f_hz) {
  if (!(fwhm_hz > 0.0)) throw DomainError("gaussian_psd: fwhm must be > 0");
  const double sigma = fwhm_hz / kTwoSqrtTwoLnTwo;
  const double d = (f_hz - center_hz) / sigma;
  return area * std::exp(-0.5 * d * d) / (sigma * kSqrtTwoPi);
}

double voigt_psd(const LineshapeParams& params, double f_hz) {
  params.validate();
  const double gl = params.gamma_l_hz;
  const double gg = params.gamma_g_hz;

  if (gg <= 1e-8 * gl)
    return params.floor + lorentzian_psd(params.area, gl, params.center_hz, f_hz);
  if (gl <= 1e-12 * gg)
    return params.floor + gaussian_psd(params.area, gg, params.center_hz, f_hz);

  const double sigma = gg / kTwoSqrtTwoLnTwo;
  const double x = (f_hz - params.center_hz) / (sigma * std::sqrt(2.0));
  const double y = 0.5 * gl / (sigma * std::sqrt(2.0));
  return params.floor +
         params.area * faddeeva_re(x, y) / (sigma * kSqrtTwoPi);
}

double voigt_fwhm(double gamma_l_hz, double gamma_g_hz) {
  return 0.5346 * gamma_l_hz +
         std::sqrt(0.2166 * gamma_l_hz * gamma_l_hz + gamma_g_hz * gamma_g_hz);
}

}  // namespace omckit
