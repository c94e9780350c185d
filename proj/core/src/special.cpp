#include "omckit/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "omckit/errors.hpp"

namespace omckit {

namespace {

constexpr double kInvSqrtPi = 0.5641895835477563;  // 1/sqrt(pi)
constexpr double kSqrtPi = 1.7724538509055160;

// Humlicek CPF12 constants.
constexpr std::array<double, 6> kC = {1.0117281,    -0.75197147,   0.012557727,
                                      0.010022008,  -2.4206814e-4, 5.0084806e-7};
constexpr std::array<double, 6> kS = {1.393237,     0.23115241,    -0.15535147,
                                      0.0062183662, 9.1908299e-5,  -6.2752596e-7};
constexpr std::array<double, 6> kT = {0.31424038, 0.94778839, 1.5976826,
                                      2.2795071,  3.020637,   3.8897249};

}  // namespace

double faddeeva_re(double x, double y) {
  const double abx = std::fabs(x);
  const double xq = abx * abx;
  const double yq = y * y;

  if (y >= 70.55) {
    return y * kInvSqrtPi / (xq + yq);
  }

  const double xlim0 = std::sqrt(y * (40.0 - y * 3.6) + 15100.0);
  double xlim1 = (y >= 8.425) ? 0.0 : std::sqrt(164.0 - y * (y * 1.8 + 4.3));
  double xlim2 = 6.8 - y;
  const double xlim3 = y * 2.4;
  const double xlim4 = y * 18.1 + 1.65;
  if (y <= 1e-6) {
    xlim1 = xlim0;
    xlim2 = xlim0;
  }

  if (abx >= xlim0) {  // region 0: one-term asymptotic
    return y * kInvSqrtPi / (xq + yq);
  }

  if (abx >= xlim1) {  // region 1
    const double a0 = yq + 0.5;
    const double d0 = a0 * a0;
    const double d2 = yq + yq - 1.0;
    return kInvSqrtPi / (d0 + xq * (d2 + xq)) * y * (a0 + xq);
  }

  if (abx > xlim2) {  // region 2
    const double h0 = yq * (yq * (yq * (yq + 6.0) + 10.5) + 4.5) + 0.5625;
    const double h2 = yq * (yq * (yq * 4.0 + 6.0) + 9.0) - 4.5;
    const double h4 = 10.5 - yq * (6.0 - yq * 6.0);
    const double h6 = yq * 4.0 - 6.0;
    const double e0 = yq * (yq * (yq + 5.5) + 8.25) + 1.875;
    const double e2 = yq * (yq * 3.0 + 1.0) + 5.25;
    const double e4 = h6 * 0.75;
    return kInvSqrtPi / (h0 + xq * (h2 + xq * (h4 + xq * (h6 + xq)))) * y *
           (e0 + xq * (e2 + xq * (e4 + xq)));
  }

  if (abx < xlim3) {  // region 3
    const double z0 =
        y * (y * (y * (y * (y * (y * (y * (y * (y * (y + 13.3988) + 88.26741) +
                                           369.1989) +
                                      1074.409) +
                                 2256.981) +
                            3447.629) +
                       3764.966) +
                  2802.87) +
             1280.829) +
        272.1014;
    const double z2 =
        y * (y * (y * (y * (y * (y * (y * (y * 5.0 + 53.59518) + 266.2987) +
                                 793.4273) +
                            1549.675) +
                       2037.31) +
                  1758.336) +
             902.3066) +
        211.678;
    const double z4 =
        y * (y * (y * (y * (y * (y * 10.0 + 80.39278) + 269.2916) + 479.2576) +
                  497.3014) +
             308.1852) +
        78.86585;
    const double z6 =
        y * (y * (y * (y * 10.0 + 53.59518) + 92.75679) + 55.02933) + 22.03523;
    const double z8 = y * (y * 5.0 + 13.3988) + 1.49646;
    const double p0 =
        y * (y * (y * (y * (y * (y * (y * (y * (y * 0.3183291 + 4.264678) +
                                           27.93941) +
                                      115.3772) +
                                 328.2151) +
                            662.8097) +
                       946.897) +
                  919.4955) +
             549.3954) +
        153.5168;
    const double p2 =
        y * (y * (y * (y * (y * (y * (y * 1.2733163 + 12.79458) + 56.81652) +
                            139.4665) +
                       189.773) +
                  124.5975) -
             1.322256) -
        34.16955;
    const double p4 =
        y * (y * (y * (y * (y * 1.9099744 + 12.79568) + 29.81482) + 24.01655) +
             10.46332) +
        2.584042;
    const double p6 =
        y * (y * (y * 1.273316 + 4.266322) + 0.9377051) - 0.07272979;
    const double p8 = y * 0.3183291 + 5.480304e-4;
    return kSqrtPi / (z0 + xq * (z2 + xq * (z4 + xq * (z6 + xq * (z8 + xq))))) *
           (p0 + xq * (p2 + xq * (p4 + xq * (p6 + xq * p8))));
  }

  // CPF12 algorithm near the real axis
  const double ypy0 = y + 1.5;
  const double ypy0q = ypy0 * ypy0;
  std::array<double, 6> mq, mf, xm, ym, pq, pf, xp, yp;
  for (int j = 0; j < 6; ++j) {
    double d = x - kT[j];
    mq[j] = d * d;
    mf[j] = 1.0 / (mq[j] + ypy0q);
    xm[j] = mf[j] * d;
    ym[j] = mf[j] * ypy0;
    d = x + kT[j];
    pq[j] = d * d;
    pf[j] = 1.0 / (pq[j] + ypy0q);
    xp[j] = pf[j] * d;
    yp[j] = pf[j] * ypy0;
  }
  double k = 0.0;
  if (abx <= xlim4) {  // CPF12 region I
    for (int j = 0; j < 6; ++j)
      k += kC[j] * (ym[j] + yp[j]) - kS[j] * (xm[j] - xp[j]);
  } else {  // CPF12 region II
    const double yf = y + 3.0;
    for (int j = 0; j < 6; ++j) {
      k += (kC[j] * (mq[j] * mf[j] - ym[j] * 1.5) + kS[j] * yf * xm[j]) /
               (mq[j] + 2.25) +
           (kC[j] * (pq[j] * pf[j] - yp[j] * 1.5) - kS[j] * yf * xp[j]) /
               (pq[j] + 2.25);
    }
    k = y * k + std::exp(-xq);
  }
  return k;
}

double upper_incomplete_gamma(double alpha, double z) {
  if (!(alpha > 0.0))
    throw DomainError("upper_incomplete_gamma: alpha must be > 0, got " +
                      std::to_string(alpha));
  if (!(z >= 0.0))
    throw DomainError("upper_incomplete_gamma: z must be >= 0, got " +
                      std::to_string(z));
  if (z == 0.0) return std::tgamma(alpha);

  if (z < alpha + 1.0) {
    // lower-gamma series, then complement
    double term = 1.0 / alpha;
    double sum = term;
    double ap = alpha;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      term *= z / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    const double lower = sum * std::exp(-z + alpha * std::log(z));
    return std::tgamma(alpha) - lower;
  }

  // modified Lentz continued fraction
  constexpr double tiny = 1e-300;
  double b = z + 1.0 - alpha;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - alpha);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-z + alpha * std::log(z)) * h;
}

double riemann_zeta(double a) {
  if (!(a > 1.0))
    throw DomainError("riemann_zeta: argument must be > 1, got " +
                      std::to_string(a));
  // Euler-Maclaurin with N direct terms and Bernoulli corrections.
  constexpr int n_direct = 16;
  // B_{2k}/(2k)! for 2k = 2..16
  constexpr std::array<double, 8> bern = {
      8.3333333333333333e-02,  -1.3888888888888889e-03,
      3.3068783068783069e-05,  -8.2671957671957672e-07,
      2.0876756987868099e-08,  -5.2841901386874932e-10,
      1.3382536530684679e-11,  -3.3896802963225829e-13};

  double sum = 0.0;
  for (int n = 1; n < n_direct; ++n) sum += std::pow(n, -a);
  const double nd = static_cast<double>(n_direct);
  sum += 0.5 * std::pow(nd, -a);
  sum += std::pow(nd, 1.0 - a) / (a - 1.0);

  // correction terms: B_{2k}/(2k)! * a(a+1)...(a+2k-2) * N^{-(a+2k-1)}
  double rising = a;  // product a(a+1)...(a+2k-2); starts with a for k=1
  double npow = std::pow(nd, -a - 1.0);
  for (std::size_t k = 0; k < bern.size(); ++k) {
    sum += bern[k] * rising * npow;
    rising *= (a + 2.0 * k + 1.0) * (a + 2.0 * k + 2.0);
    npow /= nd * nd;
  }
  return sum;
}

}  // namespace omckit
