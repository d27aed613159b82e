#include "special_functions.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "common.hpp"

namespace simbf {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// E1(z) by the modified Lentz continued fraction,
//   E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...)))).
// Used here on the positive imaginary axis (z = jx, x >= 4).
std::complex<double> exp_integral_e1(std::complex<double> z) {
  const double tiny = 1e-300;
  std::complex<double> b = z + 1.0;
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 1; i <= 400; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return h * std::exp(-z);
  }
  throw NumericError("exp_integral_e1: continued fraction did not converge");
}

}  // namespace

double cosine_integral(double x) {
  if (!(x > 0.0)) throw NumericError("cosine_integral: argument must be positive");
  if (x < 4.0) {
    // Ci(x) = gamma + ln x + sum_{k>=1} (-x^2)^k / (2k (2k)!)
    double sum = 0.0;
    double term = 1.0;  // x^{2k} / (2k)!
    const double x2 = x * x;
    for (int k = 1; k <= 60; ++k) {
      term *= -x2 / ((2.0 * k - 1.0) * (2.0 * k));
      const double contrib = term / (2.0 * k);
      sum += contrib;
      if (std::abs(contrib) < 1e-18 * (std::abs(sum) + 1.0)) break;
    }
    return kEulerGamma + std::log(x) + sum;
  }
  const std::complex<double> e1 = exp_integral_e1({0.0, x});
  return -e1.real();
}

double sine_integral(double x) {
  if (!(x > 0.0)) throw NumericError("sine_integral: argument must be positive");
  if (x < 4.0) {
    // Si(x) = sum_{k>=0} (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
    double sum = x;
    double term = x;  // x^{2k+1} / (2k+1)!
    const double x2 = x * x;
    for (int k = 1; k <= 60; ++k) {
      term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
      const double contrib = term / (2.0 * k + 1.0);
      sum += contrib;
      if (std::abs(contrib) < 1e-18 * (std::abs(sum) + 1.0)) break;
    }
    return sum;
  }
  const std::complex<double> e1 = exp_integral_e1({0.0, x});
  return 0.5 * kPi + e1.imag();
}

double bessel_i1_i0_ratio(double kappa) {
  if (!(kappa > 0.0)) throw NumericError("bessel_i1_i0_ratio: concentration must be positive");
  // Gauss continued fraction I_{v+1}/I_v = 1/(2(v+1)/x + 1/(2(v+2)/x + ...)),
  // evaluated by modified Lentz at v = 0.
  const double tiny = 1e-300;
  double b = 2.0 / kappa;
  double c = b + 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 2; i <= 10000; ++i) {
    b = 2.0 * i / kappa;
    d = 1.0 / (b + d);
    c = b + 1.0 / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return h;
  }
  throw NumericError("bessel_i1_i0_ratio: continued fraction did not converge");
}

}  // namespace simbf
