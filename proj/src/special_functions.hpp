#pragma once

namespace simbf {

// Cosine integral Ci(x) and sine integral Si(x) for x > 0.
// Power series below x = 4, otherwise E1(jx) via a modified Lentz
// continued fraction; both branches are good to better than 1e-12.
double cosine_integral(double x);
double sine_integral(double x);

// I1(kappa)/I0(kappa), the first circular moment of a von Mises
// distribution. Evaluated as a continued fraction so that large
// concentrations neither overflow nor lose accuracy.
double bessel_i1_i0_ratio(double kappa);

}  // namespace simbf
