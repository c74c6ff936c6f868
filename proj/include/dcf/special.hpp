#pragma once

#include <vector>

namespace dcf::special {

/// e^{-x} I_0(x) for x >= 0. Power series up to x = 700, asymptotic
/// expansion above.
double bessel_i0e(double x);

/// e^{-x} I_k(x) for k = 0..kmax, by Miller's backward recurrence
/// normalized against bessel_i0e.
std::vector<double> bessel_ie_sequence(double x, int kmax);

/// First-order Marcum Q function Q_1(a, b) for a, b >= 0.
double marcum_q1(double a, double b);

} // namespace dcf::special
