#include "dcf/error.hpp"
#include "dcf/special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace dcf;

namespace {

// Q_1(a, b) straight from its defining integral.
double
marcum_by_quadrature(double a, double b)
{
  auto f = [a](double x) {
    return x * std::exp(-0.5 * (x * x + a * a)) * boost::math::cyl_bessel_i(0, a * x);
  };
  const double upper = std::max(a, b) + 40.0;
  if (b >= upper)
    return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, b, upper, 15, 1e-14);
}

} // namespace

TEST_CASE("i0e matches boost over the series and asymptotic ranges")
{
  for (double x : {0.0, 1e-6, 0.3, 1.0, 5.0, 30.0, 200.0, 650.0})
    {
      const double ref = boost::math::cyl_bessel_i(0, x) * std::exp(-x);
      CHECK(special::bessel_i0e(x) == doctest::Approx(ref).epsilon(1e-13));
    }
  // past the overflow point of I_0 itself: leading asymptotic term
  const double x = 5000.0;
  const double lead = 1.0 / std::sqrt(2.0 * M_PI * x) * (1.0 + 1.0 / (8.0 * x));
  CHECK(special::bessel_i0e(x) == doctest::Approx(lead).epsilon(1e-7));
  CHECK_THROWS_AS(special::bessel_i0e(-1.0), DomainError);
}

TEST_CASE("scaled Bessel sequence")
{
  for (double x : {0.5, 3.0, 40.0})
    {
      const auto seq = special::bessel_ie_sequence(x, 25);
      REQUIRE(seq.size() == 26);
      for (int k = 0; k <= 25; ++k)
        {
          const double ref = boost::math::cyl_bessel_i(k, x) * std::exp(-x);
          CHECK(seq[k] == doctest::Approx(ref).epsilon(1e-11).scale(1e-300));
        }
    }
  const auto zero = special::bessel_ie_sequence(0.0, 3);
  CHECK(zero[0] == 1.0);
  CHECK(zero[1] == 0.0);
}

TEST_CASE("Marcum Q1 against the defining integral")
{
  const double pts[][2] = {{0.5, 0.5}, {1.0, 2.0}, {2.0, 1.0}, {3.0, 3.5},
                           {5.0, 2.0}, {0.1, 4.0}, {7.5, 8.0}, {10.0, 6.0}};
  for (const auto &p : pts)
    CHECK(special::marcum_q1(p[0], p[1])
          == doctest::Approx(marcum_by_quadrature(p[0], p[1])).epsilon(1e-10));
}

TEST_CASE("Marcum Q1 edge values and symmetry")
{
  CHECK(special::marcum_q1(3.0, 0.0) == 1.0);
  CHECK(special::marcum_q1(0.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 12.0);
  for (int i = 0; i < 200; ++i)
    {
      const double a = u(rng);
      const double b = u(rng);
      // Q(a,b) + Q(b,a) = 1 + exp(-(a^2+b^2)/2) I_0(ab)
      const double rhs = 1.0 + std::exp(-0.5 * (a - b) * (a - b)) * special::bessel_i0e(a * b);
      const double lhs = special::marcum_q1(a, b) + special::marcum_q1(b, a);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      const double q = special::marcum_q1(a, b);
      CHECK(q >= 0.0);
      CHECK(q <= 1.0);
    }
  CHECK_THROWS_AS(special::marcum_q1(-1.0, 1.0), DomainError);
}
