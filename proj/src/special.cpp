#include "dcf/special.hpp"

#include "dcf/error.hpp"

#include <cmath>
#include <numbers>

namespace dcf::special {

namespace {

constexpr double kSeriesLimit = 700.0;
constexpr double kRelStop = 1e-16;

double
i0e_series(double x)
{
  // Terms of sum [(x/2)^k / k!]^2, each carried with the e^{-x} scale.
  const double quarter_x2 = 0.25 * x * x;
  double term = std::exp(-x);
  double sum = term;
  for (int k = 1; k < 100000; ++k)
    {
      term *= quarter_x2 / (double(k) * double(k));
      sum += term;
      if (term < kRelStop * sum && double(k) > 0.5 * x)
        break;
    }
  return sum;
}

double
i0e_asymptotic(double x)
{
  // e^{-x} I_0(x) ~ 1/sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 30; ++k)
    {
      const double odd = 2.0 * k - 1.0;
      const double next = term * odd * odd / (k * 8.0 * x);
      if (std::abs(next) > std::abs(term))
        break;
      term = next;
      sum += term;
      if (term < kRelStop * sum)
        break;
    }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

} // namespace

double
bessel_i0e(double x)
{
  if (!(x >= 0.0))
    throw DomainError("bessel_i0e: argument must be non-negative");
  if (x == 0.0)
    return 1.0;
  return x > kSeriesLimit ? i0e_asymptotic(x) : i0e_series(x);
}

std::vector<double>
bessel_ie_sequence(double x, int kmax)
{
  if (!(x >= 0.0) || kmax < 0)
    throw DomainError("bessel_ie_sequence: invalid argument");
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
  out[0] = bessel_i0e(x);
  if (x == 0.0 || kmax == 0)
    return out;

  // I_{k-1} = I_{k+1} + (2k/x) I_k is stable downward. Start far enough above
  // both kmax and x that the seed error has decayed by the time k <= kmax.
  const double top = std::max(double(kmax), x);
  const int start = kmax + static_cast<int>(x + std::sqrt(40.0 * top)) + 40;
  double above = 0.0;
  double cur = 1e-300;
  std::vector<double> raw(out.size(), 0.0);
  for (int k = start; k >= 1; --k)
    {
      const double below = above + (2.0 * k / x) * cur;
      above = cur;
      cur = below;
      if (k - 1 <= kmax)
        raw[static_cast<std::size_t>(k - 1)] = cur;
      if (cur > 1e250)
        {
          above *= 1e-250;
          cur *= 1e-250;
          for (auto &v : raw)
            v *= 1e-250;
        }
    }
  const double scale = out[0] / raw[0];
  for (std::size_t k = 1; k < out.size(); ++k)
    out[k] = raw[k] * scale;
  return out;
}

double
marcum_q1(double a, double b)
{
  if (!(a >= 0.0) || !(b >= 0.0))
    throw DomainError("marcum_q1: arguments must be non-negative");
  if (b == 0.0)
    return 1.0;
  if (a == 0.0)
    return std::exp(-0.5 * b * b);

  const double x = a * b;
  // e^{-(a^2+b^2)/2} I_k(ab) = e^{-(a-b)^2/2} * [e^{-ab} I_k(ab)]
  const double outer = std::exp(-0.5 * (a - b) * (a - b));
  if (a == b)
    return 0.5 * (1.0 + bessel_i0e(x));

  const bool below = a < b;
  const double ratio = below ? a / b : b / a;

  // Enough orders for ratio^k to drop under the stopping threshold, grown
  // on demand if the Bessel ratios keep the terms alive longer.
  int kmax = static_cast<int>(std::ceil(std::log(kRelStop) / std::log(ratio))) + 8;
  kmax = std::max(kmax, 16);
  for (;;)
    {
      const auto ie = bessel_ie_sequence(x, kmax);
      double sum = below ? ie[0] : 0.0;
      double pw = 1.0;
      bool converged = false;
      for (int k = 1; k <= kmax; ++k)
        {
          pw *= ratio;
          const double term = pw * ie[static_cast<std::size_t>(k)];
          sum += term;
          if (term < kRelStop * sum)
            {
              converged = true;
              break;
            }
        }
      if (converged || kmax > 200000)
        return below ? outer * sum : 1.0 - outer * sum;
      kmax *= 2;
    }
}

} // namespace dcf::special
