#include "ppm/numeric.hpp"

#include "ppm/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <vector>
#include <string>

namespace ppm {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr std::int64_t kDirectHarmonicLimit = 256;

}  // namespace

double harmonic(std::int64_t n)
{
  if (n < 0)
  {
    throw DomainError("harmonic: negative index " + std::to_string(n));
  }
  if (n <= kDirectHarmonicLimit)
  {
    double sum = 0.0;
    for (std::int64_t i = n; i >= 1; --i)
    {
      sum += 1.0 / static_cast<double>(i);
    }
    return sum;
  }
  // Asymptotic expansion; the truncation error is below 1e-17 for n > 256.
  auto const x   = static_cast<double>(n);
  auto const ix2 = 1.0 / (x * x);
  return std::log(x) + kEulerGamma + 0.5 / x - ix2 / 12.0 + ix2 * ix2 / 120.0 -
         ix2 * ix2 * ix2 / 252.0;
}

double harmonic_diff(std::int64_t a, std::int64_t b)
{
  if (a < 0 || b < a)
  {
    throw DomainError("harmonic_diff: need 0 <= a <= b");
  }
  if (b - a > 4096)
  {
    return harmonic(b) - harmonic(a);
  }
  double sum = 0.0;
  for (std::int64_t i = b; i > a; --i)
  {
    sum += 1.0 / static_cast<double>(i);
  }
  return sum;
}

double binomial_upper_tail(std::int64_t n, std::int64_t k, double p)
{
  if (k <= 0)
  {
    return 1.0;
  }
  if (k > n)
  {
    return 0.0;
  }
  if (p <= 0.0)
  {
    return 0.0;
  }
  if (p >= 1.0)
  {
    return 1.0;
  }
  return boost::math::ibeta(static_cast<double>(k), static_cast<double>(n - k + 1), p);
}

double integrate(std::function<double(double)> const &f, double a, double b,
                 IntegrationOptions const &options)
{
  if (!(b > a))
  {
    return 0.0;
  }
  double error = 0.0;
  double const value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, options.max_depth, options.tolerance, &error);
  if (!std::isfinite(value))
  {
    throw NumericError("integrate: non-finite result on [" + std::to_string(a) + ", " +
                       std::to_string(b) + "]");
  }
  return value;
}

double integrate_pieces(std::function<double(double)> const &f, std::span<double const> breaks,
                        IntegrationOptions const &options)
{
  // The tolerance is relative to the whole integral. Tiny panels would
  // otherwise chase a relative accuracy their rounding noise cannot give.
  std::vector<double> rough(breaks.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 1; i < breaks.size(); ++i)
  {
    if (breaks[i] > breaks[i - 1])
    {
      rough[i] = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, breaks[i - 1], breaks[i], 0);
      total += std::abs(rough[i]);
    }
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < breaks.size(); ++i)
  {
    IntegrationOptions local = options;
    if (std::abs(rough[i]) > 0.0 && total > 0.0)
    {
      local.tolerance = std::min(1e-3, options.tolerance * total / std::abs(rough[i]));
    }
    sum += integrate(f, breaks[i - 1], breaks[i], local);
  }
  return sum;
}

GoldenSectionResult golden_section_max(std::function<double(double)> const &f, double a, double b,
                                       double x_tolerance)
{
  double const inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c  = b - inv_phi * (b - a);
  double d  = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > x_tolerance)
  {
    if (fc >= fd)
    {
      b  = d;
      d  = c;
      fd = fc;
      c  = b - inv_phi * (b - a);
      fc = f(c);
    }
    else
    {
      a  = c;
      c  = d;
      fc = fd;
      d  = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double const x = 0.5 * (a + b);
  return {x, f(x)};
}

double bisect(std::function<double(double)> const &f, double lo, double hi, double x_tolerance,
              double f_tolerance, int max_iterations)
{
  double flo = f(lo);
  if (flo == 0.0)
  {
    return lo;
  }
  double const fhi = f(hi);
  if (fhi == 0.0)
  {
    return hi;
  }
  if ((flo > 0.0) == (fhi > 0.0))
  {
    throw NumericError("bisect: root not bracketed");
  }
  for (int it = 0; it < max_iterations && hi - lo > x_tolerance; ++it)
  {
    double const mid  = 0.5 * (lo + hi);
    double const fmid = f(mid);
    if (std::abs(fmid) <= f_tolerance)
    {
      return mid;
    }
    if ((fmid > 0.0) == (flo > 0.0))
    {
      lo  = mid;
      flo = fmid;
    }
    else
    {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ppm
