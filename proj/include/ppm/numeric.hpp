#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>

namespace ppm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0.
double harmonic(std::int64_t n);

/// Difference H_b - H_a for a <= b, summed directly to avoid cancellation.
double harmonic_diff(std::int64_t a, std::int64_t b);

/// P(Binomial(n, p) >= k) through the regularized incomplete beta function.
double binomial_upper_tail(std::int64_t n, std::int64_t k, double p);

struct IntegrationOptions
{
  double tolerance = 1e-12;
  unsigned max_depth = 20;
};

/// Adaptive Gauss-Kronrod quadrature on a finite interval [a, b].
double integrate(std::function<double(double)> const &f, double a, double b,
                 IntegrationOptions const &options = {});

/// Integrate over consecutive pieces [breaks[0], breaks[1]], ... so that
/// kinks of the integrand sit on panel boundaries.
double integrate_pieces(std::function<double(double)> const &f, std::span<double const> breaks,
                        IntegrationOptions const &options = {});

struct GoldenSectionResult
{
  double argmax;
  double value;
};

/// Golden-section search for the maximum of a function unimodal on [a, b].
GoldenSectionResult golden_section_max(std::function<double(double)> const &f, double a, double b,
                                       double x_tolerance = 1e-10);

/// Bisection for a root of a monotone function with f(lo), f(hi) of opposite sign
/// (or zero). Stops once the bracket is below x_tolerance or |f| below f_tolerance.
double bisect(std::function<double(double)> const &f, double lo, double hi,
              double x_tolerance = 1e-10, double f_tolerance = 1e-12, int max_iterations = 400);

}  // namespace ppm
