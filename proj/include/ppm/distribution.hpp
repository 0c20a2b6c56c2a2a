#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace ppm {

enum class DistributionKind
{
  Exponential,
  Uniform,
  Weibull
};

/// A continuous, non-negative distribution with monotone hazard rate.
///
/// The supported families are Exp(rate), Unif(a, b) with 0 <= a < b and
/// Weibull(shape >= 1, scale). Parameters outside the MHR region are rejected
/// when the object is built, so every Distribution in the program is MHR.
/// Instances are immutable values and safe to share between threads.
class Distribution
{
public:
  static Distribution exponential(double rate);
  static Distribution uniform(double lower, double upper);
  static Distribution weibull(double shape, double scale);

  /// Parses `exp(rate)`, `unif(a,b)` or `weibull(k,scale)`.
  static Distribution parse(std::string_view text);

  DistributionKind kind() const noexcept { return kind_; }
  double param1() const noexcept { return a_; }
  double param2() const noexcept { return b_; }

  double cdf(double x) const noexcept;
  double survival(double x) const noexcept;
  double pdf(double x) const noexcept;
  /// f(x) / (1 - F(x)); +inf where the survival function vanishes.
  double hazard(double x) const noexcept;

  /// F^{-1}(q) for q strictly inside (0, 1); DomainError otherwise.
  double quantile(double q) const;
  /// F^{-1}(p) on the closed interval: p = 0 gives the support infimum and
  /// p = 1 the supremum (possibly +inf).
  double quantile_closed(double p) const;
  /// F^{-1}(1 - t) evaluated without forming 1 - t, for t in [0, 1].
  double upper_quantile(double t) const;

  double support_lower() const noexcept;
  double support_upper() const noexcept;
  double mean() const noexcept;

  /// Integral of the survival function over [x, inf).
  double tail_integral(double x) const;
  /// E[X | X >= threshold].
  double conditional_mean_above(double threshold) const;

  /// Inverse-transform draw from a uniform variate u in [0, 1); 1 - u is exact
  /// for the 53-bit variates of canonical().
  double from_uniform(double u) const noexcept
  {
    switch (kind_)
    {
    case DistributionKind::Exponential: return -std::log(1.0 - u) / a_ + 0.0;
    case DistributionKind::Uniform: return a_ + (b_ - a_) * u;
    case DistributionKind::Weibull: return b_ * std::pow(-std::log(1.0 - u), 1.0 / a_) + 0.0;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  template <typename Urbg>
  double sample(Urbg &rng) const
  {
    return from_uniform(canonical(rng));
  }

  std::string to_string() const;

  bool operator==(Distribution const &) const = default;

  /// 53-bit uniform variate in [0, 1) from a 64-bit engine.
  template <typename Urbg>
  static double canonical(Urbg &rng)
  {
    return static_cast<double>(static_cast<std::uint64_t>(rng()) >> 11) * 0x1.0p-53;
  }

private:
  Distribution(DistributionKind kind, double a, double b)
    : kind_(kind)
    , a_(a)
    , b_(b)
  {}

  DistributionKind kind_;
  double a_;  // rate | lower | shape
  double b_;  // unused | upper | scale
};

/// Generic bisection inverse of the cdf; stops at 1e-10 absolute in x or
/// 1e-12 in probability, whichever comes first.
double invert_cdf_bisection(Distribution const &dist, double q);

struct HazardCheck
{
  bool monotone = true;
  std::optional<double> first_violation;
};

/// Checks that the hazard rate is non-decreasing (relative slack 1e-9) on a
/// geometric grid spanning the bulk of the support.
HazardCheck hazard_monotone_check(Distribution const &dist, int grid_size);

}  // namespace ppm
