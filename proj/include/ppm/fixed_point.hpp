#pragma once

#include "ppm/distribution.hpp"
#include "ppm/error.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace ppm {

/// r_j(x): probability that a unit-demand buyer with independent values
/// v_j ~ F_j buys item j at prices x,
///   r_j(x) = integral over t >= x_j of f_j(t) prod_{j' != j} F_{j'}(t - x_j + x_{j'}) dt,
/// evaluated in the quantile variable u = F_j(t) by adaptive quadrature.
Eigen::VectorXd purchase_probabilities(std::span<Distribution const> marginals, Eigen::Ref<Eigen::VectorXd const> prices);

/// phi_j(x) = r_j(x) / target_j * x_j; a price vector selling item j with
/// probability target_j is a fixed point of phi.
Eigen::VectorXd purchase_fixed_point_map(std::span<Distribution const> marginals,
                                         Eigen::Ref<Eigen::VectorXd const> targets,
                                         Eigen::Ref<Eigen::VectorXd const> prices);

struct FixedPointSettings
{
  double damping           = 0.5;
  int max_iterations       = 500;
  double tolerance         = 1e-8;  // max-norm on purchase probabilities
  int map_iterations       = 40;    // damped phi iterations before switching to Newton steps
};

struct FixedPointResult
{
  Eigen::VectorXd prices;
  Eigen::VectorXd probabilities;
  Eigen::VectorXd residuals;          // probabilities - targets
  std::vector<double> residual_trace; // max-norm residual after every iteration
  int iterations = 0;
  bool converged = false;
};

class FixedPointError : public NumericError
{
public:
  FixedPointError(std::string const &what, FixedPointResult diagnostics)
    : NumericError(what)
    , diagnostics_(std::move(diagnostics))
  {}

  FixedPointResult const &diagnostics() const noexcept { return diagnostics_; }

private:
  FixedPointResult diagnostics_;
};

/// Prices x with r_j(x) = target_j for every item, 0 <= x_j <= F_j^{-1}(1 - target_j).
///
/// Starts at the upper bounds, runs damped iterations x <- (1 - g) x + g phi(x),
/// then finishes with projected Gauss-Newton steps on r(x) - target (finite
/// difference Jacobian, least-squares solve). The phi iteration alone stalls
/// when the targets sum to one, because the solution then sits on the
/// boundary where phi contracts sublinearly. Throws FixedPointError carrying
/// the residuals when the tolerance is not met within max_iterations.
FixedPointResult solve_purchase_prices(std::span<Distribution const> marginals,
                                       Eigen::Ref<Eigen::VectorXd const> targets,
                                       FixedPointSettings const &settings = {});

}  // namespace ppm
