#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppm {

/// Outcome of one named, checkable claim.
struct ClaimResult
{
  std::string id;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions
{
  double trial_scale = 1.0;  // multiplies every Monte Carlo trial count
  std::uint64_t seed = 20240611;
};

/// Claim ids in execution order.
std::vector<std::string_view> claim_ids();

ClaimResult run_claim(std::string_view id, VerifyOptions const &options = {});

/// Runs the listed claims, or all of them when `only` is empty.
std::vector<ClaimResult> run_verification(VerifyOptions const &options = {},
                                          std::span<std::string const> only = {});

}  // namespace ppm
