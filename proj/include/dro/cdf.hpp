#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dro/data.hpp"
#include "dro/loss.hpp"

namespace dro {

// Empirical distribution of per-group mean test losses: values sorted
// nondecreasing, ordinates (i+1)/repeats.
struct CdfArtifact {
  std::vector<double> values;
  std::vector<double> ordinates;
};

// Draws `repeats` groups of `group_size` test points uniformly with
// replacement and records each group's mean loss. With replacement off the
// only supported mode is exhaustive (group_size == test size), where every
// repeat equals the exact test mean.
CdfArtifact evaluate_cdf(const LossModel& model, std::span<const double> x,
                         const Dataset& test, std::size_t group_size,
                         std::size_t repeats, std::uint64_t seed,
                         bool with_replacement = true);

// Lower empirical quantile: values[ceil(q * repeats) - 1].
double cdf_quantile(const CdfArtifact& cdf, double q);
double cdf_mean(const CdfArtifact& cdf);

struct DominanceReport {
  // Quantile of a minus quantile of b at q = 0.1 .. 0.9.
  std::array<double, 9> decile_diff{};
  // Fraction of those deciles where a's quantile <= b's.
  double dominance_fraction = 0.0;
  // Two-sample Kolmogorov-Smirnov statistic, no verdict attached.
  double ks_statistic = 0.0;
};

DominanceReport compare_cdfs(const CdfArtifact& a, const CdfArtifact& b);

// Columns: value,cdf.
void write_cdf_csv(const CdfArtifact& cdf, const std::string& path);
CdfArtifact read_cdf_csv(const std::string& path);

}  // namespace dro
