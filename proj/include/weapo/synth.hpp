#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "weapo/baselines.hpp"
#include "weapo/dataset.hpp"

namespace weapo {

/// Class-conditional isotropic Gaussians with a shared standard deviation.
struct FeatureSpec {
    std::vector<double> mean_pos;
    std::vector<double> mean_neg;
    double sigma = 1.0;

    std::size_t dim() const { return mean_pos.size(); }
    /// Means at +/- (separation * sigma / 2) / sqrt(dim) on every axis, so
    /// the class means are `separation` standard deviations apart.
    static FeatureSpec separated(std::size_t dim, double separation, double sigma = 1.0);
};

/// Generative model: y ~ Bernoulli(p_plus); LF j fires with probability
/// tpr[j] on positives and fpr[j] on negatives, independently given y.
struct SyntheticSpec {
    double p_plus = 0.5;
    std::vector<double> tpr;
    std::vector<double> fpr;
    std::size_t n = 0;
    std::optional<FeatureSpec> features;
    std::uint64_t seed = 0;

    std::size_t num_lfs() const { return tpr.size(); }
    /// Throws DataError on invalid probabilities or sizes.
    void validate() const;
};

/// Deterministic for a fixed spec. Record i draws from its own
/// mt19937_64 stream keyed by (seed, i), so output does not depend on
/// generation order.
Dataset generate(const SyntheticSpec& spec);

/// Exact P(y = +1 | v) under the spec.
double oracle_posterior(const SyntheticSpec& spec, const VoteVector& votes);

struct OracleTable {
    std::map<VoteVector, double> posteriors;
};

/// All 2^M vote vectors. Requires M <= 20.
OracleTable oracle_posteriors(const SyntheticSpec& spec);

/// Exact E[lambda_j lambda_k] over signed votes (1 on the diagonal).
std::vector<std::vector<double>> population_moments(const SyntheticSpec& spec);

/// a_j = E[lambda_j y] over signed votes.
std::vector<double> population_mean_accuracies(const SyntheticSpec& spec);

/// The Dawid-Skene parameters that generated the data.
DSModel generating_ds_model(const SyntheticSpec& spec);

}  // namespace weapo
