#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "weapo/covering.hpp"
#include "weapo/dataset.hpp"

namespace weapo {

struct WeapoConfig {
    double lambda_reg = 1.0;   // weight on ||theta||^2
    bool use_prior = true;     // include |mean f - p_+|
    double prior_weight = 1.0;
    int max_iters = 5000;
    double step0 = 0.5;        // step size at iteration t is step0 / sqrt(t)
    double tol = 1e-8;         // required best-objective improvement per 50-iteration window
    std::uint64_t seed = 0;

    /// Throws DataError on out-of-range values.
    void validate() const;
};

struct ObjectiveTerms {
    double reg = 0.0;
    double hinge = 0.0;
    double prior = 0.0;  // raw |mean f - p_+|, before prior_weight
    double total = 0.0;
};

struct WeapoDiagnostics {
    ObjectiveTerms terms;
    int iterations = 0;
    bool converged = false;
    /// Best objective at each 50-iteration checkpoint; non-increasing.
    std::vector<double> history;
    /// Largest individual hinge term max(A_r f, 0) at the returned theta.
    double max_hinge = 0.0;
    /// Norm of the projected-gradient mapping (supervised fits only).
    std::optional<double> gradient_mapping_norm;
};

/// Scorer f(x) = votes(x) . theta with theta on the probability simplex.
struct WeapoModel {
    std::vector<double> theta;
    WeapoConfig config;
    WeapoDiagnostics diagnostics;

    std::size_t num_lfs() const { return theta.size(); }
};

double score(std::span<const double> theta, const VoteVector& votes);
double score(const WeapoModel& model, const VoteVector& votes);

/// Per-record scores for every record in the dataset.
std::vector<double> record_scores(std::span<const double> theta, const Dataset& dataset);

/// Euclidean projection onto {w : w >= 0, sum w = 1} (sort-based, exact).
std::vector<double> project_simplex(std::span<const double> w);

/// lambda ||theta||^2 + sum_r max(A_r f, 0) [+ prior_weight |mean_N f - p_+|].
/// The prior term is evaluated iff config.use_prior, which then requires `prior`.
ObjectiveTerms objective(std::span<const double> theta, const ConstraintMatrix& A,
                         const Dataset& dataset, const std::optional<Prior>& prior,
                         const WeapoConfig& config);

/// Projected subgradient descent from the uniform point with best-iterate
/// tracking. Throws DataError if no record is covered or if
/// config.use_prior is set without a prior.
WeapoModel fit(const Dataset& dataset, const std::optional<Prior>& prior,
               const WeapoConfig& config = {});

/// Least-squares fit of the same scorer to (gold + 1) / 2 over covered
/// records. Every covered record must carry a gold label.
WeapoModel fit_supervised(const Dataset& dataset, const WeapoConfig& config = {});

struct Prediction {
    std::vector<double> scores;
    std::vector<std::uint8_t> mask;
};

/// Scores every record; uncovered records score 0 and have mask 0.
Prediction predict_dataset(const WeapoModel& model, const Dataset& dataset);

}  // namespace weapo
