#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "weapo/dataset.hpp"

namespace weapo {

/// LF outputs after mapping abstain (0) to negative (-1).
struct SignedVotes {
    std::vector<std::int8_t> values;

    std::size_t size() const { return values.size(); }
    int operator[](std::size_t j) const { return values[j]; }
};

SignedVotes convert_abstain(const VoteVector& votes);
std::vector<SignedVotes> convert_abstain(const Dataset& dataset);

/// Fraction of LFs voting positive.
double mv_score(const VoteVector& votes);

// ---------------------------------------------------------------------------
// Dawid-Skene

/// confusion[c][o] = P(vote = o | y = c) with index 0 for -1, 1 for +1.
using Confusion = std::array<std::array<double, 2>, 2>;

struct DSModel {
    double class_prior = 0.5;
    std::vector<Confusion> confusion;

    std::size_t num_lfs() const { return confusion.size(); }
    /// Throws DataError unless rows are stochastic and the prior is in (0,1).
    void validate() const;
};

struct DSOptions {
    int max_iters = 100;
    double tol = 1e-6;
    double smoothing = 1.0;  // add-k counts in the M-step
};

struct DSFit {
    DSModel model;
    int iterations = 0;
    bool converged = false;
    /// Log-likelihood after each M-step.
    std::vector<double> log_likelihood;
    /// Log-likelihood plus the log of the Beta/Dirichlet density that the
    /// add-`smoothing` counts correspond to. EM ascends this quantity
    /// monotonically; it equals log_likelihood when smoothing = 0.
    std::vector<double> penalized_log_likelihood;
};

/// EM for the two-class Dawid-Skene model. Without `init`, responsibilities
/// start at 0.5 * mv_score + 0.5 * p_+; with `init`, EM starts from an
/// E-step under the given parameters. The result is canonicalized so that
/// the class with the larger responsibility-weighted mean signed vote is +1.
DSFit ds_fit(std::span<const SignedVotes> votes, const Prior& init_prior, const DSOptions& options = {},
             const std::optional<DSModel>& init = std::nullopt);

/// P(y = +1 | votes) under conditional independence.
double ds_posterior(const DSModel& model, const SignedVotes& votes);

/// Observed-data log-likelihood of `votes` under `model`.
double ds_log_likelihood(const DSModel& model, std::span<const SignedVotes> votes);

// ---------------------------------------------------------------------------
// FlyingSquid-style triplet method

struct FSModel {
    std::vector<double> mean_accuracies;  // a_j = E[lambda_j y]
    double class_prior = 0.5;

    std::size_t num_lfs() const { return mean_accuracies.size(); }
};

/// Empirical second moments E[lambda_j lambda_k] over signed votes.
std::vector<std::vector<double>> signed_moments(std::span<const SignedVotes> votes);

/// Triplet recovery from a moment matrix. For each LF j the estimate is
/// the median of sqrt(|O_jk O_jl / O_kl|) over pairs k < l (both != j)
/// with |O_kl| > eps_clip, then clipped to [0, 1 - eps_clip].
FSModel fs_from_moments(const std::vector<std::vector<double>>& moments, const Prior& prior,
                        double eps_clip = 1e-4);

/// Moments from data followed by fs_from_moments. Requires M >= 3.
FSModel fs_fit(std::span<const SignedVotes> votes, const Prior& prior, double eps_clip = 1e-4);

/// Posterior with P(lambda_j = y) = (1 + a_j) / 2, computed in log space.
double fs_posterior(const FSModel& model, const SignedVotes& votes);

}  // namespace weapo
