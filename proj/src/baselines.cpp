#include "weapo/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "weapo/error.hpp"

namespace weapo {

namespace {

constexpr std::size_t kNeg = 0;
constexpr std::size_t kPos = 1;

std::size_t slot(int vote) { return vote > 0 ? kPos : kNeg; }

double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    if (m == -INFINITY) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Posterior from per-class log joints, stable for either sign of the gap.
double sigmoid_of_gap(double log_pos, double log_neg) {
    const double d = log_neg - log_pos;
    if (d > 0) {
        const double e = std::exp(-d);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(d));
}

void check_votes(std::size_t m, const SignedVotes& v, const char* who) {
    if (v.size() != m) {
        throw DataError(std::string(who) + ": dimension mismatch, model has " + std::to_string(m) +
                        " LFs but votes have " + std::to_string(v.size()));
    }
}

}  // namespace

SignedVotes convert_abstain(const VoteVector& votes) {
    SignedVotes s;
    s.values.reserve(votes.size());
    for (auto b : votes.bits) s.values.push_back(b ? std::int8_t{1} : std::int8_t{-1});
    return s;
}

std::vector<SignedVotes> convert_abstain(const Dataset& dataset) {
    std::vector<SignedVotes> out;
    out.reserve(dataset.size());
    for (const Record& r : dataset.records()) out.push_back(convert_abstain(r.votes));
    return out;
}

double mv_score(const VoteVector& votes) {
    if (votes.size() == 0) return 0.0;
    return static_cast<double>(votes.count()) / static_cast<double>(votes.size());
}

// ---------------------------------------------------------------------------

void DSModel::validate() const {
    if (!(class_prior > 0.0 && class_prior < 1.0)) throw DataError("DS class prior must lie in (0,1)");
    for (const Confusion& c : confusion) {
        for (const auto& row : c) {
            if (row[0] < 0.0 || row[1] < 0.0 || row[0] > 1.0 || row[1] > 1.0 ||
                std::abs(row[0] + row[1] - 1.0) > 1e-9) {
                throw DataError("DS confusion rows must be probability distributions");
            }
        }
    }
}

double ds_posterior(const DSModel& model, const SignedVotes& votes) {
    check_votes(model.num_lfs(), votes, "ds_posterior");
    double lp = std::log(model.class_prior);
    double ln = std::log1p(-model.class_prior);
    for (std::size_t j = 0; j < votes.size(); ++j) {
        const std::size_t o = slot(votes[j]);
        lp += std::log(model.confusion[j][kPos][o]);
        ln += std::log(model.confusion[j][kNeg][o]);
    }
    return sigmoid_of_gap(lp, ln);
}

double ds_log_likelihood(const DSModel& model, std::span<const SignedVotes> votes) {
    double ll = 0.0;
    for (const SignedVotes& v : votes) {
        check_votes(model.num_lfs(), v, "ds_log_likelihood");
        double lp = std::log(model.class_prior);
        double ln = std::log1p(-model.class_prior);
        for (std::size_t j = 0; j < v.size(); ++j) {
            const std::size_t o = slot(v[j]);
            lp += std::log(model.confusion[j][kPos][o]);
            ln += std::log(model.confusion[j][kNeg][o]);
        }
        ll += log_sum_exp(lp, ln);
    }
    return ll;
}

namespace {

double log_smoothing_prior(const DSModel& model, double smoothing) {
    if (smoothing == 0.0) return 0.0;
    double s = std::log(model.class_prior) + std::log1p(-model.class_prior);
    for (const Confusion& c : model.confusion) {
        for (const auto& row : c) s += std::log(row[0]) + std::log(row[1]);
    }
    return smoothing * s;
}

DSModel m_step(std::span<const SignedVotes> votes, const std::vector<double>& resp, std::size_t m,
               double smoothing) {
    double pos_mass = 0.0;
    std::vector<std::array<std::array<double, 2>, 2>> counts(m, {{{0, 0}, {0, 0}}});
    for (std::size_t i = 0; i < votes.size(); ++i) {
        const double r = resp[i];
        pos_mass += r;
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t o = slot(votes[i][j]);
            counts[j][kPos][o] += r;
            counts[j][kNeg][o] += 1.0 - r;
        }
    }
    const double n = static_cast<double>(votes.size());
    DSModel model;
    model.class_prior = (pos_mass + smoothing) / (n + 2.0 * smoothing);
    model.confusion.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t c : {kNeg, kPos}) {
            const double total = counts[j][c][0] + counts[j][c][1] + 2.0 * smoothing;
            model.confusion[j][c][0] = (counts[j][c][0] + smoothing) / total;
            model.confusion[j][c][1] = (counts[j][c][1] + smoothing) / total;
        }
    }
    return model;
}

}  // namespace

DSFit ds_fit(std::span<const SignedVotes> votes, const Prior& init_prior, const DSOptions& options,
             const std::optional<DSModel>& init) {
    if (votes.empty()) throw DataError("ds_fit: no records");
    const std::size_t m = votes.front().size();
    if (m == 0) throw DataError("ds_fit: no labeling functions");
    for (const SignedVotes& v : votes) check_votes(m, v, "ds_fit");
    if (!(options.smoothing >= 0.0)) throw DataError("ds_fit: smoothing must be >= 0");
    if (options.max_iters < 1) throw DataError("ds_fit: max_iters must be >= 1");

    std::vector<double> resp(votes.size());
    if (init) {
        if (init->num_lfs() != m) throw DataError("ds_fit: initial model has the wrong number of LFs");
        init->validate();
        for (std::size_t i = 0; i < votes.size(); ++i) resp[i] = ds_posterior(*init, votes[i]);
    } else {
        for (std::size_t i = 0; i < votes.size(); ++i) {
            int pos = 0;
            for (std::size_t j = 0; j < m; ++j) pos += votes[i][j] > 0;
            const double mv = static_cast<double>(pos) / static_cast<double>(m);
            resp[i] = 0.5 * mv + 0.5 * init_prior.value();
        }
    }

    DSFit fit;
    for (int it = 1; it <= options.max_iters; ++it) {
        fit.model = m_step(votes, resp, m, options.smoothing);
        for (std::size_t i = 0; i < votes.size(); ++i) resp[i] = ds_posterior(fit.model, votes[i]);

        const double ll = ds_log_likelihood(fit.model, votes);
        const double pll = ll + log_smoothing_prior(fit.model, options.smoothing);
        fit.iterations = it;
        const bool done = !fit.penalized_log_likelihood.empty() &&
                          pll - fit.penalized_log_likelihood.back() < options.tol;
        fit.log_likelihood.push_back(ll);
        fit.penalized_log_likelihood.push_back(pll);
        if (done) {
            fit.converged = true;
            break;
        }
    }

    // Label switching: +1 is the class whose members vote positive more often.
    double w_pos = 0.0, w_neg = 0.0, s_pos = 0.0, s_neg = 0.0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += votes[i][j];
        w_pos += resp[i];
        w_neg += 1.0 - resp[i];
        s_pos += resp[i] * s;
        s_neg += (1.0 - resp[i]) * s;
    }
    const double mean_pos = w_pos > 0 ? s_pos / w_pos : -INFINITY;
    const double mean_neg = w_neg > 0 ? s_neg / w_neg : -INFINITY;
    if (mean_neg > mean_pos) {
        fit.model.class_prior = 1.0 - fit.model.class_prior;
        for (Confusion& c : fit.model.confusion) std::swap(c[kNeg], c[kPos]);
    }
    return fit;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> signed_moments(std::span<const SignedVotes> votes) {
    if (votes.empty()) throw DataError("signed_moments: no records");
    const std::size_t m = votes.front().size();
    std::vector<std::vector<long long>> acc(m, std::vector<long long>(m, 0));
    for (const SignedVotes& v : votes) {
        check_votes(m, v, "signed_moments");
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = j; k < m; ++k) acc[j][k] += v[j] * v[k];
        }
    }
    const double n = static_cast<double>(votes.size());
    std::vector<std::vector<double>> out(m, std::vector<double>(m));
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = j; k < m; ++k) out[j][k] = out[k][j] = static_cast<double>(acc[j][k]) / n;
    }
    return out;
}

FSModel fs_from_moments(const std::vector<std::vector<double>>& moments, const Prior& prior,
                        double eps_clip) {
    const std::size_t m = moments.size();
    if (m < 3) throw DataError("triplet method requires M >= 3 (got M = " + std::to_string(m) + ")");
    for (const auto& row : moments) {
        if (row.size() != m) throw DataError("fs: moment matrix must be square");
    }
    if (!(eps_clip > 0.0 && eps_clip < 1.0)) throw DataError("fs: eps_clip must lie in (0,1)");

    FSModel model;
    model.class_prior = prior.value();
    model.mean_accuracies.resize(m);
    std::vector<double> estimates;
    for (std::size_t j = 0; j < m; ++j) {
        estimates.clear();
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t l = k + 1; l < m; ++l) {
                if (k == j || l == j) continue;
                const double denom = moments[k][l];
                if (std::abs(denom) <= eps_clip) continue;
                estimates.push_back(std::sqrt(std::abs(moments[j][k] * moments[j][l] / denom)));
            }
        }
        if (estimates.empty()) {
            throw DataError("triplet method: no admissible triplet for LF " + std::to_string(j));
        }
        std::sort(estimates.begin(), estimates.end());
        const std::size_t h = estimates.size() / 2;
        const double median =
            estimates.size() % 2 ? estimates[h] : 0.5 * (estimates[h - 1] + estimates[h]);
        model.mean_accuracies[j] = std::clamp(median, 0.0, 1.0 - eps_clip);
    }
    return model;
}

FSModel fs_fit(std::span<const SignedVotes> votes, const Prior& prior, double eps_clip) {
    if (!votes.empty() && votes.front().size() < 3) {
        throw DataError("triplet method requires M >= 3 (got M = " +
                        std::to_string(votes.front().size()) + ")");
    }
    return fs_from_moments(signed_moments(votes), prior, eps_clip);
}

double fs_posterior(const FSModel& model, const SignedVotes& votes) {
    check_votes(model.num_lfs(), votes, "fs_posterior");
    double lp = std::log(model.class_prior);
    double ln = std::log1p(-model.class_prior);
    for (std::size_t j = 0; j < votes.size(); ++j) {
        const double av = model.mean_accuracies[j] * votes[j];
        lp += std::log1p(av) - std::log(2.0);
        ln += std::log1p(-av) - std::log(2.0);
    }
    return sigmoid_of_gap(lp, ln);
}

}  // namespace weapo
