#include "weapo/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "weapo/error.hpp"

namespace weapo {

FeatureSpec FeatureSpec::separated(std::size_t dim, double separation, double sigma) {
    if (dim == 0) throw DataError("feature dimension must be >= 1");
    const double offset = separation * sigma / 2.0 / std::sqrt(static_cast<double>(dim));
    return FeatureSpec{std::vector<double>(dim, offset), std::vector<double>(dim, -offset), sigma};
}

void SyntheticSpec::validate() const {
    if (!(p_plus > 0.0 && p_plus < 1.0)) throw DataError("synthetic spec: p_plus must lie in (0,1)");
    if (tpr.empty()) throw DataError("synthetic spec: at least one LF is required");
    if (tpr.size() != fpr.size()) throw DataError("synthetic spec: tpr and fpr must have the same length");
    for (std::size_t j = 0; j < tpr.size(); ++j) {
        if (!(tpr[j] >= 0.0 && tpr[j] <= 1.0) || !(fpr[j] >= 0.0 && fpr[j] <= 1.0)) {
            throw DataError("synthetic spec: LF " + std::to_string(j) + " rates must lie in [0,1]");
        }
    }
    if (n == 0) throw DataError("synthetic spec: n must be >= 1");
    if (features) {
        if (features->mean_pos.empty() || features->mean_pos.size() != features->mean_neg.size()) {
            throw DataError("synthetic spec: feature means must be non-empty and of equal length");
        }
        if (!(features->sigma > 0.0) || !std::isfinite(features->sigma)) {
            throw DataError("synthetic spec: feature sigma must be > 0");
        }
    }
}

namespace {

class RecordStream {
public:
    RecordStream(std::uint64_t seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    // 53 random bits -> [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

std::string record_id(std::size_t i, std::size_t n) {
    const std::size_t width = std::max<std::size_t>(6, std::to_string(n - 1).size());
    std::string digits = std::to_string(i);
    return "r" + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

Dataset generate(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t m = spec.num_lfs();
    std::vector<Record> records;
    records.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        RecordStream rng(spec.seed, i);
        Record r;
        r.id = record_id(i, spec.n);
        const bool positive = rng.uniform() < spec.p_plus;
        r.gold = positive ? 1 : -1;
        r.votes.bits.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double rate = positive ? spec.tpr[j] : spec.fpr[j];
            r.votes.bits[j] = rng.uniform() < rate ? 1 : 0;
        }
        if (spec.features) {
            const auto& mean = positive ? spec.features->mean_pos : spec.features->mean_neg;
            std::vector<double> x(mean.size());
            for (std::size_t k = 0; k < x.size(); ++k) x[k] = mean[k] + spec.features->sigma * rng.normal();
            r.features = std::move(x);
        }
        records.push_back(std::move(r));
    }
    std::vector<std::string> names(m);
    for (std::size_t j = 0; j < m; ++j) names[j] = "lf" + std::to_string(j);
    return Dataset(std::move(records), m, std::move(names));
}

double oracle_posterior(const SyntheticSpec& spec, const VoteVector& votes) {
    if (votes.size() != spec.num_lfs()) {
        throw DataError("oracle_posterior: vote vector has " + std::to_string(votes.size()) +
                        " entries, spec has " + std::to_string(spec.num_lfs()) + " LFs");
    }
    double like_pos = spec.p_plus;
    double like_neg = 1.0 - spec.p_plus;
    for (std::size_t j = 0; j < votes.size(); ++j) {
        like_pos *= votes[j] ? spec.tpr[j] : 1.0 - spec.tpr[j];
        like_neg *= votes[j] ? spec.fpr[j] : 1.0 - spec.fpr[j];
    }
    const double total = like_pos + like_neg;
    // Zero-probability pattern: no evidence either way.
    if (total == 0.0) return spec.p_plus;
    return like_pos / total;
}

OracleTable oracle_posteriors(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t m = spec.num_lfs();
    if (m > 20) throw DataError("oracle_posteriors: full table needs M <= 20; use oracle_posterior");
    OracleTable table;
    for (std::uint32_t code = 0; code < (1u << m); ++code) {
        VoteVector v;
        v.bits.resize(m);
        for (std::size_t j = 0; j < m; ++j) v.bits[j] = (code >> (m - 1 - j)) & 1u;
        table.posteriors.emplace(v, oracle_posterior(spec, v));
    }
    return table;
}

std::vector<std::vector<double>> population_moments(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t m = spec.num_lfs();
    const double p = spec.p_plus;
    std::vector<std::vector<double>> out(m, std::vector<double>(m, 1.0));
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
            if (j == k) continue;
            const double pos = (2 * spec.tpr[j] - 1) * (2 * spec.tpr[k] - 1);
            const double neg = (2 * spec.fpr[j] - 1) * (2 * spec.fpr[k] - 1);
            out[j][k] = p * pos + (1 - p) * neg;
        }
    }
    return out;
}

std::vector<double> population_mean_accuracies(const SyntheticSpec& spec) {
    spec.validate();
    std::vector<double> a(spec.num_lfs());
    for (std::size_t j = 0; j < a.size(); ++j) {
        a[j] = spec.p_plus * (2 * spec.tpr[j] - 1) - (1 - spec.p_plus) * (2 * spec.fpr[j] - 1);
    }
    return a;
}

DSModel generating_ds_model(const SyntheticSpec& spec) {
    spec.validate();
    DSModel model;
    model.class_prior = spec.p_plus;
    model.confusion.resize(spec.num_lfs());
    for (std::size_t j = 0; j < spec.num_lfs(); ++j) {
        model.confusion[j][1] = {1.0 - spec.tpr[j], spec.tpr[j]};
        model.confusion[j][0] = {1.0 - spec.fpr[j], spec.fpr[j]};
    }
    return model;
}

}  // namespace weapo
