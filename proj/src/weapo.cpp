#include "weapo/weapo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Dense>

#include "weapo/error.hpp"

namespace weapo {

namespace {

constexpr int kWindow = 50;

void check_width(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        throw DataError(std::string(what) + ": dimension mismatch, model has " +
                        std::to_string(expected) + " LFs but votes have " + std::to_string(got));
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

std::vector<double> uniform(std::size_t m) {
    return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

}  // namespace

void WeapoConfig::validate() const {
    if (!(lambda_reg >= 0.0) || !std::isfinite(lambda_reg)) throw DataError("lambda_reg must be >= 0");
    if (!(prior_weight >= 0.0) || !std::isfinite(prior_weight)) throw DataError("prior_weight must be >= 0");
    if (max_iters < 1) throw DataError("max_iters must be >= 1");
    if (!(step0 > 0.0) || !std::isfinite(step0)) throw DataError("step0 must be > 0");
    if (!(tol > 0.0)) throw DataError("tol must be > 0");
}

double score(std::span<const double> theta, const VoteVector& votes) {
    check_width(theta.size(), votes.size(), "score");
    double s = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        if (votes[j]) s += theta[j];
    }
    return s;
}

double score(const WeapoModel& model, const VoteVector& votes) {
    return score(model.theta, votes);
}

std::vector<double> record_scores(std::span<const double> theta, const Dataset& dataset) {
    check_width(theta.size(), dataset.num_lfs(), "record_scores");
    std::vector<double> out(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) out[i] = score(theta, dataset[i].votes);
    return out;
}

std::vector<double> project_simplex(std::span<const double> w) {
    if (w.empty()) throw DataError("project_simplex: empty vector");
    for (double x : w) {
        if (!std::isfinite(x)) throw DataError("project_simplex: non-finite entry");
    }
    std::vector<double> u(w.begin(), w.end());
    std::sort(u.begin(), u.end(), std::greater<>());

    double cumsum = 0.0, tau = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumsum += u[j];
        const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) tau = t;
    }
    std::vector<double> out(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) out[j] = std::max(w[j] - tau, 0.0);
    return out;
}

ObjectiveTerms objective(std::span<const double> theta, const ConstraintMatrix& A,
                         const Dataset& dataset, const std::optional<Prior>& prior,
                         const WeapoConfig& config) {
    if (config.use_prior && !prior) throw DataError("objective: use_prior is set but no prior was given");
    const std::vector<double> f = record_scores(theta, dataset);

    ObjectiveTerms t;
    t.reg = config.lambda_reg * dot(theta, theta);
    for (std::size_t r = 0; r < A.num_rows(); ++r) t.hinge += std::max(A.row_dot(r, f), 0.0);
    if (config.use_prior) {
        const double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
        t.prior = std::abs(mean - prior->value());
    }
    t.total = t.reg + t.hinge + config.prior_weight * t.prior;
    return t;
}

namespace {

double max_hinge(const ConstraintMatrix& A, std::span<const double> f) {
    double m = 0.0;
    for (std::size_t r = 0; r < A.num_rows(); ++r) m = std::max(m, A.row_dot(r, f));
    return m;
}

// Objective restricted to the linear scorer: A_r f = (v_low - v_high) . theta
// and mean_N f = mean_vote . theta, so each evaluation is O(d M).
struct ReducedProblem {
    std::vector<std::vector<double>> row_dirs;
    std::vector<double> mean_vote;
    double lambda = 1.0;
    double prior_weight = 0.0;
    double p_plus = 0.0;

    double value(std::span<const double> theta) const {
        double v = lambda * dot(theta, theta);
        for (const auto& a : row_dirs) v += std::max(dot(a, theta), 0.0);
        if (prior_weight > 0.0) v += prior_weight * std::abs(dot(mean_vote, theta) - p_plus);
        return v;
    }

    std::vector<double> subgradient(std::span<const double> theta) const {
        std::vector<double> g(theta.size());
        for (std::size_t j = 0; j < theta.size(); ++j) g[j] = 2.0 * lambda * theta[j];
        for (const auto& a : row_dirs) {
            if (dot(a, theta) > 0.0) {
                for (std::size_t j = 0; j < g.size(); ++j) g[j] += a[j];
            }
        }
        if (prior_weight > 0.0) {
            const double gap = dot(mean_vote, theta) - p_plus;
            const double sign = gap > 0.0 ? 1.0 : (gap < 0.0 ? -1.0 : 0.0);
            for (std::size_t j = 0; j < g.size(); ++j) g[j] += prior_weight * sign * mean_vote[j];
        }
        return g;
    }
};

}  // namespace

WeapoModel fit(const Dataset& dataset, const std::optional<Prior>& prior, const WeapoConfig& config) {
    config.validate();
    if (config.use_prior && !prior) throw DataError("fit: use_prior requires a class prior");

    const SliceTable slices = build_slices(dataset);
    if (slices.slices.empty()) throw DataError("fit: no covered records");
    const std::vector<HasseEdge> edges = hasse_edges(slices.keys());
    const ConstraintMatrix A = constraint_matrix(slices, edges, dataset.size());

    const std::size_t m = dataset.num_lfs();
    ReducedProblem problem;
    problem.lambda = config.lambda_reg;
    problem.row_dirs.reserve(edges.size());
    for (const HasseEdge& e : edges) {
        std::vector<double> a(m);
        for (std::size_t j = 0; j < m; ++j) a[j] = double(e.low[j]) - double(e.high[j]);
        problem.row_dirs.push_back(std::move(a));
    }
    if (config.use_prior) {
        problem.prior_weight = config.prior_weight;
        problem.p_plus = prior->value();
        problem.mean_vote.assign(m, 0.0);
        for (const Record& r : dataset.records()) {
            for (std::size_t j = 0; j < m; ++j) problem.mean_vote[j] += r.votes[j];
        }
        for (double& x : problem.mean_vote) x /= static_cast<double>(dataset.size());
    }

    std::vector<double> theta = uniform(m);
    std::vector<double> best = theta;
    double best_value = problem.value(theta);
    double window_start = best_value;

    WeapoDiagnostics diag;
    diag.history.push_back(best_value);
    int it = 0;
    while (it < config.max_iters) {
        ++it;
        const std::vector<double> g = problem.subgradient(theta);
        const double step = config.step0 / std::sqrt(static_cast<double>(it));
        for (std::size_t j = 0; j < m; ++j) theta[j] -= step * g[j];
        theta = project_simplex(theta);

        const double v = problem.value(theta);
        if (v < best_value) {
            best_value = v;
            best = theta;
        }
        if (it % kWindow == 0) {
            diag.history.push_back(best_value);
            if (window_start - best_value < config.tol) {
                diag.converged = true;
                break;
            }
            window_start = best_value;
        }
    }
    if (diag.history.back() != best_value) diag.history.push_back(best_value);

    WeapoModel model{std::move(best), config, std::move(diag)};
    model.diagnostics.iterations = it;
    model.diagnostics.terms = objective(model.theta, A, dataset, prior, config);
    const std::vector<double> f = record_scores(model.theta, dataset);
    model.diagnostics.max_hinge = std::max(0.0, max_hinge(A, f));
    return model;
}

WeapoModel fit_supervised(const Dataset& dataset, const WeapoConfig& config) {
    config.validate();
    const std::size_t m = dataset.num_lfs();

    std::vector<std::size_t> covered;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Record& r = dataset[i];
        if (!r.votes.any()) continue;
        if (!r.gold) throw DataError("fit_supervised: covered record '" + r.id + "' has no gold label");
        covered.push_back(i);
    }
    if (covered.empty()) throw DataError("fit_supervised: no covered records");

    // 1/n ||V theta - t||^2 = theta' G theta - 2 b' theta + c
    const double n = static_cast<double>(covered.size());
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    double c = 0.0;
    for (std::size_t i : covered) {
        const Record& r = dataset[i];
        const double t = (*r.gold + 1) / 2.0;
        Eigen::VectorXd v(m);
        for (std::size_t j = 0; j < m; ++j) v[j] = r.votes[j];
        G.noalias() += v * v.transpose();
        b += t * v;
        c += t * t;
    }
    G /= n;
    b /= n;
    c /= n;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
    const double lipschitz = std::max(2.0 * eig.eigenvalues().maxCoeff(), 1e-12);

    auto mse = [&](const Eigen::VectorXd& th) { return th.dot(G * th) - 2.0 * b.dot(th) + c; };
    auto step_from = [&](const Eigen::VectorXd& th) {
        const Eigen::VectorXd grad = 2.0 * (G * th - b);
        const Eigen::VectorXd y = th - grad / lipschitz;
        const std::vector<double> p = project_simplex(std::span<const double>(y.data(), m));
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(p.data(), m));
    };

    Eigen::VectorXd theta = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    const int max_iters = std::max(config.max_iters, 200000);
    double mapping_norm = 0.0;
    WeapoDiagnostics diag;
    diag.history.push_back(mse(theta));
    int it = 0;
    for (; it < max_iters; ++it) {
        const Eigen::VectorXd next = step_from(theta);
        mapping_norm = lipschitz * (theta - next).norm();
        theta = next;
        if ((it + 1) % kWindow == 0) diag.history.push_back(mse(theta));
        if (mapping_norm <= 1e-10) {
            diag.converged = true;
            ++it;
            break;
        }
    }
    mapping_norm = lipschitz * (theta - step_from(theta)).norm();

    WeapoConfig cfg = config;
    cfg.use_prior = false;
    WeapoModel model{std::vector<double>(theta.data(), theta.data() + m), cfg, std::move(diag)};
    model.diagnostics.iterations = it;
    model.diagnostics.terms.total = mse(theta);
    model.diagnostics.gradient_mapping_norm = mapping_norm;
    if (model.diagnostics.history.back() != model.diagnostics.terms.total) {
        model.diagnostics.history.push_back(model.diagnostics.terms.total);
    }
    return model;
}

Prediction predict_dataset(const WeapoModel& model, const Dataset& dataset) {
    check_width(model.num_lfs(), dataset.num_lfs(), "predict_dataset");
    Prediction p;
    p.scores = record_scores(model.theta, dataset);
    p.mask = coverage_mask(dataset);
    return p;
}

}  // namespace weapo
