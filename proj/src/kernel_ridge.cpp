#include "weapo/kernel_ridge.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "weapo/error.hpp"

namespace weapo {

std::vector<double> make_targets(std::span<const double> label_scores,
                                 std::span<const std::uint8_t> coverage, const TargetPolicy& policy) {
    if (label_scores.size() != coverage.size()) {
        throw DataError("make_targets: scores and coverage mask must be aligned");
    }
    std::vector<double> t(label_scores.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = coverage[i] ? label_scores[i] : policy.uncovered_target;
    }
    return t;
}

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma) {
    const Eigen::VectorXd na = a.rowwise().squaredNorm();
    const Eigen::VectorXd nb = b.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * a * b.transpose();
    d2.colwise() += na;
    d2.rowwise() += nb.transpose();
    // Cancellation can leave tiny negatives; distances are non-negative.
    return (-gamma * d2.cwiseMax(0.0)).array().exp().matrix();
}

double default_gamma(const Eigen::MatrixXd& features) {
    if (features.size() == 0) throw DataError("default_gamma: empty feature matrix");
    const double mean = features.mean();
    const double var = (features.array() - mean).square().mean();
    if (!(var > 0.0)) return 1.0 / static_cast<double>(features.cols());
    return 1.0 / (static_cast<double>(features.cols()) * var);
}

KRRModel fit_krr(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, double gamma,
                 double alpha) {
    const Eigen::Index n = features.rows();
    if (n < 1) throw DataError("fit_krr: need at least one training point");
    if (targets.size() != n) {
        throw DataError("fit_krr: " + std::to_string(n) + " feature rows but " +
                        std::to_string(targets.size()) + " targets");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DataError("fit_krr: gamma must be > 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DataError("fit_krr: alpha must be >= 0");
    if (!features.allFinite()) throw DataError("fit_krr: non-finite feature values");
    if (!targets.allFinite()) throw DataError("fit_krr: non-finite targets");

    Eigen::MatrixXd system = rbf_kernel(features, features, gamma);
    system.diagonal().array() += alpha;

    const Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) {
        throw DataError("fit_krr: kernel system is singular; use alpha > 0");
    }
    KRRModel model{features, llt.solve(targets), gamma, alpha};

    const double residual = (system * model.coefficients - targets).norm();
    if (!model.coefficients.allFinite() || residual > 1e-8 * (1.0 + targets.norm())) {
        throw DataError("fit_krr: kernel system is numerically singular (residual " +
                        std::to_string(residual) + "); use a larger alpha");
    }
    return model;
}

Eigen::VectorXd predict_krr(const KRRModel& model, const Eigen::MatrixXd& features) {
    if (features.cols() != model.support.cols()) {
        throw DataError("predict_krr: feature width " + std::to_string(features.cols()) +
                        " does not match model width " + std::to_string(model.support.cols()));
    }
    return rbf_kernel(features, model.support, model.gamma) * model.coefficients;
}

}  // namespace weapo
