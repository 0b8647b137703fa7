#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace weapo {

struct KRRModel {
    Eigen::MatrixXd support;       // n x F training features
    Eigen::VectorXd coefficients;  // solves (K + alpha I) c = t
    double gamma = 1.0;
    double alpha = 1.0;
};

struct TargetPolicy {
    double uncovered_target = 0.0;
};

/// Covered records keep their label-model score; uncovered ones get
/// policy.uncovered_target.
std::vector<double> make_targets(std::span<const double> label_scores,
                                 std::span<const std::uint8_t> coverage, const TargetPolicy& policy = {});

/// K_ij = exp(-gamma ||x_i - x_j||^2).
Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma);

/// 1 / (F * var(X)), with the variance taken over all entries of X.
double default_gamma(const Eigen::MatrixXd& features);

/// Dense Cholesky solve of (K + alpha I) c = t. Throws DataError on
/// non-finite input or when the system is not numerically positive definite.
KRRModel fit_krr(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, double gamma,
                 double alpha);

Eigen::VectorXd predict_krr(const KRRModel& model, const Eigen::MatrixXd& features);

}  // namespace weapo
