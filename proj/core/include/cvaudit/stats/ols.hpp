#ifndef CVAUDIT_STATS_OLS_HPP
#define CVAUDIT_STATS_OLS_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvaudit/stats/design_matrix.hpp"

namespace cvaudit::stats {

struct FitResult {
    std::vector<std::string> labels;
    Eigen::VectorXd coef;
    Eigen::VectorXd se;          // empty until an SE step has run
    Eigen::VectorXd p_raw;       // two-sided
    Eigen::VectorXd p_adjusted;  // empty until adjust() has run
    std::string se_method;       // "wild-cluster-bootstrap", "penalized-information", ...
    std::string adjust_method;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    double r2 = 0.0, r2_adj = 0.0, aic = 0.0, bic = 0.0;
    Eigen::Index n = 0;
    int bootstrap_replications = 0;
    Eigen::MatrixXd bootstrap_draws;  // B x p when a bootstrap has run
    // (X'WX)^-1 for penalized logits; used for Wald intervals.
    Eigen::MatrixXd covariance;
    int iterations = 0;  // IRLS only

    std::optional<size_t> index_of(const std::string& label) const;
    double coef_of(const std::string& label) const;
};

// Least squares via Householder QR. Model statistics use the Gaussian
// likelihood convention with sigma^2 counted as a parameter.
FitResult fit_ols(const DesignMatrix& design);

}  // namespace cvaudit::stats

#endif
