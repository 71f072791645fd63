#ifndef CVAUDIT_STATS_FIRTH_HPP
#define CVAUDIT_STATS_FIRTH_HPP

#include "cvaudit/stats/ols.hpp"

namespace cvaudit::stats {

struct FirthOptions {
    double score_tol = 1e-8;   // converged when max |modified score| is below
    double step_tol = 1e-10;   // or the parameter change is below
    int max_iterations = 50;
    int max_halvings = 30;
};

// Jeffreys-penalised log-likelihood at beta (logistic model).
double firth_penalized_loglik(const DesignMatrix& design, const Eigen::VectorXd& beta);

// Logistic regression by penalised maximum likelihood (Jeffreys prior),
// solved with iteratively reweighted least squares on the modified score
// y_i - pi_i + h_i (1/2 - pi_i); step-halving keeps every accepted step an
// increase of the penalised likelihood. Estimates stay finite under
// separation. SEs come from the inverse penalised information.
FitResult fit_firth_logit(const DesignMatrix& design, const FirthOptions& options = {});

}  // namespace cvaudit::stats

#endif
