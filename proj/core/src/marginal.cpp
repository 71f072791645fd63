#include "cvaudit/stats/marginal.hpp"

#include <cmath>

namespace cvaudit::stats {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::MatrixXd covariance_for(const FitResult& fit, const DesignMatrix& design) {
    if (fit.bootstrap_draws.rows() > 1) {
        const Eigen::MatrixXd centered =
            fit.bootstrap_draws.rowwise() - fit.bootstrap_draws.colwise().mean();
        return centered.transpose() * centered / static_cast<double>(fit.bootstrap_draws.rows() - 1);
    }
    if (fit.covariance.size() > 0) return fit.covariance;
    // Classical OLS covariance.
    const double dof = static_cast<double>(design.n() - design.p());
    const double sigma2 = fit.residuals.squaredNorm() / dof;
    const Eigen::MatrixXd xtx = design.X.transpose() * design.X;
    return sigma2 * xtx.ldlt().solve(Eigen::MatrixXd::Identity(design.p(), design.p()));
}

}  // namespace

std::vector<MarginalEffect> marginal_effects_at_mean(const FitResult& fit,
                                                     const DesignMatrix& design,
                                                     const std::string& focal_factor,
                                                     const std::optional<std::string>& by,
                                                     LinkFunction link) {
    if (!design.reference_levels.count(focal_factor))
        throw EstimationError("focal factor '" + focal_factor + "' is not in the model");
    if (by && !design.reference_levels.count(*by))
        throw EstimationError("covariate '" + *by + "' is not in the model");
    if (fit.coef.size() != design.p()) throw EstimationError("fit does not match design");

    const Eigen::RowVectorXd means = design.X.colwise().mean();
    const Eigen::MatrixXd cov = covariance_for(fit, design);

    // Observed mean of a factor's dummy column (level share).
    auto dummy_mean = [&](const std::string& factor, const std::string& level) -> double {
        auto idx = design.column_index(factor + "=" + level);
        if (idx) return means[static_cast<Eigen::Index>(*idx)];
        return 0.0;  // reference level of the partner factor
    };

    auto predict = [&](const std::string& level, const std::string& by_level) -> MarginalEffect {
        Eigen::VectorXd x = means.transpose();
        for (Eigen::Index j = 0; j < design.p(); ++j) {
            const DesignColumn& c = design.columns[j];
            const bool has_focal = c.involves(focal_factor);
            const bool has_by = by && c.involves(*by);
            if (!has_focal && !has_by) continue;
            double value = 1.0;
            for (const auto& [factor, lvl] : c.terms) {
                if (factor == focal_factor) {
                    value *= lvl == level ? 1.0 : 0.0;
                } else if (by && factor == *by) {
                    value *= lvl == by_level ? 1.0 : 0.0;
                } else {
                    value *= dummy_mean(factor, lvl);
                }
            }
            x[j] = value;
        }
        const double eta = x.dot(fit.coef);
        const double var = x.dot(cov * x);
        const double halfwidth = 1.959963984540054 * std::sqrt(std::max(var, 0.0));
        MarginalEffect me;
        me.level = level;
        me.by_level = by_level;
        if (link == LinkFunction::Logit) {
            me.estimate = sigmoid(eta);
            me.ci_lo = sigmoid(eta - halfwidth);
            me.ci_hi = sigmoid(eta + halfwidth);
        } else {
            me.estimate = eta;
            me.ci_lo = eta - halfwidth;
            me.ci_hi = eta + halfwidth;
        }
        return me;
    };

    std::vector<MarginalEffect> out;
    for (const auto& level : design.factor_levels(focal_factor)) {
        if (by) {
            for (const auto& by_level : design.factor_levels(*by))
                out.push_back(predict(level, by_level));
        } else {
            out.push_back(predict(level, ""));
        }
    }
    return out;
}

}  // namespace cvaudit::stats
