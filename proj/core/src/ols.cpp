#include "cvaudit/stats/ols.hpp"

#include <cmath>

namespace cvaudit::stats {

std::optional<size_t> FitResult::index_of(const std::string& label) const {
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return i;
    return std::nullopt;
}

double FitResult::coef_of(const std::string& label) const {
    auto i = index_of(label);
    if (!i) throw EstimationError("no coefficient labelled '" + label + "'");
    return coef[static_cast<Eigen::Index>(*i)];
}

FitResult fit_ols(const DesignMatrix& design) {
    design.check_full_rank();
    const Eigen::Index n = design.n();
    const Eigen::Index p = design.p();
    if (n <= p) throw EstimationError("need more observations than parameters");

    FitResult fit;
    fit.labels.reserve(design.columns.size());
    for (const auto& c : design.columns) fit.labels.push_back(c.label);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(design.X);
    fit.coef = qr.solve(design.response);
    fit.fitted = design.X * fit.coef;
    fit.residuals = design.response - fit.fitted;
    fit.n = n;

    const double rss = fit.residuals.squaredNorm();
    const double mean_y = design.response.mean();
    const double tss = (design.response.array() - mean_y).square().sum();
    fit.r2 = tss > 0.0 ? 1.0 - rss / tss : 0.0;
    const double adj_den = static_cast<double>(n - p);
    fit.r2_adj = tss > 0.0 && adj_den > 0 ? 1.0 - (rss / adj_den) / (tss / static_cast<double>(n - 1)) : 0.0;

    const double sigma2 = std::max(rss / static_cast<double>(n), 1e-300);
    const double log_lik =
        -0.5 * static_cast<double>(n) * (std::log(2.0 * M_PI) + std::log(sigma2) + 1.0);
    const double k = static_cast<double>(p) + 1.0;  // + sigma^2
    fit.aic = -2.0 * log_lik + 2.0 * k;
    fit.bic = -2.0 * log_lik + std::log(static_cast<double>(n)) * k;
    return fit;
}

}  // namespace cvaudit::stats
