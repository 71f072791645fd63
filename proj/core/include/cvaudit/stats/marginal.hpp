#ifndef CVAUDIT_STATS_MARGINAL_HPP
#define CVAUDIT_STATS_MARGINAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "cvaudit/stats/ols.hpp"

namespace cvaudit::stats {

struct MarginalEffect {
    std::string level;
    std::string by_level;  // empty unless `by` was given
    double estimate;
    double ci_lo, ci_hi;  // 95%
};

enum class LinkFunction { Identity, Logit };

// Prediction for each level of `focal_factor` with every other design
// column held at its observed column mean. Interaction columns involving
// the focal factor move with the level (their partner dummy is fixed at
// its mean). With `by`, one prediction per (focal level x covariate level)
// from the interaction model. The CI uses the bootstrap draw covariance
// when a bootstrap has run, else the fit's analytic covariance; logit-link
// results are computed on the linear predictor and transformed.
std::vector<MarginalEffect> marginal_effects_at_mean(
    const FitResult& fit, const DesignMatrix& design, const std::string& focal_factor,
    const std::optional<std::string>& by = std::nullopt,
    LinkFunction link = LinkFunction::Identity);

}  // namespace cvaudit::stats

#endif
