#ifndef CVAUDIT_STATS_SWEEP_HPP
#define CVAUDIT_STATS_SWEEP_HPP

#include <filesystem>
#include <utility>

#include "cvaudit/stats/firth.hpp"
#include "cvaudit/stats/marginal.hpp"
#include "cvaudit/stats/table.hpp"

namespace cvaudit::stats {

// Risk ratio implied by an odds ratio at a given baseline risk:
// DR = OR / ((1 - Pr_base) + Pr_base * OR).
double discrimination_ratio(double odds_ratio, double pr_base);

// CI endpoints mapped through the same transform with Pr_base held fixed.
std::pair<double, double> discrimination_ratio_interval(double or_lo, double or_hi,
                                                        double pr_base);

struct SweepCell {
    int cutoff = 0;
    std::string group;
    double probability = 0.0;  // marginal effect at the mean
    double ci_lo = 0.0, ci_hi = 0.0;
    double odds_ratio = 1.0;   // vs reference group
    double dr = 1.0;
    double dr_lo = 1.0, dr_hi = 1.0;
    bool degenerate = false;   // some group cell is all-0 or all-1 at this cutoff
};

struct SweepResult {
    std::vector<SweepCell> cells;  // cutoff-major, reference group first
    std::string reference;

    std::vector<const SweepCell*> at_cutoff(int cutoff) const;
    const SweepCell* cell(int cutoff, const std::string& group) const;
};

struct SweepOptions {
    int cutoff_lo = 1;
    int cutoff_hi = 100;
    bool pool_minority = false;  // one curve for the pooled non-reference group
    bool temperature_categorical = true;
    ReferenceLevels references;
};

// For every integer cutoff: binarise score >= cutoff, fit a Firth logit of
// the outcome on identity + temperature, and report per-group invitation
// probabilities (MEM), odds ratios and discrimination ratios with Wald
// 95% intervals. A cutoff with a constant response short-circuits to the
// observed rate with OR = DR = 1; a cutoff where some group cell is all-0
// or all-1 is still fitted (the penalty keeps it finite) and flagged.
SweepResult threshold_sweep(const Table& table, const SweepOptions& options = {});

void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& file);

}  // namespace cvaudit::stats

#endif
