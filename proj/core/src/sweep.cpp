#include "cvaudit/stats/sweep.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace cvaudit::stats {

double discrimination_ratio(double odds_ratio, double pr_base) {
    if (odds_ratio <= 0.0) throw EstimationError("discrimination_ratio: odds ratio must be > 0");
    if (pr_base <= 0.0 || pr_base >= 1.0)
        throw EstimationError("discrimination_ratio: baseline risk must lie in (0,1)");
    return odds_ratio / ((1.0 - pr_base) + pr_base * odds_ratio);
}

std::pair<double, double> discrimination_ratio_interval(double or_lo, double or_hi,
                                                        double pr_base) {
    return {discrimination_ratio(or_lo, pr_base), discrimination_ratio(or_hi, pr_base)};
}

std::vector<const SweepCell*> SweepResult::at_cutoff(int cutoff) const {
    std::vector<const SweepCell*> out;
    for (const auto& c : cells)
        if (c.cutoff == cutoff) out.push_back(&c);
    return out;
}

const SweepCell* SweepResult::cell(int cutoff, const std::string& group) const {
    for (const auto& c : cells)
        if (c.cutoff == cutoff && c.group == group) return &c;
    return nullptr;
}

SweepResult threshold_sweep(const Table& table, const SweepOptions& options) {
    if (table.n() == 0) throw EstimationError("threshold_sweep: empty table");
    if (options.cutoff_lo < 1 || options.cutoff_hi > 100 || options.cutoff_lo > options.cutoff_hi)
        throw EstimationError("threshold_sweep: cutoff range must lie within [1,100]");

    const std::string factor = options.pool_minority ? "minority" : "ethnicity";

    // Group labels per row (reference handling mirrors build_design).
    std::vector<std::string> group_of(table.n());
    for (size_t i = 0; i < table.n(); ++i) {
        const std::string eth{to_string(table.ethnicity[i])};
        group_of[i] = options.pool_minority
                          ? (eth == options.references.ethnicity ? "no" : "yes")
                          : eth;
    }
    const std::string reference =
        options.pool_minority ? "no" : options.references.ethnicity;

    SweepResult result;
    result.reference = reference;

    ModelSpec spec;
    spec.kind = ModelKind::Eq1;
    spec.temperature_categorical = options.temperature_categorical;
    spec.pool_minority = options.pool_minority;

    for (int cutoff = options.cutoff_lo; cutoff <= options.cutoff_hi; ++cutoff) {
        // Group-level response tallies decide degeneracy.
        std::map<std::string, std::pair<long, long>> tallies;  // group -> (ones, total)
        for (size_t i = 0; i < table.n(); ++i) {
            auto& [ones, total] = tallies[group_of[i]];
            ones += table.score[i] >= cutoff ? 1 : 0;
            ++total;
        }
        long all_ones = 0, all_total = 0;
        bool any_group_degenerate = false;
        for (const auto& [g, t] : tallies) {
            all_ones += t.first;
            all_total += t.second;
            if (t.first == 0 || t.first == t.second) any_group_degenerate = true;
        }

        if (all_ones == 0 || all_ones == all_total) {
            // Constant response: no model to fit. Report the observed rate;
            // with no information about contrasts the odds and risk ratios
            // are unity.
            const double rate = all_ones == 0 ? 0.0 : 1.0;
            auto emit = [&](const std::string& group) {
                SweepCell c;
                c.cutoff = cutoff;
                c.group = group;
                c.probability = c.ci_lo = c.ci_hi = rate;
                c.degenerate = true;
                result.cells.push_back(c);
            };
            emit(reference);
            for (const auto& [g, t] : tallies)
                if (g != reference) emit(g);
            continue;
        }

        spec.response_cutoff = cutoff;
        const DesignMatrix design = build_design(table, spec, options.references);
        const FitResult fit = fit_firth_logit(design);
        const auto mems =
            marginal_effects_at_mean(fit, design, factor, std::nullopt, LinkFunction::Logit);

        double pr_base = 0.0;
        for (const auto& m : mems)
            if (m.level == reference) pr_base = m.estimate;

        for (const auto& m : mems) {
            SweepCell c;
            c.cutoff = cutoff;
            c.group = m.level;
            c.probability = m.estimate;
            c.ci_lo = m.ci_lo;
            c.ci_hi = m.ci_hi;
            c.degenerate = any_group_degenerate;
            if (m.level != reference) {
                const auto idx = fit.index_of(factor + "=" + m.level);
                if (!idx) throw EstimationError("sweep: missing coefficient for group " + m.level);
                const auto j = static_cast<Eigen::Index>(*idx);
                const double lo = fit.coef[j] - 1.959963984540054 * fit.se[j];
                const double hi = fit.coef[j] + 1.959963984540054 * fit.se[j];
                c.odds_ratio = std::exp(fit.coef[j]);
                c.dr = discrimination_ratio(c.odds_ratio, pr_base);
                std::tie(c.dr_lo, c.dr_hi) =
                    discrimination_ratio_interval(std::exp(lo), std::exp(hi), pr_base);
            }
            result.cells.push_back(c);
        }
    }
    return result;
}

void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    out << "cutoff,group,probability,ci_lo,ci_hi,or,dr,dr_lo,dr_hi,degenerate\n";
    out.precision(10);
    for (const auto& c : sweep.cells) {
        out << c.cutoff << "," << c.group << "," << c.probability << "," << c.ci_lo << ","
            << c.ci_hi << "," << c.odds_ratio << "," << c.dr << "," << c.dr_lo << "," << c.dr_hi
            << "," << (c.degenerate ? 1 : 0) << "\n";
    }
}

}  // namespace cvaudit::stats
