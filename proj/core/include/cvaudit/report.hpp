#ifndef CVAUDIT_REPORT_HPP
#define CVAUDIT_REPORT_HPP

#include <cstdint>
#include <filesystem>

#include "cvaudit/stats/sweep.hpp"
#include "cvaudit/stats/table.hpp"

namespace cvaudit {

struct ReportOptions {
    int bootstrap_replications = 500;
    uint64_t seed = 0;
    int invitation_cutoff = 60;  // per-name invitation probability threshold
    int histogram_bin_width = 5;
};

// Emits the figure/table analogs into `out_dir`, each plot as CSV + SVG:
//   score_histogram.{csv,svg}   binned relative score frequencies, reference
//                               ethnicity vs pooled others
//   mem_ethnicity.{csv,svg}     marginal effects at the mean per ethnicity
//                               with bootstrap CIs
//   name_scores.{csv,svg}       per-name counts, mean scores and invitation
//                               probability at the configured cutoff
//   cutoff_curves.{csv,svg}     invitation probability vs cutoff per
//                               ethnicity, plus reference-vs-pooled curves
//                               (sweep_minority.csv)
//   export.csv                  the analysis-ready observation table
void write_report(const stats::Table& table, const std::filesystem::path& out_dir,
                  const ReportOptions& options = {});

}  // namespace cvaudit

#endif
