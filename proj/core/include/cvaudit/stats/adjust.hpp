#ifndef CVAUDIT_STATS_ADJUST_HPP
#define CVAUDIT_STATS_ADJUST_HPP

#include <optional>
#include <string>
#include <vector>

namespace cvaudit::stats {

enum class AdjustMethod { Holm, BH, BY };

std::optional<AdjustMethod> parse_adjust_method(const std::string& s);
std::string_view to_string(AdjustMethod m);

// Multiple-testing corrections, returned in the input order.
//   Holm: step-down FWER control — sort ascending, scale p(k) by (m-k+1),
//         enforce a running maximum, cap at 1.
//   BH:   step-up FDR control — scale p(k) by m/k, running minimum from
//         the largest p downwards.
//   BY:   BH with the harmonic-sum factor (1 + 1/2 + ... + 1/m).
std::vector<double> adjust_pvalues(const std::vector<double>& p_raw, AdjustMethod method);

}  // namespace cvaudit::stats

#endif
