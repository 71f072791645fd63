#include "cvaudit/stats/adjust.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cvaudit/common.hpp"

namespace cvaudit::stats {

std::optional<AdjustMethod> parse_adjust_method(const std::string& s) {
    if (s == "holm") return AdjustMethod::Holm;
    if (s == "bh") return AdjustMethod::BH;
    if (s == "by") return AdjustMethod::BY;
    return std::nullopt;
}

std::string_view to_string(AdjustMethod m) {
    switch (m) {
        case AdjustMethod::Holm: return "holm";
        case AdjustMethod::BH: return "bh";
        case AdjustMethod::BY: return "by";
    }
    return "?";
}

std::vector<double> adjust_pvalues(const std::vector<double>& p_raw, AdjustMethod method) {
    const size_t m = p_raw.size();
    for (double p : p_raw)
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("p-value outside [0,1]: " + std::to_string(p));
    if (m == 0) return {};

    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return p_raw[a] < p_raw[b]; });

    std::vector<double> adjusted(m);
    if (method == AdjustMethod::Holm) {
        double running_max = 0.0;
        for (size_t k = 0; k < m; ++k) {
            const double scaled = std::min(1.0, static_cast<double>(m - k) * p_raw[order[k]]);
            running_max = std::max(running_max, scaled);
            adjusted[order[k]] = running_max;
        }
    } else {
        double factor = 1.0;
        if (method == AdjustMethod::BY) {
            factor = 0.0;
            for (size_t i = 1; i <= m; ++i) factor += 1.0 / static_cast<double>(i);
        }
        double running_min = 1.0;
        for (size_t k = m; k-- > 0;) {
            const double scaled = std::min(
                1.0, factor * static_cast<double>(m) / static_cast<double>(k + 1) * p_raw[order[k]]);
            running_min = std::min(running_min, scaled);
            adjusted[order[k]] = running_min;
        }
    }
    return adjusted;
}

}  // namespace cvaudit::stats
