#ifndef CVAUDIT_STATS_WELCH_HPP
#define CVAUDIT_STATS_WELCH_HPP

#include <span>

namespace cvaudit::stats {

struct WelchResult {
    double t;
    double df;  // Welch-Satterthwaite
    double p;   // two-sided
};

// Unequal-variance t test. Requires both samples to have size >= 2 and at
// least one positive variance.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

}  // namespace cvaudit::stats

#endif
