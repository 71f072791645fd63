#include "cvaudit/stats/welch.hpp"

#include <cmath>

#include "cvaudit/common.hpp"
#include "cvaudit/stats/distributions.hpp"

namespace cvaudit::stats {

namespace {

struct Moments {
    double mean;
    double var;  // sample variance, ddof 1
    double n;
};

Moments moments(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, ss / (n - 1.0), n};
}

}  // namespace

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw EstimationError("welch_t: both samples must have size >= 2");
    const Moments ma = moments(a);
    const Moments mb = moments(b);
    const double va = ma.var / ma.n;
    const double vb = mb.var / mb.n;
    if (va + vb <= 0.0) throw EstimationError("welch_t: degenerate samples (zero variance)");

    const double t = (ma.mean - mb.mean) / std::sqrt(va + vb);
    const double df =
        (va + vb) * (va + vb) / (va * va / (ma.n - 1.0) + vb * vb / (mb.n - 1.0));
    return {t, df, t_test_p(t, df)};
}

}  // namespace cvaudit::stats
