#include "cvaudit/stats/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cvaudit::stats {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

// Lentz's continued fraction for the incomplete beta function.
double incbeta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incbeta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("incbeta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * incbeta_cf(a, b, x) / a;
    }
    return 1.0 - front * incbeta_cf(b, a, 1.0 - x) / b;
}

namespace {

// Series expansion of P(a, x) for x < a + 1.
double incgamma_series(double a, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3e-15;
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction of Q(a, x) for x >= a + 1.
double incgamma_cf(double a, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3e-15;
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double incgamma_p(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("incgamma_p: a must be positive");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return incgamma_series(a, x);
    return 1.0 - incgamma_cf(a, x);
}

double t_cdf(double x, double df) {
    if (df <= 0.0) throw std::invalid_argument("t_cdf: df must be positive");
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    const double ib = incbeta(df / 2.0, 0.5, df / (df + x * x));
    return x >= 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double t_test_p(double t, double df) {
    const double tail = 1.0 - t_cdf(std::fabs(t), df);
    return std::min(1.0, 2.0 * tail);
}

double chisq_sf(double x, double df) {
    if (df <= 0.0) throw std::invalid_argument("chisq_sf: df must be positive");
    if (x <= 0.0) return 1.0;
    return 1.0 - incgamma_p(df / 2.0, x / 2.0);
}

ChiSquareResult chi_square_gof(std::span<const long> observed, std::span<const double> expected_probs) {
    if (observed.size() != expected_probs.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_gof: need >= 2 matching cells");
    long n = 0;
    for (long o : observed) n += o;
    double stat = 0.0;
    for (size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_probs[i] * static_cast<double>(n);
        if (e <= 0.0) throw std::invalid_argument("chi_square_gof: expected cell probability must be > 0");
        const double d = static_cast<double>(observed[i]) - e;
        stat += d * d / e;
    }
    const double df = static_cast<double>(observed.size() - 1);
    return {stat, df, chisq_sf(stat, df)};
}

}  // namespace cvaudit::stats
