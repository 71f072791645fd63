#include "cvaudit/stats/bootstrap.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "cvaudit/rng.hpp"
#include "cvaudit/stats/distributions.hpp"

namespace cvaudit::stats {

FitResult& wild_cluster_bootstrap(FitResult& fit, const DesignMatrix& design,
                                  const BootstrapOptions& options) {
    const int B = options.replications;
    if (B < 100) throw EstimationError("bootstrap replications must be >= 100");
    if (fit.coef.size() != design.p()) throw EstimationError("fit does not match design");

    // Dense cluster index per observation.
    std::vector<int> unique_clusters(design.cluster_ids.begin(), design.cluster_ids.end());
    std::sort(unique_clusters.begin(), unique_clusters.end());
    unique_clusters.erase(std::unique(unique_clusters.begin(), unique_clusters.end()),
                          unique_clusters.end());
    const size_t G = unique_clusters.size();
    if (G < 2) throw EstimationError("wild cluster bootstrap needs >= 2 clusters");
    std::vector<int> cluster_index(design.cluster_ids.size());
    for (size_t i = 0; i < design.cluster_ids.size(); ++i) {
        cluster_index[i] = static_cast<int>(
            std::lower_bound(unique_clusters.begin(), unique_clusters.end(), design.cluster_ids[i]) -
            unique_clusters.begin());
    }

    const Eigen::Index n = design.n();
    const Eigen::Index p = design.p();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(design.X);

    fit.bootstrap_draws.resize(B, p);
    auto run_range = [&](int b0, int b1) {
        Eigen::VectorXd ystar(n);
        std::vector<double> sign(G);
        for (int b = b0; b < b1; ++b) {
            // Per-replication stream derived up front: schedule-independent.
            Rng rng(derive_seed(options.seed, "bootstrap/rep/" + std::to_string(b)));
            for (size_t g = 0; g < G; ++g) sign[g] = rng.next_sign();
            for (Eigen::Index i = 0; i < n; ++i)
                ystar[i] = fit.fitted[i] + sign[cluster_index[i]] * fit.residuals[i];
            fit.bootstrap_draws.row(b) = qr.solve(ystar).transpose();
        }
    };

    const int threads = std::max(1, options.threads);
    if (threads == 1 || B < 2 * threads) {
        run_range(0, B);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (B + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int b0 = t * chunk;
            const int b1 = std::min(B, b0 + chunk);
            if (b0 < b1) pool.emplace_back(run_range, b0, b1);
        }
        for (auto& th : pool) th.join();
    }

    fit.se.resize(p);
    fit.p_raw.resize(p);
    const Eigen::RowVectorXd mean = fit.bootstrap_draws.colwise().mean();
    for (Eigen::Index j = 0; j < p; ++j) {
        const double var =
            (fit.bootstrap_draws.col(j).array() - mean[j]).square().sum() / (B - 1);
        fit.se[j] = std::sqrt(var);
        if (options.p_method == BootstrapPValue::NormalZ) {
            if (fit.se[j] > 0.0) {
                fit.p_raw[j] = 2.0 * norm_sf(std::fabs(fit.coef[j]) / fit.se[j]);
            } else {
                fit.p_raw[j] = fit.coef[j] == 0.0 ? 1.0 : 0.0;
            }
        } else {
            // Symmetric percentile: how often the recentred draws exceed the
            // observed coefficient in magnitude.
            int exceed = 0;
            for (int b = 0; b < B; ++b)
                if (std::fabs(fit.bootstrap_draws(b, j) - fit.coef[j]) >= std::fabs(fit.coef[j]))
                    ++exceed;
            fit.p_raw[j] = static_cast<double>(1 + exceed) / static_cast<double>(B + 1);
        }
    }
    fit.bootstrap_replications = B;
    fit.se_method = "wild-cluster-bootstrap";
    return fit;
}

}  // namespace cvaudit::stats
