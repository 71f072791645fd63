#ifndef CVAUDIT_STATS_BOOTSTRAP_HPP
#define CVAUDIT_STATS_BOOTSTRAP_HPP

#include <cstdint>

#include "cvaudit/stats/ols.hpp"

namespace cvaudit::stats {

enum class BootstrapPValue { NormalZ, BootstrapT };

struct BootstrapOptions {
    int replications = 2000;
    uint64_t seed = 0;
    BootstrapPValue p_method = BootstrapPValue::NormalZ;
    int threads = 1;  // replication streams are pre-derived, so results are
                      // identical for any thread count
};

// Wild cluster bootstrap (unrestricted): per replication, one Rademacher
// weight per cluster flips that cluster's residuals around the fitted
// values; the refitted coefficients' spread is the standard error.
// Fills se / p_raw / bootstrap_draws on the fit and returns it.
FitResult& wild_cluster_bootstrap(FitResult& fit, const DesignMatrix& design,
                                  const BootstrapOptions& options = {});

}  // namespace cvaudit::stats

#endif
