#ifndef CVAUDIT_STATS_DESIGN_MATRIX_HPP
#define CVAUDIT_STATS_DESIGN_MATRIX_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvaudit/stats/table.hpp"

namespace cvaudit::stats {

enum class ColumnKind { Intercept, Dummy, Interaction, Continuous };

// One design column. Dummy columns carry their (factor, level); interaction
// columns carry both constituent (factor, level) pairs — the metadata the
// marginal-effects machinery needs to move a focal factor while holding
// everything else at its column mean.
struct DesignColumn {
    std::string label;
    ColumnKind kind = ColumnKind::Dummy;
    std::vector<std::pair<std::string, std::string>> terms;  // (factor, level)

    bool involves(const std::string& factor) const {
        for (const auto& [f, l] : terms)
            if (f == factor) return true;
        return false;
    }
};

struct DesignMatrix {
    Eigen::VectorXd response;
    Eigen::MatrixXd X;  // n x p
    std::vector<DesignColumn> columns;
    std::vector<int> cluster_ids;
    std::map<std::string, std::string> reference_levels;  // factor -> dropped level

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }

    std::optional<size_t> column_index(const std::string& label) const;
    // Indices of pure dummy columns of a factor, plus the dropped level.
    std::vector<size_t> factor_columns(const std::string& factor) const;
    // All levels of a factor present in the design (reference first).
    std::vector<std::string> factor_levels(const std::string& factor) const;

    // Throws EstimationError naming the dependent columns when X is rank
    // deficient.
    void check_full_rank() const;
};

// Which regression to build:
//   Eq1: intercept + ethnicity + temperature
//   Eq2: Eq1 + gender + job covariates
//   Eq3: Eq2 + ethnicity x gender
//   Eq4: Eq2 + (job covariate x ethnicity) interactions
//   Eq5: Eq2 + (job covariate x gender) interactions
enum class ModelKind { Eq1, Eq2, Eq3, Eq4, Eq5 };

std::optional<ModelKind> parse_model_kind(const std::string& s);
std::string_view to_string(ModelKind m);

struct ModelSpec {
    ModelKind kind = ModelKind::Eq1;
    bool temperature_categorical = true;  // factor over the scheme support (default) or continuous
    // Job covariates whose interactions Eq4/Eq5 add. Occupation and
    // location are excluded by default to keep small designs full rank.
    std::vector<std::string> interact_with = {"job_type", "shift",      "hours",
                                              "experience", "lang_dutch", "lang_french",
                                              "lang_english"};
    // Binarise the response as score >= cutoff (logit models).
    std::optional<int> response_cutoff;
    // Pool the eight non-reference ethnicities into one "minority" level.
    bool pool_minority = false;
};

struct ReferenceLevels {
    std::string ethnicity = "Dutch";
    std::string gender = "male";
    // Other factors default to their first-alphabetical level.
    std::map<std::string, std::string> other;
};

DesignMatrix build_design(const Table& table, const ModelSpec& spec,
                          const ReferenceLevels& refs = {});

}  // namespace cvaudit::stats

#endif
