#include "cvaudit/stats/design_matrix.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace cvaudit::stats {

std::optional<ModelKind> parse_model_kind(const std::string& s) {
    if (s == "eq1") return ModelKind::Eq1;
    if (s == "eq2") return ModelKind::Eq2;
    if (s == "eq3") return ModelKind::Eq3;
    if (s == "eq4") return ModelKind::Eq4;
    if (s == "eq5") return ModelKind::Eq5;
    return std::nullopt;
}

std::string_view to_string(ModelKind m) {
    switch (m) {
        case ModelKind::Eq1: return "eq1";
        case ModelKind::Eq2: return "eq2";
        case ModelKind::Eq3: return "eq3";
        case ModelKind::Eq4: return "eq4";
        case ModelKind::Eq5: return "eq5";
    }
    return "?";
}

std::optional<size_t> DesignMatrix::column_index(const std::string& label) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i].label == label) return i;
    return std::nullopt;
}

std::vector<size_t> DesignMatrix::factor_columns(const std::string& factor) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < columns.size(); ++i) {
        const auto& c = columns[i];
        if (c.kind == ColumnKind::Dummy && c.terms.size() == 1 && c.terms[0].first == factor)
            out.push_back(i);
    }
    return out;
}

std::vector<std::string> DesignMatrix::factor_levels(const std::string& factor) const {
    std::vector<std::string> out;
    auto ref = reference_levels.find(factor);
    if (ref != reference_levels.end()) out.push_back(ref->second);
    for (size_t i : factor_columns(factor)) out.push_back(columns[i].terms[0].second);
    return out;
}

void DesignMatrix::check_full_rank() const {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-9);
    const Eigen::Index rank = qr.rank();
    if (rank == X.cols()) return;
    // Columns whose pivot position falls beyond the rank are the
    // (near-)linear combinations of earlier pivots.
    const auto perm = qr.colsPermutation().indices();
    std::ostringstream msg;
    msg << "design matrix is rank deficient (rank " << rank << " of " << X.cols()
        << "); dependent columns:";
    for (Eigen::Index k = rank; k < X.cols(); ++k) msg << " '" << columns[perm[k]].label << "'";
    throw EstimationError(msg.str());
}

namespace {

struct Factor {
    std::string name;
    std::vector<std::string> values;  // per row
};

template <typename Enum>
Factor enum_factor(const std::string& name, const std::vector<Enum>& data) {
    Factor f{name, {}};
    f.values.reserve(data.size());
    for (Enum v : data) f.values.emplace_back(to_string(v));
    return f;
}

std::string format_temperature(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", t);
    return buf;
}

// Distinct levels, sorted; reference level moved out.
std::vector<std::string> dummy_levels(const Factor& f, const std::string& reference) {
    std::set<std::string> levels(f.values.begin(), f.values.end());
    std::vector<std::string> out;
    for (const auto& l : levels)
        if (l != reference) out.push_back(l);
    return out;
}

std::string pick_reference(const Factor& f, const ReferenceLevels& refs) {
    std::string ref;
    if (f.name == "ethnicity") {
        ref = refs.ethnicity;
    } else if (f.name == "gender") {
        ref = refs.gender;
    } else if (f.name == "minority") {
        ref = "no";
    } else if (auto it = refs.other.find(f.name); it != refs.other.end()) {
        ref = it->second;
    } else {
        return *std::min_element(f.values.begin(), f.values.end());
    }
    if (std::find(f.values.begin(), f.values.end(), ref) == f.values.end())
        throw cvaudit::ValidationError("unknown reference level '" + ref + "' for factor '" +
                                       f.name + "'");
    return ref;
}

class Builder {
public:
    explicit Builder(size_t n) : n_(n) {}

    void add_intercept() {
        cols_.push_back({"intercept", ColumnKind::Intercept, {}});
        data_.emplace_back(Eigen::VectorXd::Ones(n_));
    }

    void add_continuous(const std::string& label, const std::vector<double>& values) {
        cols_.push_back({label, ColumnKind::Continuous, {{label, ""}}});
        data_.emplace_back(Eigen::Map<const Eigen::VectorXd>(values.data(), n_));
    }

    // Adds sorted non-reference dummies; a single-level factor contributes
    // no columns.
    void add_factor(const Factor& f, const std::string& reference,
                    std::map<std::string, std::string>& ref_out) {
        ref_out[f.name] = reference;
        for (const auto& level : dummy_levels(f, reference)) {
            Eigen::VectorXd col(n_);
            for (size_t i = 0; i < n_; ++i) col[i] = f.values[i] == level ? 1.0 : 0.0;
            cols_.push_back({f.name + "=" + level, ColumnKind::Dummy, {{f.name, level}}});
            data_.push_back(std::move(col));
        }
    }

    void add_interactions(const Factor& a, const std::string& ref_a, const Factor& b,
                          const std::string& ref_b) {
        for (const auto& la : dummy_levels(a, ref_a)) {
            for (const auto& lb : dummy_levels(b, ref_b)) {
                Eigen::VectorXd col(n_);
                for (size_t i = 0; i < n_; ++i)
                    col[i] = (a.values[i] == la && b.values[i] == lb) ? 1.0 : 0.0;
                cols_.push_back({a.name + "=" + la + ":" + b.name + "=" + lb,
                                 ColumnKind::Interaction,
                                 {{a.name, la}, {b.name, lb}}});
                data_.push_back(std::move(col));
            }
        }
    }

    void finish(DesignMatrix& d) {
        d.columns = std::move(cols_);
        d.X.resize(n_, static_cast<Eigen::Index>(data_.size()));
        for (size_t j = 0; j < data_.size(); ++j) d.X.col(static_cast<Eigen::Index>(j)) = data_[j];
    }

private:
    size_t n_;
    std::vector<DesignColumn> cols_;
    std::vector<Eigen::VectorXd> data_;
};

}  // namespace

DesignMatrix build_design(const Table& table, const ModelSpec& spec, const ReferenceLevels& refs) {
    const size_t n = table.n();
    if (n == 0) throw EstimationError("empty analysis table");

    DesignMatrix d;
    d.response.resize(static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) {
        d.response[static_cast<Eigen::Index>(i)] =
            spec.response_cutoff ? (table.score[i] >= *spec.response_cutoff ? 1.0 : 0.0)
                                 : table.score[i];
    }
    d.cluster_ids = table.cluster;

    Factor identity;
    if (spec.pool_minority) {
        identity.name = "minority";
        identity.values.reserve(n);
        for (Ethnicity e : table.ethnicity)
            identity.values.emplace_back(std::string(to_string(e)) == refs.ethnicity ? "no" : "yes");
    } else {
        identity = enum_factor("ethnicity", table.ethnicity);
    }
    const Factor gender = enum_factor("gender", table.gender);

    std::vector<Factor> job_factors;
    job_factors.push_back({"occupation", table.occupation});
    job_factors.push_back(enum_factor("job_type", table.job_type));
    job_factors.push_back(enum_factor("shift", table.shift));
    job_factors.push_back(enum_factor("hours", table.hours));
    job_factors.push_back(enum_factor("experience", table.experience));
    job_factors.push_back(enum_factor("lang_dutch", table.lang_dutch));
    job_factors.push_back(enum_factor("lang_french", table.lang_french));
    job_factors.push_back(enum_factor("lang_english", table.lang_english));
    job_factors.push_back({"location", table.location});

    Builder b(n);
    b.add_intercept();
    b.add_factor(identity, pick_reference(identity, refs), d.reference_levels);

    if (spec.temperature_categorical) {
        Factor temp{"temperature", {}};
        temp.values.reserve(n);
        for (double t : table.temperature) temp.values.push_back(format_temperature(t));
        b.add_factor(temp, pick_reference(temp, refs), d.reference_levels);
    } else {
        b.add_continuous("temperature", table.temperature);
    }

    const bool extended = spec.kind != ModelKind::Eq1;
    if (extended) {
        b.add_factor(gender, pick_reference(gender, refs), d.reference_levels);
        for (const auto& f : job_factors) b.add_factor(f, pick_reference(f, refs), d.reference_levels);
    }

    if (spec.kind == ModelKind::Eq3) {
        b.add_interactions(identity, d.reference_levels.at(identity.name), gender,
                           d.reference_levels.at("gender"));
    } else if (spec.kind == ModelKind::Eq4 || spec.kind == ModelKind::Eq5) {
        const Factor& who = spec.kind == ModelKind::Eq4 ? identity : gender;
        const std::string& who_ref = d.reference_levels.at(who.name);
        for (const auto& name : spec.interact_with) {
            const Factor* jf = nullptr;
            for (const auto& f : job_factors)
                if (f.name == name) jf = &f;
            if (!jf) throw EstimationError("unknown job covariate '" + name + "' in interact_with");
            b.add_interactions(who, who_ref, *jf, d.reference_levels.at(name));
        }
    }

    b.finish(d);
    d.check_full_rank();
    return d;
}

}  // namespace cvaudit::stats
