#include "cvaudit/provider.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>

#include "cvaudit/store.hpp"

namespace cvaudit {

// ---------------------------------------------------------------------------
// BiasModel
// ---------------------------------------------------------------------------

std::vector<BiasRule> reference_penalties() {
    return {
        {Ethnicity::WhiteAmerican, std::nullopt, "", "", -0.9563},
        {Ethnicity::Arab, std::nullopt, "", "", -1.4117},
        {Ethnicity::CentralAfrican, std::nullopt, "", "", -1.5468},
        {Ethnicity::Hispanic, std::nullopt, "", "", -1.6257},
        {Ethnicity::Turkish, std::nullopt, "", "", -1.7478},
        {Ethnicity::BlackAmerican, std::nullopt, "", "", -1.8436},
        {Ethnicity::Asian, std::nullopt, "", "", -2.1583},
        {Ethnicity::EasternEuropean, std::nullopt, "", "", -2.4170},
    };
}

BiasModel BiasModel::calibrated() {
    BiasModel m = null_model();
    m.penalties = reference_penalties();
    return m;
}

BiasModel BiasModel::null_model() {
    BiasModel m;
    m.base = {{50, 0.2518}, {60, 0.0315105263}, {70, 0.4226}, {75, 0.02}, {79, 0.2740894737}};
    m.mode = BiasMode::Tilt;
    m.edges = {
        {60, 50, 1.0}, {70, 50, 0.4616929014}, {75, 70, 1.0}, {79, 75, 1.0}, {79, 70, 0.5669213756}};
    return m;
}

void BiasModel::validate() const {
    if (base.empty()) throw ValidationError("bias model: empty base distribution");
    double sum = 0.0;
    for (const auto& [v, w] : base) {
        if (v < 1 || v > 100)
            throw ValidationError("bias model: base value " + std::to_string(v) + " outside [1,100]");
        if (w < 0.0) throw ValidationError("bias model: negative base weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw ValidationError("bias model: base weights sum to " + std::to_string(sum) +
                              ", expected 1 within 1e-9");
    if (mode == BiasMode::Tilt) {
        if (edges.empty()) throw ValidationError("bias model: tilt mode requires demotion edges");
        for (const auto& e : edges) {
            if (e.to >= e.from) throw ValidationError("bias model: demotion edge must move mass down");
            if (e.to < 1 || e.from > 100) throw ValidationError("bias model: edge outside [1,100]");
            if (e.rate < 0.0) throw ValidationError("bias model: negative edge rate");
            bool found = false;
            for (const auto& [v, w] : base) found = found || v == e.from;
            if (!found)
                throw ValidationError("bias model: edge source " + std::to_string(e.from) +
                                      " not in base support");
        }
        if (tilt_scale() <= 0.0) throw ValidationError("bias model: zero tilt scale");
    }
    if (noise_sd < 0.0) throw ValidationError("bias model: negative noise_sd");
}

double BiasModel::base_mean() const {
    double m = 0.0;
    for (const auto& [v, w] : base) m += v * w;
    return m;
}

double BiasModel::tilt_scale() const {
    double k = 0.0;
    for (const auto& e : edges) {
        for (const auto& [v, w] : base)
            if (v == e.from) k += e.rate * w * (e.from - e.to);
    }
    return k;
}

namespace {

std::string job_field_value(const Vacancy& v, const std::string& field) {
    if (field == "occupation") return v.occupation;
    if (field == "experience_req") return std::string(to_string(v.experience_req));
    if (field == "job_type") return std::string(to_string(v.job_type));
    if (field == "shift") return std::string(to_string(v.shift));
    if (field == "hours") return std::string(to_string(v.hours));
    if (field == "location") return v.location;
    if (field == "lang_dutch") return std::string(to_string(v.lang(Language::Dutch)));
    if (field == "lang_french") return std::string(to_string(v.lang(Language::French)));
    if (field == "lang_english") return std::string(to_string(v.lang(Language::English)));
    throw ValidationError("bias rule references unknown job field '" + field + "'");
}

bool rule_matches(const BiasRule& r, const Trial& t, const Vacancy& v) {
    if (r.ethnicity && *r.ethnicity != t.ethnicity) return false;
    if (r.gender && *r.gender != t.gender) return false;
    if (!r.job_field.empty() && job_field_value(v, r.job_field) != r.job_value) return false;
    return true;
}

}  // namespace

double BiasModel::displacement(const Trial& trial, const Vacancy& vacancy) const {
    double d = 0.0;
    for (const auto& r : penalties)
        if (rule_matches(r, trial, vacancy)) d += r.shift;
    for (const auto& r : interactions)
        if (rule_matches(r, trial, vacancy)) d += r.shift;
    return d;
}

int synthetic_score(const Trial& trial, const Vacancy& vacancy, const BiasModel& model, Rng& rng) {
    const double disp = model.displacement(trial, vacancy);
    double value;

    if (model.mode == BiasMode::Tilt) {
        if (disp > 0.0)
            throw ValidationError("tilt mode only displaces downward (trial '" + trial.trial_id +
                                  "' has +" + std::to_string(disp) + ")");
        const double lambda = -disp / model.tilt_scale();
        // Draw from the base, then demote along one of the drawn value's
        // outgoing edges: edge i fires with probability exactly
        // lambda * rate_i (single uniform over the cumulative intervals).
        std::vector<double> weights;
        weights.reserve(model.base.size());
        for (const auto& [v, w] : model.base) weights.push_back(w);
        int drawn = model.base[rng.next_discrete(weights)].first;
        double total = 0.0;
        for (const auto& e : model.edges)
            if (e.from == drawn) total += lambda * e.rate;
        if (total > 1.0)
            throw ValidationError("bias displacement too large for the demotion edges (total p=" +
                                  std::to_string(total) + ")");
        const double u = rng.next_double();
        double acc = 0.0;
        for (const auto& e : model.edges) {
            if (e.from != drawn) continue;
            acc += lambda * e.rate;
            if (u < acc) {
                drawn = e.to;
                break;
            }
        }
        value = drawn;
    } else {
        std::vector<double> weights;
        weights.reserve(model.base.size());
        for (const auto& [v, w] : model.base) weights.push_back(w);
        value = model.base[rng.next_discrete(weights)].first + disp;
    }

    if (model.noise_sd > 0.0) value += model.noise_sd * rng.next_gaussian();
    long rounded = std::lround(value);
    if (model.clamp) rounded = std::clamp(rounded, 1L, 100L);
    return static_cast<int>(rounded);
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

void ProviderConfig::validate() const {
    if (max_in_flight < 1) throw ValidationError("provider: max_in_flight must be >= 1");
    if (rate_limit_per_s <= 0.0) throw ValidationError("provider: rate limit must be > 0");
    if (retry.max_attempts < 1) throw ValidationError("provider: max_attempts must be >= 1");
    if (kind == ProviderKind::Http && endpoint.empty())
        throw ValidationError("provider: http endpoint missing");
    if (kind == ProviderKind::Replay && replay_log.empty())
        throw ValidationError("provider: replay log path missing");
    if (kind == ProviderKind::Synthetic) bias.validate();
}

namespace {

class SyntheticProvider final : public Provider {
public:
    SyntheticProvider(const ProviderConfig& config, const Corpus& corpus) : config_(config) {
        for (const auto& v : corpus.vacancies) vacancies_[v.id] = v;
    }

    RawResponse score_trial(const PromptText&, const Trial& trial, int attempt) override {
        auto it = vacancies_.find(trial.vacancy_id);
        if (it == vacancies_.end())
            throw FatalProviderError("synthetic provider: unknown vacancy '" + trial.vacancy_id + "'");
        // Keyed per (trial, attempt): independent of scheduling and of any
        // other trial's draws.
        Rng rng(derive_seed(config_.run_seed,
                            "score/" + trial.trial_id + "/" + std::to_string(attempt)));
        const int score = synthetic_score(trial, it->second, config_.bias, rng);
        return {std::to_string(score), 0.0};
    }

    std::string model_id() const override { return config_.model_id; }

private:
    ProviderConfig config_;
    std::map<std::string, Vacancy> vacancies_;
};

class ReplayProvider final : public Provider {
public:
    explicit ReplayProvider(const ProviderConfig& config) : config_(config) {
        RunManifest manifest;
        for (auto& o : read_observations(config.replay_log, &manifest)) {
            model_id_ = o.model_id.empty() ? manifest.model_id : o.model_id;
            responses_[o.trial_id] = std::move(o.raw_response);
        }
        if (model_id_.empty()) model_id_ = manifest.model_id;
        if (model_id_.empty()) model_id_ = "replay";
    }

    RawResponse score_trial(const PromptText&, const Trial& trial, int) override {
        auto it = responses_.find(trial.trial_id);
        if (it == responses_.end())
            throw FatalProviderError("replay log has no response for trial '" + trial.trial_id + "'");
        return {it->second, 0.0};
    }

    std::string model_id() const override { return model_id_; }

private:
    ProviderConfig config_;
    std::map<std::string, std::string> responses_;
    std::string model_id_;
};

}  // namespace

std::unique_ptr<Provider> make_http_provider(const ProviderConfig& config);  // http_provider.cpp

std::unique_ptr<Provider> make_provider(const ProviderConfig& config, const Corpus& corpus) {
    config.validate();
    switch (config.kind) {
        case ProviderKind::Synthetic: return std::make_unique<SyntheticProvider>(config, corpus);
        case ProviderKind::Replay: return std::make_unique<ReplayProvider>(config);
        case ProviderKind::Http: return make_http_provider(config);
    }
    throw ValidationError("unknown provider kind");
}

double estimate_run_seconds(size_t n_trials, double trials_per_second) {
    if (trials_per_second <= 0.0) throw ValidationError("trials_per_second must be > 0");
    return static_cast<double>(n_trials) / trials_per_second;
}

}  // namespace cvaudit
