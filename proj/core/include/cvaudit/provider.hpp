#ifndef CVAUDIT_PROVIDER_HPP
#define CVAUDIT_PROVIDER_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cvaudit/corpus.hpp"
#include "cvaudit/design.hpp"
#include "cvaudit/prompting.hpp"

namespace cvaudit {

// ---------------------------------------------------------------------------
// Synthetic biased scorer
// ---------------------------------------------------------------------------

// Group-level score displacement rule. A rule applies when the trial's
// ethnicity/gender match (unset = wildcard) and, if a job field/value is
// given, the vacancy matches that too (these are the job-context
// interaction shifts).
struct BiasRule {
    std::optional<Ethnicity> ethnicity;
    std::optional<Gender> gender;
    std::string job_field;  // "", or one of occupation/experience_req/job_type/shift/hours/location/lang_dutch/lang_french/lang_english
    std::string job_value;
    double shift = 0.0;  // additive effect on the expected score (points)
};

// How a group's expected-score displacement is realised.
//
//  Tilt (default): the base mixture's support is pinned; for a displaced
//  group, probability mass flows along configured demotion edges
//  (from -> to support values), scaled so the mean drops by exactly the
//  requested amount. Scores stay inside the base vocabulary, which is what
//  a screener with a lumpy score distribution actually looks like, and it
//  keeps the sweep structure intact (no leakage of spike mass past the
//  vocabulary's edges).
//
//  Shift: the displacement is added to every draw, then rounded and
//  clamped. Simple, but a point mass at 50 lands below 50 for penalised
//  groups, which no real screener output shows.
enum class BiasMode { Tilt, Shift };

struct DemotionEdge {
    int from = 0;
    int to = 0;
    double rate = 1.0;  // share of `from` mass moved per unit tilt
};

struct BiasModel {
    // Discrete base distribution over [1,100]: (value, weight) pairs,
    // weights summing to 1 within 1e-9.
    std::vector<std::pair<int, double>> base;
    BiasMode mode = BiasMode::Tilt;
    std::vector<DemotionEdge> edges;  // tilt mode only
    std::vector<BiasRule> penalties;     // identity penalties
    std::vector<BiasRule> interactions;  // job-context interaction shifts
    double noise_sd = 0.0;
    bool clamp = true;  // clamp to [1,100] after noise/shift (shift mode)

    // Calibrated to the published screening-score distribution: point
    // masses 0.2518 at 50 and 0.4226 at 70, remainder at {60, 75, 79};
    // base mean 67.2157; demotion edges tuned so that the reference vs
    // pooled-others invitation gap at cutoff 60 is 5.7pp and the pooled
    // discrimination ratio at cutoff 75 is 0.85 under the default
    // penalties below. The vocabulary tops out below 80 so every group's
    // invitation probability is identically zero past cutoff 80.
    static BiasModel calibrated();

    // Same base, all penalties zero.
    static BiasModel null_model();

    void validate() const;

    double base_mean() const;

    // Total expected displacement for a trial (penalty + matching
    // interaction shifts).
    double displacement(const Trial& trial, const Vacancy& vacancy) const;

    // Mean displacement per unit tilt over the demotion edges.
    double tilt_scale() const;
};

// Per-ethnicity penalties from published audit estimates of an LLM
// screener (reference group Dutch; both genders).
std::vector<BiasRule> reference_penalties();

// Draws one integer score in [1,100].
int synthetic_score(const Trial& trial, const Vacancy& vacancy, const BiasModel& model, Rng& rng);

// ---------------------------------------------------------------------------
// Provider abstraction
// ---------------------------------------------------------------------------

struct RetryPolicy {
    int max_attempts = 3;
    std::vector<int> backoff_ms = {250, 1000, 4000};  // attempt i waits backoff_ms[min(i, size-1)]

    int backoff_for(int attempt) const {
        if (backoff_ms.empty()) return 0;
        const size_t i = std::min<size_t>(static_cast<size_t>(attempt), backoff_ms.size() - 1);
        return backoff_ms[i];
    }
};

enum class ProviderKind { Http, Synthetic, Replay };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::Synthetic;
    std::string endpoint;                    // http, e.g. http://host:port/v1/chat/completions
    std::string model_id = "synthetic-tilt-v1";
    std::string api_key_env;                 // name of the env var holding the credential
    bool tls_verify = true;                  // disable only for self-signed endpoints
    int max_in_flight = 4;
    RetryPolicy retry;
    double rate_limit_per_s = 50.0;
    BiasModel bias = BiasModel::calibrated();  // synthetic
    std::filesystem::path replay_log;        // replay
    uint64_t run_seed = 0;                   // synthetic determinism

    void validate() const;
};

// Transport failure that may be retried (connection error, 429, 5xx).
class TransportError : public std::runtime_error {
public:
    explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unrecoverable failure (bad credentials, malformed config): aborts the run.
class FatalProviderError : public std::runtime_error {
public:
    explicit FatalProviderError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RawResponse {
    std::string text;
    double latency_ms = 0.0;
};

class Provider {
public:
    virtual ~Provider() = default;
    // One isolated request, no conversation state. attempt is 0-based and
    // feeds the synthetic provider's per-attempt randomness stream.
    virtual RawResponse score_trial(const PromptText& prompt, const Trial& trial, int attempt) = 0;
    virtual std::string model_id() const = 0;
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& config, const Corpus& corpus);

// Rough wall-clock estimate for a run, seconds.
double estimate_run_seconds(size_t n_trials, double trials_per_second);

}  // namespace cvaudit

#endif
