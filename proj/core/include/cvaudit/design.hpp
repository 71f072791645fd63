#ifndef CVAUDIT_DESIGN_HPP
#define CVAUDIT_DESIGN_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cvaudit/corpus.hpp"
#include "cvaudit/rng.hpp"

namespace cvaudit {

// Discrete distribution over sampling temperatures. Temperatures must be
// strictly increasing in [0, 1.5]; weights must sum to 1 within 1e-9.
struct TemperatureScheme {
    struct Entry {
        double temperature;
        double weight;
        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> entries;

    // 60% at 0.00, 8.75% at each of 0.25..1.00, 2.5% at 1.25 and 1.50.
    static TemperatureScheme defaults();

    void validate() const;
    std::vector<double> temperatures() const;
    std::vector<double> weights() const;

    bool operator==(const TemperatureScheme&) const = default;
};

double sample_temperature(Rng& rng, const TemperatureScheme& scheme);

struct Trial {
    std::string trial_id;
    std::string vacancy_id;
    Ethnicity ethnicity = Ethnicity::Dutch;
    Gender gender = Gender::Male;
    NameEntry name;
    double temperature = 0.0;
    std::string seed_path;  // randomness provenance for this trial's draws

    bool operator==(const Trial&) const = default;
};

struct ExperimentPlan {
    std::vector<Trial> trials;
    TemperatureScheme scheme;
    uint64_t master_seed = 0;
    std::string corpus_digest;

    std::string digest() const;

    bool operator==(const ExperimentPlan&) const = default;
};

// Builds the factorial plan: per vacancy, one trial for each of the 9x2
// identity cells; names drawn uniformly within each cell; temperatures
// drawn independently from the scheme. All draws are keyed by
// (master_seed, vacancy_id, cell), so input order and execution order
// cannot change assignments.
ExperimentPlan build_plan(const Corpus& corpus, const TemperatureScheme& scheme,
                          uint64_t master_seed);

void save_plan(const ExperimentPlan& plan, const std::filesystem::path& file);
ExperimentPlan load_plan(const std::filesystem::path& file);

}  // namespace cvaudit

#endif
