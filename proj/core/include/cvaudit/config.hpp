#ifndef CVAUDIT_CONFIG_HPP
#define CVAUDIT_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "cvaudit/design.hpp"
#include "cvaudit/prompting.hpp"
#include "cvaudit/provider.hpp"
#include "cvaudit/stats/design_matrix.hpp"

namespace cvaudit {

// JSON run configuration. Every field has a default; CLI flags override
// file values. Seeds are always explicit — there is no wall-clock
// fallback anywhere.
struct RunConfig {
    std::string instruction = default_instruction();
    std::vector<std::string> refusal_lexicon = default_refusal_lexicon();
    TemperatureScheme scheme = TemperatureScheme::defaults();
    ProviderConfig provider;  // defaults to the calibrated synthetic scorer
    stats::ReferenceLevels references;
    uint64_t seed = 1;
    int bootstrap_replications = 2000;
    std::string adjust_method = "holm";
    int report_cutoff = 60;

    // Digest over the fields that affect scoring (instruction, scheme,
    // provider); stored in the run manifest so resumes with a changed
    // configuration are rejected.
    std::string scoring_digest() const;

    static RunConfig load(const std::filesystem::path& file);
    static RunConfig from_json_text(const std::string& text, const std::string& origin);
};

BiasModel bias_model_from_json_text(const std::string& text);

}  // namespace cvaudit

#endif
