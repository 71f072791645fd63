#ifndef CVAUDIT_RUNNER_HPP
#define CVAUDIT_RUNNER_HPP

#include <functional>
#include <string>

#include "cvaudit/corpus.hpp"
#include "cvaudit/design.hpp"
#include "cvaudit/provider.hpp"
#include "cvaudit/store.hpp"

namespace cvaudit {

struct RunOptions {
    std::string instruction = default_instruction();
    std::vector<std::string> refusal_lexicon = default_refusal_lexicon();
    // Invoked after every stored observation (progress reporting).
    std::function<void(size_t done, size_t total)> on_progress;
    // Test hook: fault injection. Called before each trial is issued;
    // returning false aborts the run as if the process died.
    std::function<bool()> keep_running;
};

struct RunStats {
    size_t attempted = 0;  // trials executed this invocation
    size_t scored = 0;     // trials with a parsed score
    size_t failed = 0;     // trials stored with a missing reason
    size_t skipped = 0;    // trials already in the log
};

// Executes every trial of the plan that is not yet in the log. Up to
// config.max_in_flight requests run concurrently; completions are written
// by a single writer in plan order, so the log content is independent of
// scheduling. Malformed-score retries share the transport retry budget.
RunStats execute_plan(const ExperimentPlan& plan, const Corpus& corpus,
                      const ProviderConfig& provider_config, RunLog& log,
                      const RunOptions& options = {});

}  // namespace cvaudit

#endif
