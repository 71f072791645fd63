#ifndef CVAUDIT_STORE_HPP
#define CVAUDIT_STORE_HPP

#include <cstdio>
#include <optional>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "cvaudit/corpus.hpp"
#include "cvaudit/design.hpp"

namespace cvaudit {

struct Observation {
    std::string trial_id;
    std::string vacancy_id;
    Ethnicity ethnicity = Ethnicity::Dutch;
    Gender gender = Gender::Male;
    std::string first;
    std::string last;
    double temperature = 0.0;
    std::optional<int> score;             // in [1,100]
    std::optional<std::string> missing_reason;  // set iff !score
    std::string raw_response;
    std::string prompt_digest;  // audit trail: hash of the rendered prompt
    std::string model_id;
    std::string timestamp;
    int attempt_count = 1;

    void validate() const;
};

struct RunManifest {
    std::string plan_digest;
    std::string corpus_digest;
    std::string model_id;
    std::string config_digest;

    bool operator==(const RunManifest&) const = default;
};

// Append-only JSONL log with a manifest header. Appends are flushed and
// fsync'ed before they are acknowledged; a torn trailing line from a crash
// is detected and ignored on reopen.
class RunLog {
public:
    // Creates the log (fails if it exists) or resumes an existing one,
    // verifying that the manifest matches.
    static RunLog create(const std::filesystem::path& file, const RunManifest& manifest);
    static RunLog open_resume(const std::filesystem::path& file, const RunManifest& manifest);
    static bool exists(const std::filesystem::path& file);

    RunLog(RunLog&&) noexcept;
    RunLog& operator=(RunLog&&) noexcept;
    RunLog(const RunLog&) = delete;
    RunLog& operator=(const RunLog&) = delete;
    ~RunLog();

    // Durable before return; duplicate trial_id rejected.
    void append(const Observation& obs);

    bool contains(const std::string& trial_id) const { return seen_.count(trial_id) > 0; }
    size_t size() const { return seen_.size(); }
    const RunManifest& manifest() const { return manifest_; }

private:
    RunLog() = default;
    std::FILE* file_ = nullptr;
    RunManifest manifest_;
    std::set<std::string> seen_;
};

// Reads all observations back from a log (manifest returned separately).
std::vector<Observation> read_observations(const std::filesystem::path& file,
                                           RunManifest* manifest = nullptr);

struct ExportOptions {
    bool complete_cases = false;  // drop observations without a score
};

// One row per observation with vacancy covariates joined from the corpus.
struct ExportedTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

ExportedTable export_table(const std::vector<Observation>& observations, const Corpus& corpus,
                           const ExportOptions& options = {});
ExportedTable export_table(const std::filesystem::path& log_file, const Corpus& corpus,
                           const ExportOptions& options = {});

void write_csv(const ExportedTable& table, const std::filesystem::path& file);

}  // namespace cvaudit

#endif
