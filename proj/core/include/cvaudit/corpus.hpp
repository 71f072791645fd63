#ifndef CVAUDIT_CORPUS_HPP
#define CVAUDIT_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cvaudit/common.hpp"

namespace cvaudit {

// Token replaced by "first last" when a CV is rendered for a trial.
inline constexpr std::string_view kNamePlaceholder = "{{name}}";

struct Vacancy {
    std::string id;
    std::string occupation;
    Experience experience_req = Experience::None;
    JobType job_type = JobType::Permanent;
    ShiftSystem shift = ShiftSystem::Day;
    Hours hours = Hours::FullTime;
    std::map<Language, Proficiency> lang_req;  // absent language == NotAtAll
    std::string location;
    std::string body;

    Proficiency lang(Language l) const {
        auto it = lang_req.find(l);
        return it == lang_req.end() ? Proficiency::NotAtAll : it->second;
    }

    bool operator==(const Vacancy&) const = default;
};

struct CvTemplate {
    std::string vacancy_id;
    std::string body;  // contains kNamePlaceholder exactly once
    std::string degree_spec;
    int grad_year = 0;
    std::string experience_summary;

    bool operator==(const CvTemplate&) const = default;
};

struct NameEntry {
    std::string first;
    std::string last;
    Ethnicity ethnicity = Ethnicity::Dutch;
    Gender gender = Gender::Male;
    std::string source;

    std::string full() const { return first + " " + last; }

    bool operator==(const NameEntry&) const = default;
};

struct Corpus {
    std::vector<Vacancy> vacancies;
    std::vector<CvTemplate> cvs;
    std::vector<NameEntry> names;

    // Order-independent content fingerprint; embedded in plans so a run
    // against a different corpus is rejected.
    std::string digest() const;

    const Vacancy* find_vacancy(const std::string& id) const;
    const CvTemplate* find_cv(const std::string& vacancy_id) const;
    std::vector<const NameEntry*> name_cell(Ethnicity e, Gender g) const;

    bool operator==(const Corpus&) const = default;
};

// Per-covariate categorical marginals for the synthetic generator.
// Weights must sum to 1 within 1e-9.
struct Marginal {
    std::vector<std::string> levels;
    std::vector<double> weights;
};

struct CorpusConfig {
    int n_vacancies = 1920;
    int names_per_cell = 4;

    // Occupation x experience design: balanced round-robin over the grid
    // minus the excluded cells (mirrors a balanced audit design with
    // sparse cells removed).
    std::vector<std::string> occupations;                                    // default: 23 labels
    std::vector<std::pair<std::string, Experience>> excluded_cells;          // default: 5 cells at 5y

    Marginal job_type;   // over {"permanent","temporary","other"}
    Marginal shift;      // over the 6 shift labels
    Marginal hours;      // over {"full_time","part_time"}
    Marginal location;   // free labels

    // Probability a language is mentioned at all; proficiency is drawn
    // uniformly over {limited..very_good} when mentioned.
    double p_dutch = 0.9417;
    double p_french = 0.4078;
    double p_english = 0.3958;

    static CorpusConfig defaults();
};

// Loads and validates the three corpus files. Errors name the offending
// file, line and field. Validation checks: field domains, unique vacancy
// ids, non-empty bodies, CV placeholder occurring exactly once, dangling
// vacancy references, and a non-empty name pool for every ethnicity x
// gender cell.
Corpus load_corpus(const std::filesystem::path& vacancy_file,
                   const std::filesystem::path& cv_file,
                   const std::filesystem::path& name_file);

// Validates an in-memory corpus (same checks as load_corpus).
void validate_corpus(const Corpus& corpus);

// Deterministic synthetic corpus: same (config, seed) -> identical corpus.
Corpus generate_synthetic_corpus(const CorpusConfig& config, uint64_t seed);

void save_corpus(const Corpus& corpus, const std::filesystem::path& vacancy_file,
                 const std::filesystem::path& cv_file, const std::filesystem::path& name_file);

// Convenience: write/read the standard trio inside a directory
// (vacancies.jsonl, cvs.jsonl, names.csv).
void save_corpus_dir(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus_dir(const std::filesystem::path& dir);

}  // namespace cvaudit

#endif
