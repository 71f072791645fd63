#ifndef CVAUDIT_TESTS_HELPERS_HPP
#define CVAUDIT_TESTS_HELPERS_HPP

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "cvaudit/corpus.hpp"
#include "cvaudit/design.hpp"
#include "cvaudit/runner.hpp"
#include "cvaudit/stats/table.hpp"
#include "cvaudit/store.hpp"

namespace cvaudit::test {

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "cvaudit-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

struct Pipeline {
    Corpus corpus;
    ExperimentPlan plan;
    std::vector<Observation> observations;
    stats::Table table;
};

// corpus -> plan -> synthetic run -> analysis table, all in a temp dir.
inline Pipeline run_synthetic_pipeline(int n_vacancies, uint64_t seed, const BiasModel& bias,
                                       const std::filesystem::path& dir) {
    Pipeline p;
    CorpusConfig cc = CorpusConfig::defaults();
    cc.n_vacancies = n_vacancies;
    p.corpus = generate_synthetic_corpus(cc, derive_seed(seed, "corpus"));
    p.plan = build_plan(p.corpus, TemperatureScheme::defaults(), derive_seed(seed, "plan"));

    ProviderConfig pc;
    pc.kind = ProviderKind::Synthetic;
    pc.bias = bias;
    pc.run_seed = derive_seed(seed, "run");
    pc.max_in_flight = 2;

    const auto log_path = dir / ("obs-" + std::to_string(seed) + ".jsonl");
    RunManifest manifest{p.plan.digest(), p.corpus.digest(), pc.model_id, "test"};
    RunLog log = RunLog::create(log_path, manifest);
    execute_plan(p.plan, p.corpus, pc, log);
    p.observations = read_observations(log_path);
    p.table = stats::build_table(p.observations, p.corpus);
    return p;
}

// Mean score of an ethnicity in a table.
inline double group_mean(const stats::Table& t, Ethnicity e) {
    double sum = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < t.n(); ++i) {
        if (t.ethnicity[i] == e) {
            sum += t.score[i];
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

inline double group_rate_at(const stats::Table& t, Ethnicity e, int cutoff) {
    double sum = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < t.n(); ++i) {
        if (t.ethnicity[i] == e) {
            sum += t.score[i] >= cutoff ? 1.0 : 0.0;
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

}  // namespace cvaudit::test

#endif
