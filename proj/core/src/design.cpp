#include "cvaudit/design.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>
#include <map>

#include <json.hpp>

#include "cvaudit/hash.hpp"

using nlohmann::json;

namespace cvaudit {

TemperatureScheme TemperatureScheme::defaults() {
    return {{{0.00, 0.60},
             {0.25, 0.0875},
             {0.50, 0.0875},
             {0.75, 0.0875},
             {1.00, 0.0875},
             {1.25, 0.025},
             {1.50, 0.025}}};
}

void TemperatureScheme::validate() const {
    if (entries.empty()) throw ValidationError("temperature scheme must have at least one entry");
    double sum = 0.0;
    double prev = -1.0;
    for (const auto& e : entries) {
        if (e.temperature < 0.0 || e.temperature > 1.5)
            throw ValidationError("temperature " + std::to_string(e.temperature) +
                                  " outside [0, 1.5]");
        if (e.temperature <= prev)
            throw ValidationError("temperatures must be strictly increasing");
        if (e.weight < 0.0 || e.weight > 1.0)
            throw ValidationError("temperature weight outside [0, 1]");
        prev = e.temperature;
        sum += e.weight;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw ValidationError("temperature weights sum to " + std::to_string(sum) +
                              ", expected 1 within 1e-9");
}

std::vector<double> TemperatureScheme::temperatures() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.temperature);
    return out;
}

std::vector<double> TemperatureScheme::weights() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.weight);
    return out;
}

double sample_temperature(Rng& rng, const TemperatureScheme& scheme) {
    const auto w = scheme.weights();
    return scheme.entries[rng.next_discrete(w)].temperature;
}

namespace {

std::string trial_record(const Trial& t) {
    json j{{"kind", "trial"},
           {"trial_id", t.trial_id},
           {"vacancy_id", t.vacancy_id},
           {"ethnicity", std::string(to_string(t.ethnicity))},
           {"gender", std::string(to_string(t.gender))},
           {"first", t.name.first},
           {"last", t.name.last},
           {"name_source", t.name.source},
           {"temperature", t.temperature},
           {"seed_path", t.seed_path}};
    return j.dump();
}

}  // namespace

std::string ExperimentPlan::digest() const {
    std::vector<std::string> records;
    records.reserve(trials.size());
    for (const auto& t : trials) records.push_back(trial_record(t));
    return digest_unordered(records);
}

ExperimentPlan build_plan(const Corpus& corpus, const TemperatureScheme& scheme,
                          uint64_t master_seed) {
    scheme.validate();
    validate_corpus(corpus);

    // CV uniqueness is a plan-level requirement: the 18 trials of a vacancy
    // must share one template so the name is the only variation.
    std::map<std::string, int> cv_count;
    for (const auto& c : corpus.cvs) cv_count[c.vacancy_id]++;
    for (const auto& v : corpus.vacancies) {
        auto it = cv_count.find(v.id);
        if (it == cv_count.end())
            throw ValidationError("vacancy '" + v.id + "' has no CV template");
        if (it->second != 1)
            throw ValidationError("vacancy '" + v.id + "' has " + std::to_string(it->second) +
                                  " CV templates, expected exactly 1");
    }

    ExperimentPlan plan;
    plan.scheme = scheme;
    plan.master_seed = master_seed;
    plan.corpus_digest = corpus.digest();
    plan.trials.reserve(corpus.vacancies.size() * kAllEthnicities.size() * kAllGenders.size());

    const auto w = scheme.weights();
    for (const auto& v : corpus.vacancies) {
        for (Ethnicity e : kAllEthnicities) {
            for (Gender g : kAllGenders) {
                Trial t;
                t.vacancy_id = v.id;
                t.ethnicity = e;
                t.gender = g;
                t.trial_id = v.id + "-" + std::string(to_string(e)) + "-" +
                             std::string(to_string(g));
                t.seed_path = "trial/" + t.trial_id;
                Rng rng(derive_seed(master_seed, t.seed_path));
                auto cell = corpus.name_cell(e, g);
                // canonical pool order: draws do not depend on file row order
                std::sort(cell.begin(), cell.end(), [](const NameEntry* a, const NameEntry* b) {
                    return std::tie(a->first, a->last, a->source) <
                           std::tie(b->first, b->last, b->source);
                });
                t.name = *cell[rng.next_below(cell.size())];
                t.temperature = scheme.entries[rng.next_discrete(w)].temperature;
                plan.trials.push_back(std::move(t));
            }
        }
    }
    return plan;
}

void save_plan(const ExperimentPlan& plan, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    json scheme = json::array();
    for (const auto& e : plan.scheme.entries) scheme.push_back({e.temperature, e.weight});
    json manifest{{"kind", "plan_manifest"},
                  {"master_seed", plan.master_seed},
                  {"corpus_digest", plan.corpus_digest},
                  {"temperature_scheme", scheme}};
    out << manifest.dump() << "\n";
    for (const auto& t : plan.trials) out << trial_record(t) << "\n";
}

ExperimentPlan load_plan(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    ExperimentPlan plan;
    std::string line;
    size_t lineno = 0;
    bool manifest_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(file.string() + ":" + std::to_string(lineno) +
                                  ": invalid JSON: " + e.what());
        }
        const std::string kind = j.value("kind", "");
        if (kind == "plan_manifest") {
            plan.master_seed = j.at("master_seed").get<uint64_t>();
            plan.corpus_digest = j.at("corpus_digest").get<std::string>();
            plan.scheme.entries.clear();
            for (const auto& e : j.at("temperature_scheme"))
                plan.scheme.entries.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
            manifest_seen = true;
        } else if (kind == "trial") {
            Trial t;
            t.trial_id = j.at("trial_id").get<std::string>();
            t.vacancy_id = j.at("vacancy_id").get<std::string>();
            auto eth = parse_ethnicity(j.at("ethnicity").get<std::string>());
            auto gen = parse_gender(j.at("gender").get<std::string>());
            if (!eth || !gen)
                throw ValidationError(file.string() + ":" + std::to_string(lineno) +
                                      ": unknown ethnicity or gender");
            t.ethnicity = *eth;
            t.gender = *gen;
            t.name.first = j.at("first").get<std::string>();
            t.name.last = j.at("last").get<std::string>();
            t.name.source = j.value("name_source", "");
            t.name.ethnicity = *eth;
            t.name.gender = *gen;
            t.temperature = j.at("temperature").get<double>();
            t.seed_path = j.value("seed_path", "");
            plan.trials.push_back(std::move(t));
        } else {
            throw ValidationError(file.string() + ":" + std::to_string(lineno) +
                                  ": unknown record kind '" + kind + "'");
        }
    }
    if (!manifest_seen) throw ValidationError(file.string() + ": missing plan manifest");
    plan.scheme.validate();
    const auto support = plan.scheme.temperatures();
    for (const auto& t : plan.trials) {
        if (std::find(support.begin(), support.end(), t.temperature) == support.end())
            throw ValidationError(file.string() + ": trial '" + t.trial_id + "' temperature " +
                                  std::to_string(t.temperature) +
                                  " is outside the scheme support");
    }
    return plan;
}

}  // namespace cvaudit
