#include "cvaudit/store.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

using nlohmann::json;

namespace cvaudit {

void Observation::validate() const {
    if (trial_id.empty()) throw ValidationError("observation with empty trial_id");
    if (score.has_value() == missing_reason.has_value())
        throw ValidationError("observation '" + trial_id +
                              "': exactly one of score / missing_reason must be set");
    if (score && (*score < 1 || *score > 100))
        throw ValidationError("observation '" + trial_id + "': score " + std::to_string(*score) +
                              " outside [1,100]");
    if (attempt_count < 1)
        throw ValidationError("observation '" + trial_id + "': attempt_count must be >= 1");
}

namespace {

std::string obs_record(const Observation& o) {
    json j{{"kind", "obs"},
           {"trial_id", o.trial_id},
           {"vacancy_id", o.vacancy_id},
           {"ethnicity", std::string(to_string(o.ethnicity))},
           {"gender", std::string(to_string(o.gender))},
           {"first", o.first},
           {"last", o.last},
           {"temperature", o.temperature},
           {"raw_response", o.raw_response},
           {"prompt_digest", o.prompt_digest},
           {"model_id", o.model_id},
           {"timestamp", o.timestamp},
           {"attempt_count", o.attempt_count}};
    if (o.score)
        j["score"] = *o.score;
    else
        j["missing_reason"] = *o.missing_reason;
    return j.dump();
}

Observation obs_from_json(const json& j, const std::filesystem::path& file, size_t lineno) {
    Observation o;
    o.trial_id = j.at("trial_id").get<std::string>();
    o.vacancy_id = j.at("vacancy_id").get<std::string>();
    auto eth = parse_ethnicity(j.at("ethnicity").get<std::string>());
    auto gen = parse_gender(j.at("gender").get<std::string>());
    if (!eth || !gen)
        throw ValidationError(file.string() + ":" + std::to_string(lineno) +
                              ": unknown ethnicity or gender");
    o.ethnicity = *eth;
    o.gender = *gen;
    o.first = j.at("first").get<std::string>();
    o.last = j.at("last").get<std::string>();
    o.temperature = j.at("temperature").get<double>();
    if (j.contains("score")) o.score = j["score"].get<int>();
    if (j.contains("missing_reason")) o.missing_reason = j["missing_reason"].get<std::string>();
    o.raw_response = j.value("raw_response", "");
    o.prompt_digest = j.value("prompt_digest", "");
    o.model_id = j.value("model_id", "");
    o.timestamp = j.value("timestamp", "");
    o.attempt_count = j.value("attempt_count", 1);
    o.validate();
    return o;
}

json manifest_json(const RunManifest& m) {
    return json{{"kind", "run_manifest"},
                {"plan_digest", m.plan_digest},
                {"corpus_digest", m.corpus_digest},
                {"model_id", m.model_id},
                {"config_digest", m.config_digest}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    m.plan_digest = j.value("plan_digest", "");
    m.corpus_digest = j.value("corpus_digest", "");
    m.model_id = j.value("model_id", "");
    m.config_digest = j.value("config_digest", "");
    return m;
}

}  // namespace

RunLog::RunLog(RunLog&& other) noexcept
    : file_(other.file_), manifest_(std::move(other.manifest_)), seen_(std::move(other.seen_)) {
    other.file_ = nullptr;
}

RunLog& RunLog::operator=(RunLog&& other) noexcept {
    if (this != &other) {
        if (file_) std::fclose(file_);
        file_ = other.file_;
        manifest_ = std::move(other.manifest_);
        seen_ = std::move(other.seen_);
        other.file_ = nullptr;
    }
    return *this;
}

RunLog::~RunLog() {
    if (file_) std::fclose(file_);
}

bool RunLog::exists(const std::filesystem::path& file) {
    return std::filesystem::exists(file);
}

RunLog RunLog::create(const std::filesystem::path& file, const RunManifest& manifest) {
    if (exists(file)) throw IoError("run log already exists: " + file.string());
    RunLog log;
    log.manifest_ = manifest;
    log.file_ = std::fopen(file.string().c_str(), "wb");
    if (!log.file_) throw IoError("cannot create " + file.string() + ": " + std::strerror(errno));
    const std::string line = manifest_json(manifest).dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), log.file_) != line.size())
        throw IoError("short write to " + file.string());
    std::fflush(log.file_);
    ::fsync(fileno(log.file_));
    return log;
}

RunLog RunLog::open_resume(const std::filesystem::path& file, const RunManifest& manifest) {
    if (!exists(file)) throw IoError("run log does not exist: " + file.string());

    RunLog log;
    std::string pending;  // records to keep (drops a torn trailing line)
    size_t valid_bytes = 0;
    {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw IoError("cannot open " + file.string());
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        size_t pos = 0;
        size_t lineno = 0;
        bool manifest_seen = false;
        while (pos < content.size()) {
            const size_t nl = content.find('\n', pos);
            if (nl == std::string::npos) break;  // torn tail, ignore
            const std::string line = content.substr(pos, nl - pos);
            ++lineno;
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error&) {
                break;  // corrupt tail; resume before it
            }
            const std::string kind = j.value("kind", "");
            if (kind == "run_manifest") {
                const RunManifest found = manifest_from_json(j);
                if (!(found == manifest))
                    throw ValidationError("run log manifest mismatch in " + file.string() +
                                          " (plan/corpus/config digest changed)");
                manifest_seen = true;
            } else if (kind == "obs") {
                Observation o = obs_from_json(j, file, lineno);
                if (!log.seen_.insert(o.trial_id).second)
                    throw ValidationError(file.string() + ": duplicate trial_id '" + o.trial_id + "'");
            } else {
                throw ValidationError(file.string() + ": unknown record kind '" + kind + "'");
            }
            pos = nl + 1;
            valid_bytes = pos;
        }
        if (!manifest_seen) throw ValidationError(file.string() + ": missing run manifest");
    }

    log.manifest_ = manifest;
    log.file_ = std::fopen(file.string().c_str(), "rb+");
    if (!log.file_) throw IoError("cannot open " + file.string() + ": " + std::strerror(errno));
    // Truncate any torn tail, then position for appends.
    if (::ftruncate(fileno(log.file_), static_cast<off_t>(valid_bytes)) != 0)
        throw IoError("cannot truncate " + file.string());
    std::fseek(log.file_, 0, SEEK_END);
    return log;
}

void RunLog::append(const Observation& obs) {
    obs.validate();
    if (!file_) throw IoError("run log is closed");
    if (!seen_.insert(obs.trial_id).second)
        throw ValidationError("duplicate trial_id '" + obs.trial_id + "'");
    const std::string line = obs_record(obs) + "\n";
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size()) {
        seen_.erase(obs.trial_id);
        throw IoError("short write to run log");
    }
    std::fflush(file_);
    ::fsync(fileno(file_));
}

std::vector<Observation> read_observations(const std::filesystem::path& file, RunManifest* manifest) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    std::vector<Observation> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            break;  // torn tail
        }
        const std::string kind = j.value("kind", "");
        if (kind == "run_manifest") {
            if (manifest) *manifest = manifest_from_json(j);
        } else if (kind == "obs") {
            out.push_back(obs_from_json(j, file, lineno));
        }
    }
    return out;
}

ExportedTable export_table(const std::vector<Observation>& observations, const Corpus& corpus,
                           const ExportOptions& options) {
    std::map<std::string, const Vacancy*> vacancies;
    for (const auto& v : corpus.vacancies) vacancies[v.id] = &v;

    ExportedTable t;
    t.header = {"trial_id", "vacancy_id", "ethnicity",      "gender",    "first",
                "last",     "temperature", "score",          "occupation", "experience_req",
                "job_type", "shift",       "hours",          "lang_dutch", "lang_french",
                "lang_english", "location"};
    for (const auto& o : observations) {
        if (options.complete_cases && !o.score) continue;
        auto it = vacancies.find(o.vacancy_id);
        if (it == vacancies.end())
            throw ValidationError("log references unknown vacancy '" + o.vacancy_id +
                                  "' (corrupt log or wrong corpus)");
        const Vacancy& v = *it->second;
        std::ostringstream temp;
        temp << o.temperature;
        t.rows.push_back({o.trial_id, o.vacancy_id, std::string(to_string(o.ethnicity)),
                          std::string(to_string(o.gender)), o.first, o.last, temp.str(),
                          o.score ? std::to_string(*o.score) : "", v.occupation,
                          std::string(to_string(v.experience_req)), std::string(to_string(v.job_type)),
                          std::string(to_string(v.shift)), std::string(to_string(v.hours)),
                          std::string(to_string(v.lang(Language::Dutch))),
                          std::string(to_string(v.lang(Language::French))),
                          std::string(to_string(v.lang(Language::English))), v.location});
    }
    return t;
}

ExportedTable export_table(const std::filesystem::path& log_file, const Corpus& corpus,
                           const ExportOptions& options) {
    return export_table(read_observations(log_file), corpus, options);
}

void write_csv(const ExportedTable& table, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    auto emit_row = [&out](const std::vector<std::string>& row) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            const std::string& f = row[i];
            if (f.find_first_of(",\"\n") != std::string::npos) {
                out << '"';
                for (char c : f) {
                    if (c == '"') out << '"';
                    out << c;
                }
                out << '"';
            } else {
                out << f;
            }
        }
        out << "\n";
    };
    emit_row(table.header);
    for (const auto& r : table.rows) emit_row(r);
}

}  // namespace cvaudit
