#include "cvaudit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cvaudit/hash.hpp"
#include "cvaudit/rng.hpp"

using nlohmann::json;

namespace cvaudit {

namespace {

size_t count_occurrences(std::string_view body, std::string_view token) {
    size_t n = 0, pos = 0;
    while ((pos = body.find(token, pos)) != std::string_view::npos) {
        ++n;
        pos += token.size();
    }
    return n;
}

[[noreturn]] void fail(const std::filesystem::path& file, size_t line, const std::string& what) {
    throw ValidationError(file.string() + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T require_enum(std::optional<T> v, const std::filesystem::path& file, size_t line,
               const std::string& field, const std::string& raw) {
    if (!v) fail(file, line, "field '" + field + "' has unknown value '" + raw + "'");
    return *v;
}

std::string get_string(const json& j, const std::filesystem::path& file, size_t line,
                       const char* field) {
    if (!j.contains(field) || !j[field].is_string())
        fail(file, line, std::string("missing or non-string field '") + field + "'");
    return j[field].get<std::string>();
}

std::string vacancy_record(const Vacancy& v) {
    json langs = json::object();
    for (const auto& [l, p] : v.lang_req) langs[std::string(to_string(l))] = std::string(to_string(p));
    json j{{"id", v.id},
           {"occupation", v.occupation},
           {"experience_req", std::string(to_string(v.experience_req))},
           {"job_type", std::string(to_string(v.job_type))},
           {"shift", std::string(to_string(v.shift))},
           {"hours", std::string(to_string(v.hours))},
           {"lang_req", langs},
           {"location", v.location},
           {"body", v.body}};
    return j.dump();
}

std::string cv_record(const CvTemplate& c) {
    json j{{"vacancy_id", c.vacancy_id},
           {"body", c.body},
           {"degree_spec", c.degree_spec},
           {"grad_year", c.grad_year},
           {"experience_summary", c.experience_summary}};
    return j.dump();
}

std::string name_record(const NameEntry& n) {
    std::ostringstream os;
    os << n.first << "," << n.last << "," << to_string(n.ethnicity) << "," << to_string(n.gender)
       << "," << n.source;
    return os.str();
}

}  // namespace

std::string Corpus::digest() const {
    std::vector<std::string> records;
    records.reserve(vacancies.size() + cvs.size() + names.size());
    for (const auto& v : vacancies) records.push_back(vacancy_record(v));
    for (const auto& c : cvs) records.push_back(cv_record(c));
    for (const auto& n : names) records.push_back(name_record(n));
    return digest_unordered(records);
}

const Vacancy* Corpus::find_vacancy(const std::string& id) const {
    for (const auto& v : vacancies)
        if (v.id == id) return &v;
    return nullptr;
}

const CvTemplate* Corpus::find_cv(const std::string& vacancy_id) const {
    for (const auto& c : cvs)
        if (c.vacancy_id == vacancy_id) return &c;
    return nullptr;
}

std::vector<const NameEntry*> Corpus::name_cell(Ethnicity e, Gender g) const {
    std::vector<const NameEntry*> out;
    for (const auto& n : names)
        if (n.ethnicity == e && n.gender == g) out.push_back(&n);
    return out;
}

void validate_corpus(const Corpus& corpus) {
    std::set<std::string> ids;
    for (const auto& v : corpus.vacancies) {
        if (v.id.empty()) throw ValidationError("vacancy with empty id");
        if (!ids.insert(v.id).second) throw ValidationError("duplicate vacancy id '" + v.id + "'");
        if (v.body.empty()) throw ValidationError("vacancy '" + v.id + "' has empty body");
        if (v.occupation.empty()) throw ValidationError("vacancy '" + v.id + "' has empty occupation");
    }
    for (const auto& c : corpus.cvs) {
        if (!ids.count(c.vacancy_id))
            throw ValidationError("CV references unknown vacancy '" + c.vacancy_id + "'");
        const size_t k = count_occurrences(c.body, kNamePlaceholder);
        if (k != 1)
            throw ValidationError("CV for vacancy '" + c.vacancy_id + "' contains " +
                                  std::to_string(k) + " name placeholders, expected exactly 1");
    }
    for (Ethnicity e : kAllEthnicities) {
        for (Gender g : kAllGenders) {
            if (corpus.name_cell(e, g).empty())
                throw ValidationError("empty cell " + std::string(to_string(e)) + "×" +
                                      std::string(to_string(g)));
        }
    }
}

Corpus load_corpus(const std::filesystem::path& vacancy_file, const std::filesystem::path& cv_file,
                   const std::filesystem::path& name_file) {
    Corpus corpus;

    std::ifstream vf(vacancy_file);
    if (!vf) throw IoError("cannot open " + vacancy_file.string());
    std::string line;
    size_t lineno = 0;
    while (std::getline(vf, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(vacancy_file, lineno, std::string("invalid JSON: ") + e.what());
        }
        Vacancy v;
        v.id = get_string(j, vacancy_file, lineno, "id");
        v.occupation = get_string(j, vacancy_file, lineno, "occupation");
        v.experience_req = require_enum(parse_experience(get_string(j, vacancy_file, lineno, "experience_req")),
                                        vacancy_file, lineno, "experience_req", j["experience_req"]);
        v.job_type = require_enum(parse_job_type(get_string(j, vacancy_file, lineno, "job_type")),
                                  vacancy_file, lineno, "job_type", j["job_type"]);
        v.shift = require_enum(parse_shift(get_string(j, vacancy_file, lineno, "shift")), vacancy_file,
                               lineno, "shift", j["shift"]);
        v.hours = require_enum(parse_hours(get_string(j, vacancy_file, lineno, "hours")), vacancy_file,
                               lineno, "hours", j["hours"]);
        if (!j.contains("lang_req") || !j["lang_req"].is_object())
            fail(vacancy_file, lineno, "missing or non-object field 'lang_req'");
        for (const auto& [k, val] : j["lang_req"].items()) {
            auto lang = parse_language(k);
            if (!lang) fail(vacancy_file, lineno, "unknown language '" + k + "'");
            if (!val.is_string()) fail(vacancy_file, lineno, "proficiency for '" + k + "' must be a string");
            auto prof = parse_proficiency(val.get<std::string>());
            if (!prof) fail(vacancy_file, lineno, "unknown proficiency '" + val.get<std::string>() + "'");
            v.lang_req[*lang] = *prof;
        }
        v.location = get_string(j, vacancy_file, lineno, "location");
        v.body = get_string(j, vacancy_file, lineno, "body");
        if (v.body.empty()) fail(vacancy_file, lineno, "vacancy body must be non-empty");
        corpus.vacancies.push_back(std::move(v));
    }

    std::ifstream cf(cv_file);
    if (!cf) throw IoError("cannot open " + cv_file.string());
    lineno = 0;
    while (std::getline(cf, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(cv_file, lineno, std::string("invalid JSON: ") + e.what());
        }
        CvTemplate c;
        c.vacancy_id = get_string(j, cv_file, lineno, "vacancy_id");
        c.body = get_string(j, cv_file, lineno, "body");
        c.degree_spec = get_string(j, cv_file, lineno, "degree_spec");
        if (!j.contains("grad_year") || !j["grad_year"].is_number_integer())
            fail(cv_file, lineno, "missing or non-integer field 'grad_year'");
        c.grad_year = j["grad_year"].get<int>();
        c.experience_summary = get_string(j, cv_file, lineno, "experience_summary");
        corpus.cvs.push_back(std::move(c));
    }

    std::ifstream nf(name_file);
    if (!nf) throw IoError("cannot open " + name_file.string());
    lineno = 0;
    bool header_seen = false;
    while (std::getline(nf, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        fields.push_back(cur);
        if (!header_seen) {
            if (fields != std::vector<std::string>{"first", "last", "ethnicity", "gender", "source"})
                fail(name_file, lineno, "expected header 'first,last,ethnicity,gender,source'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 5) fail(name_file, lineno, "expected 5 comma-separated fields");
        NameEntry n;
        n.first = fields[0];
        n.last = fields[1];
        if (n.first.empty() || n.last.empty()) fail(name_file, lineno, "first and last must be non-empty");
        n.ethnicity = require_enum(parse_ethnicity(fields[2]), name_file, lineno, "ethnicity", fields[2]);
        n.gender = require_enum(parse_gender(fields[3]), name_file, lineno, "gender", fields[3]);
        n.source = fields[4];
        corpus.names.push_back(std::move(n));
    }
    if (!header_seen) throw ValidationError(name_file.string() + ": missing header line");

    validate_corpus(corpus);
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& vacancy_file,
                 const std::filesystem::path& cv_file, const std::filesystem::path& name_file) {
    std::ofstream vf(vacancy_file);
    if (!vf) throw IoError("cannot write " + vacancy_file.string());
    for (const auto& v : corpus.vacancies) vf << vacancy_record(v) << "\n";

    std::ofstream cf(cv_file);
    if (!cf) throw IoError("cannot write " + cv_file.string());
    for (const auto& c : corpus.cvs) cf << cv_record(c) << "\n";

    std::ofstream nf(name_file);
    if (!nf) throw IoError("cannot write " + name_file.string());
    nf << "first,last,ethnicity,gender,source\n";
    for (const auto& n : corpus.names) nf << name_record(n) << "\n";
}

void save_corpus_dir(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_corpus(corpus, dir / "vacancies.jsonl", dir / "cvs.jsonl", dir / "names.csv");
}

Corpus load_corpus_dir(const std::filesystem::path& dir) {
    return load_corpus(dir / "vacancies.jsonl", dir / "cvs.jsonl", dir / "names.csv");
}

// ---------------------------------------------------------------------------
// Synthetic generation
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& default_occupations() {
    static const std::vector<std::string> kOccupations = {
        "administrative assistant", "HR officer", "IT analyst", "IT project leader",
        "industrial logistics planner", "trucker-trailer driver", "seller of clothing accessories",
        "sales representative", "site manager", "technical production manager", "legal assistant",
        "accountant", "management assistant", "customer service agent", "warehouse operator",
        "maintenance technician", "electrician", "software developer", "marketing officer",
        "graphic designer", "receptionist", "financial analyst", "production operator"};
    return kOccupations;
}

struct BuiltinNames {
    Ethnicity ethnicity;
    std::vector<std::string> male_first;
    std::vector<std::string> female_first;
    std::vector<std::string> last;
};

const std::vector<BuiltinNames>& builtin_name_pools() {
    static const std::vector<BuiltinNames> kPools = {
        {Ethnicity::Arab, {"Youssef", "Karim"}, {"Amira", "Layla"}, {"El Amrani", "Benali"}},
        {Ethnicity::Asian, {"Wei", "Minh"}, {"Mei", "Linh"}, {"Chen", "Nguyen"}},
        {Ethnicity::BlackAmerican, {"DeShawn", "Tyrone"}, {"Keisha", "Imani"}, {"Washington", "Booker"}},
        {Ethnicity::CentralAfrican, {"Olivier", "Placide"}, {"Chantal", "Solange"}, {"Mukendi", "Ilunga"}},
        {Ethnicity::Dutch, {"Jan", "Wouter"}, {"Els", "Marieke"}, {"Peeters", "De Smet"}},
        {Ethnicity::EasternEuropean, {"Piotr", "Andrei"}, {"Katarzyna", "Elena"}, {"Kowalski", "Novak"}},
        {Ethnicity::Hispanic, {"Diego", "Alejandro"}, {"Lucia", "Valentina"}, {"Garcia", "Moreno"}},
        {Ethnicity::Turkish, {"Emre", "Mehmet"}, {"Zeynep", "Elif"}, {"Yilmaz", "Demir"}},
        {Ethnicity::WhiteAmerican, {"Jake", "Connor"}, {"Abigail", "Claire"}, {"Miller", "Anderson"}},
    };
    return kPools;
}

const std::vector<std::string>& degree_fields() {
    static const std::vector<std::string> kFields = {
        "Business Administration", "Applied Informatics", "Logistics Management",
        "Office Management",       "Marketing",           "Accountancy",
        "Electromechanics",        "Communication",       "Graphic Design",
        "Law and Administration"};
    return kFields;
}

void check_marginal(const Marginal& m, const std::string& covariate) {
    if (m.levels.size() != m.weights.size() || m.levels.empty())
        throw ValidationError("marginal for '" + covariate + "' has mismatched levels/weights");
    double sum = 0.0;
    for (double w : m.weights) {
        if (w < 0.0) throw ValidationError("marginal for '" + covariate + "' has a negative weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw ValidationError("marginal for '" + covariate + "' sums to " + std::to_string(sum) +
                              ", expected 1 within 1e-9");
}

std::string experience_phrase(Experience e) {
    switch (e) {
        case Experience::None: return "no prior experience required";
        case Experience::TwoYears: return "at least two years of experience required";
        case Experience::FiveYears: return "at least five years of experience required";
    }
    return "";
}

}  // namespace

CorpusConfig CorpusConfig::defaults() {
    CorpusConfig c;
    c.occupations = default_occupations();
    // Five occupation x 5y cells dropped, mirroring a balanced design with
    // under-filled cells removed: 23*3 - 5 = 64 cells, 1920/64 = 30 each.
    c.excluded_cells = {
        {"seller of clothing accessories", Experience::FiveYears},
        {"receptionist", Experience::FiveYears},
        {"customer service agent", Experience::FiveYears},
        {"warehouse operator", Experience::FiveYears},
        {"production operator", Experience::FiveYears},
    };
    c.job_type = {{"permanent", "temporary", "other"}, {1501.0 / 1920, 382.0 / 1920, 37.0 / 1920}};
    c.shift = {{"day", "two_shift", "three_shift", "night", "interrupted", "continuous"},
               {1823.0 / 1920, 25.0 / 1920, 24.0 / 1920, 20.0 / 1920, 16.0 / 1920, 12.0 / 1920}};
    c.hours = {{"full_time", "part_time"}, {1860.0 / 1920, 60.0 / 1920}};
    c.location = {{"Antwerp", "Ghent", "Brussels", "Leuven", "Bruges", "Hasselt", "Mechelen",
                   "Kortrijk", "Ostend", "Genk"},
                  std::vector<double>(10, 0.1)};
    return c;
}

Corpus generate_synthetic_corpus(const CorpusConfig& config, uint64_t seed) {
    if (config.n_vacancies <= 0) throw ValidationError("n_vacancies must be positive");
    if (config.names_per_cell <= 0) throw ValidationError("names_per_cell must be positive");
    if (config.occupations.empty()) throw ValidationError("occupation list must be non-empty");
    check_marginal(config.job_type, "job_type");
    check_marginal(config.shift, "shift");
    check_marginal(config.hours, "hours");
    check_marginal(config.location, "location");
    for (double p : {config.p_dutch, config.p_french, config.p_english})
        if (p < 0.0 || p > 1.0) throw ValidationError("language presence probability outside [0,1]");

    // Design cells, round-robin filled so occupation x experience stays
    // balanced like the audit design this mimics.
    std::vector<std::pair<std::string, Experience>> cells;
    for (const auto& occ : config.occupations) {
        for (Experience e : kAllExperience) {
            bool excluded = false;
            for (const auto& [xo, xe] : config.excluded_cells)
                if (xo == occ && xe == e) excluded = true;
            if (!excluded) cells.emplace_back(occ, e);
        }
    }
    if (cells.empty()) throw ValidationError("all occupation x experience cells excluded");

    Corpus corpus;
    corpus.vacancies.reserve(config.n_vacancies);
    corpus.cvs.reserve(config.n_vacancies);

    const int id_width = std::max<int>(4, std::to_string(config.n_vacancies).size());
    for (int i = 0; i < config.n_vacancies; ++i) {
        Rng rng(derive_seed(seed, "vacancy/" + std::to_string(i)));
        Vacancy v;
        {
            std::string num = std::to_string(i + 1);
            v.id = "v" + std::string(id_width - num.size(), '0') + num;
        }
        const auto& cell = cells[static_cast<size_t>(i) % cells.size()];
        v.occupation = cell.first;
        v.experience_req = cell.second;
        v.job_type = *parse_job_type(config.job_type.levels[rng.next_discrete(config.job_type.weights)]);
        v.shift = *parse_shift(config.shift.levels[rng.next_discrete(config.shift.weights)]);
        v.hours = *parse_hours(config.hours.levels[rng.next_discrete(config.hours.weights)]);
        v.location = config.location.levels[rng.next_discrete(config.location.weights)];
        const std::array<std::pair<Language, double>, 3> langs = {
            {{Language::Dutch, config.p_dutch},
             {Language::French, config.p_french},
             {Language::English, config.p_english}}};
        for (const auto& [lang, p] : langs) {
            if (rng.next_double() < p) {
                const auto lvl = static_cast<Proficiency>(1 + rng.next_below(4));  // limited..very_good
                v.lang_req[lang] = lvl;
            }
        }
        std::ostringstream body;
        body << "Vacancy: " << v.occupation << " (" << v.location << "). "
             << to_string(v.job_type) << " position, " << to_string(v.hours) << ", "
             << to_string(v.shift) << " schedule. " << experience_phrase(v.experience_req) << ".";
        for (const auto& [lang, prof] : v.lang_req)
            body << " " << to_string(lang) << ": " << to_string(prof) << ".";
        body << " We are looking for a motivated " << v.occupation << " to strengthen our team in "
             << v.location << ".";
        v.body = body.str();

        CvTemplate cv;
        cv.vacancy_id = v.id;
        cv.degree_spec =
            "Bachelor in " + degree_fields()[fnv1a64(v.occupation) % degree_fields().size()];
        int years = v.experience_req == Experience::None ? 0
                    : v.experience_req == Experience::TwoYears ? 3
                                                               : 6;
        cv.grad_year = 2023 - years - static_cast<int>(rng.next_below(5));
        cv.experience_summary =
            years == 0 ? "Entry level; internships during studies"
                       : std::to_string(years) + " years as " + v.occupation;
        std::ostringstream cvb;
        cvb << kNamePlaceholder << "\n"
            << "Born 1994, Belgian nationality. Driving licence B, own car.\n"
            << "Education: " << cv.degree_spec << ", graduated " << cv.grad_year << ".\n"
            << "Experience: " << cv.experience_summary << ".\n"
            << "Languages: Dutch (very good), French (good), English (good).\n"
            << "Computer skills: office suite, e-mail, planning tools.";
        cv.body = cvb.str();

        corpus.vacancies.push_back(std::move(v));
        corpus.cvs.push_back(std::move(cv));
    }

    for (const auto& pool : builtin_name_pools()) {
        for (Gender g : kAllGenders) {
            const auto& firsts = g == Gender::Male ? pool.male_first : pool.female_first;
            int produced = 0;
            for (size_t fi = 0; fi < firsts.size() && produced < config.names_per_cell; ++fi) {
                for (size_t li = 0; li < pool.last.size() && produced < config.names_per_cell; ++li) {
                    corpus.names.push_back(
                        {firsts[fi], pool.last[li], pool.ethnicity, g, "synthetic"});
                    ++produced;
                }
            }
        }
    }

    validate_corpus(corpus);
    return corpus;
}

}  // namespace cvaudit
