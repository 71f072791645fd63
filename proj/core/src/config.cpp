#include "cvaudit/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cvaudit/hash.hpp"

using nlohmann::json;

namespace cvaudit {

namespace {

BiasRule bias_rule_from_json(const json& j) {
    BiasRule r;
    if (j.contains("ethnicity")) {
        auto e = parse_ethnicity(j["ethnicity"].get<std::string>());
        if (!e) throw ValidationError("bias rule: unknown ethnicity '" +
                                      j["ethnicity"].get<std::string>() + "'");
        r.ethnicity = *e;
    }
    if (j.contains("gender")) {
        auto g = parse_gender(j["gender"].get<std::string>());
        if (!g) throw ValidationError("bias rule: unknown gender '" +
                                      j["gender"].get<std::string>() + "'");
        r.gender = *g;
    }
    r.job_field = j.value("job_field", "");
    r.job_value = j.value("job_value", "");
    r.shift = j.at("shift").get<double>();
    return r;
}

BiasModel bias_model_from_json(const json& j) {
    BiasModel m = BiasModel::calibrated();
    if (j.contains("base")) {
        m.base.clear();
        for (const auto& e : j["base"]) m.base.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
    }
    if (j.contains("mode")) {
        const std::string mode = j["mode"].get<std::string>();
        if (mode == "tilt") m.mode = BiasMode::Tilt;
        else if (mode == "shift") m.mode = BiasMode::Shift;
        else throw ValidationError("bias model: unknown mode '" + mode + "'");
    }
    if (j.contains("edges")) {
        m.edges.clear();
        for (const auto& e : j["edges"])
            m.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    }
    if (j.contains("penalties")) {
        m.penalties.clear();
        for (const auto& r : j["penalties"]) m.penalties.push_back(bias_rule_from_json(r));
    }
    if (j.contains("interactions")) {
        m.interactions.clear();
        for (const auto& r : j["interactions"]) m.interactions.push_back(bias_rule_from_json(r));
    }
    m.noise_sd = j.value("noise_sd", m.noise_sd);
    m.clamp = j.value("clamp", m.clamp);
    m.validate();
    return m;
}

}  // namespace

BiasModel bias_model_from_json_text(const std::string& text) {
    return bias_model_from_json(json::parse(text));
}

std::string RunConfig::scoring_digest() const {
    std::ostringstream os;
    os << instruction << "|";
    for (const auto& e : scheme.entries) os << e.temperature << ":" << e.weight << ";";
    os << "|" << static_cast<int>(provider.kind) << "|" << provider.model_id << "|"
       << provider.run_seed;
    if (provider.kind == ProviderKind::Synthetic) {
        for (const auto& [v, w] : provider.bias.base) os << v << ":" << w << ";";
        os << static_cast<int>(provider.bias.mode);
        for (const auto& e : provider.bias.edges) os << e.from << ">" << e.to << ":" << e.rate << ";";
        for (const auto& r : provider.bias.penalties) {
            os << (r.ethnicity ? to_string(*r.ethnicity) : "*") << "/"
               << (r.gender ? to_string(*r.gender) : "*") << "/" << r.job_field << "=" << r.job_value
               << ":" << r.shift << ";";
        }
        os << provider.bias.noise_sd << provider.bias.clamp;
    }
    return digest_string(os.str());
}

RunConfig RunConfig::from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(origin + ": invalid JSON: " + e.what());
    }

    RunConfig c;
    c.instruction = j.value("instruction", c.instruction);
    if (j.contains("refusal_lexicon")) {
        c.refusal_lexicon.clear();
        for (const auto& p : j["refusal_lexicon"]) c.refusal_lexicon.push_back(p.get<std::string>());
    }
    if (j.contains("temperature_scheme")) {
        c.scheme.entries.clear();
        for (const auto& e : j["temperature_scheme"])
            c.scheme.entries.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        c.scheme.validate();
    }
    if (j.contains("provider")) {
        const json& p = j["provider"];
        if (p.contains("kind")) {
            const std::string kind = p["kind"].get<std::string>();
            if (kind == "http") c.provider.kind = ProviderKind::Http;
            else if (kind == "synthetic") c.provider.kind = ProviderKind::Synthetic;
            else if (kind == "replay") c.provider.kind = ProviderKind::Replay;
            else throw ValidationError(origin + ": unknown provider kind '" + kind + "'");
        }
        c.provider.endpoint = p.value("endpoint", c.provider.endpoint);
        c.provider.model_id = p.value("model_id", c.provider.model_id);
        c.provider.api_key_env = p.value("api_key_env", c.provider.api_key_env);
        c.provider.tls_verify = p.value("tls_verify", c.provider.tls_verify);
        c.provider.max_in_flight = p.value("max_in_flight", c.provider.max_in_flight);
        c.provider.run_seed = p.value("run_seed", c.provider.run_seed);
        c.provider.rate_limit_per_s = p.value("rate_limit_per_s", c.provider.rate_limit_per_s);
        if (p.contains("retry")) {
            const json& r = p["retry"];
            c.provider.retry.max_attempts = r.value("max_attempts", c.provider.retry.max_attempts);
            if (r.contains("backoff_ms")) {
                c.provider.retry.backoff_ms.clear();
                for (const auto& b : r["backoff_ms"])
                    c.provider.retry.backoff_ms.push_back(b.get<int>());
            }
        }
        if (p.contains("replay_log"))
            c.provider.replay_log = p["replay_log"].get<std::string>();
        if (p.contains("bias")) c.provider.bias = bias_model_from_json(p["bias"]);
    }
    if (j.contains("reference_levels")) {
        const json& r = j["reference_levels"];
        c.references.ethnicity = r.value("ethnicity", c.references.ethnicity);
        c.references.gender = r.value("gender", c.references.gender);
        for (const auto& [k, v] : r.items())
            if (k != "ethnicity" && k != "gender") c.references.other[k] = v.get<std::string>();
    }
    c.seed = j.value("seed", c.seed);
    c.bootstrap_replications = j.value("boot", c.bootstrap_replications);
    c.adjust_method = j.value("adjust", c.adjust_method);
    c.report_cutoff = j.value("report_cutoff", c.report_cutoff);
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open config " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text, file.string());
}

}  // namespace cvaudit
