#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "cvaudit/config.hpp"
#include "helpers.hpp"

// httplib drags in <resolv.h>, whose _res macro breaks Eigen when it is
// included first; keep it after the project headers.
#include <httplib.h>
#include <json.hpp>

using namespace cvaudit;
using cvaudit::test::TempDir;

namespace {

Corpus one_vacancy_corpus() {
    CorpusConfig cc = CorpusConfig::defaults();
    cc.n_vacancies = 1;
    return generate_synthetic_corpus(cc, 321);
}

Observation make_obs(const std::string& trial_id, int score) {
    Observation o;
    o.trial_id = trial_id;
    o.vacancy_id = "v1";
    o.ethnicity = Ethnicity::Dutch;
    o.gender = Gender::Male;
    o.first = "Jan";
    o.last = "Peeters";
    o.temperature = 0.0;
    o.score = score;
    o.raw_response = std::to_string(score);
    o.model_id = "m";
    o.timestamp = "2026-01-01T00:00:00Z";
    return o;
}

}  // namespace

TEST_CASE("bias model: expected displacement honours penalty and interaction rules") {
    BiasModel m = BiasModel::null_model();
    m.penalties = {{Ethnicity::EasternEuropean, std::nullopt, "", "", -2.0}};
    m.interactions = {{std::nullopt, std::nullopt, "hours", "full_time", -0.5}};

    const Corpus corpus = one_vacancy_corpus();
    Trial t;
    t.trial_id = "t";
    t.vacancy_id = corpus.vacancies[0].id;
    t.ethnicity = Ethnicity::EasternEuropean;
    t.gender = Gender::Female;
    Vacancy v = corpus.vacancies[0];
    v.hours = Hours::FullTime;
    CHECK(m.displacement(t, v) == doctest::Approx(-2.5));
    v.hours = Hours::PartTime;
    CHECK(m.displacement(t, v) == doctest::Approx(-2.0));
    t.ethnicity = Ethnicity::Dutch;
    CHECK(m.displacement(t, v) == doctest::Approx(0.0));
}

TEST_CASE("synthetic scorer: zero-penalty model is identity-neutral") {
    const BiasModel model = BiasModel::null_model();
    const Corpus corpus = one_vacancy_corpus();
    const Vacancy& v = corpus.vacancies[0];
    const double base_mean = model.base_mean();
    CHECK(base_mean == doctest::Approx(67.2157).epsilon(1e-9));

    const int per_cell = 10000;
    for (Ethnicity e : kAllEthnicities) {
        for (Gender g : kAllGenders) {
            Trial t;
            t.vacancy_id = v.id;
            t.ethnicity = e;
            t.gender = g;
            double sum = 0.0;
            for (int i = 0; i < per_cell; ++i) {
                t.trial_id = std::string(to_string(e)) + "-" + std::string(to_string(g)) + "-" +
                             std::to_string(i);
                Rng rng(derive_seed(1, "score/" + t.trial_id + "/0"));
                sum += synthetic_score(t, v, model, rng);
            }
            const double mean = sum / per_cell;
            CHECK(std::fabs(mean - base_mean) < 0.3);
        }
    }
}

TEST_CASE("synthetic scorer: injected penalty reproduces the mean gap") {
    BiasModel model = BiasModel::null_model();
    model.penalties = {{Ethnicity::EasternEuropean, std::nullopt, "", "", -2.417}};
    const Corpus corpus = one_vacancy_corpus();
    const Vacancy& v = corpus.vacancies[0];

    auto group_mean = [&](Ethnicity e) {
        Trial t;
        t.vacancy_id = v.id;
        t.ethnicity = e;
        t.gender = Gender::Male;
        double sum = 0.0;
        for (int i = 0; i < 10000; ++i) {
            t.trial_id = std::string(to_string(e)) + std::to_string(i);
            Rng rng(derive_seed(2, "score/" + t.trial_id + "/0"));
            sum += synthetic_score(t, v, model, rng);
        }
        return sum / 10000.0;
    };
    const double gap = group_mean(Ethnicity::EasternEuropean) - group_mean(Ethnicity::Dutch);
    CHECK(std::fabs(gap - (-2.417)) < 0.27);
}

TEST_CASE("synthetic scorer: default base mixture emits the calibrated spikes") {
    const BiasModel model = BiasModel::null_model();
    const Corpus corpus = one_vacancy_corpus();
    const Vacancy& v = corpus.vacancies[0];
    Trial t;
    t.vacancy_id = v.id;
    t.ethnicity = Ethnicity::Dutch;
    t.gender = Gender::Male;
    long fifties = 0, seventies = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        t.trial_id = "d" + std::to_string(i);
        Rng rng(derive_seed(3, "score/" + t.trial_id + "/0"));
        const int s = synthetic_score(t, v, model, rng);
        fifties += s == 50;
        seventies += s == 70;
        CHECK(s >= 1);
        CHECK(s <= 100);
    }
    CHECK(std::fabs(fifties / static_cast<double>(draws) - 0.2518) < 0.01);
    CHECK(std::fabs(seventies / static_cast<double>(draws) - 0.4226) < 0.01);
}

TEST_CASE("synthetic scorer: mean-linear in penalties in both modes") {
    const Corpus corpus = one_vacancy_corpus();
    const Vacancy& v = corpus.vacancies[0];

    auto mean_for = [&](const BiasModel& m, Ethnicity e, uint64_t seed) {
        Trial t;
        t.vacancy_id = v.id;
        t.ethnicity = e;
        t.gender = Gender::Male;
        double sum = 0.0;
        for (int i = 0; i < 40000; ++i) {
            t.trial_id = std::to_string(i);
            Rng rng(derive_seed(seed, "score/" + std::string(to_string(e)) + t.trial_id));
            sum += synthetic_score(t, v, m, rng);
        }
        return sum / 40000.0;
    };

    // Shift mode at an interior mean with clamping off: adding a penalty
    // moves the mean by exactly that amount in expectation.
    BiasModel shift;
    shift.mode = BiasMode::Shift;
    shift.base = {{45, 0.25}, {50, 0.5}, {55, 0.25}};
    shift.noise_sd = 2.0;
    shift.clamp = false;
    shift.penalties = {{Ethnicity::Asian, std::nullopt, "", "", -4.0},
                       {Ethnicity::Arab, std::nullopt, "", "", -8.0}};
    const double m0 = mean_for(shift, Ethnicity::Dutch, 11);
    const double m4 = mean_for(shift, Ethnicity::Asian, 11);
    const double m8 = mean_for(shift, Ethnicity::Arab, 11);
    CHECK(std::fabs((m0 - m4) - 4.0) < 0.15);
    CHECK(std::fabs((m0 - m8) - 8.0) < 0.15);

    // Tilt mode: same property on the demotion mechanism.
    BiasModel tilt = BiasModel::null_model();
    tilt.penalties = {{Ethnicity::Asian, std::nullopt, "", "", -1.0},
                      {Ethnicity::Arab, std::nullopt, "", "", -2.0}};
    const double t0 = mean_for(tilt, Ethnicity::Dutch, 12);
    const double t1 = mean_for(tilt, Ethnicity::Asian, 12);
    const double t2 = mean_for(tilt, Ethnicity::Arab, 12);
    CHECK(std::fabs((t0 - t1) - 1.0) < 0.15);
    CHECK(std::fabs((t0 - t2) - 2.0) < 0.15);
}

TEST_CASE("synthetic scorer: shift mode clamps to [1,100]") {
    BiasModel m;
    m.mode = BiasMode::Shift;
    m.base = {{45, 0.5}, {55, 0.5}};
    m.penalties = {{Ethnicity::Asian, std::nullopt, "", "", -60.0}};
    const Corpus corpus = one_vacancy_corpus();
    Trial t;
    t.vacancy_id = corpus.vacancies[0].id;
    t.ethnicity = Ethnicity::Asian;
    t.gender = Gender::Male;
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        t.trial_id = std::to_string(i);
        const int s = synthetic_score(t, corpus.vacancies[0], m, rng);
        CHECK(s == 1);  // 45/55 - 60 clamps at the floor
    }
    m.penalties[0].shift = +60.0;
    for (int i = 0; i < 200; ++i) {
        t.trial_id = std::to_string(i);
        CHECK(synthetic_score(t, corpus.vacancies[0], m, rng) == 100);
    }
}

TEST_CASE("bias model: validation") {
    BiasModel m = BiasModel::null_model();
    m.base[0].second += 1e-6;
    CHECK_THROWS_AS(m.validate(), ValidationError);

    m = BiasModel::null_model();
    m.edges.clear();
    CHECK_THROWS_AS(m.validate(), ValidationError);

    m = BiasModel::null_model();
    m.edges.push_back({55, 50, 1.0});  // 55 not in support
    CHECK_THROWS_AS(m.validate(), ValidationError);

    ProviderConfig pc;
    pc.max_in_flight = 0;
    CHECK_THROWS_AS(pc.validate(), ValidationError);
    pc = ProviderConfig{};
    pc.rate_limit_per_s = 0.0;
    CHECK_THROWS_AS(pc.validate(), ValidationError);
}

TEST_CASE("runner: log content is independent of worker count") {
    TempDir dir;
    CorpusConfig cc = CorpusConfig::defaults();
    cc.n_vacancies = 12;
    const Corpus corpus = generate_synthetic_corpus(cc, 51);
    const ExperimentPlan plan = build_plan(corpus, TemperatureScheme::defaults(), 52);

    auto run_with = [&](int workers, const std::string& name) {
        ProviderConfig pc;
        pc.kind = ProviderKind::Synthetic;
        pc.run_seed = 53;
        pc.max_in_flight = workers;
        RunManifest manifest{plan.digest(), corpus.digest(), pc.model_id, "t"};
        RunLog log = RunLog::create(dir / name, manifest);
        execute_plan(plan, corpus, pc, log);
        return read_observations(dir / name);
    };
    const auto a = run_with(1, "a.jsonl");
    const auto b = run_with(8, "b.jsonl");
    REQUIRE(a.size() == plan.trials.size());
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].trial_id == b[i].trial_id);  // plan order, not completion order
        CHECK(a[i].score == b[i].score);
        CHECK(a[i].raw_response == b[i].raw_response);
        CHECK(a[i].attempt_count == b[i].attempt_count);
    }
}

TEST_CASE("runner: observations carry the prompt digest for audit") {
    TempDir dir;
    CorpusConfig cc = CorpusConfig::defaults();
    cc.n_vacancies = 3;
    const Corpus corpus = generate_synthetic_corpus(cc, 95);
    const ExperimentPlan plan = build_plan(corpus, TemperatureScheme::defaults(), 96);
    ProviderConfig pc;
    pc.kind = ProviderKind::Synthetic;
    pc.run_seed = 97;
    RunManifest manifest{plan.digest(), corpus.digest(), pc.model_id, "t"};
    RunLog log = RunLog::create(dir / "log.jsonl", manifest);
    execute_plan(plan, corpus, pc, log);
    const auto obs = read_observations(dir / "log.jsonl");
    REQUIRE(obs.size() == plan.trials.size());
    for (size_t i = 0; i < obs.size(); ++i) {
        const Trial& t = plan.trials[i];
        const PromptText p =
            render_prompt(t, *corpus.find_vacancy(t.vacancy_id), *corpus.find_cv(t.vacancy_id));
        CHECK(obs[i].prompt_digest == p.digest);
    }
}

TEST_CASE("store: append, read back, reject duplicates") {
    TempDir dir;
    RunManifest m{"p", "c", "m", "cfg"};
    RunLog log = RunLog::create(dir / "log.jsonl", m);
    log.append(make_obs("t1", 70));
    log.append(make_obs("t2", 50));
    CHECK_THROWS_WITH_AS(log.append(make_obs("t1", 60)), doctest::Contains("duplicate"),
                         ValidationError);
    CHECK(log.size() == 2);

    const auto obs = read_observations(dir / "log.jsonl");
    REQUIRE(obs.size() == 2);
    CHECK(obs[0].trial_id == "t1");
    CHECK(obs[0].score == 70);
    CHECK(obs[1].trial_id == "t2");

    // score xor missing_reason is enforced
    Observation bad = make_obs("t3", 50);
    bad.missing_reason = "refusal";
    CHECK_THROWS_AS(log.append(bad), ValidationError);
}

TEST_CASE("store: resume rejects a mismatched manifest and tolerates a torn tail") {
    TempDir dir;
    RunManifest m{"plan1", "corpus1", "model1", "cfg1"};
    {
        RunLog log = RunLog::create(dir / "log.jsonl", m);
        log.append(make_obs("t1", 70));
    }
    {
        std::FILE* f = std::fopen((dir / "log.jsonl").string().c_str(), "ab");
        std::fputs("{\"kind\":\"obs\",\"trial_id\":\"torn", f);  // crash mid-append
        std::fclose(f);
    }
    RunManifest other = m;
    other.plan_digest = "different";
    CHECK_THROWS_WITH_AS(RunLog::open_resume(dir / "log.jsonl", other),
                         doctest::Contains("manifest mismatch"), ValidationError);

    RunLog resumed = RunLog::open_resume(dir / "log.jsonl", m);
    CHECK(resumed.size() == 1);
    CHECK(resumed.contains("t1"));
    resumed.append(make_obs("t2", 60));  // append lands after the truncated tail
    const auto obs = read_observations(dir / "log.jsonl");
    REQUIRE(obs.size() == 2);
    CHECK(obs[1].trial_id == "t2");
}

TEST_CASE("runner: killed run resumes with exactly the unattempted trials") {
    TempDir dir;
    CorpusConfig cc = CorpusConfig::defaults();
    cc.n_vacancies = 20;
    const Corpus corpus = generate_synthetic_corpus(cc, 61);
    const ExperimentPlan plan = build_plan(corpus, TemperatureScheme::defaults(), 62);

    ProviderConfig pc;
    pc.kind = ProviderKind::Synthetic;
    pc.run_seed = 63;
    pc.max_in_flight = 3;
    RunManifest manifest{plan.digest(), corpus.digest(), pc.model_id, "t"};

    std::atomic<int> budget{100};
    {
        RunLog log = RunLog::create(dir / "log.jsonl", manifest);
        RunOptions opts;
        opts.keep_running = [&] { return budget.fetch_sub(1) > 0; };
        execute_plan(plan, corpus, pc, log, opts);
    }
    const auto first = read_observations(dir / "log.jsonl");
    CHECK(first.size() < plan.trials.size());
    CHECK(first.size() > 0);

    std::set<std::string> done;
    for (const auto& o : first) done.insert(o.trial_id);

    RunLog log = RunLog::open_resume(dir / "log.jsonl", manifest);
    const RunStats stats = execute_plan(plan, corpus, pc, log);
    CHECK(stats.skipped == first.size());
    CHECK(stats.attempted == plan.trials.size() - first.size());

    const auto all = read_observations(dir / "log.jsonl");
    CHECK(all.size() == plan.trials.size());
    std::set<std::string> ids;
    for (const auto& o : all) ids.insert(o.trial_id);
    CHECK(ids.size() == plan.trials.size());

    // Deterministic provider: the resumed trials score identically to an
    // uninterrupted run.
    RunManifest m2 = manifest;
    RunLog log2 = RunLog::create(dir / "uninterrupted.jsonl", m2);
    execute_plan(plan, corpus, pc, log2);
    const auto reference = read_observations(dir / "uninterrupted.jsonl");
    std::map<std::string, int> ref_scores;
    for (const auto& o : reference) ref_scores[o.trial_id] = *o.score;
    for (const auto& o : all) CHECK(ref_scores.at(o.trial_id) == *o.score);
}

TEST_CASE("replay provider: reproduces a run verbatim") {
    TempDir dir;
    CorpusConfig cc = CorpusConfig::defaults();
    cc.n_vacancies = 6;
    const Corpus corpus = generate_synthetic_corpus(cc, 71);
    const ExperimentPlan plan = build_plan(corpus, TemperatureScheme::defaults(), 72);

    ProviderConfig pc;
    pc.kind = ProviderKind::Synthetic;
    pc.run_seed = 73;
    RunManifest manifest{plan.digest(), corpus.digest(), pc.model_id, "t"};
    {
        RunLog log = RunLog::create(dir / "orig.jsonl", manifest);
        execute_plan(plan, corpus, pc, log);
    }

    ProviderConfig replay;
    replay.kind = ProviderKind::Replay;
    replay.replay_log = dir / "orig.jsonl";
    RunManifest manifest2{plan.digest(), corpus.digest(), pc.model_id, "t2"};
    {
        RunLog log = RunLog::create(dir / "replayed.jsonl", manifest2);
        execute_plan(plan, corpus, replay, log);
    }
    const auto orig = read_observations(dir / "orig.jsonl");
    const auto replayed = read_observations(dir / "replayed.jsonl");
    REQUIRE(orig.size() == replayed.size());
    for (size_t i = 0; i < orig.size(); ++i) {
        CHECK(orig[i].trial_id == replayed[i].trial_id);
        CHECK(orig[i].raw_response == replayed[i].raw_response);
        CHECK(orig[i].score == replayed[i].score);
    }

    // a trial missing from the log is fatal
    ExperimentPlan extended = plan;
    Trial extra = plan.trials[0];
    extra.trial_id = "not-in-log";
    extended.trials.push_back(extra);
    RunManifest m3{extended.digest(), corpus.digest(), pc.model_id, "t3"};
    RunLog log3 = RunLog::create(dir / "r3.jsonl", m3);
    CHECK_THROWS_AS(execute_plan(extended, corpus, replay, log3), FatalProviderError);
}

TEST_CASE("export: joins covariates and honours complete-cases") {
    TempDir dir;
    CorpusConfig cc = CorpusConfig::defaults();
    cc.n_vacancies = 4;
    const Corpus corpus = generate_synthetic_corpus(cc, 81);

    std::vector<Observation> obs;
    Observation o1 = make_obs("t1", 70);
    o1.vacancy_id = corpus.vacancies[0].id;
    Observation o2 = make_obs("t2", 0);
    o2.vacancy_id = corpus.vacancies[1].id;
    o2.score.reset();
    o2.missing_reason = "refusal";
    obs.push_back(o1);
    obs.push_back(o2);

    const ExportedTable full = export_table(obs, corpus, {.complete_cases = false});
    CHECK(full.rows.size() == 2);
    REQUIRE(full.header.size() == 17);
    CHECK(full.header[0] == "trial_id");
    CHECK(full.header[8] == "occupation");
    CHECK(full.rows[1][7] == "");  // missing score is an empty cell

    const ExportedTable cc_only = export_table(obs, corpus, {.complete_cases = true});
    CHECK(cc_only.rows.size() == 1);

    Observation dangling = make_obs("t3", 50);
    dangling.vacancy_id = "vXXX";
    CHECK_THROWS_WITH_AS(export_table({dangling}, corpus, {}), doctest::Contains("unknown vacancy"),
                         ValidationError);

    write_csv(full, dir / "export.csv");
    std::ifstream in(dir / "export.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "trial_id,vacancy_id,ethnicity,gender,first,last,temperature,score,occupation,"
          "experience_req,job_type,shift,hours,lang_dutch,lang_french,lang_english,location");
}

TEST_CASE("http provider: chat-completion exchange with retry, refusal and auth") {
    httplib::Server server;
    std::atomic<int> flaky_calls{0};

    auto reply = [](httplib::Response& res, const std::string& content) {
        nlohmann::json body{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
        res.set_content(body.dump(), "application/json");
    };

    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        if (req.get_header_value("Authorization") != "Bearer sesame") {
            res.status = 401;
            return;
        }
        const auto body = nlohmann::json::parse(req.body);
        REQUIRE(body.contains("model"));
        REQUIRE(body.contains("temperature"));
        REQUIRE(body["messages"].size() == 1);  // isolated prompt, no history
        reply(res, "88");
    });
    server.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
        if (flaky_calls.fetch_add(1) < 2) {
            res.status = 500;
            return;
        }
        reply(res, "Score: 64/100");
    });
    server.Post("/refuse", [&](const httplib::Request&, httplib::Response& res) {
        reply(res, "I cannot discriminate against candidates based on their background.");
    });

    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const Corpus corpus = one_vacancy_corpus();
    const ExperimentPlan plan = build_plan(corpus, TemperatureScheme::defaults(), 91);
    setenv("CVAUDIT_TEST_KEY", "sesame", 1);

    auto run_against = [&](const std::string& path, const std::string& key_env) {
        TempDir dir;
        ProviderConfig pc;
        pc.kind = ProviderKind::Http;
        pc.endpoint = "http://127.0.0.1:" + std::to_string(port) + path;
        pc.model_id = "test-model";
        pc.api_key_env = key_env;
        pc.max_in_flight = 2;
        pc.rate_limit_per_s = 10000.0;
        pc.retry.max_attempts = 3;
        pc.retry.backoff_ms = {1, 1, 1};
        RunManifest manifest{plan.digest(), corpus.digest(), pc.model_id, "t"};
        RunLog log = RunLog::create(dir / "log.jsonl", manifest);
        execute_plan(plan, corpus, pc, log);
        return read_observations(dir / "log.jsonl");
    };

    SUBCASE("success path") {
        const auto obs = run_against("/v1/chat/completions", "CVAUDIT_TEST_KEY");
        REQUIRE(obs.size() == 18);
        for (const auto& o : obs) {
            CHECK(o.score == 88);
            CHECK(o.model_id == "test-model");
        }
    }
    SUBCASE("transport retries within the attempt budget") {
        const auto obs = run_against("/flaky", "CVAUDIT_TEST_KEY");
        REQUIRE(obs.size() == 18);
        long scored = 0;
        for (const auto& o : obs) scored += o.score.has_value();
        CHECK(scored == 18);
        long retried = 0;
        for (const auto& o : obs) retried += o.attempt_count > 1;
        CHECK(retried >= 1);
        for (const auto& o : obs)
            if (o.score) CHECK((*o.score == 64));
    }
    SUBCASE("refusals are recorded as missing with a reason") {
        const auto obs = run_against("/refuse", "CVAUDIT_TEST_KEY");
        REQUIRE(obs.size() == 18);
        for (const auto& o : obs) {
            CHECK(!o.score);
            CHECK(o.missing_reason == "refusal");
        }
    }
    SUBCASE("bad credentials abort the run") {
        setenv("CVAUDIT_BAD_KEY", "wrong", 1);
        CHECK_THROWS_AS(run_against("/v1/chat/completions", "CVAUDIT_BAD_KEY"),
                        FatalProviderError);
    }

    server.stop();
    server_thread.join();
}

TEST_CASE("throughput arithmetic: a full audit at 1.2 trials/s takes eight hours") {
    CHECK(estimate_run_seconds(34560, 1.2) == doctest::Approx(8.0 * 3600.0));
    CHECK_THROWS_AS(estimate_run_seconds(10, 0.0), ValidationError);
}

TEST_CASE("run config: JSON round trip with overrides") {
    const std::string text = R"({
        "instruction": "Custom instruction: answer with a score.",
        "temperature_scheme": [[0.0, 0.7], [0.5, 0.3]],
        "seed": 99,
        "boot": 500,
        "adjust": "by",
        "provider": {
            "kind": "synthetic",
            "model_id": "custom-model",
            "max_in_flight": 7,
            "retry": {"max_attempts": 5, "backoff_ms": [10, 20]},
            "bias": {"penalties": [{"ethnicity": "Turkish", "shift": -1.5}]}
        },
        "reference_levels": {"ethnicity": "WhiteAmerican", "experience": "none"}
    })";
    const RunConfig cfg = RunConfig::from_json_text(text, "inline");
    CHECK(cfg.instruction == "Custom instruction: answer with a score.");
    CHECK(cfg.scheme.entries.size() == 2);
    CHECK(cfg.seed == 99);
    CHECK(cfg.bootstrap_replications == 500);
    CHECK(cfg.adjust_method == "by");
    CHECK(cfg.provider.model_id == "custom-model");
    CHECK(cfg.provider.max_in_flight == 7);
    CHECK(cfg.provider.retry.max_attempts == 5);
    REQUIRE(cfg.provider.bias.penalties.size() == 1);
    CHECK(cfg.provider.bias.penalties[0].ethnicity == Ethnicity::Turkish);
    CHECK(cfg.provider.bias.penalties[0].shift == -1.5);
    // base mixture untouched: still the calibrated default
    CHECK(cfg.provider.bias.base.size() == 5);
    CHECK(cfg.references.ethnicity == "WhiteAmerican");
    CHECK(cfg.references.other.at("experience") == "none");

    // digest reacts to scoring-relevant fields only
    RunConfig a = cfg, b = cfg;
    b.provider.bias.penalties[0].shift = -2.0;
    CHECK(a.scoring_digest() != b.scoring_digest());
    b = cfg;
    b.bootstrap_replications = 1234;
    CHECK(a.scoring_digest() == b.scoring_digest());

    CHECK_THROWS_AS(RunConfig::from_json_text("{nope", "inline"), ValidationError);
    CHECK_THROWS_AS(
        RunConfig::from_json_text(R"({"temperature_scheme": [[0.0, 0.5]]})", "inline"),
        ValidationError);
}

TEST_CASE("store: creating over an existing log is refused") {
    TempDir dir;
    RunManifest m{"p", "c", "m", "cfg"};
    { RunLog log = RunLog::create(dir / "log.jsonl", m); }
    CHECK_THROWS_WITH_AS(RunLog::create(dir / "log.jsonl", m), doctest::Contains("already exists"),
                         IoError);
}
