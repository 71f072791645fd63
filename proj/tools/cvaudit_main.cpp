// cvaudit — correspondence-audit harness for LLM-based CV screening.
//
// Subcommands: gen-corpus, design, run, estimate, sweep, report. Each stage
// reads the previous stage's artifact, so a full audit is
//   gen-corpus -> design -> run -> estimate / sweep / report
// and every stage is reproducible from its inputs and an explicit seed.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvaudit/config.hpp"
#include "cvaudit/report.hpp"
#include "cvaudit/runner.hpp"
#include "cvaudit/stats/adjust.hpp"
#include "cvaudit/stats/bootstrap.hpp"
#include "cvaudit/stats/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cvaudit;

namespace {

struct Common {
    std::string config_path;
    RunConfig config;

    void load() {
        if (!config_path.empty()) config = RunConfig::load(config_path);
    }
};

Corpus load_corpus_for(const std::string& corpus_dir, const std::string& names_override) {
    const fs::path dir(corpus_dir);
    const fs::path names = names_override.empty() ? dir / "names.csv" : fs::path(names_override);
    return load_corpus(dir / "vacancies.jsonl", dir / "cvs.jsonl", names);
}

stats::Table table_for(const std::string& obs_path, const std::string& corpus_dir,
                       const std::string& names_override) {
    const Corpus corpus = load_corpus_for(corpus_dir, names_override);
    const auto observations = read_observations(obs_path);
    return stats::build_table(observations, corpus);
}

void write_fit_json(const stats::FitResult& fit, const std::string& model,
                    const std::string& adjust, const stats::ReferenceLevels& refs,
                    const fs::path& out) {
    json coeffs = json::object();
    for (size_t i = 0; i < fit.labels.size(); ++i) {
        const auto j = static_cast<Eigen::Index>(i);
        json entry{{"estimate", fit.coef[j]}};
        if (fit.se.size() > j) entry["se"] = fit.se[j];
        if (fit.p_raw.size() > j) entry["p_raw"] = fit.p_raw[j];
        if (fit.p_adjusted.size() > j && !std::isnan(fit.p_adjusted[j]))
            entry["p_adjusted"] = fit.p_adjusted[j];
        coeffs[fit.labels[i]] = entry;
    }
    json doc{{"model", model},
             {"n", fit.n},
             {"r2", fit.r2},
             {"r2_adj", fit.r2_adj},
             {"aic", fit.aic},
             {"bic", fit.bic},
             {"se_method", fit.se_method},
             {"adjust_method", adjust},
             {"bootstrap_replications", fit.bootstrap_replications},
             {"reference_levels",
              json{{"ethnicity", refs.ethnicity}, {"gender", refs.gender}}},
             {"coefficients", coeffs}};
    std::ofstream f(out);
    if (!f) throw IoError("cannot write " + out.string());
    f << doc.dump(2) << "\n";
}

bool parse_cutoff_range(const std::string& s, int& lo, int& hi) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) return false;
    try {
        lo = std::stoi(s.substr(0, dots));
        hi = std::stoi(s.substr(dots + 2));
    } catch (...) {
        return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"correspondence-audit harness for LLM CV screening"};
    app.require_subcommand(1);

    Common common;
    app.add_option("--config", common.config_path, "JSON config file (flags override it)");

    // ---- gen-corpus ----
    auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic corpus");
    std::string gen_out = "corpus";
    int gen_vacancies = 1920;
    int gen_names_per_cell = 4;
    uint64_t gen_seed = 0;
    bool gen_seed_set = false;
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--vacancies", gen_vacancies, "number of vacancies");
    gen->add_option("--names-per-cell", gen_names_per_cell, "names per identity cell");
    gen->add_option("--seed", gen_seed, "generator seed")->each([&](const std::string&) {
        gen_seed_set = true;
    });

    // ---- design ----
    auto* design_cmd = app.add_subcommand("design", "build the experiment plan");
    std::string design_corpus = "corpus", design_names, design_out = "plan.jsonl";
    uint64_t design_seed = 0;
    bool design_seed_set = false;
    design_cmd->add_option("--corpus", design_corpus, "corpus directory");
    design_cmd->add_option("--names", design_names, "names.csv override");
    design_cmd->add_option("--out", design_out, "plan output path");
    design_cmd->add_option("--seed", design_seed, "master seed")->each([&](const std::string&) {
        design_seed_set = true;
    });

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "execute the plan against a provider");
    std::string run_plan = "plan.jsonl", run_corpus = "corpus", run_names, run_out = "obs.jsonl";
    std::string run_provider, run_replay_log, run_model;
    uint64_t run_seed = 0;
    bool run_seed_set = false;
    int run_in_flight = 0;
    run_cmd->add_option("--plan", run_plan, "plan path");
    run_cmd->add_option("--corpus", run_corpus, "corpus directory");
    run_cmd->add_option("--names", run_names, "names.csv override");
    run_cmd->add_option("--out", run_out, "observation log path (resumes if present)");
    run_cmd->add_option("--provider", run_provider, "http|synthetic|replay");
    run_cmd->add_option("--replay-log", run_replay_log, "prior obs.jsonl for replay");
    run_cmd->add_option("--model", run_model, "model identifier (http)");
    run_cmd->add_option("--max-in-flight", run_in_flight, "concurrent requests");
    run_cmd->add_option("--seed", run_seed, "synthetic provider seed")
        ->each([&](const std::string&) { run_seed_set = true; });

    // ---- estimate ----
    auto* est = app.add_subcommand("estimate", "fit a score regression with bootstrap SEs");
    std::string est_obs = "obs.jsonl", est_corpus = "corpus", est_names, est_out = "fit.json";
    std::string est_model = "eq1", est_adjust, est_export, est_by;
    int est_boot = 0;
    uint64_t est_seed = 0;
    bool est_seed_set = false;
    est->add_option("--obs", est_obs, "observation log");
    est->add_option("--corpus", est_corpus, "corpus directory");
    est->add_option("--names", est_names, "names.csv override");
    est->add_option("--out", est_out, "fit output path");
    est->add_option("--model", est_model, "eq1|eq2|eq3|eq4|eq5");
    est->add_option("--by", est_by,
                    "comma-separated job covariates interacted in eq4/eq5 (e.g. hours,shift)");
    est->add_option("--boot", est_boot, "bootstrap replications");
    est->add_option("--adjust", est_adjust, "holm|bh|by");
    est->add_option("--export", est_export, "also write the analysis table CSV here");
    est->add_option("--seed", est_seed, "bootstrap seed")->each([&](const std::string&) {
        est_seed_set = true;
    });

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "cutoff sweep of penalized logits");
    std::string sweep_obs = "obs.jsonl", sweep_corpus = "corpus", sweep_names,
                sweep_out = "sweep.csv", sweep_cutoffs = "1..100";
    bool sweep_pooled = false;
    sweep_cmd->add_option("--obs", sweep_obs, "observation log");
    sweep_cmd->add_option("--corpus", sweep_corpus, "corpus directory");
    sweep_cmd->add_option("--names", sweep_names, "names.csv override");
    sweep_cmd->add_option("--out", sweep_out, "sweep CSV path");
    sweep_cmd->add_option("--cutoffs", sweep_cutoffs, "cutoff range A..B");
    sweep_cmd->add_flag("--pooled", sweep_pooled, "pool non-reference ethnicities");

    // ---- report ----
    auto* rep = app.add_subcommand("report", "emit figure/table analogs (CSV + SVG)");
    std::string rep_obs = "obs.jsonl", rep_corpus = "corpus", rep_names, rep_out = "report";
    int rep_boot = 0, rep_cutoff = 0;
    uint64_t rep_seed = 0;
    bool rep_seed_set = false;
    rep->add_option("--obs", rep_obs, "observation log");
    rep->add_option("--corpus", rep_corpus, "corpus directory");
    rep->add_option("--names", rep_names, "names.csv override");
    rep->add_option("--out", rep_out, "report directory");
    rep->add_option("--boot", rep_boot, "bootstrap replications for the MEM plot");
    rep->add_option("--cutoff", rep_cutoff, "invitation cutoff for the name table");
    rep->add_option("--seed", rep_seed, "bootstrap seed")->each([&](const std::string&) {
        rep_seed_set = true;
    });

    CLI11_PARSE(app, argc, argv);

    try {
        common.load();
        RunConfig& cfg = common.config;

        if (gen->parsed()) {
            CorpusConfig cc = CorpusConfig::defaults();
            cc.n_vacancies = gen_vacancies;
            cc.names_per_cell = gen_names_per_cell;
            const Corpus corpus =
                generate_synthetic_corpus(cc, gen_seed_set ? gen_seed : cfg.seed);
            save_corpus_dir(corpus, gen_out);
            std::cout << "wrote " << corpus.vacancies.size() << " vacancies, "
                      << corpus.cvs.size() << " CVs, " << corpus.names.size() << " names to "
                      << gen_out << "\n";
        } else if (design_cmd->parsed()) {
            const Corpus corpus = load_corpus_for(design_corpus, design_names);
            const auto plan =
                build_plan(corpus, cfg.scheme, design_seed_set ? design_seed : cfg.seed);
            save_plan(plan, design_out);
            std::cout << "wrote " << plan.trials.size() << " trials to " << design_out << "\n";
        } else if (run_cmd->parsed()) {
            const Corpus corpus = load_corpus_for(run_corpus, run_names);
            const ExperimentPlan plan = load_plan(run_plan);
            if (plan.corpus_digest != corpus.digest())
                throw ValidationError("corpus digest mismatch: the plan was built from a "
                                      "different corpus");
            ProviderConfig pc = cfg.provider;
            if (!run_provider.empty()) {
                if (run_provider == "http") pc.kind = ProviderKind::Http;
                else if (run_provider == "synthetic") pc.kind = ProviderKind::Synthetic;
                else if (run_provider == "replay") pc.kind = ProviderKind::Replay;
                else throw ValidationError("unknown provider '" + run_provider + "'");
            }
            if (!run_replay_log.empty()) pc.replay_log = run_replay_log;
            if (!run_model.empty()) pc.model_id = run_model;
            if (run_in_flight > 0) pc.max_in_flight = run_in_flight;
            // precedence: --seed flag, then provider.run_seed from config,
            // then the top-level seed
            if (run_seed_set)
                pc.run_seed = run_seed;
            else if (pc.run_seed == 0)
                pc.run_seed = cfg.seed;

            RunConfig manifest_cfg = cfg;
            manifest_cfg.provider = pc;
            RunManifest manifest{plan.digest(), corpus.digest(), pc.model_id,
                                 manifest_cfg.scoring_digest()};
            RunLog log = RunLog::exists(run_out) ? RunLog::open_resume(run_out, manifest)
                                                 : RunLog::create(run_out, manifest);
            RunOptions opts;
            opts.instruction = cfg.instruction;
            opts.refusal_lexicon = cfg.refusal_lexicon;
            const RunStats st = execute_plan(plan, corpus, pc, log, opts);
            std::cout << "executed " << st.attempted << " trials (" << st.scored << " scored, "
                      << st.failed << " failed, " << st.skipped << " already done); log "
                      << run_out << "\n";
        } else if (est->parsed()) {
            const stats::Table table = table_for(est_obs, est_corpus, est_names);
            auto kind = stats::parse_model_kind(est_model);
            if (!kind) throw ValidationError("unknown model '" + est_model + "'");
            stats::ModelSpec spec;
            spec.kind = *kind;
            if (!est_by.empty()) {
                spec.interact_with.clear();
                std::string item;
                for (char ch : est_by + ",") {
                    if (ch == ',') {
                        if (!item.empty()) spec.interact_with.push_back(item);
                        item.clear();
                    } else {
                        item.push_back(ch);
                    }
                }
            }
            const stats::DesignMatrix design = stats::build_design(table, spec, cfg.references);
            stats::FitResult fit = stats::fit_ols(design);
            stats::BootstrapOptions bopt;
            bopt.replications = est_boot > 0 ? est_boot : cfg.bootstrap_replications;
            bopt.seed = est_seed_set ? est_seed : cfg.seed;
            stats::wild_cluster_bootstrap(fit, design, bopt);
            const std::string adjust = est_adjust.empty() ? cfg.adjust_method : est_adjust;
            auto method = stats::parse_adjust_method(adjust);
            if (!method) throw ValidationError("unknown adjustment '" + adjust + "'");
            // The correction family is the identity contrasts (ethnicity,
            // gender and their interactions); controls keep raw p-values.
            std::vector<size_t> family;
            std::vector<double> praw;
            for (size_t i = 0; i < design.columns.size(); ++i) {
                const auto& col = design.columns[i];
                if (col.involves("ethnicity") || col.involves("gender") ||
                    col.involves("minority")) {
                    family.push_back(i);
                    praw.push_back(fit.p_raw[static_cast<Eigen::Index>(i)]);
                }
            }
            const auto adj = stats::adjust_pvalues(praw, *method);
            fit.p_adjusted = Eigen::VectorXd::Constant(design.p(), std::nan(""));
            for (size_t k = 0; k < family.size(); ++k)
                fit.p_adjusted[static_cast<Eigen::Index>(family[k])] = adj[k];
            fit.adjust_method = adjust;
            write_fit_json(fit, est_model, adjust, cfg.references, est_out);
            if (!est_export.empty()) {
                const Corpus corpus = load_corpus_for(est_corpus, est_names);
                write_csv(export_table(fs::path(est_obs), corpus, {.complete_cases = true}),
                          est_export);
            }
            std::cout << "wrote " << est_out << " (n=" << fit.n << ", model " << est_model
                      << ", " << bopt.replications << " bootstrap replications)\n";
        } else if (sweep_cmd->parsed()) {
            const stats::Table table = table_for(sweep_obs, sweep_corpus, sweep_names);
            stats::SweepOptions opts;
            opts.references = cfg.references;
            opts.pool_minority = sweep_pooled;
            if (!parse_cutoff_range(sweep_cutoffs, opts.cutoff_lo, opts.cutoff_hi))
                throw ValidationError("bad cutoff range '" + sweep_cutoffs + "', expected A..B");
            const auto sweep = stats::threshold_sweep(table, opts);
            stats::write_sweep_csv(sweep, sweep_out);
            std::cout << "wrote " << sweep.cells.size() << " sweep rows to " << sweep_out << "\n";
        } else if (rep->parsed()) {
            const Corpus corpus = load_corpus_for(rep_corpus, rep_names);
            const auto observations = read_observations(rep_obs);
            const stats::Table table = stats::build_table(observations, corpus);
            ReportOptions opts;
            opts.bootstrap_replications = rep_boot > 0 ? rep_boot : 500;
            opts.seed = rep_seed_set ? rep_seed : cfg.seed;
            opts.invitation_cutoff = rep_cutoff > 0 ? rep_cutoff : cfg.report_cutoff;
            write_report(table, rep_out, opts);
            write_csv(export_table(observations, corpus, {.complete_cases = false}),
                      fs::path(rep_out) / "export.csv");
            std::cout << "wrote report to " << rep_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
