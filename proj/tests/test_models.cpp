#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include <fstream>

#include "cvaudit/stats/bootstrap.hpp"
#include "cvaudit/stats/sweep.hpp"
#include "helpers.hpp"

using namespace cvaudit;
using namespace cvaudit::stats;
using cvaudit::test::TempDir;

namespace {

Table small_table(int n_vacancies, uint64_t seed, const BiasModel& bias, TempDir& dir) {
    return cvaudit::test::run_synthetic_pipeline(n_vacancies, seed, bias, dir.path()).table;
}

size_t count_kind(const DesignMatrix& d, ColumnKind k) {
    size_t n = 0;
    for (const auto& c : d.columns) n += c.kind == k;
    return n;
}

}  // namespace

TEST_CASE("build_design: eq1 has intercept, 8 ethnicity dummies and temperature factor") {
    TempDir dir;
    const Table t = small_table(30, 100, BiasModel::calibrated(), dir);
    ModelSpec spec;
    spec.kind = ModelKind::Eq1;
    const DesignMatrix d = build_design(t, spec);
    CHECK(d.n() == 30 * 18);
    CHECK(d.factor_columns("ethnicity").size() == 8);
    CHECK(d.reference_levels.at("ethnicity") == "Dutch");
    // temperature enters as a factor over the observed support
    std::set<double> temps(t.temperature.begin(), t.temperature.end());
    CHECK(d.factor_columns("temperature").size() == temps.size() - 1);
    CHECK(d.p() == 1 + 8 + static_cast<Eigen::Index>(temps.size()) - 1);
    // deterministic column order
    const DesignMatrix d2 = build_design(t, spec);
    for (size_t i = 0; i < d.columns.size(); ++i) CHECK(d.columns[i].label == d2.columns[i].label);
}

TEST_CASE("build_design: eq2 adds gender and job covariates, eq3 adds identity x gender") {
    TempDir dir;
    const Table t = small_table(200, 101, BiasModel::calibrated(), dir);
    ModelSpec spec;
    spec.kind = ModelKind::Eq2;
    const DesignMatrix d2 = build_design(t, spec);
    CHECK(d2.factor_columns("gender").size() == 1);
    CHECK(d2.reference_levels.at("gender") == "male");
    CHECK(d2.factor_columns("occupation").size() >= 1);
    CHECK(d2.reference_levels.count("hours") == 1);

    spec.kind = ModelKind::Eq3;
    const DesignMatrix d3 = build_design(t, spec);
    size_t eth_female = 0;
    for (const auto& c : d3.columns) {
        if (c.kind == ColumnKind::Interaction && c.involves("ethnicity") && c.involves("gender"))
            ++eth_female;
    }
    CHECK(eth_female == 8);
    CHECK(d3.p() == d2.p() + 8);
}

TEST_CASE("build_design: eq4/eq5 add job-by-identity interactions") {
    TempDir dir;
    const Table t = small_table(60, 102, BiasModel::calibrated(), dir);
    ModelSpec spec;
    spec.kind = ModelKind::Eq4;
    spec.interact_with = {"hours"};
    const DesignMatrix d4 = build_design(t, spec);
    size_t inter = count_kind(d4, ColumnKind::Interaction);
    CHECK(inter == 8);  // 8 ethnicities x 1 non-reference hours level

    spec.kind = ModelKind::Eq5;
    const DesignMatrix d5 = build_design(t, spec);
    CHECK(count_kind(d5, ColumnKind::Interaction) == 1);  // female x part_time

    spec.interact_with = {"bogus"};
    CHECK_THROWS_AS(build_design(t, spec), EstimationError);
}

TEST_CASE("build_design: single-level factor contributes no columns") {
    TempDir dir;
    Table t = small_table(200, 103, BiasModel::calibrated(), dir);
    std::fill(t.job_type.begin(), t.job_type.end(), JobType::Permanent);
    ModelSpec spec;
    spec.kind = ModelKind::Eq2;
    const DesignMatrix d = build_design(t, spec);
    CHECK(d.factor_columns("job_type").empty());
    CHECK(d.reference_levels.at("job_type") == "permanent");
}

TEST_CASE("build_design: unknown reference level is rejected") {
    TempDir dir;
    const Table t = small_table(10, 104, BiasModel::calibrated(), dir);
    ModelSpec spec;
    ReferenceLevels refs;
    refs.ethnicity = "Flemish";
    CHECK_THROWS_WITH_AS(build_design(t, spec, refs), doctest::Contains("unknown reference level"),
                         ValidationError);
}

TEST_CASE("build_design: pooled minority factor") {
    TempDir dir;
    const Table t = small_table(15, 105, BiasModel::calibrated(), dir);
    ModelSpec spec;
    spec.pool_minority = true;
    const DesignMatrix d = build_design(t, spec);
    CHECK(d.factor_columns("minority").size() == 1);
    CHECK(d.columns[1].label == "minority=yes");
}

TEST_CASE("analysis table: complete cases only, cluster ids follow vacancies") {
    CorpusConfig cc = CorpusConfig::defaults();
    cc.n_vacancies = 3;
    const Corpus corpus = generate_synthetic_corpus(cc, 200);
    std::vector<Observation> obs;
    for (int i = 0; i < 3; ++i) {
        Observation o;
        o.trial_id = "t" + std::to_string(i);
        o.vacancy_id = corpus.vacancies[static_cast<size_t>(i)].id;
        o.ethnicity = Ethnicity::Dutch;
        o.gender = Gender::Male;
        o.first = "A";
        o.last = "B";
        o.temperature = 0.0;
        if (i == 1) {
            o.missing_reason = "refusal";
        } else {
            o.score = 60 + i;
        }
        o.attempt_count = 1;
        obs.push_back(o);
    }
    const Table t = build_table(obs, corpus);
    REQUIRE(t.n() == 2);  // the refusal is excluded listwise
    CHECK(t.cluster[0] == 0);
    CHECK(t.cluster[1] == 2);
    CHECK(t.score[1] == 62.0);
}

TEST_CASE("threshold sweep: floor cutoff is degenerate with unit ratios") {
    TempDir dir;
    const Table t = small_table(25, 106, BiasModel::calibrated(), dir);
    SweepOptions opts;
    opts.cutoff_lo = 1;
    opts.cutoff_hi = 1;
    const SweepResult s = threshold_sweep(t, opts);
    REQUIRE(s.cells.size() == 9);
    for (const auto& c : s.cells) {
        CHECK(c.probability == 1.0);
        CHECK(c.odds_ratio == 1.0);
        CHECK(c.dr == 1.0);
        CHECK(c.degenerate);
    }
}

TEST_CASE("threshold sweep: emits one row per group per cutoff across 1..100") {
    TempDir dir;
    const Table t = small_table(60, 107, BiasModel::calibrated(), dir);
    const SweepResult s = threshold_sweep(t);
    CHECK(s.cells.size() == 9 * 100);
    std::map<std::string, int> rows_per_group;
    for (const auto& c : s.cells) ++rows_per_group[c.group];
    REQUIRE(rows_per_group.size() == 9);
    for (const auto& [g, n] : rows_per_group) CHECK(n == 100);

    // DR = 1 whenever OR = 1 (reference rows), probabilities in [0,1],
    // Wald intervals bracket their point estimates
    for (const auto& c : s.cells) {
        CHECK(c.probability >= 0.0);
        CHECK(c.probability <= 1.0);
        if (c.odds_ratio == 1.0) CHECK(c.dr == 1.0);
        CHECK(c.ci_lo <= c.probability + 1e-12);
        CHECK(c.probability <= c.ci_hi + 1e-12);
        CHECK(c.dr_lo <= c.dr + 1e-12);
        CHECK(c.dr <= c.dr_hi + 1e-12);
    }

    const SweepCell* dutch60 = s.cell(60, "Dutch");
    REQUIRE(dutch60);
    CHECK(dutch60->probability > 0.5);

    TempDir out;
    write_sweep_csv(s, out / "sweep.csv");
    std::ifstream in(out / "sweep.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "cutoff,group,probability,ci_lo,ci_hi,or,dr,dr_lo,dr_hi,degenerate");
}

TEST_CASE("threshold sweep: pooled minority gives a single comparison curve") {
    TempDir dir;
    const Table t = small_table(40, 108, BiasModel::calibrated(), dir);
    SweepOptions opts;
    opts.pool_minority = true;
    opts.cutoff_lo = 55;
    opts.cutoff_hi = 65;
    const SweepResult s = threshold_sweep(t, opts);
    CHECK(s.cells.size() == 2 * 11);
    for (const auto& c : s.cells) CHECK((c.group == "no" || c.group == "yes"));
}

TEST_CASE("threshold sweep: partial group separation is fitted and flagged") {
    TempDir dir;
    Table t = small_table(20, 109, BiasModel::null_model(), dir);
    // Force one group to be all-ones at cutoff 60: every Dutch score to 90.
    for (size_t i = 0; i < t.n(); ++i)
        if (t.ethnicity[i] == Ethnicity::Dutch) t.score[i] = 90;
    SweepOptions opts;
    opts.cutoff_lo = 60;
    opts.cutoff_hi = 60;
    const SweepResult s = threshold_sweep(t, opts);
    REQUIRE(s.cells.size() == 9);
    const SweepCell* dutch = s.cell(60, "Dutch");
    REQUIRE(dutch);
    CHECK(dutch->degenerate);
    CHECK(dutch->probability > 0.9);
    CHECK(std::isfinite(dutch->probability));
    for (const auto& c : s.cells) {
        CHECK(std::isfinite(c.odds_ratio));
        CHECK(std::isfinite(c.dr));
    }
}

TEST_CASE("estimation pipeline: eq1 fit carries the model statistics") {
    TempDir dir;
    const Table t = small_table(80, 110, BiasModel::calibrated(), dir);
    ModelSpec spec;
    const DesignMatrix d = build_design(t, spec);
    FitResult fit = fit_ols(d);
    CHECK(fit.n == static_cast<Eigen::Index>(t.n()));
    CHECK(fit.r2 >= 0.0);
    CHECK(fit.r2 <= 1.0);
    CHECK(fit.aic < fit.bic);  // k log n > 2k at n = 1440

    BootstrapOptions bopt;
    bopt.replications = 100;
    bopt.seed = 9;
    wild_cluster_bootstrap(fit, d, bopt);
    CHECK(fit.se.size() == d.p());
    for (Eigen::Index j = 0; j < d.p(); ++j) {
        CHECK(fit.p_raw[j] >= 0.0);
        CHECK(fit.p_raw[j] <= 1.0);
    }
}

TEST_CASE("full audit scale: 1,920 vacancies give a 34,560-row principal design") {
    TempDir dir;
    const auto pipe =
        cvaudit::test::run_synthetic_pipeline(1920, 777, BiasModel::calibrated(), dir.path());
    REQUIRE(pipe.plan.trials.size() == 34560);
    REQUIRE(pipe.table.n() == 34560);

    ModelSpec spec;
    const DesignMatrix d = build_design(pipe.table, spec);
    CHECK(d.n() == 34560);
    CHECK(d.factor_columns("ethnicity").size() == 8);
    CHECK(d.factor_columns("temperature").size() == 6);  // 7 levels, reference dropped
    CHECK(d.p() == 1 + 8 + 6);

    FitResult fit = fit_ols(d);
    CHECK(fit.n == 34560);
    // injected penalties order the group coefficients
    CHECK(fit.coef_of("ethnicity=WhiteAmerican") > fit.coef_of("ethnicity=EasternEuropean"));
    CHECK(fit.coef_of("ethnicity=EasternEuropean") == doctest::Approx(-2.4170).epsilon(0.25));
    CHECK(fit.r2 < 0.05);
}
