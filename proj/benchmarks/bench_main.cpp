#include <benchmark/benchmark.h>

#include "cvaudit/prompting.hpp"
#include "cvaudit/provider.hpp"
#include "cvaudit/stats/bootstrap.hpp"
#include "cvaudit/stats/firth.hpp"
#include "cvaudit/stats/sweep.hpp"

using namespace cvaudit;
using namespace cvaudit::stats;

namespace {

DesignMatrix clustered_design(int G, int m, uint64_t seed) {
    Rng rng(seed);
    DesignMatrix d;
    const int n = G * m;
    d.response.resize(n);
    d.X.resize(n, 12);
    d.columns.push_back({"intercept", ColumnKind::Intercept, {}});
    for (int j = 1; j < 12; ++j)
        d.columns.push_back({"x" + std::to_string(j), ColumnKind::Continuous, {}});
    int row = 0;
    for (int g = 0; g < G; ++g) {
        const double u = rng.next_gaussian();
        for (int i = 0; i < m; ++i, ++row) {
            d.X(row, 0) = 1.0;
            double eta = 1.0 + u;
            for (int j = 1; j < 12; ++j) {
                const double x = rng.next_gaussian();
                d.X(row, j) = x;
                eta += 0.1 * j * x;
            }
            d.response[row] = eta + rng.next_gaussian();
            d.cluster_ids.push_back(g);
        }
    }
    return d;
}

void BM_WildClusterBootstrap(benchmark::State& state) {
    const DesignMatrix d = clustered_design(200, 18, 1);
    FitResult base = fit_ols(d);
    BootstrapOptions opt;
    opt.replications = static_cast<int>(state.range(0));
    opt.seed = 2;
    for (auto _ : state) {
        FitResult fit = base;
        wild_cluster_bootstrap(fit, d, opt);
        benchmark::DoNotOptimize(fit.se);
    }
}
BENCHMARK(BM_WildClusterBootstrap)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FirthLogit(benchmark::State& state) {
    Rng rng(3);
    const int n = static_cast<int>(state.range(0));
    DesignMatrix d;
    d.response.resize(n);
    d.X.resize(n, 10);
    d.columns.push_back({"intercept", ColumnKind::Intercept, {}});
    for (int j = 1; j < 10; ++j)
        d.columns.push_back({"x" + std::to_string(j), ColumnKind::Continuous, {}});
    for (int i = 0; i < n; ++i) {
        d.X(i, 0) = 1.0;
        double eta = 0.2;
        for (int j = 1; j < 10; ++j) {
            const double x = rng.next_gaussian();
            d.X(i, j) = x;
            eta += 0.15 * x;
        }
        d.response[i] = rng.next_double() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
        d.cluster_ids.push_back(i);
    }
    for (auto _ : state) {
        const FitResult fit = fit_firth_logit(d);
        benchmark::DoNotOptimize(fit.coef);
    }
}
BENCHMARK(BM_FirthLogit)->Arg(3600)->Arg(36000)->Unit(benchmark::kMillisecond);

void BM_ParseScore(benchmark::State& state) {
    const std::string raw = "Based on the CV and the vacancy, Score: 78/100.";
    for (auto _ : state) {
        const auto out = parse_score(raw);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_ParseScore);

void BM_SyntheticScore(benchmark::State& state) {
    CorpusConfig cc = CorpusConfig::defaults();
    cc.n_vacancies = 1;
    const Corpus corpus = generate_synthetic_corpus(cc, 4);
    const BiasModel model = BiasModel::calibrated();
    Trial t;
    t.trial_id = "bench";
    t.vacancy_id = corpus.vacancies[0].id;
    t.ethnicity = Ethnicity::EasternEuropean;
    t.gender = Gender::Female;
    Rng rng(5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthetic_score(t, corpus.vacancies[0], model, rng));
    }
}
BENCHMARK(BM_SyntheticScore);

void BM_BuildPlan(benchmark::State& state) {
    CorpusConfig cc = CorpusConfig::defaults();
    cc.n_vacancies = static_cast<int>(state.range(0));
    const Corpus corpus = generate_synthetic_corpus(cc, 6);
    for (auto _ : state) {
        const auto plan = build_plan(corpus, TemperatureScheme::defaults(), 7);
        benchmark::DoNotOptimize(plan.trials.size());
    }
}
BENCHMARK(BM_BuildPlan)->Arg(1920)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
