#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "helpers.hpp"

using cvaudit::test::TempDir;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CVAUDIT_BIN) + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

size_t line_count(const std::filesystem::path& p) {
    std::ifstream in(p);
    size_t n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

}  // namespace

TEST_CASE("cli: full synthetic audit pipeline") {
    TempDir dir;
    const std::string d = dir.path().string();

    REQUIRE(run_cli("gen-corpus --out " + d + "/corpus --vacancies 50 --seed 7") == 0);
    REQUIRE(std::filesystem::exists(dir / "corpus/vacancies.jsonl"));
    REQUIRE(std::filesystem::exists(dir / "corpus/cvs.jsonl"));
    REQUIRE(std::filesystem::exists(dir / "corpus/names.csv"));

    REQUIRE(run_cli("design --corpus " + d + "/corpus --seed 11 --out " + d + "/plan.jsonl") == 0);
    CHECK(line_count(dir / "plan.jsonl") == 1 + 50 * 18);

    REQUIRE(run_cli("run --plan " + d + "/plan.jsonl --corpus " + d +
                    "/corpus --provider synthetic --seed 13 --out " + d + "/obs.jsonl") == 0);
    CHECK(line_count(dir / "obs.jsonl") == 1 + 900);

    // design -> run(synthetic) -> estimate completes with 900 observations
    REQUIRE(run_cli("estimate --obs " + d + "/obs.jsonl --corpus " + d +
                    "/corpus --model eq1 --boot 200 --adjust holm --seed 17 --out " + d +
                    "/fit.json --export " + d + "/table.csv") == 0);
    const json fit = json::parse(slurp(dir / "fit.json"));
    CHECK(fit["n"] == 900);
    CHECK(fit["adjust_method"] == "holm");
    CHECK(fit["bootstrap_replications"] == 200);
    int eth_contrasts = 0;
    for (const auto& [label, entry] : fit["coefficients"].items()) {
        if (label.rfind("ethnicity=", 0) == 0) {
            ++eth_contrasts;
            CHECK(entry.contains("p_adjusted"));
            CHECK(entry.contains("se"));
        }
    }
    CHECK(eth_contrasts == 8);
    CHECK(line_count(dir / "table.csv") == 1 + 900);

    REQUIRE(run_cli("sweep --obs " + d + "/obs.jsonl --corpus " + d + "/corpus --out " + d +
                    "/sweep.csv") == 0);
    CHECK(line_count(dir / "sweep.csv") == 1 + 9 * 100);

    REQUIRE(run_cli("report --obs " + d + "/obs.jsonl --corpus " + d + "/corpus --boot 100 --out " +
                    d + "/report") == 0);
    for (const char* f :
         {"score_histogram.csv", "score_histogram.svg", "mem_ethnicity.csv", "mem_ethnicity.svg",
          "name_scores.csv", "name_scores.svg", "cutoff_curves.csv", "cutoff_curves.svg",
          "sweep_minority.csv", "export.csv"}) {
        CHECK(std::filesystem::exists(dir / "report" / f));
    }
}

TEST_CASE("cli: subcommands are idempotent given identical inputs and seeds") {
    TempDir dir;
    const std::string d = dir.path().string();
    REQUIRE(run_cli("gen-corpus --out " + d + "/c1 --vacancies 20 --seed 3") == 0);
    REQUIRE(run_cli("gen-corpus --out " + d + "/c2 --vacancies 20 --seed 3") == 0);
    CHECK(slurp(dir / "c1/vacancies.jsonl") == slurp(dir / "c2/vacancies.jsonl"));

    REQUIRE(run_cli("design --corpus " + d + "/c1 --seed 5 --out " + d + "/p1.jsonl") == 0);
    REQUIRE(run_cli("design --corpus " + d + "/c1 --seed 5 --out " + d + "/p2.jsonl") == 0);
    CHECK(slurp(dir / "p1.jsonl") == slurp(dir / "p2.jsonl"));

    REQUIRE(run_cli("run --plan " + d + "/p1.jsonl --corpus " + d +
                    "/corpus --provider synthetic --seed 9 --out " + d + "/o1.jsonl") != 0);
    // ^ wrong corpus directory: the digest check must fail fast

    REQUIRE(run_cli("run --plan " + d + "/p1.jsonl --corpus " + d +
                    "/c1 --provider synthetic --seed 9 --out " + d + "/o1.jsonl") == 0);
    REQUIRE(run_cli("run --plan " + d + "/p1.jsonl --corpus " + d +
                    "/c1 --provider synthetic --seed 9 --out " + d + "/o2.jsonl") == 0);

    // byte-identical after stripping volatile timestamps
    auto strip_ts = [](const std::filesystem::path& p) {
        std::string out;
        std::ifstream in(p);
        std::string line;
        while (std::getline(in, line)) {
            json j = json::parse(line);
            j.erase("timestamp");
            out += j.dump() + "\n";
        }
        return out;
    };
    CHECK(strip_ts(dir / "o1.jsonl") == strip_ts(dir / "o2.jsonl"));

    REQUIRE(run_cli("estimate --obs " + d + "/o1.jsonl --corpus " + d +
                    "/c1 --model eq1 --boot 150 --adjust bh --seed 21 --out " + d + "/f1.json") == 0);
    REQUIRE(run_cli("estimate --obs " + d + "/o1.jsonl --corpus " + d +
                    "/c1 --model eq1 --boot 150 --adjust bh --seed 21 --out " + d + "/f2.json") == 0);
    CHECK(slurp(dir / "f1.json") == slurp(dir / "f2.json"));
}

TEST_CASE("cli: run resumes an interrupted log without re-execution") {
    TempDir dir;
    const std::string d = dir.path().string();
    REQUIRE(run_cli("gen-corpus --out " + d + "/c --vacancies 10 --seed 2") == 0);
    REQUIRE(run_cli("design --corpus " + d + "/c --seed 4 --out " + d + "/plan.jsonl") == 0);
    REQUIRE(run_cli("run --plan " + d + "/plan.jsonl --corpus " + d +
                    "/c --provider synthetic --seed 6 --out " + d + "/obs.jsonl") == 0);

    // truncate to simulate a crash after 40 observations
    const std::string full = slurp(dir / "obs.jsonl");
    size_t pos = 0;
    for (int i = 0; i < 41; ++i) pos = full.find('\n', pos) + 1;
    {
        std::ofstream out(dir / "obs.jsonl", std::ios::binary | std::ios::trunc);
        out << full.substr(0, pos);
    }
    CHECK(line_count(dir / "obs.jsonl") == 41);

    REQUIRE(run_cli("run --plan " + d + "/plan.jsonl --corpus " + d +
                    "/c --provider synthetic --seed 6 --out " + d + "/obs.jsonl") == 0);
    CHECK(line_count(dir / "obs.jsonl") == 1 + 180);

    auto strip_ts = [](const std::string& text) {
        std::string out;
        size_t start = 0;
        while (start < text.size()) {
            const size_t end = text.find('\n', start);
            json j = json::parse(text.substr(start, end - start));
            j.erase("timestamp");
            out += j.dump() + "\n";
            start = end + 1;
        }
        return out;
    };
    // resumed content equals the original uninterrupted run
    CHECK(strip_ts(slurp(dir / "obs.jsonl")) == strip_ts(full));
}

TEST_CASE("cli: sweep range flag and failure diagnostics") {
    TempDir dir;
    const std::string d = dir.path().string();
    REQUIRE(run_cli("gen-corpus --out " + d + "/c --vacancies 15 --seed 2") == 0);
    REQUIRE(run_cli("design --corpus " + d + "/c --seed 4 --out " + d + "/plan.jsonl") == 0);
    REQUIRE(run_cli("run --plan " + d + "/plan.jsonl --corpus " + d +
                    "/c --provider synthetic --seed 6 --out " + d + "/obs.jsonl") == 0);
    REQUIRE(run_cli("sweep --obs " + d + "/obs.jsonl --corpus " + d + "/c --cutoffs 55..70 --out " +
                    d + "/sweep.csv") == 0);
    CHECK(line_count(dir / "sweep.csv") == 1 + 9 * 16);

    CHECK(run_cli("estimate --obs " + d + "/missing.jsonl --corpus " + d + "/c --out " + d +
                  "/f.json") != 0);
    CHECK(run_cli("sweep --obs " + d + "/obs.jsonl --corpus " + d + "/c --cutoffs banana --out " +
                  d + "/s.csv") != 0);
    CHECK(run_cli("estimate --obs " + d + "/obs.jsonl --corpus " + d + "/c --model eq9 --out " + d +
                  "/f.json") != 0);
}

TEST_CASE("cli: extended models, pooled sweep and the adjustment family") {
    TempDir dir;
    const std::string d = dir.path().string();
    REQUIRE(run_cli("gen-corpus --out " + d + "/c --vacancies 200 --seed 12") == 0);
    REQUIRE(run_cli("design --corpus " + d + "/c --seed 13 --out " + d + "/plan.jsonl") == 0);
    REQUIRE(run_cli("run --plan " + d + "/plan.jsonl --corpus " + d +
                    "/c --provider synthetic --seed 14 --out " + d + "/obs.jsonl") == 0);

    REQUIRE(run_cli("estimate --obs " + d + "/obs.jsonl --corpus " + d +
                    "/c --model eq3 --boot 150 --adjust holm --seed 15 --out " + d +
                    "/fit3.json") == 0);
    const json fit = json::parse(slurp(dir / "fit3.json"));
    int interactions = 0, controls_adjusted = 0, identity_adjusted = 0;
    for (const auto& [label, entry] : fit["coefficients"].items()) {
        const bool identity = label.rfind("ethnicity=", 0) == 0 ||
                              label.rfind("gender=", 0) == 0 ||
                              label.find(":gender=") != std::string::npos;
        if (label.find(":gender=") != std::string::npos) ++interactions;
        if (entry.contains("p_adjusted")) {
            if (identity)
                ++identity_adjusted;
            else
                ++controls_adjusted;
        }
        if (identity && entry.contains("p_adjusted")) {
            // Holm never shrinks a p-value
            CHECK(entry["p_adjusted"].get<double>() >=
                  entry["p_raw"].get<double>() - 1e-12);
        }
    }
    CHECK(interactions == 8);
    CHECK(identity_adjusted == 8 + 1 + 8);  // ethnicity + gender + interactions
    CHECK(controls_adjusted == 0);          // intercept/temperature/job stay raw

    REQUIRE(run_cli("estimate --obs " + d + "/obs.jsonl --corpus " + d +
                    "/c --model eq4 --by hours --boot 150 --adjust bh --seed 16 --out " + d +
                    "/fit4.json") == 0);
    const json fit4 = json::parse(slurp(dir / "fit4.json"));
    int hour_interactions = 0;
    for (const auto& [label, entry] : fit4["coefficients"].items())
        if (label.find(":hours=") != std::string::npos) ++hour_interactions;
    CHECK(hour_interactions == 8);

    REQUIRE(run_cli("sweep --obs " + d + "/obs.jsonl --corpus " + d +
                    "/c --cutoffs 58..62 --pooled --out " + d + "/pooled.csv") == 0);
    std::ifstream in(dir / "pooled.csv");
    std::string line;
    std::getline(in, line);  // header
    int rows = 0;
    bool saw_yes = false;
    while (std::getline(in, line)) {
        ++rows;
        saw_yes = saw_yes || line.find(",yes,") != std::string::npos;
    }
    CHECK(rows == 2 * 5);
    CHECK(saw_yes);
}
