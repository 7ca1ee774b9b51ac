#include <doctest.h>

#include <cmath>
#include <string>

#include "helpers.hpp"
#include "ivlate/csv.hpp"
#include "ivlate/json_io.hpp"

#ifdef IVLATE_CLI_PATH

using testutil::run_cli;
using testutil::slurp;
using testutil::TempDir;
using testutil::write_text;
using ivlate::json_io::ordered_json;
using ivlate::json_io::parse_text;

namespace {

// simulator settings with an exogenous instrument: OLS drifts to 0.75,
// the instrumented fit recovers 0.5
std::string production_config(const std::string& out_dir, int n) {
    return std::string(R"({
  "mode": "production-demo",
  "seed": 21,
  "out_dir": ")") +
           out_dir + R"(",
  "production": {
    "beta0": 1.0, "beta1": 0.5, "beta2": 0.0,
    "p_price": 1.0, "sigma_eps": 1.0, "mu_logw": 3.0,
    "delta_w": 0.0, "sigma_u": 1.0, "urban_share": 0.5,
    "n": )" + std::to_string(n) +
           "\n  }\n}\n";
}

std::string trial_config(const std::string& out_dir, int n) {
    return std::string(R"({
  "mode": "trial-analysis",
  "seed": 9,
  "out_dir": ")") +
           out_dir + R"(",
  "trial": {
    "shares": {"pi_a": 0.2, "pi_n": 0.3, "pi_c": 0.5},
    "p_a1": 0.6, "p_n0": 0.4, "p_c1": 0.7, "p_c0": 0.5,
    "z_share": 0.5,
    "n": )" + std::to_string(n) +
           R"(
  },
  "gibbs": {"n_draws": 400, "burn_in": 200},
  "rectangle": {"m_a0": [0.5, 0.7], "m_n1": [0.3, 0.5]}
})";
}

const char* kHandDrawsCsv =
    "pi_a,pi_n,pi_c,p_a1,p_n0,p_c1,p_c0\n"
    "0.2,0.3,0.5,0.6,0.4,0.7,0.5\n";

std::string decide_config(const std::string& out_dir, double cost) {
    return std::string(R"({
  "mode": "trial-analysis",
  "out_dir": ")") +
           out_dir + R"(",
  "welfare": {"cost": )" + ivlate::csv::format_double(cost) +
           R"(},
  "rectangle": {"m_a0": [0.5, 0.7], "m_n1": [0.3, 0.5]}
})";
}

}  // namespace

TEST_CASE("validate accepts a complete config") {
    TempDir dir("cli-validate");
    write_text(dir.path / "config.json", trial_config((dir.path / "out").string(), 100));
    std::string out, err;
    const int code = run_cli("validate " + (dir.path / "config.json").string(), dir.path, &out, &err);
    CHECK(code == 0);
    CHECK(out == "ok\n");
    CHECK(err.empty());
}

TEST_CASE("validate lists diagnostics and signals a config error") {
    TempDir dir("cli-validate-bad");
    write_text(dir.path / "config.json", R"({"mode": "trial-analysis", "seed": -1})");
    std::string out, err;
    const int code = run_cli("validate " + (dir.path / "config.json").string(), dir.path, &out, &err);
    CHECK(code == 2);
    CHECK(out.find("config.seed: expected a nonnegative integer") != std::string::npos);
    CHECK(err.find("ConfigError:") == 0);
    CHECK(err.find("problems found") != std::string::npos);
}

TEST_CASE("production run separates the naive and instrumented slopes") {
    TempDir dir("cli-prod");
    const std::string out_dir = (dir.path / "out").string();
    write_text(dir.path / "config.json", production_config(out_dir, 100000));
    std::string err;
    const int code = run_cli("run " + (dir.path / "config.json").string(), dir.path, nullptr, &err);
    REQUIRE_MESSAGE(code == 0, err);

    const ordered_json report = parse_text(slurp(dir.path / "out" / "report.json"));
    CHECK(report["mode"] == "production-demo");
    CHECK(report["seed"] == 21);
    const ordered_json& prod = report["production"];
    CHECK(prod["n"] == 100000);
    CHECK(prod["true_slope"] == 0.5);
    const double ols = prod["ols"]["coefficients"][1].get<double>();
    const double tsls = prod["tsls"]["coefficients"][1].get<double>();
    const double plim = prod["ols_plim_oracle"].get<double>();
    CHECK(plim == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(std::fabs(ols - plim) < 0.02);
    CHECK(std::fabs(tsls - 0.5) < 0.02);
    CHECK(std::filesystem::exists(dir.path / "out" / "sample.csv"));
    CHECK_FALSE(std::filesystem::exists(dir.path / "out" / "draws.csv"));
}

TEST_CASE("trial run writes estimates, draws, and a treat-all decision") {
    TempDir dir("cli-trial");
    const std::string out_dir = (dir.path / "out").string();
    write_text(dir.path / "config.json", trial_config(out_dir, 20000));
    std::string err;
    const int code = run_cli("run " + (dir.path / "config.json").string(), dir.path, nullptr, &err);
    REQUIRE_MESSAGE(code == 0, err);

    const ordered_json report = parse_text(slurp(dir.path / "out" / "report.json"));
    CHECK(report["mode"] == "trial-analysis");
    const ordered_json& trial = report["trial"];
    CHECK(trial["n"] == 20000);
    CHECK(trial["estimates"]["pi_c"].get<double>() == doctest::Approx(0.5).epsilon(0.04));
    CHECK(trial["wald"].get<double>() == doctest::Approx(0.2).epsilon(0.5));
    REQUIRE_FALSE(trial["posterior"].is_null());
    CHECK(trial["posterior"]["n_draws"] == 400);
    CHECK(trial["decision"]["rules"]["gamma_minimax"]["action"] == "treat_all");
    CHECK(trial["decision"]["inputs"]["posterior_digest"] != "0x0");

    for (const char* name : {"report.json", "draws.csv", "sample.csv", "sensitivity.csv"}) {
        CHECK_MESSAGE(std::filesystem::exists(dir.path / "out" / name), name);
    }
}

TEST_CASE("deterministic runs are byte-identical") {
    TempDir dir("cli-determ");
    write_text(dir.path / "config.json", trial_config((dir.path / "out").string(), 2000));
    const std::string base = "run " + (dir.path / "config.json").string() + " --deterministic";
    REQUIRE(run_cli(base + " --out " + (dir.path / "a").string(), dir.path) == 0);
    REQUIRE(run_cli(base + " --out " + (dir.path / "b").string(), dir.path) == 0);
    CHECK(slurp(dir.path / "a" / "report.json") == slurp(dir.path / "b" / "report.json"));
    CHECK(slurp(dir.path / "a" / "draws.csv") == slurp(dir.path / "b" / "draws.csv"));
    CHECK(slurp(dir.path / "a" / "report.json").find("generated_at") == std::string::npos);
}

TEST_CASE("the seed override changes the simulated data") {
    TempDir dir("cli-seed");
    write_text(dir.path / "config.json", trial_config((dir.path / "out").string(), 500));
    const std::string base = "run " + (dir.path / "config.json").string();
    REQUIRE(run_cli(base + " --seed 1 --out " + (dir.path / "a").string(), dir.path) == 0);
    REQUIRE(run_cli(base + " --seed 2 --out " + (dir.path / "b").string(), dir.path) == 0);
    REQUIRE(run_cli(base + " --seed 1 --out " + (dir.path / "c").string(), dir.path) == 0);
    CHECK(slurp(dir.path / "a" / "sample.csv") != slurp(dir.path / "b" / "sample.csv"));
    CHECK(slurp(dir.path / "a" / "sample.csv") == slurp(dir.path / "c" / "sample.csv"));
}

TEST_CASE("simulate writes samples and nothing else") {
    TempDir dir("cli-simulate");
    write_text(dir.path / "config.json", trial_config((dir.path / "out").string(), 300));
    std::string err;
    REQUIRE(run_cli("simulate " + (dir.path / "config.json").string(), dir.path, nullptr, &err) == 0);
    CHECK(std::filesystem::exists(dir.path / "out" / "sample.csv"));
    CHECK_FALSE(std::filesystem::exists(dir.path / "out" / "report.json"));
    CHECK_FALSE(std::filesystem::exists(dir.path / "out" / "draws.csv"));
}

TEST_CASE("simulate has nothing to do for file-backed trials") {
    TempDir dir("cli-simulate-file");
    write_text(dir.path / "trial.csv", "z,d,y\n1,1,1\n0,0,0\n");
    const std::string cfg = std::string(R"({
  "mode": "trial-analysis",
  "out_dir": ")") + (dir.path / "out").string() + R"(",
  "trial_data": ")" + (dir.path / "trial.csv").string() + R"(",
  "rectangle": {"m_a0": [0.4, 0.6], "m_n1": [0.4, 0.6]}
})";
    write_text(dir.path / "config.json", cfg);
    std::string err;
    REQUIRE(run_cli("simulate " + (dir.path / "config.json").string(), dir.path, nullptr, &err) == 0);
    CHECK(err.find("nothing to simulate") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir.path / "out" / "sample.csv"));
}

TEST_CASE("decide reuses stored draws and honors the configured cost") {
    TempDir dir("cli-decide");
    write_text(dir.path / "draws.csv", kHandDrawsCsv);
    const std::string draws = (dir.path / "draws.csv").string();

    write_text(dir.path / "free.json", decide_config((dir.path / "out1").string(), 0.0));
    std::string err;
    REQUIRE(run_cli("decide " + (dir.path / "free.json").string() + " --draws " + draws, dir.path,
                    nullptr, &err) == 0);
    const ordered_json free_report = parse_text(slurp(dir.path / "out1" / "report.json"));
    CHECK(free_report["command"] == "decide");
    CHECK(free_report["n_draws"] == 1);
    CHECK(free_report["draws_file"] == draws);
    CHECK(free_report["decision"]["rules"]["gamma_minimax"]["action"] == "treat_all");
    CHECK(std::filesystem::exists(dir.path / "out1" / "sensitivity.csv"));

    // cost above the whole gain interval [0.05, 0.15] flips the call
    write_text(dir.path / "costly.json", decide_config((dir.path / "out2").string(), 0.2));
    REQUIRE(run_cli("decide " + (dir.path / "costly.json").string() + " --draws " + draws, dir.path,
                    nullptr, &err) == 0);
    const ordered_json costly = parse_text(slurp(dir.path / "out2" / "report.json"));
    CHECK(costly["decision"]["rules"]["gamma_minimax"]["action"] == "treat_none");
    CHECK(costly["decision"]["rules"]["minimax_regret_bounds"]["action"] == "treat_none");
}

TEST_CASE("decide requires a rectangle") {
    TempDir dir("cli-decide-norect");
    write_text(dir.path / "config.json",
               std::string(R"({"mode": "trial-analysis", "out_dir": ")") +
                   (dir.path / "out").string() + R"("})");
    std::string err;
    const int code = run_cli("decide " + (dir.path / "config.json").string(), dir.path, nullptr, &err);
    CHECK(code == 2);
    CHECK(err.find("ConfigError: config.rectangle: required by decide") == 0);
}

TEST_CASE("decide reports missing draw files as io errors") {
    TempDir dir("cli-decide-nodraws");
    write_text(dir.path / "config.json", decide_config((dir.path / "out").string(), 0.0));
    std::string err;
    const int code = run_cli("decide " + (dir.path / "config.json").string() + " --draws " +
                                 (dir.path / "absent.csv").string(),
                             dir.path, nullptr, &err);
    CHECK(code == 4);
    CHECK(err.find("IoError:") == 0);
}

TEST_CASE("estimation failures exit with the estimation code") {
    TempDir dir("cli-weak");
    // every unit takes treatment regardless of assignment: no first stage
    std::string csv = "z,d,y\n";
    for (int i = 0; i < 40; ++i) csv += (i % 2 == 0) ? "1,1,1\n" : "0,1,0\n";
    write_text(dir.path / "trial.csv", csv);
    const std::string cfg = std::string(R"({
  "mode": "trial-analysis",
  "out_dir": ")") + (dir.path / "out").string() + R"(",
  "trial_data": ")" + (dir.path / "trial.csv").string() + R"(",
  "gibbs": {"n_draws": 150},
  "rectangle": {"m_a0": [0.4, 0.6], "m_n1": [0.4, 0.6]}
})";
    write_text(dir.path / "config.json", cfg);
    std::string err;
    const int code = run_cli("run " + (dir.path / "config.json").string(), dir.path, nullptr, &err);
    CHECK(code == 3);
    CHECK(err.find("WeakInstrument:") == 0);
}

TEST_CASE("missing config files exit with the io code") {
    TempDir dir("cli-noconfig");
    std::string err;
    const int code = run_cli("run " + (dir.path / "absent.json").string(), dir.path, nullptr, &err);
    CHECK(code == 4);
    CHECK(err.find("IoError:") == 0);
}

TEST_CASE("malformed json exits with the config code") {
    TempDir dir("cli-badjson");
    write_text(dir.path / "config.json", "{ not json");
    std::string err;
    const int code =
        run_cli("validate " + (dir.path / "config.json").string(), dir.path, nullptr, &err);
    CHECK(code == 2);
    CHECK(err.find("ConfigError:") == 0);
}

TEST_CASE("unknown subcommands exit with the config code") {
    TempDir dir("cli-badcmd");
    std::string err;
    CHECK(run_cli("frobnicate", dir.path, nullptr, &err) == 2);
}

TEST_CASE("full pipeline writes both samples and both report sections") {
    TempDir dir("cli-full");
    const std::string cfg = std::string(R"({
  "mode": "full-pipeline",
  "seed": 33,
  "out_dir": ")") + (dir.path / "out").string() + R"(",
  "production": {
    "beta0": 1.0, "beta1": 0.5, "beta2": 0.0,
    "p_price": 1.0, "sigma_eps": 1.0, "mu_logw": 3.0,
    "delta_w": 0.0, "sigma_u": 1.0, "urban_share": 0.5,
    "n": 2000
  },
  "trial": {
    "shares": {"pi_a": 0.2, "pi_n": 0.3, "pi_c": 0.5},
    "p_a1": 0.6, "p_n0": 0.4, "p_c1": 0.7, "p_c0": 0.5,
    "n": 2000
  },
  "gibbs": {"n_draws": 150, "burn_in": 100},
  "rectangle": {"m_a0": [0.5, 0.7], "m_n1": [0.3, 0.5]}
})";
    write_text(dir.path / "config.json", cfg);
    std::string err;
    REQUIRE_MESSAGE(run_cli("run " + (dir.path / "config.json").string(), dir.path, nullptr, &err) == 0,
                    err);
    const ordered_json report = parse_text(slurp(dir.path / "out" / "report.json"));
    CHECK(report.contains("production"));
    CHECK(report.contains("trial"));
    for (const char* name :
         {"sample_production.csv", "sample.csv", "draws.csv", "sensitivity.csv"}) {
        CHECK_MESSAGE(std::filesystem::exists(dir.path / "out" / name), name);
    }
}

#endif  // IVLATE_CLI_PATH
