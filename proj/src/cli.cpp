#include "ivlate/cli.hpp"

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ivlate/csv.hpp"
#include "ivlate/errors.hpp"
#include "ivlate/estimators.hpp"
#include "ivlate/json_io.hpp"
#include "ivlate/rng.hpp"

namespace ivlate::cli {

namespace fs = std::filesystem;
using json_io::ordered_json;

const char* to_string(Mode mode) {
    switch (mode) {
        case Mode::ProductionDemo: return "production-demo";
        case Mode::TrialAnalysis: return "trial-analysis";
        case Mode::FullPipeline: return "full-pipeline";
    }
    return "trial-analysis";
}

Mode mode_from_string(const std::string& text) {
    if (text == "production-demo") return Mode::ProductionDemo;
    if (text == "trial-analysis") return Mode::TrialAnalysis;
    if (text == "full-pipeline") return Mode::FullPipeline;
    throw ConfigError("unknown mode `" + text +
                      "`; expected production-demo, trial-analysis, or full-pipeline");
}

std::uint64_t stage_seed(std::uint64_t run_seed, Stage stage) {
    return splitmix64(splitmix64(run_seed) + static_cast<std::uint64_t>(stage));
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("failed reading " + path);
    return std::move(buf).str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

template <typename Writer>
void write_csv(const fs::path& path, Writer&& writer) {
    std::ostringstream out;
    writer(out);
    write_file(path, std::move(out).str());
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[24];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool binary_outcomes(const sim::TrialSample& trial) {
    for (double y : trial.y) {
        if (y != 0.0 && y != 1.0) return false;
    }
    return true;
}

ordered_json run_production(const RunConfig& cfg, const fs::path& out_dir,
                            const char* sample_name) {
    const sim::ObservationalSample sample =
        sim::simulate_production(*cfg.production, stage_seed(cfg.seed, Stage::Production));
    estimators::TslsOptions tsls_opt;
    tsls_opt.first_stage_t_min = cfg.estimation.first_stage_t_min;

    ordered_json section;
    section["n"] = sample.size();
    section["ols"] = json_io::to_json(estimators::ols_fit(sample));
    section["tsls"] = json_io::to_json(estimators::tsls_fit(sample, tsls_opt));
    section["ols_plim_oracle"] = sim::ols_plim_oracle(*cfg.production);
    section["true_slope"] = cfg.production->beta1;

    write_csv(out_dir / sample_name,
              [&](std::ostream& out) { csv::write_production_sample(out, sample); });
    return section;
}

sim::TrialSample load_trial(const RunConfig& cfg) {
    if (cfg.trial.has_value()) {
        return sim::simulate_trial(*cfg.trial, stage_seed(cfg.seed, Stage::Trial));
    }
    std::ifstream in(*cfg.trial_data, std::ios::binary);
    if (!in) throw IoError("cannot open " + *cfg.trial_data);
    return csv::read_trial_sample(in);
}

decide::DecisionReport decide_from_moments(const RunConfig& cfg,
                                           const decide::WelfareMoments& moments,
                                           std::uint64_t digest) {
    const decide::PriorMeanPoint point =
        cfg.bayes_point.has_value() ? *cfg.bayes_point : cfg.rectangle->midpoint();
    return decide::decide_all(moments, cfg.outcome_range, *cfg.rectangle, point, cfg.welfare,
                              digest);
}

ordered_json run_trial(const RunConfig& cfg, const fs::path& out_dir) {
    const sim::TrialSample trial = load_trial(cfg);

    estimators::MeansOptions mopt;
    mopt.first_stage_tol = cfg.estimation.first_stage_tol;
    mopt.monotonicity_tol = cfg.estimation.monotonicity_tol;
    mopt.range = cfg.outcome_range;
    const estimators::IdentifiedParams params = estimators::identified_means_hat(trial, mopt);
    const estimators::AteBounds bounds = estimators::manski_ate_bounds(params, cfg.outcome_range);

    ordered_json section;
    section["n"] = trial.size();
    section["estimates"] = json_io::to_json(params, bounds);
    section["wald"] = estimators::wald_late(trial, cfg.estimation.first_stage_tol);

    // Binary outcomes get the full posterior; anything else falls back to
    // plug-in moments (a degenerate posterior at the point estimates).
    decide::WelfareMoments moments;
    std::uint64_t digest = 0;
    if (binary_outcomes(trial)) {
        bayes::GibbsConfig gibbs = cfg.gibbs;
        gibbs.seed = stage_seed(cfg.seed, Stage::Gibbs);
        const bayes::PosteriorDraws draws = bayes::gibbs_posterior(trial, cfg.prior, gibbs);
        section["posterior"] = json_io::to_json(bayes::posterior_summary(draws));
        moments = decide::WelfareMoments::from_draws(draws);
        digest = draws.provenance.data_digest;
        write_csv(out_dir / "draws.csv",
                  [&](std::ostream& out) { csv::write_draws(out, draws); });
    } else {
        section["posterior"] = nullptr;
        moments = decide::WelfareMoments::from_params(params.shares, params.means);
    }

    const decide::DecisionReport report = decide_from_moments(cfg, moments, digest);
    section["decision"] = json_io::to_json(report);

    const decide::SensitivityTable table =
        decide::sensitivity_table(moments, *cfg.rectangle, cfg.welfare,
                                  cfg.sensitivity_grid_m_a0, cfg.sensitivity_grid_m_n1);
    write_csv(out_dir / "sensitivity.csv",
              [&](std::ostream& out) { csv::write_sensitivity(out, table); });
    if (cfg.trial.has_value()) {
        write_csv(out_dir / "sample.csv",
                  [&](std::ostream& out) { csv::write_trial_sample(out, trial); });
    }
    return section;
}

int cmd_run(const RunConfig& cfg, bool deterministic) {
    const fs::path out_dir = prepare_out_dir(cfg);

    ordered_json report;
    report["mode"] = to_string(cfg.mode);
    report["seed"] = cfg.seed;
    if (!deterministic) report["generated_at"] = timestamp_utc();

    if (cfg.mode == Mode::ProductionDemo) {
        report["production"] = run_production(cfg, out_dir, "sample.csv");
    } else if (cfg.mode == Mode::FullPipeline) {
        report["production"] = run_production(cfg, out_dir, "sample_production.csv");
        report["trial"] = run_trial(cfg, out_dir);
    } else {
        report["trial"] = run_trial(cfg, out_dir);
    }

    write_file(out_dir / "report.json", report.dump(2) + "\n");
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
    const fs::path out_dir = prepare_out_dir(cfg);
    if (cfg.mode == Mode::ProductionDemo || cfg.mode == Mode::FullPipeline) {
        const char* name = cfg.mode == Mode::FullPipeline ? "sample_production.csv" : "sample.csv";
        const sim::ObservationalSample sample =
            sim::simulate_production(*cfg.production, stage_seed(cfg.seed, Stage::Production));
        write_csv(out_dir / name,
                  [&](std::ostream& out) { csv::write_production_sample(out, sample); });
    }
    if (cfg.mode == Mode::TrialAnalysis || cfg.mode == Mode::FullPipeline) {
        if (cfg.trial.has_value()) {
            const sim::TrialSample trial =
                sim::simulate_trial(*cfg.trial, stage_seed(cfg.seed, Stage::Trial));
            write_csv(out_dir / "sample.csv",
                      [&](std::ostream& out) { csv::write_trial_sample(out, trial); });
        } else {
            std::cerr << "nothing to simulate: trial data comes from a file\n";
        }
    }
    return kExitOk;
}

int cmd_decide(const RunConfig& cfg, const std::string& draws_arg, bool deterministic) {
    if (!cfg.rectangle.has_value()) {
        throw ConfigError("config.rectangle: required by decide");
    }
    const fs::path out_dir = prepare_out_dir(cfg);
    const std::string draws_path =
        draws_arg.empty() ? (fs::path(cfg.out_dir) / "draws.csv").string() : draws_arg;

    std::ifstream in(draws_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + draws_path);
    const bayes::PosteriorDraws draws = csv::read_draws(in);
    if (draws.size() == 0) throw IoError(draws_path + ": no draws");

    const decide::WelfareMoments moments = decide::WelfareMoments::from_draws(draws);
    const decide::DecisionReport report =
        decide_from_moments(cfg, moments, draws.provenance.data_digest);
    const decide::SensitivityTable table =
        decide::sensitivity_table(moments, *cfg.rectangle, cfg.welfare,
                                  cfg.sensitivity_grid_m_a0, cfg.sensitivity_grid_m_n1);

    ordered_json out;
    out["command"] = "decide";
    if (!deterministic) out["generated_at"] = timestamp_utc();
    out["draws_file"] = draws_path;
    out["n_draws"] = draws.size();
    out["decision"] = json_io::to_json(report);
    write_file(out_dir / "report.json", out.dump(2) + "\n");
    write_csv(out_dir / "sensitivity.csv",
              [&](std::ostream& out_stream) { csv::write_sensitivity(out_stream, table); });
    return kExitOk;
}

int cmd_validate(const std::string& config_path) {
    const ordered_json parsed = json_io::parse_text(read_file(config_path));
    std::vector<std::string> diags;
    json_io::read_run_config(parsed, diags);
    if (diags.empty()) {
        std::cout << "ok\n";
        return kExitOk;
    }
    for (const std::string& diag : diags) std::cout << diag << '\n';
    std::cerr << "ConfigError: " << diags.size() << " problem"
              << (diags.size() == 1 ? "" : "s") << " found\n";
    return kExitConfig;
}

RunConfig load_run_config(const std::string& config_path, bool require_mode_sections,
                          const std::optional<std::uint64_t>& seed_override,
                          const std::optional<std::string>& out_override) {
    const ordered_json parsed = json_io::parse_text(read_file(config_path));
    RunConfig cfg = json_io::parse_run_config(parsed, require_mode_sections);
    if (seed_override.has_value()) cfg.seed = *seed_override;
    if (out_override.has_value()) cfg.out_dir = *out_override;
    return cfg;
}

int exit_code_for(const Error& e) {
    const std::string name = e.name();
    if (name == "ConfigError" || name == "InvalidConfig") return kExitConfig;
    if (name == "IoError") return kExitIo;
    return kExitEstimation;
}

}  // namespace

int run_main(int argc, const char* const* argv) {
    CLI::App app{"Production-function IV demo and randomized-trial treatment choice"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_value = 0;
    std::string out_value;
    std::string draws_arg;
    bool deterministic = false;

    CLI::App* run = app.add_subcommand("run", "Execute the configured pipeline, write artifacts");
    CLI::App* validate = app.add_subcommand("validate", "Check a config file without executing");
    CLI::App* simulate = app.add_subcommand("simulate", "Write the configured sample CSVs only");
    CLI::App* decide_cmd =
        app.add_subcommand("decide", "Apply the decision rules to existing posterior draws");

    CLI::Option* seed_opts[3] = {};
    CLI::Option* out_opts[3] = {};
    {
        CLI::App* with_overrides[3] = {run, simulate, decide_cmd};
        for (int i = 0; i < 3; ++i) {
            CLI::App* sub = with_overrides[i];
            sub->add_option("config", config_path, "JSON config file")->required();
            seed_opts[i] = sub->add_option("--seed", seed_value, "Override the config seed");
            out_opts[i] =
                sub->add_option("--out", out_value, "Override the config output directory");
        }
    }
    validate->add_option("config", config_path, "JSON config file")->required();
    run->add_flag("--deterministic", deterministic,
                  "Omit timestamps so reruns are byte-identical");
    decide_cmd->add_flag("--deterministic", deterministic,
                         "Omit timestamps so reruns are byte-identical");
    decide_cmd->add_option("--draws", draws_arg, "Draws CSV path (default <out_dir>/draws.csv)");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    for (const CLI::Option* opt : seed_opts) {
        if (opt != nullptr && opt->count() > 0) seed_override = seed_value;
    }
    for (const CLI::Option* opt : out_opts) {
        if (opt != nullptr && opt->count() > 0) out_override = out_value;
    }

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        const RunConfig cfg =
            load_run_config(config_path, !decide_cmd->parsed(), seed_override, out_override);
        if (run->parsed()) return cmd_run(cfg, deterministic);
        if (simulate->parsed()) return cmd_simulate(cfg);
        return cmd_decide(cfg, draws_arg, deterministic);
    } catch (const Error& e) {
        std::cerr << e.name() << ": " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << '\n';
        return kExitEstimation;
    }
}

}  // namespace ivlate::cli
