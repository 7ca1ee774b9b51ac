#include "ivlate/json_io.hpp"

#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <optional>

#include "ivlate/csv.hpp"
#include "ivlate/errors.hpp"

namespace ivlate::json_io {

namespace {

using Diags = std::vector<std::string>;

void note(Diags& diags, const std::string& path, const std::string& message) {
    diags.push_back(path + ": " + message);
}

const ordered_json* find(const ordered_json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

void reject_unknown_keys(const ordered_json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed, Diags& diags) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) note(diags, path + "." + item.key(), "unknown field");
    }
}

bool check_object(const ordered_json& j, const std::string& path, Diags& diags) {
    if (j.is_object()) return true;
    note(diags, path, "expected an object");
    return false;
}

double read_number(const ordered_json& obj, const std::string& path, const char* key,
                   double fallback, Diags& diags) {
    const ordered_json* j = find(obj, key);
    if (j == nullptr) return fallback;
    if (!j->is_number()) {
        note(diags, path + "." + key, "expected a number");
        return fallback;
    }
    return j->get<double>();
}

std::optional<double> read_required_number(const ordered_json& obj, const std::string& path,
                                           const char* key, Diags& diags) {
    const ordered_json* j = find(obj, key);
    if (j == nullptr) {
        note(diags, path + "." + key, "required field missing");
        return std::nullopt;
    }
    if (!j->is_number()) {
        note(diags, path + "." + key, "expected a number");
        return std::nullopt;
    }
    return j->get<double>();
}

std::size_t read_count(const ordered_json& obj, const std::string& path, const char* key,
                       std::size_t fallback, Diags& diags) {
    const ordered_json* j = find(obj, key);
    if (j == nullptr) return fallback;
    if (!j->is_number_integer() || (j->is_number_integer() && j->get<std::int64_t>() < 0)) {
        note(diags, path + "." + key, "expected a nonnegative integer");
        return fallback;
    }
    return j->get<std::size_t>();
}

std::uint64_t read_seed(const ordered_json& obj, const std::string& path, const char* key,
                        std::uint64_t fallback, Diags& diags) {
    const ordered_json* j = find(obj, key);
    if (j == nullptr) return fallback;
    if (!j->is_number_integer() || (!j->is_number_unsigned() && j->get<std::int64_t>() < 0)) {
        note(diags, path + "." + key, "expected a nonnegative integer");
        return fallback;
    }
    return j->get<std::uint64_t>();
}

std::optional<std::pair<double, double>> read_pair(const ordered_json& obj,
                                                   const std::string& path, const char* key,
                                                   Diags& diags) {
    const ordered_json* j = find(obj, key);
    if (j == nullptr) {
        note(diags, path + "." + key, "required field missing");
        return std::nullopt;
    }
    if (!j->is_array() || j->size() != 2 || !(*j)[0].is_number() || !(*j)[1].is_number()) {
        note(diags, path + "." + key, "expected an array of two numbers");
        return std::nullopt;
    }
    return std::make_pair((*j)[0].get<double>(), (*j)[1].get<double>());
}

template <typename Fn>
void validate_section(const std::string& path, Diags& diags, Fn&& validate) {
    try {
        validate();
    } catch (const Error& e) {
        note(diags, path, e.what());
    }
}

std::optional<sim::ProductionConfig> read_production(const ordered_json& j,
                                                     const std::string& path, Diags& diags) {
    if (!check_object(j, path, diags)) return std::nullopt;
    reject_unknown_keys(j, path,
                        {"beta0", "beta1", "beta2", "p_price", "sigma_eps", "mu_logw", "delta_w",
                         "sigma_u", "urban_share", "n"},
                        diags);
    sim::ProductionConfig cfg;
    cfg.beta0 = read_number(j, path, "beta0", cfg.beta0, diags);
    cfg.beta1 = read_number(j, path, "beta1", cfg.beta1, diags);
    cfg.beta2 = read_number(j, path, "beta2", cfg.beta2, diags);
    cfg.p_price = read_number(j, path, "p_price", cfg.p_price, diags);
    cfg.sigma_eps = read_number(j, path, "sigma_eps", cfg.sigma_eps, diags);
    cfg.mu_logw = read_number(j, path, "mu_logw", cfg.mu_logw, diags);
    cfg.delta_w = read_number(j, path, "delta_w", cfg.delta_w, diags);
    cfg.sigma_u = read_number(j, path, "sigma_u", cfg.sigma_u, diags);
    cfg.urban_share = read_number(j, path, "urban_share", cfg.urban_share, diags);
    cfg.n = read_count(j, path, "n", 0, diags);
    if (find(j, "n") == nullptr) note(diags, path + ".n", "required field missing");
    validate_section(path, diags, [&] { cfg.validate(); });
    return cfg;
}

std::optional<sim::TrialConfig> read_trial(const ordered_json& j, const std::string& path,
                                           Diags& diags) {
    if (!check_object(j, path, diags)) return std::nullopt;
    reject_unknown_keys(
        j, path, {"shares", "p_a1", "p_a0", "p_n1", "p_n0", "p_c1", "p_c0", "z_share", "n"},
        diags);
    sim::TrialConfig cfg;
    const ordered_json* shares = find(j, "shares");
    if (shares == nullptr) {
        note(diags, path + ".shares", "required field missing");
    } else if (check_object(*shares, path + ".shares", diags)) {
        reject_unknown_keys(*shares, path + ".shares", {"pi_a", "pi_n", "pi_c"}, diags);
        cfg.shares.pi_a =
            read_required_number(*shares, path + ".shares", "pi_a", diags).value_or(0.0);
        cfg.shares.pi_n =
            read_required_number(*shares, path + ".shares", "pi_n", diags).value_or(0.0);
        cfg.shares.pi_c =
            read_required_number(*shares, path + ".shares", "pi_c", diags).value_or(0.0);
    }
    cfg.p_a1 = read_number(j, path, "p_a1", cfg.p_a1, diags);
    cfg.p_a0 = read_number(j, path, "p_a0", cfg.p_a0, diags);
    cfg.p_n1 = read_number(j, path, "p_n1", cfg.p_n1, diags);
    cfg.p_n0 = read_number(j, path, "p_n0", cfg.p_n0, diags);
    cfg.p_c1 = read_number(j, path, "p_c1", cfg.p_c1, diags);
    cfg.p_c0 = read_number(j, path, "p_c0", cfg.p_c0, diags);
    cfg.z_share = read_number(j, path, "z_share", cfg.z_share, diags);
    cfg.n = read_count(j, path, "n", 0, diags);
    if (find(j, "n") == nullptr) note(diags, path + ".n", "required field missing");
    validate_section(path, diags, [&] { cfg.validate(); });
    return cfg;
}

bayes::PriorSpec read_prior(const ordered_json& j, const std::string& path, Diags& diags) {
    bayes::PriorSpec prior;
    if (!check_object(j, path, diags)) return prior;
    reject_unknown_keys(j, path, {"dirichlet_shares", "p_a1", "p_n0", "p_c1", "p_c0"}, diags);
    if (const ordered_json* d = find(j, "dirichlet_shares")) {
        if (!d->is_array() || d->size() != 3 || !(*d)[0].is_number() || !(*d)[1].is_number() ||
            !(*d)[2].is_number()) {
            note(diags, path + ".dirichlet_shares", "expected an array of three numbers");
        } else {
            prior.dirichlet_shares = {(*d)[0].get<double>(), (*d)[1].get<double>(),
                                      (*d)[2].get<double>()};
        }
    }
    const auto read_beta = [&](const char* key, bayes::BetaShape& shape) {
        if (find(j, key) == nullptr) return;
        if (const auto pair = read_pair(j, path, key, diags)) {
            shape.a = pair->first;
            shape.b = pair->second;
        }
    };
    read_beta("p_a1", prior.p_a1);
    read_beta("p_n0", prior.p_n0);
    read_beta("p_c1", prior.p_c1);
    read_beta("p_c0", prior.p_c0);
    validate_section(path, diags, [&] { prior.validate(); });
    return prior;
}

decide::PriorMeanRectangle read_rectangle(const ordered_json& j, const std::string& path,
                                          Diags& diags) {
    decide::PriorMeanRectangle rect;
    if (!check_object(j, path, diags)) return rect;
    reject_unknown_keys(j, path, {"m_a0", "m_n1"}, diags);
    if (const auto a0 = read_pair(j, path, "m_a0", diags)) {
        rect.m_a0_lo = a0->first;
        rect.m_a0_hi = a0->second;
    }
    if (const auto n1 = read_pair(j, path, "m_n1", diags)) {
        rect.m_n1_lo = n1->first;
        rect.m_n1_hi = n1->second;
    }
    return rect;
}

}  // namespace

ordered_json parse_text(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(e.what());
    }
}

cli::RunConfig read_run_config(const ordered_json& j, std::vector<std::string>& diags,
                               bool require_mode_sections) {
    cli::RunConfig cfg;
    if (!j.is_object()) {
        note(diags, "config", "expected a JSON object");
        return cfg;
    }
    reject_unknown_keys(j, "config",
                        {"mode", "seed", "out_dir", "production", "trial", "trial_data",
                         "outcome_range", "welfare", "prior", "gibbs", "rectangle",
                         "bayes_point", "sensitivity_grid", "estimation"},
                        diags);

    if (const ordered_json* mode = find(j, "mode")) {
        if (!mode->is_string()) {
            note(diags, "config.mode", "expected a string");
        } else {
            try {
                cfg.mode = cli::mode_from_string(mode->get<std::string>());
            } catch (const Error& e) {
                note(diags, "config.mode", e.what());
            }
        }
    } else if (require_mode_sections) {
        note(diags, "config.mode", "required field missing");
    }

    cfg.seed = read_seed(j, "config", "seed", cfg.seed, diags);
    if (const ordered_json* out = find(j, "out_dir")) {
        if (out->is_string()) {
            cfg.out_dir = out->get<std::string>();
        } else {
            note(diags, "config.out_dir", "expected a string");
        }
    }

    if (const ordered_json* prod = find(j, "production")) {
        cfg.production = read_production(*prod, "config.production", diags);
    }
    if (const ordered_json* trial = find(j, "trial")) {
        cfg.trial = read_trial(*trial, "config.trial", diags);
    }
    if (const ordered_json* data = find(j, "trial_data")) {
        if (data->is_string()) {
            cfg.trial_data = data->get<std::string>();
        } else {
            note(diags, "config.trial_data", "expected a string path");
        }
    }

    if (const ordered_json* range = find(j, "outcome_range")) {
        if (check_object(*range, "config.outcome_range", diags)) {
            reject_unknown_keys(*range, "config.outcome_range", {"y_lo", "y_hi"}, diags);
            cfg.outcome_range.y_lo =
                read_number(*range, "config.outcome_range", "y_lo", 0.0, diags);
            cfg.outcome_range.y_hi =
                read_number(*range, "config.outcome_range", "y_hi", 1.0, diags);
            validate_section("config.outcome_range", diags, [&] { cfg.outcome_range.validate(); });
        }
    }
    if (const ordered_json* welfare = find(j, "welfare")) {
        if (check_object(*welfare, "config.welfare", diags)) {
            reject_unknown_keys(*welfare, "config.welfare", {"cost"}, diags);
            cfg.welfare.cost = read_number(*welfare, "config.welfare", "cost", 0.0, diags);
            validate_section("config.welfare", diags, [&] { cfg.welfare.validate(); });
        }
    }
    if (const ordered_json* prior = find(j, "prior")) {
        cfg.prior = read_prior(*prior, "config.prior", diags);
    }
    if (const ordered_json* gibbs = find(j, "gibbs")) {
        if (check_object(*gibbs, "config.gibbs", diags)) {
            reject_unknown_keys(*gibbs, "config.gibbs", {"n_draws", "burn_in", "thin"}, diags);
            cfg.gibbs.n_draws =
                read_count(*gibbs, "config.gibbs", "n_draws", cfg.gibbs.n_draws, diags);
            cfg.gibbs.burn_in =
                read_count(*gibbs, "config.gibbs", "burn_in", cfg.gibbs.burn_in, diags);
            cfg.gibbs.thin = read_count(*gibbs, "config.gibbs", "thin", cfg.gibbs.thin, diags);
            validate_section("config.gibbs", diags, [&] { cfg.gibbs.validate(); });
        }
    }
    if (const ordered_json* rect = find(j, "rectangle")) {
        cfg.rectangle = read_rectangle(*rect, "config.rectangle", diags);
    }
    if (const ordered_json* point = find(j, "bayes_point")) {
        if (check_object(*point, "config.bayes_point", diags)) {
            reject_unknown_keys(*point, "config.bayes_point", {"m_a0", "m_n1"}, diags);
            decide::PriorMeanPoint p;
            p.m_a0 = read_required_number(*point, "config.bayes_point", "m_a0", diags).value_or(0.0);
            p.m_n1 = read_required_number(*point, "config.bayes_point", "m_n1", diags).value_or(0.0);
            cfg.bayes_point = p;
        }
    }
    if (const ordered_json* grid = find(j, "sensitivity_grid")) {
        if (!grid->is_array() || grid->size() != 2 || !(*grid)[0].is_number_integer() ||
            !(*grid)[1].is_number_integer()) {
            note(diags, "config.sensitivity_grid", "expected an array of two integers");
        } else {
            cfg.sensitivity_grid_m_a0 = (*grid)[0].get<std::size_t>();
            cfg.sensitivity_grid_m_n1 = (*grid)[1].get<std::size_t>();
            if (cfg.sensitivity_grid_m_a0 < 2 || cfg.sensitivity_grid_m_n1 < 2) {
                note(diags, "config.sensitivity_grid", "needs at least 2 points per axis");
            }
        }
    }
    if (const ordered_json* est = find(j, "estimation")) {
        if (check_object(*est, "config.estimation", diags)) {
            reject_unknown_keys(*est, "config.estimation",
                                {"first_stage_tol", "monotonicity_tol", "first_stage_t_min"},
                                diags);
            cfg.estimation.first_stage_tol = read_number(
                *est, "config.estimation", "first_stage_tol", cfg.estimation.first_stage_tol,
                diags);
            cfg.estimation.monotonicity_tol = read_number(
                *est, "config.estimation", "monotonicity_tol", cfg.estimation.monotonicity_tol,
                diags);
            cfg.estimation.first_stage_t_min = read_number(
                *est, "config.estimation", "first_stage_t_min", cfg.estimation.first_stage_t_min,
                diags);
        }
    }

    // Cross-field checks that apply whenever the pieces are present.
    if (cfg.rectangle.has_value()) {
        validate_section("config.rectangle", diags,
                         [&] { cfg.rectangle->validate(cfg.outcome_range); });
    }
    if (cfg.bayes_point.has_value()) {
        if (!cfg.outcome_range.contains(cfg.bayes_point->m_a0) ||
            !cfg.outcome_range.contains(cfg.bayes_point->m_n1)) {
            note(diags, "config.bayes_point", "leaves the outcome range");
        }
    }
    if (cfg.trial.has_value() && cfg.trial_data.has_value()) {
        note(diags, "config.trial_data", "give either `trial` or `trial_data`, not both");
    }

    // Mode requirements.
    if (require_mode_sections) {
        const bool needs_production =
            cfg.mode == cli::Mode::ProductionDemo || cfg.mode == cli::Mode::FullPipeline;
        const bool needs_trial =
            cfg.mode == cli::Mode::TrialAnalysis || cfg.mode == cli::Mode::FullPipeline;
        if (needs_production && !cfg.production.has_value()) {
            note(diags, "config.production", "required by this mode");
        }
        if (needs_trial) {
            if (!cfg.trial.has_value() && !cfg.trial_data.has_value()) {
                note(diags, "config.trial", "this mode needs `trial` or `trial_data`");
            }
            if (!cfg.rectangle.has_value()) {
                note(diags, "config.rectangle", "required by this mode");
            }
            if (cfg.gibbs.n_draws < 100) {
                note(diags, "config.gibbs.n_draws", "reporting runs need at least 100 draws");
            }
        }
    }
    return cfg;
}

cli::RunConfig parse_run_config(const ordered_json& j, bool require_mode_sections) {
    std::vector<std::string> diags;
    cli::RunConfig cfg = read_run_config(j, diags, require_mode_sections);
    if (!diags.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < diags.size(); ++i) {
            if (i > 0) joined += "; ";
            joined += diags[i];
        }
        throw ConfigError(joined);
    }
    return cfg;
}

ordered_json to_json(const estimators::LinearFit& fit) {
    return ordered_json{{"coefficients", fit.coefficients},
                        {"std_errors", fit.std_errors},
                        {"n_used", fit.n_used}};
}

ordered_json to_json(const estimators::IdentifiedParams& params,
                     const estimators::AteBounds& bounds) {
    ordered_json j;
    j["pi_a"] = params.shares.pi_a;
    j["pi_n"] = params.shares.pi_n;
    j["pi_c"] = params.shares.pi_c;
    if (params.mu_a1_defined) {
        j["mu_a1"] = params.means.mu_a1;
    } else {
        j["mu_a1"] = nullptr;
    }
    if (params.mu_n0_defined) {
        j["mu_n0"] = params.means.mu_n0;
    } else {
        j["mu_n0"] = nullptr;
    }
    j["mu_c1"] = params.means.mu_c1;
    j["mu_c0"] = params.means.mu_c0;
    j["late"] = params.late;
    j["bound_lo"] = bounds.lo;
    j["bound_hi"] = bounds.hi;
    j["clamped"] = params.clamped;
    if (params.clamped) {
        j["raw_mu_c1"] = params.raw_mu_c1;
        j["raw_mu_c0"] = params.raw_mu_c0;
    }
    return j;
}

namespace {

ordered_json to_json(const bayes::ParamSummary& s) {
    return ordered_json{
        {"mean", s.mean}, {"sd", s.sd}, {"q05", s.q05}, {"q50", s.q50}, {"q95", s.q95}};
}

ordered_json to_json(const decide::PriorMeanPoint& p) {
    return ordered_json{{"m_a0", p.m_a0}, {"m_n1", p.m_n1}};
}

std::string hex64(std::uint64_t value) {
    char buf[19] = "0x";
    const auto res = std::to_chars(buf + 2, buf + sizeof(buf), value, 16);
    return std::string(buf, res.ptr);
}

}  // namespace

ordered_json to_json(const bayes::PosteriorSummary& summary) {
    ordered_json j;
    j["n_draws"] = summary.n_draws;
    for (std::size_t p = 0; p < bayes::kDrawDim; ++p) {
        j[bayes::kDrawNames[p]] = to_json(summary.params[p]);
    }
    j["late"] = to_json(summary.late);
    return j;
}

ordered_json to_json(const decide::DecisionReport& report) {
    ordered_json rules;
    rules["bayes"] = ordered_json{{"action", decide::to_string(report.bayes.action)},
                                  {"gain", report.bayes.gain},
                                  {"point", to_json(report.bayes.point)}};
    rules["minimax_bounds"] =
        ordered_json{{"action", decide::to_string(report.minimax_bounds.action)},
                     {"worst_gain", report.minimax_bounds.worst_gain}};
    rules["minimax_regret_bounds"] =
        ordered_json{{"action", decide::to_string(report.minimax_regret_bounds.action)},
                     {"regret_treat", report.minimax_regret_bounds.regret_treat},
                     {"regret_none", report.minimax_regret_bounds.regret_none}};
    rules["gamma_minimax"] = ordered_json{
        {"action", decide::to_string(report.gamma_minimax.action)},
        {"note", "welfare-maximin over the prior-mean rectangle"},
        {"gain_worst", report.gamma_minimax.gain_worst},
        {"gain_best", report.gamma_minimax.gain_best},
        {"welfare_treat_worst", report.gamma_minimax.welfare_treat_worst},
        {"welfare_none_worst", report.gamma_minimax.welfare_none_worst},
        {"corner_treat", to_json(report.gamma_minimax.corner_treat)},
        {"corner_none", to_json(report.gamma_minimax.corner_none)}};
    rules["gamma_minimax_regret"] = ordered_json{
        {"action", decide::to_string(report.gamma_minimax_regret.action)},
        {"regret_treat", report.gamma_minimax_regret.regret_treat},
        {"regret_none", report.gamma_minimax_regret.regret_none},
        {"gain_worst", report.gamma_minimax_regret.gain_worst},
        {"gain_best", report.gamma_minimax_regret.gain_best},
        {"corner_treat", to_json(report.gamma_minimax_regret.corner_treat)},
        {"corner_none", to_json(report.gamma_minimax_regret.corner_none)}};

    ordered_json j;
    j["rules"] = std::move(rules);
    j["moment_bounds"] =
        ordered_json{{"lo", report.moment_bounds.lo}, {"hi", report.moment_bounds.hi}};
    j["moments"] = ordered_json{{"e_pi_a", report.moments.e_pi_a},
                                {"e_pi_n", report.moments.e_pi_n},
                                {"e_pi_c", report.moments.e_pi_c},
                                {"e_pia_mu_a1", report.moments.e_pia_mu_a1},
                                {"e_pin_mu_n0", report.moments.e_pin_mu_n0},
                                {"e_pic_mu_c1", report.moments.e_pic_mu_c1},
                                {"e_pic_mu_c0", report.moments.e_pic_mu_c0}};
    j["inputs"] = ordered_json{
        {"rectangle", ordered_json{{"m_a0", {report.rectangle.m_a0_lo, report.rectangle.m_a0_hi}},
                                   {"m_n1", {report.rectangle.m_n1_lo, report.rectangle.m_n1_hi}}}},
        {"welfare", ordered_json{{"cost", report.welfare.cost}}},
        {"outcome_range",
         ordered_json{{"y_lo", report.range.y_lo}, {"y_hi", report.range.y_hi}}},
        {"posterior_digest", hex64(report.posterior_digest)}};
    return j;
}

}  // namespace ivlate::json_io
