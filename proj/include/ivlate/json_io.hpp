#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ivlate/bayes.hpp"
#include "ivlate/cli.hpp"
#include "ivlate/decide.hpp"
#include "ivlate/estimators.hpp"

namespace ivlate::json_io {

// Insertion-ordered JSON keeps report key order fixed across runs.
using ordered_json = nlohmann::ordered_json;

ordered_json parse_text(const std::string& text);  // throws ConfigError with position

// Builds a RunConfig, collecting one "field: problem" diagnostic per
// violation. The returned config is only meaningful when diagnostics stay
// empty. With require_mode_sections off, mode and its required sections are
// optional (the decide subcommand consumes existing draws and needs neither
// a generator nor a sampler config).
cli::RunConfig read_run_config(const ordered_json& j, std::vector<std::string>& diagnostics,
                               bool require_mode_sections = true);

// read_run_config that throws ConfigError on any diagnostic.
cli::RunConfig parse_run_config(const ordered_json& j, bool require_mode_sections = true);

ordered_json to_json(const estimators::LinearFit& fit);
// Stable estimate record: pi_a, pi_n, pi_c, mu_a1, mu_n0, mu_c1, mu_c0,
// late, bound_lo, bound_hi. Undefined group means serialize as null.
ordered_json to_json(const estimators::IdentifiedParams& params,
                     const estimators::AteBounds& bounds);
ordered_json to_json(const bayes::PosteriorSummary& summary);
ordered_json to_json(const decide::DecisionReport& report);

}  // namespace ivlate::json_io
