#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ivlate/bayes.hpp"
#include "ivlate/core.hpp"
#include "ivlate/decide.hpp"
#include "ivlate/sim.hpp"

namespace ivlate::cli {

enum class Mode { ProductionDemo, TrialAnalysis, FullPipeline };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& text);  // throws ConfigError

struct EstimationOptions {
    double first_stage_tol = 0.01;
    double monotonicity_tol = 0.01;
    double first_stage_t_min = 2.0;
};

// One JSON config is the single source of truth for a run; the command line
// only selects the subcommand and may override seed and output directory.
struct RunConfig {
    Mode mode = Mode::TrialAnalysis;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::optional<sim::ProductionConfig> production;
    std::optional<sim::TrialConfig> trial;
    std::optional<std::string> trial_data;  // CSV path; alternative to `trial`
    core::OutcomeRange outcome_range;
    core::WelfareSpec welfare;
    bayes::PriorSpec prior;
    bayes::GibbsConfig gibbs;  // its seed is derived from the run seed
    std::optional<decide::PriorMeanRectangle> rectangle;
    std::optional<decide::PriorMeanPoint> bayes_point;  // default: rectangle midpoint
    std::size_t sensitivity_grid_m_a0 = 11;
    std::size_t sensitivity_grid_m_n1 = 11;
    EstimationOptions estimation;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitEstimation = 3;
inline constexpr int kExitIo = 4;

// Independent per-stage seeds from the run seed, so e.g. enlarging the Gibbs
// run never perturbs the simulated data.
enum class Stage : std::uint64_t { Production = 0, Trial = 1, Gibbs = 2 };
std::uint64_t stage_seed(std::uint64_t run_seed, Stage stage);

// Full command-line entry: subcommands run, validate, simulate, decide.
// Returns the process exit code.
int run_main(int argc, const char* const* argv);

}  // namespace ivlate::cli
