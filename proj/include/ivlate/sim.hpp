#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ivlate/core.hpp"

namespace ivlate::sim {

// Structural production data generator. A firm's log output is
//   y = beta0 + beta1 * x + alpha,        alpha = beta2 * v + eps,
// and the firm picks its log labor input by profit maximization at price
// p_price and its own wage, which makes x depend on alpha:
//   x = (beta0 + log(p_price * beta1 / w) + alpha) / (1 - beta1).
// The urban indicator v confounds wages and productivity; conditional on v
// the wage is independent of alpha.
struct ProductionConfig {
    double beta0 = 1.0;
    double beta1 = 0.5;        // output elasticity, must lie in (0,1)
    double beta2 = 0.0;        // productivity loading on v
    double p_price = 1.0;      // output price, positive
    double sigma_eps = 1.0;    // sd of idiosyncratic productivity
    double mu_logw = 0.0;      // mean log wage
    double delta_w = 0.0;      // log-wage loading on v
    double sigma_u = 1.0;      // sd of log-wage noise
    double urban_share = 0.5;  // P(urban), in (0,1)
    std::size_t n = 0;

    void validate() const;  // throws InvalidConfig
};

// Observational rows: log output, log labor, demeaned urban indicator,
// log wage. Stored column-wise.
struct ObservationalSample {
    std::vector<double> y_obs;
    std::vector<double> x_obs;
    std::vector<double> v;
    std::vector<double> log_w;

    std::size_t size() const { return y_obs.size(); }
};

// Randomized-encouragement trial generator: latent compliance type, random
// instrument, take-up determined by type, Bernoulli outcome per (type, arm).
// p_a0 and p_n1 parameterize arms no unit of that type ever occupies; they
// exist as ground truth for the population ATE, not for data generation.
struct TrialConfig {
    core::TypeShares shares;
    double p_a1 = 0.5;
    double p_a0 = 0.5;
    double p_n1 = 0.5;
    double p_n0 = 0.5;
    double p_c1 = 0.5;
    double p_c0 = 0.5;
    double z_share = 0.5;  // P(z=1), in (0,1)
    std::size_t n = 0;

    void validate() const;  // throws InvalidConfig
};

// Trial rows: instrument, take-up, outcome.
struct TrialSample {
    std::vector<std::uint8_t> z;
    std::vector<std::uint8_t> d;
    std::vector<double> y;

    std::size_t size() const { return z.size(); }
};

// Deterministic given (cfg, seed).
ObservationalSample simulate_production(const ProductionConfig& cfg, std::uint64_t seed);

// Probability limit of the slope in the univariate regression of y_obs on
// x_obs, in closed form: beta1 + (1-beta1)*(A - C)/(A + L - 2C) with
// A = Var(alpha), C = Cov(log w, alpha), L = Var(log w).
double ols_plim_oracle(const ProductionConfig& cfg);

// Deterministic given (cfg, seed). Monotonicity holds row-wise by
// construction.
TrialSample simulate_trial(const TrialConfig& cfg, std::uint64_t seed);

// Echo the configured ground truth in core types, all six mean slots filled.
std::pair<core::TypeShares, core::OutcomeMeans> true_params(const TrialConfig& cfg);

}  // namespace ivlate::sim
