#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ivlate/core.hpp"
#include "ivlate/errors.hpp"
#include "ivlate/sim.hpp"

namespace ivlate::estimators {

// Least-squares fit. Coefficient order: intercept, slope on the regressor of
// interest, then control loadings. std_errors are classical homoskedastic SEs
// aligned with coefficients.
struct LinearFit {
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::size_t n_used = 0;

    double slope() const { return coefficients.at(1); }
    double slope_se() const { return std_errors.at(1); }
};

struct OlsOptions {
    bool include_v = false;
};

struct TslsOptions {
    bool include_v = true;
    // First-stage relevance: |t| on the instrument must exceed this.
    double first_stage_t_min = 2.0;
};

// Regression of y_obs on x_obs (plus v when selected).
LinearFit ols_fit(const sim::ObservationalSample& sample, const OlsOptions& options = {});

// Two-stage least squares: x_obs instrumented by log_w, v as exogenous
// control when selected. Reported SEs use the structural residuals.
LinearFit tsls_fit(const sim::ObservationalSample& sample, const TslsOptions& options = {});

// Cell summary of a trial: weight and mean outcome per (z, d) cell. Weights
// are row counts for empirical cells and population probabilities for exact
// cells; every estimator below consumes only weight ratios, so the two kinds
// are interchangeable.
struct TrialCells {
    double w[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double ybar[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    bool present[2][2] = {{false, false}, {false, false}};

    static TrialCells from_sample(const sim::TrialSample& trial);
    // Infinite-data limit implied by a generator config.
    static TrialCells from_config(const sim::TrialConfig& cfg);

    double arm_weight(int z) const { return w[z][0] + w[z][1]; }
    bool arm_present(int z) const { return present[z][0] || present[z][1]; }
    double treated_share(int z) const;  // P(d=1 | z)
    double mean_y(int z) const;         // E[y | z]
    double mean_yd(int z) const;        // E[y*d | z]
    double mean_y_untreated(int z) const;  // E[y*(1-d) | z]
};

// Wald ratio (E[y|z=1]-E[y|z=0]) / (P(d=1|z=1)-P(d=1|z=0)).
double wald_late(const sim::TrialSample& trial, double first_stage_tol = 0.01);
double wald_late(const TrialCells& cells, double first_stage_tol = 0.01);

// pi_a = P(d=1|z=0), pi_n = P(d=0|z=1), pi_c as the remainder. A slightly
// negative remainder (within tolerance) is clamped to zero and the other
// shares renormalized; a larger violation is an error.
core::TypeShares type_shares_hat(const sim::TrialSample& trial, double monotonicity_tol = 0.01);
core::TypeShares type_shares_hat(const TrialCells& cells, double monotonicity_tol = 0.01);

struct MeansOptions {
    double first_stage_tol = 0.01;
    double monotonicity_tol = 0.01;
    // With strict_cells, an empty pure cell is an error instead of an
    // undefined-mean flag.
    bool strict_cells = false;
    // When set, complier means are clamped into the range (raw values kept).
    std::optional<core::OutcomeRange> range;
};

// The point-identified parameters: shares, group outcome means with the
// nonidentified slots absent, and their complier contrast.
struct IdentifiedParams {
    core::TypeShares shares;
    core::OutcomeMeans means;  // mu_a0, mu_n1 never set here
    double late = 0.0;
    // False when the group's estimated share is zero; means.mu_* then holds
    // a placeholder 0 that only ever multiplies the zero share.
    bool mu_a1_defined = true;
    bool mu_n0_defined = true;
    bool clamped = false;
    double raw_mu_c1 = 0.0;
    double raw_mu_c0 = 0.0;
};

IdentifiedParams identified_means_hat(const sim::TrialSample& trial, const MeansOptions& options = {});
IdentifiedParams identified_means_hat(const TrialCells& cells, const MeansOptions& options = {});

struct AteBounds {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

// Sharp bounds on the population ATE: the nonidentified means are pushed to
// the range extremes (mu_a0 -> y_hi, mu_n1 -> y_lo for the lower bound, the
// opposite corner for the upper).
AteBounds manski_ate_bounds(const IdentifiedParams& params, const core::OutcomeRange& range);

}  // namespace ivlate::estimators
