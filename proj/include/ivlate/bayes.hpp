#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ivlate/core.hpp"
#include "ivlate/errors.hpp"
#include "ivlate/sim.hpp"

namespace ivlate::bayes {

struct BetaShape {
    double a = 1.0;
    double b = 1.0;

    void validate() const;  // throws InvalidConfig
    double mean() const { return a / (a + b); }
};

// Conjugate prior: Dirichlet over (pi_a, pi_n, pi_c), independent Beta for
// each identified outcome probability. Defaults are flat. The nonidentified
// arms (always-taker control, never-taker treated) carry no prior here; they
// never enter the likelihood and are handled downstream as prior means.
struct PriorSpec {
    std::array<double, 3> dirichlet_shares = {1.0, 1.0, 1.0};  // (pi_a, pi_n, pi_c)
    BetaShape p_a1;
    BetaShape p_n0;
    BetaShape p_c1;
    BetaShape p_c0;

    void validate() const;  // throws InvalidConfig
};

struct GibbsConfig {
    std::size_t n_draws = 2000;
    std::size_t burn_in = 1000;
    std::size_t thin = 1;
    std::uint64_t seed = 0;

    void validate() const;  // throws InvalidConfig
};

// Sufficient statistics of a binary-outcome trial: outcome counts per
// (z, d, y) cell. Both the sampler and the oracle consume only these, so
// row order cannot affect any posterior quantity.
struct TrialCounts {
    std::uint64_t n[2][2][2] = {};

    static TrialCounts from_sample(const sim::TrialSample& trial);  // NonBinaryOutcome

    std::uint64_t cell(int z, int d) const { return n[z][d][0] + n[z][d][1]; }
    std::uint64_t arm(int z) const { return cell(z, 0) + cell(z, 1); }
    std::uint64_t total() const { return arm(0) + arm(1); }
    // Fingerprint of the sufficient statistics, for provenance records.
    std::uint64_t digest() const;
};

inline constexpr std::size_t kDrawDim = 7;
inline constexpr std::array<const char*, kDrawDim> kDrawNames = {
    "pi_a", "pi_n", "pi_c", "p_a1", "p_n0", "p_c1", "p_c0"};

struct Provenance {
    PriorSpec prior;
    GibbsConfig config;
    std::uint64_t data_digest = 0;
};

struct PosteriorDraws {
    // Row layout follows kDrawNames.
    std::vector<std::array<double, kDrawDim>> rows;
    Provenance provenance;

    std::size_t size() const { return rows.size(); }
};

// Data augmentation over latent compliance types. Cells (z=1,d=0) and
// (z=0,d=1) are pure (never-taker, always-taker); cell (z=1,d=1) mixes
// always-takers with compliers and (z=0,d=0) never-takers with compliers.
// Each sweep imputes the mixed-cell types from their posterior odds, then
// redraws shares and outcome probabilities from the conjugate updates.
// Deterministic given cfg.seed.
PosteriorDraws gibbs_posterior(const TrialCounts& counts, const PriorSpec& prior,
                               const GibbsConfig& cfg);
PosteriorDraws gibbs_posterior(const sim::TrialSample& trial, const PriorSpec& prior,
                               const GibbsConfig& cfg);

struct Moment {
    double mean = 0.0;
    double sd = 0.0;
};

// Posterior moments in draw-column order plus the complier contrast
// p_c1 - p_c0.
struct MomentTable {
    std::array<Moment, kDrawDim> params;
    Moment late;
};

// Brute-force quadrature posterior, the validation oracle for the sampler.
// Shares are integrated over a stick-breaking tensor grid (two free
// dimensions with the simplex Jacobian), each outcome probability over a
// midpoint grid of the same size. Small problems only.
MomentTable grid_posterior_oracle(const TrialCounts& counts, const PriorSpec& prior,
                                  int grid_points);
MomentTable grid_posterior_oracle(const sim::TrialSample& trial, const PriorSpec& prior,
                                  int grid_points);

struct ParamSummary {
    double mean = 0.0;
    double sd = 0.0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;
};

struct PosteriorSummary {
    std::array<ParamSummary, kDrawDim> params;
    ParamSummary late;
    std::size_t n_draws = 0;
};

PosteriorSummary posterior_summary(const PosteriorDraws& draws);

}  // namespace ivlate::bayes
