#pragma once

#include <optional>

#include "ivlate/errors.hpp"

namespace ivlate::core {

// Compliance behavior under a binary instrument, monotonicity maintained:
// no defiers.
enum class ComplianceType { AlwaysTaker, NeverTaker, Complier };

inline constexpr double kShareSumTol = 1e-12;

// Population shares of the three compliance types. Must lie on the simplex.
struct TypeShares {
    double pi_a = 0.0;
    double pi_n = 0.0;
    double pi_c = 0.0;

    void validate() const;  // throws InvalidConfig
};

// Mean potential outcomes by compliance type and treatment arm.
//
// The four identified slots are plain values. The two slots the data can
// never pin down (always-taker control mean, never-taker treated mean) are
// optional and stay empty unless supplied from outside the data, so callers
// must acknowledge them explicitly before computing anything that needs them.
struct OutcomeMeans {
    double mu_a1 = 0.0;  // always-taker treated mean
    double mu_n0 = 0.0;  // never-taker control mean
    double mu_c1 = 0.0;  // complier treated mean
    double mu_c0 = 0.0;  // complier control mean
    std::optional<double> mu_a0;  // always-taker control mean
    std::optional<double> mu_n1;  // never-taker treated mean

    bool complete() const { return mu_a0.has_value() && mu_n1.has_value(); }
};

// Known logical range of the outcome variable.
struct OutcomeRange {
    double y_lo = 0.0;
    double y_hi = 1.0;

    void validate() const;  // throws InvalidConfig
    bool contains(double y) const { return y >= y_lo && y <= y_hi; }
    double width() const { return y_hi - y_lo; }
};

// Additive social welfare: sum of outcomes minus a per-capita treatment cost.
struct WelfareSpec {
    double cost = 0.0;

    void validate() const;  // throws InvalidConfig
};

// Throws InvalidConfig if any present mean lies outside the range.
void check_means_in_range(const OutcomeMeans& means, const OutcomeRange& range);

// Population average treatment effect:
//   pi_c*(mu_c1 - mu_c0) + pi_a*(mu_a1 - mu_a0) + pi_n*(mu_n1 - mu_n0).
// Requires the nonidentified slots to be filled in.
// Throws MissingNonidentifiedMean otherwise.
double ate_decompose(const TypeShares& shares, const OutcomeMeans& means);

// Per-capita welfare gain of treat-all over treat-none: ATE minus cost.
double welfare_gain(const TypeShares& shares, const OutcomeMeans& means,
                    const WelfareSpec& spec);

}  // namespace ivlate::core
