#include "ivlate/core.hpp"

#include <cmath>
#include <string>

namespace ivlate::core {

namespace {

bool in_unit_interval(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

void TypeShares::validate() const {
    if (!in_unit_interval(pi_a) || !in_unit_interval(pi_n) || !in_unit_interval(pi_c)) {
        throw InvalidConfig("type shares must lie in [0,1]");
    }
    const double sum = pi_a + pi_n + pi_c;
    if (std::abs(sum - 1.0) > kShareSumTol) {
        throw InvalidConfig("type shares must sum to 1, got " + std::to_string(sum));
    }
}

void OutcomeRange::validate() const {
    if (!std::isfinite(y_lo) || !std::isfinite(y_hi)) {
        throw InvalidConfig("outcome range endpoints must be finite");
    }
    if (!(y_lo < y_hi)) {
        throw InvalidConfig("outcome range must satisfy y_lo < y_hi");
    }
}

void WelfareSpec::validate() const {
    if (!std::isfinite(cost)) throw InvalidConfig("treatment cost must be finite");
}

void check_means_in_range(const OutcomeMeans& means, const OutcomeRange& range) {
    range.validate();
    const auto check = [&](double m, const char* slot) {
        if (!range.contains(m)) {
            throw InvalidConfig(std::string(slot) + " lies outside the outcome range");
        }
    };
    check(means.mu_a1, "mu_a1");
    check(means.mu_n0, "mu_n0");
    check(means.mu_c1, "mu_c1");
    check(means.mu_c0, "mu_c0");
    if (means.mu_a0) check(*means.mu_a0, "mu_a0");
    if (means.mu_n1) check(*means.mu_n1, "mu_n1");
}

double ate_decompose(const TypeShares& shares, const OutcomeMeans& means) {
    shares.validate();
    if (!means.mu_a0) {
        throw MissingNonidentifiedMean("mu_a0 (always-taker control mean) is not set");
    }
    if (!means.mu_n1) {
        throw MissingNonidentifiedMean("mu_n1 (never-taker treated mean) is not set");
    }
    return shares.pi_c * (means.mu_c1 - means.mu_c0) +
           shares.pi_a * (means.mu_a1 - *means.mu_a0) +
           shares.pi_n * (*means.mu_n1 - means.mu_n0);
}

double welfare_gain(const TypeShares& shares, const OutcomeMeans& means,
                    const WelfareSpec& spec) {
    spec.validate();
    return ate_decompose(shares, means) - spec.cost;
}

}  // namespace ivlate::core
