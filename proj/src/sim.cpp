#include "ivlate/sim.hpp"

#include <array>
#include <cmath>

#include "ivlate/rng.hpp"

namespace ivlate::sim {

namespace {

bool is_prob(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

void ProductionConfig::validate() const {
    if (!std::isfinite(beta0) || !std::isfinite(beta2) || !std::isfinite(mu_logw) ||
        !std::isfinite(delta_w)) {
        throw InvalidConfig("production coefficients must be finite");
    }
    if (!(beta1 > 0.0 && beta1 < 1.0)) {
        throw InvalidConfig("beta1 must lie in (0,1)");
    }
    if (!(p_price > 0.0) || !std::isfinite(p_price)) {
        throw InvalidConfig("p_price must be positive");
    }
    if (!(sigma_eps >= 0.0) || !(sigma_u >= 0.0) || !std::isfinite(sigma_eps) ||
        !std::isfinite(sigma_u)) {
        throw InvalidConfig("sigma_eps and sigma_u must be nonnegative");
    }
    if (!(urban_share > 0.0 && urban_share < 1.0)) {
        throw InvalidConfig("urban_share must lie in (0,1)");
    }
    if (n == 0) throw InvalidConfig("n must be positive");
}

ObservationalSample simulate_production(const ProductionConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);

    ObservationalSample s;
    s.y_obs.reserve(cfg.n);
    s.x_obs.reserve(cfg.n);
    s.v.reserve(cfg.n);
    s.log_w.reserve(cfg.n);

    const double log_pb = std::log(cfg.p_price * cfg.beta1);
    const double inv = 1.0 / (1.0 - cfg.beta1);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const double v = (rng.bernoulli(cfg.urban_share) ? 1.0 : 0.0) - cfg.urban_share;
        const double log_w = cfg.mu_logw + cfg.delta_w * v + rng.normal(0.0, cfg.sigma_u);
        const double alpha = cfg.beta2 * v + rng.normal(0.0, cfg.sigma_eps);
        const double x = inv * (cfg.beta0 + log_pb - log_w + alpha);
        const double y = cfg.beta0 + cfg.beta1 * x + alpha;
        s.v.push_back(v);
        s.log_w.push_back(log_w);
        s.x_obs.push_back(x);
        s.y_obs.push_back(y);
    }
    return s;
}

double ols_plim_oracle(const ProductionConfig& cfg) {
    cfg.validate();
    const double var_v = cfg.urban_share * (1.0 - cfg.urban_share);
    const double a = cfg.beta2 * cfg.beta2 * var_v + cfg.sigma_eps * cfg.sigma_eps;
    const double c = cfg.delta_w * cfg.beta2 * var_v;
    const double l = cfg.delta_w * cfg.delta_w * var_v + cfg.sigma_u * cfg.sigma_u;
    const double var_x = a + l - 2.0 * c;  // up to the (1-beta1)^-2 factor
    if (!(var_x > 0.0)) {
        throw InvalidConfig("config implies a degenerate regressor: Var(x) = 0");
    }
    return cfg.beta1 + (1.0 - cfg.beta1) * (a - c) / var_x;
}

void TrialConfig::validate() const {
    shares.validate();
    for (double p : {p_a1, p_a0, p_n1, p_n0, p_c1, p_c0}) {
        if (!is_prob(p)) throw InvalidConfig("outcome probabilities must lie in [0,1]");
    }
    if (!(z_share > 0.0 && z_share < 1.0)) {
        throw InvalidConfig("z_share must lie in (0,1)");
    }
    if (n == 0) throw InvalidConfig("n must be positive");
}

TrialSample simulate_trial(const TrialConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);

    const std::array<double, 3> shares = {cfg.shares.pi_a, cfg.shares.pi_n, cfg.shares.pi_c};
    // outcome mean by (type, d)
    const double p_by_type_d[3][2] = {
        {cfg.p_a0, cfg.p_a1}, {cfg.p_n0, cfg.p_n1}, {cfg.p_c0, cfg.p_c1}};

    TrialSample s;
    s.z.reserve(cfg.n);
    s.d.reserve(cfg.n);
    s.y.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const std::size_t type = rng.categorical(shares);
        const std::uint8_t z = rng.bernoulli(cfg.z_share) ? 1 : 0;
        std::uint8_t d = 0;
        switch (type) {
            case 0: d = 1; break;   // always-taker
            case 1: d = 0; break;   // never-taker
            default: d = z; break;  // complier
        }
        const double y = rng.bernoulli(p_by_type_d[type][d]) ? 1.0 : 0.0;
        s.z.push_back(z);
        s.d.push_back(d);
        s.y.push_back(y);
    }
    return s;
}

std::pair<core::TypeShares, core::OutcomeMeans> true_params(const TrialConfig& cfg) {
    cfg.validate();
    core::OutcomeMeans means;
    means.mu_a1 = cfg.p_a1;
    means.mu_n0 = cfg.p_n0;
    means.mu_c1 = cfg.p_c1;
    means.mu_c0 = cfg.p_c0;
    means.mu_a0 = cfg.p_a0;
    means.mu_n1 = cfg.p_n1;
    return {cfg.shares, means};
}

}  // namespace ivlate::sim
