#include "ivlate/decide.hpp"

#include <algorithm>
#include <cmath>

namespace ivlate::decide {

const char* to_string(Action action) {
    return action == Action::TreatAll ? "treat_all" : "treat_none";
}

WelfareMoments WelfareMoments::from_draws(const bayes::PosteriorDraws& draws) {
    if (draws.rows.empty()) throw InvalidConfig("cannot form moments from an empty draw set");
    WelfareMoments m;
    for (const auto& r : draws.rows) {
        m.e_pi_a += r[0];
        m.e_pi_n += r[1];
        m.e_pi_c += r[2];
        m.e_pia_mu_a1 += r[0] * r[3];
        m.e_pin_mu_n0 += r[1] * r[4];
        m.e_pic_mu_c1 += r[2] * r[5];
        m.e_pic_mu_c0 += r[2] * r[6];
    }
    const double n = static_cast<double>(draws.rows.size());
    m.e_pi_a /= n;
    m.e_pi_n /= n;
    m.e_pi_c /= n;
    m.e_pia_mu_a1 /= n;
    m.e_pin_mu_n0 /= n;
    m.e_pic_mu_c1 /= n;
    m.e_pic_mu_c0 /= n;
    return m;
}

WelfareMoments WelfareMoments::from_params(const core::TypeShares& shares,
                                           const core::OutcomeMeans& means) {
    shares.validate();
    WelfareMoments m;
    m.e_pi_a = shares.pi_a;
    m.e_pi_n = shares.pi_n;
    m.e_pi_c = shares.pi_c;
    m.e_pia_mu_a1 = shares.pi_a * means.mu_a1;
    m.e_pin_mu_n0 = shares.pi_n * means.mu_n0;
    m.e_pic_mu_c1 = shares.pi_c * means.mu_c1;
    m.e_pic_mu_c0 = shares.pi_c * means.mu_c0;
    return m;
}

void PriorMeanRectangle::validate(const core::OutcomeRange& range) const {
    range.validate();
    if (!(m_a0_lo <= m_a0_hi) || !(m_n1_lo <= m_n1_hi)) {
        throw InvalidConfig("rectangle intervals must satisfy lo <= hi");
    }
    if (!range.contains(m_a0_lo) || !range.contains(m_a0_hi) || !range.contains(m_n1_lo) ||
        !range.contains(m_n1_hi)) {
        throw OutOfRange("prior-mean rectangle leaves the outcome range");
    }
}

double expected_ate_at(const WelfareMoments& m, double m_a0, double m_n1) {
    return m.complier_gain() + m.e_pia_mu_a1 - m.e_pi_a * m_a0 + m.e_pi_n * m_n1 -
           m.e_pin_mu_n0;
}

double welfare_gain_at(const WelfareMoments& m, PriorMeanPoint point,
                       const core::WelfareSpec& spec) {
    return expected_ate_at(m, point.m_a0, point.m_n1) - spec.cost;
}

estimators::AteBounds posterior_moment_bounds(const WelfareMoments& m,
                                              const core::OutcomeRange& range) {
    range.validate();
    return estimators::AteBounds{expected_ate_at(m, range.y_hi, range.y_lo),
                                 expected_ate_at(m, range.y_lo, range.y_hi)};
}

namespace {

Action from_gain(double gain, Action tie_break) {
    if (gain > 0.0) return Action::TreatAll;
    if (gain < 0.0) return Action::TreatNone;
    return tie_break;
}

}  // namespace

BayesDecision bayes_rule(const WelfareMoments& m, PriorMeanPoint point,
                         const core::WelfareSpec& spec, const core::OutcomeRange& range,
                         Action tie_break) {
    range.validate();
    spec.validate();
    if (!range.contains(point.m_a0) || !range.contains(point.m_n1)) {
        throw OutOfRange("prior-mean point leaves the outcome range");
    }
    const double gain = welfare_gain_at(m, point, spec);
    return BayesDecision{from_gain(gain, tie_break), gain, point};
}

MinimaxDecision minimax_rule(const estimators::AteBounds& bounds, const core::WelfareSpec& spec,
                             Action tie_break) {
    spec.validate();
    const double worst = bounds.lo - spec.cost;
    return MinimaxDecision{from_gain(worst, tie_break), worst};
}

MinimaxRegretDecision minimax_regret_rule(const estimators::AteBounds& bounds,
                                          const core::WelfareSpec& spec, Action tie_break) {
    spec.validate();
    const double regret_treat = std::max(0.0, -(bounds.lo - spec.cost));
    const double regret_none = std::max(0.0, bounds.hi - spec.cost);
    Action action;
    if (regret_treat < regret_none) {
        action = Action::TreatAll;
    } else if (regret_treat > regret_none) {
        action = Action::TreatNone;
    } else {
        action = tie_break;
    }
    return MinimaxRegretDecision{action, regret_treat, regret_none};
}

namespace {

struct GainExtremes {
    double worst;
    double best;
    PriorMeanPoint arg_worst;  // (m_a0_hi, m_n1_lo)
    PriorMeanPoint arg_best;   // (m_a0_lo, m_n1_hi)
};

// D falls in m_a0 and rises in m_n1, so the rectangle extrema are these two
// corners regardless of the moment values (shares are nonnegative).
GainExtremes gain_extremes(const WelfareMoments& m, const PriorMeanRectangle& rect,
                           const core::WelfareSpec& spec) {
    GainExtremes e;
    e.arg_worst = PriorMeanPoint{rect.m_a0_hi, rect.m_n1_lo};
    e.arg_best = PriorMeanPoint{rect.m_a0_lo, rect.m_n1_hi};
    e.worst = welfare_gain_at(m, e.arg_worst, spec);
    e.best = welfare_gain_at(m, e.arg_best, spec);
    return e;
}

}  // namespace

GammaMaximinDecision gamma_maximin(const WelfareMoments& m, const PriorMeanRectangle& rect,
                                   const core::WelfareSpec& spec,
                                   const core::OutcomeRange& range, Action tie_break) {
    rect.validate(range);
    spec.validate();
    const GainExtremes e = gain_extremes(m, rect, spec);
    GammaMaximinDecision d;
    d.action = from_gain(e.worst, tie_break);
    d.gain_worst = e.worst;
    d.gain_best = e.best;
    d.welfare_treat_worst = m.e_pic_mu_c1 + m.e_pia_mu_a1 + m.e_pi_n * rect.m_n1_lo - spec.cost;
    d.welfare_none_worst = m.e_pic_mu_c0 + m.e_pi_a * rect.m_a0_lo + m.e_pin_mu_n0;
    d.corner_treat = e.arg_worst;
    d.corner_none = e.arg_best;
    return d;
}

GammaRegretDecision gamma_minimax_regret(const WelfareMoments& m,
                                         const PriorMeanRectangle& rect,
                                         const core::WelfareSpec& spec,
                                         const core::OutcomeRange& range, Action tie_break) {
    rect.validate(range);
    spec.validate();
    const GainExtremes e = gain_extremes(m, rect, spec);
    GammaRegretDecision d;
    d.regret_treat = std::max(0.0, -e.worst);
    d.regret_none = std::max(0.0, e.best);
    if (d.regret_treat < d.regret_none) {
        d.action = Action::TreatAll;
    } else if (d.regret_treat > d.regret_none) {
        d.action = Action::TreatNone;
    } else {
        d.action = tie_break;
    }
    d.gain_worst = e.worst;
    d.gain_best = e.best;
    d.corner_treat = e.arg_worst;
    d.corner_none = e.arg_best;
    return d;
}

SensitivityTable sensitivity_table(const WelfareMoments& m, const PriorMeanRectangle& rect,
                                   const core::WelfareSpec& spec, std::size_t grid_m_a0,
                                   std::size_t grid_m_n1) {
    spec.validate();
    if (!(rect.m_a0_lo <= rect.m_a0_hi) || !(rect.m_n1_lo <= rect.m_n1_hi)) {
        throw InvalidConfig("rectangle intervals must satisfy lo <= hi");
    }
    if (grid_m_a0 < 2 || grid_m_n1 < 2) {
        throw InvalidConfig("sensitivity grid needs at least 2 points per axis");
    }

    SensitivityTable table;
    table.grid_m_a0 = grid_m_a0;
    table.grid_m_n1 = grid_m_n1;
    table.frontier = AffineGain{
        m.complier_gain() + m.e_pia_mu_a1 - m.e_pin_mu_n0 - spec.cost,
        -m.e_pi_a,
        m.e_pi_n,
    };
    table.rows.reserve(grid_m_a0 * grid_m_n1);
    for (std::size_t i = 0; i < grid_m_a0; ++i) {
        const double fa = static_cast<double>(i) / static_cast<double>(grid_m_a0 - 1);
        const double m_a0 = rect.m_a0_lo + fa * (rect.m_a0_hi - rect.m_a0_lo);
        for (std::size_t j = 0; j < grid_m_n1; ++j) {
            const double fn = static_cast<double>(j) / static_cast<double>(grid_m_n1 - 1);
            const double m_n1 = rect.m_n1_lo + fn * (rect.m_n1_hi - rect.m_n1_lo);
            const double gain = welfare_gain_at(m, PriorMeanPoint{m_a0, m_n1}, spec);
            table.rows.push_back(
                SensitivityRow{m_a0, m_n1, gain, from_gain(gain, Action::TreatNone)});
        }
    }
    const GainExtremes e = gain_extremes(m, rect, spec);
    table.crosses_rectangle = e.worst < 0.0 && e.best > 0.0;
    return table;
}

DecisionReport decide_all(const WelfareMoments& m, const core::OutcomeRange& range,
                          const PriorMeanRectangle& rect, PriorMeanPoint bayes_point,
                          const core::WelfareSpec& spec, std::uint64_t posterior_digest,
                          Action tie_break) {
    DecisionReport report;
    report.moment_bounds = posterior_moment_bounds(m, range);
    report.bayes = bayes_rule(m, bayes_point, spec, range, tie_break);
    report.minimax_bounds = minimax_rule(report.moment_bounds, spec, tie_break);
    report.minimax_regret_bounds = minimax_regret_rule(report.moment_bounds, spec, tie_break);
    report.gamma_minimax = gamma_maximin(m, rect, spec, range, tie_break);
    report.gamma_minimax_regret = gamma_minimax_regret(m, rect, spec, range, tie_break);
    report.moments = m;
    report.rectangle = rect;
    report.welfare = spec;
    report.range = range;
    report.posterior_digest = posterior_digest;
    return report;
}

}  // namespace ivlate::decide
