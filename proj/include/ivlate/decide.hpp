#pragma once

#include <cstdint>
#include <vector>

#include "ivlate/bayes.hpp"
#include "ivlate/core.hpp"
#include "ivlate/errors.hpp"
#include "ivlate/estimators.hpp"

namespace ivlate::decide {

enum class Action { TreatAll, TreatNone };

const char* to_string(Action action);  // "treat_all" / "treat_none"

// Joint posterior moments of the share/mean products entering the welfare
// comparison. Computed jointly from draws, never as products of marginal
// means. Plug-in construction from point estimates covers the no-posterior
// path (degenerate posterior at the estimates).
struct WelfareMoments {
    double e_pi_a = 0.0;
    double e_pi_n = 0.0;
    double e_pi_c = 0.0;
    double e_pia_mu_a1 = 0.0;  // E[pi_a * mu_a1]
    double e_pin_mu_n0 = 0.0;
    double e_pic_mu_c1 = 0.0;
    double e_pic_mu_c0 = 0.0;

    double complier_gain() const { return e_pic_mu_c1 - e_pic_mu_c0; }

    static WelfareMoments from_draws(const bayes::PosteriorDraws& draws);
    static WelfareMoments from_params(const core::TypeShares& shares,
                                      const core::OutcomeMeans& means);
};

// A prior mean for each nonidentified slot. Because welfare is linear in the
// outcome means, a prior over (mu_a0, mu_n1) acts on every decision below
// only through this pair.
struct PriorMeanPoint {
    double m_a0 = 0.0;
    double m_n1 = 0.0;
};

// The prior class: all priors whose means fall in this axis-aligned
// rectangle. Any richer prior family with the same mean range induces
// identical decisions.
struct PriorMeanRectangle {
    double m_a0_lo = 0.0;
    double m_a0_hi = 0.0;
    double m_n1_lo = 0.0;
    double m_n1_hi = 0.0;

    // Throws InvalidConfig on inverted intervals, OutOfRange when an interval
    // leaves the outcome range.
    void validate(const core::OutcomeRange& range) const;
    bool singleton() const { return m_a0_lo == m_a0_hi && m_n1_lo == m_n1_hi; }
    PriorMeanPoint midpoint() const {
        return {0.5 * (m_a0_lo + m_a0_hi), 0.5 * (m_n1_lo + m_n1_hi)};
    }
    static PriorMeanRectangle at(PriorMeanPoint p) {
        return {p.m_a0, p.m_a0, p.m_n1, p.m_n1};
    }
};

// Posterior-expected ATE with the nonidentified means set to (m_a0, m_n1):
//   E[pi_c*mu_c1] - E[pi_c*mu_c0] + E[pi_a*mu_a1] - E[pi_a]*m_a0
//   + E[pi_n]*m_n1 - E[pi_n*mu_n0].
double expected_ate_at(const WelfareMoments& m, double m_a0, double m_n1);

// Welfare gain of treat-all over treat-none: expected_ate_at minus cost.
double welfare_gain_at(const WelfareMoments& m, PriorMeanPoint point,
                       const core::WelfareSpec& spec);

// ATE bounds implied by the posterior moments: nonidentified means pushed to
// the range extremes, exactly the attainable range of expected_ate_at.
estimators::AteBounds posterior_moment_bounds(const WelfareMoments& m,
                                              const core::OutcomeRange& range);

struct BayesDecision {
    Action action;
    double gain;  // welfare gain at the supplied point
    PriorMeanPoint point;
};

// TreatAll iff the gain at the point is positive; exact zero falls to
// tie_break. Throws OutOfRange when the point leaves the outcome range.
BayesDecision bayes_rule(const WelfareMoments& m, PriorMeanPoint point,
                         const core::WelfareSpec& spec, const core::OutcomeRange& range,
                         Action tie_break = Action::TreatNone);

struct MinimaxDecision {
    Action action;
    double worst_gain;  // bounds.lo - cost
};

// Treat only when even the worst-case gain is positive.
MinimaxDecision minimax_rule(const estimators::AteBounds& bounds,
                             const core::WelfareSpec& spec,
                             Action tie_break = Action::TreatNone);

struct MinimaxRegretDecision {
    Action action;
    double regret_treat;  // max(0, -(lo - cost))
    double regret_none;   // max(0, hi - cost)
};

// Treat when treating has strictly smaller worst-case regret; equivalently
// when the bounds midpoint exceeds the cost.
MinimaxRegretDecision minimax_regret_rule(const estimators::AteBounds& bounds,
                                          const core::WelfareSpec& spec,
                                          Action tie_break = Action::TreatNone);

// Worst case over the prior class of the welfare gain D. D is affine in
// (m_a0, m_n1) with coefficients (-E[pi_a], +E[pi_n]), so its extrema over
// the rectangle sit at two opposite corners:
//   minimizer (m_a0_hi, m_n1_lo), maximizer (m_a0_lo, m_n1_hi).
struct GammaMaximinDecision {
    Action action;
    double gain_worst;  // min over the rectangle of D
    double gain_best;   // max over the rectangle of D
    // Worst-case posterior-expected welfare LEVEL of each action over the
    // class (treat: minimized in m_n1; none: minimized in m_a0). Reported for
    // reference; the action compares worst-case gains, see the project notes.
    double welfare_treat_worst;
    double welfare_none_worst;
    PriorMeanPoint corner_treat;  // gain minimizer; also welfare-treat minimizer
    PriorMeanPoint corner_none;   // gain maximizer; also welfare-none minimizer
};

GammaMaximinDecision gamma_maximin(const WelfareMoments& m, const PriorMeanRectangle& rect,
                                   const core::WelfareSpec& spec,
                                   const core::OutcomeRange& range,
                                   Action tie_break = Action::TreatNone);

struct GammaRegretDecision {
    Action action;
    double regret_treat;  // max over the rectangle of max(0, -D)
    double regret_none;   // max over the rectangle of max(0, D)
    double gain_worst;
    double gain_best;
    PriorMeanPoint corner_treat;  // where treating incurs its largest regret
    PriorMeanPoint corner_none;
};

GammaRegretDecision gamma_minimax_regret(const WelfareMoments& m,
                                         const PriorMeanRectangle& rect,
                                         const core::WelfareSpec& spec,
                                         const core::OutcomeRange& range,
                                         Action tie_break = Action::TreatNone);

struct SensitivityRow {
    double m_a0;
    double m_n1;
    double gain;
    Action action;
};

// Coefficients of the affine gain map; the breakeven frontier is its zero
// set, a line in the (m_a0, m_n1) plane.
struct AffineGain {
    double intercept;
    double coef_m_a0;
    double coef_m_n1;
    double at(PriorMeanPoint p) const {
        return intercept + coef_m_a0 * p.m_a0 + coef_m_n1 * p.m_n1;
    }
};

struct SensitivityTable {
    std::vector<SensitivityRow> rows;  // m_a0-major order
    AffineGain frontier;
    bool crosses_rectangle;  // gain changes sign strictly inside
    std::size_t grid_m_a0;
    std::size_t grid_m_n1;
};

// Evaluates the gain and the point-Bayes action on an inclusive grid over
// the rectangle.
SensitivityTable sensitivity_table(const WelfareMoments& m, const PriorMeanRectangle& rect,
                                   const core::WelfareSpec& spec, std::size_t grid_m_a0,
                                   std::size_t grid_m_n1);

// All five rules on shared inputs, with the bounds-based rules applied to
// the posterior-moment bounds.
struct DecisionReport {
    BayesDecision bayes;
    MinimaxDecision minimax_bounds;
    MinimaxRegretDecision minimax_regret_bounds;
    GammaMaximinDecision gamma_minimax;
    GammaRegretDecision gamma_minimax_regret;
    estimators::AteBounds moment_bounds;
    WelfareMoments moments;
    PriorMeanRectangle rectangle;
    core::WelfareSpec welfare;
    core::OutcomeRange range;
    std::uint64_t posterior_digest = 0;  // 0 for plug-in moments
};

DecisionReport decide_all(const WelfareMoments& m, const core::OutcomeRange& range,
                          const PriorMeanRectangle& rect, PriorMeanPoint bayes_point,
                          const core::WelfareSpec& spec, std::uint64_t posterior_digest = 0,
                          Action tie_break = Action::TreatNone);

}  // namespace ivlate::decide
