#include <doctest.h>

#include <array>
#include <cmath>

#include "helpers.hpp"
#include "ivlate/decide.hpp"
#include "ivlate/rng.hpp"

using namespace ivlate;

namespace {

// Moments of the canonical hand configuration: shares (0.2, 0.3, 0.5),
// p_a1 = 0.6, p_n0 = 0.4, p_c1 = 0.7, p_c0 = 0.5.
decide::WelfareMoments hand_moments() {
    core::TypeShares shares{0.2, 0.3, 0.5};
    core::OutcomeMeans means;
    means.mu_a1 = 0.6;
    means.mu_n0 = 0.4;
    means.mu_c1 = 0.7;
    means.mu_c0 = 0.5;
    return decide::WelfareMoments::from_params(shares, means);
}

const core::OutcomeRange kUnit{0.0, 1.0};

decide::WelfareMoments random_moments(Rng& rng, const core::OutcomeRange& range) {
    std::array<double, 3> alpha = {1.0, 1.0, 1.0};
    std::array<double, 3> shares{};
    rng.dirichlet(alpha, shares);
    const auto draw_in = [&] { return range.y_lo + range.width() * rng.uniform01(); };
    core::OutcomeMeans means;
    means.mu_a1 = draw_in();
    means.mu_n0 = draw_in();
    means.mu_c1 = draw_in();
    means.mu_c0 = draw_in();
    return decide::WelfareMoments::from_params({shares[0], shares[1], shares[2]}, means);
}

decide::PriorMeanRectangle random_rectangle(Rng& rng, double lo, double hi) {
    const auto draw = [&] { return lo + (hi - lo) * rng.uniform01(); };
    double a = draw(), b = draw(), c = draw(), d = draw();
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    return {a, b, c, d};
}

}  // namespace

TEST_CASE("rectangle validation") {
    decide::PriorMeanRectangle rect{0.5, 0.7, 0.3, 0.5};
    CHECK_NOTHROW(rect.validate(kUnit));
    CHECK_FALSE(rect.singleton());
    CHECK(rect.midpoint().m_a0 == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(rect.midpoint().m_n1 == doctest::Approx(0.4).epsilon(1e-12));

    decide::PriorMeanRectangle inverted{0.7, 0.5, 0.3, 0.5};
    CHECK_THROWS_AS(inverted.validate(kUnit), InvalidConfig);

    decide::PriorMeanRectangle outside{0.5, 1.2, 0.3, 0.5};
    CHECK_THROWS_AS(outside.validate(kUnit), OutOfRange);

    const decide::PriorMeanRectangle point = decide::PriorMeanRectangle::at({0.4, 0.6});
    CHECK(point.singleton());
}

TEST_CASE("joint moments come from draws, not products of marginals") {
    bayes::PosteriorDraws draws;
    // two draws with strong share/mean dependence
    draws.rows.push_back({0.8, 0.1, 0.1, 1.0, 0.0, 0.5, 0.5});
    draws.rows.push_back({0.2, 0.4, 0.4, 0.0, 1.0, 0.5, 0.5});
    const decide::WelfareMoments m = decide::WelfareMoments::from_draws(draws);
    CHECK(m.e_pi_a == doctest::Approx(0.5).epsilon(1e-12));
    // E[pi_a * p_a1] = (0.8*1.0 + 0.2*0.0)/2 = 0.4, not 0.5 * 0.5
    CHECK(m.e_pia_mu_a1 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(m.e_pin_mu_n0 == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(m.e_pic_mu_c1 == doctest::Approx(0.25 * 0.5).epsilon(1e-12));
    CHECK(m.complier_gain() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gain map matches the welfare identity at hand values") {
    const decide::WelfareMoments m = hand_moments();
    // D(0.6, 0.4) = 0.1 + 0.12 - 0.2*0.6 + 0.3*0.4 - 0.12
    CHECK(decide::expected_ate_at(m, 0.6, 0.4) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(decide::welfare_gain_at(m, {0.6, 0.4}, core::WelfareSpec{0.05}) ==
          doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("moment bounds agree with the range-corner welfare evaluations") {
    const decide::WelfareMoments m = hand_moments();
    const estimators::AteBounds b = decide::posterior_moment_bounds(m, kUnit);
    CHECK(std::fabs(b.lo - (-0.1)) <= 1e-12);
    CHECK(std::fabs(b.hi - 0.4) <= 1e-12);
    CHECK(b.lo == decide::expected_ate_at(m, kUnit.y_hi, kUnit.y_lo));
    CHECK(b.hi == decide::expected_ate_at(m, kUnit.y_lo, kUnit.y_hi));
}

TEST_CASE("point rule: identified-only population") {
    decide::WelfareMoments m;
    m.e_pi_c = 1.0;
    m.e_pic_mu_c1 = 0.6;
    m.e_pic_mu_c0 = 0.5;
    const decide::BayesDecision d = decide::bayes_rule(m, {0.5, 0.5}, core::WelfareSpec{}, kUnit);
    CHECK(d.action == decide::Action::TreatAll);
    CHECK(d.gain == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("point rule: hand moments give gain 0.1") {
    const decide::BayesDecision d =
        decide::bayes_rule(hand_moments(), {0.6, 0.4}, core::WelfareSpec{}, kUnit);
    CHECK(d.action == decide::Action::TreatAll);
    CHECK(d.gain == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d.point.m_a0 == 0.6);
}

TEST_CASE("point rule: exact ties defer to the tie-break") {
    decide::WelfareMoments m;  // all zeros: D == 0 at any point
    const decide::BayesDecision none = decide::bayes_rule(m, {0.5, 0.5}, core::WelfareSpec{}, kUnit);
    CHECK(none.action == decide::Action::TreatNone);
    const decide::BayesDecision all = decide::bayes_rule(m, {0.5, 0.5}, core::WelfareSpec{}, kUnit,
                                                         decide::Action::TreatAll);
    CHECK(all.action == decide::Action::TreatAll);
}

TEST_CASE("point rule rejects points outside the outcome range") {
    CHECK_THROWS_AS(decide::bayes_rule(hand_moments(), {1.2, 0.4}, core::WelfareSpec{}, kUnit),
                    OutOfRange);
}

TEST_CASE("bounds maximin rule") {
    CHECK(decide::minimax_rule({0.05, 0.4}, core::WelfareSpec{}).action ==
          decide::Action::TreatAll);
    CHECK(decide::minimax_rule({-0.1, 0.4}, core::WelfareSpec{}).action ==
          decide::Action::TreatNone);
    CHECK(decide::minimax_rule({-0.1, 0.4}, core::WelfareSpec{-0.2}).action ==
          decide::Action::TreatAll);
    const decide::MinimaxDecision d = decide::minimax_rule({0.05, 0.4}, core::WelfareSpec{});
    CHECK(d.worst_gain == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("bounds regret rule") {
    const decide::MinimaxRegretDecision d =
        decide::minimax_regret_rule({-0.1, 0.4}, core::WelfareSpec{});
    CHECK(d.action == decide::Action::TreatAll);
    CHECK(d.regret_treat == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d.regret_none == doctest::Approx(0.4).epsilon(1e-12));

    CHECK(decide::minimax_regret_rule({-0.4, 0.1}, core::WelfareSpec{}).action ==
          decide::Action::TreatNone);
    // symmetric about the cost: exact tie
    CHECK(decide::minimax_regret_rule({-0.2, 0.4}, core::WelfareSpec{0.1}).action ==
          decide::Action::TreatNone);
}

TEST_CASE("midpoint equivalence for the bounds regret rule") {
    Rng rng(909);
    for (int rep = 0; rep < 500; ++rep) {
        double lo = rng.normal(), hi = rng.normal();
        if (lo > hi) std::swap(lo, hi);
        const double cost = rng.normal();
        const decide::MinimaxRegretDecision d =
            decide::minimax_regret_rule({lo, hi}, core::WelfareSpec{cost});
        const bool treat = 0.5 * (lo + hi) > cost;
        CHECK(d.action == (treat ? decide::Action::TreatAll : decide::Action::TreatNone));
    }
}

TEST_CASE("interval maximin: hand example") {
    const decide::PriorMeanRectangle rect{0.5, 0.7, 0.3, 0.5};
    const decide::GammaMaximinDecision d =
        decide::gamma_maximin(hand_moments(), rect, core::WelfareSpec{}, kUnit);
    CHECK(d.action == decide::Action::TreatAll);
    CHECK(d.welfare_treat_worst == doctest::Approx(0.56).epsilon(1e-12));
    CHECK(d.welfare_none_worst == doctest::Approx(0.47).epsilon(1e-12));
    CHECK(d.gain_worst == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(d.gain_best == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(d.corner_treat.m_a0 == 0.7);
    CHECK(d.corner_treat.m_n1 == 0.3);
    CHECK(d.corner_none.m_a0 == 0.5);
    CHECK(d.corner_none.m_n1 == 0.5);
}

TEST_CASE("interval regret: hand example") {
    // Full unit rectangle on the hand moments: gain range [-0.1, 0.4].
    const decide::PriorMeanRectangle rect{0.0, 1.0, 0.0, 1.0};
    const decide::GammaRegretDecision d =
        decide::gamma_minimax_regret(hand_moments(), rect, core::WelfareSpec{}, kUnit);
    CHECK(d.action == decide::Action::TreatAll);
    CHECK(d.regret_treat == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d.regret_none == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(d.gain_worst == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(d.gain_best == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("singleton rectangles collapse the interval rules to the point rule") {
    Rng rng(1001);
    for (int rep = 0; rep < 300; ++rep) {
        const decide::WelfareMoments m = random_moments(rng, kUnit);
        const decide::PriorMeanPoint p{rng.uniform01(), rng.uniform01()};
        const decide::PriorMeanRectangle rect = decide::PriorMeanRectangle::at(p);
        const decide::Action bayes =
            decide::bayes_rule(m, p, core::WelfareSpec{}, kUnit).action;
        CHECK(decide::gamma_maximin(m, rect, core::WelfareSpec{}, kUnit).action == bayes);
        CHECK(decide::gamma_minimax_regret(m, rect, core::WelfareSpec{}, kUnit).action == bayes);
    }
}

TEST_CASE("full rectangle reproduces the bounds rules exactly") {
    Rng rng(1101);
    for (int rep = 0; rep < 300; ++rep) {
        const double y_lo = -0.5 + rng.uniform01();
        const core::OutcomeRange range{y_lo, y_lo + 0.2 + rng.uniform01()};
        const decide::WelfareMoments m = random_moments(rng, range);
        const core::WelfareSpec spec{0.4 * (rng.uniform01() - 0.5)};
        const decide::PriorMeanRectangle full{range.y_lo, range.y_hi, range.y_lo, range.y_hi};
        const estimators::AteBounds bounds = decide::posterior_moment_bounds(m, range);

        const decide::GammaMaximinDecision g = decide::gamma_maximin(m, full, spec, range);
        const decide::MinimaxDecision mm = decide::minimax_rule(bounds, spec);
        CHECK(g.action == mm.action);
        CHECK(g.gain_worst == mm.worst_gain);

        const decide::GammaRegretDecision gr = decide::gamma_minimax_regret(m, full, spec, range);
        const decide::MinimaxRegretDecision mr = decide::minimax_regret_rule(bounds, spec);
        CHECK(gr.action == mr.action);
        CHECK(gr.regret_treat == mr.regret_treat);
        CHECK(gr.regret_none == mr.regret_none);
    }
}

TEST_CASE("tighter prior classes are never judged more pessimistically") {
    Rng rng(1201);
    for (int rep = 0; rep < 300; ++rep) {
        const decide::WelfareMoments m = random_moments(rng, kUnit);
        const decide::PriorMeanRectangle outer = random_rectangle(rng, 0.0, 1.0);
        decide::PriorMeanRectangle inner;
        inner.m_a0_lo = outer.m_a0_lo + (outer.m_a0_hi - outer.m_a0_lo) * 0.25;
        inner.m_a0_hi = outer.m_a0_lo + (outer.m_a0_hi - outer.m_a0_lo) * 0.75;
        inner.m_n1_lo = outer.m_n1_lo + (outer.m_n1_hi - outer.m_n1_lo) * 0.25;
        inner.m_n1_hi = outer.m_n1_lo + (outer.m_n1_hi - outer.m_n1_lo) * 0.75;
        const core::WelfareSpec spec{0.0};

        const decide::GammaMaximinDecision g1 = decide::gamma_maximin(m, inner, spec, kUnit);
        const decide::GammaMaximinDecision g2 = decide::gamma_maximin(m, outer, spec, kUnit);
        CHECK(g1.gain_worst >= g2.gain_worst - 1e-12);
        CHECK(g1.welfare_treat_worst >= g2.welfare_treat_worst - 1e-12);
        CHECK(g1.welfare_none_worst >= g2.welfare_none_worst - 1e-12);

        const decide::GammaRegretDecision r1 = decide::gamma_minimax_regret(m, inner, spec, kUnit);
        const decide::GammaRegretDecision r2 = decide::gamma_minimax_regret(m, outer, spec, kUnit);
        CHECK(r1.regret_treat <= r2.regret_treat + 1e-12);
        CHECK(r1.regret_none <= r2.regret_none + 1e-12);
    }
}

TEST_CASE("corner evaluations dominate a dense grid scan") {
    Rng rng(1301);
    for (int rep = 0; rep < 50; ++rep) {
        const decide::WelfareMoments m = random_moments(rng, kUnit);
        const decide::PriorMeanRectangle rect = random_rectangle(rng, 0.0, 1.0);
        const core::WelfareSpec spec{0.0};
        const decide::GammaMaximinDecision g = decide::gamma_maximin(m, rect, spec, kUnit);
        for (int i = 0; i <= 20; ++i) {
            for (int j = 0; j <= 20; ++j) {
                const decide::PriorMeanPoint p{
                    rect.m_a0_lo + (rect.m_a0_hi - rect.m_a0_lo) * i / 20.0,
                    rect.m_n1_lo + (rect.m_n1_hi - rect.m_n1_lo) * j / 20.0};
                const double gain = decide::welfare_gain_at(m, p, spec);
                CHECK(gain >= g.gain_worst - 1e-10);
                CHECK(gain <= g.gain_best + 1e-10);
            }
        }
    }
}

TEST_CASE("actions are invariant to rescaling the outcome units") {
    Rng rng(1401);
    for (int rep = 0; rep < 200; ++rep) {
        const decide::WelfareMoments m = random_moments(rng, kUnit);
        const decide::PriorMeanRectangle rect = random_rectangle(rng, 0.0, 1.0);
        const core::WelfareSpec spec{0.3 * (rng.uniform01() - 0.5)};
        const decide::PriorMeanPoint point = rect.midpoint();

        for (double lambda : {0.25, 4.0}) {
            decide::WelfareMoments ms = m;
            ms.e_pia_mu_a1 *= lambda;
            ms.e_pin_mu_n0 *= lambda;
            ms.e_pic_mu_c1 *= lambda;
            ms.e_pic_mu_c0 *= lambda;
            const decide::PriorMeanRectangle rs{lambda * rect.m_a0_lo, lambda * rect.m_a0_hi,
                                                lambda * rect.m_n1_lo, lambda * rect.m_n1_hi};
            const core::OutcomeRange ranges{lambda * kUnit.y_lo, lambda * kUnit.y_hi};
            const core::WelfareSpec specs{lambda * spec.cost};
            const decide::PriorMeanPoint points{lambda * point.m_a0, lambda * point.m_n1};

            CHECK(decide::bayes_rule(ms, points, specs, ranges).action ==
                  decide::bayes_rule(m, point, spec, kUnit).action);
            CHECK(decide::gamma_maximin(ms, rs, specs, ranges).action ==
                  decide::gamma_maximin(m, rect, spec, kUnit).action);
            CHECK(decide::gamma_minimax_regret(ms, rs, specs, ranges).action ==
                  decide::gamma_minimax_regret(m, rect, spec, kUnit).action);
            const estimators::AteBounds bs = decide::posterior_moment_bounds(ms, ranges);
            const estimators::AteBounds b = decide::posterior_moment_bounds(m, kUnit);
            CHECK(decide::minimax_rule(bs, specs).action == decide::minimax_rule(b, spec).action);
            CHECK(decide::minimax_regret_rule(bs, specs).action ==
                  decide::minimax_regret_rule(b, spec).action);
        }
    }
}

TEST_CASE("sensitivity table spans the rectangle in row-major order") {
    const decide::WelfareMoments m = hand_moments();
    const decide::PriorMeanRectangle rect{0.5, 0.7, 0.3, 0.5};
    const decide::SensitivityTable t =
        decide::sensitivity_table(m, rect, core::WelfareSpec{}, 3, 5);
    REQUIRE(t.rows.size() == 15);
    CHECK(t.grid_m_a0 == 3);
    CHECK(t.grid_m_n1 == 5);
    CHECK(t.rows.front().m_a0 == 0.5);
    CHECK(t.rows.front().m_n1 == 0.3);
    CHECK(t.rows.back().m_a0 == 0.7);
    CHECK(t.rows.back().m_n1 == 0.5);
    // m_a0-major: the second row advances m_n1
    CHECK(t.rows[1].m_a0 == 0.5);
    CHECK(t.rows[1].m_n1 == doctest::Approx(0.35).epsilon(1e-12));
    for (const decide::SensitivityRow& row : t.rows) {
        CHECK(std::fabs(t.frontier.at({row.m_a0, row.m_n1}) - row.gain) <= 1e-12);
        const decide::Action expect = row.gain > 0 ? decide::Action::TreatAll
                                                   : decide::Action::TreatNone;
        CHECK(row.action == expect);
    }
    // every gain in this rectangle is positive, so no frontier crossing
    CHECK_FALSE(t.crosses_rectangle);

    const decide::SensitivityTable wide = decide::sensitivity_table(
        m, decide::PriorMeanRectangle{0.0, 1.0, 0.0, 1.0}, core::WelfareSpec{}, 5, 5);
    CHECK(wide.crosses_rectangle);
    bool saw_treat = false, saw_none = false;
    for (const decide::SensitivityRow& row : wide.rows) {
        saw_treat = saw_treat || row.action == decide::Action::TreatAll;
        saw_none = saw_none || row.action == decide::Action::TreatNone;
    }
    CHECK(saw_treat);
    CHECK(saw_none);

    CHECK_THROWS_AS(decide::sensitivity_table(m, rect, core::WelfareSpec{}, 1, 5),
                    InvalidConfig);
}

TEST_CASE("the combined report uses one set of inputs everywhere") {
    const decide::WelfareMoments m = hand_moments();
    const decide::PriorMeanRectangle rect{0.5, 0.7, 0.3, 0.5};
    const core::WelfareSpec spec{0.02};
    const decide::DecisionReport r =
        decide::decide_all(m, kUnit, rect, rect.midpoint(), spec, 0xabcdef);

    CHECK(r.posterior_digest == 0xabcdef);
    CHECK(r.bayes.action ==
          decide::bayes_rule(m, rect.midpoint(), spec, kUnit).action);
    CHECK(r.bayes.gain ==
          decide::welfare_gain_at(m, rect.midpoint(), spec));
    const estimators::AteBounds bounds = decide::posterior_moment_bounds(m, kUnit);
    CHECK(r.moment_bounds.lo == bounds.lo);
    CHECK(r.moment_bounds.hi == bounds.hi);
    CHECK(r.minimax_bounds.action == decide::minimax_rule(bounds, spec).action);
    CHECK(r.minimax_regret_bounds.regret_none ==
          decide::minimax_regret_rule(bounds, spec).regret_none);
    CHECK(r.gamma_minimax.action == decide::gamma_maximin(m, rect, spec, kUnit).action);
    CHECK(r.gamma_minimax_regret.regret_treat ==
          decide::gamma_minimax_regret(m, rect, spec, kUnit).regret_treat);
    CHECK(r.rectangle.m_a0_lo == rect.m_a0_lo);
    CHECK(r.welfare.cost == spec.cost);
    CHECK(r.range.y_hi == kUnit.y_hi);
}

TEST_CASE("action names are stable") {
    CHECK(std::string(decide::to_string(decide::Action::TreatAll)) == "treat_all");
    CHECK(std::string(decide::to_string(decide::Action::TreatNone)) == "treat_none");
}
