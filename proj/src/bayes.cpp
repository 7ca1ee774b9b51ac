#include "ivlate/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "ivlate/rng.hpp"

namespace ivlate::bayes {

namespace {

constexpr double kInitClamp = 1e-3;

double clamp_open(double x) {
    if (!(x > kInitClamp)) return kInitClamp;
    if (!(x < 1.0 - kInitClamp)) return 1.0 - kInitClamp;
    return x;
}

}  // namespace

void BetaShape::validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidConfig("Beta shape parameters must be positive");
    }
}

void PriorSpec::validate() const {
    for (double a : dirichlet_shares) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw InvalidConfig("Dirichlet concentration parameters must be positive");
        }
    }
    p_a1.validate();
    p_n0.validate();
    p_c1.validate();
    p_c0.validate();
}

void GibbsConfig::validate() const {
    if (n_draws == 0) throw InvalidConfig("n_draws must be positive");
    if (thin == 0) throw InvalidConfig("thin must be positive");
}

TrialCounts TrialCounts::from_sample(const sim::TrialSample& trial) {
    const std::size_t nrows = trial.z.size();
    if (trial.d.size() != nrows || trial.y.size() != nrows) {
        throw InvalidConfig("trial columns have mismatched lengths");
    }
    TrialCounts counts;
    for (std::size_t i = 0; i < nrows; ++i) {
        const double y = trial.y[i];
        if (y != 0.0 && y != 1.0) {
            throw NonBinaryOutcome("outcome must be exactly 0 or 1");
        }
        ++counts.n[trial.z[i] ? 1 : 0][trial.d[i] ? 1 : 0][y == 1.0 ? 1 : 0];
    }
    return counts;
}

std::uint64_t TrialCounts::digest() const {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (int z = 0; z < 2; ++z) {
        for (int d = 0; d < 2; ++d) {
            for (int y = 0; y < 2; ++y) h = splitmix64(h + n[z][d][y]);
        }
    }
    return h;
}

namespace {

struct GibbsState {
    std::array<double, 3> shares;  // (pi_a, pi_n, pi_c)
    double p_a1;
    double p_n0;
    double p_c1;
    double p_c0;
};

GibbsState initial_state(const TrialCounts& c) {
    const double arm0 = static_cast<double>(c.arm(0));
    const double arm1 = static_cast<double>(c.arm(1));
    const double pi_a_raw = static_cast<double>(c.cell(0, 1)) / arm0;
    const double pi_n_raw = static_cast<double>(c.cell(1, 0)) / arm1;
    const double pi_c_raw = 1.0 - pi_a_raw - pi_n_raw;

    GibbsState s;
    s.shares = {clamp_open(pi_a_raw), clamp_open(pi_n_raw), clamp_open(pi_c_raw)};
    const double total = s.shares[0] + s.shares[1] + s.shares[2];
    for (double& v : s.shares) v /= total;

    auto cell_mean = [&c](int z, int d) {
        const std::uint64_t m = c.cell(z, d);
        return m > 0 ? static_cast<double>(c.n[z][d][1]) / static_cast<double>(m) : 0.5;
    };
    s.p_a1 = clamp_open(cell_mean(0, 1));
    s.p_n0 = clamp_open(cell_mean(1, 0));
    if (pi_c_raw > kInitClamp) {
        const double yd1 = static_cast<double>(c.n[1][1][1]) / arm1;
        const double yd0 = static_cast<double>(c.n[0][1][1]) / arm0;
        const double yu0 = static_cast<double>(c.n[0][0][1]) / arm0;
        const double yu1 = static_cast<double>(c.n[1][0][1]) / arm1;
        s.p_c1 = clamp_open((yd1 - yd0) / pi_c_raw);
        s.p_c0 = clamp_open((yu0 - yu1) / pi_c_raw);
    } else {
        s.p_c1 = clamp_open(cell_mean(1, 1));
        s.p_c0 = clamp_open(cell_mean(0, 0));
    }
    return s;
}

}  // namespace

PosteriorDraws gibbs_posterior(const TrialCounts& counts, const PriorSpec& prior,
                               const GibbsConfig& cfg) {
    prior.validate();
    cfg.validate();
    if (counts.arm(0) == 0) throw EmptyArm("no rows with z=0");
    if (counts.arm(1) == 0) throw EmptyArm("no rows with z=1");

    Rng rng(cfg.seed);
    GibbsState st = initial_state(counts);

    const auto sweep = [&]() {
        // Mixed-cell type imputation. a11[y]: always-takers imputed in cell
        // (z=1,d=1) with outcome y; n00nev[y]: never-takers in (z=0,d=0).
        std::uint64_t a11[2];
        std::uint64_t n00nev[2];
        for (int y = 0; y < 2; ++y) {
            const double la = y ? st.p_a1 : 1.0 - st.p_a1;
            const double lc = y ? st.p_c1 : 1.0 - st.p_c1;
            const double wa = st.shares[0] * la;
            const double wc = st.shares[2] * lc;
            const double q = wa + wc > 0.0 ? wa / (wa + wc) : 0.5;
            std::uint64_t hits = 0;
            for (std::uint64_t i = 0; i < counts.n[1][1][y]; ++i) {
                hits += rng.bernoulli(q) ? 1 : 0;
            }
            a11[y] = hits;
        }
        for (int y = 0; y < 2; ++y) {
            const double ln = y ? st.p_n0 : 1.0 - st.p_n0;
            const double lc = y ? st.p_c0 : 1.0 - st.p_c0;
            const double wn = st.shares[1] * ln;
            const double wc = st.shares[2] * lc;
            const double q = wn + wc > 0.0 ? wn / (wn + wc) : 0.5;
            std::uint64_t hits = 0;
            for (std::uint64_t i = 0; i < counts.n[0][0][y]; ++i) {
                hits += rng.bernoulli(q) ? 1 : 0;
            }
            n00nev[y] = hits;
        }

        const double count_a = static_cast<double>(counts.cell(0, 1) + a11[0] + a11[1]);
        const double count_n = static_cast<double>(counts.cell(1, 0) + n00nev[0] + n00nev[1]);
        const double count_c = static_cast<double>((counts.cell(1, 1) - a11[0] - a11[1]) +
                                                   (counts.cell(0, 0) - n00nev[0] - n00nev[1]));

        const std::array<double, 3> alpha = {prior.dirichlet_shares[0] + count_a,
                                             prior.dirichlet_shares[1] + count_n,
                                             prior.dirichlet_shares[2] + count_c};
        rng.dirichlet(alpha, st.shares);

        const double a11y1 = static_cast<double>(a11[1]);
        const double a11y0 = static_cast<double>(a11[0]);
        st.p_a1 = rng.beta(prior.p_a1.a + static_cast<double>(counts.n[0][1][1]) + a11y1,
                           prior.p_a1.b + static_cast<double>(counts.n[0][1][0]) + a11y0);
        st.p_n0 = rng.beta(prior.p_n0.a + static_cast<double>(counts.n[1][0][1] + n00nev[1]),
                           prior.p_n0.b + static_cast<double>(counts.n[1][0][0] + n00nev[0]));
        st.p_c1 = rng.beta(prior.p_c1.a + static_cast<double>(counts.n[1][1][1] - a11[1]),
                           prior.p_c1.b + static_cast<double>(counts.n[1][1][0] - a11[0]));
        st.p_c0 = rng.beta(prior.p_c0.a + static_cast<double>(counts.n[0][0][1] - n00nev[1]),
                           prior.p_c0.b + static_cast<double>(counts.n[0][0][0] - n00nev[0]));
    };

    PosteriorDraws out;
    out.rows.reserve(cfg.n_draws);
    const std::size_t total_sweeps = cfg.burn_in + cfg.n_draws * cfg.thin;
    for (std::size_t s = 1; s <= total_sweeps; ++s) {
        sweep();
        if (s > cfg.burn_in && (s - cfg.burn_in) % cfg.thin == 0) {
            out.rows.push_back({st.shares[0], st.shares[1], st.shares[2], st.p_a1, st.p_n0,
                                st.p_c1, st.p_c0});
        }
    }
    out.provenance = Provenance{prior, cfg, counts.digest()};
    return out;
}

PosteriorDraws gibbs_posterior(const sim::TrialSample& trial, const PriorSpec& prior,
                               const GibbsConfig& cfg) {
    return gibbs_posterior(TrialCounts::from_sample(trial), prior, cfg);
}

namespace {

// Accumulator indices for the oracle: mean and raw second moment per
// parameter, plus the cross moment E[p_c1 * p_c0] feeding Var(p_c1 - p_c0).
enum AccIndex {
    kPiA, kPiA2, kPiN, kPiN2, kPiC, kPiC2,
    kPA1, kPA12, kPN0, kPN02, kPC1, kPC12, kPC0, kPC02,
    kPC1PC0, kAccCount
};

struct PGrid {
    std::vector<double> value;        // midpoint grid on (0,1)
    std::vector<double> prior_w;      // Beta prior density up to constants
    std::vector<double> pure_like;    // pure-cell Bernoulli likelihood at value
};

PGrid make_pgrid(int g, const BetaShape& shape, double n_success, double n_failure) {
    PGrid grid;
    grid.value.resize(static_cast<std::size_t>(g));
    grid.prior_w.resize(static_cast<std::size_t>(g));
    grid.pure_like.resize(static_cast<std::size_t>(g));
    for (int t = 0; t < g; ++t) {
        const double p = (t + 0.5) / g;
        grid.value[static_cast<std::size_t>(t)] = p;
        grid.prior_w[static_cast<std::size_t>(t)] =
            std::pow(p, shape.a - 1.0) * std::pow(1.0 - p, shape.b - 1.0);
        grid.pure_like[static_cast<std::size_t>(t)] =
            std::pow(p, n_success) * std::pow(1.0 - p, n_failure);
    }
    return grid;
}

// One mixed cell integrated over its two free probability dimensions for
// fixed shares. Returns the block mass and the conditional moments of both
// dimensions given the shares.
struct BlockMoments {
    double mass = 0.0;
    double m_first = 0.0, m2_first = 0.0;    // pure-cell owner (p_a1 or p_n0)
    double m_second = 0.0, m2_second = 0.0;  // complier arm (p_c1 or p_c0)
};

BlockMoments mixed_block(const PGrid& pure_dim, const PGrid& complier_dim,
                         double share_pure, double share_c, double mix_y1,
                         double mix_y0) {
    BlockMoments bm;
    double sum = 0.0;
    double s1 = 0.0, s1sq = 0.0, s2 = 0.0, s2sq = 0.0;
    for (std::size_t i = 0; i < pure_dim.value.size(); ++i) {
        const double p = pure_dim.value[i];
        const double base = pure_dim.prior_w[i] * pure_dim.pure_like[i];
        for (std::size_t j = 0; j < complier_dim.value.size(); ++j) {
            const double pc = complier_dim.value[j];
            const double mix1 = share_pure * p + share_c * pc;
            const double mix0 = share_pure * (1.0 - p) + share_c * (1.0 - pc);
            const double w =
                base * complier_dim.prior_w[j] * std::pow(mix1, mix_y1) * std::pow(mix0, mix_y0);
            sum += w;
            s1 += w * p;
            s1sq += w * p * p;
            s2 += w * pc;
            s2sq += w * pc * pc;
        }
    }
    bm.mass = sum;
    if (sum > 0.0) {
        bm.m_first = s1 / sum;
        bm.m2_first = s1sq / sum;
        bm.m_second = s2 / sum;
        bm.m2_second = s2sq / sum;
    }
    return bm;
}

}  // namespace

MomentTable grid_posterior_oracle(const TrialCounts& counts, const PriorSpec& prior,
                                  int grid_points) {
    prior.validate();
    if (counts.total() > 100) throw TooLarge("oracle accepts at most 100 rows");
    if (grid_points > 21) throw TooLarge("oracle accepts at most 21 grid points");
    if (grid_points < 2) throw InvalidConfig("grid_points must be at least 2");

    const int g = grid_points;
    const PGrid grid_a1 = make_pgrid(g, prior.p_a1, static_cast<double>(counts.n[0][1][1]),
                                     static_cast<double>(counts.n[0][1][0]));
    const PGrid grid_n0 = make_pgrid(g, prior.p_n0, static_cast<double>(counts.n[1][0][1]),
                                     static_cast<double>(counts.n[1][0][0]));
    // Complier dimensions have no pure cell; their data enter via the mixture.
    const PGrid grid_c1 = make_pgrid(g, prior.p_c1, 0.0, 0.0);
    const PGrid grid_c0 = make_pgrid(g, prior.p_c0, 0.0, 0.0);

    const double n01 = static_cast<double>(counts.cell(0, 1));
    const double n10 = static_cast<double>(counts.cell(1, 0));
    const double n111 = static_cast<double>(counts.n[1][1][1]);
    const double n110 = static_cast<double>(counts.n[1][1][0]);
    const double n001 = static_cast<double>(counts.n[0][0][1]);
    const double n000 = static_cast<double>(counts.n[0][0][0]);

    // Streaming logsumexp over shares nodes: lead is the running max of node
    // log weights; every accumulator is stored relative to exp(lead).
    double lead = -std::numeric_limits<double>::infinity();
    double mass = 0.0;
    std::array<double, kAccCount> acc{};

    for (int i = 0; i < g; ++i) {
        const double u1 = (i + 0.5) / g;
        for (int j = 0; j < g; ++j) {
            const double u2 = (j + 0.5) / g;
            const double pi_a = u1;
            const double pi_n = (1.0 - u1) * u2;
            const double pi_c = (1.0 - u1) * (1.0 - u2);

            const BlockMoments b1 =
                mixed_block(grid_a1, grid_c1, pi_a, pi_c, n111, n110);
            const BlockMoments b0 =
                mixed_block(grid_n0, grid_c0, pi_n, pi_c, n001, n000);
            if (!(b1.mass > 0.0) || !(b0.mass > 0.0)) continue;

            const double log_w =
                (prior.dirichlet_shares[0] - 1.0) * std::log(pi_a) +
                (prior.dirichlet_shares[1] - 1.0) * std::log(pi_n) +
                (prior.dirichlet_shares[2] - 1.0) * std::log(pi_c) +
                std::log(1.0 - u1) +  // stick-breaking Jacobian
                n01 * std::log(pi_a) + n10 * std::log(pi_n) +
                std::log(b1.mass) + std::log(b0.mass);

            if (log_w > lead) {
                const double scale = std::exp(lead - log_w);
                mass *= scale;
                for (double& a : acc) a *= scale;
                lead = log_w;
            }
            const double w = std::exp(log_w - lead);
            mass += w;
            acc[kPiA] += w * pi_a;
            acc[kPiA2] += w * pi_a * pi_a;
            acc[kPiN] += w * pi_n;
            acc[kPiN2] += w * pi_n * pi_n;
            acc[kPiC] += w * pi_c;
            acc[kPiC2] += w * pi_c * pi_c;
            acc[kPA1] += w * b1.m_first;
            acc[kPA12] += w * b1.m2_first;
            acc[kPC1] += w * b1.m_second;
            acc[kPC12] += w * b1.m2_second;
            acc[kPN0] += w * b0.m_first;
            acc[kPN02] += w * b0.m2_first;
            acc[kPC0] += w * b0.m_second;
            acc[kPC02] += w * b0.m2_second;
            acc[kPC1PC0] += w * b1.m_second * b0.m_second;
        }
    }

    if (!(mass > 0.0)) throw InvalidConfig("posterior mass underflowed to zero on the grid");
    for (double& a : acc) a /= mass;

    const auto moment = [&](AccIndex m, AccIndex m2) {
        return Moment{acc[m], std::sqrt(std::max(0.0, acc[m2] - acc[m] * acc[m]))};
    };
    MomentTable table;
    table.params[0] = moment(kPiA, kPiA2);
    table.params[1] = moment(kPiN, kPiN2);
    table.params[2] = moment(kPiC, kPiC2);
    table.params[3] = moment(kPA1, kPA12);
    table.params[4] = moment(kPN0, kPN02);
    table.params[5] = moment(kPC1, kPC12);
    table.params[6] = moment(kPC0, kPC02);
    const double late_mean = acc[kPC1] - acc[kPC0];
    const double late_m2 = acc[kPC12] + acc[kPC02] - 2.0 * acc[kPC1PC0];
    table.late = Moment{late_mean, std::sqrt(std::max(0.0, late_m2 - late_mean * late_mean))};
    return table;
}

MomentTable grid_posterior_oracle(const sim::TrialSample& trial, const PriorSpec& prior,
                                  int grid_points) {
    return grid_posterior_oracle(TrialCounts::from_sample(trial), prior, grid_points);
}

namespace {

ParamSummary summarize(std::vector<double> xs) {
    const std::size_t m = xs.size();
    ParamSummary s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1)) : 0.0;

    std::sort(xs.begin(), xs.end());
    const auto quantile = [&xs, m](double p) {
        const double pos = p * static_cast<double>(m - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        return lo + 1 < m ? xs[lo] + frac * (xs[lo + 1] - xs[lo]) : xs[lo];
    };
    s.q05 = quantile(0.05);
    s.q50 = quantile(0.50);
    s.q95 = quantile(0.95);
    return s;
}

}  // namespace

PosteriorSummary posterior_summary(const PosteriorDraws& draws) {
    if (draws.rows.empty()) throw InvalidConfig("cannot summarize an empty draw set");
    PosteriorSummary summary;
    summary.n_draws = draws.rows.size();
    std::vector<double> column(draws.rows.size());
    for (std::size_t p = 0; p < kDrawDim; ++p) {
        for (std::size_t i = 0; i < draws.rows.size(); ++i) column[i] = draws.rows[i][p];
        summary.params[p] = summarize(column);
    }
    for (std::size_t i = 0; i < draws.rows.size(); ++i) {
        column[i] = draws.rows[i][5] - draws.rows[i][6];  // p_c1 - p_c0
    }
    summary.late = summarize(column);
    return summary;
}

}  // namespace ivlate::bayes
