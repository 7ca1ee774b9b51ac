#include "ivlate/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>

namespace ivlate::estimators {

namespace {

constexpr double kRankTol = 1e-10;

struct LeastSquares {
    Eigen::VectorXd beta;
    Eigen::MatrixXd gram_inv;  // (A'A)^-1
};

// Normal-equations solve on the Gram matrix. The Gram matrix is equilibrated
// (scaled to unit diagonal) before factorization so the rank tolerance acts
// relative to each column's scale.
LeastSquares solve_normal(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty) {
    const Eigen::Index k = gram.rows();
    Eigen::VectorXd scale(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        scale(i) = gram(i, i) > 0.0 ? 1.0 / std::sqrt(gram(i, i)) : 1.0;
    }
    const Eigen::MatrixXd balanced =
        scale.asDiagonal() * gram * scale.asDiagonal();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(balanced);
    qr.setThreshold(kRankTol);
    if (qr.rank() < k) {
        throw RankDeficient("design cross-product matrix is singular within tolerance");
    }

    LeastSquares out;
    out.beta = scale.asDiagonal() * qr.solve((scale.asDiagonal() * xty).eval());
    out.gram_inv = scale.asDiagonal() *
                   qr.solve(Eigen::MatrixXd::Identity(k, k)) * scale.asDiagonal();
    return out;
}

// Columns of the design matrix after the implicit leading intercept.
using Columns = std::vector<const std::vector<double>*>;

Eigen::MatrixXd gram_matrix(const Columns& cols, std::size_t n) {
    const Eigen::Index k = static_cast<Eigen::Index>(cols.size()) + 1;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    gram(0, 0) = static_cast<double>(n);
    for (Eigen::Index j = 1; j < k; ++j) {
        const std::vector<double>& cj = *cols[static_cast<std::size_t>(j - 1)];
        double sum_j = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum_j += cj[i];
        gram(0, j) = gram(j, 0) = sum_j;
        for (Eigen::Index l = 1; l <= j; ++l) {
            const std::vector<double>& cl = *cols[static_cast<std::size_t>(l - 1)];
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += cj[i] * cl[i];
            gram(j, l) = gram(l, j) = dot;
        }
    }
    return gram;
}

Eigen::VectorXd cross_with(const Columns& cols, const std::vector<double>& y,
                           std::size_t n) {
    const Eigen::Index k = static_cast<Eigen::Index>(cols.size()) + 1;
    Eigen::VectorXd xty = Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i < n; ++i) xty(0) += y[i];
    for (Eigen::Index j = 1; j < k; ++j) {
        const std::vector<double>& cj = *cols[static_cast<std::size_t>(j - 1)];
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += cj[i] * y[i];
        xty(j) = dot;
    }
    return xty;
}

double fitted_at(const Eigen::VectorXd& beta, const Columns& cols, std::size_t i) {
    double f = beta(0);
    for (std::size_t j = 0; j < cols.size(); ++j) {
        f += beta(static_cast<Eigen::Index>(j) + 1) * (*cols[j])[i];
    }
    return f;
}

// Classical SEs from residuals of y against the given design.
std::vector<double> standard_errors(const Eigen::VectorXd& beta,
                                    const Eigen::MatrixXd& gram_inv,
                                    const Columns& cols,
                                    const std::vector<double>& y, std::size_t n) {
    const std::size_t k = cols.size() + 1;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - fitted_at(beta, cols, i);
        rss += e * e;
    }
    const double s2 = rss / static_cast<double>(n - k);
    std::vector<double> se(k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        se[j] = std::sqrt(std::max(0.0, s2 * gram_inv(jj, jj)));
    }
    return se;
}

LinearFit fit_with_intercept(const std::vector<double>& y, const Columns& cols,
                             std::size_t n) {
    const std::size_t k = cols.size() + 1;
    if (n <= k) throw InvalidConfig("sample smaller than coefficient count");
    const LeastSquares ls = solve_normal(gram_matrix(cols, n), cross_with(cols, y, n));
    LinearFit fit;
    fit.coefficients.assign(ls.beta.data(), ls.beta.data() + ls.beta.size());
    fit.std_errors = standard_errors(ls.beta, ls.gram_inv, cols, y, n);
    fit.n_used = n;
    return fit;
}

void check_sample(const sim::ObservationalSample& sample) {
    const std::size_t n = sample.y_obs.size();
    if (n == 0) throw InvalidConfig("empty sample");
    if (sample.x_obs.size() != n || sample.v.size() != n || sample.log_w.size() != n) {
        throw InvalidConfig("sample columns have mismatched lengths");
    }
}

bool is_constant(const std::vector<double>& xs) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    return *lo == *hi;
}

}  // namespace

LinearFit ols_fit(const sim::ObservationalSample& sample, const OlsOptions& options) {
    check_sample(sample);
    Columns cols = {&sample.x_obs};
    if (options.include_v) cols.push_back(&sample.v);
    return fit_with_intercept(sample.y_obs, cols, sample.y_obs.size());
}

LinearFit tsls_fit(const sim::ObservationalSample& sample, const TslsOptions& options) {
    check_sample(sample);
    const std::size_t n = sample.y_obs.size();
    if (is_constant(sample.log_w)) {
        throw WeakInstrument("instrument is constant");
    }

    Columns first_stage = {&sample.log_w};
    if (options.include_v) first_stage.push_back(&sample.v);
    const LinearFit stage1 = fit_with_intercept(sample.x_obs, first_stage, n);
    const double t = stage1.slope() / stage1.slope_se();
    if (!(std::abs(t) > options.first_stage_t_min)) {
        throw WeakInstrument("first-stage t-statistic below threshold");
    }

    std::vector<double> x_hat(n);
    Eigen::VectorXd b1 =
        Eigen::Map<const Eigen::VectorXd>(stage1.coefficients.data(),
                                          static_cast<Eigen::Index>(stage1.coefficients.size()));
    for (std::size_t i = 0; i < n; ++i) x_hat[i] = fitted_at(b1, first_stage, i);

    Columns second_stage = {&x_hat};
    if (options.include_v) second_stage.push_back(&sample.v);
    const std::size_t k = second_stage.size() + 1;
    if (n <= k) throw InvalidConfig("sample smaller than coefficient count");
    const LeastSquares ls =
        solve_normal(gram_matrix(second_stage, n), cross_with(second_stage, sample.y_obs, n));

    // SEs use the structural residuals y - X*beta with the original regressor,
    // not the first-stage fit, per the usual 2SLS covariance.
    Columns structural = {&sample.x_obs};
    if (options.include_v) structural.push_back(&sample.v);

    LinearFit fit;
    fit.coefficients.assign(ls.beta.data(), ls.beta.data() + ls.beta.size());
    fit.std_errors = standard_errors(ls.beta, ls.gram_inv, structural, sample.y_obs, n);
    fit.n_used = n;
    return fit;
}

TrialCells TrialCells::from_sample(const sim::TrialSample& trial) {
    const std::size_t n = trial.z.size();
    if (trial.d.size() != n || trial.y.size() != n) {
        throw InvalidConfig("trial columns have mismatched lengths");
    }
    double sum_y[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    TrialCells cells;
    for (std::size_t i = 0; i < n; ++i) {
        const int z = trial.z[i] ? 1 : 0;
        const int d = trial.d[i] ? 1 : 0;
        cells.w[z][d] += 1.0;
        sum_y[z][d] += trial.y[i];
    }
    for (int z = 0; z < 2; ++z) {
        for (int d = 0; d < 2; ++d) {
            cells.present[z][d] = cells.w[z][d] > 0.0;
            cells.ybar[z][d] = cells.present[z][d] ? sum_y[z][d] / cells.w[z][d] : 0.0;
        }
    }
    return cells;
}

TrialCells TrialCells::from_config(const sim::TrialConfig& cfg) {
    cfg.validate();
    const core::TypeShares& s = cfg.shares;
    TrialCells cells;
    // z=1: treated cell mixes always-takers and compliers; untreated cell is
    // pure never-taker. Mirrored for z=0.
    cells.w[1][1] = cfg.z_share * (s.pi_a + s.pi_c);
    cells.w[1][0] = cfg.z_share * s.pi_n;
    cells.w[0][1] = (1.0 - cfg.z_share) * s.pi_a;
    cells.w[0][0] = (1.0 - cfg.z_share) * (s.pi_n + s.pi_c);
    if (s.pi_a + s.pi_c > 0.0) {
        cells.ybar[1][1] = (s.pi_a * cfg.p_a1 + s.pi_c * cfg.p_c1) / (s.pi_a + s.pi_c);
    }
    cells.ybar[1][0] = cfg.p_n0;
    cells.ybar[0][1] = cfg.p_a1;
    if (s.pi_n + s.pi_c > 0.0) {
        cells.ybar[0][0] = (s.pi_n * cfg.p_n0 + s.pi_c * cfg.p_c0) / (s.pi_n + s.pi_c);
    }
    for (int z = 0; z < 2; ++z) {
        for (int d = 0; d < 2; ++d) cells.present[z][d] = cells.w[z][d] > 0.0;
    }
    return cells;
}

double TrialCells::treated_share(int z) const { return w[z][1] / arm_weight(z); }

double TrialCells::mean_y(int z) const {
    return (w[z][0] * ybar[z][0] + w[z][1] * ybar[z][1]) / arm_weight(z);
}

double TrialCells::mean_yd(int z) const { return w[z][1] * ybar[z][1] / arm_weight(z); }

double TrialCells::mean_y_untreated(int z) const {
    return w[z][0] * ybar[z][0] / arm_weight(z);
}

namespace {

void check_arms(const TrialCells& cells) {
    if (!cells.arm_present(0)) throw EmptyArm("no rows with z=0");
    if (!cells.arm_present(1)) throw EmptyArm("no rows with z=1");
}

}  // namespace

double wald_late(const TrialCells& cells, double first_stage_tol) {
    check_arms(cells);
    const double gap = cells.treated_share(1) - cells.treated_share(0);
    if (!(gap > first_stage_tol)) {
        throw WeakInstrument("first-stage take-up gap at or below tolerance");
    }
    return (cells.mean_y(1) - cells.mean_y(0)) / gap;
}

double wald_late(const sim::TrialSample& trial, double first_stage_tol) {
    return wald_late(TrialCells::from_sample(trial), first_stage_tol);
}

core::TypeShares type_shares_hat(const TrialCells& cells, double monotonicity_tol) {
    check_arms(cells);
    double pi_a = cells.treated_share(0);
    double pi_n = 1.0 - cells.treated_share(1);
    double pi_c = 1.0 - pi_a - pi_n;
    if (pi_c < -monotonicity_tol) {
        throw MonotonicityViolation("complier share estimate below -tolerance");
    }
    if (pi_c < 0.0) {
        const double total = pi_a + pi_n;
        pi_a /= total;
        pi_n /= total;
        pi_c = 0.0;
    }
    core::TypeShares shares{pi_a, pi_n, pi_c};
    shares.validate();
    return shares;
}

core::TypeShares type_shares_hat(const sim::TrialSample& trial, double monotonicity_tol) {
    return type_shares_hat(TrialCells::from_sample(trial), monotonicity_tol);
}

IdentifiedParams identified_means_hat(const TrialCells& cells, const MeansOptions& options) {
    check_arms(cells);
    IdentifiedParams out;
    out.shares = type_shares_hat(cells, options.monotonicity_tol);
    if (!(out.shares.pi_c > options.first_stage_tol)) {
        throw WeakInstrument("complier share estimate at or below tolerance");
    }

    if (cells.present[0][1]) {
        out.means.mu_a1 = cells.ybar[0][1];
    } else if (options.strict_cells) {
        throw EmptyCell("no rows with z=0, d=1");
    } else {
        out.mu_a1_defined = false;
    }
    if (cells.present[1][0]) {
        out.means.mu_n0 = cells.ybar[1][0];
    } else if (options.strict_cells) {
        throw EmptyCell("no rows with z=1, d=0");
    } else {
        out.mu_n0_defined = false;
    }

    out.raw_mu_c1 = (cells.mean_yd(1) - cells.mean_yd(0)) / out.shares.pi_c;
    out.raw_mu_c0 = (cells.mean_y_untreated(0) - cells.mean_y_untreated(1)) / out.shares.pi_c;
    out.means.mu_c1 = out.raw_mu_c1;
    out.means.mu_c0 = out.raw_mu_c0;
    if (options.range) {
        options.range->validate();
        out.means.mu_c1 = std::clamp(out.raw_mu_c1, options.range->y_lo, options.range->y_hi);
        out.means.mu_c0 = std::clamp(out.raw_mu_c0, options.range->y_lo, options.range->y_hi);
        out.clamped = out.means.mu_c1 != out.raw_mu_c1 || out.means.mu_c0 != out.raw_mu_c0;
    }
    out.late = out.means.mu_c1 - out.means.mu_c0;
    return out;
}

IdentifiedParams identified_means_hat(const sim::TrialSample& trial, const MeansOptions& options) {
    return identified_means_hat(TrialCells::from_sample(trial), options);
}

AteBounds manski_ate_bounds(const IdentifiedParams& params, const core::OutcomeRange& range) {
    range.validate();
    core::OutcomeMeans at_worst = params.means;
    at_worst.mu_a0 = range.y_hi;
    at_worst.mu_n1 = range.y_lo;
    core::OutcomeMeans at_best = params.means;
    at_best.mu_a0 = range.y_lo;
    at_best.mu_n1 = range.y_hi;
    return AteBounds{core::ate_decompose(params.shares, at_worst),
                     core::ate_decompose(params.shares, at_best)};
}

}  // namespace ivlate::estimators
