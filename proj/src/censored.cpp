#include "genreg/censored.hpp"

#include "genreg/errors.hpp"
#include "genreg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace genreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// linear interpolation on an equispaced grid
double interp(const Vec& grid, const Vec& vals, double x) {
    const Eigen::Index m = grid.size();
    if (x <= grid[0]) return vals[0];
    if (x >= grid[m - 1]) return vals[m - 1];
    double step = (grid[m - 1] - grid[0]) / static_cast<double>(m - 1);
    auto k = static_cast<Eigen::Index>((x - grid[0]) / step);
    if (k >= m - 1) k = m - 2;
    double t = (x - grid[k]) / step;
    return (1.0 - t) * vals[k] + t * vals[k + 1];
}

} // namespace

CensoredFit fit_censored(const Mat& X, const Vec& Y, const Vec& grid_x,
                         const CensoredConfig& config) {
    if (X.rows() != Y.size()) throw DataError("fit_censored: X and Y row counts differ");
    if (grid_x.size() == 0) throw ConfigError("fit_censored: empty evaluation grid");
    if (!(config.g > 0.0) || !(config.h > 0.0))
        throw ConfigError("fit_censored: bandwidths must be positive");
    if (config.quad_nodes < 3) throw ConfigError("fit_censored: need at least 3 trapezoid nodes");

    if (X.cols() != 1)
        throw ConfigError("fit_censored: grid evaluation supports a scalar covariate (p = 1)");

    const long n = X.rows();
    bool any_uncensored = false;
    Vec indicator(n);
    for (long i = 0; i < n; ++i) {
        indicator[i] = Y[i] > 0.0 ? 1.0 : 0.0;
        if (Y[i] > 0.0) any_uncensored = true;
    }
    if (!any_uncensored)
        throw DataError("fit_censored: every observation is censored (Y = 0 throughout)");

    LocalPolyModel first(X, Y, config.first_stage_order, config.first_kernel, config.g);

    // first stage at the sample points (for lambda and the generated index)
    Vec rhat_n(n);
    std::vector<std::string> fail(static_cast<std::size_t>(n));
    for_each_index(static_cast<std::size_t>(n), [&](std::size_t i) {
        auto t = first.try_fit_at(X.row(static_cast<Eigen::Index>(i)).transpose());
        if (t.fit)
            rhat_n[static_cast<Eigen::Index>(i)] = t.fit->alpha;
        else
            fail[i] = t.failure;
    });
    for (std::size_t i = 0; i < fail.size(); ++i)
        if (!fail[i].empty())
            throw NumericError("fit_censored: first stage failed at observation " +
                               std::to_string(i) + ": " + fail[i]);

    CensoredFit fit;
    fit.grid_x = grid_x;
    fit.lambda = rhat_n.maxCoeff();
    fit.mu_hat = Vec::Constant(grid_x.size(), kNaN);
    fit.r_hat = Vec::Constant(grid_x.size(), kNaN);
    fit.flags.assign(static_cast<std::size_t>(grid_x.size()), "");
    fit.clipped_nodes.assign(static_cast<std::size_t>(grid_x.size()), 0);

    for (Eigen::Index i = 0; i < grid_x.size(); ++i) {
        Vec pt(1);
        pt[0] = grid_x[i];
        auto t = first.try_fit_at(pt);
        if (t.fit)
            fit.r_hat[i] = t.fit->alpha;
        else
            fit.flags[static_cast<std::size_t>(i)] = t.failure;
    }

    // shared q-hat table over [min r-hat(grid), lambda]
    double lo = fit.lambda;
    for (Eigen::Index i = 0; i < grid_x.size(); ++i)
        if (std::isfinite(fit.r_hat[i])) lo = std::min(lo, fit.r_hat[i]);
    if (!(lo < fit.lambda))
        throw NumericError("fit_censored: degenerate index range (all r-hat >= lambda)");

    LocalPolyModel qmodel(rhat_n, indicator, 1, config.second_kernel, config.h);
    const int nodes = config.quad_nodes;
    fit.q_grid = Vec(nodes);
    fit.q_hat = Vec(nodes);
    std::vector<uint8_t> clipped(static_cast<std::size_t>(nodes), 0);
    double step = (fit.lambda - lo) / static_cast<double>(nodes - 1);
    std::vector<std::string> qfail(static_cast<std::size_t>(nodes));
    for_each_index(static_cast<std::size_t>(nodes), [&](std::size_t k) {
        double u = lo + step * static_cast<double>(k);
        fit.q_grid[static_cast<Eigen::Index>(k)] = u;
        Vec pt(1);
        pt[0] = u;
        auto t = qmodel.try_fit_at(pt);
        if (!t.fit) {
            qfail[k] = t.failure;
            return;
        }
        double q = t.fit->alpha;
        if (q < config.clip_floor) {
            q = config.clip_floor;
            clipped[k] = 1;
        }
        fit.q_hat[static_cast<Eigen::Index>(k)] = q;
    });
    for (std::size_t k = 0; k < qfail.size(); ++k)
        if (!qfail[k].empty())
            throw NumericError("fit_censored: q-hat failed at integration node " +
                               std::to_string(k) + ": " + qfail[k]);

    long clipped_total = std::count(clipped.begin(), clipped.end(), uint8_t{1});
    if (clipped_total > nodes / 2)
        throw NumericError("fit_censored: degenerate censoring, q-hat at the clip floor on " +
                           std::to_string(clipped_total) + " of " + std::to_string(nodes) +
                           " integration nodes");

    // cumulative trapezoid of 1/q-hat from lo
    Vec cum(nodes);
    cum[0] = 0.0;
    for (int k = 1; k < nodes; ++k) {
        double a = 1.0 / fit.q_hat[k - 1], b = 1.0 / fit.q_hat[k];
        cum[k] = cum[k - 1] + 0.5 * (a + b) * step;
    }
    double total = cum[nodes - 1];
    double sign = config.sign == SignConvention::minus ? -1.0 : 1.0;

    for (Eigen::Index i = 0; i < grid_x.size(); ++i) {
        if (!fit.flags[static_cast<std::size_t>(i)].empty()) continue;
        double r = fit.r_hat[i];
        double integral = total - interp(fit.q_grid, cum, r);
        fit.mu_hat[i] = fit.lambda + sign * integral;
        int cnt = 0;
        for (int k = 0; k < nodes; ++k)
            if (clipped[static_cast<std::size_t>(k)] && fit.q_grid[k] >= r) ++cnt;
        fit.clipped_nodes[static_cast<std::size_t>(i)] = cnt;
    }
    return fit;
}

double censored_avar(const CensoredDgp& dgp, double x, const KernelSpec& first_kernel) {
    double s0 = dgp.s0(x);
    if (s0 < 1e-6)
        throw NumericError("censored_avar: heavy censoring, s0(x) below 1e-6 at x = " +
                           std::to_string(x));
    double fx = dgp.f_X(x);
    if (!(fx > 0.0)) throw ConfigError("censored_avar: f_S(x) must be positive");
    double rl = kernel_constants(first_kernel).rk;
    return dgp.var_y(x) * rl / (fx * s0 * s0);
}

} // namespace genreg
