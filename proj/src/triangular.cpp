#include "genreg/triangular.hpp"

#include "genreg/errors.hpp"
#include "genreg/parallel.hpp"
#include "genreg/quadrature.hpp"

#include <cmath>
#include <limits>

namespace genreg {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TriangularFit fit_triangular(const Vec& Y, const Vec& X1, const Mat& Z1, const Mat& Z2,
                             const Mat& grid, const TriangularConfig& config,
                             const Vec* true_v) {
    const long n = Y.size();
    if (X1.size() != n || Z1.rows() != n || Z2.rows() != n)
        throw DataError("fit_triangular: sample components have mismatched lengths");
    if (!(config.g > 0.0) || !(config.h > 0.0))
        throw ConfigError("fit_triangular: bandwidths must be positive");
    const int d1 = static_cast<int>(Z1.cols());
    if (grid.cols() != 1 + d1)
        throw ConfigError("fit_triangular: grid rows must be (x1, z1) points");

    TriangularFit fit;
    fit.grid = grid;

    // first stage on the full instrument set Z = (Z1, Z2)
    Mat Z(n, Z1.cols() + Z2.cols());
    Z << Z1, Z2;
    auto mu2 = std::make_shared<LocalPolyModel>(Z, X1, config.first_stage_order,
                                                config.first_kernel, config.g);
    fit.mu2_model = mu2;

    if (true_v) {
        if (true_v->size() != n) throw DataError("fit_triangular: true_v has wrong length");
        fit.v_hat = *true_v;
    } else {
        fit.v_hat = Vec(n);
        std::vector<std::string> fail(static_cast<std::size_t>(n));
        for_each_index(static_cast<std::size_t>(n), [&](std::size_t i) {
            auto t = mu2->try_fit_at(Z.row(static_cast<Eigen::Index>(i)).transpose());
            if (t.fit)
                fit.v_hat[static_cast<Eigen::Index>(i)] =
                    X1[static_cast<Eigen::Index>(i)] - t.fit->alpha;
            else
                fail[i] = t.failure;
        });
        for (std::size_t i = 0; i < fail.size(); ++i)
            if (!fail[i].empty())
                throw NumericError("fit_triangular: first stage failed at observation " +
                                   std::to_string(i) + ": " + fail[i]);
    }

    // degenerate-support check: V must be continuously distributed
    {
        double vmin = fit.v_hat.minCoeff(), vmax = fit.v_hat.maxCoeff();
        if (!(vmax - vmin > 1e-8))
            throw DataError("fit_triangular: residuals V are (numerically) degenerate; "
                            "V must be continuously distributed");
    }

    // second stage never reads Z2: regressors are exactly (X1, Z1, V-hat)
    Mat R(n, 2 + d1);
    R.col(0) = X1;
    R.middleCols(1, d1) = Z1;
    R.col(1 + d1) = fit.v_hat;
    LocalPolyModel m(R, Y, 1, config.second_kernel, config.h);

    const Eigen::Index mg = grid.rows();
    fit.mu1_hat = Vec::Constant(mg, kNaN);
    fit.dropout_frac = Vec::Constant(mg, kNaN);
    fit.flags.assign(static_cast<std::size_t>(mg), "");

    for (Eigen::Index gi = 0; gi < mg; ++gi) {
        Vec vals(n);
        std::vector<uint8_t> ok(static_cast<std::size_t>(n), 0);
        for_each_index(static_cast<std::size_t>(n), [&](std::size_t i) {
            Vec pt(2 + d1);
            pt.head(1 + d1) = grid.row(gi).transpose();
            pt[1 + d1] = fit.v_hat[static_cast<Eigen::Index>(i)];
            auto t = m.try_fit_at(pt);
            if (t.fit) {
                vals[static_cast<Eigen::Index>(i)] = t.fit->alpha;
                ok[i] = 1;
            }
        });
        // average over successful evaluations, slots reduced in index order
        Vec kept(n);
        Eigen::Index cnt = 0;
        for (long i = 0; i < n; ++i)
            if (ok[static_cast<std::size_t>(i)]) kept[cnt++] = vals[i];
        double dropout = 1.0 - static_cast<double>(cnt) / static_cast<double>(n);
        fit.dropout_frac[gi] = dropout;
        if (dropout > config.max_dropout) {
            fit.flags[static_cast<std::size_t>(gi)] =
                "dropout fraction " + std::to_string(dropout) + " exceeds " +
                std::to_string(config.max_dropout) + " at grid point " + std::to_string(gi);
            continue;
        }
        fit.mu1_hat[gi] = pairwise_sum(kept.data(), static_cast<std::size_t>(cnt)) /
                          static_cast<double>(cnt);
    }
    return fit;
}

double triangular_avar(const TriangularDgp& dgp, double x1, double z1,
                       const KernelSpec& second_kernel) {
    double rk = kernel_constants(second_kernel).rk;
    const int d1 = 1;
    double expectation = integrate(
        [&](double v) {
            double fv = dgp.f_V(v);
            if (fv <= 0.0) return 0.0;
            double fxz = dgp.f_xz1_given_v(x1, z1, v);
            if (fxz < 1e-8)
                throw NumericError("triangular_avar: f_{XZ|V} below 1e-8 inside the V support "
                                   "(support condition violated)");
            return dgp.var_eps / fxz * fv;
        },
        dgp.v_lo, dgp.v_hi, 1e-9);
    return expectation * std::pow(rk, 1 + d1);
}

} // namespace genreg
