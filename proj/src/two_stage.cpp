#include "genreg/two_stage.hpp"

#include "genreg/errors.hpp"
#include "genreg/parallel.hpp"
#include "genreg/quadrature.hpp"

#include <cmath>
#include <limits>

namespace genreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// second stage: local linear of Y on the (generated) scalar index
void second_stage(TwoStageFit& fit, const Vec& index, const Vec& y, double h,
                  const KernelSpec& kernel) {
    const Eigen::Index m = fit.grid.size();
    fit.m_hat = Vec::Constant(m, kNaN);
    fit.flags.assign(static_cast<std::size_t>(m), "");
    fit.eff_n.assign(static_cast<std::size_t>(m), 0);
    LocalPolyModel model(index, y, 1, kernel, h);
    for_each_index(static_cast<std::size_t>(m), [&](std::size_t i) {
        Vec x(1);
        x[0] = fit.grid[static_cast<Eigen::Index>(i)];
        auto t = model.try_fit_at(x);
        if (t.fit) {
            fit.m_hat[static_cast<Eigen::Index>(i)] = t.fit->alpha;
            fit.eff_n[i] = t.fit->eff_n;
        } else {
            fit.flags[i] = t.failure;
        }
    });
}

} // namespace

void TwoStageConfig::validate() const {
    if (bandwidths.h.size() != 1)
        throw ConfigError("two-stage: the index is scalar, expected a single h");
    if (!(bandwidths.h[0] > 0.0) || !(bandwidths.g > 0.0))
        throw ConfigError("two-stage: bandwidths must be positive");
    if (first_stage_order < 0) throw ConfigError("two-stage: first stage order must be >= 0");
    if (grid.size() == 0) throw ConfigError("two-stage: empty evaluation grid");
    if (interior_trim < 0.0 || interior_trim >= 0.5)
        throw ConfigError("two-stage: interior_trim must lie in [0, 0.5)");
    if (second_kernel.smoothness_order < 1)
        throw ConfigError("two-stage: second-stage kernel must be at least C^1 (gradient needed)");
}

Vec make_grid(double lo, double hi, int count, double trim) {
    if (count < 1) throw ConfigError("grid: need at least one point");
    double range = hi - lo;
    double a = lo + trim * range, b = hi - trim * range;
    Vec g(count);
    if (count == 1) {
        g[0] = 0.5 * (a + b);
        return g;
    }
    for (int i = 0; i < count; ++i) g[i] = a + (b - a) * i / (count - 1);
    return g;
}

TwoStageFit fit_real(const Dataset& data, const TwoStageConfig& config) {
    config.validate();
    if (!data.has_first_stage())
        throw DataError("fit_real: dataset lacks the first-stage response T");

    auto first = std::make_shared<LocalPolyModel>(data.S, data.T, config.first_stage_order,
                                                  config.first_kernel, config.bandwidths.g,
                                                  config.ridge_epsilon);
    const long n = data.n();
    Vec rhat(n);
    std::vector<std::string> first_failures(static_cast<std::size_t>(n));
    for_each_index(static_cast<std::size_t>(n), [&](std::size_t i) {
        auto t = first->try_fit_at(data.S.row(static_cast<Eigen::Index>(i)).transpose());
        if (t.fit)
            rhat[static_cast<Eigen::Index>(i)] = t.fit->alpha;
        else
            first_failures[i] = t.failure;
    });
    for (std::size_t i = 0; i < first_failures.size(); ++i)
        if (!first_failures[i].empty())
            throw NumericError("fit_real: first stage failed at observation " + std::to_string(i) +
                               ": " + first_failures[i]);

    TwoStageFit fit;
    fit.grid = config.grid;
    fit.rhat = rhat;
    fit.first_stage = first;
    fit.h = config.bandwidths.h[0];
    fit.second_kernel = config.second_kernel;
    second_stage(fit, rhat, data.Y, fit.h, config.second_kernel);
    return fit;
}

TwoStageFit fit_oracle(const Dataset& data, const Dgp& dgp, const TwoStageConfig& config) {
    config.validate();
    const long n = data.n();
    Vec r(n);
    for (long i = 0; i < n; ++i) r[i] = dgp.r0(data.S.row(i).transpose());
    TwoStageFit fit;
    fit.grid = config.grid;
    fit.rhat = r;
    fit.is_oracle = true;
    fit.h = config.bandwidths.h[0];
    fit.second_kernel = config.second_kernel;
    second_stage(fit, r, data.Y, fit.h, config.second_kernel);
    return fit;
}

namespace {

// shared driver for the two corrections; gamma_weight multiplies the summand
// by rho(S_i) and swaps K for K'.
Correction correction_impl(const TwoStageFit& fit, const Dgp& dgp, CorrectionMode mode,
                           bool matrix_form, bool gamma) {
    if (!fit.first_stage)
        throw ConfigError("corrections require the real fit (first-stage model handle)");
    if (gamma && fit.second_kernel.smoothness_order < 1)
        throw ConfigError("gamma correction needs a differentiable second-stage kernel");

    const auto& model = *fit.first_stage;
    const Mat& S = model.covariates();
    const long n = S.rows();
    const double h = fit.h;
    const KernelSpec& K = fit.second_kernel;
    const Eigen::Index m = fit.grid.size();

    Vec r0s(n), err(n), rho(n);
    for (long i = 0; i < n; ++i) {
        double r0i = dgp.r0(S.row(i).transpose());
        r0s[i] = r0i;
        err[i] = fit.rhat[i] - r0i;
        rho[i] = gamma ? dgp.rho(S.row(i).transpose()) : 1.0;
    }

    Correction out;
    out.values = Vec::Constant(m, kNaN);
    out.near_boundary.assign(static_cast<std::size_t>(m), 0);

    for_each_index(static_cast<std::size_t>(m), [&](std::size_t gi) {
        const double x = fit.grid[static_cast<Eigen::Index>(gi)];
        double fr = dgp.f_R(x);
        if (fr < 1e-8) {
            out.near_boundary[gi] = 1;
            return;
        }
        double value = 0.0;
        if (mode == CorrectionMode::empirical) {
            if (matrix_form) {
                // e1' Mh(x, r0)^{-1} (1/n) sum K_h(r0(S_i)-x) w_i(x, rhat) err_i rho_i
                Mat M = Mat::Zero(2, 2);
                Vec b = Vec::Zero(2);
                for (long i = 0; i < n; ++i) {
                    double u = (r0s[i] - x) / h;
                    if (std::abs(u) >= 1.0) continue;
                    double kh = gamma ? eval_kernel_derivative(K, u, 1) / (h * h)
                                      : eval_kernel(K, u) / h;
                    double k0 = eval_kernel(K, u) / h;
                    Vec w(2);
                    w[0] = 1.0;
                    w[1] = (fit.rhat[i] - x) / h;
                    M.noalias() += k0 * w * w.transpose();
                    b.noalias() += kh * err[i] * rho[i] * w;
                }
                M /= static_cast<double>(n);
                b /= static_cast<double>(n);
                Eigen::LDLT<Mat> ldlt(M);
                if (ldlt.info() != Eigen::Success) {
                    out.near_boundary[gi] = 1;
                    return;
                }
                value = ldlt.solve(b)[0];
            } else {
                Vec terms = Vec::Zero(n);
                for (long i = 0; i < n; ++i) {
                    double u = (r0s[i] - x) / h;
                    if (std::abs(u) >= 1.0) continue;
                    double kh = gamma ? eval_kernel_derivative(K, u, 1) / (h * h)
                                      : eval_kernel(K, u) / h;
                    terms[i] = kh * err[i] * rho[i];
                }
                value = pairwise_sum(terms.data(), static_cast<std::size_t>(n)) /
                        (static_cast<double>(n) * fr);
            }
        } else {
            // population mode: quadrature of the fixed realized rhat against f_S
            auto integrand = [&](const Vec& s) {
                double u = (dgp.r0(s) - x) / h;
                if (std::abs(u) >= 1.0) return 0.0;
                double kh = gamma ? eval_kernel_derivative(K, u, 1) / (h * h)
                                  : eval_kernel(K, u) / h;
                auto t = model.try_fit_at(s);
                if (!t.fit) return 0.0;
                double rr = gamma ? dgp.rho(s) : 1.0;
                return kh * (t.fit->alpha - dgp.r0(s)) * rr * dgp.f_S(s);
            };
            if (dgp.p == 1) {
                value = integrate(
                    [&](double s) {
                        Vec v(1);
                        v[0] = s;
                        return integrand(v);
                    },
                    dgp.s_lo[0], dgp.s_hi[0], 1e-8);
            } else if (dgp.p == 2) {
                value = integrate2(
                    [&](double s1, double s2) {
                        Vec v(2);
                        v[0] = s1;
                        v[1] = s2;
                        return integrand(v);
                    },
                    dgp.s_lo[0], dgp.s_hi[0], dgp.s_lo[1], dgp.s_hi[1], 1e-7);
            } else {
                throw ConfigError("population-mode corrections support p <= 2");
            }
            value /= fr;
        }
        out.values[static_cast<Eigen::Index>(gi)] = value;
    });
    return out;
}

} // namespace

Correction delta_correction(const TwoStageFit& fit, const Dgp& dgp, CorrectionMode mode,
                            bool matrix_form) {
    return correction_impl(fit, dgp, mode, matrix_form, false);
}

Correction gamma_correction(const TwoStageFit& fit, const Dgp& dgp, CorrectionMode mode,
                            bool matrix_form) {
    return correction_impl(fit, dgp, mode, matrix_form, true);
}

ExpansionResidual expansion_residual(const TwoStageFit& real_fit, const TwoStageFit& oracle_fit,
                                     const Vec& delta, const Vec& gamma, const Dgp& dgp) {
    const Eigen::Index m = real_fit.grid.size();
    if (oracle_fit.grid.size() != m || delta.size() != m || gamma.size() != m)
        throw ConfigError("expansion_residual: grid mismatch across inputs");
    for (Eigen::Index i = 0; i < m; ++i)
        if (real_fit.grid[i] != oracle_fit.grid[i])
            throw ConfigError("expansion_residual: real and oracle grids differ");

    ExpansionResidual out;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!real_fit.ok(static_cast<int>(i)) || !oracle_fit.ok(static_cast<int>(i))) continue;
        if (!std::isfinite(delta[i]) || !std::isfinite(gamma[i])) continue;
        double gap = real_fit.m_hat[i] - oracle_fit.m_hat[i];
        double resid = gap + dgp.m0_d1(real_fit.grid[i]) * delta[i] - gamma[i];
        out.sup_raw_gap = std::max(out.sup_raw_gap, std::abs(gap));
        out.sup_residual = std::max(out.sup_residual, std::abs(resid));
    }
    return out;
}

KappaBounds rate_kappa(const ComplexityParams& params) {
    const Eigen::Index d = params.delta.size();
    if (d == 0 || params.alpha.size() != d || params.xi.size() != d || params.eta.size() != d)
        throw ConfigError("rate_kappa: delta, alpha, xi, eta must share length d >= 1");
    double eta_sum = 0.0, gap_min = std::numeric_limits<double>::infinity();
    double delta_min = std::numeric_limits<double>::infinity(), worst = -std::numeric_limits<double>::infinity();
    double eta_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (!(params.delta[j] > params.eta[j]))
            throw ConfigError("rate_kappa: requires delta_j > eta_j (violated at j = " +
                              std::to_string(j + 1) + ")");
        if (!(params.alpha[j] > 0.0 && params.alpha[j] <= 2.0))
            throw ConfigError("rate_kappa: requires 0 < alpha_j <= 2 (violated at j = " +
                              std::to_string(j + 1) + ")");
        if (!(params.eta[j] > 0.0 && params.eta[j] < 1.0))
            throw ConfigError("rate_kappa: requires eta_j in (0,1) (violated at j = " +
                              std::to_string(j + 1) + ")");
        eta_sum += params.eta[j];
        gap_min = std::min(gap_min, params.delta[j] - params.eta[j]);
        delta_min = std::min(delta_min, params.delta[j]);
        eta_min = std::min(eta_min, params.eta[j]);
        worst = std::max(worst, params.delta[j] * params.alpha[j] + params.xi[j]);
    }
    if (!(eta_sum < 1.0)) throw ConfigError("rate_kappa: requires eta_+ < 1");
    KappaBounds k;
    k.kappa1 = 0.5 * (1.0 - eta_sum) + gap_min - 0.5 * worst;
    k.kappa2 = 2.0 * eta_min + gap_min;
    k.kappa3 = delta_min + gap_min;
    k.kappa = std::min(k.kappa1, std::min(k.kappa2, k.kappa3));
    return k;
}

namespace {

void require_p1(const Dgp& dgp, const char* what) {
    if (dgp.p != 1)
        throw ConfigError(std::string(what) + ": requires a one-dimensional covariate (p = 1)");
    if (!dgp.r0_1d_d1 || !dgp.r0_1d_d2)
        throw ConfigError(std::string(what) + ": dgp lacks index derivative data");
}

} // namespace

double bias_cor2(const Dgp& dgp, double x, double h, const KernelSpec& second_kernel,
                 const KernelSpec& first_kernel) {
    require_p1(dgp, "bias_cor2");
    if (!dgp.rho_1d) throw ConfigError("bias_cor2: dgp lacks rho data");
    double mu2K = kernel_constants(second_kernel).mu2;
    double mu2L = kernel_constants(first_kernel).mu2;
    auto bracket = [&](double xx) {
        double s = dgp.phi_at(xx);
        return dgp.r0_1d_d2(s) * dgp.rho_1d(s);
    };
    const double step = 1e-5;
    double dbracket = (bracket(x + step) - bracket(x - step)) / (2.0 * step);
    double s = dgp.phi_at(x);
    double beta = mu2K * dgp.m0_d2(x) -
                  mu2L * (dgp.r0_1d_d2(s) * dgp.m0_d1(x) - dbracket);
    return 0.5 * beta * h * h;
}

namespace {

// J-tilde(v, x) = int K(v - r0'(phi(x)) u) L*(u) du
double jtilde(double v, double c, const KernelSpec& K, const EquivalentKernel& Lstar) {
    return integrate([&](double u) { return eval_kernel(K, v - c * u) * Lstar(u); }, -1.0, 1.0,
                     1e-9);
}

} // namespace

double avar_cor(const Dgp& dgp, double x, BandwidthRegime regime,
                const KernelSpec& second_kernel, const KernelSpec& first_kernel,
                int first_stage_order) {
    double fr = dgp.f_R(x);
    if (!(fr > 0.0)) throw ConfigError("avar_cor: f_R(x) must be positive");
    double rk = kernel_constants(second_kernel).rk;

    if (regime == BandwidthRegime::g_slower) {
        // oracle variance: depends only on Var(eps | R = x), K and f_R
        return dgp.var_eps_at(x) * rk / fr;
    }
    if (regime == BandwidthRegime::g_faster) {
        if (!dgp.rho_is_zero)
            throw ConfigError("avar_cor: the g-faster regime requires rho = 0");
        double m1 = dgp.m0_d1(x);
        double v = dgp.var_eps_at(x) + m1 * m1 * dgp.var_zeta_at(x) -
                   2.0 * m1 * dgp.cov_eps_zeta_at(x);
        return v * rk / fr;
    }

    // equal bandwidths: three-term formula with the J and H-Gamma kernels
    require_p1(dgp, "avar_cor(equal_bw)");
    double s = dgp.phi_at(x);
    double r0p = dgp.r0_1d_d1(s);
    double m1 = dgp.m0_d1(x);
    double fs = dgp.f_S([&] { Vec v(1); v[0] = s; return v; }());
    EquivalentKernel Lstar(first_kernel, MultiIndexBasis::build(1, first_stage_order));

    // H-Gamma in covariate units: lambda(x) * phi'(x) * L*(tau) with
    // lambda = -rho'(phi)/r0'(phi); vanishes identically when rho = 0.
    double lam_w = 0.0;
    if (!dgp.rho_is_zero) {
        if (!dgp.rho_1d_d1) throw ConfigError("avar_cor(equal_bw): dgp lacks rho derivative");
        lam_w = -dgp.rho_1d_d1(s) / (r0p * r0p);
    }

    auto weight = [&](double tau) {
        return m1 * jtilde(r0p * tau, r0p, second_kernel, Lstar) - lam_w * Lstar(tau);
    };
    double lim = 1.0 + (1.0 + 1.0) / std::abs(r0p) + 1.0; // covers both supports
    double c2 = integrate([&](double t) { double w = weight(t); return w * w; }, -lim, lim, 1e-8);
    double c1 = integrate([&](double t) { return eval_kernel(second_kernel, r0p * t) * weight(t); },
                          -lim, lim, 1e-8);
    double ve = dgp.var_eps_at(x), vz = dgp.var_zeta_at(x), cez = dgp.cov_eps_zeta_at(x);
    double r2 = r0p * r0p;
    return ve * rk / fr - 2.0 * cez * (r2 / fs) * c1 + vz * (r2 / fs) * c2;
}

double prop1_kernel(const Dgp& dgp, BandwidthRegime regime, double x, const Vec& v,
                    const KernelSpec& second_kernel, const KernelSpec& first_kernel,
                    int first_stage_order, double h, double g) {
    if (regime == BandwidthRegime::g_faster) {
        // leading weight is K_h(r0(v) - x) itself
        double u = (dgp.r0(v) - x) / h;
        return eval_kernel(second_kernel, u) / h;
    }
    if (regime == BandwidthRegime::equal_bw) {
        require_p1(dgp, "prop1_kernel(equal_bw)");
        EquivalentKernel Lstar(first_kernel, MultiIndexBasis::build(1, first_stage_order));
        double r0s = dgp.r0(v);
        double slope = dgp.r0_1d_d1(v[0]);
        return integrate(
            [&](double u) {
                return eval_kernel(second_kernel, (r0s - x - slope * u * h) / h) / h * Lstar(u);
            },
            -1.0, 1.0, 1e-9);
    }
    // g_slower: H-Delta_g(x, v) = (phi_x(v_rest, x)/g) *
    //   int L*(tau, (phi(v_rest,x) - v_p)/g + tau . phi_rest(v_rest,x)) dtau
    if (!dgp.phi || !dgp.phi_dx || !dgp.phi_drest)
        throw ConfigError("prop1_kernel(g_slower): dgp lacks the monotone-inverse data");
    const int p = dgp.p;
    Vec rest = v.head(p - 1);
    double ph = dgp.phi(rest, x);
    double phx = dgp.phi_dx(rest, x);
    double a = (ph - v[p - 1]) / g;
    if (p == 1) {
        EquivalentKernel Lstar(first_kernel, MultiIndexBasis::build(1, first_stage_order));
        return phx / g * Lstar(a);
    }
    if (p == 2) {
        EquivalentKernel Lstar(first_kernel, MultiIndexBasis::build(2, first_stage_order));
        Vec dr = dgp.phi_drest(rest, x);
        return phx / g *
               integrate(
                   [&](double tau) {
                       Vec t(2);
                       t[0] = tau;
                       t[1] = a + tau * dr[0];
                       return Lstar(t);
                   },
                   -1.0, 1.0, 1e-9);
    }
    throw ConfigError("prop1_kernel(g_slower): supported for p <= 2");
}

double gamma_leading_kernel(const Dgp& dgp, double x, const Vec& v,
                            const KernelSpec& first_kernel, int first_stage_order, double g) {
    if (dgp.rho_is_zero) return 0.0;
    if (!dgp.phi || !dgp.phi_dx)
        throw ConfigError("gamma_leading_kernel: dgp lacks the monotone-inverse data");
    const int p = dgp.p;
    if (p > 2) throw ConfigError("gamma_leading_kernel: supported for p <= 2");
    {
        Vec rest0 = v.head(p - 1);
        Vec at(p);
        at.head(p - 1) = rest0;
        at[p - 1] = dgp.phi(rest0, x);
        if (std::abs(dgp.r0_grad(at)[p - 1]) < 1e-10)
            throw NumericError(
                "gamma_leading_kernel: degenerate monotonicity (index derivative ~ 0)");
    }
    EquivalentKernel Lstar(first_kernel, MultiIndexBasis::build(p, first_stage_order));

    // H(x,v) = -d/dx Psi(x,v) with
    //   Psi(x,v) = int rho(s_rest, phi) phi_x(s_rest, x) L*_g(v - (s_rest, phi)) ds_rest,
    // the smoothed conditional-expectation functional behind the Gamma term.
    // The derivative is taken by central differences with step 1e-5.
    auto psi = [&](double xx) {
        if (p == 1) {
            double ph = dgp.phi(Vec(0), xx);
            double phx = dgp.phi_dx(Vec(0), xx);
            Vec s(1);
            s[0] = ph;
            return dgp.rho(s) * phx * Lstar((v[0] - ph) / g) / g;
        }
        // p == 2: integrate over the non-index coordinate
        return integrate(
            [&](double s1) {
                Vec rest(1);
                rest[0] = s1;
                double ph = dgp.phi(rest, xx);
                double phx = dgp.phi_dx(rest, xx);
                Vec s(2);
                s[0] = s1;
                s[1] = ph;
                Vec t(2);
                t[0] = (v[0] - s1) / g;
                t[1] = (v[1] - ph) / g;
                return dgp.rho(s) * phx * Lstar(t) / (g * g);
            },
            dgp.s_lo[0], dgp.s_hi[0], 1e-9);
    };
    const double step = 1e-5;
    return -(psi(x + step) - psi(x - step)) / (2.0 * step);
}

ThetaWindow bandwidth_window(Application app, int p, int q, double eta, int d1) {
    if (p < 1 || q < 0) throw ConfigError("bandwidth_window: invalid dimensions");
    ThetaWindow w;
    if (app == Application::censored) {
        if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("bandwidth_window: eta must lie in (0,1)");
        w.upper = (1.0 - 3.0 * eta) / p;
        w.lower = std::max((1.0 - 4.0 * eta) / p, 1.0 / (2.0 * (q + 1) + p));
    } else {
        double lo = std::max(1.0 / (5.0 + d1), 1.0 / (2.0 * p + 3.0));
        double hi = 1.0 / (1.0 + d1);
        if (!(eta > lo && eta < hi))
            throw ConfigError("bandwidth_window(triangular): eta = " + std::to_string(eta) +
                              " outside the admissible interval (" + std::to_string(lo) + ", " +
                              std::to_string(hi) + ")");
        w.upper = (1.0 - 3.0 * eta) / (2.0 * p);
        w.lower = (1.0 - eta * (d1 + 1)) / (2.0 * (q + 1));
    }
    if (!(w.lower < w.upper))
        throw ConfigError("bandwidth_window: infeasible configuration, lower bound " +
                          std::to_string(w.lower) + " >= upper bound " + std::to_string(w.upper));
    return w;
}

} // namespace genreg
