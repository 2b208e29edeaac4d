#include "genreg/dgp.hpp"

#include "genreg/errors.hpp"

#include <cmath>

namespace genreg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// invert a scalar strictly increasing function on [lo,hi] by bisection+newton
double invert_monotone(const std::function<double(double)>& f,
                       const std::function<double(double)>& fp, double y, double lo, double hi) {
    double a = lo, b = hi;
    double s = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        double v = f(s) - y;
        if (std::abs(v) < 1e-14) break;
        if (v > 0)
            b = s;
        else
            a = s;
        double step = fp ? v / fp(s) : 0.0;
        double cand = s - step;
        s = (cand > a && cand < b) ? cand : 0.5 * (a + b);
    }
    return s;
}

// sinusoidally perturbed uniform index process; amp controls curvature
Dgp make_sine_dgp(const std::string& name, double amp, double zeta_sd, double eps_sd) {
    Dgp d;
    d.name = name;
    d.p = 1;
    auto r0s = [amp](double s) { return s + amp * std::sin(2.0 * kPi * s); };
    auto r0p = [amp](double s) { return 1.0 + amp * 2.0 * kPi * std::cos(2.0 * kPi * s); };
    auto r0pp = [amp](double s) { return -amp * 4.0 * kPi * kPi * std::sin(2.0 * kPi * s); };
    d.r0 = [r0s](const Vec& s) { return r0s(s[0]); };
    d.r0_grad = [r0p](const Vec& s) { Vec g(1); g[0] = r0p(s[0]); return g; };
    d.r0_1d = r0s;
    d.r0_1d_d1 = r0p;
    d.r0_1d_d2 = r0pp;
    d.m0 = [](double x) { return std::sin(2.0 * x) + x * x; };
    d.m0_d1 = [](double x) { return 2.0 * std::cos(2.0 * x) + 2.0 * x; };
    d.m0_d2 = [](double x) { return -4.0 * std::sin(2.0 * x) + 2.0; };
    d.rho_is_zero = true;
    d.rho = [](const Vec&) { return 0.0; };
    d.rho_1d = [](double) { return 0.0; };
    d.rho_1d_d1 = [](double) { return 0.0; };
    d.f_S = [](const Vec& s) { return (s[0] >= 0.0 && s[0] <= 1.0) ? 1.0 : 0.0; };
    d.s_lo = Vec::Zero(1);
    d.s_hi = Vec::Ones(1);
    d.phi = [r0s, r0p](const Vec&, double x) { return invert_monotone(r0s, r0p, x, 0.0, 1.0); };
    d.phi_dx = [r0s, r0p](const Vec&, double x) {
        return 1.0 / r0p(invert_monotone(r0s, r0p, x, 0.0, 1.0));
    };
    d.phi_drest = [](const Vec&, double) { return Vec(0); };
    d.f_R = [r0s, r0p](double x) {
        if (x < 0.0 || x > 1.0) return 0.0;
        return 1.0 / r0p(invert_monotone(r0s, r0p, x, 0.0, 1.0));
    };
    d.index_lo = 0.0;
    d.index_hi = 1.0;
    d.draw_S = [](Rng& rng, Vec& s) { s.resize(1); s[0] = rng.uniform01(); };
    d.draw_zeta = [zeta_sd](Rng& rng) { return rng.normal(0.0, zeta_sd); };
    d.draw_eps = [eps_sd](Rng& rng) { return rng.normal(0.0, eps_sd); };
    d.var_eps_at = [eps_sd](double) { return eps_sd * eps_sd; };
    d.var_zeta_at = [zeta_sd](double) { return zeta_sd * zeta_sd; };
    d.cov_eps_zeta_at = [](double) { return 0.0; };
    return d;
}

// p = 2 variant with index = last covariate and a mean-zero rho in the first:
// rho(s) = 0.3 * (psi(s1)) with psi(t) = t for t <= 1/2, -t above, centered.
Dgp make_dgp_b() {
    Dgp d;
    d.name = "dgp-b";
    d.p = 2;
    auto psi = [](double t) { return (t <= 0.5 ? t : -t) + 0.25; };
    d.r0 = [](const Vec& s) { return s[1]; };
    d.r0_grad = [](const Vec&) { Vec g(2); g[0] = 0.0; g[1] = 1.0; return g; };
    d.m0 = [](double x) { return std::sin(2.0 * x) + x * x; };
    d.m0_d1 = [](double x) { return 2.0 * std::cos(2.0 * x) + 2.0 * x; };
    d.m0_d2 = [](double x) { return -4.0 * std::sin(2.0 * x) + 2.0; };
    d.rho_is_zero = false;
    d.rho = [psi](const Vec& s) { return 0.3 * psi(s[0]); };
    d.f_S = [](const Vec& s) {
        return (s[0] >= 0.0 && s[0] <= 1.0 && s[1] >= 0.0 && s[1] <= 1.0) ? 1.0 : 0.0;
    };
    d.s_lo = Vec::Zero(2);
    d.s_hi = Vec::Ones(2);
    d.phi = [](const Vec&, double x) { return x; };
    d.phi_dx = [](const Vec&, double) { return 1.0; };
    d.phi_drest = [](const Vec&, double) { Vec g(1); g[0] = 0.0; return g; };
    d.f_R = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
    d.index_lo = 0.0;
    d.index_hi = 1.0;
    d.draw_S = [](Rng& rng, Vec& s) {
        s.resize(2);
        s[0] = rng.uniform01();
        s[1] = rng.uniform01();
    };
    d.draw_zeta = [](Rng& rng) { return rng.normal(0.0, 0.3); };
    d.draw_eps = [](Rng& rng) { return rng.normal(0.0, 0.5); };
    // Var(rho(S1)) = 0.09 * E psi^2 = 0.09 * 13/48
    d.var_eps_at = [](double) { return 0.25 + 0.09 * (13.0 / 48.0); };
    d.var_zeta_at = [](double) { return 0.09; };
    d.cov_eps_zeta_at = [](double) { return 0.0; };
    return d;
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Acceptance censored process: exactly 30% censoring on average.
// U is a mixture: w=0.6 Uniform[1,2] (drives censoring, never exceeds mu0 max)
// and w=0.4 N(-2.25, 0.3^2) truncated to +-3 sd (keeps E U = 0).
CensoredDgp make_cens_mix30() {
    CensoredDgp c;
    c.name = "cens-mix30";
    c.mu0 = [](double x) { return 1.0 + x; };
    c.draw_X = [](Rng& rng) { return rng.uniform01(); };
    c.draw_U = [](Rng& rng) {
        if (rng.uniform01() < 0.6) return rng.uniform(1.0, 2.0);
        return -2.25 + 0.3 * rng.truncated_normal(3.0);
    };
    c.f_X = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
    c.s0 = [](double x) { return 0.4 + 0.6 * x; };
    c.r0 = [](double x) { return 1.0 + x + 0.3 * (1.0 - x) * (1.0 - x); };
    c.var_y = [](double x) {
        const double z = 3.0;
        const double phi_z = std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
        const double mass = 2.0 * norm_cdf(z) - 1.0;
        const double tv = 0.09 * (1.0 - 2.0 * z * phi_z / mass); // truncated variance
        double m = 1.0 + x;
        double ey2 = 0.4 * ((m + 2.25) * (m + 2.25) + tv) + 0.2 * x * x * x;
        double r = 1.0 + x + 0.3 * (1.0 - x) * (1.0 - x);
        return ey2 - r * r;
    };
    return c;
}

// Light-censoring variant: U ~ N(0, 0.5^2) truncated to [-1,1], so every
// observation stays uncensored (mu0 >= 1 >= max U).
CensoredDgp make_cens_light() {
    CensoredDgp c;
    c.name = "cens-light";
    c.mu0 = [](double x) { return 1.0 + x; };
    c.draw_X = [](Rng& rng) { return rng.uniform01(); };
    c.draw_U = [](Rng& rng) { return 0.5 * rng.truncated_normal(2.0); };
    c.f_X = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
    c.s0 = [](double) { return 1.0; };
    const double z = 2.0;
    const double phi_z = std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
    const double mass = 2.0 * norm_cdf(z) - 1.0;
    const double tv = 0.25 * (1.0 - 2.0 * z * phi_z / mass);
    c.var_y = [tv](double) { return tv; };
    c.r0 = [](double x) { return 1.0 + x; };
    return c;
}

TriangularDgp make_tri_a() {
    TriangularDgp t;
    t.name = "tri-a";
    t.mu1 = [](double x1, double z1) { return std::sin(2.0 * x1) + z1 * z1; };
    t.mu2 = [](double z1, double z2) { return z1 + 2.0 * z2 + 0.2 * std::sin(kPi * z1); };
    t.lambda_v = [](double v) { return 0.5 * v; };
    t.draw_z1 = [](Rng& rng) { return rng.uniform01(); };
    t.draw_z2 = [](Rng& rng) { return rng.uniform01(); };
    t.draw_v = [](Rng& rng) { return 0.3 * rng.truncated_normal(2.5); };
    t.draw_eps = [](Rng& rng) { return rng.normal(0.0, 0.5); };
    t.var_eps = 0.25;
    const double z = 2.5;
    const double mass = 2.0 * norm_cdf(z) - 1.0;
    t.f_V = [mass](double v) {
        double u = v / 0.3;
        if (std::abs(u) > 2.5) return 0.0;
        return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * kPi) * 0.3 * mass);
    };
    t.v_lo = -0.75;
    t.v_hi = 0.75;
    // X1 | (Z1=z1, V=v) = mu2(z1, Z2) + v with Z2 ~ U[0,1] and d mu2/d z2 = 2
    t.f_xz1_given_v = [](double x1, double z1, double v) {
        if (z1 < 0.0 || z1 > 1.0) return 0.0;
        double base = z1 + 0.2 * std::sin(kPi * z1) + v;
        double u = (x1 - base) / 2.0;
        return (u >= 0.0 && u <= 1.0) ? 0.5 : 0.0;
    };
    return t;
}

} // namespace

const Dgp& dgp_by_name(const std::string& name) {
    static const Dgp a = make_sine_dgp("dgp-a", 0.1, 0.3, 0.5);
    static const Dgp b = make_dgp_b();
    static const Dgp c = make_sine_dgp("dgp-c", 0.05, 0.03, 0.5);
    if (name == "dgp-a") return a;
    if (name == "dgp-b") return b;
    if (name == "dgp-c") return c;
    throw ConfigError("unknown dgp '" + name + "' (expected dgp-a | dgp-b | dgp-c)");
}

const CensoredDgp& censored_dgp_by_name(const std::string& name) {
    static const CensoredDgp m = make_cens_mix30();
    static const CensoredDgp l = make_cens_light();
    if (name == "cens-mix30") return m;
    if (name == "cens-light") return l;
    throw ConfigError("unknown censored dgp '" + name + "' (expected cens-mix30 | cens-light)");
}

const TriangularDgp& triangular_dgp_by_name(const std::string& name) {
    static const TriangularDgp t = make_tri_a();
    if (name == "tri-a") return t;
    throw ConfigError("unknown triangular dgp '" + name + "' (expected tri-a)");
}

std::vector<std::string> dgp_names() {
    return {"dgp-a", "dgp-b", "dgp-c", "cens-mix30", "cens-light", "tri-a"};
}

void validate_dgp(const Dgp& dgp) {
    // monotone index in the last covariate: grid check of the partial derivative
    const int grid_n = 10000;
    Vec s = dgp.s_lo;
    for (int i = 0; i <= grid_n; ++i) {
        double t = static_cast<double>(i) / grid_n;
        for (int j = 0; j < dgp.p; ++j) s[j] = dgp.s_lo[j] + t * (dgp.s_hi[j] - dgp.s_lo[j]);
        if (!(dgp.r0_grad(s)[dgp.p - 1] > 0.0))
            throw ConfigError("dgp '" + dgp.name + "': index not strictly increasing in the last covariate");
        if (!(dgp.f_S(s) > 0.0))
            throw ConfigError("dgp '" + dgp.name + "': density not positive on its support");
    }
    // inverse identity r0(s_rest, phi(s_rest, x)) = x
    Vec rest = dgp.s_lo.head(dgp.p - 1);
    for (int i = 0; i <= 100; ++i) {
        double x = dgp.index_lo + (dgp.index_hi - dgp.index_lo) * i / 100.0;
        Vec full(dgp.p);
        full.head(dgp.p - 1) = rest;
        full[dgp.p - 1] = dgp.phi(rest, x);
        if (std::abs(dgp.r0(full) - x) > 1e-8)
            throw ConfigError("dgp '" + dgp.name + "': phi is not the inverse of r0 (identity off by more than 1e-8)");
    }
}

Dataset generate_sample(const Dgp& dgp, long n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.S.resize(n, dgp.p);
    ds.T.resize(n);
    ds.Y.resize(n);
    Vec s(dgp.p);
    for (long i = 0; i < n; ++i) {
        dgp.draw_S(rng, s);
        ds.S.row(i) = s.transpose();
        double r = dgp.r0(s);
        ds.T[i] = r + dgp.draw_zeta(rng);
        ds.Y[i] = dgp.m0(r) + dgp.rho(s) + dgp.draw_eps(rng);
    }
    return ds;
}

Mat generate_censored_sample(const CensoredDgp& dgp, long n, std::uint64_t seed) {
    Rng rng(seed);
    Mat out(n, 2);
    for (long i = 0; i < n; ++i) {
        double x = dgp.draw_X(rng);
        double u = dgp.draw_U(rng);
        out(i, 0) = x;
        out(i, 1) = std::max(0.0, dgp.mu0(x) - u);
    }
    return out;
}

TriangularSample generate_triangular_sample(const TriangularDgp& dgp, long n, std::uint64_t seed) {
    Rng rng(seed);
    TriangularSample s;
    s.y.resize(n);
    s.x1.resize(n);
    s.z1.resize(n);
    s.z2.resize(n);
    s.v.resize(n);
    for (long i = 0; i < n; ++i) {
        double z1 = dgp.draw_z1(rng);
        double z2 = dgp.draw_z2(rng);
        double v = dgp.draw_v(rng);
        double x1 = dgp.mu2(z1, z2) + v;
        s.z1[i] = z1;
        s.z2[i] = z2;
        s.v[i] = v;
        s.x1[i] = x1;
        s.y[i] = dgp.mu1(x1, z1) + dgp.lambda_v(v) + dgp.draw_eps(rng);
    }
    return s;
}

} // namespace genreg
