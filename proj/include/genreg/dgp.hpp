#pragma once

#include "genreg/dataset.hpp"
#include "genreg/kernel.hpp"
#include "genreg/rng.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace genreg {

// Fully specified data-generating process for the two-stage model
//   Y = m0(r0(S)) + rho(S) + eps*,   T = r0(S) + zeta,
// with everything the oracle computations need: closed-form derivatives,
// densities, the monotone inverse phi of the last covariate, and samplers.
// The index R = r0(S) is scalar (d = 1) throughout.
struct Dgp {
    std::string name;
    int p = 1;

    std::function<double(const Vec&)> r0;
    std::function<Vec(const Vec&)> r0_grad;

    std::function<double(double)> m0;
    std::function<double(double)> m0_d1;
    std::function<double(double)> m0_d2;

    bool rho_is_zero = true;
    std::function<double(const Vec&)> rho; // identically 0 allowed

    // p = 1 scalar forms used by the corollary formulas
    std::function<double(double)> r0_1d, r0_1d_d1, r0_1d_d2;
    std::function<double(double)> rho_1d, rho_1d_d1;

    std::function<double(const Vec&)> f_S;
    Vec s_lo, s_hi;

    // Assumption-6 machinery: r0(s_rest, phi(s_rest, x)) = x
    std::function<double(const Vec&, double)> phi;
    std::function<double(const Vec&, double)> phi_dx;
    std::function<Vec(const Vec&, double)> phi_drest; // p-1 entries

    std::function<double(double)> f_R;
    double index_lo = 0.0, index_hi = 1.0;

    std::function<void(Rng&, Vec&)> draw_S;
    std::function<double(Rng&)> draw_zeta, draw_eps;

    // conditional moments given R = x (constant in the reference DGPs)
    std::function<double(double)> var_eps_at, var_zeta_at, cov_eps_zeta_at;

    double phi_at(double x) const { return phi(Vec(0), x); } // p = 1 shorthand
};

// Censored-regression process Y = max(0, mu0(X) - U), U independent of X.
struct CensoredDgp {
    std::string name;
    std::function<double(double)> mu0;
    std::function<double(Rng&)> draw_X;
    std::function<double(Rng&)> draw_U;
    std::function<double(double)> f_X;
    double x_lo = 0.0, x_hi = 1.0;
    std::function<double(double)> s0;    // P(Y > 0 | X = x)
    std::function<double(double)> var_y; // Var(Y | X = x)
    std::function<double(double)> r0;    // E(Y | X = x)
};

// Triangular process Y = mu1(X1,Z1) + lambda(V) + eps*, X1 = mu2(Z) + V,
// with d1 = d2 = 1 exogenous/instrument dimensions.
struct TriangularDgp {
    std::string name;
    std::function<double(double, double)> mu1;
    std::function<double(double, double)> mu2; // (z1, z2)
    std::function<double(double)> lambda_v;
    std::function<double(Rng&)> draw_z1, draw_z2, draw_v, draw_eps;
    double var_eps = 0.25;
    std::function<double(double)> f_V;
    double v_lo = 0.0, v_hi = 0.0;
    // density of (X1, Z1) given V = v
    std::function<double(double, double, double)> f_xz1_given_v;
};

struct TriangularSample {
    Vec y, x1, z1, z2, v;
};

// Registry of reference processes (dgp-a, dgp-b, dgp-c).
const Dgp& dgp_by_name(const std::string& name);
const CensoredDgp& censored_dgp_by_name(const std::string& name); // cens-mix30, cens-light
const TriangularDgp& triangular_dgp_by_name(const std::string& name); // tri-a
std::vector<std::string> dgp_names();

// Load-time sanity checks: monotone index, inverse identity, positive density.
void validate_dgp(const Dgp& dgp);

// Draws the sample for the two-stage model; bit-reproducible from the seed.
Dataset generate_sample(const Dgp& dgp, long n, std::uint64_t seed);

Mat generate_censored_sample(const CensoredDgp& dgp, long n, std::uint64_t seed); // cols: x, y
TriangularSample generate_triangular_sample(const TriangularDgp& dgp, long n, std::uint64_t seed);

} // namespace genreg
