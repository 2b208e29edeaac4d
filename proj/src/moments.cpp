#include "genreg/moments.hpp"

#include "genreg/errors.hpp"
#include "genreg/quadrature.hpp"

#include <cmath>
#include <vector>

namespace genreg {

double unscaled_product_kernel(const KernelSpec& spec, const Vec& t) {
    double out = 1.0;
    for (Eigen::Index j = 0; j < t.size(); ++j) {
        out *= eval_kernel(spec, t[j]);
        if (out == 0.0) return 0.0;
    }
    return out;
}

namespace {

// nu_m = int k(t) t^m dt; odd m vanish by symmetry but are integrated anyway.
std::vector<double> univariate_moments(const KernelSpec& spec, int max_order) {
    std::vector<double> nu(max_order + 1);
    for (int m = 0; m <= max_order; ++m) {
        nu[m] = integrate(
            [&](double t) { return eval_kernel(spec, t) * std::pow(t, m); }, -1.0, 1.0, 1e-12);
    }
    return nu;
}

} // namespace

Mat moment_matrix(const KernelSpec& spec, const MultiIndexBasis& basis) {
    const int N = basis.size();
    const int p = basis.dim;
    auto nu = univariate_moments(spec, 2 * basis.order);
    Mat M(N, N);
    for (int a = 0; a < N; ++a) {
        for (int b = a; b < N; ++b) {
            double v = 1.0;
            for (int j = 0; j < p; ++j) v *= nu[basis.indices[a][j] + basis.indices[b][j]];
            M(a, b) = M(b, a) = v;
        }
    }
    return M;
}

Mat moment_matrix_at(const KernelSpec& spec, const MultiIndexBasis& basis,
                     const std::function<double(const Vec&)>& density, const Vec& x, double g) {
    const int N = basis.size();
    const int p = basis.dim;
    if (!density) throw ConfigError("moment_matrix_at: density function required");
    if (p > 2) throw ConfigError("moment_matrix_at: supported for p <= 2");
    Mat M(N, N);
    for (int a = 0; a < N; ++a) {
        for (int b = a; b < N; ++b) {
            std::vector<int> u(p);
            for (int j = 0; j < p; ++j) u[j] = basis.indices[a][j] + basis.indices[b][j];
            double v;
            if (p == 1) {
                v = integrate(
                    [&](double t) {
                        Vec pt(1);
                        pt[0] = x[0] + g * t;
                        return eval_kernel(spec, t) * std::pow(t, u[0]) * density(pt);
                    },
                    -1.0, 1.0, 1e-9);
            } else {
                v = integrate2(
                    [&](double t1, double t2) {
                        Vec pt(2);
                        pt[0] = x[0] + g * t1;
                        pt[1] = x[1] + g * t2;
                        return eval_kernel(spec, t1) * eval_kernel(spec, t2) *
                               std::pow(t1, u[0]) * std::pow(t2, u[1]) * density(pt);
                    },
                    -1.0, 1.0, -1.0, 1.0, 1e-8);
            }
            M(a, b) = M(b, a) = v;
        }
    }
    return M;
}

EquivalentKernel::EquivalentKernel(KernelSpec spec, MultiIndexBasis basis)
    : spec_(spec), basis_(std::move(basis)) {
    Mat M = moment_matrix(spec_, basis_);
    Eigen::FullPivLU<Mat> lu(M);
    if (!lu.isInvertible())
        throw NumericError("equivalent kernel: moment matrix M_q is singular");
    Vec e1 = Vec::Zero(basis_.size());
    e1[0] = 1.0;
    w_ = lu.solve(e1); // M symmetric, so M^{-1} e1 equals the first row transposed
}

double EquivalentKernel::operator()(const Vec& t) const {
    double L = unscaled_product_kernel(spec_, t);
    if (L == 0.0) return 0.0;
    return w_.dot(basis_.monomials(t)) * L;
}

double EquivalentKernel::operator()(double t) const {
    Vec v(1);
    v[0] = t;
    return (*this)(v);
}

EquivalentKernel equivalent_kernel(const KernelSpec& spec, const MultiIndexBasis& basis) {
    return EquivalentKernel(spec, basis);
}

} // namespace genreg
