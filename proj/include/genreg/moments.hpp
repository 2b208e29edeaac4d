#pragma once

#include "genreg/kernel.hpp"
#include "genreg/multi_index.hpp"

#include <functional>

namespace genreg {

// Unscaled p-dimensional product kernel L(t) = prod_j k(t_j).
double unscaled_product_kernel(const KernelSpec& spec, const Vec& t);

// M_q: entries nu_{tau_j + tau_k} with nu_u = int L(t) t^u dt.
Mat moment_matrix(const KernelSpec& spec, const MultiIndexBasis& basis);

// M_{n,q}(x): entries nu_{n, tau_j + tau_k}(x) with
// nu_{n,u}(x) = int L(t) t^u f_S(x + g t) dt. Supports p <= 2.
Mat moment_matrix_at(const KernelSpec& spec, const MultiIndexBasis& basis,
                     const std::function<double(const Vec&)>& density, const Vec& x, double g);

// Equivalent kernel L*(t) = e1' Mq^{-1} mu(t) L(t): unit mass, vanishing
// moments through order q.
class EquivalentKernel {
public:
    EquivalentKernel(KernelSpec spec, MultiIndexBasis basis);

    double operator()(const Vec& t) const;
    double operator()(double t) const; // p = 1 convenience

    const Vec& weights() const { return w_; }
    const MultiIndexBasis& basis() const { return basis_; }
    const KernelSpec& kernel() const { return spec_; }

private:
    KernelSpec spec_;
    MultiIndexBasis basis_;
    Vec w_; // first row of Mq^{-1}
};

EquivalentKernel equivalent_kernel(const KernelSpec& spec, const MultiIndexBasis& basis);

} // namespace genreg
