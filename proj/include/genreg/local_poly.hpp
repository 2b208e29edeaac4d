#pragma once

#include "genreg/kernel.hpp"
#include "genreg/multi_index.hpp"
#include "genreg/parallel.hpp"

#include <memory>
#include <optional>
#include <string>

namespace genreg {

// Multivariate local polynomial smoother of order q: at each evaluation point
// s it solves the kernel-weighted least squares problem over the monomial
// basis (S_i - s)^u, u_+ <= q, and reports the intercept as the fit.
class LocalPolyModel {
public:
    // bandwidths: one entry per column of S (the first stage uses a shared g)
    LocalPolyModel(Mat S, Vec T, int order, KernelSpec kernel, Vec bandwidths,
                   double ridge_epsilon = 0.0);
    LocalPolyModel(Mat S, Vec T, int order, KernelSpec kernel, double bandwidth,
                   double ridge_epsilon = 0.0);

    struct Fit {
        double alpha = 0.0; // fitted value = coeffs[0]
        Vec coeffs;         // monomial-basis coefficients, basis order
        int eff_n = 0;      // observations with positive kernel weight
    };

    // Throws NumericError naming s and the effective sample count when the
    // window is rank deficient (unless ridge_epsilon > 0).
    Fit fit_at(const Vec& s) const;

    // Same computation, but failures come back as a reason string.
    struct TryFit {
        std::optional<Fit> fit;
        std::string failure;
    };
    TryFit try_fit_at(const Vec& s) const;

    // Fitted values on a grid of points (rows). Pure per point, so the loop
    // parallelizes; Exec::serial is the reference path used by the tests.
    Vec predict_grid(const Mat& pts, Exec exec = Exec::openmp) const;

    // Degree-1 coefficient block; requires order >= 1.
    Vec gradient_at(const Vec& s) const;

    const MultiIndexBasis& basis() const { return basis_; }
    const Mat& covariates() const { return S_; }
    const Vec& response() const { return T_; }
    const Vec& bandwidths() const { return h_; }
    const KernelSpec& kernel() const { return kernel_; }
    int order() const { return basis_.order; }
    double ridge_epsilon() const { return ridge_; }

private:
    Mat S_;
    Vec T_;
    MultiIndexBasis basis_;
    KernelSpec kernel_;
    Vec h_;
    double ridge_ = 0.0;
};

} // namespace genreg
