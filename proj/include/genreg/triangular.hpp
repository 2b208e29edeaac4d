#pragma once

#include "genreg/dgp.hpp"
#include "genreg/kernel.hpp"
#include "genreg/local_poly.hpp"

#include <memory>
#include <string>
#include <vector>

namespace genreg {

struct TriangularConfig {
    int first_stage_order = 3;
    double g = 0.0; // first-stage bandwidth (mu2-hat on Z)
    double h = 0.0; // shared second-stage bandwidth across (X1, Z1, V) components
    KernelSpec first_kernel = KernelSpec::triweight();
    KernelSpec second_kernel = KernelSpec::triweight();
    double max_dropout = 0.10; // fraction of the marginal-integration sample
};

struct TriangularFit {
    Mat grid;     // rows (x1, z1...)
    Vec mu1_hat;  // marginal-integration estimate
    Vec dropout_frac;
    Vec v_hat;    // generated residuals
    std::vector<std::string> flags;
    std::shared_ptr<const LocalPolyModel> mu2_model;
};

// First stage: order-q local polynomial of X1 on Z = (Z1, Z2); generated
// residuals V-hat = X1 - mu2-hat(Z); second stage local linear of Y on
// (X1, Z1, V-hat); mu1-hat(x1, z1) by averaging over the V-hat_i.
// With use_true_v the pipeline is identical except the residual source,
// giving the oracle variant of the Corollary-6 comparison.
TriangularFit fit_triangular(const Vec& Y, const Vec& X1, const Mat& Z1, const Mat& Z2,
                             const Mat& grid, const TriangularConfig& config,
                             const Vec* true_v = nullptr);

// Corollary-6 variance constant: E(sigma_eps^2 / f_{XZ|V}(x1,z1,V)) R(K)^{1+d1}.
double triangular_avar(const TriangularDgp& dgp, double x1, double z1,
                       const KernelSpec& second_kernel);

} // namespace genreg
