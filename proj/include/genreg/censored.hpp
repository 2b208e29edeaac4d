#pragma once

#include "genreg/dgp.hpp"
#include "genreg/kernel.hpp"
#include "genreg/local_poly.hpp"

#include <memory>
#include <string>
#include <vector>

namespace genreg {

enum class SignConvention { minus, plus };

struct CensoredConfig {
    int first_stage_order = 1;
    double g = 0.0; // first-stage bandwidth (r-hat)
    double h = 0.0; // second-stage bandwidth (q-hat on the generated index)
    KernelSpec first_kernel = KernelSpec::triweight();
    KernelSpec second_kernel = KernelSpec::triweight();
    double clip_floor = 0.05; // q-hat values are clipped here before inversion
    int quad_nodes = 513;     // fixed trapezoid nodes, replication-deterministic
    // The identification argument fixes the minus sign; the plus variant is
    // kept only so the tests can confirm it diverges.
    SignConvention sign = SignConvention::minus;
};

struct CensoredFit {
    Vec grid_x;
    Vec mu_hat;
    Vec r_hat;   // first stage at the grid points
    Vec q_grid;  // shared integration grid over the index range
    Vec q_hat;   // clipped q-hat on q_grid
    double lambda = 0.0;
    std::vector<int> clipped_nodes; // per grid point: clipped nodes in its range
    std::vector<std::string> flags;
};

// r-hat: order-q local polynomial of Y on X with bandwidth g; q-hat: local
// linear of 1{Y > 0} on the generated index with bandwidth h; mu-hat by
// composite trapezoid of 1/q-hat from r-hat(x) to lambda = max_i r-hat(X_i).
CensoredFit fit_censored(const Mat& X, const Vec& Y, const Vec& grid_x,
                         const CensoredConfig& config);

// Corollary-5 variance constant sigma_r^2(x) R(L) / (f_S(x) s0(x)^2).
double censored_avar(const CensoredDgp& dgp, double x, const KernelSpec& first_kernel);

} // namespace genreg
