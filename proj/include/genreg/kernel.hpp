#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace genreg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class KernelId { triweight, quartic, epanechnikov };

// Compactly supported symmetric kernel density on [-1,1].
// smoothness_order is the highest order of continuous derivative on all of R:
// triweight is C^2, quartic C^1, epanechnikov C^0.
struct KernelSpec {
    KernelId id = KernelId::triweight;
    double support_radius = 1.0;
    int smoothness_order = 2;

    static KernelSpec triweight();
    static KernelSpec quartic();
    static KernelSpec epanechnikov();
    static KernelSpec by_name(std::string_view name); // throws ConfigError
    std::string name() const;
};

// k(u); exactly 0 for |u| >= 1 (closed support convention).
double eval_kernel(const KernelSpec& spec, double u);

// k^(order)(u), order in {1,2}; requires order <= smoothness_order.
double eval_kernel_derivative(const KernelSpec& spec, double u, int order);

// K_h(u) = prod_j k(u_j/h_j)/h_j
double product_kernel(const KernelSpec& spec, const Vec& u, const Vec& h);

// j-th entry: k'(u_j/h_j)/h_j^2 * prod_{l!=j} k(u_l/h_l)/h_l
Vec product_kernel_gradient(const KernelSpec& spec, const Vec& u, const Vec& h);

struct KernelConstants {
    double mu2; // int u^2 k(u) du
    double rk;  // int k(u)^2 du
};

// Both constants by adaptive quadrature over [-1,1].
KernelConstants kernel_constants(const KernelSpec& spec);

// Second-stage bandwidths h_j ~ n^{-eta_j} plus the first-stage g ~ n^{-theta}.
struct Bandwidths {
    Vec h;        // d entries, all > 0
    double g = 0; // shared across the p first-stage dimensions
    Vec eta;      // d rate exponents, each in (0,1), sum < 1
    double theta = 0;

    void validate(int p) const; // throws ConfigError on violated constraints
};

} // namespace genreg
