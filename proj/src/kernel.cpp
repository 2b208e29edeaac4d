#include "genreg/kernel.hpp"

#include "genreg/errors.hpp"
#include "genreg/quadrature.hpp"

#include <cmath>

namespace genreg {

KernelSpec KernelSpec::triweight() { return {KernelId::triweight, 1.0, 2}; }
KernelSpec KernelSpec::quartic() { return {KernelId::quartic, 1.0, 1}; }
KernelSpec KernelSpec::epanechnikov() { return {KernelId::epanechnikov, 1.0, 0}; }

KernelSpec KernelSpec::by_name(std::string_view name) {
    if (name == "triweight") return triweight();
    if (name == "quartic") return quartic();
    if (name == "epanechnikov") return epanechnikov();
    throw ConfigError("unknown kernel '" + std::string(name) +
                      "' (expected triweight | quartic | epanechnikov)");
}

std::string KernelSpec::name() const {
    switch (id) {
        case KernelId::triweight: return "triweight";
        case KernelId::quartic: return "quartic";
        case KernelId::epanechnikov: return "epanechnikov";
    }
    return "?";
}

double eval_kernel(const KernelSpec& spec, double u) {
    double a = std::abs(u);
    if (a >= 1.0) return 0.0;
    double w = 1.0 - u * u;
    switch (spec.id) {
        case KernelId::triweight: return (35.0 / 32.0) * w * w * w;
        case KernelId::quartic: return (15.0 / 16.0) * w * w;
        case KernelId::epanechnikov: return 0.75 * w;
    }
    return 0.0;
}

double eval_kernel_derivative(const KernelSpec& spec, double u, int order) {
    if (order < 1 || order > 2)
        throw ConfigError("kernel derivative order must be 1 or 2");
    if (order > spec.smoothness_order)
        throw ConfigError("kernel '" + spec.name() + "' has smoothness order " +
                          std::to_string(spec.smoothness_order) +
                          "; derivative of order " + std::to_string(order) + " unsupported");
    double a = std::abs(u);
    if (a >= 1.0) return 0.0;
    double w = 1.0 - u * u;
    switch (spec.id) {
        case KernelId::triweight:
            return order == 1 ? -(105.0 / 16.0) * u * w * w
                              : -(105.0 / 16.0) * w * (1.0 - 5.0 * u * u);
        case KernelId::quartic:
            return -(15.0 / 4.0) * u * w; // order == 1 only (C^1)
        case KernelId::epanechnikov:
            break; // unreachable: smoothness_order == 0
    }
    return 0.0;
}

double product_kernel(const KernelSpec& spec, const Vec& u, const Vec& h) {
    if (u.size() != h.size())
        throw ConfigError("product_kernel: dimension mismatch (u has " +
                          std::to_string(u.size()) + " entries, h has " +
                          std::to_string(h.size()) + ")");
    double out = 1.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        if (h[j] <= 0.0) throw ConfigError("product_kernel: bandwidth must be positive");
        out *= eval_kernel(spec, u[j] / h[j]) / h[j];
        if (out == 0.0) return 0.0;
    }
    return out;
}

Vec product_kernel_gradient(const KernelSpec& spec, const Vec& u, const Vec& h) {
    if (u.size() != h.size())
        throw ConfigError("product_kernel_gradient: dimension mismatch");
    const Eigen::Index d = u.size();
    Vec vals(d), grad(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        if (h[j] <= 0.0) throw ConfigError("product_kernel_gradient: bandwidth must be positive");
        vals[j] = eval_kernel(spec, u[j] / h[j]) / h[j];
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        double dj = eval_kernel_derivative(spec, u[j] / h[j], 1) / (h[j] * h[j]);
        for (Eigen::Index l = 0; l < d; ++l)
            if (l != j) dj *= vals[l];
        grad[j] = dj;
    }
    return grad;
}

KernelConstants kernel_constants(const KernelSpec& spec) {
    auto k = [&](double u) { return eval_kernel(spec, u); };
    KernelConstants c;
    c.mu2 = integrate([&](double u) { return u * u * k(u); }, -1.0, 1.0, 1e-10);
    c.rk = integrate([&](double u) { return k(u) * k(u); }, -1.0, 1.0, 1e-10);
    return c;
}

void Bandwidths::validate(int p) const {
    if (h.size() == 0) throw ConfigError("bandwidths: h is empty");
    for (Eigen::Index j = 0; j < h.size(); ++j)
        if (!(h[j] > 0.0)) throw ConfigError("bandwidths: h_" + std::to_string(j + 1) + " must be > 0");
    if (!(g > 0.0)) throw ConfigError("bandwidths: g must be > 0");
    if (eta.size() != h.size()) throw ConfigError("bandwidths: eta must match h in length");
    double eta_sum = 0.0;
    for (Eigen::Index j = 0; j < eta.size(); ++j) {
        if (!(eta[j] > 0.0 && eta[j] < 1.0))
            throw ConfigError("bandwidths: eta_" + std::to_string(j + 1) + " must lie in (0,1)");
        eta_sum += eta[j];
    }
    if (!(eta_sum < 1.0))
        throw ConfigError("bandwidths: eta_+ = " + std::to_string(eta_sum) + " violates eta_+ < 1");
    if (!(theta > 0.0 && theta < 1.0 / p))
        throw ConfigError("bandwidths: theta must lie in (0, 1/p) with p = " + std::to_string(p));
}

} // namespace genreg
