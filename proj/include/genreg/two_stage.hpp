#pragma once

#include "genreg/dataset.hpp"
#include "genreg/dgp.hpp"
#include "genreg/kernel.hpp"
#include "genreg/local_poly.hpp"
#include "genreg/moments.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace genreg {

struct TwoStageConfig {
    int first_stage_order = 1;
    KernelSpec first_kernel = KernelSpec::triweight();
    KernelSpec second_kernel = KernelSpec::triweight();
    Bandwidths bandwidths;      // h (length 1) and g
    Vec grid;                   // evaluation points in index space
    double interior_trim = 0.0; // fraction of the index range trimmed per side
    double ridge_epsilon = 0.0; // first-stage rescue, off by default

    void validate() const;
};

// Two-stage fit: local polynomial first stage producing generated covariates
// Rhat_i, local linear second stage of Y on Rhat.
struct TwoStageFit {
    Vec grid;
    Vec m_hat;                      // NaN where the point is flagged
    std::vector<std::string> flags; // per-point failure reason, "" when ok
    std::vector<int> eff_n;         // second-stage window counts
    Vec rhat;                       // generated (or true) index at sample points
    std::shared_ptr<const LocalPolyModel> first_stage; // null for the oracle
    bool is_oracle = false;
    double h = 0.0;
    KernelSpec second_kernel;

    bool ok(int i) const { return flags[static_cast<std::size_t>(i)].empty(); }
};

// Real estimator: r-hat by order-q local polynomial of T on S, then local
// linear of Y on the generated index.
TwoStageFit fit_real(const Dataset& data, const TwoStageConfig& config);

// Oracle estimator: same second stage on the true index r0(S).
TwoStageFit fit_oracle(const Dataset& data, const Dgp& dgp, const TwoStageConfig& config);

// 41 equispaced points over [lo,hi] shrunk by trim per side.
Vec make_grid(double lo, double hi, int count, double trim);

enum class CorrectionMode { empirical, population };

struct Correction {
    Vec values;                        // NaN where flagged
    std::vector<uint8_t> near_boundary; // f_R below threshold
};

// Delta correction (leading form): smoothed first-stage error divided by f_R.
// matrix_form switches to the e1' Mh(x,r0)^{-1} sample-moment cross-check.
Correction delta_correction(const TwoStageFit& fit, const Dgp& dgp, CorrectionMode mode,
                            bool matrix_form = false);

// Gamma correction: K'-smoothed first-stage error weighted by rho.
Correction gamma_correction(const TwoStageFit& fit, const Dgp& dgp, CorrectionMode mode,
                            bool matrix_form = false);

struct ExpansionResidual {
    double sup_residual = 0.0; // sup |mhat - moracle + m0'(x) delta - gamma|
    double sup_raw_gap = 0.0;  // sup |mhat - moracle|
};

ExpansionResidual expansion_residual(const TwoStageFit& real_fit, const TwoStageFit& oracle_fit,
                                     const Vec& delta, const Vec& gamma, const Dgp& dgp);

struct ComplexityParams {
    Vec delta; // uniform first-stage rates, delta_j > eta_j
    Vec alpha; // entropy exponents in (0, 2]
    Vec xi;
    Vec eta;
};

struct KappaBounds {
    double kappa = 0.0; // min of the three supremal bounds
    double kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0;
};

// Supremal right-hand sides of the three strict rate inequalities; achievable
// kappa is any value strictly below kappa.
KappaBounds rate_kappa(const ComplexityParams& params);

enum class BandwidthRegime { equal_bw, g_faster, g_slower };

// Pointwise bias (1/2) beta(x) h^2 for the equal-bandwidth expansion (p=q=1).
double bias_cor2(const Dgp& dgp, double x, double h, const KernelSpec& second_kernel,
                 const KernelSpec& first_kernel);

// Asymptotic variance of sqrt(nh) (mhat - m0 - bias) under the given
// bandwidth regime. equal_bw requires p = 1 and composes the three-term
// formula from the J and H-Gamma weight kernels; g_faster requires rho = 0.
double avar_cor(const Dgp& dgp, double x, BandwidthRegime regime,
                const KernelSpec& second_kernel, const KernelSpec& first_kernel,
                int first_stage_order = 1);

// Weight kernels of the leading first-stage-noise terms, by quadrature.
// g_faster: K_h(r0(v)-x); equal_bw: J_h(x,v); g_slower: H-Delta_g(x,v).
double prop1_kernel(const Dgp& dgp, BandwidthRegime regime, double x, const Vec& v,
                    const KernelSpec& second_kernel, const KernelSpec& first_kernel,
                    int first_stage_order, double h, double g);

// H-Gamma_g(x,v): weight kernel of the leading Gamma term (Proposition 2 form).
double gamma_leading_kernel(const Dgp& dgp, double x, const Vec& v,
                            const KernelSpec& first_kernel, int first_stage_order, double g);

enum class Application { censored, triangular };

struct ThetaWindow {
    double lower = 0.0;
    double upper = 0.0;
};

// Admissible open interval for the first-stage exponent theta.
// censored: (max{(1-4 eta)/p, 1/(2(q+1)+p)}, (1-3 eta)/p)
// triangular: ((1-eta(d1+1))/(2(q+1)), (1-3 eta)/(2p)), eta-range checked.
ThetaWindow bandwidth_window(Application app, int p, int q, double eta, int d1 = 1);

} // namespace genreg
