#include "genreg/local_poly.hpp"

#include "genreg/errors.hpp"

#include <cmath>
#include <sstream>

namespace genreg {

namespace {

std::string point_to_string(const Vec& s) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index j = 0; j < s.size(); ++j) os << (j ? ", " : "") << s[j];
    os << ")";
    return os.str();
}

} // namespace

LocalPolyModel::LocalPolyModel(Mat S, Vec T, int order, KernelSpec kernel, Vec bandwidths,
                               double ridge_epsilon)
    : S_(std::move(S)),
      T_(std::move(T)),
      basis_(MultiIndexBasis::build(static_cast<int>(S_.cols()), order)),
      kernel_(kernel),
      h_(std::move(bandwidths)),
      ridge_(ridge_epsilon) {
    if (S_.rows() != T_.size())
        throw DataError("local polynomial: S and T row counts differ");
    if (h_.size() != S_.cols())
        throw ConfigError("local polynomial: one bandwidth per covariate column required");
    for (Eigen::Index j = 0; j < h_.size(); ++j)
        if (!(h_[j] > 0.0)) throw ConfigError("local polynomial: bandwidth must be > 0");
    if (ridge_ < 0.0) throw ConfigError("local polynomial: ridge_epsilon must be >= 0");
}

namespace {
LocalPolyModel with_shared_bandwidth(Mat S, Vec T, int order, KernelSpec kernel, double bandwidth,
                                     double ridge_epsilon) {
    Vec h = Vec::Constant(S.cols(), bandwidth);
    return LocalPolyModel(std::move(S), std::move(T), order, kernel, std::move(h), ridge_epsilon);
}
} // namespace

LocalPolyModel::LocalPolyModel(Mat S, Vec T, int order, KernelSpec kernel, double bandwidth,
                               double ridge_epsilon)
    : LocalPolyModel(with_shared_bandwidth(std::move(S), std::move(T), order, kernel, bandwidth,
                                           ridge_epsilon)) {}

LocalPolyModel::TryFit LocalPolyModel::try_fit_at(const Vec& s) const {
    TryFit out;
    const int p = static_cast<int>(S_.cols());
    const int N = basis_.size();
    if (s.size() != p) throw ConfigError("fit_at: evaluation point has wrong dimension");

    Mat A = Mat::Zero(N, N);
    Vec b = Vec::Zero(N);
    Vec u(p);
    int eff = 0;
    for (Eigen::Index i = 0; i < S_.rows(); ++i) {
        bool inside = true;
        for (int j = 0; j < p; ++j) {
            u[j] = (S_(i, j) - s[j]) / h_[j];
            if (std::abs(u[j]) >= 1.0) { inside = false; break; }
        }
        if (!inside) continue;
        double w = 1.0;
        for (int j = 0; j < p; ++j) w *= eval_kernel(kernel_, u[j]) / h_[j];
        if (w <= 0.0) continue;
        ++eff;
        Vec mu = basis_.monomials(u);
        A.selfadjointView<Eigen::Lower>().rankUpdate(mu, w);
        b.noalias() += w * T_[i] * mu;
    }
    A = A.selfadjointView<Eigen::Lower>();

    if (eff < N && ridge_ == 0.0) {
        out.failure = "singular window at s = " + point_to_string(s) + ": " +
                      std::to_string(eff) + " effective observations for basis size " +
                      std::to_string(N);
        return out;
    }
    if (ridge_ > 0.0) A.diagonal().array() += ridge_;

    Eigen::LDLT<Mat> ldlt(A);
    Vec d = ldlt.vectorD();
    double dmax = d.cwiseAbs().maxCoeff();
    double dmin = d.cwiseAbs().minCoeff();
    if (ridge_ == 0.0 && (ldlt.info() != Eigen::Success || !(dmin > 1e-12 * dmax))) {
        out.failure = "singular window at s = " + point_to_string(s) +
                      ": rank-deficient weighted design (" + std::to_string(eff) +
                      " effective observations, pivot ratio " +
                      std::to_string(dmax > 0 ? dmin / dmax : 0.0) + ")";
        return out;
    }

    Vec beta = ldlt.solve(b);

    Fit fit;
    fit.eff_n = eff;
    fit.coeffs = Vec(N);
    // rescale from the (S_i - s)/h basis to plain (S_i - s)^u coefficients
    for (int k = 0; k < N; ++k) {
        double scale = 1.0;
        for (int j = 0; j < p; ++j)
            for (int e = 0; e < basis_.indices[k][j]; ++e) scale /= h_[j];
        fit.coeffs[k] = beta[k] * scale;
    }
    fit.alpha = fit.coeffs[0];
    out.fit = fit;
    return out;
}

LocalPolyModel::Fit LocalPolyModel::fit_at(const Vec& s) const {
    TryFit t = try_fit_at(s);
    if (!t.fit) throw NumericError("local polynomial: " + t.failure);
    return *t.fit;
}

Vec LocalPolyModel::predict_grid(const Mat& pts, Exec exec) const {
    if (pts.rows() == 0) throw ConfigError("predict_grid: empty grid");
    if (pts.cols() != S_.cols()) throw ConfigError("predict_grid: grid dimension mismatch");
    Vec out(pts.rows());
    std::vector<std::string> failures(pts.rows());
    for_each_index(static_cast<std::size_t>(pts.rows()), [&](std::size_t i) {
        TryFit t = try_fit_at(pts.row(i).transpose());
        if (t.fit)
            out[static_cast<Eigen::Index>(i)] = t.fit->alpha;
        else
            failures[i] = t.failure;
    }, exec);
    for (std::size_t i = 0; i < failures.size(); ++i)
        if (!failures[i].empty())
            throw NumericError("predict_grid: grid point " + std::to_string(i) + ": " + failures[i]);
    return out;
}

Vec LocalPolyModel::gradient_at(const Vec& s) const {
    if (basis_.order < 1)
        throw ConfigError("gradient_at: unsupported for order q = 0");
    Fit fit = fit_at(s);
    const int p = static_cast<int>(S_.cols());
    Vec grad(p);
    // degree-1 block occupies entries 1..p of the basis
    for (int k = 1; k <= p; ++k) {
        for (int j = 0; j < p; ++j) {
            if (basis_.indices[k][j] == 1) {
                grad[j] = fit.coeffs[k];
                break;
            }
        }
    }
    return grad;
}

} // namespace genreg
