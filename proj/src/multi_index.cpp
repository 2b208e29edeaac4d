#include "genreg/multi_index.hpp"

#include "genreg/errors.hpp"

#include <algorithm>

namespace genreg {

long multi_index_block_size(int p, int i) {
    // C(i+p-1, p-1)
    long num = 1, den = 1;
    for (int k = 1; k <= p - 1; ++k) {
        num *= (i + k);
        den *= k;
    }
    return num / den;
}

namespace {

void enumerate_degree(int p, int degree, std::vector<int>& cur, int pos, int left,
                      std::vector<std::vector<int>>& out) {
    if (pos == p - 1) {
        cur[pos] = left;
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= left; ++v) {
        cur[pos] = v;
        enumerate_degree(p, degree, cur, pos + 1, left - v, out);
    }
}

} // namespace

MultiIndexBasis MultiIndexBasis::build(int p, int q) {
    if (p < 1) throw ConfigError("multi-index basis: dimension p must be >= 1");
    if (q < 0) throw ConfigError("multi-index basis: order q must be >= 0");
    MultiIndexBasis basis;
    basis.dim = p;
    basis.order = q;
    for (int degree = 0; degree <= q; ++degree) {
        std::vector<std::vector<int>> block;
        std::vector<int> cur(p, 0);
        enumerate_degree(p, degree, cur, 0, degree, block);
        // highest priority on the last position, descending, so that
        // (0,...,0,degree) is first and (degree,0,...,0) last
        std::sort(block.begin(), block.end(), [p](const auto& a, const auto& b) {
            for (int j = p - 1; j >= 0; --j)
                if (a[j] != b[j]) return a[j] > b[j];
            return false;
        });
        for (auto& t : block) basis.indices.push_back(std::move(t));
    }
    return basis;
}

Eigen::VectorXd MultiIndexBasis::monomials(const Eigen::VectorXd& t) const {
    if (t.size() != dim) throw ConfigError("monomials: point dimension mismatch");
    Eigen::VectorXd mu(size());
    for (int k = 0; k < size(); ++k) {
        double v = 1.0;
        for (int j = 0; j < dim; ++j)
            for (int e = 0; e < indices[k][j]; ++e) v *= t[j];
        mu[k] = v;
    }
    return mu;
}

} // namespace genreg
