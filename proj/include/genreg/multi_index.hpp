#pragma once

#include <Eigen/Dense>

#include <vector>

namespace genreg {

// All p-tuples of nonnegative integers with total degree <= q, grouped by
// degree; within a degree block, lexicographic with highest priority on the
// last position, so (0,...,0,i) opens block i and (i,0,...,0) closes it.
struct MultiIndexBasis {
    int dim = 1;   // p
    int order = 0; // q
    std::vector<std::vector<int>> indices;

    int size() const { return static_cast<int>(indices.size()); }

    static MultiIndexBasis build(int p, int q);

    // mu(t): monomial vector t^{tau_k}, k = 0..N-1
    Eigen::VectorXd monomials(const Eigen::VectorXd& t) const;
};

// Number of p-tuples with total degree exactly i: C(i+p-1, p-1).
long multi_index_block_size(int p, int i);

} // namespace genreg
