#pragma once

#include <Eigen/Dense>

namespace genreg {

// Observed sample for the two-stage problem: covariates S (n x p), the
// first-stage response T (empty when not observed) and the outcome Y.
struct Dataset {
    Eigen::MatrixXd S;
    Eigen::VectorXd T;
    Eigen::VectorXd Y;

    long n() const { return S.rows(); }
    int p() const { return static_cast<int>(S.cols()); }
    bool has_first_stage() const { return T.size() == S.rows() && T.size() > 0; }
};

} // namespace genreg
