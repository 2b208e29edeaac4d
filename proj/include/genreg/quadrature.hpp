#pragma once

#include <functional>

namespace genreg {

// Adaptive Simpson on [a,b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

// Tensor-product version: adaptive Simpson in x of adaptive Simpson in y.
double integrate2(const std::function<double(double, double)>& f,
                  double ax, double bx, double ay, double by, double tol = 1e-8);

} // namespace genreg
