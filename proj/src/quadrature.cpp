#include "genreg/quadrature.hpp"

#include <cmath>

namespace genreg {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b, double fb,
             double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, fa, m, fm, lm, flm);
    double right = simpson(f, m, fm, b, fb, rm, frm);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = simpson(f, a, fa, b, fb, m, fm);
    // splitting at the midpoints of halves first avoids symmetric-cancellation
    // traps on kernels that are exactly symmetric about (a+b)/2
    return adapt(f, a, fa, m, fm, 0.5 * (a + m), f(0.5 * (a + m)),
                 simpson(f, a, fa, m, fm, 0.5 * (a + m), f(0.5 * (a + m))), 0.5 * tol, 48) +
           adapt(f, m, fm, b, fb, 0.5 * (m + b), f(0.5 * (m + b)),
                 simpson(f, m, fm, b, fb, 0.5 * (m + b), f(0.5 * (m + b))), 0.5 * tol, 48);
}

double integrate2(const std::function<double(double, double)>& f,
                  double ax, double bx, double ay, double by, double tol) {
    auto outer = [&](double x) {
        return integrate([&](double y) { return f(x, y); }, ay, by, 0.1 * tol);
    };
    return integrate(outer, ax, bx, tol);
}

} // namespace genreg
