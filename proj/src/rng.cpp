#include "genreg/rng.hpp"

#include <cmath>

namespace genreg {

double Rng::normal() {
    // Box-Muller; u1 pushed away from 0 to keep log finite
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::truncated_normal(double c) {
    for (;;) {
        double z = normal();
        if (std::abs(z) <= c) return z;
    }
}

} // namespace genreg
