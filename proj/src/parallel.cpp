#include "genreg/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <atomic>

namespace genreg {

namespace {
std::atomic<int> g_thread_cap{0};
}

void set_thread_cap(int n) { g_thread_cap.store(n < 0 ? 0 : n); }

int thread_cap() { return g_thread_cap.load(); }

int effective_threads() {
#ifdef _OPENMP
    int cap = g_thread_cap.load();
    int hw = omp_get_max_threads();
    return cap == 0 ? hw : (cap < hw ? cap : hw);
#else
    return 1;
#endif
}

namespace detail {

void run_indexed_loop(std::size_t n, void* ctx, void (*body)(void*, std::size_t), Exec exec) {
#ifdef _OPENMP
    if (exec == Exec::openmp && n > 1) {
        int nt = effective_threads();
        if (nt > 1) {
#pragma omp parallel for schedule(static) num_threads(nt)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                body(ctx, static_cast<std::size_t>(i));
            return;
        }
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) body(ctx, i);
}

} // namespace detail

double pairwise_sum(const double* data, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

} // namespace genreg
