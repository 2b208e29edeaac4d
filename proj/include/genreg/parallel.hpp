#pragma once

#include <cstddef>

namespace genreg {

// Global worker cap for the OpenMP kernels (0 = library default).
// Results never depend on it: parallel loops only fill pre-identified slots.
void set_thread_cap(int n);
int thread_cap();
int effective_threads();

enum class Exec { serial, openmp };

namespace detail {
void run_indexed_loop(std::size_t n, void* ctx, void (*body)(void*, std::size_t), Exec exec);
}

// Runs body(i) for i in [0, n). With Exec::openmp the iterations are spread
// over OpenMP threads; the serial variant is the reference implementation the
// tests compare against.
template <class F>
void for_each_index(std::size_t n, F&& body, Exec exec = Exec::openmp) {
    auto thunk = [](void* ctx, std::size_t i) { (*static_cast<F*>(ctx))(i); };
    detail::run_indexed_loop(n, const_cast<void*>(static_cast<const void*>(&body)), thunk, exec);
}

// Pairwise (indexed-tree) sum of a pre-filled buffer: deterministic regardless
// of how the slots were produced, and more accurate than a running sum.
double pairwise_sum(const double* data, std::size_t n);

} // namespace genreg
