#pragma once

#include <cstddef>
#include <span>

#include "gnp/common.hpp"

namespace gnp {

// Number of worker threads to use: n >= 1 as given, n <= 0 means "all cores".
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n). With n_threads == 1 this is a plain loop (the
// deterministic reference path); otherwise an OpenMP static-schedule loop.
// Results are identical either way as long as iteration i writes only slot i.
template <typename F>
void parallel_for(std::size_t n, int n_threads, F&& fn);

double dot(std::span<const double> a, std::span<const double> b);
double dot_fd(std::span<const float> a, std::span<const double> b);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpy_float(double alpha, std::span<const float> x, std::span<double> y);

// Order-stable pairwise (cascade) summation.
double pairwise_sum(std::span<const double> v);

// All-ranking score kernel: out[i] = <items.row(i), user_rep>.
// Serial reference and OpenMP variant produce bitwise-identical output.
void score_all_serial(const MatD& item_reps, std::span<const double> user_rep, std::span<double> out);
void score_all_omp(const MatD& item_reps, std::span<const double> user_rep, std::span<double> out, int n_threads);
void score_all(const MatD& item_reps, std::span<const double> user_rep, std::span<double> out, int n_threads);

} // namespace gnp

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gnp {

template <typename F>
void parallel_for(std::size_t n, int n_threads, F&& fn) {
#ifdef _OPENMP
    if (n_threads != 1 && n > 1) {
        const int nt = resolve_threads(n_threads);
#pragma omp parallel for schedule(static) num_threads(nt)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)n_threads;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

} // namespace gnp
