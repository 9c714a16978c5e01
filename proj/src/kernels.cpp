#include "gnp/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gnp {

int resolve_threads(int requested) {
    if (requested >= 1) return requested;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double dot_fd(std::span<const float> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void axpy_float(double alpha, std::span<const float> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * static_cast<double>(x[i]);
}

double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

void score_all_serial(const MatD& item_reps, std::span<const double> user_rep, std::span<double> out) {
    for (std::size_t i = 0; i < item_reps.rows; ++i) {
        out[i] = dot(item_reps.row(i), user_rep);
    }
}

void score_all_omp(const MatD& item_reps, std::span<const double> user_rep, std::span<double> out, int n_threads) {
    parallel_for(item_reps.rows, n_threads == 1 ? 0 : n_threads,
                 [&](std::size_t i) { out[i] = dot(item_reps.row(i), user_rep); });
}

void score_all(const MatD& item_reps, std::span<const double> user_rep, std::span<double> out, int n_threads) {
    if (n_threads == 1) {
        score_all_serial(item_reps, user_rep, out);
    } else {
        score_all_omp(item_reps, user_rep, out, n_threads);
    }
}

} // namespace gnp
