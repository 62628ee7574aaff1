#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp with identical
// results; the dispatching overloads pick one by Exec. Results never depend
// on thread count: each index writes its own slot and reductions are done
// serially afterwards in index order.

#include <cstddef>
#include <exception>
#include <utility>
#include <vector>

#ifdef IBMAG_HAS_OPENMP
#include <omp.h>
#endif

namespace ibmag {

enum class Exec { serial, parallel };

namespace kernels {

/// x_i = a + i (b - a) / (n - 1), with the last node pinned to b.
inline double grid_node(double a, double b, std::size_t n, std::size_t i) {
    if (n < 2) return a;
    if (i + 1 == n) return b;
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
}

namespace serial {

template <class F>
std::vector<double> sweep(F&& f, double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(grid_node(a, b, n, i));
    return out;
}

template <class F>
std::vector<double> transform(F&& f, const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
    return out;
}

template <class F, class R>
std::vector<R> map_index(F&& f, std::size_t n) {
    std::vector<R> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
}

}  // namespace serial

namespace omp {

template <class F>
std::vector<double> sweep(F&& f, double a, double b, std::size_t n) {
    std::vector<double> out(n);
    auto const count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) {
        auto const k = static_cast<std::size_t>(i);
        out[k] = f(grid_node(a, b, n, k));
    }
    return out;
}

template <class F>
std::vector<double> transform(F&& f, const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    auto const count = static_cast<long long>(xs.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) {
        auto const k = static_cast<std::size_t>(i);
        out[k] = f(xs[k]);
    }
    return out;
}

// Exceptions must not escape an OpenMP region; the first one (by index) is
// captured and rethrown after the loop.
template <class F, class R>
std::vector<R> map_index(F&& f, std::size_t n) {
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errors(n);
    auto const count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        auto const k = static_cast<std::size_t>(i);
        try {
            out[k] = f(k);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto const& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace omp

/// f evaluated on the n-node uniform grid over [a, b].
template <class F>
std::vector<double> sweep(F&& f, double a, double b, std::size_t n, Exec exec) {
    if (exec == Exec::parallel) return omp::sweep(f, a, b, n);
    return serial::sweep(f, a, b, n);
}

/// out[i] = f(xs[i]); f must not throw.
template <class F>
std::vector<double> transform(F&& f, const std::vector<double>& xs, Exec exec) {
    if (exec == Exec::parallel) return omp::transform(f, xs);
    return serial::transform(f, xs);
}

/// out[i] = f(i) for i in [0, n); used for independent restarts.
template <class R, class F>
std::vector<R> map_index(F&& f, std::size_t n, Exec exec) {
    if (exec == Exec::parallel) return omp::map_index<F, R>(std::forward<F>(f), n);
    return serial::map_index<F, R>(std::forward<F>(f), n);
}

inline int max_threads() {
#ifdef IBMAG_HAS_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace kernels
}  // namespace ibmag
