// Shared basics: error types, small velocity vectors, a deterministic
// parallel-for, and library version metadata.
#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fdl {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Errors.  Every failure mode surfaced by the library is one of these, so
// callers can distinguish bad inputs from numerical breakdowns.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class UnsupportedRegime : public Error {
public:
    using Error::Error;
};

class InstabilityError : public Error {
public:
    using Error::Error;
};

class StatisticsError : public Error {
public:
    using Error::Error;
};

class ResolutionError : public Error {
public:
    using Error::Error;
};

class UnsamplableKernel : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Velocity / wave vectors.  Dimension is small (1..3) and carried by value.
// ---------------------------------------------------------------------------

struct Vec {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    int dim = 1;

    Vec() = default;
    explicit Vec(double x) : c{x, 0.0, 0.0}, dim(1) {}
    Vec(double x, double y) : c{x, y, 0.0}, dim(2) {}
    Vec(double x, double y, double z) : c{x, y, z}, dim(3) {}

    double& operator[](int i) { return c[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<size_t>(i)]; }

    Vec operator-() const {
        Vec r = *this;
        for (int i = 0; i < dim; ++i) r.c[static_cast<size_t>(i)] = -r.c[static_cast<size_t>(i)];
        return r;
    }

    double norm2() const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += c[static_cast<size_t>(i)] * c[static_cast<size_t>(i)];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }

    bool finite() const {
        for (int i = 0; i < dim; ++i)
            if (!std::isfinite(c[static_cast<size_t>(i)])) return false;
        return true;
    }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
    return s;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    Vec r = a;
    for (int i = 0; i < a.dim; ++i) r[i] = a[i] - b[i];
    return r;
}

// <v> = sqrt(1 + |v|^2)
inline double bracket(double r) { return std::sqrt(1.0 + r * r); }
inline double bracket(const Vec& v) { return std::sqrt(1.0 + v.norm2()); }

// ---------------------------------------------------------------------------
// Threading.  Results must not depend on the worker count, so parallel loops
// write into preassigned slots and any reduction happens in index order.
// ---------------------------------------------------------------------------

int default_thread_count();  // FDL_THREADS env var, else hardware concurrency
void set_thread_count(int n);

// Runs fn(i) for i in [0, n).  fn must only touch state owned by index i.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = 0) {
    if (threads <= 0) threads = default_thread_count();
    const int nw = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
    if (nw <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr eptr = nullptr;
    std::atomic<bool> failed{false};
    pool.reserve(static_cast<size_t>(nw));
    for (int t = 0; t < nw; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) break;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) eptr = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (eptr) std::rethrow_exception(eptr);
}

// Pairwise (cascade) summation: deterministic and accurate for long sums.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

}  // namespace fdl
