#pragma once

// Numeric inner loops used across the project (normalization, profile
// averaging, ridge/GBT updates, RMSE, ranking distances).
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2 variant. The active table is chosen once at startup from CPUID and
// can be overridden with MOMENTREC_SIMD=scalar|avx2 or select_backend().
//
// Element-wise kernels (axpy, scale, abs_diff) are bit-identical across
// backends. Reductions (sum, dot, squared_error) differ only by summation
// order.

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace momentrec::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
  Backend backend;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum of (a[i] - b[i])^2
  double (*squared_error)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = x[i] * c
  void (*scale)(const double* x, double c, double* out, std::size_t n);
  // out[i] = |x[i] - c|
  void (*abs_diff)(const double* x, double c, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports(Backend backend);
bool backend_available(Backend backend);

const KernelTable& active();
Backend active_backend();

// Throws std::invalid_argument if the backend is unavailable on this build/CPU.
void select_backend(Backend backend);

std::string_view backend_name(Backend backend);

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_error(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().squared_error(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void scale(std::span<const double> x, double c, std::span<double> out) {
  assert(x.size() == out.size());
  active().scale(x.data(), c, out.data(), x.size());
}

inline void abs_diff(std::span<const double> x, double c, std::span<double> out) {
  assert(x.size() == out.size());
  active().abs_diff(x.data(), c, out.data(), x.size());
}

}  // namespace momentrec::simd
