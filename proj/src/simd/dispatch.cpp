#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "momentrec/simd/kernels.hpp"

namespace momentrec::simd {
namespace {

const KernelTable* table_for(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return &scalar_kernels();
    case Backend::avx2:
      return cpu_supports(Backend::avx2) ? avx2_kernels() : nullptr;
  }
  return nullptr;
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("MOMENTREC_SIMD")) {
    const std::string requested{env};
    if (requested == "scalar") return &scalar_kernels();
    if (requested == "avx2" && backend_available(Backend::avx2)) return table_for(Backend::avx2);
  }
  if (backend_available(Backend::avx2)) return table_for(Backend::avx2);
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

bool backend_available(Backend backend) {
  if (backend == Backend::scalar) return true;
  return cpu_supports(backend) && avx2_kernels() != nullptr;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Backend active_backend() { return active().backend; }

void select_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw std::invalid_argument("SIMD backend not available: " + std::string(backend_name(backend)));
  }
  current().store(table_for(backend), std::memory_order_release);
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace momentrec::simd
