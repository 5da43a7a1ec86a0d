#include <atomic>
#include <cstdlib>
#include <string>

#include "mimm/error.hpp"
#include "mimm/kernels/kernels.hpp"

namespace mimm::kernels {

#ifndef MIMM_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* resolve(const std::string& name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") {
    require(avx2_kernels() != nullptr, ErrorKind::validation, "AVX2 kernels were not built");
    require(cpu_has_avx2(), ErrorKind::validation, "this CPU does not support AVX2+FMA");
    return avx2_kernels();
  }
  require(name == "auto" || name.empty(), ErrorKind::validation,
          "unknown kernel backend '" + name + "' (scalar, avx2, auto)");
  if (avx2_kernels() != nullptr && cpu_has_avx2()) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{[] {
    const char* env = std::getenv("MIMM_KERNELS");
    return resolve(env ? env : "auto");
  }()};
  return table;
}

}  // namespace

const KernelTable& active_kernels() { return *current().load(std::memory_order_acquire); }

void select_kernels(const std::string& name) {
  current().store(resolve(name), std::memory_order_release);
}

}  // namespace mimm::kernels
