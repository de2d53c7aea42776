#include "qmpemba/errors.hpp"
#include "qmpemba/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace qmpemba::kernels {

#ifndef QMPEMBA_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* initial_table() {
    if (const char* env = std::getenv("QMPEMBA_SIMD")) {
        if (std::string(env) == "scalar") return &scalar_kernels();
    }
    if (detected_isa() == Isa::Avx2) return avx2_kernels();
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

Isa detected_isa() {
    static const Isa isa = (avx2_kernels() != nullptr && cpu_has_avx2()) ? Isa::Avx2 : Isa::Scalar;
    return isa;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
    if (isa == Isa::Scalar) {
        current().store(&scalar_kernels(), std::memory_order_release);
        return;
    }
    if (detected_isa() != Isa::Avx2) {
        throw InvalidParameter("AVX2 kernels are not available on this machine or build");
    }
    current().store(avx2_kernels(), std::memory_order_release);
}

std::string_view name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

}  // namespace qmpemba::kernels
