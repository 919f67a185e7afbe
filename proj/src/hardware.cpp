#include <algorithm>
#include <thread>

#include "sparsegnn/autotune.hpp"

namespace sparsegnn {

HardwareProfile detect_hardware() {
    HardwareProfile p;
    unsigned hw = std::thread::hardware_concurrency();
    p.cores = hw > 0 ? static_cast<int>(hw) : 1;

#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx512f")) {
        p.simd_bits = 512;
        p.description = "x86-64 avx512f";
    } else if (__builtin_cpu_supports("avx2") || __builtin_cpu_supports("avx")) {
        p.simd_bits = 256;
        p.description = __builtin_cpu_supports("avx2") ? "x86-64 avx2" : "x86-64 avx";
    } else {
        p.simd_bits = 128;
        p.description = "x86-64 sse2";
    }
#elif defined(__aarch64__)
    p.simd_bits = 128;
    p.description = "aarch64 neon";
#else
    p.simd_bits = 256;
    p.description = "fallback";
#endif
    p.vlen = p.simd_bits / 32;
    return p;
}

std::vector<index_t> candidate_ks(const HardwareProfile& profile, index_t k_min, index_t k_max) {
    if (k_min > k_max) throw ConfigError("candidate_ks: k_min exceeds k_max");
    const index_t vlen = profile.vlen > 0 ? static_cast<index_t>(profile.vlen) : 8;
    std::vector<index_t> out;
    for (index_t k : specialization_sweep)
        if (k >= k_min && k <= k_max && k % vlen == 0) out.push_back(k);
    return out;
}

} // namespace sparsegnn
