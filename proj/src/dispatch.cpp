#include <atomic>

#include "sparsegnn/autotune.hpp"
#include "sparsegnn/kernels.hpp"

namespace sparsegnn {

namespace {
std::atomic<bool> g_tuned_enabled{true};
} // namespace

void set_dispatch(bool enabled) { g_tuned_enabled.store(enabled, std::memory_order_relaxed); }

DispatchState get_dispatch() {
    DispatchState s;
    s.tuned_enabled = g_tuned_enabled.load(std::memory_order_relaxed);
    s.specialization_set.assign(specialization_sweep.begin(), specialization_sweep.end());
    return s;
}

KernelKind resolve_kernel(index_t k, ReduceOp reduce) {
    // Only Sum has generated-kernel support; everything else, and any K
    // outside the compiled set, silently falls back to the trusted kernel.
    if (!g_tuned_enabled.load(std::memory_order_relaxed)) return KernelKind::trusted();
    if (reduce != ReduceOp::Sum) return KernelKind::trusted();
    if (!is_specialized_k(k)) return KernelKind::trusted();
    return KernelKind::specialized(k);
}

} // namespace sparsegnn
