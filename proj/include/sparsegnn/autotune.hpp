#pragma once

#include <chrono>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sparsegnn/kernels.hpp"
#include "sparsegnn/rng.hpp"
#include "sparsegnn/sparse.hpp"

namespace sparsegnn {

/// Probed SIMD/core facts. vlen is the number of 32-bit lanes per vector
/// register, the granularity the specialized kernels were compiled for.
struct HardwareProfile {
    int simd_bits = 256;
    int vlen = 8; // simd_bits / 32
    int cores = 1;
    std::string description = "fallback";
};

/// Probes the CPU for its widest vector extension. Never fails: platforms
/// without a probe get the fallback profile (vlen = 8).
HardwareProfile detect_hardware();

/// Global toggle analogous to attaching/detaching the tuned kernels:
/// disabled means every spmm call takes the trusted path. Reads and writes
/// are atomic. Toggling never changes results, only which kernel runs.
struct DispatchState {
    bool tuned_enabled = true;
    std::vector<index_t> specialization_set;
};

void set_dispatch(bool enabled);
DispatchState get_dispatch();

/// Flips dispatch for a scope and restores the previous state on exit.
class DispatchGuard {
public:
    explicit DispatchGuard(bool enabled) : prev_(get_dispatch().tuned_enabled) {
        set_dispatch(enabled);
    }
    ~DispatchGuard() { set_dispatch(prev_); }
    DispatchGuard(const DispatchGuard&) = delete;
    DispatchGuard& operator=(const DispatchGuard&) = delete;

private:
    bool prev_;
};

/// Sweep candidates for a profile: members of the specialization sweep in
/// [k_min, k_max] that are multiples of the probed vlen. May be empty, in
/// which case callers simply stay on the trusted kernel.
std::vector<index_t> candidate_ks(const HardwareProfile& profile, index_t k_min, index_t k_max);

struct TuningEntry {
    index_t k = 0;
    double t_trusted_ms = 0;
    double t_specialized_ms = 0;
    double speedup = 0; // t_trusted_ms / t_specialized_ms
};

/// Speedup-vs-K curve for one graph, with the tie-broken argmax. The curve
/// is typically bell-shaped with the peak at the hardware's ideal K.
struct TuningReport {
    std::vector<TuningEntry> entries;
    index_t best_k = 0;
    HardwareProfile profile;
    std::string graph_id;
    std::vector<index_t> skipped; // requested Ks without a specialization
};

/// Text round trip of a report. Format: header
/// `k,t_trusted_ms,t_specialized_ms,speedup`, one data line per K, then
/// footer lines starting with `best_k` and `vlen` (plus the remaining
/// profile fields so the round trip is lossless).
void save_report(const TuningReport& report, const std::filesystem::path& path);
TuningReport load_report(const std::filesystem::path& path);

namespace detail {

inline double median_ms(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    return n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

} // namespace detail

/// Times trusted vs specialized Sum-SpMM on A for each requested K:
/// one warmup, then `reps` timed runs per kernel, keeping the median.
/// The warmup outputs are compared bitwise; a mismatch is a kernel bug and
/// throws InternalError. Ks without a specialization are recorded under
/// `skipped` rather than failing. The dense operand is seeded, so a sweep
/// is reproducible.
template <std::floating_point T>
TuningReport run_tuning(const CsrMatrix<T>& a, std::span<const index_t> ks, int reps = 5,
                        int threads = 0, std::uint64_t seed = 42,
                        const std::string& graph_id = "") {
    using clock = std::chrono::steady_clock;
    if (ks.empty()) throw ConfigError("run_tuning: candidate list is empty");
    if (reps < 3) throw ConfigError("run_tuning: reps must be >= 3");

    TuningReport report;
    report.profile = detect_hardware();
    report.graph_id = graph_id;

    std::vector<index_t> seen;
    for (index_t k : ks) {
        if (std::find(seen.begin(), seen.end(), k) != seen.end()) continue;
        seen.push_back(k);
        if (!is_specialized_k(k)) {
            report.skipped.push_back(k);
            continue;
        }

        DenseMatrix<T> b(a.n_cols, k);
        Rng rng(seed ^ (0x9e3779b97f4a7c15ull * k));
        for (T& v : b.data) v = static_cast<T>(rng.uniform01());

        DenseMatrix<T> out(a.n_rows, k);
        const KernelKind trusted = KernelKind::trusted();
        const KernelKind special = KernelKind::specialized(k);

        // Warmup doubles as the correctness assertion.
        detail::spmm_into(a, b, ReduceOp::Sum, trusted, threads, out);
        DenseMatrix<T> reference = out;
        detail::spmm_into(a, b, ReduceOp::Sum, special, threads, out);
        if (!bitwise_equal(reference, out))
            throw InternalError("run_tuning: specialized kernel K=" + std::to_string(k) +
                                " disagrees with trusted kernel");
        reference = DenseMatrix<T>();

        std::vector<double> t_trusted(reps), t_special(reps);
        for (int r = 0; r < reps; ++r) {
            const auto t0 = clock::now();
            detail::spmm_into(a, b, ReduceOp::Sum, trusted, threads, out);
            t_trusted[r] = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        }
        for (int r = 0; r < reps; ++r) {
            const auto t0 = clock::now();
            detail::spmm_into(a, b, ReduceOp::Sum, special, threads, out);
            t_special[r] = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        }

        TuningEntry entry;
        entry.k = k;
        entry.t_trusted_ms = detail::median_ms(std::move(t_trusted));
        entry.t_specialized_ms = detail::median_ms(std::move(t_special));
        entry.speedup = entry.t_trusted_ms / entry.t_specialized_ms;
        report.entries.push_back(entry);
    }

    if (report.entries.empty())
        throw ConfigError("run_tuning: no requested K has a specialized kernel");

    const TuningEntry* best = &report.entries.front();
    for (const TuningEntry& e : report.entries)
        if (e.speedup > best->speedup || (e.speedup == best->speedup && e.k < best->k)) best = &e;
    report.best_k = best->k;
    return report;
}

} // namespace sparsegnn
