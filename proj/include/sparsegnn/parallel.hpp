#pragma once

#include <algorithm>
#include <span>
#include <thread>
#include <vector>

#include "sparsegnn/types.hpp"

namespace sparsegnn {

inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace detail {

// Work below this many weighted units runs inline on the calling thread.
inline constexpr offset_t kSerialCutoff = 1u << 14;

} // namespace detail

/// Contiguous row chunks balanced by nonzero count (plus one unit per row,
/// so empty rows still spread). Returns chunk boundaries of length
/// n_chunks+1 with boundaries.front()==0 and boundaries.back()==n_rows.
inline std::vector<index_t> balanced_row_partition(std::span<const offset_t> row_ptr,
                                                   index_t n_rows, int n_chunks) {
    std::vector<index_t> bounds(static_cast<std::size_t>(n_chunks) + 1, n_rows);
    bounds[0] = 0;
    const offset_t total = row_ptr[n_rows] + n_rows;
    index_t row = 0;
    for (int c = 1; c < n_chunks; ++c) {
        const offset_t target = total * static_cast<offset_t>(c) / static_cast<offset_t>(n_chunks);
        // cumulative cost through row i is row_ptr[i] + i, strictly increasing
        while (row < n_rows && row_ptr[row] + row < target) ++row;
        bounds[c] = row;
    }
    return bounds;
}

/// Runs fn(row_begin, row_end) over an nnz-balanced partition of the rows.
/// Each row is handled by exactly one worker, so outputs written per row are
/// identical for every thread count.
template <typename Fn>
void parallel_for_rows(index_t n_rows, std::span<const offset_t> row_ptr, int threads, Fn&& fn) {
    if (n_rows == 0) return;
    int n = resolve_threads(threads);
    const offset_t work = row_ptr[n_rows] + n_rows;
    if (n <= 1 || work < detail::kSerialCutoff) {
        fn(index_t{0}, n_rows);
        return;
    }
    n = std::min<int>(n, static_cast<int>(n_rows));
    const std::vector<index_t> bounds = balanced_row_partition(row_ptr, n_rows, n);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n) - 1);
    for (int c = 1; c < n; ++c) {
        if (bounds[c] < bounds[c + 1])
            workers.emplace_back([&fn, lo = bounds[c], hi = bounds[c + 1]] { fn(lo, hi); });
    }
    if (bounds[0] < bounds[1]) fn(bounds[0], bounds[1]);
    for (auto& w : workers) w.join();
}

/// Evenly split [0, n) across workers; min_serial gates the inline path.
template <typename Fn>
void parallel_for_range(index_t n, int threads, offset_t min_serial, Fn&& fn) {
    if (n == 0) return;
    int t = resolve_threads(threads);
    if (t <= 1 || n < min_serial) {
        fn(index_t{0}, n);
        return;
    }
    t = std::min<int>(t, static_cast<int>(n));
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(t) - 1);
    auto bound = [&](int c) { return static_cast<index_t>(static_cast<std::uint64_t>(n) * c / t); };
    for (int c = 1; c < t; ++c) {
        if (bound(c) < bound(c + 1))
            workers.emplace_back([&fn, lo = bound(c), hi = bound(c + 1)] { fn(lo, hi); });
    }
    fn(bound(0), bound(1));
    for (auto& w : workers) w.join();
}

} // namespace sparsegnn
