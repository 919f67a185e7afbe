#pragma once

#include <algorithm>
#include <array>
#include <string>

#include "sparsegnn/parallel.hpp"
#include "sparsegnn/types.hpp"

namespace sparsegnn {

/// Which SpMM code path to run: the generic trusted kernel, or a
/// register-blocked kernel compiled for one fixed embedding size.
struct KernelKind {
    enum class Tag : std::uint8_t { Trusted, Specialized };

    Tag tag = Tag::Trusted;
    index_t k = 0; // meaningful for Specialized only

    static constexpr KernelKind trusted() { return {Tag::Trusted, 0}; }
    static constexpr KernelKind specialized(index_t k) { return {Tag::Specialized, k}; }

    bool is_specialized() const { return tag == Tag::Specialized; }
};

/// Embedding sizes with a precompiled specialized kernel.
inline constexpr std::array<index_t, 7> specialization_sweep{16, 32, 64, 128, 256, 512, 1024};

inline bool is_specialized_k(index_t k) {
    return std::find(specialization_sweep.begin(), specialization_sweep.end(), k) !=
           specialization_sweep.end();
}

/// Kernel choice for a (K, reduce) pair under the current dispatch state.
/// Falls back to Trusted whenever tuned kernels are disabled, the
/// reduction is not Sum, or K has no specialization. Defined in
/// src/dispatch.cpp; see autotune.hpp for the dispatch toggle.
KernelKind resolve_kernel(index_t k, ReduceOp reduce);

namespace detail {

// Generic row kernel: plain inner loop over K, no unrolling. Every output
// element accumulates its row's nonzeros in ascending column order.
template <std::floating_point T>
void spmm_rows_trusted(const CsrMatrix<T>& a, const DenseMatrix<T>& b, DenseMatrix<T>& c,
                       ReduceOp reduce, index_t row_begin, index_t row_end) {
    const index_t k = b.n_cols;
    for (index_t i = row_begin; i < row_end; ++i) {
        T* out = c.row_data(i);
        const offset_t lo = a.row_ptr[i];
        const offset_t hi = a.row_ptr[i + 1];

        if (reduce == ReduceOp::Sum || reduce == ReduceOp::Mean) {
            std::fill(out, out + k, T(0));
            for (offset_t e = lo; e < hi; ++e) {
                const T av = a.values[e];
                const T* brow = b.row_data(a.col_idx[e]);
                for (index_t kk = 0; kk < k; ++kk) out[kk] += av * brow[kk];
            }
            if (reduce == ReduceOp::Mean && hi > lo) {
                const T deg = static_cast<T>(hi - lo);
                for (index_t kk = 0; kk < k; ++kk) out[kk] = out[kk] / deg;
            }
        } else {
            // Min/Max: empty rows give zeros; otherwise start from the
            // first scaled element so no infinities appear.
            if (lo == hi) {
                std::fill(out, out + k, T(0));
                continue;
            }
            {
                const T av = a.values[lo];
                const T* brow = b.row_data(a.col_idx[lo]);
                for (index_t kk = 0; kk < k; ++kk) out[kk] = av * brow[kk];
            }
            if (reduce == ReduceOp::Min) {
                for (offset_t e = lo + 1; e < hi; ++e) {
                    const T av = a.values[e];
                    const T* brow = b.row_data(a.col_idx[e]);
                    for (index_t kk = 0; kk < k; ++kk) out[kk] = std::min(out[kk], av * brow[kk]);
                }
            } else {
                for (offset_t e = lo + 1; e < hi; ++e) {
                    const T av = a.values[e];
                    const T* brow = b.row_data(a.col_idx[e]);
                    for (index_t kk = 0; kk < k; ++kk) out[kk] = std::max(out[kk], av * brow[kk]);
                }
            }
        }
    }
}

// Fixed-K Sum kernel. The whole K-row of accumulators stays live across
// the nonzero loop (register blocking for the small sizes); the K loop is
// unrolled in compile-time chunks. Accumulation order per output element
// matches the trusted kernel exactly, so results are bitwise equal.
template <std::floating_point T, index_t K>
void spmm_rows_fixed(const CsrMatrix<T>& a, const DenseMatrix<T>& b, DenseMatrix<T>& c,
                     index_t row_begin, index_t row_end) {
    static_assert(K % 16 == 0);
    constexpr index_t kChunk = 8;
    for (index_t i = row_begin; i < row_end; ++i) {
        T acc[K] = {};
        for (offset_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
            const T av = a.values[e];
            const T* brow = b.data.data() + static_cast<std::size_t>(a.col_idx[e]) * K;
            for (index_t blk = 0; blk < K; blk += kChunk)
                for (index_t u = 0; u < kChunk; ++u) acc[blk + u] += av * brow[blk + u];
        }
        std::copy(acc, acc + K, c.row_data(i));
    }
}

template <std::floating_point T>
void spmm_rows_specialized(index_t k, const CsrMatrix<T>& a, const DenseMatrix<T>& b,
                           DenseMatrix<T>& c, index_t row_begin, index_t row_end) {
    switch (k) {
        case 16: spmm_rows_fixed<T, 16>(a, b, c, row_begin, row_end); return;
        case 32: spmm_rows_fixed<T, 32>(a, b, c, row_begin, row_end); return;
        case 64: spmm_rows_fixed<T, 64>(a, b, c, row_begin, row_end); return;
        case 128: spmm_rows_fixed<T, 128>(a, b, c, row_begin, row_end); return;
        case 256: spmm_rows_fixed<T, 256>(a, b, c, row_begin, row_end); return;
        case 512: spmm_rows_fixed<T, 512>(a, b, c, row_begin, row_end); return;
        case 1024: spmm_rows_fixed<T, 1024>(a, b, c, row_begin, row_end); return;
        default:
            throw DispatchError("no specialized kernel compiled for K=" + std::to_string(k));
    }
}

template <std::floating_point T>
void check_spmm_shapes(const CsrMatrix<T>& a, const DenseMatrix<T>& b) {
    if (a.n_cols != b.n_rows)
        throw ShapeError("spmm: sparse operand is " + std::to_string(a.n_rows) + "x" +
                         std::to_string(a.n_cols) + " but dense operand is " +
                         std::to_string(b.n_rows) + "x" + std::to_string(b.n_cols));
}

// Writes into a preallocated output; used by the tuner so timings do not
// include allocation.
template <std::floating_point T>
void spmm_into(const CsrMatrix<T>& a, const DenseMatrix<T>& b, ReduceOp reduce, KernelKind kind,
               int threads, DenseMatrix<T>& c) {
    parallel_for_rows(a.n_rows, a.row_ptr, threads, [&](index_t lo, index_t hi) {
        if (kind.is_specialized())
            spmm_rows_specialized<T>(kind.k, a, b, c, lo, hi);
        else
            spmm_rows_trusted(a, b, c, reduce, lo, hi);
    });
}

} // namespace detail

/// SpMM with an explicitly chosen kernel. A specialized kernel demands
/// reduce == Sum, a matching K, and membership in the specialization set.
/// Result is mathematically (and bitwise) the same as the trusted path.
template <std::floating_point T>
DenseMatrix<T> spmm_with(const CsrMatrix<T>& a, const DenseMatrix<T>& b, ReduceOp reduce,
                         KernelKind kind, int threads = 0) {
    detail::check_spmm_shapes(a, b);
    if (kind.is_specialized()) {
        if (reduce != ReduceOp::Sum)
            throw DispatchError(std::string("specialized kernels support sum only, got ") +
                                to_string(reduce));
        if (!is_specialized_k(kind.k))
            throw DispatchError("K=" + std::to_string(kind.k) + " is not in the specialization set");
        if (b.n_cols != kind.k)
            throw DispatchError("kernel is fixed at K=" + std::to_string(kind.k) +
                                " but dense operand has K=" + std::to_string(b.n_cols));
    }
    DenseMatrix<T> c(a.n_rows, b.n_cols);
    detail::spmm_into(a, b, reduce, kind, threads, c);
    return c;
}

/// Sparse-dense product with per-row reduction; the kernel is picked by the
/// global dispatch state (see autotune.hpp). Rows without nonzeros produce
/// zero output rows under every reduction.
template <std::floating_point T>
DenseMatrix<T> spmm(const CsrMatrix<T>& a, const DenseMatrix<T>& b,
                    ReduceOp reduce = ReduceOp::Sum, int threads = 0) {
    return spmm_with(a, b, reduce, resolve_kernel(b.n_cols, reduce), threads);
}

/// Sampled dense-dense product: keeps P's sparsity pattern and sets each
/// stored entry (i,j) to P[i,j] * dot(X[i,:], Y[j,:]).
template <std::floating_point T>
CsrMatrix<T> sddmm(const CsrMatrix<T>& p, const DenseMatrix<T>& x, const DenseMatrix<T>& y,
                   int threads = 0) {
    if (p.n_rows != x.n_rows || p.n_cols != y.n_rows || x.n_cols != y.n_cols)
        throw ShapeError("sddmm: pattern " + std::to_string(p.n_rows) + "x" +
                         std::to_string(p.n_cols) + " needs X with " + std::to_string(p.n_rows) +
                         " rows and Y with " + std::to_string(p.n_cols) +
                         " rows of equal width; got X " + std::to_string(x.n_rows) + "x" +
                         std::to_string(x.n_cols) + ", Y " + std::to_string(y.n_rows) + "x" +
                         std::to_string(y.n_cols));
    CsrMatrix<T> out = p;
    const index_t k = x.n_cols;
    parallel_for_rows(p.n_rows, p.row_ptr, threads, [&](index_t lo, index_t hi) {
        for (index_t i = lo; i < hi; ++i) {
            const T* xrow = x.row_data(i);
            for (offset_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
                const T* yrow = y.row_data(p.col_idx[e]);
                T dot = T(0);
                for (index_t kk = 0; kk < k; ++kk) dot += xrow[kk] * yrow[kk];
                out.values[e] = p.values[e] * dot;
            }
        }
    });
    return out;
}

/// One-pass composition of sddmm and spmm: per edge the scalar
/// combine(P[i,j], dot(X[i,:], Y[j,:])) scales Y[j,:], and the scaled rows
/// reduce into the output row. No intermediate sparse matrix is built.
template <std::floating_point T>
DenseMatrix<T> fusedmm(const CsrMatrix<T>& p, const DenseMatrix<T>& x, const DenseMatrix<T>& y,
                       const Semiring<T>& sr = Semiring<T>::plus_times(), int threads = 0) {
    if (p.n_rows != x.n_rows || p.n_cols != y.n_rows || x.n_cols != y.n_cols)
        throw ShapeError("fusedmm: operand shapes do not compose (P " + std::to_string(p.n_rows) +
                         "x" + std::to_string(p.n_cols) + ", X " + std::to_string(x.n_rows) + "x" +
                         std::to_string(x.n_cols) + ", Y " + std::to_string(y.n_rows) + "x" +
                         std::to_string(y.n_cols) + ")");
    const index_t k = y.n_cols;
    DenseMatrix<T> c(p.n_rows, k);
    const ReduceOp reduce = sr.reduce;
    parallel_for_rows(p.n_rows, p.row_ptr, threads, [&](index_t lo_row, index_t hi_row) {
        for (index_t i = lo_row; i < hi_row; ++i) {
            T* out = c.row_data(i);
            const T* xrow = x.row_data(i);
            const offset_t lo = p.row_ptr[i];
            const offset_t hi = p.row_ptr[i + 1];
            if (lo == hi) continue; // output already zero

            bool first = true;
            for (offset_t e = lo; e < hi; ++e) {
                const T* yrow = y.row_data(p.col_idx[e]);
                T dot = T(0);
                for (index_t kk = 0; kk < k; ++kk) dot += xrow[kk] * yrow[kk];
                const T s = sr.combine ? sr.combine(p.values[e], dot) : p.values[e] * dot;

                switch (reduce) {
                    case ReduceOp::Sum:
                    case ReduceOp::Mean:
                        for (index_t kk = 0; kk < k; ++kk) out[kk] += s * yrow[kk];
                        break;
                    case ReduceOp::Min:
                        if (first)
                            for (index_t kk = 0; kk < k; ++kk) out[kk] = s * yrow[kk];
                        else
                            for (index_t kk = 0; kk < k; ++kk)
                                out[kk] = std::min(out[kk], s * yrow[kk]);
                        break;
                    case ReduceOp::Max:
                        if (first)
                            for (index_t kk = 0; kk < k; ++kk) out[kk] = s * yrow[kk];
                        else
                            for (index_t kk = 0; kk < k; ++kk)
                                out[kk] = std::max(out[kk], s * yrow[kk]);
                        break;
                }
                first = false;
            }
            if (reduce == ReduceOp::Mean) {
                const T deg = static_cast<T>(hi - lo);
                for (index_t kk = 0; kk < k; ++kk) out[kk] = out[kk] / deg;
            }
        }
    });
    return c;
}

} // namespace sparsegnn
