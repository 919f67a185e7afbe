#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sparsegnn/error.hpp"

namespace sparsegnn {

/// Row/column index. Dimensions must stay below 2^32.
using index_t = std::uint32_t;

/// Offset into the nonzero arrays. 64-bit so nnz may exceed 2^32.
using offset_t = std::uint64_t;

/// Compressed sparse row matrix.
///
/// Invariants (checked by validate()):
///   - row_ptr[0] == 0, row_ptr is nondecreasing, row_ptr[n_rows] == nnz
///   - column indices are strictly increasing within each row
///   - every column index is < n_cols
template <std::floating_point T>
struct CsrMatrix {
    index_t n_rows = 0;
    index_t n_cols = 0;
    std::vector<offset_t> row_ptr{0};
    std::vector<index_t> col_idx;
    std::vector<T> values;

    CsrMatrix() = default;

    /// Matrix of the given shape with no stored entries.
    CsrMatrix(index_t rows, index_t cols)
        : n_rows(rows), n_cols(cols), row_ptr(static_cast<std::size_t>(rows) + 1, 0) {}

    offset_t nnz() const { return row_ptr.empty() ? 0 : row_ptr.back(); }

    /// Number of stored entries in row i.
    index_t row_nnz(index_t i) const {
        return static_cast<index_t>(row_ptr[i + 1] - row_ptr[i]);
    }

    std::span<const index_t> row_cols(index_t i) const {
        return {col_idx.data() + row_ptr[i], static_cast<std::size_t>(row_ptr[i + 1] - row_ptr[i])};
    }

    std::span<const T> row_vals(index_t i) const {
        return {values.data() + row_ptr[i], static_cast<std::size_t>(row_ptr[i + 1] - row_ptr[i])};
    }

    /// Throws ConfigError naming the first violated invariant.
    void validate() const {
        if (row_ptr.size() != static_cast<std::size_t>(n_rows) + 1)
            throw ConfigError("csr: row_ptr has length " + std::to_string(row_ptr.size()) +
                              ", expected n_rows+1 = " + std::to_string(n_rows + 1));
        if (row_ptr.front() != 0)
            throw ConfigError("csr: row_ptr[0] must be 0");
        for (index_t i = 0; i < n_rows; ++i) {
            if (row_ptr[i + 1] < row_ptr[i])
                throw ConfigError("csr: row_ptr decreases at row " + std::to_string(i));
        }
        if (col_idx.size() != row_ptr.back() || values.size() != row_ptr.back())
            throw ConfigError("csr: col_idx/values length does not match row_ptr[n_rows]");
        for (index_t i = 0; i < n_rows; ++i) {
            for (offset_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
                if (col_idx[e] >= n_cols)
                    throw ConfigError("csr: column index " + std::to_string(col_idx[e]) +
                                      " out of range in row " + std::to_string(i));
                if (e > row_ptr[i] && col_idx[e] <= col_idx[e - 1])
                    throw ConfigError("csr: columns not strictly increasing in row " +
                                      std::to_string(i));
            }
        }
    }
};

/// Row-major dense matrix. n_cols is the embedding size K of the kernels.
template <std::floating_point T>
struct DenseMatrix {
    index_t n_rows = 0;
    index_t n_cols = 0;
    std::vector<T> data;

    DenseMatrix() = default;

    DenseMatrix(index_t rows, index_t cols)
        : n_rows(rows), n_cols(cols),
          data(static_cast<std::size_t>(rows) * cols, T(0)) {}

    T& operator()(index_t i, index_t j) {
        return data[static_cast<std::size_t>(i) * n_cols + j];
    }
    T operator()(index_t i, index_t j) const {
        return data[static_cast<std::size_t>(i) * n_cols + j];
    }

    T* row_data(index_t i) { return data.data() + static_cast<std::size_t>(i) * n_cols; }
    const T* row_data(index_t i) const {
        return data.data() + static_cast<std::size_t>(i) * n_cols;
    }

    std::span<T> row(index_t i) { return {row_data(i), n_cols}; }
    std::span<const T> row(index_t i) const { return {row_data(i), n_cols}; }

    bool same_shape(const DenseMatrix& other) const {
        return n_rows == other.n_rows && n_cols == other.n_cols;
    }
};

/// Reduction applied across a row's scaled neighbor rows.
/// Mean is Sum divided by the row's nonzero count.
enum class ReduceOp { Sum, Min, Max, Mean };

inline const char* to_string(ReduceOp op) {
    switch (op) {
        case ReduceOp::Sum: return "sum";
        case ReduceOp::Min: return "min";
        case ReduceOp::Max: return "max";
        case ReduceOp::Mean: return "mean";
    }
    return "?";
}

inline ReduceOp parse_reduce_op(const std::string& s) {
    if (s == "sum") return ReduceOp::Sum;
    if (s == "min") return ReduceOp::Min;
    if (s == "max") return ReduceOp::Max;
    if (s == "mean") return ReduceOp::Mean;
    throw ConfigError("unknown reduce op '" + s + "' (expected sum|min|max|mean)");
}

/// Combine/reduce pair for fusedmm. An empty combine means plain
/// multiplication, which together with Sum gives the ordinary
/// sparse-dense product.
template <std::floating_point T>
struct Semiring {
    std::function<T(T, T)> combine; // (edge_value, dense_element) -> scalar
    ReduceOp reduce = ReduceOp::Sum;

    static Semiring plus_times() { return {nullptr, ReduceOp::Sum}; }
};

} // namespace sparsegnn
