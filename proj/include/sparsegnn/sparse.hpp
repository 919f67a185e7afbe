#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sparsegnn/types.hpp"

namespace sparsegnn {

/// One coordinate-format entry.
template <std::floating_point T>
struct Triple {
    index_t row;
    index_t col;
    T value;
};

/// Builds a CSR matrix from coordinate triples. Duplicate (row, col)
/// entries are summed (Matrix Market convention); columns come out sorted.
template <std::floating_point T>
CsrMatrix<T> csr_from_coo(index_t n_rows, index_t n_cols, std::span<const Triple<T>> triples) {
    for (std::size_t t = 0; t < triples.size(); ++t) {
        if (triples[t].row >= n_rows || triples[t].col >= n_cols)
            throw ConfigError("csr_from_coo: triple " + std::to_string(t) + " (row " +
                              std::to_string(triples[t].row) + ", col " +
                              std::to_string(triples[t].col) + ") out of range for " +
                              std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }

    std::vector<Triple<T>> sorted(triples.begin(), triples.end());
    std::sort(sorted.begin(), sorted.end(), [](const Triple<T>& a, const Triple<T>& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    CsrMatrix<T> m(n_rows, n_cols);
    m.col_idx.reserve(sorted.size());
    m.values.reserve(sorted.size());
    for (std::size_t t = 0; t < sorted.size(); ++t) {
        if (!m.col_idx.empty() && sorted[t].row == sorted[t - 1].row &&
            sorted[t].col == sorted[t - 1].col) {
            m.values.back() += sorted[t].value;
        } else {
            m.col_idx.push_back(sorted[t].col);
            m.values.push_back(sorted[t].value);
        }
        m.row_ptr[sorted[t].row + 1] = m.col_idx.size();
    }
    // rows without entries inherit the previous offset
    for (index_t i = 1; i <= n_rows; ++i)
        m.row_ptr[i] = std::max(m.row_ptr[i], m.row_ptr[i - 1]);
    return m;
}

template <std::floating_point T>
CsrMatrix<T> csr_from_coo(index_t n_rows, index_t n_cols, std::span<const index_t> rows,
                          std::span<const index_t> cols, std::span<const T> vals) {
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw ShapeError("csr_from_coo: rows/cols/vals lengths differ");
    std::vector<Triple<T>> triples(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) triples[t] = {rows[t], cols[t], vals[t]};
    return csr_from_coo<T>(n_rows, n_cols, triples);
}

/// B with B[j,i] = A[i,j]. Counting sort over columns; rows of the result
/// come out sorted, and a double transpose restores A bitwise.
template <std::floating_point T>
CsrMatrix<T> transpose(const CsrMatrix<T>& a) {
    CsrMatrix<T> t(a.n_cols, a.n_rows);
    t.row_ptr.assign(static_cast<std::size_t>(a.n_cols) + 1, 0);
    for (index_t j : a.col_idx) ++t.row_ptr[j + 1];
    for (index_t j = 0; j < a.n_cols; ++j) t.row_ptr[j + 1] += t.row_ptr[j];

    t.col_idx.resize(a.nnz());
    t.values.resize(a.nnz());
    std::vector<offset_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (index_t i = 0; i < a.n_rows; ++i) {
        for (offset_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
            const offset_t pos = cursor[a.col_idx[e]]++;
            t.col_idx[pos] = i;
            t.values[pos] = a.values[e];
        }
    }
    return t;
}

template <std::floating_point T>
CsrMatrix<T> identity(index_t n) {
    CsrMatrix<T> m(n, n);
    m.col_idx.resize(n);
    m.values.assign(n, T(1));
    for (index_t i = 0; i < n; ++i) {
        m.col_idx[i] = i;
        m.row_ptr[i + 1] = i + 1;
    }
    return m;
}

/// degrees[i] = number of stored entries in row i.
template <std::floating_point T>
std::vector<index_t> row_degrees(const CsrMatrix<T>& a) {
    std::vector<index_t> deg(a.n_rows);
    for (index_t i = 0; i < a.n_rows; ++i) deg[i] = a.row_nnz(i);
    return deg;
}

/// Symmetric graph normalization: with d(i) the value sum of row i of
/// A_tilde (= A + I when add_self_loops), the output entry is
/// A_tilde[i,j] / sqrt(d(i) * d(j)). Rows (and columns) touching a
/// zero-degree node come out zero rather than infinite.
template <std::floating_point T>
CsrMatrix<T> normalize_adjacency(const CsrMatrix<T>& a, bool add_self_loops = true) {
    if (a.n_rows != a.n_cols)
        throw ShapeError("normalize_adjacency: matrix is " + std::to_string(a.n_rows) + "x" +
                         std::to_string(a.n_cols) + ", expected square");
    for (T v : a.values)
        if (v < T(0)) throw ConfigError("normalize_adjacency: negative edge value");

    const index_t n = a.n_rows;
    CsrMatrix<T> tilde;
    if (add_self_loops) {
        tilde.n_rows = tilde.n_cols = n;
        tilde.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
        tilde.col_idx.reserve(a.nnz() + n);
        tilde.values.reserve(a.nnz() + n);
        for (index_t i = 0; i < n; ++i) {
            bool placed = false;
            for (offset_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
                const index_t j = a.col_idx[e];
                if (!placed && j >= i) {
                    placed = true;
                    if (j == i) {
                        tilde.col_idx.push_back(i);
                        tilde.values.push_back(a.values[e] + T(1));
                        continue;
                    }
                    tilde.col_idx.push_back(i);
                    tilde.values.push_back(T(1));
                }
                tilde.col_idx.push_back(j);
                tilde.values.push_back(a.values[e]);
            }
            if (!placed) {
                tilde.col_idx.push_back(i);
                tilde.values.push_back(T(1));
            }
            tilde.row_ptr[i + 1] = tilde.col_idx.size();
        }
    } else {
        tilde = a;
    }

    std::vector<double> inv_sqrt(n);
    for (index_t i = 0; i < n; ++i) {
        double d = 0;
        for (offset_t e = tilde.row_ptr[i]; e < tilde.row_ptr[i + 1]; ++e)
            d += static_cast<double>(tilde.values[e]);
        inv_sqrt[i] = d > 0 ? 1.0 / std::sqrt(d) : 0.0;
    }
    // s_i * s_j first: commutative, so a symmetric input stays symmetric
    // with zero tolerance.
    for (index_t i = 0; i < n; ++i) {
        for (offset_t e = tilde.row_ptr[i]; e < tilde.row_ptr[i + 1]; ++e) {
            const index_t j = tilde.col_idx[e];
            tilde.values[e] =
                static_cast<T>(static_cast<double>(tilde.values[e]) * (inv_sqrt[i] * inv_sqrt[j]));
        }
    }
    return tilde;
}

/// Exact structural + value symmetry check. Looks entries up by binary
/// search instead of materializing a transpose.
template <std::floating_point T>
bool is_symmetric(const CsrMatrix<T>& a) {
    if (a.n_rows != a.n_cols) return false;
    for (index_t i = 0; i < a.n_rows; ++i) {
        for (offset_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
            const index_t j = a.col_idx[e];
            auto cols = a.row_cols(j);
            auto it = std::lower_bound(cols.begin(), cols.end(), i);
            if (it == cols.end() || *it != i) return false;
            const offset_t mirror = a.row_ptr[j] + static_cast<offset_t>(it - cols.begin());
            if (a.values[mirror] != a.values[e]) return false;
        }
    }
    return true;
}

template <std::floating_point T>
DenseMatrix<T> to_dense(const CsrMatrix<T>& a) {
    DenseMatrix<T> d(a.n_rows, a.n_cols);
    for (index_t i = 0; i < a.n_rows; ++i)
        for (offset_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e)
            d(i, a.col_idx[e]) = a.values[e];
    return d;
}

/// Same values in the same places, bit for bit.
template <std::floating_point T>
bool bitwise_equal(const CsrMatrix<T>& a, const CsrMatrix<T>& b) {
    return a.n_rows == b.n_rows && a.n_cols == b.n_cols && a.row_ptr == b.row_ptr &&
           a.col_idx == b.col_idx && a.values.size() == b.values.size() &&
           (a.values.empty() ||
            std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(T)) == 0);
}

template <std::floating_point T>
bool bitwise_equal(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    return a.n_rows == b.n_rows && a.n_cols == b.n_cols && a.data.size() == b.data.size() &&
           (a.data.empty() ||
            std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(T)) == 0);
}

} // namespace sparsegnn
