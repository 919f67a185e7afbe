#pragma once

#include <algorithm>

#include "sparsegnn/parallel.hpp"
#include "sparsegnn/types.hpp"

namespace sparsegnn {

/// C = A * B. Row-parallel; each output row is produced by one worker with
/// a fixed inner order, so results do not depend on the thread count.
template <std::floating_point T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b, int threads = 0) {
    if (a.n_cols != b.n_rows)
        throw ShapeError("matmul: " + std::to_string(a.n_rows) + "x" + std::to_string(a.n_cols) +
                         " times " + std::to_string(b.n_rows) + "x" + std::to_string(b.n_cols));
    DenseMatrix<T> c(a.n_rows, b.n_cols);
    const offset_t min_serial =
        a.n_cols == 0 || b.n_cols == 0
            ? offset_t{1} << 62
            : std::max<offset_t>(1, (offset_t{1} << 15) / (offset_t(a.n_cols) * b.n_cols + 1));
    parallel_for_range(a.n_rows, threads, min_serial, [&](index_t lo, index_t hi) {
        for (index_t i = lo; i < hi; ++i) {
            T* crow = c.row_data(i);
            for (index_t kk = 0; kk < a.n_cols; ++kk) {
                const T av = a(i, kk);
                const T* brow = b.row_data(kk);
                for (index_t j = 0; j < b.n_cols; ++j) crow[j] += av * brow[j];
            }
        }
    });
    return c;
}

/// C = A^T * B, with A and B sharing their row count.
template <std::floating_point T>
DenseMatrix<T> matmul_tn(const DenseMatrix<T>& a, const DenseMatrix<T>& b, int threads = 0) {
    if (a.n_rows != b.n_rows)
        throw ShapeError("matmul_tn: A^T needs equal row counts, got " +
                         std::to_string(a.n_rows) + " and " + std::to_string(b.n_rows));
    DenseMatrix<T> c(a.n_cols, b.n_cols);
    parallel_for_range(a.n_cols, threads, 4, [&](index_t lo, index_t hi) {
        for (index_t i = lo; i < hi; ++i) {
            T* crow = c.row_data(i);
            for (index_t r = 0; r < a.n_rows; ++r) {
                const T av = a(r, i);
                const T* brow = b.row_data(r);
                for (index_t j = 0; j < b.n_cols; ++j) crow[j] += av * brow[j];
            }
        }
    });
    return c;
}

/// C = A * B^T.
template <std::floating_point T>
DenseMatrix<T> matmul_nt(const DenseMatrix<T>& a, const DenseMatrix<T>& b, int threads = 0) {
    if (a.n_cols != b.n_cols)
        throw ShapeError("matmul_nt: B^T needs equal column counts, got " +
                         std::to_string(a.n_cols) + " and " + std::to_string(b.n_cols));
    DenseMatrix<T> c(a.n_rows, b.n_rows);
    const offset_t min_serial =
        std::max<offset_t>(1, (offset_t{1} << 15) / (offset_t(a.n_cols) * b.n_rows + 1));
    parallel_for_range(a.n_rows, threads, min_serial, [&](index_t lo, index_t hi) {
        for (index_t i = lo; i < hi; ++i) {
            const T* arow = a.row_data(i);
            T* crow = c.row_data(i);
            for (index_t j = 0; j < b.n_rows; ++j) {
                const T* brow = b.row_data(j);
                T dot = T(0);
                for (index_t kk = 0; kk < a.n_cols; ++kk) dot += arow[kk] * brow[kk];
                crow[j] = dot;
            }
        }
    });
    return c;
}

template <std::floating_point T>
DenseMatrix<T> relu(const DenseMatrix<T>& a) {
    DenseMatrix<T> c = a;
    for (T& v : c.data) v = std::max(v, T(0));
    return c;
}

/// grad masked by the activation: entries where act <= 0 become zero.
template <std::floating_point T>
DenseMatrix<T> relu_backward(const DenseMatrix<T>& grad, const DenseMatrix<T>& act) {
    if (!grad.same_shape(act)) throw ShapeError("relu_backward: shape mismatch");
    DenseMatrix<T> c = grad;
    for (std::size_t i = 0; i < c.data.size(); ++i)
        if (act.data[i] <= T(0)) c.data[i] = T(0);
    return c;
}

/// C = alpha * A + B.
template <std::floating_point T>
DenseMatrix<T> scaled_add(T alpha, const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    if (!a.same_shape(b)) throw ShapeError("scaled_add: shape mismatch");
    DenseMatrix<T> c(a.n_rows, a.n_cols);
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = alpha * a.data[i] + b.data[i];
    return c;
}

template <std::floating_point T>
void add_inplace(DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    if (!a.same_shape(b)) throw ShapeError("add_inplace: shape mismatch");
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

/// sum(A .* B), accumulated in double.
template <std::floating_point T>
double dot_all(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    if (!a.same_shape(b)) throw ShapeError("dot_all: shape mismatch");
    double s = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        s += static_cast<double>(a.data[i]) * static_cast<double>(b.data[i]);
    return s;
}

} // namespace sparsegnn
