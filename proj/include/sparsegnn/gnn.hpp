#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsegnn/dense.hpp"
#include "sparsegnn/kernels.hpp"
#include "sparsegnn/rng.hpp"
#include "sparsegnn/sparse.hpp"

namespace sparsegnn {

enum class ModelKind { Gcn, SageSum, SageMean, Gin };

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Gcn: return "gcn";
        case ModelKind::SageSum: return "sage-sum";
        case ModelKind::SageMean: return "sage-mean";
        case ModelKind::Gin: return "gin";
    }
    return "?";
}

inline ModelKind parse_model_kind(const std::string& s) {
    if (s == "gcn") return ModelKind::Gcn;
    if (s == "sage-sum") return ModelKind::SageSum;
    if (s == "sage-mean") return ModelKind::SageMean;
    if (s == "gin") return ModelKind::Gin;
    throw ConfigError("unknown model '" + s + "' (expected gcn|sage-sum|sage-mean|gin)");
}

/// Two-layer node-classification model. SAGE variants carry a parallel
/// self weight per layer; GIN carries one scalar epsilon shared by both
/// layers, initialized to zero.
template <std::floating_point T>
struct GnnModel {
    ModelKind kind = ModelKind::Gcn;
    index_t in_features = 0;
    index_t hidden = 0;
    index_t classes = 0;
    DenseMatrix<T> w1;      // in_features x hidden
    DenseMatrix<T> w2;      // hidden x classes
    DenseMatrix<T> w1_self; // SAGE only
    DenseMatrix<T> w2_self; // SAGE only
    T epsilon = T(0);       // GIN only

    bool has_self_weights() const {
        return kind == ModelKind::SageSum || kind == ModelKind::SageMean;
    }
    bool has_epsilon() const { return kind == ModelKind::Gin; }

    ReduceOp propagate_reduce() const {
        return kind == ModelKind::SageMean ? ReduceOp::Mean : ReduceOp::Sum;
    }
};

template <std::floating_point T>
struct Gradients {
    DenseMatrix<T> w1, w2, w1_self, w2_self;
    T epsilon = T(0);
};

namespace detail {

template <std::floating_point T>
void glorot_fill(DenseMatrix<T>& w, Rng& rng) {
    const double limit = std::sqrt(6.0 / (double(w.n_rows) + double(w.n_cols)));
    for (T& v : w.data) v = static_cast<T>(rng.uniform(-limit, limit));
}

} // namespace detail

/// Glorot-uniform initialization, deterministic for a given seed.
/// Fill order: w1, w2, then (SAGE) w1_self, w2_self.
template <std::floating_point T>
GnnModel<T> init_model(ModelKind kind, index_t in_features, index_t hidden, index_t classes,
                       std::uint64_t seed) {
    if (in_features == 0 || hidden == 0 || classes == 0)
        throw ConfigError("init_model: in_features, hidden, and classes must be positive");
    GnnModel<T> m;
    m.kind = kind;
    m.in_features = in_features;
    m.hidden = hidden;
    m.classes = classes;
    Rng rng(seed);
    m.w1 = DenseMatrix<T>(in_features, hidden);
    m.w2 = DenseMatrix<T>(hidden, classes);
    detail::glorot_fill(m.w1, rng);
    detail::glorot_fill(m.w2, rng);
    if (m.has_self_weights()) {
        m.w1_self = DenseMatrix<T>(in_features, hidden);
        m.w2_self = DenseMatrix<T>(hidden, classes);
        detail::glorot_fill(m.w1_self, rng);
        detail::glorot_fill(m.w2_self, rng);
    }
    return m;
}

/// Epoch-invariant matrices shared across a training run: the propagation
/// operand (normalized adjacency for GCN, the raw graph otherwise), its
/// transpose for backward, the degree vector, and counters that expose how
/// often each was (re)built.
///
/// With use_cache off the backward operand is rebuilt on every fetch,
/// which is the per-epoch ablation mode. A symmetric operand skips the
/// transpose entirely and is reused as-is.
template <std::floating_point T>
struct TrainingCache {
    CsrMatrix<T> a_hat;
    std::optional<CsrMatrix<T>> a_hat_t;
    std::optional<CsrMatrix<T>> mean_bwd; // degree-scaled transpose for Mean backward
    std::vector<index_t> degrees;
    bool symmetric = false;
    bool use_cache = true;

    std::uint64_t transpose_builds = 0;
    std::uint64_t normalize_builds = 0;
    std::uint64_t cache_hits = 0;

    /// Operand M^T such that dIn = spmm(M^T, dOut, Sum) for Sum-reduce
    /// propagation.
    const CsrMatrix<T>& sum_operand() {
        if (!use_cache) {
            a_hat_t = transpose(a_hat);
            ++transpose_builds;
            return *a_hat_t;
        }
        if (symmetric) {
            ++cache_hits;
            return a_hat;
        }
        if (!a_hat_t) {
            a_hat_t = transpose(a_hat);
            ++transpose_builds;
            return *a_hat_t;
        }
        ++cache_hits;
        return *a_hat_t;
    }

    /// Operand for Mean-reduce backward: rows of a_hat scaled by 1/degree,
    /// then transposed. For a symmetric a_hat the same values are obtained
    /// by scaling columns in place, with no transpose built.
    const CsrMatrix<T>& mean_operand() {
        auto build = [&]() {
            CsrMatrix<T> m;
            if (use_cache && symmetric) {
                m = a_hat;
            } else {
                m = transpose(a_hat);
                ++transpose_builds;
            }
            for (offset_t e = 0; e < m.nnz(); ++e)
                m.values[e] = m.values[e] / static_cast<T>(degrees[m.col_idx[e]]);
            return m;
        };
        if (!use_cache) {
            mean_bwd = build();
            return *mean_bwd;
        }
        if (!mean_bwd) {
            mean_bwd = build();
            return *mean_bwd;
        }
        ++cache_hits;
        return *mean_bwd;
    }
};

/// Builds the training cache for one run. GCN normalizes the adjacency
/// (counted by normalize_builds); the other models propagate over the raw
/// graph. The symmetry probe only runs when caching is on, so the ablation
/// mode really does rebuild the transpose each epoch.
template <std::floating_point T>
TrainingCache<T> build_cache(ModelKind kind, const CsrMatrix<T>& a, bool use_cache = true,
                             bool add_self_loops = true) {
    if (a.n_rows != a.n_cols)
        throw ShapeError("build_cache: adjacency is " + std::to_string(a.n_rows) + "x" +
                         std::to_string(a.n_cols) + ", expected square");
    TrainingCache<T> cache;
    cache.use_cache = use_cache;
    if (kind == ModelKind::Gcn) {
        cache.a_hat = normalize_adjacency(a, add_self_loops);
        ++cache.normalize_builds;
    } else {
        cache.a_hat = a;
    }
    cache.degrees = row_degrees(cache.a_hat);
    cache.symmetric = use_cache && is_symmetric(cache.a_hat);
    return cache;
}

/// Per-layer stash from forward, consumed by backward.
template <std::floating_point T>
struct Tape {
    index_t n_nodes = 0;
    DenseMatrix<T> x;  // layer-1 input
    DenseMatrix<T> h1; // post-ReLU hidden activations
    DenseMatrix<T> a1; // pre-weight aggregate of layer 1 (SAGE/GIN)
    DenseMatrix<T> a2; // pre-weight aggregate of layer 2 (SAGE/GIN)
};

/// Forward pass. GCN projects features before propagating
/// (relu(A_hat (X W1)) then A_hat (H1 W2)); SAGE and GIN propagate raw
/// features first. The returned logits are unnormalized.
template <std::floating_point T>
std::pair<DenseMatrix<T>, Tape<T>> forward(const GnnModel<T>& model, TrainingCache<T>& cache,
                                           const DenseMatrix<T>& x, int threads = 0) {
    if (x.n_rows != cache.a_hat.n_rows)
        throw ShapeError("forward: features have " + std::to_string(x.n_rows) +
                         " rows but graph has " + std::to_string(cache.a_hat.n_rows) + " nodes");
    if (x.n_cols != model.in_features)
        throw ShapeError("forward: features have " + std::to_string(x.n_cols) +
                         " columns but model expects " + std::to_string(model.in_features));

    Tape<T> tape;
    tape.n_nodes = x.n_rows;
    tape.x = x;
    DenseMatrix<T> logits;

    switch (model.kind) {
        case ModelKind::Gcn: {
            DenseMatrix<T> z1 = matmul(x, model.w1, threads);
            tape.h1 = relu(spmm(cache.a_hat, z1, ReduceOp::Sum, threads));
            DenseMatrix<T> z2 = matmul(tape.h1, model.w2, threads);
            logits = spmm(cache.a_hat, z2, ReduceOp::Sum, threads);
            break;
        }
        case ModelKind::SageSum:
        case ModelKind::SageMean: {
            const ReduceOp red = model.propagate_reduce();
            tape.a1 = spmm(cache.a_hat, x, red, threads);
            DenseMatrix<T> z1 = matmul(tape.a1, model.w1, threads);
            add_inplace(z1, matmul(x, model.w1_self, threads));
            tape.h1 = relu(z1);
            tape.a2 = spmm(cache.a_hat, tape.h1, red, threads);
            logits = matmul(tape.a2, model.w2, threads);
            add_inplace(logits, matmul(tape.h1, model.w2_self, threads));
            break;
        }
        case ModelKind::Gin: {
            const T scale = T(1) + model.epsilon;
            tape.a1 = scaled_add(scale, x, spmm(cache.a_hat, x, ReduceOp::Sum, threads));
            tape.h1 = relu(matmul(tape.a1, model.w1, threads));
            tape.a2 = scaled_add(scale, tape.h1, spmm(cache.a_hat, tape.h1, ReduceOp::Sum, threads));
            logits = matmul(tape.a2, model.w2, threads);
            break;
        }
    }
    return {std::move(logits), std::move(tape)};
}

/// Reverse pass from grad_logits to parameter gradients. The propagation
/// transpose comes from the cache; input-feature gradients are not formed.
template <std::floating_point T>
Gradients<T> backward(const GnnModel<T>& model, TrainingCache<T>& cache, const Tape<T>& tape,
                      const DenseMatrix<T>& grad_logits, int threads = 0) {
    if (tape.n_nodes != cache.a_hat.n_rows || grad_logits.n_rows != tape.n_nodes)
        throw TapeError("backward: tape covers " + std::to_string(tape.n_nodes) +
                        " nodes but graph/gradient expects " + std::to_string(cache.a_hat.n_rows) +
                        "/" + std::to_string(grad_logits.n_rows));
    if (grad_logits.n_cols != model.classes)
        throw TapeError("backward: grad_logits has " + std::to_string(grad_logits.n_cols) +
                        " columns, model has " + std::to_string(model.classes) + " classes");

    Gradients<T> g;
    switch (model.kind) {
        case ModelKind::Gcn: {
            const CsrMatrix<T>& at = cache.sum_operand();
            DenseMatrix<T> dz2 = spmm(at, grad_logits, ReduceOp::Sum, threads);
            g.w2 = matmul_tn(tape.h1, dz2, threads);
            DenseMatrix<T> dh1 = matmul_nt(dz2, model.w2, threads);
            DenseMatrix<T> dp1 = relu_backward(dh1, tape.h1);
            DenseMatrix<T> dz1 = spmm(at, dp1, ReduceOp::Sum, threads);
            g.w1 = matmul_tn(tape.x, dz1, threads);
            break;
        }
        case ModelKind::SageSum:
        case ModelKind::SageMean: {
            const CsrMatrix<T>& bwd = model.kind == ModelKind::SageMean ? cache.mean_operand()
                                                                        : cache.sum_operand();
            g.w2 = matmul_tn(tape.a2, grad_logits, threads);
            g.w2_self = matmul_tn(tape.h1, grad_logits, threads);
            DenseMatrix<T> ds2 = matmul_nt(grad_logits, model.w2, threads);
            DenseMatrix<T> dh1 = spmm(bwd, ds2, ReduceOp::Sum, threads);
            add_inplace(dh1, matmul_nt(grad_logits, model.w2_self, threads));
            DenseMatrix<T> dz1 = relu_backward(dh1, tape.h1);
            g.w1 = matmul_tn(tape.a1, dz1, threads);
            g.w1_self = matmul_tn(tape.x, dz1, threads);
            break;
        }
        case ModelKind::Gin: {
            const CsrMatrix<T>& at = cache.sum_operand();
            const T scale = T(1) + model.epsilon;
            g.w2 = matmul_tn(tape.a2, grad_logits, threads);
            DenseMatrix<T> dm2 = matmul_nt(grad_logits, model.w2, threads);
            double deps = dot_all(dm2, tape.h1);
            DenseMatrix<T> dh1 = scaled_add(scale, dm2, spmm(at, dm2, ReduceOp::Sum, threads));
            DenseMatrix<T> dz1 = relu_backward(dh1, tape.h1);
            g.w1 = matmul_tn(tape.a1, dz1, threads);
            DenseMatrix<T> dm1 = matmul_nt(dz1, model.w1, threads);
            deps += dot_all(dm1, tape.x);
            g.epsilon = static_cast<T>(deps);
            break;
        }
    }
    return g;
}

/// Mean negative log-softmax over the masked rows, stabilized by row-max
/// subtraction. Gradient rows outside the mask are zero.
template <std::floating_point T>
std::pair<double, DenseMatrix<T>> softmax_xent(const DenseMatrix<T>& logits,
                                               std::span<const index_t> labels,
                                               std::span<const std::uint8_t> mask) {
    if (labels.size() != logits.n_rows || mask.size() != logits.n_rows)
        throw ShapeError("softmax_xent: labels/mask length must equal the logit row count");
    std::size_t n_masked = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        ++n_masked;
        if (labels[i] >= logits.n_cols)
            throw ConfigError("softmax_xent: label " + std::to_string(labels[i]) +
                              " out of range for " + std::to_string(logits.n_cols) + " classes");
    }
    if (n_masked == 0) throw ConfigError("softmax_xent: mask selects no rows");

    const index_t c = logits.n_cols;
    DenseMatrix<T> grad(logits.n_rows, c);
    const double inv_n = 1.0 / static_cast<double>(n_masked);
    double loss = 0;
    for (index_t i = 0; i < logits.n_rows; ++i) {
        if (!mask[i]) continue;
        const T* row = logits.row_data(i);
        double row_max = row[0];
        for (index_t j = 1; j < c; ++j) row_max = std::max(row_max, static_cast<double>(row[j]));
        double denom = 0;
        for (index_t j = 0; j < c; ++j) denom += std::exp(static_cast<double>(row[j]) - row_max);
        loss += (row_max + std::log(denom)) - static_cast<double>(row[labels[i]]);
        T* grow = grad.row_data(i);
        for (index_t j = 0; j < c; ++j) {
            const double p = std::exp(static_cast<double>(row[j]) - row_max) / denom;
            grow[j] = static_cast<T>((p - (j == labels[i] ? 1.0 : 0.0)) * inv_n);
        }
    }
    return {loss * inv_n, std::move(grad)};
}

/// Fraction of masked rows whose argmax matches the label (ties take the
/// smallest class index).
template <std::floating_point T>
double masked_accuracy(const DenseMatrix<T>& logits, std::span<const index_t> labels,
                       std::span<const std::uint8_t> mask) {
    std::size_t n_masked = 0, correct = 0;
    for (index_t i = 0; i < logits.n_rows; ++i) {
        if (!mask[i]) continue;
        ++n_masked;
        const T* row = logits.row_data(i);
        index_t best = 0;
        for (index_t j = 1; j < logits.n_cols; ++j)
            if (row[j] > row[best]) best = j;
        if (best == labels[i]) ++correct;
    }
    return n_masked == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n_masked);
}

/// w <- w - lr * g for every parameter (and epsilon for GIN).
template <std::floating_point T>
void sgd_step(GnnModel<T>& model, const Gradients<T>& grads, T lr) {
    auto apply = [lr](DenseMatrix<T>& w, const DenseMatrix<T>& g) {
        if (!w.same_shape(g)) throw ShapeError("sgd_step: gradient shape mismatch");
        for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] -= lr * g.data[i];
    };
    apply(model.w1, grads.w1);
    apply(model.w2, grads.w2);
    if (model.has_self_weights()) {
        apply(model.w1_self, grads.w1_self);
        apply(model.w2_self, grads.w2_self);
    }
    if (model.has_epsilon()) model.epsilon -= lr * grads.epsilon;
}

struct EpochStats {
    int epoch = 0; // 1-based
    double loss = 0;
    double train_accuracy = 0;
    double epoch_seconds = 0;
};

struct TrainOptions {
    int epochs = 100;
    double lr = 0.05;
    int threads = 0;
    bool use_tuned = true;
    bool use_cache = true;
    bool add_self_loops = true;
};

template <std::floating_point T>
struct TrainOutput {
    std::vector<EpochStats> stats;
    TrainingCache<T> cache;
};

/// Full-batch training loop: forward, masked cross-entropy, backward, SGD.
/// The adjacency is prepared once before epoch 1; per-epoch wall time uses
/// a monotonic clock.
template <std::floating_point T>
TrainOutput<T> train(GnnModel<T>& model, const CsrMatrix<T>& a, const DenseMatrix<T>& x,
                     std::span<const index_t> labels, std::span<const std::uint8_t> mask,
                     const TrainOptions& opts = {}) {
    using clock = std::chrono::steady_clock;
    if (opts.epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (labels.size() != a.n_rows || mask.size() != a.n_rows)
        throw ShapeError("train: labels/mask length must equal the node count");

    TrainOutput<T> out;
    out.cache = build_cache(model.kind, a, opts.use_cache, opts.add_self_loops);
    DispatchGuard dispatch(opts.use_tuned);

    out.stats.reserve(static_cast<std::size_t>(opts.epochs));
    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        const auto t0 = clock::now();
        auto [logits, tape] = forward(model, out.cache, x, opts.threads);
        auto [loss, grad] = softmax_xent(logits, labels, mask);
        const double acc = masked_accuracy(logits, labels, mask);
        Gradients<T> grads = backward(model, out.cache, tape, grad, opts.threads);
        sgd_step(model, grads, static_cast<T>(opts.lr));
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        out.stats.push_back({epoch, loss, acc, secs});
    }
    return out;
}

} // namespace sparsegnn
