#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sparsegnn/rng.hpp"
#include "sparsegnn/sparse.hpp"

namespace sparsegnn {

/// A node-classification problem: graph, features, labels, training mask.
template <std::floating_point T>
struct Dataset {
    CsrMatrix<T> adjacency;
    DenseMatrix<T> features;
    std::vector<index_t> labels;
    std::vector<std::uint8_t> train_mask;
    std::string name;

    void validate() const {
        if (adjacency.n_rows != adjacency.n_cols)
            throw ShapeError("dataset '" + name + "': adjacency is not square");
        if (features.n_rows != adjacency.n_rows || labels.size() != adjacency.n_rows ||
            train_mask.size() != adjacency.n_rows)
            throw ShapeError("dataset '" + name +
                             "': features/labels/mask do not cover every node");
    }
};

namespace detail {

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline bool parse_index(const std::string& tok, long long& out) {
    try {
        std::size_t pos = 0;
        out = std::stoll(tok, &pos);
        return pos == tok.size();
    } catch (const std::exception&) {
        return false;
    }
}

inline bool parse_value(const std::string& tok, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(tok, &pos);
        return pos == tok.size();
    } catch (const std::exception&) {
        return false;
    }
}

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

} // namespace detail

/// Reads a Matrix Market coordinate file (real/integer/pattern,
/// general/symmetric). Indices are converted to 0-based, pattern entries
/// get value 1, symmetric files are expanded to both triangles, and
/// duplicates are summed. Errors carry 1-based line numbers.
template <std::floating_point T>
CsrMatrix<T> load_mtx(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("missing Matrix Market banner", 1);
    ++line_no;

    auto banner = detail::tokenize(detail::lower(line));
    if (banner.size() < 4 || banner[0] != "%%matrixmarket" || banner[1] != "matrix")
        throw ParseError("not a Matrix Market matrix banner", line_no);
    if (banner[2] != "coordinate")
        throw ParseError("unsupported format '" + banner[2] + "' (only coordinate)", line_no);
    const std::string& field = banner[3];
    if (field != "real" && field != "integer" && field != "pattern")
        throw ParseError("unsupported field '" + field + "'", line_no);
    const bool pattern = field == "pattern";
    std::string symmetry = banner.size() > 4 ? banner[4] : "general";
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError("unsupported symmetry '" + symmetry + "'", line_no);
    const bool symmetric = symmetry == "symmetric";

    long long n_rows = -1, n_cols = -1, n_entries = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        auto toks = detail::tokenize(line);
        if (toks.size() != 3 || !detail::parse_index(toks[0], n_rows) ||
            !detail::parse_index(toks[1], n_cols) || !detail::parse_index(toks[2], n_entries) ||
            n_rows < 0 || n_cols < 0 || n_entries < 0)
            throw ParseError("malformed size line '" + line + "'", line_no);
        break;
    }
    if (n_rows < 0) throw ParseError("missing size line", line_no + 1);

    std::vector<Triple<T>> triples;
    triples.reserve(static_cast<std::size_t>(symmetric ? 2 * n_entries : n_entries));
    long long seen = 0;
    while (seen < n_entries) {
        if (!std::getline(in, line))
            throw ParseError("expected " + std::to_string(n_entries) + " entries, found " +
                                 std::to_string(seen),
                             line_no + 1);
        ++line_no;
        if (line.empty() || line[0] == '%') continue;
        auto toks = detail::tokenize(line);
        const std::size_t want = pattern ? 2 : 3;
        long long r, c;
        double v = 1.0;
        if (toks.size() != want || !detail::parse_index(toks[0], r) ||
            !detail::parse_index(toks[1], c) || (!pattern && !detail::parse_value(toks[2], v)))
            throw ParseError("malformed entry '" + line + "'", line_no);
        if (r < 1 || r > n_rows || c < 1 || c > n_cols)
            throw ParseError("entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                 ") out of range for " + std::to_string(n_rows) + "x" +
                                 std::to_string(n_cols),
                             line_no);
        const auto ri = static_cast<index_t>(r - 1);
        const auto ci = static_cast<index_t>(c - 1);
        triples.push_back({ri, ci, static_cast<T>(v)});
        if (symmetric && ri != ci) triples.push_back({ci, ri, static_cast<T>(v)});
        ++seen;
    }

    return csr_from_coo<T>(static_cast<index_t>(n_rows), static_cast<index_t>(n_cols), triples);
}

/// Writes coordinate/real/general with full value precision, so a
/// load_mtx round trip reproduces the matrix exactly.
template <std::floating_point T>
void save_mtx(const CsrMatrix<T>& a, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.n_rows << ' ' << a.n_cols << ' ' << a.nnz() << '\n';
    char buf[64];
    for (index_t i = 0; i < a.n_rows; ++i) {
        for (offset_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
            std::snprintf(buf, sizeof buf, "%.*g", std::numeric_limits<T>::max_digits10,
                          static_cast<double>(a.values[e]));
            out << (i + 1) << ' ' << (a.col_idx[e] + 1) << ' ' << buf << '\n';
        }
    }
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

/// Plain-text dense matrix: header "n k", then n lines of k decimals.
template <std::floating_point T>
DenseMatrix<T> load_features(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("missing 'n k' header", 1);
    ++line_no;
    auto head = detail::tokenize(line);
    long long n, k;
    if (head.size() != 2 || !detail::parse_index(head[0], n) || !detail::parse_index(head[1], k) ||
        n < 0 || k < 0)
        throw ParseError("malformed header '" + line + "' (expected 'n k')", line_no);

    DenseMatrix<T> m(static_cast<index_t>(n), static_cast<index_t>(k));
    long long row = 0;
    while (row < n) {
        if (!std::getline(in, line))
            throw ParseError("expected " + std::to_string(n) + " rows, found " +
                                 std::to_string(row),
                             line_no + 1);
        ++line_no;
        if (line.empty()) continue;
        auto toks = detail::tokenize(line);
        if (toks.size() != static_cast<std::size_t>(k))
            throw ParseError("row has " + std::to_string(toks.size()) + " values, expected " +
                                 std::to_string(k),
                             line_no);
        for (long long j = 0; j < k; ++j) {
            double v;
            if (!detail::parse_value(toks[j], v))
                throw ParseError("non-numeric value '" + toks[j] + "'", line_no);
            m(static_cast<index_t>(row), static_cast<index_t>(j)) = static_cast<T>(v);
        }
        ++row;
    }
    return m;
}

namespace detail {

inline std::vector<long long> load_int_column(const std::filesystem::path& path,
                                              const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError(std::string("missing '") + what + "' header", 1);
    ++line_no;
    auto head = tokenize(line);
    long long n;
    if (head.size() != 1 || !parse_index(head[0], n) || n < 0)
        throw ParseError("malformed header '" + line + "' (expected a count)", line_no);

    std::vector<long long> out;
    out.reserve(static_cast<std::size_t>(n));
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        for (const std::string& tok : tokenize(line)) {
            long long v;
            if (!parse_index(tok, v))
                throw ParseError("non-integer token '" + tok + "'", line_no);
            out.push_back(v);
            if (out.size() > static_cast<std::size_t>(n))
                throw ParseError("more than " + std::to_string(n) + " values", line_no);
        }
    }
    if (out.size() != static_cast<std::size_t>(n))
        throw ParseError("expected " + std::to_string(n) + " values, found " +
                             std::to_string(out.size()),
                         line_no + 1);
    return out;
}

} // namespace detail

/// Class ids, one per node: header "n", then n integers.
inline std::vector<index_t> load_labels(const std::filesystem::path& path) {
    auto raw = detail::load_int_column(path, "n");
    std::vector<index_t> labels(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] < 0) throw ParseError("negative label", static_cast<long>(i) + 2);
        labels[i] = static_cast<index_t>(raw[i]);
    }
    return labels;
}

/// Training mask, one 0/1 per node: header "n", then n flags.
inline std::vector<std::uint8_t> load_mask(const std::filesystem::path& path) {
    auto raw = detail::load_int_column(path, "n");
    std::vector<std::uint8_t> mask(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != 0 && raw[i] != 1)
            throw ParseError("mask value must be 0 or 1", static_cast<long>(i) + 2);
        mask[i] = static_cast<std::uint8_t>(raw[i]);
    }
    return mask;
}

namespace detail {

// Emits each index of [0, total) independently with probability p, using
// geometric gaps so the cost is proportional to the hits, not to total.
template <typename Emit>
void bernoulli_indices(std::uint64_t total, double p, Rng& rng, Emit&& emit) {
    if (total == 0 || p <= 0.0) return;
    if (p >= 1.0) {
        for (std::uint64_t t = 0; t < total; ++t) emit(t);
        return;
    }
    const double log1mp = std::log1p(-p);
    std::uint64_t pos = 0;
    while (true) {
        const double u = 1.0 - rng.uniform01(); // (0, 1]
        const double gap = std::floor(std::log(u) / log1mp);
        if (!(gap < static_cast<double>(total))) break;
        pos += static_cast<std::uint64_t>(gap);
        if (pos >= total) break;
        emit(pos);
        ++pos;
    }
}

// Decodes t in [0, m*(m-1)/2) to the t-th pair (i, j) with i < j < m,
// ordered row-major.
inline std::pair<std::uint64_t, std::uint64_t> unrank_pair(std::uint64_t t, std::uint64_t m) {
    auto row_offset = [m](std::uint64_t i) { return i * m - i * (i + 1) / 2; };
    const double md = static_cast<double>(m);
    double guess = std::floor(md - 0.5 - std::sqrt((md - 0.5) * (md - 0.5) -
                                                   2.0 * static_cast<double>(t)));
    std::uint64_t i = guess <= 0.0 ? 0 : static_cast<std::uint64_t>(guess);
    if (i > m - 2) i = m - 2;
    while (row_offset(i + 1) <= t) ++i;
    while (row_offset(i) > t) --i;
    return {i, i + 1 + (t - row_offset(i))};
}

} // namespace detail

/// Seeded planted-partition dataset: nodes split evenly into classes, each
/// unordered pair linked with p_intra (same class) or p_inter (otherwise),
/// both directions stored. Features are the one-hot class embedded in
/// feat_dim with noise*N(0,1) added everywhere; the mask covers all nodes.
/// The random stream is consumed in a fixed order (edge blocks by class
/// pair, then feature rows), so output is bit-reproducible per seed.
template <std::floating_point T>
Dataset<T> synth_planted(index_t n, index_t classes, double p_intra, double p_inter,
                         index_t feat_dim, double noise, std::uint64_t seed) {
    if (classes == 0 || n < classes)
        throw ConfigError("synth_planted: need n >= classes >= 1");
    if (!(p_inter < p_intra))
        throw ConfigError("synth_planted: p_inter must be below p_intra");
    if (p_intra < 0 || p_intra > 1 || p_inter < 0 || p_inter > 1)
        throw ConfigError("synth_planted: probabilities must lie in [0, 1]");
    if (feat_dim < classes)
        throw ConfigError("synth_planted: feat_dim must be at least the class count");

    auto class_of = [n, classes](std::uint64_t i) {
        return static_cast<index_t>(i * classes / n);
    };
    // contiguous class blocks: block c covers [start(c), start(c+1))
    std::vector<std::uint64_t> start(classes + 1);
    for (index_t c = 0; c <= classes; ++c)
        start[c] = (static_cast<std::uint64_t>(n) * c + classes - 1) / classes; // inverse of class_of
    // class_of(i) = i*classes/n means block c starts at ceil(n*c/classes)
    for (index_t c = 0; c <= classes; ++c)
        start[c] = (static_cast<std::uint64_t>(n) * c + classes - 1) / classes;

    Rng rng(seed);
    std::vector<Triple<T>> triples;
    for (index_t a = 0; a < classes; ++a) {
        for (index_t b = a; b < classes; ++b) {
            const std::uint64_t base_a = start[a], base_b = start[b];
            const std::uint64_t ma = start[a + 1] - start[a];
            const std::uint64_t mb = start[b + 1] - start[b];
            const double p = a == b ? p_intra : p_inter;
            auto emit = [&](std::uint64_t u, std::uint64_t v) {
                triples.push_back({static_cast<index_t>(u), static_cast<index_t>(v), T(1)});
                triples.push_back({static_cast<index_t>(v), static_cast<index_t>(u), T(1)});
            };
            if (a == b) {
                if (ma >= 2)
                    detail::bernoulli_indices(ma * (ma - 1) / 2, p, rng, [&](std::uint64_t t) {
                        auto [i, j] = detail::unrank_pair(t, ma);
                        emit(base_a + i, base_a + j);
                    });
            } else {
                detail::bernoulli_indices(ma * mb, p, rng, [&](std::uint64_t t) {
                    emit(base_a + t / mb, base_b + t % mb);
                });
            }
        }
    }

    Dataset<T> ds;
    ds.adjacency = csr_from_coo<T>(n, n, triples);
    ds.features = DenseMatrix<T>(n, feat_dim);
    ds.labels.resize(n);
    ds.train_mask.assign(n, 1);
    for (index_t i = 0; i < n; ++i) {
        const index_t cls = class_of(i);
        ds.labels[i] = cls;
        T* row = ds.features.row_data(i);
        for (index_t f = 0; f < feat_dim; ++f)
            row[f] = static_cast<T>((f == cls ? 1.0 : 0.0) + noise * rng.normal());
    }
    ds.name = "planted(n=" + std::to_string(n) + ",c=" + std::to_string(classes) +
              ",seed=" + std::to_string(seed) + ")";
    return ds;
}

} // namespace sparsegnn
