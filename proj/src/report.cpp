#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "sparsegnn/autotune.hpp"

namespace sparsegnn {

namespace {

constexpr const char* kHeader = "k,t_trusted_ms,t_specialized_ms,speedup";

std::string fmt_ms(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

bool parse_u32(const std::string& s, index_t& out) {
    try {
        std::size_t pos = 0;
        unsigned long v = std::stoul(s, &pos);
        if (pos != s.size() || v > 0xfffffffful) return false;
        out = static_cast<index_t>(v);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_f64(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

} // namespace

void save_report(const TuningReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << kHeader << '\n';
    for (const TuningEntry& e : report.entries)
        out << e.k << ',' << fmt_ms(e.t_trusted_ms) << ',' << fmt_ms(e.t_specialized_ms) << ','
            << fmt_ms(e.speedup) << '\n';
    out << "best_k," << report.best_k << '\n';
    out << "vlen," << report.profile.vlen << '\n';
    out << "simd_bits," << report.profile.simd_bits << '\n';
    out << "cores," << report.profile.cores << '\n';
    out << "description," << report.profile.description << '\n';
    out << "graph_id," << report.graph_id << '\n';
    for (index_t k : report.skipped) out << "skipped," << k << '\n';
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

TuningReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    TuningReport report;
    std::string line;
    long line_no = 0;

    if (!std::getline(in, line)) throw ParseError("empty report file", 1);
    ++line_no;
    if (line != kHeader)
        throw ParseError("expected header '" + std::string(kHeader) + "'", line_no);

    bool saw_best_k = false, saw_vlen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        const std::string& key = fields[0];

        if (key == "best_k") {
            if (fields.size() != 2 || !parse_u32(fields[1], report.best_k))
                throw ParseError("malformed best_k footer", line_no);
            saw_best_k = true;
        } else if (key == "vlen") {
            index_t v;
            if (fields.size() != 2 || !parse_u32(fields[1], v))
                throw ParseError("malformed vlen footer", line_no);
            report.profile.vlen = static_cast<int>(v);
            report.profile.simd_bits = report.profile.vlen * 32;
            saw_vlen = true;
        } else if (key == "simd_bits") {
            index_t v;
            if (fields.size() != 2 || !parse_u32(fields[1], v))
                throw ParseError("malformed simd_bits footer", line_no);
            report.profile.simd_bits = static_cast<int>(v);
        } else if (key == "cores") {
            index_t v;
            if (fields.size() != 2 || !parse_u32(fields[1], v))
                throw ParseError("malformed cores footer", line_no);
            report.profile.cores = static_cast<int>(v);
        } else if (key == "description") {
            report.profile.description = line.substr(key.size() + 1);
        } else if (key == "graph_id") {
            report.graph_id = line.substr(key.size() + 1);
        } else if (key == "skipped") {
            index_t v;
            if (fields.size() != 2 || !parse_u32(fields[1], v))
                throw ParseError("malformed skipped footer", line_no);
            report.skipped.push_back(v);
        } else {
            TuningEntry e;
            if (fields.size() != 4 || !parse_u32(fields[0], e.k) ||
                !parse_f64(fields[1], e.t_trusted_ms) || !parse_f64(fields[2], e.t_specialized_ms) ||
                !parse_f64(fields[3], e.speedup))
                throw ParseError("malformed data line '" + line + "'", line_no);
            if (e.t_trusted_ms <= 0 || e.t_specialized_ms <= 0 || e.speedup <= 0)
                throw ParseError("times and speedup must be positive", line_no);
            report.entries.push_back(e);
        }
    }

    if (report.entries.empty()) throw ParseError("report has no data lines", line_no + 1);
    if (!saw_best_k) throw ParseError("missing best_k footer", line_no + 1);
    if (!saw_vlen) throw ParseError("missing vlen footer", line_no + 1);
    bool best_known = false;
    for (const TuningEntry& e : report.entries) best_known |= (e.k == report.best_k);
    if (!best_known) throw ParseError("best_k does not match any data line", line_no + 1);
    return report;
}

} // namespace sparsegnn
