#include "ias/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ias/errors.hpp"

namespace ias {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("rename to '" + path + "' failed: " + ec.message());
}

void write_vector_csv(const std::string& path, const Vector& v) {
    std::ostringstream out;
    for (Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << "\n";
    atomic_write(path, out.str());
}

Vector read_vector_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        vals.push_back(std::stod(line));
    }
    return Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("ragged matrix in '" + path + "'");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("empty matrix in '" + path + "'");
    Matrix A(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            A(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return A;
}

void write_trace_csv(const std::string& path,
                     const std::vector<IterationRecord>& trace) {
    std::ostringstream out;
    out << "# schema: ias-trace-v1\n";
    out << "t,objective,residual,cgls_iters,switched,rel_change,assignment_hash\n";
    for (const IterationRecord& r : trace) {
        out << r.t << "," << format_double(r.objective) << ","
            << format_double(r.residual) << "," << r.cgls_iters << ","
            << r.switched_count << "," << format_double(r.rel_change) << ","
            << r.assignment_hash << "\n";
    }
    atomic_write(path, out.str());
}

void write_bitmap_csv(const std::string& path,
                      const std::vector<IterationRecord>& trace) {
    std::ostringstream out;
    out << "# schema: ias-bitmap-v1\n";
    out << "t,bitmap\n";
    for (const IterationRecord& r : trace) {
        out << r.t << ",";
        for (std::uint8_t b : r.convex_bitmap) out << (b ? '1' : '0');
        out << "\n";
    }
    atomic_write(path, out.str());
}

void write_metrics_csv(const std::string& path,
                       const std::map<std::string, std::string>& metrics) {
    std::ostringstream out;
    out << "# schema: ias-metrics-v1\n";
    for (const auto& [key, value] : metrics) out << key << "," << value << "\n";
    atomic_write(path, out.str());
}

std::map<std::string, std::string> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("metrics file '" + path + "' not found");
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("malformed metrics row: " + line);
        out[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return out;
}

void write_pgm16(const std::string& path, const Vector& image, Index rows,
                 Index cols, double lo, double hi) {
    if (image.size() != rows * cols) throw DomainError("pgm: size mismatch");
    std::ostringstream out;
    out << "P5\n" << cols << " " << rows << "\n65535\n";
    const double span = hi > lo ? hi - lo : 1.0;
    for (Index i = 0; i < image.size(); ++i) {
        double t = (image[i] - lo) / span;
        t = std::min(std::max(t, 0.0), 1.0);
        const auto v = static_cast<unsigned>(t * 65535.0 + 0.5);
        out.put(static_cast<char>((v >> 8) & 0xff));
        out.put(static_cast<char>(v & 0xff));
    }
    atomic_write(path, out.str());
}

}  // namespace ias
