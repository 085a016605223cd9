#include "npm/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "npm/errors.hpp"

namespace npm {

namespace {

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_cell(std::string_view cell, const std::string& path, std::size_t line_no) {
    const std::string_view body = trimmed(cell);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || ptr != body.data() + body.size())
        throw ParseError(path + ":" + std::to_string(line_no) + ": not a number: '" +
                         std::string(cell) + "'");
    if (!std::isfinite(value))
        throw ParseError(path + ":" + std::to_string(line_no) + ": non-finite value");
    return value;
}

// One CSV block: consecutive non-blank lines. line_no tracks the file
// position across calls so diagnostics stay global.
Matrix parse_block(const std::vector<std::string>& lines, std::size_t& idx,
                   const std::string& path) {
    std::vector<std::vector<double>> rows;
    for (; idx < lines.size(); ++idx) {
        if (trimmed(lines[idx]).empty()) break;
        std::vector<double> row;
        std::string_view rest = lines[idx];
        while (true) {
            const std::size_t comma = rest.find(',');
            row.push_back(parse_cell(rest.substr(0, comma), path, idx + 1));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ShapeError(path + ":" + std::to_string(idx + 1) + ": row has " +
                             std::to_string(row.size()) + " entries, expected " +
                             std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError(path + ":" + std::to_string(idx + 1) + ": expected a matrix block");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void skip_blank(const std::vector<std::string>& lines, std::size_t& idx) {
    while (idx < lines.size() && trimmed(lines[idx]).empty()) ++idx;
}

}  // namespace

Matrix load_matrix(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    std::size_t idx = 0;
    skip_blank(lines, idx);
    const Matrix m = parse_block(lines, idx, path);
    skip_blank(lines, idx);
    if (idx < lines.size())
        throw ParseError(path + ":" + std::to_string(idx + 1) +
                         ": trailing content after the matrix block");
    return m;
}

LtiSystem load_system(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    std::size_t idx = 0;
    skip_blank(lines, idx);
    const Matrix a = parse_block(lines, idx, path);
    skip_blank(lines, idx);
    const Matrix b = parse_block(lines, idx, path);
    skip_blank(lines, idx);
    const Matrix c = parse_block(lines, idx, path);
    skip_blank(lines, idx);
    if (idx < lines.size())
        throw ParseError(path + ":" + std::to_string(idx + 1) +
                         ": trailing content after the C block");
    return LtiSystem(a, b, c);
}

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void save_matrix(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_full(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw ParseError(path + ": write failed");
}

void save_trajectory(const std::string& path, const TrajectoryLog& log) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "k,norm_x,norm_err,u,dist_U,dist_V,gain_flag\n";
    for (const TrajectoryStep& s : log.steps) {
        out << s.k << ',' << format_full(s.norm_x) << ',' << format_full(s.norm_err) << ','
            << format_full(s.u) << ',' << format_full(s.dist_u) << ','
            << format_full(s.dist_v) << ',' << (s.gain_held ? 1 : 0) << '\n';
    }
    if (!out) throw ParseError(path + ": write failed");
}

}  // namespace npm
