#include "sketchsel/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sketchsel/errors.hpp"

namespace sketchsel {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || errno == ERANGE || !std::isfinite(v))
        throw ModelError("could not parse number '" + s + "'");
    while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
    if (end && *end != '\0') throw ModelError("trailing characters in number '" + s + "'");
    return v;
}

static std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string matrix_to_csv(const DenseMatrix& m, const std::vector<std::string>& comments) {
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    out += std::to_string(m.rows) + "," + std::to_string(m.cols) + "\n";
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

DenseMatrix matrix_from_csv_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    auto next_line = [&](std::string& out) -> bool {
        while (std::getline(in, out)) {
            if (!out.empty() && out.back() == '\r') out.pop_back();
            if (out.empty() || out[0] == '#') continue;
            return true;
        }
        return false;
    };

    if (!next_line(line)) throw ModelError(origin + ": empty matrix CSV");
    const auto head = split_commas(line);
    if (head.size() != 2)
        throw ModelError(origin + ": expected 'rows,cols' header, got '" + line + "'");
    int rows = 0, cols = 0;
    try {
        rows = std::stoi(head[0]);
        cols = std::stoi(head[1]);
    } catch (const std::exception&) {
        throw ModelError(origin + ": bad matrix header '" + line + "'");
    }
    if (rows < 0 || cols < 0) throw ModelError(origin + ": negative matrix dimensions");

    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        if (!next_line(line))
            throw ModelError(origin + ": expected " + std::to_string(rows) + " rows, found " +
                             std::to_string(i));
        const auto fields = split_commas(line);
        if (fields.size() != static_cast<std::size_t>(cols))
            throw ModelError(origin + ": row " + std::to_string(i) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(cols));
        for (const auto& f : fields) data.push_back(parse_double(f));
    }
    return DenseMatrix::from_data(rows, cols, std::move(data));
}

DenseMatrix read_matrix_csv(const std::string& path) {
    return matrix_from_csv_text(read_text_file(path), path);
}

void write_matrix_csv(const std::string& path, const DenseMatrix& m,
                      const std::vector<std::string>& comments) {
    write_text_atomic(path, matrix_to_csv(m, comments));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ModelError("cannot write file '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw ModelError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw ModelError("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
    }
}

}  // namespace sketchsel
