#include "pdikit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

namespace pdikit {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, const std::string& where) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || cell.empty()) {
        fail(ErrorCode::NonNumericCell, where + ": non-numeric cell '" + cell + "'");
    }
    if (!std::isfinite(value)) {
        fail(ErrorCode::NonNumericCell, where + ": non-finite cell '" + cell + "'");
    }
    return value;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

PairedSample load_sample(const std::string& path, int x_dims, int y_dims) {
    require(x_dims >= 1 && y_dims >= 1, ErrorCode::UsageError,
            "sample dimensions must be >= 1");
    std::ifstream in(path);
    require(in.good(), ErrorCode::IoError, "cannot open '" + path + "'");

    std::string header_line;
    require(static_cast<bool>(std::getline(in, header_line)), ErrorCode::EmptyFile,
            path + ": file is empty");
    std::vector<std::string> header = split_csv(header_line);

    auto column_of = [&](const std::string& name) {
        for (size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) return c;
        }
        fail(ErrorCode::MissingColumn, path + ": missing column '" + name + "'");
    };
    std::vector<size_t> x_cols(x_dims), y_cols(y_dims);
    for (int d = 0; d < x_dims; ++d) x_cols[d] = column_of("x" + std::to_string(d));
    for (int d = 0; d < y_dims; ++d) y_cols[d] = column_of("y" + std::to_string(d));

    std::vector<std::vector<double>> x_rows, y_rows;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_csv(line);
        auto cell_at = [&](size_t c, const std::string& name) -> const std::string& {
            if (c >= cells.size()) {
                fail(ErrorCode::NonNumericCell, path + ":" + std::to_string(line_no) +
                                                    ": missing cell in column '" + name + "'");
            }
            return cells[c];
        };
        std::vector<double> xr(x_dims), yr(y_dims);
        for (int d = 0; d < x_dims; ++d) {
            std::string name = "x" + std::to_string(d);
            xr[d] = parse_cell(cell_at(x_cols[d], name),
                               path + ":" + std::to_string(line_no) + ":" + name);
        }
        for (int d = 0; d < y_dims; ++d) {
            std::string name = "y" + std::to_string(d);
            yr[d] = parse_cell(cell_at(y_cols[d], name),
                               path + ":" + std::to_string(line_no) + ":" + name);
        }
        x_rows.push_back(std::move(xr));
        y_rows.push_back(std::move(yr));
    }
    require(!x_rows.empty(), ErrorCode::EmptyFile, path + ": no data rows");

    PairedSample sample;
    sample.xs.resize(static_cast<Eigen::Index>(x_rows.size()), x_dims);
    sample.ys.resize(static_cast<Eigen::Index>(y_rows.size()), y_dims);
    for (size_t r = 0; r < x_rows.size(); ++r) {
        for (int d = 0; d < x_dims; ++d) sample.xs(static_cast<Eigen::Index>(r), d) = x_rows[r][d];
        for (int d = 0; d < y_dims; ++d) sample.ys(static_cast<Eigen::Index>(r), d) = y_rows[r][d];
    }
    return sample;
}

Eigen::MatrixXd load_matrix(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::IoError, "cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        while (ss >> tok) {
            row.push_back(parse_cell(tok, path + ":" + std::to_string(line_no)));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            fail(ErrorCode::ParseError,
                 path + ":" + std::to_string(line_no) + ": ragged matrix row");
        }
        rows.push_back(std::move(row));
    }
    require(!rows.empty(), ErrorCode::EmptyFile, path + ": no matrix rows");
    Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            M(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
    }
    return M;
}

std::string bytes_digest(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ull;  // FNV offset basis
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;  // FNV prime
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

std::string file_digest(const std::string& path) { return bytes_digest(read_file(path)); }

}  // namespace pdikit
