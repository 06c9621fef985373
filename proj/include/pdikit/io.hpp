#pragma once

#include <string>

#include <Eigen/Dense>

#include "pdikit/independence.hpp"

namespace pdikit {

// CSV ingestion: comma-separated, mandatory header row, '.' decimal
// separator, columns x0..x{d-1} and y0..y{d'-1} located by name. NaN and
// infinities are rejected.
PairedSample load_sample(const std::string& path, int x_dims, int y_dims);

// Whitespace-separated matrix, one row per line.
Eigen::MatrixXd load_matrix(const std::string& path);

// FNV-1a over the file bytes, as a hex string. Used for config hashes and
// input digests in reports.
std::string file_digest(const std::string& path);
std::string bytes_digest(const std::string& bytes);

std::string read_file(const std::string& path);

}  // namespace pdikit
