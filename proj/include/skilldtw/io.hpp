#pragma once

#include "skilldtw/cluster.hpp"
#include "skilldtw/core.hpp"
#include "skilldtw/envelope.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace skilldtw {

inline constexpr double kSamplePeriodMs = 2.0;

// Shortest round-trip decimal form ("%.17g").
std::string format_double(double x);

// Recording CSV: header t,<variables...>; one row per 2 ms sample.
void write_recording_csv(const std::filesystem::path& path, const Series& series,
                         const std::vector<std::string>& variables);
// Parses a recording. Rejects ragged rows, non-finite cells and non-increasing t
// with a ParseError naming file, line and column. The header names are
// returned through `variables` when non-null.
Series read_recording_csv(const std::filesystem::path& path, std::vector<std::string>* variables = nullptr);

// dataset.json plus one CSV per item under series/.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);
// Accepts a manifest file or a directory holding dataset.json.
Dataset read_dataset(const std::filesystem::path& path);

void write_envelope_csv(const std::filesystem::path& path, const Envelope& env,
                        const std::vector<std::string>& variables);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// FNV-1a 64-bit digest as 16 hex digits.
std::string text_digest(const std::string& bytes);
std::string file_digest(const std::filesystem::path& path);

}  // namespace skilldtw
