#pragma once

#include "nashpde/problem.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace nashpde {

struct NashReport;
struct EquivalenceReport;
struct DenseOperator;

/// Numeric CSV. Lines starting with '#' and rows whose first cell is not a number
/// (header rows) are skipped; every data row must have the same width.
Matrix read_numeric_csv(const std::filesystem::path& path);

/// Rows are time levels, columns nodes. A '#' metadata line and a `t,x_0,...` header
/// precede the data; the first column of each row is t_n.
void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& field, const GridSpec& grid);
/// Inverse of write_field_csv (drops the time column).
SpaceTimeField read_field_csv(const std::filesystem::path& path);

/// One row per step n = 1..nt, one column per node of omega_i.
void write_control_csv(const std::filesystem::path& path, const ProblemSpec& spec, const ControlBundle& u, int i);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Formats with 17 significant digits.
std::string format_double(double x);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string sha256_hex(const std::string& bytes);
/// Hash of the raw IEEE-754 bytes, column-major.
std::string field_hash(const Matrix& field);

nlohmann::json to_json(const NashReport& report);
nlohmann::json to_json(const EquivalenceReport& report);

}  // namespace nashpde
