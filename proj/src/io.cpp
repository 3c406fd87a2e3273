#include "nashpde/io.hpp"

#include "nashpde/game.hpp"
#include "nashpde/objectives.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nashpde {

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
  }
  return cells;
}

bool parse_number(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 32> buffer{};
  const int n = std::snprintf(buffer.data(), buffer.size(), "%.17g", x);
  return std::string(buffer.data(), static_cast<std::size_t>(n));
}

Matrix read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_cells(line);
    double value = 0.0;
    if (!parse_number(cells.front(), value)) continue;  // header row
    std::vector<double> row;
    for (const auto& cell : cells) {
      if (!parse_number(cell, value)) throw ConfigError("path", "non-numeric cell '" + cell + "' in " + path.string());
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError("path", "ragged rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("path", "no numeric rows in " + path.string());
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& field, const GridSpec& grid) {
  std::ofstream out = open_for_write(path);
  out << "# L=" << format_double(grid.length) << " T=" << format_double(grid.horizon) << " nx=" << grid.nx
      << " nt=" << grid.nt << "\n";
  out << "t";
  for (int j = 0; j <= grid.nx; ++j) out << ",x=" << format_double(grid.node(j));
  out << "\n";
  for (Eigen::Index n = 0; n < field.rows(); ++n) {
    out << format_double(grid.level(static_cast<int>(n)));
    for (Eigen::Index j = 0; j < field.cols(); ++j) out << "," << format_double(field(n, j));
    out << "\n";
  }
}

SpaceTimeField read_field_csv(const std::filesystem::path& path) {
  const Matrix table = read_numeric_csv(path);
  return table.rightCols(table.cols() - 1);
}

void write_control_csv(const std::filesystem::path& path, const ProblemSpec& spec, const ControlBundle& u, int i) {
  const PlayerSpec& p = spec.player(i);
  std::ofstream out = open_for_write(path);
  out << "t";
  for (int k = 0; k < p.num_nodes(); ++k) out << ",x=" << format_double(spec.grid.node(p.first_node + k));
  out << "\n";
  for (Eigen::Index n = 0; n < u[i].rows(); ++n) {
    out << format_double(spec.grid.level(static_cast<int>(n) + 1));
    for (Eigen::Index k = 0; k < u[i].cols(); ++k) out << "," << format_double(u[i](n, k));
    out << "\n";
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out = open_for_write(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << "\n";
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_for_write(path);
  out << text;
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int k = 0; k < length; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
  return hex.str();
}

std::string field_hash(const Matrix& field) {
  return sha256_hex(std::string(reinterpret_cast<const char*>(field.data()),
                                static_cast<std::size_t>(field.size()) * sizeof(double)));
}

nlohmann::json to_json(const NashReport& report) {
  nlohmann::json j;
  j["mode"] = to_string(report.mode);
  j["solver"] = report.solver;
  j["converged"] = report.converged;
  j["iterations"] = report.iterations;
  j["residual"] = report.residual;
  j["internal_residual"] = report.internal_residual;
  j["b_norm"] = report.b_norm;
  j["J_values"] = report.J_values;
  j["ellipticity_probe"] = report.ellipticity ? nlohmann::json(*report.ellipticity) : nlohmann::json(nullptr);
  j["seed"] = report.seed;
  j["operator_applications"] = report.operator_applications;
  j["residual_history"] = report.residual_history;
  j["timings"] = {{"solve_seconds", report.solve_seconds}};
  return j;
}

nlohmann::json to_json(const EquivalenceReport& report) {
  nlohmann::json j;
  j["family"] = report.family.label();
  j["coefficients"] = report.coefficients == CoefficientSet::derived ? "derived" : "literal";
  j["probes"] = report.probes;
  j["seed"] = report.seed;
  j["constant_mean"] = report.constant_mean;
  j["constant_max_deviation"] = report.constant_max_deviation;
  j["constant_variance"] = report.constant_variance;
  j["constant_pass"] = report.constant_pass;
  j["gradient_mismatch"] = report.gradient_mismatch;
  j["gradient_consistent"] = report.gradient_consistent;
  j["argmin_evaluated"] = report.argmin_evaluated;
  j["argmin_distance"] = report.argmin_distance;
  j["minimizer_iterations"] = report.minimizer_iterations;
  j["functional_at_nash"] = report.functional_at_nash;
  j["half_jtilde_at_nash"] = report.half_jtilde_at_nash;
  j["passed"] = report.passed();
  return j;
}

}  // namespace nashpde
