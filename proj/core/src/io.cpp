// SPDX-License-Identifier: Apache-2.0
#include "fpinn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fpinn/error.hpp"
#include "fpinn/metrics.hpp"

namespace fpinn {

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& cell, const std::string& where) {
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw ValidationError(where + ": not a number: '" + cell + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<double> row_start(double t) { return {t}; }

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  std::string list;
  for (const auto& c : columns) list += (list.empty() ? "" : ", ") + c;
  throw ValidationError("no column '" + name + "' (available: " + list + ")");
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (const auto& c : table.comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw ValidationError("format_csv: ragged row");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += "\n";
  }
  return out;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    const auto cells = split(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (!have_header) {
      table.columns = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw ValidationError(where + ": expected " + std::to_string(table.columns.size()) + " cells, got " +
                            std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, where));
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw ValidationError(source + ": missing header row");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_csv(buf.str(), path.string());
}

CsvTable operator_table(const Trajectory& traj, const FeatureLayout& layout, const std::string& symbol) {
  CsvTable t;
  t.columns = {"t"};
  for (auto& n : layout.feature_names(symbol)) t.columns.push_back(std::move(n));
  for (std::size_t i = 0; i < traj.values.size(); ++i) {
    auto row = row_start(traj.grid[static_cast<int>(i)]);
    for (double f : layout.from_operator(traj.values[i])) row.push_back(f);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable density_table(const Trajectory& rho, const DensityLayout& layout) {
  CsvTable t;
  t.columns = {"t"};
  for (auto& n : layout.feature_names()) t.columns.push_back(std::move(n));
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    auto row = row_start(rho.grid[static_cast<int>(i)]);
    for (double f : layout.from_density(rho.values[i])) row.push_back(f);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable observables_table(const Trajectory& rho, const SystemSpec& spec, const Trajectory* ref) {
  if (ref && (!(ref->grid == rho.grid) || ref->values.size() != rho.values.size())) {
    throw ValidationError("observables_table: reference is on a different grid");
  }
  const bool two_level = spec.dim == 2;
  CsvTable t;
  t.columns = {"t"};
  if (two_level) t.columns.push_back("sigma_z");
  t.columns.push_back("coherence");
  if (spec.dim == 4) t.columns.push_back("concurrence");
  if (ref) t.columns.push_back("fidelity_vs_ref");

  // Unphysical predicted states get NaN in the state-dependent columns.
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  int unphysical = 0;
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    const ComplexMatrix& r = rho.values[i];
    auto row = row_start(rho.grid[static_cast<int>(i)]);
    if (two_level) row.push_back(expectation(r, pauli::z()));
    row.push_back(coherence_l1(r));
    bool bad = false;
    if (spec.dim == 4) {
      try {
        row.push_back(concurrence(r));
      } catch (const NumericalError&) {
        row.push_back(kNaN);
        bad = true;
      }
    }
    if (ref) {
      try {
        row.push_back(fidelity(r, ref->values[i]));
      } catch (const NumericalError&) {
        row.push_back(kNaN);
        bad = true;
      }
    }
    unphysical += bad ? 1 : 0;
    t.rows.push_back(std::move(row));
  }
  if (unphysical > 0) {
    t.comments.push_back("unphysical states (eigenvalue < -1e-6) at " + std::to_string(unphysical) +
                         " grid points");
  }
  return t;
}

CsvTable loss_table(const RunRecord& record) {
  CsvTable t;
  t.columns = {"epoch", "lr", "l_tot"};
  const std::vector<std::string> heads =
      record.phase == "rho" ? std::vector<std::string>{"rho"} : std::vector<std::string>{"o", "q"};
  for (const char* term : {"mod", "ini", "er"})
    for (const auto& h : heads) t.columns.push_back(std::string("l_") + term + "_" + h);
  for (const auto& b : record.history) {
    std::vector<double> row = {static_cast<double>(b.epoch), b.lr, b.total};
    for (const auto* part : {&b.mod, &b.ini, &b.er}) {
      if (part->size() != heads.size()) throw ValidationError("loss_table: head count mismatch");
      row.insert(row.end(), part->begin(), part->end());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_new_file(const std::filesystem::path& path, std::string_view content) {
  if (std::filesystem::exists(path)) {
    throw ValidationError("refusing to overwrite existing file " + path.string());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot create " + path.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw ValidationError("failed writing " + path.string());
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
  return s;
}

}  // namespace fpinn
