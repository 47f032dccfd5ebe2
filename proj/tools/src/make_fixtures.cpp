// SPDX-License-Identifier: Apache-2.0
// Regenerates the oracle regression fixtures under fixtures/.
//
//   fpinn-fixtures <output-dir>
//
// Existing files are never overwritten; delete them first on purpose.
#include <filesystem>
#include <iostream>

#include "fpinn/error.hpp"
#include "fpinn/io.hpp"
#include "fpinn/metrics.hpp"
#include "fpinn/oracle.hpp"

namespace {

using namespace fpinn;

constexpr int kSubsteps = 64;
const double kTimes[] = {1.0, 3.0, 6.0};

/// Fixture body plus a header carrying the command and the body's hash.
std::string with_header(const CsvTable& body_table) {
  const std::string body = format_csv(body_table);
  return "# generated by: fpinn-fixtures fixtures\n# content: fnv1a64:" + hex64(fnv1a64(body)) + "\n" + body;
}

int index_of(const TimeGrid& grid, double t) {
  return static_cast<int>(std::lround(t / grid.step()));
}

std::string spin_boson_fixture() {
  const SystemSpec spec = spin_boson_spec({0.1, 0.3, 20.0});
  const TimeGrid grid(601, 6.0);
  const OracleResult r = integrate_system(spec, ket0_state(), grid, kSubsteps);
  CsvTable t;
  t.columns = {"t", "re_O12", "im_O12", "re_Q12", "im_Q12", "rho11", "re_rho12", "im_rho12", "sigma_z"};
  for (double time : kTimes) {
    const int i = index_of(grid, time);
    const auto& o = r.o.values[i];
    const auto& q = r.q.values[i];
    const auto& rho = r.rho.values[i];
    t.rows.push_back({grid[i], o(0, 1).real(), o(0, 1).imag(), q(0, 1).real(), q(0, 1).imag(), rho(0, 0).real(),
                      rho(0, 1).real(), rho(0, 1).imag(), expectation(rho, pauli::z())});
  }
  return with_header(t);
}

std::string xxz_fixture() {
  const SystemSpec spec = xxz_spec(2.0, 0.5, {0.1, 0.4, 20.0});
  const TimeGrid grid(601, 6.0);
  const OracleResult r = integrate_system(spec, bell_state(), grid, kSubsteps);
  CsvTable t;
  t.columns = {"t", "re_O21", "im_O21", "re_O42", "im_O42", "coherence", "concurrence"};
  for (double time : kTimes) {
    const int i = index_of(grid, time);
    const auto& o = r.o.values[i];
    const auto& rho = r.rho.values[i];
    t.rows.push_back({grid[i], o(1, 0).real(), o(1, 0).imag(), o(3, 1).real(), o(3, 1).imag(), coherence_l1(rho),
                      concurrence(rho)});
  }
  return with_header(t);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: fpinn-fixtures <output-dir>\n";
    return 1;
  }
  try {
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    write_new_file(dir / "oracle_spin_boson.csv", spin_boson_fixture());
    write_new_file(dir / "oracle_xxz_bell.csv", xxz_fixture());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dynamic_cast<const fpinn::NumericalError*>(&e) ? 2 : 1;
  }
  return 0;
}
