#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "helical/energy.hpp"
#include "helical/grid.hpp"
#include "helical/operators.hpp"
#include "helical/solve.hpp"

namespace helical {

// Flat typed key = value configuration.  '#' starts a comment; unknown keys
// are rejected with their line number; serialization round-trips exactly.
struct RunConfig {
  int schema_version = 1;
  // problem
  int n = 2;
  double omega = 2.0;
  double radius = 1.0;
  int sign = +1;
  // discretization
  int nr = 64;
  int ntheta = 32;   // n = 3 only
  int nphi = 16;
  int mmax = 8;
  // data: constant | manufactured | trig | file
  std::string preset = "constant";
  double constant_c = 1.0;
  bool constant_compatible = true;
  int manufactured_k = 2;
  unsigned seed = 42;
  int energy_max_mode = 2;  // trig degree of the energy test family
  std::string source_file;
  std::string boundary_file;
  // solver
  double rtol = 1e-10;
  double compat_tol_factor = 10.0;
  bool allow_incompatible = false;
  // verification
  int refine = 3;
  std::string suite = "energy";

  HelicalConfig helical() const { return make_config(n, omega, radius, sign); }
  GridResolution resolution() const { return {nr, ntheta, nphi}; }
};

namespace detail {

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& in) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "schema_version") c.schema_version = std::stoi(val);
      else if (key == "n") c.n = std::stoi(val);
      else if (key == "omega") c.omega = std::stod(val);
      else if (key == "radius") c.radius = std::stod(val);
      else if (key == "sign") c.sign = std::stoi(val);
      else if (key == "nr") c.nr = std::stoi(val);
      else if (key == "ntheta") c.ntheta = std::stoi(val);
      else if (key == "nphi") c.nphi = std::stoi(val);
      else if (key == "mmax") c.mmax = std::stoi(val);
      else if (key == "preset") c.preset = val;
      else if (key == "constant_c") c.constant_c = std::stod(val);
      else if (key == "constant_compatible") c.constant_compatible = detail::parse_bool(val);
      else if (key == "manufactured_k") c.manufactured_k = std::stoi(val);
      else if (key == "seed") c.seed = static_cast<unsigned>(std::stoul(val));
      else if (key == "energy_max_mode") c.energy_max_mode = std::stoi(val);
      else if (key == "source_file") c.source_file = val;
      else if (key == "boundary_file") c.boundary_file = val;
      else if (key == "rtol") c.rtol = std::stod(val);
      else if (key == "compat_tol_factor") c.compat_tol_factor = std::stod(val);
      else if (key == "allow_incompatible") c.allow_incompatible = detail::parse_bool(val);
      else if (key == "refine") c.refine = std::stoi(val);
      else if (key == "suite") c.suite = val;
      else
        throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
  return c;
}

inline RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_run_config(in);
}

inline void write_run_config(std::ostream& os, const RunConfig& c) {
  using detail::fmt_double;
  os << "schema_version = " << c.schema_version << "\n"
     << "n = " << c.n << "\n"
     << "omega = " << fmt_double(c.omega) << "\n"
     << "radius = " << fmt_double(c.radius) << "\n"
     << "sign = " << c.sign << "\n"
     << "nr = " << c.nr << "\n"
     << "ntheta = " << c.ntheta << "\n"
     << "nphi = " << c.nphi << "\n"
     << "mmax = " << c.mmax << "\n"
     << "preset = " << c.preset << "\n"
     << "constant_c = " << fmt_double(c.constant_c) << "\n"
     << "constant_compatible = " << (c.constant_compatible ? "true" : "false") << "\n"
     << "manufactured_k = " << c.manufactured_k << "\n"
     << "seed = " << c.seed << "\n"
     << "energy_max_mode = " << c.energy_max_mode << "\n"
     << "source_file = " << c.source_file << "\n"
     << "boundary_file = " << c.boundary_file << "\n"
     << "rtol = " << fmt_double(c.rtol) << "\n"
     << "compat_tol_factor = " << fmt_double(c.compat_tol_factor) << "\n"
     << "allow_incompatible = " << (c.allow_incompatible ? "true" : "false") << "\n"
     << "refine = " << c.refine << "\n"
     << "suite = " << c.suite << "\n";
}

// ---- field tables -----------------------------------------------------------
// header line with column names, then whitespace-separated numeric rows

inline void write_field_table(std::ostream& os, const Eigen::VectorXd& field,
                              const Grid& g) {
  char buf[256];
  if (g.n == 2) {
    os << "# r phi value\n";
    for (int j = 0; j <= g.J; ++j)
      for (int l = 0; l < g.n_phi; ++l) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", g.r[j], g.phi[l],
                      field[g.fidx(j, l)]);
        os << buf;
      }
    return;
  }
  os << "# r theta phi value\n";
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k <= g.K; ++k)
      for (int l = 0; l < g.n_phi; ++l) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", g.r[j],
                      g.theta[k], g.phi[l], field[g.fidx(g.sidx(j, k), l)]);
        os << buf;
      }
}

inline void write_mode_table(std::ostream& os, const ModeField& mode,
                             const Grid& g) {
  char buf[256];
  if (g.n == 2) {
    os << "# r re im\n";
    for (int j = 0; j <= g.J; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", g.r[j],
                    mode.values[j].real(), mode.values[j].imag());
      os << buf;
    }
    return;
  }
  os << "# r theta re im\n";
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k <= g.K; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", g.r[j],
                    g.theta[k], mode.values[g.sidx(j, k)].real(),
                    mode.values[g.sidx(j, k)].imag());
      os << buf;
    }
}

// reads the value column of a field table written for the same grid
inline Eigen::VectorXd read_field_table(std::istream& is, const Grid& g) {
  Eigen::VectorXd out(g.field_size());
  std::string line;
  int row = 0;
  const int coords = g.n == 2 ? 2 : 3;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double v = 0.0, tmp;
    for (int c = 0; c < coords; ++c)
      if (!(ls >> tmp))
        throw std::invalid_argument("field table: malformed row " + std::to_string(row));
    if (!(ls >> v))
      throw std::invalid_argument("field table: missing value in row " + std::to_string(row));
    if (row >= g.field_size())
      throw std::invalid_argument("field table: too many rows for grid");
    out[row++] = v;
  }
  if (row != g.field_size())
    throw std::invalid_argument("field table: row count does not match grid");
  return out;
}

// boundary tables: n = 2 rows over phi, n = 3 rows over (theta, phi)
inline Eigen::VectorXd read_boundary_table(std::istream& is, const Grid& g) {
  Eigen::VectorXd out(g.boundary_field_size());
  std::string line;
  int row = 0;
  const int coords = g.n == 2 ? 1 : 2;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double v = 0.0, tmp;
    for (int c = 0; c < coords; ++c)
      if (!(ls >> tmp))
        throw std::invalid_argument("boundary table: malformed row " + std::to_string(row));
    if (!(ls >> v))
      throw std::invalid_argument("boundary table: missing value");
    if (row >= g.boundary_field_size())
      throw std::invalid_argument("boundary table: too many rows for grid");
    out[row++] = v;
  }
  if (row != g.boundary_field_size())
    throw std::invalid_argument("boundary table: row count does not match grid");
  return out;
}

// grid node dump: coordinate columns only
inline void write_grid_table(std::ostream& os, const Grid& g) {
  char buf[128];
  if (g.n == 2) {
    os << "# r phi\n";
    for (int j = 0; j <= g.J; ++j)
      for (int l = 0; l < g.n_phi; ++l) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", g.r[j], g.phi[l]);
        os << buf;
      }
    return;
  }
  os << "# r theta phi\n";
  for (int j = 0; j <= g.J; ++j)
    for (int k = 0; k <= g.K; ++k)
      for (int l = 0; l < g.n_phi; ++l) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", g.r[j], g.theta[k],
                      g.phi[l]);
        os << buf;
      }
}

// ---- structured key-value reports ------------------------------------------

using ReportDoc = std::vector<std::pair<std::string, std::string>>;

inline void write_report(std::ostream& os, const ReportDoc& doc) {
  os << "schema_version = 1\n";
  for (const auto& [k, v] : doc) os << k << " = " << v << "\n";
}

inline ReportDoc energy_report_doc(const EnergyReport& rep) {
  using detail::fmt_double;
  ReportDoc doc;
  doc.emplace_back("E_direct", fmt_double(rep.E_direct));
  doc.emplace_back("volume_term", fmt_double(rep.volume_term));
  doc.emplace_back("boundary_term", fmt_double(rep.boundary_term));
  doc.emplace_back("ibp_residual", fmt_double(rep.ibp_residual));
  doc.emplace_back("min_volume_integrand", fmt_double(rep.min_volume_integrand));
  doc.emplace_back("min_boundary_gap", fmt_double(rep.min_boundary_gap));
  return doc;
}

inline ReportDoc solve_report_doc(const SolveReport& rep) {
  using detail::fmt_double;
  ReportDoc doc;
  doc.emplace_back("compatibility_residual", fmt_double(rep.compatibility_residual));
  doc.emplace_back("compatibility_scale", fmt_double(rep.compatibility_scale));
  doc.emplace_back("compatibility_threshold", fmt_double(rep.compatibility_threshold));
  doc.emplace_back("compatible", rep.compatible ? "true" : "false");
  doc.emplace_back("tau_projected", rep.tau_projected ? "true" : "false");
  doc.emplace_back("tau_shift", fmt_double(rep.tau_shift));
  doc.emplace_back("gauge_constant", fmt_double(rep.gauge_constant));
  doc.emplace_back("imag_residue", fmt_double(rep.imag_residue));
  doc.emplace_back("out_of_theory", rep.out_of_theory ? "true" : "false");
  for (const auto& m : rep.modes) {
    const std::string p = "mode_" + std::to_string(m.m) + "_";
    doc.emplace_back(p + "ok", m.ok ? "true" : "false");
    doc.emplace_back(p + "rel_residual", fmt_double(m.rel_residual));
    doc.emplace_back(p + "cond_estimate", fmt_double(m.cond_estimate));
    if (m.m == 0) {
      doc.emplace_back(p + "constraint_residual", fmt_double(m.constraint_residual));
      doc.emplace_back(p + "tau_shift_discrete", fmt_double(m.gauge_multiplier.real()));
    }
    if (!m.error.empty()) doc.emplace_back(p + "error", m.error);
  }
  return doc;
}

}  // namespace helical
