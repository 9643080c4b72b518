#pragma once

#include <ostream>
#include <sstream>

#include "gmsc/asymptotics.hpp"
#include "gmsc/io.hpp"
#include "gmsc/verify.hpp"

// Figure-ready data emitters behind the CLI subcommands.  Output is tidy
// (one observation per row, m as a column), byte-deterministic, and written
// atomically.  Grid points are evaluated in parallel and emitted in grid
// order.

namespace gmsc::cli {

enum class Quantity { rate, bound, gap, spectrum, critical };
enum class Format { csv, json };

struct DGrid {
  double min = 0.05;
  double max = 0.95;
  int count = 181;
  bool log_spacing = false;
};

struct CurveRequest {
  int ell = 3;
  std::vector<int> ms;
  double rho = 0.5;
  DGrid grid;
  double d = 0.5;  ///< single distortion, spectrum only
  Quantity quantity = Quantity::rate;
  std::string out;
  Format format = Format::csv;
};

namespace detail {

inline void validate_grid(const DGrid& g) {
  if (!(g.min > 0.0 && g.max < 1.0 && g.min <= g.max))
    throw std::invalid_argument(
        "curve request: d grid must lie strictly inside (0, 1)");
  if (g.count < 2)
    throw std::invalid_argument("curve request: d grid needs count >= 2");
}

inline void validate_ms(const std::vector<int>& ms, int ell_or_zero) {
  if (ms.empty())
    throw std::invalid_argument("curve request: at least one m is required");
  for (int m : ms) {
    if (m < 1 || (ell_or_zero > 0 && m > ell_or_zero))
      throw std::invalid_argument("curve request: m out of range");
  }
}

// The formula branch in effect at distortion d: below or above the largest
// distortion where the scheme's off-diagonal is still zero.
inline std::string branch_label(const SourceModel& model, int m, double d) {
  double dc = 1.0;
  if (model.rho > 0.0)
    dc = critical_distortion(model, m);
  else if (model.rho < 0.0)
    dc = 1.0 + (model.ell - 1) * model.rho;
  return d <= dc ? "sub-critical" : "super-critical";
}

struct Cell {
  std::string text;  // already formatted; empty = missing (CSV "", JSON null)
  bool quoted = false;
};

inline Cell num(double v) { return {io::format_num(v), false}; }
inline Cell integer(long v) { return {std::to_string(v), false}; }
inline Cell text(std::string s) { return {std::move(s), true}; }
inline Cell boolean(bool b) { return {b ? "true" : "false", false}; }
inline Cell missing() { return {}; }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline std::string render_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c].text;
    }
    out += '\n';
  }
  return out;
}

inline std::string render_json(const std::string& command,
                               const std::vector<std::pair<std::string, Cell>>&
                                   params,
                               const Table& table) {
  std::string out = "{\n  \"command\": \"" + io::json_escape(command) + "\"";
  for (const auto& [key, cell] : params) {
    out += ",\n  \"" + io::json_escape(key) + "\": ";
    out += cell.quoted ? "\"" + io::json_escape(cell.text) + "\"" : cell.text;
  }
  out += ",\n  \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += r ? ",\n    {" : "\n    {";
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ", ";
      out += "\"" + io::json_escape(table.columns[c]) + "\": ";
      if (row[c].text.empty() && !row[c].quoted)
        out += "null";
      else if (row[c].quoted)
        out += "\"" + io::json_escape(row[c].text) + "\"";
      else
        out += row[c].text;
    }
    out += "}";
  }
  out += "\n  ]\n}\n";
  return out;
}

inline std::string render(const CurveRequest& req, const std::string& command,
                          const std::vector<std::pair<std::string, Cell>>&
                              params,
                          const Table& table) {
  return req.format == Format::csv ? render_csv(table)
                                   : render_json(command, params, table);
}

inline Cell m_list_cell(const std::vector<int>& ms) {
  std::string s = "[";
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(ms[i]);
  }
  return {s + "]", false};
}

}  // namespace detail

/// Rate-distortion curves: the Shannon lower bound, the centralized and
/// distributed references, and one curve per requested m with its exactness
/// flag.  Quantity::bound drops the reference series.
inline std::string render_rd_curve(const CurveRequest& req) {
  detail::validate_grid(req.grid);
  detail::validate_ms(req.ms, req.ell);
  const SourceModel model(req.ell, req.rho);
  const bool references = req.quantity != Quantity::bound;
  const auto grid =
      io::spaced_grid(req.grid.min, req.grid.max, req.grid.count,
                      req.grid.log_spacing);

  struct Row {
    std::string series;
    std::optional<int> m;
    double d, rate;
    bool exact;
    std::string branch;
  };
  const auto rows_at = io::parallel_map(grid.size(), [&](std::size_t i) {
    std::vector<Row> rows;
    const double d = grid[i];
    if (references) {
      rows.push_back({"slb", std::nullopt, d, shannon_lower_bound(model, d),
                      false, "slb"});
      rows.push_back({"centralized", model.ell, d, rate_centralized(model, d),
                      true, detail::branch_label(model, model.ell, d)});
      rows.push_back({"distributed", 1, d, rate_distributed(model, d).rate_nats,
                      true, detail::branch_label(model, 1, d)});
    }
    for (int m : req.ms) {
      const BoundResult b = upper_bound_rate(model, m, d);
      rows.push_back({"rd", m, d, b.rate_nats, b.exact,
                      detail::branch_label(model, m, d)});
    }
    return rows;
  });

  detail::Table table;
  table.columns = {"series", "m", "d", "rate_nats", "exact", "branch"};
  for (const auto& rows : rows_at)
    for (const auto& row : rows)
      table.rows.push_back({detail::text(row.series),
                            row.m ? detail::integer(*row.m)
                                  : detail::missing(),
                            detail::num(row.d), detail::num(row.rate),
                            detail::boolean(row.exact),
                            detail::text(row.branch)});
  return detail::render(req, "rd-curve",
                        {{"ell", detail::integer(req.ell)},
                         {"rho", detail::num(req.rho)},
                         {"m_list", detail::m_list_cell(req.ms)}},
                        table);
}

/// Asymptotic gap curves per m.  Divergence at the critical distortion is a
/// boolean column with the numeric field left empty, never a NaN or Inf.
inline std::string render_gap_curve(const CurveRequest& req) {
  detail::validate_grid(req.grid);
  detail::validate_ms(req.ms, 0);
  if (!(req.rho > 0.0 && req.rho < 1.0))
    throw std::invalid_argument("gap-curve: rho must lie in (0, 1)");
  const auto grid =
      io::spaced_grid(req.grid.min, req.grid.max, req.grid.count,
                      req.grid.log_spacing);
  detail::Table table;
  table.columns = {"m", "d", "delta_nats", "diverges"};
  for (int m : req.ms) {
    const auto deltas = io::parallel_map(grid.size(), [&](std::size_t i) {
      return delta_gap(m, req.rho, grid[i]);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const bool diverges = !std::isfinite(deltas[i]);
      table.rows.push_back({detail::integer(m), detail::num(grid[i]),
                            diverges ? detail::missing()
                                     : detail::num(deltas[i]),
                            detail::boolean(diverges)});
    }
  }
  return detail::render(req, "gap-curve",
                        {{"rho", detail::num(req.rho)},
                         {"m_list", detail::m_list_cell(req.ms)}},
                        table);
}

/// Eigen-domain view at a single distortion: source eigenvalues against the
/// per-mode distortions of each scheme, with uncoded modes marked.
inline std::string render_spectrum(const CurveRequest& req) {
  detail::validate_ms(req.ms, req.ell);
  gmsc::detail::require_unit_distortion(req.d, "spectrum");
  const SourceModel model(req.ell, req.rho);
  const EigenSpectrum lam = spectrum(source_covariance(model));
  detail::Table table;
  table.columns = {"m", "mode", "lambda", "d_mode", "uncoded"};
  for (int m : req.ms) {
    const double theta = upper_bound_rate(model, m, req.d).theta;
    for (int i = 1; i <= req.ell; ++i) {
      const double eigenvalue = i < req.ell ? lam.bulk : lam.apex;
      const double d_mode =
          i < req.ell ? req.d - theta : req.d + (req.ell - 1) * theta;
      const bool uncoded = std::fabs(d_mode - eigenvalue) <= 1e-12;
      table.rows.push_back({detail::integer(m), detail::integer(i),
                            detail::num(eigenvalue), detail::num(d_mode),
                            detail::boolean(uncoded)});
    }
  }
  return detail::render(req, "spectrum",
                        {{"ell", detail::integer(req.ell)},
                         {"rho", detail::num(req.rho)},
                         {"d", detail::num(req.d)},
                         {"m_list", detail::m_list_cell(req.ms)}},
                        table);
}

/// Critical distortions: the spectral pair always, plus the per-m thresholds
/// and their large-ell limits when rho > 0.
inline std::string render_critical(const CurveRequest& req) {
  detail::validate_ms(req.ms, req.ell);
  const SourceModel model(req.ell, req.rho);
  const auto [dc_minus, dc_plus] = critical_distortions_pm(model);
  detail::Table table;
  table.columns = {"kind", "m", "value"};
  table.rows.push_back(
      {detail::text("dc_minus"), detail::missing(), detail::num(dc_minus)});
  table.rows.push_back(
      {detail::text("dc_plus"), detail::missing(), detail::num(dc_plus)});
  if (req.rho > 0.0) {
    for (int m : req.ms)
      table.rows.push_back({detail::text("dc_ell_m"), detail::integer(m),
                            detail::num(critical_distortion(model, m))});
    for (int m : req.ms)
      table.rows.push_back({detail::text("dc_m_limit"), detail::integer(m),
                            detail::num(dcm_limit(m, req.rho))});
  }
  return detail::render(req, "critical",
                        {{"ell", detail::integer(req.ell)},
                         {"rho", detail::num(req.rho)},
                         {"m_list", detail::m_list_cell(req.ms)}},
                        table);
}

inline void cmd_rd_curve(const CurveRequest& req) {
  io::write_atomic(req.out, render_rd_curve(req));
}
inline void cmd_gap_curve(const CurveRequest& req) {
  io::write_atomic(req.out, render_gap_curve(req));
}
inline void cmd_spectrum(const CurveRequest& req) {
  io::write_atomic(req.out, render_spectrum(req));
}
inline void cmd_critical(const CurveRequest& req) {
  io::write_atomic(req.out, render_critical(req));
}

/// Runs the verification suites, prints one line per suite and a summary;
/// returns the process exit code (0 all pass, 2 on any violation).
inline int cmd_verify(const verify::Options& opt, std::ostream& os) {
  const auto reports = verify::run(opt);
  bool all_pass = true;
  for (const auto& r : reports) {
    char residual[32];
    std::snprintf(residual, sizeof residual, "%.3e", r.max_residual);
    char tol[32];
    std::snprintf(tol, sizeof tol, "%.1e", r.tolerance);
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": cases=" << r.cases
       << " max_residual=" << residual << " tol=" << tol;
    if (!r.pass) os << " worst at " << r.worst_case;
    os << '\n';
    all_pass = all_pass && r.pass;
  }
  os << (all_pass ? "verify: all suites passed"
                  : "verify: FAILURE, see lines above")
     << '\n';
  return all_pass ? 0 : 2;
}

}  // namespace gmsc::cli
