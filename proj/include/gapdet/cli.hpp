// SPDX-License-Identifier: MIT
//
// Command-line front end: det | verify | dump.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gapdet/gapdet.hpp"

namespace gapdet::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_verify_failed = 1,
  exit_usage = 2,
  exit_integrity = 3,
  exit_io = 4,
};

class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { det, verify, dump };
enum class OutputFormat { csv, json };

struct RunConfig {
  Command command = Command::det;
  std::string kernel = "sine";   // sine | csin | pii
  std::vector<double> s_list;
  double x = 0.0;
  double t = 1.0;
  std::optional<int> n;          // empty: auto
  OutputFormat format = OutputFormat::csv;
  std::string output_path;       // empty: stdout
  std::optional<double> tol;     // empty: per-formula default
  std::array<double, 3> hm_window{default_hm_left, default_hm_right, default_hm_step};
  double psi_R = 8.0;
  std::string formula = "theorem2";
  std::string what = "hm";       // hm | psi | kernel
};

using Cell = std::variant<double, int, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// ---------------------------------------------------------------- parsing

inline std::vector<double> parse_real_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw usage_error(std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw usage_error(std::string(flag) + ": empty list");
  return out;
}

inline void validate(const RunConfig& c) {
  if (c.kernel != "sine" && c.kernel != "csin" && c.kernel != "pii") {
    throw usage_error("unknown kernel '" + c.kernel + "' (expected sine, csin or pii)");
  }
  if (!(c.t >= 0.0 && c.t <= 1.0)) throw usage_error("--t must lie in [0, 1]");
  for (double s : c.s_list) {
    if (!(s >= 0.0)) throw usage_error("--s values must be nonnegative");
  }
  if (c.n && (*c.n < min_nystrom_order || *c.n > max_nystrom_order)) {
    throw usage_error("--n must be 'auto' or an integer in [8, 400]");
  }
  if (c.tol && !(*c.tol > 0.0)) throw usage_error("--tol must be positive");
  if (!(c.psi_R > 0.0)) throw usage_error("--psi-R must be positive");
  static const std::vector<std::string> formulas = {"theorem1", "theorem2", "dyson",
                                                    "logsasy",  "logxasy",  "fcet"};
  if (c.command == Command::verify &&
      std::find(formulas.begin(), formulas.end(), c.formula) == formulas.end()) {
    throw usage_error("unknown formula '" + c.formula + "'");
  }
  if (c.command == Command::dump && c.what != "hm" && c.what != "psi" && c.what != "kernel") {
    throw usage_error("unknown dump target '" + c.what + "' (expected hm, psi or kernel)");
  }
  const bool needs_s = c.command == Command::det ||
                       (c.command == Command::verify && c.formula != "fcet") ||
                       (c.command == Command::dump && c.what == "kernel");
  if (needs_s && c.s_list.empty()) throw usage_error("--s is required");
}

/// Parses argv into a RunConfig. Returns nullopt when help was printed.
inline std::optional<RunConfig> parse_args(const std::vector<std::string>& args,
                                           std::ostream& out) {
  CLI::App app{"Fredholm determinants of sine, cubic-sine and Painleve II kernels", "gapdet"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string s_text, n_text = "auto", format = "csv", window, tol_text;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--kernel", cfg.kernel, "sine | csin | pii");
    sub->add_option("--x", cfg.x, "kernel parameter x");
    sub->add_option("--t", cfg.t, "cubic-sine deformation t in [0, 1]");
    sub->add_option("--s", s_text, "comma-separated half-widths");
    sub->add_option("--n", n_text, "quadrature order or 'auto'");
    sub->add_option("--format", format, "csv | json");
    sub->add_option("--out", cfg.output_path, "output file (default stdout)");
    sub->add_option("--tol", tol_text, "verification tolerance");
    sub->add_option("--hm-window", window, "Hastings-McLeod window L,R,H");
    sub->add_option("--psi-R", cfg.psi_R, "radius of the Psi start point i R");
  };
  CLI::App* det = app.add_subcommand("det", "tabulate log det(I - K) over s");
  CLI::App* verify = app.add_subcommand("verify", "compare determinants with asymptotics");
  CLI::App* dump = app.add_subcommand("dump", "dump u, Psi or kernel matrices");
  common(det);
  common(verify);
  common(dump);
  verify->add_option("--formula", cfg.formula,
                     "theorem1 | theorem2 | dyson | logsasy | logxasy | fcet");
  dump->add_option("--what", cfg.what, "hm | psi | kernel");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw usage_error(e.what());
  }

  if (det->parsed()) cfg.command = Command::det;
  if (verify->parsed()) cfg.command = Command::verify;
  if (dump->parsed()) cfg.command = Command::dump;
  if (!s_text.empty()) cfg.s_list = parse_real_list(s_text, "--s");
  if (n_text != "auto") {
    try {
      std::size_t used = 0;
      cfg.n = std::stoi(n_text, &used);
      if (used != n_text.size()) throw std::invalid_argument(n_text);
    } catch (const std::exception&) {
      throw usage_error("--n must be 'auto' or an integer");
    }
  }
  if (format == "csv") {
    cfg.format = OutputFormat::csv;
  } else if (format == "json") {
    cfg.format = OutputFormat::json;
  } else {
    throw usage_error("--format must be csv or json");
  }
  if (!tol_text.empty()) cfg.tol = parse_real_list(tol_text, "--tol").front();
  if (!window.empty()) {
    const auto w = parse_real_list(window, "--hm-window");
    if (w.size() != 3) throw usage_error("--hm-window expects L,R,H");
    cfg.hm_window = {w[0], w[1], w[2]};
  }
  validate(cfg);
  return cfg;
}

// ---------------------------------------------------------------- output

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(const Table& t, std::ostream& os) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      std::visit(
          [&os](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              os << format_real(v);
            } else if constexpr (std::is_same_v<V, bool>) {
              os << (v ? "true" : "false");
            } else {
              os << v;
            }
          },
          row[i]);
    }
    os << '\n';
  }
}

inline void write_json(const Table& t, std::ostream& os) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
    }
    rows.push_back(std::move(obj));
  }
  os << rows.dump(2) << '\n';
}

inline void write_table(const Table& t, OutputFormat f, std::ostream& os) {
  if (f == OutputFormat::csv) {
    write_csv(t, os);
  } else {
    write_json(t, os);
  }
}

// ---------------------------------------------------------------- commands

inline std::shared_ptr<const HastingsMcLeodSolution> hm_solution(const RunConfig& c) {
  const auto& w = c.hm_window;
  if (w[0] == default_hm_left && w[1] == default_hm_right && w[2] == default_hm_step) {
    return default_hm_solution();
  }
  return std::make_shared<const HastingsMcLeodSolution>(solve_hm(w[0], w[1], w[2]));
}

inline PsiOptions psi_options(const RunConfig& c) {
  PsiOptions o;
  o.radius = c.psi_R;
  return o;
}

inline KernelSpec make_kernel(const RunConfig& c, const std::string& name) {
  if (name == "sine") return SineKernel{c.x};
  if (name == "csin") return CubicSineKernel{c.t, c.x};
  if (name == "pii") return PainleveKernel{PsiField::from_solution(hm_solution(c), c.x, psi_options(c))};
  throw usage_error("unknown kernel '" + name + "'");
}

inline DetEvaluation evaluate(const KernelSpec& k, double s, const RunConfig& c) {
  return c.n ? log_det(k, s, *c.n) : log_det_converged(k, s);
}

inline Table cmd_det(const RunConfig& c) {
  const KernelSpec k = make_kernel(c, c.kernel);
  Table t{{"s", "n", "log_det", "converged", "pivot_min"}, {}};
  for (double s : c.s_list) {
    const DetEvaluation e = evaluate(k, s, c);
    t.rows.push_back({s, e.n, e.log_det.to_double(), e.converged, e.pivot_min.to_double()});
  }
  return t;
}

/// Default tolerance of a verify row.
inline double default_tolerance(const std::string& formula, double s) {
  if (formula == "dyson") return 0.25 / s;
  if (formula == "logsasy" || formula == "logxasy") return 0.5;
  return 1.0;
}

inline Table cmd_verify(const RunConfig& c, bool* all_pass) {
  Table t{{"s", "computed", "predicted", "abs_err", "pass"}, {}};
  bool ok = true;
  auto add = [&](double s, double computed, double predicted, bool pass) {
    t.rows.push_back({s, computed, predicted, std::abs(computed - predicted), pass});
    ok = ok && pass;
  };
  const std::string& f = c.formula;
  if (f == "fcet") {
    // Exponent of -log det ~ C s^p; the expected band is [5.5, 6.3] around 6.
    RunConfig pc = c;
    const std::vector<double> s_list =
        c.s_list.empty() ? std::vector<double>{1.6, 1.8, 2.0, 2.1} : c.s_list;
    const KernelSpec k = make_kernel(pc, "pii");
    std::vector<std::pair<double, double>> samples;
    for (double s : s_list) samples.emplace_back(s, evaluate(k, s, c).log_det.to_double());
    const PowerLawFit fit = fcet_fit(samples);
    const bool pass = c.tol ? std::abs(fit.exponent - 6.0) <= *c.tol
                            : fit.exponent >= 5.5 && fit.exponent <= 6.3;
    add(s_list.back(), fit.exponent, 6.0, pass);
  } else if (f == "dyson" || f == "theorem2" || f == "theorem1") {
    const std::string name = f == "dyson" ? "sine" : f == "theorem2" ? "csin" : "pii";
    const KernelSpec k = make_kernel(c, name);
    for (double s : c.s_list) {
      const double computed = evaluate(k, s, c).log_det.to_double();
      double predicted = 0.0;
      if (f == "dyson") {
        predicted = dyson_sine_prediction(s, c.x).value;
      } else if (f == "theorem2") {
        predicted = theorem2_prediction(s, c.x).value;
      } else {
        predicted = theorem1_prediction(s, c.x, *std::get<PainleveKernel>(k).field->solution()).value;
      }
      add(s, computed, predicted,
          std::abs(computed - predicted) <= c.tol.value_or(default_tolerance(f, s)));
    }
  } else {
    const KernelSpec k = make_kernel(c, c.kernel == "sine" ? "pii" : c.kernel);
    for (double s : c.s_list) {
      double computed = 0.0, predicted = 0.0;
      if (f == "logsasy") {
        computed = dlogdet_ds(k, s, 1e-3);
        predicted = logsasy_prediction(s, c.x);
      } else {
        computed = dlogdet_dx(k, s, 1e-3);
        predicted = logxasy_prediction(s, c.x, hm_solution(c)->v_at(c.x));
      }
      add(s, computed, predicted,
          std::abs(computed - predicted) <= c.tol.value_or(default_tolerance(f, s)));
    }
  }
  if (all_pass) *all_pass = ok;
  return t;
}

inline Table cmd_dump(const RunConfig& c) {
  Table t;
  if (c.what == "hm") {
    const auto sol = hm_solution(c);
    t.columns = {"x", "u", "u_x", "v"};
    for (std::size_t i = 0; i < sol->size(); ++i) {
      t.rows.push_back({sol->grid_x(i), sol->u()[i], sol->u_x()[i], sol->v()[i]});
    }
  } else if (c.what == "psi") {
    const auto field = PsiField::from_solution(hm_solution(c), c.x, psi_options(c));
    const double half = c.s_list.empty() ? 1.0 : c.s_list.front();
    if (!(half > 0.0 && half <= 4.0)) throw usage_error("dump psi: --s must lie in (0, 4]");
    t.columns = {"lambda",   "re_psi11", "im_psi11",          "re_psi21",
                 "im_psi21", "abs_phi1", "abs_phi1_minus_1", "abs_phi2_plus_i_e2itheta"};
    constexpr int points = 101;
    for (int i = 0; i < points; ++i) {
      const double l = -half + 2.0 * half * i / (points - 1);
      const PhaseExtractedColumn col = field->column(l);
      const cplx p11 = col.psi11(), p21 = col.psi21();
      const cplx ref2 = -I_unit * std::exp(2.0 * I_unit * col.theta);
      t.rows.push_back({l, p11.real(), p11.imag(), p21.real(), p21.imag(), std::abs(col.phi1),
                        std::abs(col.phi1 - 1.0), std::abs(col.phi2 - ref2)});
    }
  } else {
    const KernelSpec k = make_kernel(c, c.kernel);
    const double s = c.s_list.front();
    const int n = c.n.value_or(16);
    const auto rule = gauss_legendre_cached(n);
    const SquareMatrix<double> a = kernel_matrix(k, s, n);
    t.columns = {"i", "j", "lambda", "mu", "weighted_kernel"};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        t.rows.push_back({i, j, s * rule->nodes[static_cast<std::size_t>(i)].to_double(),
                          s * rule->nodes[static_cast<std::size_t>(j)].to_double(),
                          a(static_cast<std::size_t>(i), static_cast<std::size_t>(j))});
      }
    }
  }
  return t;
}

/// Runs a parsed configuration and maps failures to exit codes.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    Table table;
    bool pass = true;
    switch (c.command) {
      case Command::det: table = cmd_det(c); break;
      case Command::verify: table = cmd_verify(c, &pass); break;
      case Command::dump: table = cmd_dump(c); break;
    }
    if (c.output_path.empty()) {
      write_table(table, c.format, out);
    } else {
      std::ofstream file(c.output_path, std::ios::binary);
      if (!file) throw io_error("cannot open '" + c.output_path + "' for writing");
      write_table(table, c.format, file);
      file.flush();
      if (!file) throw io_error("write to '" + c.output_path + "' failed");
    }
    return pass ? exit_ok : exit_verify_failed;
  } catch (const usage_error& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const range_error& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const io_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return exit_io;
  } catch (const std::exception& e) {
    err << "numerical integrity error: " << e.what() << '\n';
    return exit_integrity;
  }
}

/// Full entry point: parse, then run.
inline int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_args(args, out);
  } catch (const usage_error& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  }
  if (!cfg) return exit_ok;
  return run(*cfg, out, err);
}

}  // namespace gapdet::cli
