#pragma once

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "betanorm/distribution.hpp"
#include "betanorm/errors.hpp"
#include "betanorm/io.hpp"
#include "betanorm/modality.hpp"
#include "json.hpp"

// Command-line front end: argument parsing, command dispatch with the
// exit-code contract, and CSV/JSON emitters for grid sweeps and figure data.
namespace betanorm::cli {

using nlohmann::json;

enum class Command { eval, quantile, moments, modality, boundary, hazard, entropy, mgf, deviations,
                     measures, sample, figure };
enum class Output { json, csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitConvergence = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitInternal = 70;

inline constexpr std::string_view kCommandNames[] = {
    "eval", "quantile", "moments", "modality", "boundary", "hazard", "entropy", "mgf", "deviations",
    "measures", "sample", "figure"};

inline constexpr std::string_view kFigureNames[] = {"fig1a", "fig3",  "fig4a", "fig4b", "fig5",
                                                    "fig6",  "fig7a", "fig7b", "fig8"};

inline std::string_view to_string(Command c) { return kCommandNames[static_cast<int>(c)]; }

inline std::optional<Command> parse_command(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kCommandNames); ++i)
    if (kCommandNames[i] == s) return static_cast<Command>(i);
  return std::nullopt;
}

// Evenly spaced points start..stop inclusive.
struct Grid {
  double start = 0.0;
  double stop = 1.0;
  int count = 201;

  std::vector<double> points() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) return {start};
    for (int i = 0; i < count; ++i) out.push_back(start + (stop - start) * i / (count - 1));
    return out;
  }
};

// Parses "start:stop:count"; throws std::invalid_argument when malformed.
inline Grid parse_grid(const std::string& s) {
  const auto c1 = s.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
  if (c2 == std::string::npos || s.find(':', c2 + 1) != std::string::npos)
    throw std::invalid_argument("grid must be start:stop:count");
  std::size_t used = 0;
  Grid g;
  const std::string a = s.substr(0, c1), b = s.substr(c1 + 1, c2 - c1 - 1), n = s.substr(c2 + 1);
  g.start = std::stod(a, &used);
  if (used != a.size()) throw std::invalid_argument("grid: bad start");
  g.stop = std::stod(b, &used);
  if (used != b.size()) throw std::invalid_argument("grid: bad stop");
  g.count = std::stoi(n, &used);
  if (used != n.size()) throw std::invalid_argument("grid: bad count");
  if (g.count < 1 || !std::isfinite(g.start) || !std::isfinite(g.stop))
    throw std::invalid_argument("grid: count must be >= 1 and bounds finite");
  return g;
}

struct RunConfig {
  Command command = Command::eval;
  BnParams params{};
  bool alpha_given = false;
  bool beta_given = false;
  std::optional<Grid> grid;
  std::optional<Output> output;  // default depends on the command
  std::optional<int> trunc_n;
  std::optional<int> trunc_k;
  std::optional<std::uint64_t> seed;
  std::optional<double> at;
  std::optional<double> u;
  std::optional<int> order;
  std::string method;
  std::vector<double> gammas;
  std::optional<int> count;
  std::string figure;
  std::optional<double> tolerance;  // from BETANORM_TOL
};

// A command's outcome before serialization.
struct Outcome {
  json inputs = json::object();
  json result;
  json est_error;  // null when the method carries no estimate
  std::vector<std::string> columns;
  std::vector<std::vector<io::Cell>> rows;
};

namespace detail {

inline Settings settings_for(const RunConfig& c) {
  Settings s;
  if (c.tolerance) {
    s.quad.abs_tol = *c.tolerance;
    s.quad.rel_tol = *c.tolerance;
  }
  switch (c.command) {
    case Command::deviations:
      if (c.trunc_n) s.deviation_n = *c.trunc_n;
      if (c.trunc_k) s.deviation_k = *c.trunc_k;
      break;
    case Command::entropy:
      if (c.trunc_n) s.entropy_terms = *c.trunc_n;
      break;
    case Command::mgf:
      if (c.trunc_n) s.mgf_s_terms = s.mgf_r_terms = s.mgf_j_terms = s.mgf_nu_terms = *c.trunc_n;
      if (c.trunc_k) s.series_k = *c.trunc_k;
      break;
    default:
      if (c.trunc_n) s.series_n = *c.trunc_n;
      if (c.trunc_k) s.series_k = *c.trunc_k;
      break;
  }
  if (c.command == Command::moments && c.method == "pwm_sum" && c.trunc_n) s.pwm_terms = *c.trunc_n;
  return s;
}

inline std::vector<double> points_or(const RunConfig& c, double fallback) {
  if (c.grid) return c.grid->points();
  return {fallback};
}

inline std::vector<double> figure_grid(const RunConfig& c, double start, double stop) {
  return c.grid ? c.grid->points() : Grid{start, stop, 201}.points();
}

template <class E>
E pick(const std::string& name, std::initializer_list<std::pair<const char*, E>> table, E fallback) {
  if (name.empty()) return fallback;
  for (const auto& [key, value] : table)
    if (name == key) return value;
  std::string allowed;
  for (const auto& kv : table) allowed += (allowed.empty() ? "" : ", ") + std::string(kv.first);
  throw DomainError("unknown method '" + name + "' (expected one of: " + allowed + ")");
}

inline std::string shape_label(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline json critical_points_json(const modality::ModalityReport& r, const BnParams& p) {
  json pts = json::array();
  for (const auto& c : r.critical_points)
    pts.push_back({{"z", c.z}, {"x", p.mu + p.sigma * c.z}, {"kind", modality::to_string(c.kind)},
                   {"s_prime", c.s_prime}, {"is_mode", c.is_mode()}});
  return pts;
}

// --- commands --------------------------------------------------------------

inline Outcome cmd_eval(const RunConfig& c) {
  Outcome o;
  const BnParams& p = c.params;
  o.columns = {"x", "pdf", "cdf", "survival"};
  json arr = json::array();
  for (double x : points_or(c, c.at.value_or(0.0))) {
    const auto t = cdf_tails(p, x);
    const double f = pdf(p, x);
    arr.push_back({{"x", x}, {"pdf", io::number(f)}, {"cdf", t.lower}, {"survival", t.upper}});
    o.rows.push_back({x, f, t.lower, t.upper});
  }
  o.result = c.grid ? arr : arr[0];
  return o;
}

inline Outcome cmd_quantile(const RunConfig& c) {
  Outcome o;
  const Settings cfg = settings_for(c);
  const auto method = pick(c.method, {{"robust", QuantileMethod::robust}, {"series", QuantileMethod::series}},
                           QuantileMethod::robust);
  o.inputs["method"] = method == QuantileMethod::series ? "series" : "robust";
  o.columns = {"u", "quantile"};
  json arr = json::array();
  for (double u : points_or(c, c.u.value_or(0.5))) {
    const double q = quantile(c.params, u, method, cfg);
    arr.push_back({{"u", u}, {"quantile", q}});
    o.rows.push_back({u, q});
  }
  o.result = c.grid ? arr : arr[0];
  if (method == QuantileMethod::series) {
    o.inputs["trunc_n"] = cfg.series_n;
    o.inputs["trunc_k"] = cfg.series_k;
    if (!c.grid) o.result["coefficients"] = io::to_json(quantile_series_coeffs(c.params, cfg));
  }
  return o;
}

inline Outcome cmd_moments(const RunConfig& c) {
  Outcome o;
  const Settings cfg = settings_for(c);
  const auto method = pick(c.method,
                           {{"quadrature", MomentMethod::quadrature},
                            {"pwm_sum", MomentMethod::pwm_sum},
                            {"quantile_series", MomentMethod::quantile_series}},
                           MomentMethod::quadrature);
  const int smax = c.order.value_or(4);
  if (smax < 1) throw DomainError("moments: order must be >= 1");
  o.inputs["method"] = std::string(to_string(method));
  o.inputs["order"] = smax;
  o.columns = {"order", "value", "est_error"};
  json arr = json::array();
  double worst = 0.0;
  for (int s = 1; s <= smax; ++s) {
    const MomentReport m = moment(c.params, s, method, cfg);
    arr.push_back({{"order", s}, {"value", io::number(m.value)}, {"est_error", io::number(m.est_error)},
                   {"truncation", m.truncation}});
    o.rows.push_back({static_cast<double>(s), m.value, m.est_error});
    worst = std::max(worst, m.est_error);
  }
  o.result = arr;
  o.est_error = io::number(worst);
  return o;
}

inline Outcome cmd_modality(const RunConfig& c) {
  Outcome o;
  const BnParams& p = c.params;
  const auto r = modality::classify(p.alpha, p.beta);
  o.result = {{"verdict", modality::to_string(r.verdict)},
              {"critical_points", critical_points_json(r, p)},
              {"modes", r.modes()},
              {"in_bimodal_region", modality::bimodal_region_contains(p.alpha, p.beta)}};
  o.columns = {"z", "x", "kind"};
  for (const auto& cp : r.critical_points)
    o.rows.push_back({cp.z, p.mu + p.sigma * cp.z, std::string(modality::to_string(cp.kind))});
  return o;
}

inline Outcome cmd_boundary(const RunConfig& c) {
  Outcome o;
  std::vector<double> gammas = c.gammas;
  if (gammas.empty()) gammas = c.grid ? c.grid->points() : std::vector<double>{1e-6, 0.01, 0.05, 0.10, 0.15, 0.20};
  o.inputs["gammas"] = gammas;
  o.columns = {"gamma", "alpha_star", "z_star", "beta_star"};
  json arr = json::array();
  for (double g : gammas) {
    const auto a = modality::boundary_alpha_star(g);
    const auto b = modality::boundary_beta_star(g);
    arr.push_back({{"gamma", g}, {"alpha_star", a.alpha_star}, {"z_star", a.z_star}, {"beta_star", b.alpha_star}});
    o.rows.push_back({g, a.alpha_star, a.z_star, b.alpha_star});
  }
  o.result = arr;
  return o;
}

inline Outcome cmd_hazard(const RunConfig& c) {
  Outcome o;
  const BnParams& p = c.params;
  o.columns = {"x", "hazard"};
  json arr = json::array();
  for (double x : points_or(c, c.at.value_or(p.mu))) {
    const double h = hazard(p, x);
    arr.push_back({{"x", x}, {"hazard", h}});
    o.rows.push_back({x, h});
  }
  o.result = {{"values", arr},
              {"hazard_at_mu", hazard_at_mu(p)},
              {"right_slope", hazard_asymptote(p, HazardSide::right).slope_or_exponent},
              {"left_exponent", hazard_asymptote(p, HazardSide::left).slope_or_exponent}};
  return o;
}

inline Outcome cmd_entropy(const RunConfig& c) {
  Outcome o;
  const Settings cfg = settings_for(c);
  const auto method = pick(c.method, {{"series", EntropyMethod::series}, {"quadrature", EntropyMethod::quadrature}},
                           EntropyMethod::series);
  o.inputs["method"] = method == EntropyMethod::series ? "series" : "quadrature";
  const auto e = shannon_entropy(c.params, method, cfg);
  o.result = {{"entropy", e.value}};
  o.est_error = io::number(e.est_error);
  o.columns = {"entropy", "est_error"};
  o.rows.push_back({e.value, e.est_error});
  return o;
}

inline Outcome cmd_mgf(const RunConfig& c) {
  Outcome o;
  const Settings cfg = settings_for(c);
  const auto method = pick(c.method,
                           {{"series_quantile", MgfMethod::series_quantile},
                            {"series_phi_power", MgfMethod::series_phi_power},
                            {"quadrature", MgfMethod::quadrature}},
                           MgfMethod::series_quantile);
  o.inputs["method"] = std::string(to_string(method));
  o.columns = {"t", "mgf", "est_error"};
  json arr = json::array();
  double worst = 0.0;
  for (double t : points_or(c, c.at.value_or(0.5))) {
    const auto m = mgf(c.params, t, method, cfg);
    arr.push_back({{"t", t}, {"mgf", m.value}, {"est_error", io::number(m.est_error)}});
    o.rows.push_back({t, m.value, m.est_error});
    worst = std::max(worst, m.est_error);
  }
  o.result = c.grid ? arr : arr[0];
  o.est_error = io::number(worst);
  return o;
}

inline Outcome cmd_deviations(const RunConfig& c) {
  Outcome o;
  const Settings cfg = settings_for(c);
  const auto method = pick(c.method, {{"series", DeviationMethod::series}, {"quadrature", DeviationMethod::quadrature}},
                           DeviationMethod::series);
  o.inputs["method"] = method == DeviationMethod::series ? "series" : "quadrature";
  const auto d = mean_deviations(c.params, method, cfg);
  o.result = {{"delta1", d.delta1}, {"delta2", d.delta2}, {"mean", d.mean}, {"median", d.median}};
  o.est_error = io::number(d.est_error);
  o.columns = {"delta1", "delta2", "mean", "median", "est_error"};
  o.rows.push_back({d.delta1, d.delta2, d.mean, d.median, d.est_error});
  return o;
}

inline Outcome cmd_measures(const RunConfig& c) {
  Outcome o;
  const Settings cfg = settings_for(c);
  const BnParams& p = c.params;
  const double m1 = moment(p, 1, MomentMethod::quadrature, cfg).value;
  const double var = betanorm::detail::central_moment(p, 2, m1, cfg.quad);
  const double sk = skewness(p, cfg), ku = kurtosis(p, cfg), bw = bowley(p), mo = moors(p), md = median(p);
  o.result = {{"mean", m1}, {"variance", var}, {"skewness", sk}, {"kurtosis", ku},
              {"median", md}, {"bowley", bw}, {"moors", mo}};
  o.columns = {"mean", "variance", "skewness", "kurtosis", "median", "bowley", "moors"};
  o.rows.push_back({m1, var, sk, ku, md, bw, mo});
  return o;
}

inline Outcome cmd_sample(const RunConfig& c) {
  Outcome o;
  const int n = c.count.value_or(10);
  const std::uint64_t seed = c.seed.value_or(1);
  o.inputs["count"] = n;
  o.inputs["seed"] = seed;
  const auto xs = sample(c.params, n, seed);
  o.result = xs;
  o.columns = {"x"};
  for (double x : xs) o.rows.push_back({x});
  return o;
}

// --- figure data -----------------------------------------------------------

inline const std::vector<double>& fig4_shapes() {
  static const std::vector<double> v{0.15, 0.158896, 0.18, modality::kSymmetricCritical, 0.28};
  return v;
}

inline const std::vector<double>& fig7_shapes() {
  static const std::vector<double> v{0.125, 0.5, 0.75, 1.0, 5.0, 10.0};
  return v;
}

// Critical points of the standardized density along a grid of one shape.
inline void critical_rows(Outcome& o, double fixed, const std::vector<double>& grid, bool vary_alpha,
                          bool with_fixed) {
  for (double v : grid) {
    const double a = vary_alpha ? v : fixed, b = vary_alpha ? fixed : v;
    for (const auto& cp : modality::classify(a, b).critical_points) {
      std::vector<io::Cell> row;
      if (with_fixed) row.push_back(fixed);
      row.insert(row.end(), {v, cp.z, std::string(modality::to_string(cp.kind))});
      o.rows.push_back(std::move(row));
    }
  }
}

inline Outcome emit_figure(const RunConfig& c) {
  Outcome o;
  const Settings cfg = settings_for(c);
  const std::string& name = c.figure;
  o.inputs["figure"] = name;
  if (name == "fig1a") {
    // z of every critical point against alpha at fixed beta.
    const double beta = c.beta_given ? c.params.beta : 0.15;
    o.inputs["beta"] = beta;
    o.columns = {"alpha", "z", "kind"};
    critical_rows(o, beta, figure_grid(c, 0.005, 0.3), true, false);
  } else if (name == "fig3") {
    // Symmetric shapes alpha = beta.
    o.columns = {"alpha", "z", "kind"};
    for (double a : figure_grid(c, 0.005, 0.4))
      for (const auto& cp : modality::classify(a, a).critical_points)
        o.rows.push_back({a, cp.z, std::string(modality::to_string(cp.kind))});
  } else if (name == "fig4a") {
    o.columns = {"beta", "alpha", "z", "kind"};
    for (double b : fig4_shapes()) critical_rows(o, b, figure_grid(c, 0.005, 0.4), true, true);
  } else if (name == "fig4b") {
    o.columns = {"alpha", "beta", "z", "kind"};
    for (double a : fig4_shapes()) critical_rows(o, a, figure_grid(c, 0.005, 0.4), false, true);
  } else if (name == "fig5" || name == "fig6") {
    // Panel (a) varies alpha at beta in {2.5, 3.5}; panel (b) varies beta at
    // alpha in {2.5, 3.5}. The first column is the varied shape.
    const bool skew = name == "fig5";
    const std::string m = skew ? "skewness" : "kurtosis";
    auto measure = [&](double a, double b) { return skew ? skewness({a, b}, cfg) : kurtosis({a, b}, cfg); };
    o.columns = {"shape", m + "_vs_alpha_beta_2.5", m + "_vs_alpha_beta_3.5", m + "_vs_beta_alpha_2.5",
                 m + "_vs_beta_alpha_3.5"};
    for (double v : figure_grid(c, 0.25, 4.0))
      o.rows.push_back({v, measure(v, 2.5), measure(v, 3.5), measure(2.5, v), measure(3.5, v)});
  } else if (name == "fig7a" || name == "fig7b") {
    const bool vary_alpha = name == "fig7a";
    const std::string fixed = vary_alpha ? "beta" : "alpha";
    o.columns = {vary_alpha ? "alpha" : "beta"};
    for (double s : fig7_shapes()) o.columns.push_back("bowley_" + fixed + "_" + shape_label(s));
    for (double s : fig7_shapes()) o.columns.push_back("moors_" + fixed + "_" + shape_label(s));
    for (double v : figure_grid(c, 0.02, 4.0)) {
      std::vector<io::Cell> row{v};
      std::vector<io::Cell> moors_cells;
      for (double s : fig7_shapes()) {
        const BnParams p = vary_alpha ? BnParams(v, s) : BnParams(s, v);
        row.push_back(bowley(p));
        moors_cells.push_back(moors(p));
      }
      row.insert(row.end(), moors_cells.begin(), moors_cells.end());
      o.rows.push_back(std::move(row));
    }
  } else if (name == "fig8") {
    // Boundary of the bimodal region: the curve (alpha_boundary(g), g) and its
    // mirror (g, beta_boundary(g)), each computed on its own branch.
    o.columns = {"gamma", "alpha_boundary", "beta_boundary"};
    for (double g : figure_grid(c, 0.001, 0.214))
      o.rows.push_back(
          {g, modality::boundary_alpha_star(g).alpha_star, modality::boundary_beta_star(g).alpha_star});
  } else {
    throw std::invalid_argument("unknown figure '" + name + "'");
  }
  o.inputs["rows"] = o.rows.size();
  json rows = json::array();
  for (const auto& r : o.rows) {
    json jr = json::array();
    for (const auto& cell : r) {
      if (const auto* x = std::get_if<double>(&cell)) jr.push_back(io::number(*x));
      else jr.push_back(std::get<std::string>(cell));
    }
    rows.push_back(std::move(jr));
  }
  o.result = {{"columns", o.columns}, {"rows", rows}};
  return o;
}

inline Outcome dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::eval: return cmd_eval(c);
    case Command::quantile: return cmd_quantile(c);
    case Command::moments: return cmd_moments(c);
    case Command::modality: return cmd_modality(c);
    case Command::boundary: return cmd_boundary(c);
    case Command::hazard: return cmd_hazard(c);
    case Command::entropy: return cmd_entropy(c);
    case Command::mgf: return cmd_mgf(c);
    case Command::deviations: return cmd_deviations(c);
    case Command::measures: return cmd_measures(c);
    case Command::sample: return cmd_sample(c);
    case Command::figure: return emit_figure(c);
  }
  throw InternalError("dispatch: unknown command");
}

inline Output default_output(Command c) {
  return c == Command::boundary || c == Command::figure || c == Command::sample ? Output::csv : Output::json;
}

inline void report_error(std::ostream& err, const char* type, const std::exception& e, json extra = json::object()) {
  json j = {{"error", {{"type", type}, {"message", e.what()}}}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j["error"][it.key()] = it.value();
  err << j.dump() << '\n';
}

}  // namespace detail

// Executes one command. Output goes to `out`; errors are one JSON object on `err`.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == Command::figure) {
      bool known = false;
      for (auto f : kFigureNames) known = known || f == c.figure;
      if (!known) {
        err << "unknown figure '" << c.figure << "'; expected one of: fig1a fig3 fig4a fig4b fig5 fig6 fig7a "
               "fig7b fig8\n";
        return kExitUsage;
      }
    }
    c.params.validate();
    Outcome o = detail::dispatch(c);
    const Output fmt = c.output.value_or(detail::default_output(c.command));
    if (fmt == Output::csv) {
      io::CsvWriter w(out, o.columns);
      for (const auto& r : o.rows) w.row(r);
    } else {
      json inputs = {{"alpha", c.params.alpha}, {"beta", c.params.beta}, {"mu", c.params.mu},
                     {"sigma", c.params.sigma}};
      if (c.at) inputs["at"] = *c.at;
      if (c.u) inputs["u"] = *c.u;
      if (c.grid) inputs["grid"] = {c.grid->start, c.grid->stop, c.grid->count};
      for (auto it = o.inputs.begin(); it != o.inputs.end(); ++it) inputs[it.key()] = it.value();
      const json doc = {{"command", std::string(to_string(c.command))}, {"inputs", inputs},
                        {"result", o.result}, {"est_error", o.est_error}};
      out << doc.dump(2) << '\n';
    }
    return kExitOk;
  } catch (const ConvergenceError& e) {
    detail::report_error(err, "convergence_error", e,
                         {{"best_estimate", io::number(e.best_estimate())},
                          {"error_bound", io::number(e.error_bound())},
                          {"iterations", e.iterations()}});
    return kExitConvergence;
  } catch (const OverflowError& e) {
    detail::report_error(err, "overflow_error", e);
    return kExitDomain;
  } catch (const DomainError& e) {
    detail::report_error(err, "domain_error", e);
    return kExitDomain;
  } catch (const std::exception& e) {
    detail::report_error(err, "internal_error", e);
    return kExitInternal;
  }
}

// Parses argv into `c`. Returns an exit code when the program should stop
// (help printed: 0; usage error: 64), nullopt to proceed.
inline std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& c, std::ostream& out,
                                     std::ostream& err) {
  CLI::App app{"Beta-normal distribution analytics"};
  app.name("betanorm");
  std::string command, figure, grid, output, gammas;
  double alpha = 1.0, beta = 1.0, mu = 0.0, sigma = 1.0, at = 0.0, u = 0.5;
  int order = 0, trunc_n = 0, trunc_k = 0, count = 0;
  std::uint64_t seed = 0;
  app.add_option("command", command, "eval | quantile | moments | modality | boundary | hazard | entropy | mgf | "
                                     "deviations | measures | sample | figure")->required();
  app.add_option("name", figure, "figure name (figure command): fig1a fig3 fig4a fig4b fig5 fig6 fig7a fig7b fig8");
  auto* o_alpha = app.add_option("--alpha", alpha, "shape alpha > 0");
  auto* o_beta = app.add_option("--beta", beta, "shape beta > 0");
  app.add_option("--mu", mu, "location");
  app.add_option("--sigma", sigma, "scale > 0");
  auto* o_at = app.add_option("--at", at, "evaluation point x (eval, hazard) or argument t (mgf)");
  auto* o_u = app.add_option("--u", u, "probability for quantile");
  auto* o_order = app.add_option("--order", order, "highest moment order (moments)");
  app.add_option("--method", c.method, "evaluation method of the command");
  auto* o_grid = app.add_option("--grid", grid, "sweep start:stop:count");
  auto* o_output = app.add_option("--output", output, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  auto* o_seed = app.add_option("--seed", seed, "seed for sample");
  auto* o_tn = app.add_option("--trunc-n", trunc_n, "series truncation N");
  auto* o_tk = app.add_option("--trunc-k", trunc_k, "series truncation K");
  auto* o_gammas = app.add_option("--gammas", gammas, "comma-separated gammas (boundary)");
  auto* o_count = app.add_option("--count", count, "number of draws (sample)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }
  auto usage = [&](const std::string& msg) -> std::optional<int> {
    err << "usage error: " << msg << '\n' << app.help();
    return kExitUsage;
  };
  const auto cmd = parse_command(command);
  if (!cmd) return usage("unknown command '" + command + "'");
  if (!figure.empty() && *cmd != Command::figure) return usage("unexpected argument '" + figure + "'");
  if (*cmd == Command::figure && figure.empty()) return usage("figure requires a name");
  c.command = *cmd;
  c.figure = figure;
  // Shape validation happens in run() so that bad values map to a domain error.
  c.params.alpha = alpha;
  c.params.beta = beta;
  c.params.mu = mu;
  c.params.sigma = sigma;
  c.alpha_given = o_alpha->count() > 0;
  c.beta_given = o_beta->count() > 0;
  if (o_at->count()) c.at = at;
  if (o_u->count()) c.u = u;
  if (o_order->count()) c.order = order;
  if (o_seed->count()) c.seed = seed;
  if (o_count->count()) c.count = count;
  if (o_tn->count()) {
    if (trunc_n < 1) return usage("--trunc-n must be >= 1");
    c.trunc_n = trunc_n;
  }
  if (o_tk->count()) {
    if (trunc_k < 1) return usage("--trunc-k must be >= 1");
    c.trunc_k = trunc_k;
  }
  if (o_output->count()) c.output = output == "csv" ? Output::csv : Output::json;
  try {
    if (o_grid->count()) c.grid = parse_grid(grid);
    if (o_gammas->count()) {
      std::stringstream ss(gammas);
      std::string item;
      while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double g = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad gamma '" + item + "'");
        c.gammas.push_back(g);
      }
      if (c.gammas.empty()) throw std::invalid_argument("--gammas is empty");
    }
  } catch (const std::exception& e) {
    return usage(e.what());
  }
  if (const char* tol = std::getenv("BETANORM_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(tol, &end);
    if (end == tol || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
      return usage("BETANORM_TOL must be a positive number");
    c.tolerance = v;
  }
  return std::nullopt;
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  if (auto code = parse_args(argc, argv, c, out, err)) return *code;
  return run(c, out, err);
}

}  // namespace betanorm::cli
