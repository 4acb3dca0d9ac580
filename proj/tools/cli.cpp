#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include <flagflow/compactify.hpp>
#include <flagflow/experiments.hpp>
#include <flagflow/integrator.hpp>
#include <flagflow/lyapunov.hpp>
#include <flagflow/serialize.hpp>
#include <flagflow/su3flag.hpp>

#include "portrait.hpp"

namespace flagflow::cli {

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every key a config file or flag may set, with its built-in default.
// An empty default means "command-specific".
const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d{
      {"format", ""},
      {"out", ""},
      {"seed", "7"},
      {"threads", "0"},
      {"rel_tol", "1e-9"},
      {"abs_tol", "1e-12"},
      {"max_step", "0.5"},
      {"min_step", "1e-14"},
      {"t_end", ""},
      {"system", "poly"},
      {"mode", "ambient"},
      {"x0", ""},
      {"metric", "1,1,1"},
      {"blow_up_radius", "1e6"},
      {"switch_threshold", "0.3"},
      {"hysteresis", "0.05"},
      {"grid", "64"},
      {"box", "8"},
      {"newton_tol", "1e-12"},
      {"charts", "U1"},
      {"renorm_dt", "0.1"},
      {"t_max", "500"},
      {"transient", "10"},
      {"start_radius", "2"},
      {"line", "2"},
      {"epsilon", "0.05"},
      {"delta", "0.6"},
      {"samples", "200"},
      {"resolution", "400"},
      {"reparam_samples", "1000"},
      {"plot_samples", "3"},
      {"size", "640"},
  };
  return d;
}

class Settings {
public:
  Settings() : values_(defaults()) {}

  void set(const std::string& key, const std::string& value, const std::string& origin) {
    const auto it = values_.find(key);
    if (it == values_.end()) throw UsageError(origin + ": unknown key '" + key + "'");
    it->second = value;
  }

  const std::string& str(const std::string& key) const { return values_.at(key); }

  double real(const std::string& key) const {
    const auto& s = str(key);
    if (s == "inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageError(key + ": not a number: '" + s + "'");
    return v;
  }

  long long integer(const std::string& key) const {
    const auto& s = str(key);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageError(key + ": not an integer: '" + s + "'");
    return v;
  }

  std::uint64_t seed() const {
    const auto& s = str("seed");
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageError("seed: not an unsigned integer: '" + s + "'");
    return v;
  }

  double real_or(const std::string& key, double fallback) const { return str(key).empty() ? fallback : real(key); }

private:
  std::map<std::string, std::string> values_;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

void load_config(Settings& settings, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open '" + path + "'");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config: " + path + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    settings.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)), "config " + path);
  }
}

Vec3 parse_triple(const std::string& text, const std::string& what) {
  Vec3 v;
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const auto comma = text.find(',', pos);
    const bool last = i == 2;
    if (last != (comma == std::string::npos)) throw UsageError(what + ": expected three comma-separated numbers");
    const std::string item = trim(std::string_view(text).substr(pos, last ? std::string::npos : comma - pos));
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v[i]);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || !std::isfinite(v[i])) {
      throw UsageError(what + ": not a number: '" + item + "'");
    }
    pos = comma + 1;
  }
  return v;
}

std::vector<Vec3> parse_triples(const std::string& text, const std::string& what) {
  std::vector<Vec3> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto semi = text.find(';', pos);
    const std::string item = trim(std::string_view(text).substr(pos, semi == std::string::npos ? semi : semi - pos));
    if (!item.empty()) out.push_back(parse_triple(item, what));
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  return out;
}

std::vector<compact::ChartId> parse_charts(const std::string& text) {
  std::vector<compact::ChartId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto c = compact::parse_chart(trim(item));
    if (!c || (*c != compact::ChartId::U1 && *c != compact::ChartId::U2 && *c != compact::ChartId::U3)) {
      throw UsageError("charts: expected a list of U1, U2, U3");
    }
    out.push_back(*c);
  }
  if (out.empty()) throw UsageError("charts: empty list");
  return out;
}

std::string format_of(const Settings& s, std::string_view fallback) {
  const auto& f = s.str("format");
  if (f.empty()) return std::string(fallback);
  if (f != "csv" && f != "json") throw UsageError("format: expected csv or json");
  return f;
}

unsigned threads_of(const Settings& s) {
  const auto n = s.integer("threads");
  if (n < 0) throw UsageError("threads: must be >= 0");
  return static_cast<unsigned>(n);
}

dyn::IntegratorConfig integrator_of(const Settings& s, double default_t_end) {
  dyn::IntegratorConfig cfg;
  cfg.rel_tol = s.real("rel_tol");
  cfg.abs_tol = s.real("abs_tol");
  cfg.max_step = s.real("max_step");
  cfg.min_step = s.real("min_step");
  cfg.t_end = s.real_or("t_end", default_t_end);
  cfg.validate();
  return cfg;
}

dyn::CompactOptions compact_of(const Settings& s) {
  dyn::CompactOptions opts;
  opts.switch_threshold = s.real("switch_threshold");
  opts.hysteresis = s.real("hysteresis");
  if (!(opts.switch_threshold > 0.0 && opts.switch_threshold < 0.5)) {
    throw UsageError("switch_threshold: must lie in (0, 0.5)");
  }
  if (!(opts.hysteresis >= 0.0)) throw UsageError("hysteresis: must be >= 0");
  return opts;
}

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v[0], v[1], v[2]}); }

// --- subcommands -----------------------------------------------------------

struct Output {
  std::string text;
  int code = kOk;
};

Output cmd_ricci(const Settings& s) {
  const su3::MetricParams m(parse_triple(s.str("metric"), "metric"));
  const auto r = su3::ricci_components(m);
  const auto fit = su3::einstein_residual(m);
  if (format_of(s, "csv") == "csv") {
    return {"l12,l13,l23,r12,r13,r23,einstein_c,einstein_residual\n" + io::format_real(m.l12()) + "," +
            io::format_real(m.l13()) + "," + io::format_real(m.l23()) + "," + io::format_real(r.r12) + "," +
            io::format_real(r.r13) + "," + io::format_real(r.r23) + "," + io::format_real(fit.c) + "," +
            io::format_real(fit.residual) + "\n"};
  }
  ordered_json doc;
  doc["schema_version"] = io::kSchemaVersion;
  doc["metric"] = vec_json(m.vector());
  doc["ricci"] = vec_json(r.vector());
  doc["einstein_c"] = fit.c;
  doc["einstein_residual"] = fit.residual;
  return {doc.dump(2) + "\n"};
}

Output cmd_integrate(const Settings& s, std::ostream& err) {
  const std::string system = s.str("system");
  const std::string mode = s.str("mode");
  if (system != "poly" && system != "ricci") throw UsageError("system: expected poly or ricci");
  if (mode != "ambient" && mode != "compactified") throw UsageError("mode: expected ambient or compactified");
  if (s.str("x0").empty()) throw UsageError("integrate: --x0 is required");
  if (format_of(s, "csv") != "csv") throw UsageError("integrate: trajectories are written as csv only");
  const Vec3 x0 = parse_triple(s.str("x0"), "x0");
  const auto cfg = integrator_of(s, 10.0);

  dyn::Trajectory tr;
  if (system == "ricci") {
    if (mode == "compactified") throw UsageError("integrate: the compactified mode needs the polynomial system");
    (void)su3::MetricParams(x0);  // positivity check
    tr = dyn::integrate(su3::ricci_flow_field(), x0, cfg);
  } else if (mode == "ambient") {
    dyn::Events ev;
    const double radius = s.real("blow_up_radius");
    if (!(radius > 0.0)) throw UsageError("blow_up_radius: must be positive");
    if (std::isfinite(radius)) ev.blow_up_radius = radius;
    tr = dyn::integrate_with_events(su3::poly_flow_field(), x0, cfg, ev);
  } else {
    tr = dyn::integrate_compactified(experiments::compactified_ricci_field(), x0, cfg, compact_of(s));
  }

  Output o{io::trajectory_csv(tr)};
  const auto& last = tr.back();
  switch (tr.termination) {
    case dyn::Termination::blow_up_event:
      err << "integrate: finite-time blow-up, max |x_i| reached " << io::format_real(last.state.lpNorm<Eigen::Infinity>()) << " at t = "
          << io::format_real(last.t) << " before t_end = " << io::format_real(cfg.t_end) << "\n";
      o.code = kNumerical;
      break;
    case dyn::Termination::step_size_collapse:
    case dyn::Termination::step_limit:
      err << "integrate: " << dyn::to_string(tr.termination) << " at t = " << io::format_real(last.t) << "\n";
      o.code = kNumerical;
      break;
    default:
      break;
  }
  return o;
}

Output cmd_infinity(const Settings& s) {
  compact::EquilibriumSearchConfig cfg;
  cfg.grid = static_cast<int>(s.integer("grid"));
  cfg.box = s.real("box");
  cfg.newton_tol = s.real("newton_tol");
  cfg.threads = threads_of(s);
  cfg.validate();
  const auto eqs = compact::find_infinity_equilibria(experiments::compactified_ricci_field(), cfg);
  if (format_of(s, "json") == "json") return {io::equilibria_json(eqs)};
  std::string text = "chart,z1,z2,z3,d1,d2,d3,re1,re2,re3,stability,first_octant\n";
  for (const auto& e : eqs) {
    text += std::string(compact::to_string(e.chart));
    for (int i = 0; i < 3; ++i) text += "," + io::format_real(e.z[i]);
    for (int i = 0; i < 3; ++i) text += "," + io::format_real(e.direction[i]);
    for (const auto& l : e.eigenvalues) text += "," + io::format_real(l.real());
    text += "," + std::string(compact::to_string(e.stability)) + (e.first_octant ? ",true\n" : ",false\n");
  }
  return {text};
}

dyn::LyapunovConfig lyapunov_of(const Settings& s) {
  dyn::LyapunovConfig cfg;
  cfg.integrator = integrator_of(s, 10.0);
  cfg.renorm_dt = s.real("renorm_dt");
  cfg.t_max = s.real("t_max");
  cfg.transient = s.real("transient");
  cfg.validate();
  return cfg;
}

Output cmd_lyapunov(const Settings& s, std::ostream& err) {
  experiments::LineSpectraConfig cfg;
  cfg.lyapunov = lyapunov_of(s);
  cfg.charts = parse_charts(s.str("charts"));
  cfg.start_radius = s.real("start_radius");
  const auto rows = experiments::line_spectra(cfg);
  Output o{format_of(s, "csv") == "csv" ? io::lyapunov_csv(rows) : io::lyapunov_json(rows)};
  for (const auto& r : rows) {
    if (!r.spectrum.converged) {
      err << "lyapunov: gamma" << r.line << " in " << compact::to_string(r.chart) << " did not converge"
          << (r.spectrum.base_diverged ? " (base trajectory diverged)" : "") << "\n";
      o.code = kNumerical;
    }
  }
  return o;
}

struct Check {
  std::string group;
  std::string item;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

std::vector<Check> check_lines() {
  std::vector<Check> out;
  for (int j = 1; j <= 4; ++j) {
    const double d = su3::tangency_defect(su3::invariant_direction(su3::LineId{j}));
    out.push_back({"lines", "gamma" + std::to_string(j), d, 1e-13, d <= 1e-13});
  }
  return out;
}

std::vector<Check> check_einstein() {
  const double s = 2.0 + 2.0 * std::numbers::sqrt2;
  const std::array<Vec3, 4> metrics{Vec3(1.0, s, 1.0), Vec3(1.0, 1.0, 1.0), Vec3(1.0, 1.0, s), Vec3(s, 1.0, 1.0)};
  const double c_diag = 5.0 / 12.0;
  const double c_other = (2.0 - std::numbers::sqrt2) / 6.0;
  std::vector<Check> out;
  for (int j = 1; j <= 4; ++j) {
    const auto fit = su3::einstein_residual(su3::MetricParams(metrics[static_cast<std::size_t>(j - 1)]));
    const std::string name = "gamma" + std::to_string(j);
    out.push_back({"einstein", name + ".residual", fit.residual, 1e-12, fit.residual <= 1e-12});
    const double dc = std::abs(fit.c - (j == 2 ? c_diag : c_other));
    out.push_back({"einstein", name + ".constant", dc, 1e-12, dc <= 1e-12});
  }
  return out;
}

std::vector<Check> check_reparam(std::uint64_t seed, long long samples) {
  if (samples < 1) throw UsageError("reparam_samples: must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.1, 5.0);
  double worst = 0.0;
  for (long long i = 0; i < samples; ++i) {
    const su3::MetricParams m(dist(rng), dist(rng), dist(rng));
    const double scale = su3::poly_rhs(m.vector()).cwiseAbs().maxCoeff();
    worst = std::max(worst, su3::reparam_check(m) / std::max(scale, 1e-300));
  }
  return {{"reparam", "max_relative_error", worst, 1e-10, worst < 1e-10}};
}

std::vector<Check> check_scan(long long resolution) {
  if (resolution < 50) throw UsageError("resolution: must be >= 50");
  const auto a = experiments::no_interior_equilibria_scan(static_cast<int>(resolution));
  const auto b = experiments::no_interior_equilibria_scan(static_cast<int>(2 * resolution));
  const double change = std::abs(a.minimum - b.minimum) / a.minimum;
  return {{"scan", "minimum", a.minimum, 0.0, a.minimum > 0.0},
          {"scan", "relative_change_2x", change, 0.05, change < 0.05}};
}

Output cmd_verify(const Settings& s, bool lines, bool einstein, bool reparam, bool scan) {
  if (!lines && !einstein && !reparam && !scan) lines = einstein = reparam = scan = true;
  std::vector<Check> checks;
  auto append = [&checks](std::vector<Check> more) { checks.insert(checks.end(), more.begin(), more.end()); };
  if (lines) append(check_lines());
  if (einstein) append(check_einstein());
  if (reparam) append(check_reparam(s.seed(), s.integer("reparam_samples")));
  if (scan) append(check_scan(s.integer("resolution")));

  Output o;
  for (const auto& c : checks) {
    if (!c.pass) o.code = kVerify;
  }
  if (format_of(s, "csv") == "csv") {
    o.text = "check,item,value,threshold,pass\n";
    for (const auto& c : checks) {
      o.text += c.group + "," + c.item + "," + io::format_real(c.value) + "," + io::format_real(c.threshold) + "," +
                (c.pass ? "true" : "false") + "\n";
    }
  } else {
    ordered_json doc;
    doc["schema_version"] = io::kSchemaVersion;
    ordered_json list = ordered_json::array();
    for (const auto& c : checks) {
      list.push_back({{"check", c.group}, {"item", c.item}, {"value", c.value}, {"threshold", c.threshold},
                      {"pass", c.pass}});
    }
    doc["checks"] = list;
    doc["pass"] = o.code == kOk;
    o.text = doc.dump(2) + "\n";
  }
  return o;
}

experiments::BasinConfig basin_of(const Settings& s) {
  experiments::BasinConfig cfg;
  cfg.line = static_cast<int>(s.integer("line"));
  cfg.epsilon = s.real("epsilon");
  cfg.delta = s.real("delta");
  cfg.samples = static_cast<int>(s.integer("samples"));
  cfg.seed = s.seed();
  cfg.integrator = integrator_of(s, 200.0);
  cfg.compact = compact_of(s);
  cfg.threads = threads_of(s);
  cfg.validate();
  return cfg;
}

Output cmd_basin(const Settings& s) {
  if (format_of(s, "json") != "json") throw UsageError("basin: reports are written as json only");
  return {io::basin_json(experiments::cylinder_basin(basin_of(s)))};
}

Output cmd_limit(const Settings& s) {
  if (format_of(s, "json") != "json") throw UsageError("limit: reports are written as json only");
  const su3::MetricParams m(parse_triple(s.str("metric"), "metric"));
  experiments::LimitConfig cfg;
  cfg.integrator = integrator_of(s, 200.0);
  cfg.compact = compact_of(s);
  const auto c = experiments::classify_limit(m, cfg);
  Output o{io::limit_json(c)};
  if (c.termination != dyn::Termination::converged_to_point) o.code = kNumerical;
  return o;
}

Output cmd_plot(const Settings& s) {
  PortraitInput in;
  in.size = static_cast<int>(s.integer("size"));
  if (in.size < 64) throw UsageError("size: must be >= 64");
  compact::EquilibriumSearchConfig search;
  search.threads = threads_of(s);
  in.equilibria = compact::find_infinity_equilibria(experiments::compactified_ricci_field(), search);

  const auto cfg = integrator_of(s, 200.0);
  const auto opts = compact_of(s);
  std::vector<Vec3> starts = parse_triples(s.str("x0"), "x0");
  if (starts.empty()) {
    const auto per_line = s.integer("plot_samples");
    if (per_line < 0) throw UsageError("plot_samples: must be >= 0");
    for (int j = 1; j <= 4; ++j) {
      experiments::BasinConfig b;
      b.line = j;
      b.seed = s.seed();
      for (int i = 0; i < per_line; ++i) starts.push_back(compact::ball_unprojection(experiments::basin_start_point(b, i)));
    }
  }
  in.trajectories.resize(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    in.trajectories[i] =
        dyn::integrate_compactified(experiments::compactified_ricci_field(), starts[i], cfg, opts);
  }
  return {portrait_svg(in)};
}

// --- option plumbing -----------------------------------------------------------

class Parser {
public:
  // Registers a flag whose value lands in `key` if given on the command line.
  void bind(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(flag, [this, key](const std::string& v) { flags_[key] = v; }, help);
  }

  const std::map<std::string, std::string>& flags() const { return flags_; }

private:
  std::map<std::string, std::string> flags_;
};

void bind_integrator(Parser& p, CLI::App* cmd) {
  p.bind(cmd, "--rel-tol", "rel_tol", "relative tolerance of the Dormand-Prince 5(4) stepper");
  p.bind(cmd, "--abs-tol", "abs_tol", "absolute tolerance");
  p.bind(cmd, "--max-step", "max_step", "largest step size");
  p.bind(cmd, "--min-step", "min_step", "step size below which the run stops with step_size_collapse");
  p.bind(cmd, "--t-end", "t_end", "final time");
}

void bind_compact(Parser& p, CLI::App* cmd) {
  p.bind(cmd, "--switch-threshold", "switch_threshold", "leave a chart when its dividing coordinate drops below this");
  p.bind(cmd, "--hysteresis", "hysteresis", "margin another chart must win by before switching");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ricci flow of invariant metrics on the flag manifold SU(3)/T: Ricci components, the quadratic "
               "flow system, its Poincare compactification, equilibria at infinity, Lyapunov spectra and "
               "basin experiments.",
               "flagflow"};
  app.require_subcommand(1);
  app.fallthrough();
  Parser p;
  std::string config_path;
  app.add_option("--config", config_path, "plain-text 'key = value' file; '#' starts a comment");
  p.bind(&app, "--out", "out", "write the report to this file instead of stdout");
  p.bind(&app, "--format", "format", "csv or json (default depends on the command)");
  p.bind(&app, "--seed", "seed", "random seed (default: $FLAGFLOW_SEED, else 7)");
  p.bind(&app, "--threads", "threads", "worker threads, 0 = all cores");

  auto* ricci = app.add_subcommand(
      "ricci", "Ricci components r12, r13, r23 of the invariant metric (l12, l13, l23) and its Einstein fit");
  p.bind(ricci, "--metric", "metric", "l12,l13,l23 (all positive)");

  auto* integrate = app.add_subcommand(
      "integrate",
      "Trajectory of the Ricci flow: the geometric system l' = -2 Ric(l) (ricci) or the quadratic polynomial "
      "system (poly), in R^3 or on the Poincare ball; CSV output");
  p.bind(integrate, "--system", "system", "ricci or poly");
  p.bind(integrate, "--mode", "mode", "ambient or compactified (poly only)");
  p.bind(integrate, "--x0", "x0", "initial point a,b,c; non-positive entries only with --system poly");
  p.bind(integrate, "--blow-up-radius", "blow_up_radius", "ambient poly runs stop when max |x_i| reaches this ('inf' = off)");
  bind_integrator(p, integrate);
  bind_compact(p, integrate);

  auto* infinity = app.add_subcommand(
      "infinity", "Singularities at infinity of the compactified quadratic system with Jacobian eigenvalues and "
                  "attractor/repeller/saddle classification; JSON by default");
  p.bind(infinity, "--grid", "grid", "Newton seeds per axis per chart");
  p.bind(infinity, "--box", "box", "seeds cover [-box, box]^2");
  p.bind(infinity, "--newton-tol", "newton_tol", "Newton residual target");

  auto* lyapunov = app.add_subcommand(
      "lyapunov", "Lyapunov exponents of the compactified flow along the four invariant Einstein lines "
                  "gamma_1..gamma_4 (Benettin / Gram-Schmidt); CSV by default");
  p.bind(lyapunov, "--charts", "charts", "comma-separated subset of U1,U2,U3");
  p.bind(lyapunov, "--renorm-dt", "renorm_dt", "time between re-orthonormalizations");
  p.bind(lyapunov, "--t-max", "t_max", "hard stop of the averaging run");
  p.bind(lyapunov, "--transient", "transient", "discarded spin-up time");
  p.bind(lyapunov, "--start-radius", "start_radius", "base point is radius * p'_j mapped to the chart");
  bind_integrator(p, lyapunov);

  bool v_lines = false, v_einstein = false, v_reparam = false, v_scan = false;
  auto* verify = app.add_subcommand(
      "verify", "Checks: invariant Einstein lines, Einstein constants, the reparametrization identity between the "
                "geometric and quadratic systems, and the no-interior-equilibria scan; exit 3 on failure");
  verify->add_flag("--lines", v_lines, "tangency defect of the four invariant rays");
  verify->add_flag("--einstein", v_einstein, "Einstein residuals and constants on the four rays");
  verify->add_flag("--reparam", v_reparam, "poly_rhs = 12 l12 l13 l23 Ric on random metrics");
  verify->add_flag("--scan", v_scan, "positive minimum of |poly_rhs| over the octant of the unit sphere");
  p.bind(verify, "--resolution", "resolution", "scan lattice subdivisions (also runs 2x)");
  p.bind(verify, "--reparam-samples", "reparam_samples", "random metrics for --reparam");

  auto* basin = app.add_subcommand(
      "basin", "Cylinder basin experiment: points within epsilon of the invariant line gamma_j, integrated on the "
               "Poincare ball, and whether they end at the singularity p_j at infinity; JSON");
  p.bind(basin, "--line", "line", "1..4");
  p.bind(basin, "--epsilon", "epsilon", "cylinder radius in ball coordinates");
  p.bind(basin, "--delta", "delta", "ambient exclusion radius around the origin");
  p.bind(basin, "--samples", "samples", "number of starting points");
  bind_integrator(p, basin);
  bind_compact(p, basin);

  auto* limit = app.add_subcommand(
      "limit", "Limit metric of the normalized flow from one metric: normal Einstein, Einstein or non-Einstein");
  p.bind(limit, "--metric", "metric", "l12,l13,l23 (all positive)");
  bind_integrator(p, limit);
  bind_compact(p, limit);

  auto* plot = app.add_subcommand(
      "plot", "Static SVG phase portrait of the Poincare ball seen along (1,1,1): singularities at infinity, the "
              "invariant Einstein lines and sample trajectories");
  p.bind(plot, "--x0", "x0", "starting points 'a,b,c;a,b,c;...' (default: samples around each line)");
  p.bind(plot, "--plot-samples", "plot_samples", "default starts per invariant line");
  p.bind(plot, "--size", "size", "image width and height in pixels");
  bind_integrator(p, plot);
  bind_compact(p, plot);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Settings s;
    if (const char* env = std::getenv("FLAGFLOW_SEED"); env != nullptr && *env != '\0') s.set("seed", env, "env");
    if (!config_path.empty()) load_config(s, config_path);
    for (const auto& [key, value] : p.flags()) s.set(key, value, "flag");

    Output o;
    if (ricci->parsed()) o = cmd_ricci(s);
    else if (integrate->parsed()) o = cmd_integrate(s, err);
    else if (infinity->parsed()) o = cmd_infinity(s);
    else if (lyapunov->parsed()) o = cmd_lyapunov(s, err);
    else if (verify->parsed()) o = cmd_verify(s, v_lines, v_einstein, v_reparam, v_scan);
    else if (basin->parsed()) o = cmd_basin(s);
    else if (limit->parsed()) o = cmd_limit(s);
    else o = cmd_plot(s);

    if (const auto& path = s.str("out"); !path.empty()) {
      std::ofstream file(path, std::ios::binary);
      if (!file || !(file << o.text)) {
        err << "flagflow: cannot write '" << path << "'\n";
        return kUsage;
      }
    } else {
      out << o.text;
    }
    return o.code;
  } catch (const UsageError& e) {
    err << "flagflow: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "flagflow: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "flagflow: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "flagflow: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "flagflow: numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace flagflow::cli
