#include "flagflow/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace flagflow::io {

namespace {

using nlohmann::ordered_json;

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v[0], v[1], v[2]}); }

// JSON has no infinity; non-finite values serialize as null.
ordered_json real_json(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string equilibria_json(const std::vector<compact::InfinityEquilibrium>& eqs) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  ordered_json list = ordered_json::array();
  for (const auto& e : eqs) {
    ordered_json ev = ordered_json::array();
    for (const auto& l : e.eigenvalues) ev.push_back({{"re", l.real()}, {"im", l.imag()}});
    list.push_back({{"chart", std::string(compact::to_string(e.chart))},
                    {"z", vec_json(e.z)},
                    {"direction", vec_json(e.direction)},
                    {"eigenvalues", ev},
                    {"stability", std::string(compact::to_string(e.stability))},
                    {"first_octant", e.first_octant}});
  }
  doc["equilibria"] = list;
  return doc.dump(2) + "\n";
}

std::string trajectory_csv(const dyn::Trajectory& tr) {
  std::ostringstream os;
  const bool charts = tr.compactified();
  os << "t,x1,x2,x3" << (charts ? ",chart,z1,z2,z3" : "") << "\n";
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    const auto& s = tr.samples[i];
    os << format_real(s.t) << ',' << format_real(s.state[0]) << ',' << format_real(s.state[1]) << ','
       << format_real(s.state[2]);
    if (charts) {
      const auto& c = tr.charts[i];
      os << ',' << compact::to_string(c.chart) << ',' << format_real(c.z[0]) << ',' << format_real(c.z[1]) << ','
         << format_real(c.z[2]);
    }
    os << "\n";
  }
  return os.str();
}

std::string lyapunov_csv(const std::vector<experiments::LineSpectrumRow>& rows) {
  std::ostringstream os;
  os << "line,chart,lambda1,lambda2,lambda3,t_used,converged\n";
  for (const auto& r : rows) {
    const auto& e = r.spectrum.exponents;
    os << r.line << ',' << compact::to_string(r.chart) << ',' << format_real(e[0]) << ',' << format_real(e[1]) << ','
       << format_real(e[2]) << ',' << format_real(r.spectrum.t_used) << ','
       << (r.spectrum.converged ? "true" : "false") << "\n";
  }
  return os.str();
}

std::string lyapunov_json(const std::vector<experiments::LineSpectrumRow>& rows) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  ordered_json list = ordered_json::array();
  for (const auto& r : rows) {
    const auto& e = r.spectrum.exponents;
    list.push_back({{"line", r.line},
                    {"chart", std::string(compact::to_string(r.chart))},
                    {"start", vec_json(r.start)},
                    {"lambda", {e[0], e[1], e[2]}},
                    {"t_used", r.spectrum.t_used},
                    {"converged", r.spectrum.converged},
                    {"base_diverged", r.spectrum.base_diverged}});
  }
  doc["rows"] = list;
  return doc.dump(2) + "\n";
}

std::string basin_json(const experiments::BasinReport& report) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["line"] = report.line;
  doc["epsilon"] = report.epsilon;
  doc["delta"] = report.delta;
  doc["samples"] = report.samples;
  doc["converged_fraction"] = report.converged_fraction;
  doc["max_line_deviation"] = report.max_line_deviation;
  ordered_json records = ordered_json::array();
  for (const auto& r : report.records) {
    records.push_back({{"index", r.index},
                       {"start", vec_json(r.start)},
                       {"end", vec_json(r.end)},
                       {"termination", std::string(dyn::to_string(r.termination))},
                       {"converged", r.converged},
                       {"max_deviation", r.max_deviation}});
  }
  doc["records"] = records;
  return doc.dump(2) + "\n";
}

std::string limit_json(const experiments::LimitClassification& c) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["limit_direction"] = vec_json(c.limit_direction);
  doc["einstein_residual_at_limit"] = real_json(c.einstein_residual_at_limit);
  doc["kind"] = std::string(experiments::to_string(c.kind));
  doc["termination"] = std::string(dyn::to_string(c.termination));
  doc["end_ball"] = vec_json(c.end_ball);
  return doc.dump(2) + "\n";
}

}  // namespace flagflow::io
