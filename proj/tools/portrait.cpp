#include "portrait.hpp"

#include <cmath>
#include <sstream>

#include <flagflow/serialize.hpp>
#include <flagflow/su3flag.hpp>

namespace flagflow::cli {

namespace {

// Orthographic view along (1,1,1); screen y points up along (-1,-1,2).
const Vec3 kRight = Vec3(1.0, -1.0, 0.0).normalized();
const Vec3 kUp = Vec3(-1.0, -1.0, 2.0).normalized();
const Vec3 kToward = Vec3(1.0, 1.0, 1.0).normalized();

struct Screen {
  double half;
  double scale;

  double x(const Vec3& u) const { return half + scale * u.dot(kRight); }
  double y(const Vec3& u) const { return half - scale * u.dot(kUp); }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* colour(compact::Stability s) {
  switch (s) {
    case compact::Stability::attractor: return "#1f77b4";
    case compact::Stability::repeller: return "#d62728";
    case compact::Stability::saddle: return "#ff7f0e";
    case compact::Stability::nonhyperbolic: return "#7f7f7f";
  }
  return "#000000";
}

}  // namespace

std::string portrait_svg(const PortraitInput& in) {
  const Screen sc{in.size / 2.0, 0.45 * in.size};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << in.size << "\" height=\"" << in.size
     << "\" viewBox=\"0 0 " << in.size << ' ' << in.size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<circle cx=\"" << num(sc.half) << "\" cy=\"" << num(sc.half) << "\" r=\"" << num(sc.scale)
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

  // Coordinate axes up to the equator.
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e[k] = 1.0;
    os << "<line x1=\"" << num(sc.half) << "\" y1=\"" << num(sc.half) << "\" x2=\"" << num(sc.x(e)) << "\" y2=\""
       << num(sc.y(e)) << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << num(sc.x(1.04 * e)) << "\" y=\"" << num(sc.y(1.04 * e))
       << "\" font-size=\"12\" font-family=\"sans-serif\">x" << k + 1 << "</text>\n";
  }

  if (in.draw_lines) {
    int j = 1;
    for (const auto& p : su3::invariant_directions()) {
      os << "<line x1=\"" << num(sc.half) << "\" y1=\"" << num(sc.half) << "\" x2=\"" << num(sc.x(p)) << "\" y2=\""
         << num(sc.y(p)) << "\" stroke=\"#555555\" stroke-dasharray=\"4 3\" stroke-width=\"1\">"
         << "<title>gamma" << j++ << "</title></line>\n";
    }
  }

  for (const auto& tr : in.trajectories) {
    if (tr.samples.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1\" points=\"";
    for (const auto& s : tr.samples) os << num(sc.x(s.state)) << ',' << num(sc.y(s.state)) << ' ';
    os << "\"/>\n";
    const Vec3& start = tr.samples.front().state;
    os << "<circle cx=\"" << num(sc.x(start)) << "\" cy=\"" << num(sc.y(start))
       << "\" r=\"2\" fill=\"#2ca02c\"/>\n";
  }

  for (const auto& e : in.equilibria) {
    const bool near = e.direction.dot(kToward) >= 0.0;
    os << "<circle cx=\"" << num(sc.x(e.direction)) << "\" cy=\"" << num(sc.y(e.direction)) << "\" r=\"6\" fill=\""
       << (near ? colour(e.stability) : "white") << "\" stroke=\"" << colour(e.stability)
       << "\" stroke-width=\"2\"><title>" << compact::to_string(e.stability) << " ("
       << io::format_real(e.direction[0]) << ", " << io::format_real(e.direction[1]) << ", "
       << io::format_real(e.direction[2]) << ")</title></circle>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace flagflow::cli
