#include "thinbend/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace thinbend::io {

namespace {

int significant_digits(std::string_view s) {
  int count = 0;
  bool leading = true;
  for (char c : s) {
    if (c == 'e' || c == 'E') break;
    if (c < '0' || c > '9') continue;
    if (leading && c == '0') continue;
    leading = false;
    ++count;
  }
  // Trailing zeros of an integer mantissa are not significant.
  return std::max(count, 1);
}

void check_precision(int precision) {
  if (precision < kMinPrecision || precision > kMaxPrecision) {
    throw ConfigError("precision must lie in [" + std::to_string(kMinPrecision) + ", " +
                      std::to_string(kMaxPrecision) + "]");
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

struct ArmCuts {
  double y_low;    // narrow arm ends at y = y_low
  double d_high;   // wide arm ends at p.d = d_high
};

ArmCuts arm_cuts(const BendGeometry& g, double extent) {
  const CornerGeometry cg = corners(g);
  return {std::min(cg.E.imag(), 0.0) - extent * g.k,
          std::max(dot(cg.E, cg.direction), 0.0) + extent * g.h};
}

// Log-scaled colour ramp from blue (low) through white to red (high).
std::string ramp(double value, double reference) {
  const double t = std::clamp(std::log10(std::max(value, 1e-300) / reference) / 2.0, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (t >= 0) {
    g = b = static_cast<int>(std::lround(255.0 * (1.0 - t)));
  } else {
    r = g = static_cast<int>(std::lround(255.0 * (1.0 + t)));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string format_number(double value, int precision) {
  check_precision(precision);
  if (!std::isfinite(value)) {
    if (std::isnan(value)) return "nan";
    return value > 0 ? "inf" : "-inf";
  }
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  std::string shortest(buf, res.ptr);
  if (significant_digits(shortest) <= precision) return shortest;
  res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

void write_csv(const CsvTable& table, std::ostream& out, int precision) {
  check_precision(precision);
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw std::invalid_argument("CSV row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_number(row[i], precision);
    }
    out << '\n';
  }
}

void write_csv_file(const CsvTable& table, const std::string& path, int precision) {
  check_precision(precision);
  std::ofstream f = open_output(path);
  write_csv(table, f, precision);
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV input");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.columns.push_back(trim(cell));
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const std::string c = trim(cell);
      double v = 0.0;
      if (c == "nan") {
        v = std::numeric_limits<double>::quiet_NaN();
      } else if (c == "inf" || c == "-inf") {
        v = c[0] == '-' ? -HUGE_VAL : HUGE_VAL;
      } else {
        const auto r = std::from_chars(c.data(), c.data() + c.size(), v);
        if (r.ec != std::errc() || r.ptr != c.data() + c.size()) {
          throw IoError("malformed CSV number '" + c + "'");
        }
      }
      row.push_back(v);
    }
    if (row.size() != t.columns.size()) throw IoError("CSV row width mismatch");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<cplx> conductor_outline(const ConformalMap& map, double extent, int arc_samples) {
  const BendGeometry& g = map.geometry();
  const CornerGeometry cg = corners(g);
  const ArmCuts cut = arm_cuts(g, extent);
  std::vector<cplx> pts;
  // Clockwise: outer wall of the narrow arm upward, B, outer wall of
  // the wide arm, across its end, back along the inner wall to the corner.
  pts.emplace_back(0.0, cut.y_low);
  pts.push_back(cg.B);
  pts.push_back(cut.d_high * cg.direction);
  pts.push_back(-g.h * cg.normal + cut.d_high * cg.direction);
  if (map.is_rounded()) {
    const auto [lo, hi] = map.rounded_interval();
    for (int i = 0; i <= arc_samples; ++i) {
      // hi -> lo walks the arc from the wide-arm side to the narrow-arm side.
      const double t = hi + (lo - hi) * i / arc_samples;
      pts.push_back(map.position(cplx(t, 0.0)));
    }
  } else {
    pts.push_back(cg.E);
  }
  pts.emplace_back(g.k, cut.y_low);
  return pts;
}

std::vector<std::vector<cplx>> clip_to_outline(const std::vector<cplx>& polyline,
                                               const ConformalMap& map, double extent) {
  const BendGeometry& g = map.geometry();
  const CornerGeometry cg = corners(g);
  const ArmCuts cut = arm_cuts(g, extent);
  auto inside = [&](cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return z.imag() >= cut.y_low && dot(z, cg.direction) <= cut.d_high;
  };
  std::vector<std::vector<cplx>> out;
  std::vector<cplx> cur;
  for (const cplx& z : polyline) {
    if (inside(z)) {
      cur.push_back(z);
    } else if (!cur.empty()) {
      if (cur.size() >= 2) out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (cur.size() >= 2) out.push_back(std::move(cur));
  return out;
}

void write_svg(const FigureSpec& fig, std::ostream& out, int precision) {
  check_precision(precision);
  if (fig.width_px <= 0 || fig.height_px <= 0 || !(fig.unit > 0.0)) {
    throw std::invalid_argument("figure canvas and unit must be positive");
  }
  auto finite = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
  auto extend = [&](cplx z) {
    if (!finite(z)) throw std::invalid_argument("figure coordinates must be finite");
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  };
  for (const cplx& z : fig.boundary) extend(z);
  for (const auto& line : fig.streamlines) for (const cplx& z : line) extend(z);
  for (const auto& c : fig.shading) extend(c.center);
  if (!(xmax >= xmin)) xmin = xmax = ymin = ymax = 0.0;
  const double u = fig.unit;
  const double span = std::max({(xmax - xmin) / u, (ymax - ymin) / u, 1e-12});
  const double margin = 0.05 * span;
  auto num = [&](double v) { return format_number(v, precision); };
  // SVG's y axis points down, so user y maps to -y.
  auto X = [&](double x) { return num(x / u); };
  auto Y = [&](double y) { return num(-y / u); };
  const double stroke = 0.004 * span;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fig.width_px << "\" height=\""
      << fig.height_px << "\" viewBox=\"" << num(xmin / u - margin) << ' ' << num(-ymax / u - margin)
      << ' ' << num((xmax - xmin) / u + 2 * margin) << ' ' << num((ymax - ymin) / u + 2 * margin)
      << "\" preserveAspectRatio=\"xMidYMid meet\">\n";
  out << "<desc>one user unit = " << num(u) << " length units</desc>\n";
  if (!fig.shading.empty()) {
    out << "<g id=\"shading\" stroke=\"none\">\n";
    for (const auto& c : fig.shading) {
      out << "<rect x=\"" << X(c.center.real() - 0.5 * c.width) << "\" y=\""
          << Y(c.center.imag() + 0.5 * c.height) << "\" width=\"" << num(c.width / u)
          << "\" height=\"" << num(c.height / u) << "\" fill=\"" << ramp(c.value, fig.shade_reference)
          << "\"/>\n";
    }
    out << "</g>\n";
  }
  if (!fig.streamlines.empty()) {
    out << "<g id=\"streamlines\" fill=\"none\" stroke=\"#1f4e9e\" stroke-width=\"" << num(stroke)
        << "\">\n";
    for (const auto& line : fig.streamlines) {
      out << "<polyline points=\"";
      for (std::size_t i = 0; i < line.size(); ++i) {
        out << (i ? " " : "") << X(line[i].real()) << ',' << Y(line[i].imag());
      }
      out << "\"/>\n";
    }
    out << "</g>\n";
  }
  if (!fig.boundary.empty()) {
    out << "<path id=\"outline\" fill=\"none\" stroke=\"#000000\" stroke-width=\"" << num(2 * stroke)
        << "\" d=\"";
    for (std::size_t i = 0; i < fig.boundary.size(); ++i) {
      out << (i ? " L " : "M ") << X(fig.boundary[i].real()) << ' ' << Y(fig.boundary[i].imag());
    }
    out << " Z\"/>\n";
  }
  if (!fig.legend.empty()) {
    std::string text;
    for (char c : fig.legend) {
      switch (c) {
        case '<': text += "&lt;"; break;
        case '>': text += "&gt;"; break;
        case '&': text += "&amp;"; break;
        default: text += c;
      }
    }
    out << "<text x=\"" << num(xmin / u) << "\" y=\"" << num(-ymax / u - 0.4 * margin)
        << "\" font-family=\"sans-serif\" font-size=\"" << num(0.5 * margin) << "\">" << text
        << "</text>\n";
  }
  out << "</svg>\n";
}

void write_svg_file(const FigureSpec& figure, const std::string& path, int precision) {
  check_precision(precision);
  std::ofstream f = open_output(path);
  write_svg(figure, f, precision);
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (out.count(key)) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file '" + path + "'");
  return parse_config(f);
}

void write_config(const std::map<std::string, std::string>& config, std::ostream& out) {
  for (const auto& [k, v] : config) out << k << " = " << v << '\n';
}

}  // namespace thinbend::io
