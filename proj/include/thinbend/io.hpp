// Output plumbing: CSV tables, hand-emitted SVG figures and the flat
// `key = value` configuration format used by the command-line tool.
#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "thinbend/sc_map.hpp"

namespace thinbend::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMinPrecision = 6;
inline constexpr int kMaxPrecision = 17;

/// Shortest decimal that round-trips at `precision` significant digits:
/// the shortest round-trip form if it needs no more digits, otherwise the
/// value rounded to `precision` digits. Locale independent.
std::string format_number(double value, int precision);

inline const std::vector<std::string> kMapColumns{"x", "y", "j"};
inline const std::vector<std::string> kProfileColumns{"s", "j", "s_over_l", "j_scaled"};
inline const std::vector<std::string> kSweepColumns{"rho",   "delta1",  "delta2",
                                                    "gamma", "j_corner", "j_corner_over_jinf"};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const CsvTable& table, std::ostream& out, int precision);
/// Throws IoError when the file cannot be written.
void write_csv_file(const CsvTable& table, const std::string& path, int precision);
CsvTable read_csv(std::istream& in);

struct ShadeCell {
  cplx center;
  double width = 0.0;
  double height = 0.0;
  double value = 0.0;  // density, shaded on a log scale relative to `shade_reference`
};

struct FigureSpec {
  int width_px = 800;
  int height_px = 800;
  double unit = 1.0;  // length of one user unit (normally k)
  std::vector<cplx> boundary;  // closed outline
  std::vector<std::vector<cplx>> streamlines;
  std::vector<ShadeCell> shading;
  double shade_reference = 1.0;
  std::string legend;
};

/// Closed conductor outline, including the rounded arc when the map has one.
/// The arms are cut `extent` arm widths past the bend.
std::vector<cplx> conductor_outline(const ConformalMap& map, double extent = 3.0,
                                    int arc_samples = 64);

/// Drops polyline points outside the outline's arm cuts; splits the line where
/// points are dropped.
std::vector<std::vector<cplx>> clip_to_outline(const std::vector<cplx>& polyline,
                                               const ConformalMap& map, double extent);

void write_svg(const FigureSpec& figure, std::ostream& out, int precision = 6);
void write_svg_file(const FigureSpec& figure, const std::string& path, int precision = 6);

/// Flat `key = value` lines; `#` starts a comment; blank lines are ignored.
std::map<std::string, std::string> parse_config(std::istream& in);
std::map<std::string, std::string> read_config_file(const std::string& path);
void write_config(const std::map<std::string, std::string>& config, std::ostream& out);

}  // namespace thinbend::io
