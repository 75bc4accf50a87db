// Command-line front end: one task per invocation, CSV or SVG output.
//
//   thinbend_cli <task> [--key value ...] [--config file]
//
// Every flag has a config-file key of the same name (without the dashes);
// flags override the file. Exit codes: 0 success, 2 invalid configuration,
// 3 solver infeasible or not converged, 4 I/O failure.
#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "thinbend/density.hpp"
#include "thinbend/inverse.hpp"
#include "thinbend/io.hpp"
#include "thinbend/rounding.hpp"
#include "thinbend/sc_map.hpp"

namespace {

using thinbend::cplx;
using Config = std::map<std::string, std::string>;

enum ExitCode { kOk = 0, kConfig = 2, kInfeasible = 3, kIo = 4 };

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kTasks{"density", "map", "profile", "streamlines",
                                      "round-solve", "round-sweep", "round-max"};

struct KeySpec {
  const char* key;
  const char* help;
};

// Keys shared by the flags and the config file.
const std::vector<KeySpec> kKeys{
    {"alpha", "bend angle in degrees"},
    {"h", "wide-arm width"},
    {"k", "narrow-arm width"},
    {"J", "total current"},
    {"out", "output path ('-' for standard output)"},
    {"format", "csv | svg"},
    {"precision", "significant digits in [6, 17]"},
    {"at", "probe point x,y (density)"},
    {"rho", "rounding radius; rounds the corner for density/map/profile/streamlines"},
    {"rho-min", "smallest radius of a sweep"},
    {"rho-max", "largest radius of a sweep"},
    {"n", "number of samples (profile points, sweep radii)"},
    {"xmin", "map grid bound"},
    {"xmax", "map grid bound"},
    {"ymin", "map grid bound"},
    {"ymax", "map grid bound"},
    {"nx", "map grid resolution along x"},
    {"ny", "map grid resolution along y"},
    {"lines", "number of current lines"},
    {"samples", "points per current line"},
    {"extent", "arm length drawn past the bend, in arm widths"},
    {"spacing", "profile spacing: uniform | refined"},
    {"tol", "relative tolerance of round-max"},
    {"threads", "worker threads for map sampling (output order is fixed)"},
};

const Config kDefaults{
    {"alpha", "60"},   {"h", "2"},         {"k", "1"},       {"J", "1"},       {"out", "-"},
    {"precision", "10"}, {"nx", "41"},      {"ny", "41"},      {"lines", "9"},
    {"samples", "400"}, {"extent", "3"},   {"spacing", "uniform"}, {"tol", "1e-3"},
    {"threads", "1"},
};

double parse_double(const Config& c, const std::string& key) {
  const auto it = c.find(key);
  if (it == c.end()) throw thinbend::io::ConfigError("missing required setting '" + key + "'");
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != it->second.size() || !std::isfinite(v)) {
    throw thinbend::io::ConfigError("setting '" + key + "' is not a finite number: '" + it->second + "'");
  }
  return v;
}

int parse_int(const Config& c, const std::string& key) {
  const double v = parse_double(c, key);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw thinbend::io::ConfigError("setting '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

cplx parse_point(const Config& c, const std::string& key) {
  const auto it = c.find(key);
  if (it == c.end()) throw thinbend::io::ConfigError("missing required setting '" + key + "'");
  const auto comma = it->second.find(',');
  if (comma == std::string::npos) throw thinbend::io::ConfigError("setting '" + key + "' must be x,y");
  Config tmp{{"x", it->second.substr(0, comma)}, {"y", it->second.substr(comma + 1)}};
  return {parse_double(tmp, "x"), parse_double(tmp, "y")};
}

std::string num(double v, int precision) { return thinbend::io::format_number(v, precision); }

struct Run {
  Config cfg;
  std::string task;
  thinbend::NormalizedGeometry ng;
  thinbend::BendGeometry user;  // geometry as given (h may be < k)
  std::string out;
  std::string format;
  int precision = 10;

  [[nodiscard]] bool has(const std::string& key) const { return cfg.count(key) != 0; }
};

Run make_run(const Config& cfg) {
  Run r;
  r.cfg = cfg;
  const auto t = cfg.find("task");
  if (t == cfg.end()) throw thinbend::io::ConfigError("no task given");
  r.task = t->second;
  if (std::find(kTasks.begin(), kTasks.end(), r.task) == kTasks.end()) {
    throw thinbend::io::ConfigError("unknown task '" + r.task + "'");
  }
  r.user.alpha = thinbend::make_angle(parse_double(cfg, "alpha"));
  r.user.h = parse_double(cfg, "h");
  r.user.k = parse_double(cfg, "k");
  r.user.J = parse_double(cfg, "J");
  r.ng = thinbend::validate(r.user);
  r.out = cfg.at("out");
  r.precision = parse_int(cfg, "precision");
  if (r.precision < thinbend::io::kMinPrecision || r.precision > thinbend::io::kMaxPrecision) {
    throw thinbend::io::ConfigError("precision must lie in [6, 17]");
  }
  const bool figure_task = r.task == "streamlines";
  r.format = cfg.count("format") ? cfg.at("format") : (figure_task ? "svg" : "csv");
  if (r.format != "csv" && r.format != "svg") {
    throw thinbend::io::ConfigError("format must be csv or svg");
  }
  const bool svg_ok = r.task == "map" || r.task == "streamlines";
  if (r.format == "svg" && !svg_ok) {
    throw thinbend::io::ConfigError("task '" + r.task + "' only produces csv");
  }
  return r;
}

template <class Writer>
void emit(const Run& r, Writer&& write) {
  if (r.out == "-") {
    std::ostringstream buf;
    write(buf);
    std::cout << buf.str();
    std::cout.flush();
    return;
  }
  std::ofstream f(r.out, std::ios::binary | std::ios::trunc);
  if (!f) throw thinbend::io::IoError("cannot open '" + r.out + "' for writing");
  write(f);
  f.flush();
  if (!f) throw thinbend::io::IoError("failed writing '" + r.out + "'");
}

std::string geometry_text(const Run& r) {
  std::ostringstream s;
  s << "alpha=" << num(r.user.alpha.degrees(), 6) << " h=" << num(r.user.h, 6)
    << " k=" << num(r.user.k, 6) << " J=" << num(r.user.J, 6);
  return s.str();
}

// Summary goes to standard output unless the data itself does.
void summary(const Run& r, const std::string& extra) {
  std::ostream& os = r.out == "-" ? std::cerr : std::cout;
  os << "task=" << r.task << ' ' << geometry_text(r) << " out=" << r.out
     << (extra.empty() ? "" : " ") << extra << '\n';
}

std::vector<double> sweep_row(const thinbend::RoundingSolution& s, const Run& r) {
  return {s.rho, s.delta1, s.delta2, s.gamma, s.j_corner, s.j_corner * r.user.k / r.user.J};
}

std::string infeasible_text(const thinbend::RoundingSolution& s, int precision) {
  return std::string("rho=") + num(s.rho, precision) + " residual=" + num(s.residual_norm, 6) +
         " status=" + thinbend::to_string(s.status);
}

// Map used by the field tasks: sharp, or rounded at --rho.
std::shared_ptr<const thinbend::ConformalMap> field_map(const Run& r, std::string& note) {
  const thinbend::BendGeometry& g = r.ng.geometry;
  if (!r.has("rho")) return std::make_shared<thinbend::SharpMap>(g);
  const double rho = parse_double(r.cfg, "rho");
  if (!(rho > 0.0)) throw thinbend::io::ConfigError("rho must be positive");
  const thinbend::RoundingSolution s = thinbend::solve_rounding(g, rho);
  if (!s.feasible) throw SolverFailure("rounding infeasible: " + infeasible_text(s, r.precision));
  note = "rho=" + num(rho, r.precision);
  return std::make_shared<thinbend::RoundedMap>(
      thinbend::rounded_constants(g, s.delta1, s.delta2, s.gamma));
}

int task_density(const Run& r) {
  std::string note;
  const auto map = field_map(r, note);
  const thinbend::InverseSolver solver(map);
  const cplx at_user = parse_point(r.cfg, "at");
  const cplx at = r.ng.to_internal(at_user);
  if (solver.locate(at, 1e-9) == thinbend::Region::Outside) {
    throw thinbend::io::ConfigError("point (" + num(at_user.real(), 6) + "," +
                                    num(at_user.imag(), 6) + ") lies outside the conductor");
  }
  const thinbend::DensityValue d = thinbend::density_at_point(at, solver, r.user.J);
  thinbend::io::CsvTable t{thinbend::io::kMapColumns, {{at_user.real(), at_user.imag(), d.j}}};
  emit(r, [&](std::ostream& os) { thinbend::io::write_csv(t, os, r.precision); });
  summary(r, (note.empty() ? "" : note + " ") + "j=" + num(d.j, r.precision) +
                 (d.divergent ? " divergent=1" : ""));
  return kOk;
}

int task_map(const Run& r) {
  std::string note;
  const auto map = field_map(r, note);
  const thinbend::InverseSolver solver(map);
  const double extent = parse_double(r.cfg, "extent");
  if (!(extent > 0.0)) throw thinbend::io::ConfigError("extent must be positive");
  // Default window: the outline's bounding box in the caller's frame.
  const std::vector<cplx> outline = thinbend::io::conductor_outline(*map, extent);
  double bx0 = HUGE_VAL, bx1 = -HUGE_VAL, by0 = HUGE_VAL, by1 = -HUGE_VAL;
  for (cplx z : outline) {
    const cplx u = r.ng.to_user(z);
    bx0 = std::min(bx0, u.real());
    bx1 = std::max(bx1, u.real());
    by0 = std::min(by0, u.imag());
    by1 = std::max(by1, u.imag());
  }
  Config c = r.cfg;
  auto bound = [&](const char* key, double dflt) { return c.count(key) ? parse_double(c, key) : dflt; };
  const double x0 = bound("xmin", bx0), x1 = bound("xmax", bx1);
  const double y0 = bound("ymin", by0), y1 = bound("ymax", by1);
  const int nx = parse_int(c, "nx"), ny = parse_int(c, "ny");
  if (nx < 2 || ny < 2) throw thinbend::io::ConfigError("grid resolutions must be at least 2");
  if (!(x1 > x0) || !(y1 > y0)) throw thinbend::io::ConfigError("grid bounds must satisfy min < max");
  const int threads = std::clamp(parse_int(c, "threads"), 1, 64);

  // Row-major: y outer, x inner. Rows are computed independently so the
  // result does not depend on the thread count. Outside points get j = nan.
  auto row = [&](int iy) {
    std::vector<std::vector<double>> out;
    const double y = y0 + (y1 - y0) * iy / (ny - 1);
    for (int ix = 0; ix < nx; ++ix) {
      const double x = x0 + (x1 - x0) * ix / (nx - 1);
      const cplx z = r.ng.to_internal(cplx(x, y));
      double j = std::numeric_limits<double>::quiet_NaN();
      if (solver.locate(z, 1e-9) != thinbend::Region::Outside) {
        try {
          const thinbend::DensityValue d = thinbend::density_at_point(z, solver, r.user.J);
          j = d.divergent ? HUGE_VAL : d.j;
        } catch (const thinbend::InversionError&) {
          throw SolverFailure("inversion failed at (" + num(x, 6) + "," + num(y, 6) + ")");
        }
      }
      out.push_back({x, y, j});
    }
    return out;
  };
  std::vector<std::vector<std::vector<double>>> rows(static_cast<std::size_t>(ny));
  for (int start = 0; start < ny; start += threads) {
    std::vector<std::future<std::vector<std::vector<double>>>> jobs;
    for (int iy = start; iy < std::min(ny, start + threads); ++iy) {
      jobs.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred, row, iy));
    }
    for (int i = 0; i < static_cast<int>(jobs.size()); ++i) rows[start + i] = jobs[i].get();
  }
  thinbend::io::CsvTable t{thinbend::io::kMapColumns, {}};
  for (auto& rr : rows) for (auto& v : rr) t.rows.push_back(std::move(v));
  std::size_t inside = 0;
  for (const auto& v : t.rows) inside += std::isfinite(v[2]) ? 1 : 0;

  if (r.format == "csv") {
    emit(r, [&](std::ostream& os) { thinbend::io::write_csv(t, os, r.precision); });
  } else {
    thinbend::io::FigureSpec fig;
    fig.unit = r.user.k;
    for (cplx z : outline) fig.boundary.push_back(r.ng.to_user(z));
    const double dx = (x1 - x0) / (nx - 1), dy = (y1 - y0) / (ny - 1);
    for (const auto& v : t.rows) {
      if (std::isfinite(v[2])) fig.shading.push_back({cplx(v[0], v[1]), dx, dy, v[2]});
    }
    fig.shade_reference = r.user.J / std::min(r.user.h, r.user.k);
    fig.legend = "current density, " + geometry_text(r);
    emit(r, [&](std::ostream& os) { thinbend::io::write_svg(fig, os, std::min(r.precision, 10)); });
  }
  summary(r, (note.empty() ? "" : note + " ") + "points=" + std::to_string(t.rows.size()) +
                 " inside=" + std::to_string(inside));
  return kOk;
}

int task_profile(const Run& r) {
  std::string note;
  const auto map = field_map(r, note);
  const thinbend::InverseSolver solver(map);
  const int n = r.has("n") ? parse_int(r.cfg, "n") : 200;
  if (n < 2) throw thinbend::io::ConfigError("n must be at least 2");
  const std::string sp = r.cfg.at("spacing");
  if (sp != "uniform" && sp != "refined") throw thinbend::io::ConfigError("spacing must be uniform or refined");
  const auto spec = thinbend::corner_profile(
      solver, n, sp == "refined" ? thinbend::Spacing::EndpointRefined : thinbend::Spacing::Uniform);
  const auto samples = thinbend::profile(spec, solver, r.user.J);
  thinbend::io::CsvTable t{thinbend::io::kProfileColumns, {}};
  for (const auto& s : samples) {
    // j_scaled uses the caller's k.
    t.rows.push_back({s.s, s.j, s.s_over_l, s.j * r.user.k / r.user.J});
  }
  emit(r, [&](std::ostream& os) { thinbend::io::write_csv(t, os, r.precision); });
  summary(r, (note.empty() ? "" : note + " ") + "samples=" + std::to_string(t.rows.size()) +
                 " l=" + num(std::abs(spec.end - spec.start), r.precision));
  return kOk;
}

int task_streamlines(const Run& r) {
  std::string note;
  const auto map = field_map(r, note);
  const int lines = parse_int(r.cfg, "lines");
  const int samples = parse_int(r.cfg, "samples");
  const double extent = parse_double(r.cfg, "extent");
  if (lines < 0) throw thinbend::io::ConfigError("lines must be non-negative");
  if (samples < 2) throw thinbend::io::ConfigError("samples must be at least 2");
  if (!(extent > 0.0)) throw thinbend::io::ConfigError("extent must be positive");
  std::vector<thinbend::Streamline> traced;
  if (lines > 0) traced = thinbend::trace_streamlines(lines, *map, r.user.J, {samples, extent});
  if (r.format == "csv") {
    thinbend::io::CsvTable t{{"line", "level", "x", "y"}, {}};
    for (std::size_t i = 0; i < traced.size(); ++i) {
      for (cplx z : traced[i].points) {
        const cplx u = r.ng.to_user(z);
        t.rows.push_back({static_cast<double>(i), traced[i].level, u.real(), u.imag()});
      }
    }
    emit(r, [&](std::ostream& os) { thinbend::io::write_csv(t, os, r.precision); });
  } else {
    thinbend::io::FigureSpec fig;
    fig.unit = r.user.k;
    for (cplx z : thinbend::io::conductor_outline(*map, extent)) fig.boundary.push_back(r.ng.to_user(z));
    for (const auto& sl : traced) {
      for (auto& piece : thinbend::io::clip_to_outline(sl.points, *map, extent)) {
        for (cplx& z : piece) z = r.ng.to_user(z);
        fig.streamlines.push_back(std::move(piece));
      }
    }
    fig.legend = "current lines, " + geometry_text(r) + (note.empty() ? "" : ", " + note);
    emit(r, [&](std::ostream& os) { thinbend::io::write_svg(fig, os, std::min(r.precision, 10)); });
  }
  summary(r, (note.empty() ? "" : note + " ") + "lines=" + std::to_string(traced.size()));
  return kOk;
}

int task_round_solve(const Run& r) {
  const double rho = parse_double(r.cfg, "rho");
  if (!(rho > 0.0)) throw thinbend::io::ConfigError("rho must be positive");
  const thinbend::RoundingSolution s = thinbend::solve_rounding(r.ng.geometry, rho);
  if (!s.feasible) throw SolverFailure("rounding infeasible: " + infeasible_text(s, r.precision));
  thinbend::io::CsvTable t{thinbend::io::kSweepColumns, {sweep_row(s, r)}};
  emit(r, [&](std::ostream& os) { thinbend::io::write_csv(t, os, r.precision); });
  summary(r, "rho=" + num(rho, r.precision) + " residual=" + num(s.residual_norm, 6) +
                 " j_corner=" + num(s.j_corner, r.precision));
  return kOk;
}

int task_round_sweep(const Run& r) {
  const double rho_max = parse_double(r.cfg, "rho-max");
  const int n = r.has("n") ? parse_int(r.cfg, "n") : 20;
  if (n < 2) throw thinbend::io::ConfigError("n must be at least 2");
  const double rho_min = r.has("rho-min") ? parse_double(r.cfg, "rho-min") : rho_max / n;
  if (!(rho_min > 0.0) || !(rho_max > rho_min)) {
    throw thinbend::io::ConfigError("sweep needs 0 < rho-min < rho-max");
  }
  const thinbend::SweepResult sw = thinbend::sweep(r.ng.geometry, rho_min, rho_max, n);
  if (sw.solutions.empty()) {
    throw SolverFailure("sweep has no feasible radius: " +
                        infeasible_text(*sw.first_infeasible, r.precision));
  }
  thinbend::io::CsvTable t{thinbend::io::kSweepColumns, {}};
  for (const auto& s : sw.solutions) t.rows.push_back(sweep_row(s, r));
  emit(r, [&](std::ostream& os) { thinbend::io::write_csv(t, os, r.precision); });
  std::string extra = "rows=" + std::to_string(t.rows.size());
  if (sw.first_infeasible) {
    extra += " truncated_at=" + num(sw.first_infeasible->rho, r.precision);
  }
  summary(r, extra);
  return kOk;
}

int task_round_max(const Run& r) {
  const double tol = parse_double(r.cfg, "tol");
  if (!(tol > 0.0) || tol >= 1.0) throw thinbend::io::ConfigError("tol must lie in (0, 1)");
  const thinbend::MaxRadiusResult m = thinbend::max_radius(r.ng.geometry, tol);
  if (!(m.rho_max > 0.0)) {
    throw SolverFailure("no feasible radius above 1e-6 k: " +
                        infeasible_text(*m.first_infeasible, r.precision));
  }
  thinbend::io::CsvTable t{thinbend::io::kSweepColumns, {sweep_row(m.last_feasible, r)}};
  emit(r, [&](std::ostream& os) { thinbend::io::write_csv(t, os, r.precision); });
  summary(r, "rho_max=" + num(m.rho_max, r.precision) + " solves=" + std::to_string(m.solves));
  return kOk;
}

void error_line(const std::string& kind, const std::string& message) {
  std::string m = message;
  std::replace(m.begin(), m.end(), '\n', ' ');
  std::replace(m.begin(), m.end(), '"', '\'');
  std::cerr << "error: kind=" << kind << " message=\"" << m << "\"\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Current density in bent thin-film conductors"};
  app.set_help_flag("--help", "print usage");  // -h would clash with the width flag --h
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::map<std::string, std::string> flags;
  for (const auto& spec : kKeys) {
    app.add_option("--" + std::string(spec.key), flags[spec.key], spec.help);
  }
  std::string config_path;
  std::string dump_path;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--dump-config", dump_path, "write the effective configuration to this path");
  std::vector<CLI::App*> subs;
  for (const auto& t : kTasks) subs.push_back(app.add_subcommand(t, "run the " + t + " task"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line("config", e.what());
    std::cerr << app.help();
    return kConfig;
  }

  Config cfg = kDefaults;
  try {
    if (!config_path.empty()) {
      for (const auto& [k, v] : thinbend::io::read_config_file(config_path)) {
        const bool known = k == "task" || std::any_of(kKeys.begin(), kKeys.end(),
                                                      [&](const KeySpec& s) { return k == s.key; });
        if (!known) throw thinbend::io::ConfigError("unknown config key '" + k + "'");
        cfg[k] = v;
      }
    }
  } catch (const thinbend::io::IoError& e) {
    error_line("io", e.what());
    return kIo;
  } catch (const std::exception& e) {
    error_line("config", e.what());
    return kConfig;
  }
  for (const auto& spec : kKeys) {
    if (app.count("--" + std::string(spec.key)) > 0) cfg[spec.key] = flags[spec.key];
  }
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) cfg["task"] = kTasks[i];
  }

  try {
    const Run run = make_run(cfg);
    if (!dump_path.empty()) {
      std::ofstream f(dump_path, std::ios::binary | std::ios::trunc);
      if (!f) throw thinbend::io::IoError("cannot open '" + dump_path + "' for writing");
      thinbend::io::write_config(cfg, f);
      if (!f) throw thinbend::io::IoError("failed writing '" + dump_path + "'");
    }
    if (run.task == "density") return task_density(run);
    if (run.task == "map") return task_map(run);
    if (run.task == "profile") return task_profile(run);
    if (run.task == "streamlines") return task_streamlines(run);
    if (run.task == "round-solve") return task_round_solve(run);
    if (run.task == "round-sweep") return task_round_sweep(run);
    return task_round_max(run);
  } catch (const SolverFailure& e) {
    error_line("infeasible", e.what());
    return kInfeasible;
  } catch (const thinbend::InversionError& e) {
    error_line("infeasible", e.what());
    return kInfeasible;
  } catch (const thinbend::io::IoError& e) {
    error_line("io", e.what());
    return kIo;
  } catch (const std::invalid_argument& e) {  // ConfigError, GeometryError
    error_line("config", e.what());
    std::cerr << "run with --help for usage\n";
    return kConfig;
  } catch (const std::exception& e) {
    error_line("internal", e.what());
    return kInfeasible;
  }
}
