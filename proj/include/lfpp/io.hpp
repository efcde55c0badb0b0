#pragma once

// File formats (all tagged "lfpp/1"):
//   report CSV   '#'-prefixed provenance lines, then a header row and rows.
//   sidecar JSON provenance + summary + run facts (timestamp, threads) that
//                are deliberately kept out of the CSV body.
//   field file   "# {json header}" then one CSV row per y (bottom to top) of
//                values over the whole domain, zeros on the boundary layer.
//   metric file  "# {json header}" then one CSV row per node of the matrix.
// Reals are printed with %.17g so files round-trip exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lfpp/box_array.hpp"
#include "lfpp/error.hpp"
#include "lfpp/fpp.hpp"
#include "lfpp/gff.hpp"
#include "lfpp/lattice.hpp"
#include "lfpp/passes.hpp"
#include "lfpp/scaling.hpp"

namespace lfpp {

using json = nlohmann::ordered_json;

inline constexpr const char* kFormatTag = "lfpp/1";

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void to_json(json& j, const Vertex& v) { j = json::array({v.x, v.y}); }
inline void from_json(const json& j, Vertex& v) { v = {j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>()}; }

inline void to_json(json& j, const GridBox& b) {
  j = json{{"x0", b.x0}, {"y0", b.y0}, {"w", b.width}, {"h", b.height}};
}
inline GridBox box_from_json(const json& j) {
  return GridBox(j.at("x0").get<std::int64_t>(), j.at("y0").get<std::int64_t>(), j.at("w").get<std::int64_t>(),
                 j.at("h").get<std::int64_t>());
}

inline void to_json(json& j, const LatticePath& p) {
  j = json::array();
  for (const Vertex& v : p.vertices()) j.push_back(v);
}
inline LatticePath path_from_json(const json& j) { return LatticePath(j.get<std::vector<Vertex>>()); }

inline void to_json(json& j, const Pass& p) { j = json{{"rect", p.rect}}; }

inline void to_json(json& j, const PassCollection& pc) {
  j = json{{"format", kFormatTag}, {"frame", pc.frame},     {"scale", pc.scale},
           {"path_id", pc.source_path_id}, {"passes", pc.passes}, {"path", pc.path}};
}

inline void to_json(json& j, const GeodesicResult& g) {
  j = json{{"kind", to_string(g.kind)}, {"weight", g.weight}};
  if (g.path) j["path"] = *g.path;
  j["vertex_set"] = g.vertex_set;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  return f;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot open " + path);
  return f;
}

// ---------------------------------------------------------------------------
// Report tables.

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  template <class... T>
  void add(const T&... cells) {
    rows.push_back({cell(cells)...});
  }

 private:
  static std::string cell(double v) { return format_real(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }
};

/// `provenance` must hold only what determines the body (config, seeds,
/// format), so reruns produce identical files.
inline std::string render_csv(const Table& t, const json& provenance) {
  std::ostringstream o;
  o << "# format: " << kFormatTag << "\n";
  o << "# provenance: " << provenance.dump() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) o << (i ? "," : "") << t.columns[i];
  o << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
    o << "\n";
  }
  return o.str();
}

inline void write_text(const std::string& path, const std::string& body) {
  auto f = open_out(path);
  f << body;
  if (!f) fail(ErrorKind::Io, "write failed: " + path);
}

inline std::string read_text(const std::string& path) {
  auto f = open_in(path);
  std::ostringstream o;
  o << f.rdbuf();
  return o.str();
}

/// CSV body with the '#' lines stripped.
inline std::string csv_body(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Field and Green files.

inline void write_field(const std::string& path, const GaussianField& f, const json& provenance = json::object()) {
  json h{{"format", kFormatTag}, {"kind", "field"},   {"convention", "cov=G"}, {"base_box", f.base_box()},
         {"domain", f.domain()}, {"seed", f.seed()}, {"provenance", provenance}};
  std::ostringstream o;
  o << "# " << h.dump() << "\n";
  const GridBox& d = f.domain();
  for (std::int64_t y = d.y0; y < d.y1(); ++y) {
    for (std::int64_t x = d.x0; x < d.x1(); ++x) o << (x > d.x0 ? "," : "") << format_real(f.at({x, y}));
    o << "\n";
  }
  write_text(path, o.str());
}

namespace detail {
inline json read_header(std::istream& in, const std::string& kind) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) fail(ErrorKind::Io, "missing lfpp header line");
  json h;
  try {
    h = json::parse(line.substr(2));
  } catch (const std::exception& e) {
    fail(ErrorKind::Io, std::string("malformed header: ") + e.what());
  }
  if (h.value("format", "") != kFormatTag) fail(ErrorKind::Io, "unsupported format tag");
  if (h.value("kind", "") != kind) fail(ErrorKind::Io, "expected a " + kind + " file");
  return h;
}

inline std::vector<double> read_rows(std::istream& in, std::size_t width, std::size_t rows,
                                     bool column_header = false) {
  std::vector<double> out;
  std::string line, cell;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (column_header) {
      column_header = false;
      continue;
    }
    std::istringstream ls(line);
    std::size_t count = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        out.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(ErrorKind::Io, "non-numeric cell '" + cell + "'");
      }
      ++count;
    }
    if (count != width) fail(ErrorKind::Io, "row has " + std::to_string(count) + " cells, expected " + std::to_string(width));
  }
  if (out.size() != width * rows) fail(ErrorKind::Io, "file is incomplete");
  return out;
}
}  // namespace detail

inline GaussianField read_field(const std::string& path) {
  auto in = open_in(path);
  const json h = detail::read_header(in, "field");
  const GridBox base = box_from_json(h.at("base_box"));
  const GridBox d = blow_up(base);
  std::vector<double> v = detail::read_rows(in, static_cast<std::size_t>(d.width), static_cast<std::size_t>(d.height));
  return GaussianField(base, BoxArray<double>(d, std::move(v)), h.at("seed").get<std::uint64_t>());
}

inline void write_green(const std::string& path, const GreenMatrix& g) {
  json h{{"format", kFormatTag}, {"kind", "green"}, {"domain", g.domain()}, {"order", "row-major interior"}};
  std::ostringstream o;
  o << "# " << h.dump() << "\n";
  const auto& e = g.entries();
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) o << (j ? "," : "") << format_real(e(i, j));
    o << "\n";
  }
  write_text(path, o.str());
}

// ---------------------------------------------------------------------------
// Metric files.

inline void write_metric(const std::string& path, const SampledMetric& d, const json& provenance = json::object()) {
  json h{{"format", kFormatTag},
         {"kind", "metric"},
         {"S", d.scale()},
         {"gamma", d.gamma()},
         {"m", d.m()},
         {"kappa", d.kappa()},
         {"seed", d.seed()},
         {"conventions",
          {{"box", "[0,S]^2"},
           {"node_index", "j*(m+1)+i for the point (i/m, j/m)"},
           {"diagonal", "w(Sx)/kappa (endpoint weights included)"}}},
         {"provenance", provenance}};
  std::ostringstream o;
  o << "# " << h.dump() << "\n";
  const std::size_t n = d.nodes();
  for (std::size_t j = 0; j < n; ++j) o << (j ? "," : "") << "n" << j;
  o << "\n";
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) o << (b ? "," : "") << format_real(d.at(a, b));
    o << "\n";
  }
  write_text(path, o.str());
}

inline SampledMetric read_metric(const std::string& path) {
  auto in = open_in(path);
  const json h = detail::read_header(in, "metric");
  const auto m = h.at("m").get<std::int64_t>();
  const auto n = static_cast<std::size_t>((m + 1) * (m + 1));
  return SampledMetric(h.at("S").get<std::int64_t>(), h.at("gamma").get<double>(), m, h.at("kappa").get<double>(),
                       h.at("seed").get<std::uint64_t>(), detail::read_rows(in, n, n, true));
}

// ---------------------------------------------------------------------------
// SVG. Field values are mapped linearly from [min, max] onto a fixed
// blue (#2c7bb6) - white (#f7f7f7) - red (#d7191c) ramp; y grows upward.

namespace detail {
inline std::string ramp(double t) {
  struct Rgb {
    double r, g, b;
  };
  constexpr Rgb lo{44, 123, 182}, mid{247, 247, 247}, hi{215, 25, 28};
  t = std::clamp(t, 0.0, 1.0);
  const Rgb a = t < 0.5 ? lo : mid, b = t < 0.5 ? mid : hi;
  const double s = t < 0.5 ? 2 * t : 2 * t - 1;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(a.r + (b.r - a.r) * s)),
                static_cast<int>(std::lround(a.g + (b.g - a.g) * s)), static_cast<int>(std::lround(a.b + (b.b - a.b) * s)));
  return buf;
}
}  // namespace detail

inline std::string render_svg(const BoxArray<double>& values, const std::optional<LatticePath>& geodesic = {},
                              int cell = 6) {
  const GridBox& b = values.box();
  const auto [mn, mx] = std::minmax_element(values.values().begin(), values.values().end());
  const double lo = *mn, span = *mx - *mn;
  const std::int64_t W = b.width * cell, H = b.height * cell;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Vertex v = b.vertex(i);
    const double t = span > 0 ? (values[i] - lo) / span : 0.5;
    o << "<rect x=\"" << (v.x - b.x0) * cell << "\" y=\"" << (b.y1() - 1 - v.y) * cell << "\" width=\"" << cell
      << "\" height=\"" << cell << "\" fill=\"" << detail::ramp(t) << "\"/>\n";
  }
  o << "</g>\n";
  if (geodesic) {
    o << "<polyline fill=\"none\" stroke=\"#000000\" stroke-width=\"" << std::max(1, cell / 3) << "\" points=\"";
    for (std::size_t i = 0; i < geodesic->size(); ++i) {
      const Vertex& v = (*geodesic)[i];
      o << (i ? " " : "") << (v.x - b.x0) * cell + cell / 2 << "," << (b.y1() - 1 - v.y) * cell + cell / 2;
    }
    o << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace lfpp
