#pragma once

// Command-line front end. Every option lives on the root command so a config
// file is a flat list of key = value lines; flags given on the command line
// win over the file.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lfpp/error.hpp"
#include "lfpp/fpp.hpp"
#include "lfpp/gff.hpp"
#include "lfpp/io.hpp"
#include "lfpp/mc.hpp"
#include "lfpp/parallel.hpp"
#include "lfpp/scaling.hpp"
#include "lfpp/stats.hpp"

namespace lfpp::cli {

inline const std::vector<std::string> kCommands = {"sample-field", "crossing", "quantiles", "rsw",
                                                   "powerlaw",     "gluing",   "tails",     "efron-stein",
                                                   "diameter",     "metric",   "distortion", "holder",
                                                   "render"};

struct RunConfig {
  std::string command;
  std::int64_t S = 8, K = 1, L = 1, m = 8;
  double gamma = 0.0;
  std::size_t n = 100;
  double p = 0.5, q = 0.5, p2 = 0.9, q2 = 0.9;
  double delta_x = 0.05, delta_y = 0.05;
  std::vector<double> u_grid{0.125, 0.25, 0.5, 1, 2, 4};
  std::vector<double> y_grid;
  std::vector<std::int64_t> scales;
  std::int64_t k = 2, a = 2, b = 1;
  double slack = 0.05;
  double kappa = 0.0;  // 0: estimate
  std::size_t kappa_replicas = 200;
  std::string spec = "lr";
  std::uint64_t seed = 0;
  std::string out = "lfpp_out";
  std::string input, input2;
  bool geodesic = false;
  int cell = 6;
  unsigned threads = 1;
  std::string format = kFormatTag;
};

/// Invalid invocation; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every option that determines output bodies, keyed by long option name
/// (thread count and output prefix excluded).
inline json provenance(const RunConfig& c) {
  return json{{"command", c.command},
              {"size", c.S},
              {"K", c.K},
              {"L", c.L},
              {"m", c.m},
              {"gamma", c.gamma},
              {"replicas", c.n},
              {"p", c.p},
              {"q", c.q},
              {"p2", c.p2},
              {"q2", c.q2},
              {"delta-x", c.delta_x},
              {"delta-y", c.delta_y},
              {"u", c.u_grid},
              {"y", c.y_grid},
              {"scales", c.scales},
              {"k", c.k},
              {"a", c.a},
              {"b", c.b},
              {"slack", c.slack},
              {"kappa", c.kappa},
              {"kappa-replicas", c.kappa_replicas},
              {"spec", c.spec},
              {"seed", c.seed},
              {"input", c.input},
              {"input2", c.input2},
              {"geodesic", c.geodesic},
              {"cell", c.cell},
              {"format", c.format}};
}

/// The provenance as a config file accepted by --config.
inline std::string replay_config(const json& prov) {
  std::ostringstream o;
  for (const auto& [key, v] : prov.items()) {
    if (key == "format") continue;
    if (v.is_array()) {
      if (v.empty()) continue;
      o << key << " = [";
      for (std::size_t i = 0; i < v.size(); ++i) o << (i ? ", " : "") << (v[i].is_number_float() ? format_real(v[i].get<double>()) : v[i].dump());
      o << "]\n";
    } else if (v.is_string()) {
      if (v.get<std::string>().empty()) continue;
      o << key << " = " << v.dump() << "\n";
    } else if (v.is_boolean()) {
      o << key << " = " << (v.get<bool>() ? "true" : "false") << "\n";
    } else if (v.is_number_float()) {
      o << key << " = " << format_real(v.get<double>()) << "\n";
    } else {
      o << key << " = " << v.dump() << "\n";
    }
  }
  return o.str();
}

inline void build_app(CLI::App& app, RunConfig& c) {
  app.set_config("--config", "", "flat key = value config file (flags override it)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("command", c.command, "subcommand")->required()->check(CLI::IsMember(kCommands));
  app.add_option("--size,-S", c.S, "scale S")->check(CLI::PositiveNumber);
  app.add_option("--K", c.K, "box width in units of S")->check(CLI::PositiveNumber);
  app.add_option("--L", c.L, "box height in units of S")->check(CLI::PositiveNumber);
  app.add_option("--m", c.m, "metric grid resolution")->check(CLI::PositiveNumber);
  app.add_option("--gamma", c.gamma, "coupling constant")->check(CLI::NonNegativeNumber);
  app.add_option("--replicas,-n", c.n, "replica count")->check(CLI::PositiveNumber);
  const auto prob = CLI::Range(1e-12, 1.0);
  app.add_option("--p", c.p, "quantile level")->check(prob);
  app.add_option("--q", c.q, "second quantile level")->check(prob);
  app.add_option("--p2", c.p2, "p' level")->check(prob);
  app.add_option("--q2", c.q2, "q' level")->check(prob);
  app.add_option("--delta-x", c.delta_x, "CV^2 bound for X")->check(CLI::NonNegativeNumber);
  app.add_option("--delta-y", c.delta_y, "CV^2 bound for Y")->check(CLI::NonNegativeNumber);
  app.add_option("--u", c.u_grid, "tail levels")->check(CLI::PositiveNumber);
  app.add_option("--y", c.y_grid, "gluing levels");
  app.add_option("--scales", c.scales, "list of scales")->check(CLI::PositiveNumber);
  app.add_option("--k", c.k, "gluing multiplicity")->check(CLI::PositiveNumber);
  app.add_option("--a", c.a, "gluing width factor")->check(CLI::PositiveNumber);
  app.add_option("--b", c.b, "gluing height factor")->check(CLI::PositiveNumber);
  app.add_option("--slack", c.slack, "additive slack")->check(CLI::NonNegativeNumber);
  app.add_option("--kappa", c.kappa, "metric normalizer (0: estimate)")->check(CLI::NonNegativeNumber);
  app.add_option("--kappa-replicas", c.kappa_replicas, "replicas for kappa")->check(CLI::PositiveNumber);
  app.add_option("--spec", c.spec, "crossing kind")->check(CLI::IsMember({"lr", "bt", "easy", "hard"}));
  app.add_option("--seed", c.seed, "master seed");
  app.add_option("--out,-o", c.out, "output prefix");
  app.add_option("--input", c.input, "input file");
  app.add_option("--input2", c.input2, "second input file");
  app.add_flag("--geodesic", c.geodesic, "overlay the geodesic (render)");
  app.add_option("--cell", c.cell, "SVG pixels per vertex")->check(CLI::Range(1, 64));
  app.add_option("--threads,-j", c.threads, "worker threads")->envname("LFPP_THREADS")->check(CLI::PositiveNumber);
}

/// Throws UsageError on any invalid value; returns nullopt for --help.
inline std::optional<RunConfig> parse_config(int argc, const char* const* argv, std::ostream& help_out = std::cout) {
  RunConfig c;
  CLI::App app{"Liouville first-passage percolation lab", "lfpp"};
  build_app(app, c);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    help_out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------

inline CrossingSpec spec_of(const std::string& s) {
  if (s == "bt") return CrossingSpec::bt();
  if (s == "easy") return CrossingSpec::easy();
  if (s == "hard") return CrossingSpec::hard();
  return CrossingSpec::lr();
}

inline Functional functional_of(const std::string& s) {
  if (s == "bt") return Functional::BT;
  if (s == "easy") return Functional::Easy;
  if (s == "hard") return Functional::Hard;
  return Functional::LR;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Outputs {
  Table table;
  json summary = json::object();
};

namespace detail {

inline std::vector<std::int64_t> scales_or(const RunConfig& c, std::vector<std::int64_t> fallback) {
  return c.scales.empty() ? fallback : c.scales;
}

inline Outputs run(const RunConfig& c) {
  Outputs o;
  Table& t = o.table;
  const GridBox box(0, 0, c.K * c.S, c.L * c.S);
  const unsigned th = c.threads;

  if (c.command == "sample-field") {
    const GaussianField f = sample_dgff(box, c.seed);
    write_field(c.out + ".field.csv", f, provenance(c));
    const auto vals = f.values().restrict_to(box).values();
    t.columns = {"base_box", "vertices", "min", "max", "mean", "variance"};
    t.add(describe(box), box.size(), *std::min_element(vals.begin(), vals.end()),
          *std::max_element(vals.begin(), vals.end()), mean(vals), variance(vals));
    o.summary["field_file"] = c.out + ".field.csv";
  } else if (c.command == "crossing") {
    const Functional fn = functional_of(c.spec);
    auto cols = replicate(c.n, 1, c.seed, th, [&](std::uint64_t s, std::span<double> out) {
      out[0] = evaluate(fn, box, WeightField(sample_dgff(box, s), c.gamma));
    });
    t.columns = {"replica", "field_seed", "weight"};
    for (std::size_t r = 0; r < c.n; ++r) t.add(r, derive_seed(c.seed, r), cols[0][r]);
    const EmpiricalDistribution d(cols[0]);
    o.summary["mean"] = mean(d.samples());
    o.summary["median"] = quantile(d, 0.5);
    if (mean(d.samples()) != 0.0) o.summary["cv2"] = cv2(d);
  } else if (c.command == "quantiles") {
    const auto dx = ensemble(GridBox::square(c.S), Functional::LR, c.gamma, c.n, derive_seed(c.seed, "quantiles/X"), th);
    const auto dy =
        ensemble(GridBox::square(2 * c.S), Functional::LR, c.gamma, c.n, derive_seed(c.seed, "quantiles/Y"), th);
    const auto r = quantile_ratio_bounds(dx, dy, c.p, c.q, c.p2, c.q2, c.delta_x, c.delta_y);
    t.columns = {"S_x", "S_y", "A", "B", "A2", "B2", "quantile_ratio", "mean_ratio", "quantile_ratio2",
                 "cv2_x", "cv2_y", "assumptions_hold", "mean_inside", "quantiles_inside"};
    t.add(c.S, 2 * c.S, r.A, r.B, r.A2, r.B2, r.quantile_ratio, r.mean_ratio, r.quantile_ratio2, r.cv2_x, r.cv2_y,
          r.assumptions_hold, r.mean_inside, r.quantiles_inside);
  } else if (c.command == "rsw") {
    t.columns = {"S", "theta_hard", "theta_easy", "ratio"};
    for (const auto& r : rsw_diagnostic(scales_or(c, {c.S}), c.gamma, c.p, c.n, c.seed, th))
      t.add(r.S, r.theta_hard, r.theta_easy, r.ratio);
  } else if (c.command == "powerlaw") {
    const auto rep = power_law_fit(c.gamma, c.p, scales_or(c, {c.S, 2 * c.S, 4 * c.S}), c.n, c.seed, th);
    t.columns = {"S", "theta_easy", "residual"};
    for (const auto& r : rep.rows) t.add(r.S, r.theta_easy, r.residual);
    o.summary["exponent"] = rep.exponent;
    o.summary["exponent_se"] = rep.exponent_ci.std_error;
    o.summary["exponent_ci"] = {rep.exponent_ci.lo, rep.exponent_ci.hi};
  } else if (c.command == "gluing") {
    GluingParams gp;
    gp.gamma = c.gamma;
    gp.S = c.S;
    gp.k = c.k;
    gp.a = c.a;
    gp.b = c.b;
    gp.y_grid = c.y_grid;
    gp.n = c.n;
    gp.seed = c.seed;
    gp.slack = c.slack;
    gp.threads = th;
    t.columns = {"inequality", "y", "big_box_probability", "bound", "std_error", "slack", "violated"};
    std::size_t bad = 0;
    for (const auto& r : gluing_check(gp)) {
      t.add(r.inequality, r.y, r.big, r.bound, r.std_error, r.slack, r.violated);
      bad += r.violated;
    }
    o.summary["violations"] = bad;
  } else if (c.command == "tails") {
    const auto rep = crossing_tail_check(c.gamma, c.K, c.L, c.S, c.u_grid, c.n, c.seed, th);
    t.columns = {"u", "threshold", "tail", "std_error", "envelope"};
    for (const auto& r : rep.rows) t.add(r.u, r.threshold, r.tail, r.std_error, r.envelope);
    o.summary["mean_hard_aux"] = rep.mean_hard;
  } else if (c.command == "diameter") {
    const auto rep = diameter_tail(c.gamma, c.S, c.q, c.u_grid, c.n, c.seed, th);
    t.columns = {"u", "threshold", "tail", "std_error"};
    for (const auto& r : rep.rows) t.add(r.u, r.threshold, r.tail, r.std_error);
    o.summary["theta_easy_q"] = rep.mean_hard;
  } else if (c.command == "efron-stein") {
    const auto ex = efron_stein_experiment(c.gamma, c.K, c.L, c.S, c.n, c.seed, th);
    t.columns = {"quantity", "block", "estimate", "lo", "hi", "occupancy"};
    const auto& f = ex.full;
    t.add("variance", "", f.variance.estimate, f.variance.lo, f.variance.hi, "");
    t.add("half_sum_all_blocks", "", f.half_sum.estimate, f.half_sum.lo, f.half_sum.hi, "");
    t.add("half_sum_boxes_only", "", ex.boxes_only.half_sum.estimate, ex.boxes_only.half_sum.lo,
          ex.boxes_only.half_sum.hi, "");
    for (std::size_t i = 0; i < f.block_half.size(); ++i) {
      const bool residual = i + 1 == f.block_half.size();
      t.add("block_half_e_delta2", residual ? std::string("residual") : std::to_string(i), f.block_half[i], "", "",
            residual ? std::string() : format_real(f.occupancy[i]));
    }
  } else if (c.command == "metric" || (c.command == "holder" && c.input.empty())) {
    const double kappa = c.kappa > 0 ? c.kappa : estimate_kappa(c.S, c.gamma, c.kappa_replicas, c.seed, 0.5, th).kappa;
    const SampledMetric d = sample_normalized_metric(c.S, c.gamma, c.m, kappa, derive_seed(c.seed, "metric"), th);
    if (c.command == "metric") {
      write_metric(c.out + ".metric.csv", d, provenance(c));
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (std::size_t a = 0; a < d.nodes(); ++a)
        for (std::size_t b = a + 1; b < d.nodes(); ++b) {
          lo = std::min(lo, d.at(a, b));
          hi = std::max(hi, d.at(a, b));
        }
      t.columns = {"S", "m", "kappa", "min_offdiagonal", "max"};
      t.add(c.S, c.m, kappa, lo, hi);
      o.summary["metric_file"] = c.out + ".metric.csv";
    } else {
      const HolderFit h = holder_fit(d);
      t.columns = {"xi_upper", "xi_lower", "C_upper", "C_lower"};
      t.add(h.xi_upper, h.xi_lower, h.C_upper, h.C_lower);
    }
  } else if (c.command == "holder") {
    const HolderFit h = holder_fit(read_metric(c.input));
    t.columns = {"xi_upper", "xi_lower", "C_upper", "C_lower"};
    t.add(h.xi_upper, h.xi_lower, h.C_upper, h.C_lower);
  } else if (c.command == "distortion") {
    if (!c.input.empty() || !c.input2.empty()) {
      if (c.input.empty() || c.input2.empty()) fail(ErrorKind::InvalidArgument, "distortion needs --input and --input2");
      t.columns = {"distortion"};
      t.add(distortion(read_metric(c.input), read_metric(c.input2)));
    } else {
      t.columns = {"S", "kappa_S", "kappa_2S", "distortion"};
      for (const auto& r : cross_scale_distortion(scales_or(c, {c.S}), c.gamma, c.m, c.kappa_replicas, c.seed, th))
        t.add(r.S, r.kappa_S, r.kappa_2S, r.distortion);
    }
  } else if (c.command == "render") {
    const GaussianField f = sample_dgff(box, c.seed);
    const BoxArray<double> y = f.values().restrict_to(box);
    std::optional<LatticePath> path;
    double weight = 0.0;
    if (c.geodesic) {
      const auto g = crossing_weight(box, spec_of(c.spec), WeightField(f, c.gamma));
      path = g.path;
      weight = g.weight;
    }
    write_text(c.out + ".svg", render_svg(y, path, c.cell));
    t.columns = {"base_box", "geodesic", "weight", "path_vertices"};
    t.add(describe(box), c.geodesic, weight, path ? path->size() : std::size_t{0});
    o.summary["svg_file"] = c.out + ".svg";
  }
  return o;
}

}  // namespace detail

/// Runs the command and writes <out>.csv and <out>.json. Returns the exit code.
inline int execute(const RunConfig& c, std::ostream& err = std::cerr) {
  try {
    Outputs o = detail::run(c);
    const json prov = provenance(c);
    write_text(c.out + ".csv", render_csv(o.table, prov));
    json side{{"format", kFormatTag},
              {"provenance", prov},
              {"summary", o.summary},
              {"csv", c.out + ".csv"},
              {"replay_config", replay_config(prov)},
              {"threads", c.threads},
              {"timestamp", utc_timestamp()}};
    write_text(c.out + ".json", side.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    err << "lfpp: " << to_string(e.kind()) << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "lfpp: runtime error: " << e.what() << "\n";
  }
  return 1;
}

inline int main(int argc, const char* const* argv) {
  std::optional<RunConfig> c;
  try {
    c = parse_config(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "lfpp: usage: " << e.what() << "\n";
    return 2;
  }
  if (!c) return 0;
  return execute(*c);
}

}  // namespace lfpp::cli
