#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcurves/rcurves.hpp"

namespace rcurves::cli {

enum ExitCode : int { ok = 0, usage = 1, validation = 2, runtime = 3 };

namespace detail {

struct Options {
  std::vector<std::string> inputs;
  std::string center;
  std::string inner;
  std::string outer;
  std::string threshold_n = "1";
  std::size_t samples = 1000;
  std::optional<std::uint64_t> seed;
  double tol = 1e-6;
  std::size_t depth = 6;
  std::optional<double> grid;
  std::string out;
  int k = 8;
  std::size_t threads = 1;
  std::size_t index = 0;
  std::optional<std::size_t> horizon;
  double gauge = 0.0;
};

inline Point parse_point_flag(const std::string& s, const char* flag) {
  require(!s.empty(), ErrorCode::invalid_argument, std::string(flag) + " is required");
  return Point(parse_double_list(s));
}

inline double parse_single(const std::string& s, const char* flag) {
  require(!s.empty(), ErrorCode::invalid_argument, std::string(flag) + " is required");
  return parse_double(s);
}

inline std::vector<std::size_t> parse_thresholds(const std::string& s) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(s)) {
    require(v >= 0.0 && v == std::floor(v) && v < 1e15, ErrorCode::invalid_argument,
            "--threshold-n values must be nonnegative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

inline Annulus annulus_flags(const Options& o) {
  return Annulus(parse_point_flag(o.center, "--center"), parse_single(o.inner, "--inner"),
                 parse_single(o.outer, "--outer"));
}

inline EnsembleSpec load_spec(const std::string& path) { return parse_ensemble_spec(read_file(path)); }

inline Sampler spec_sampler(const EnsembleSpec& spec) { return make_sampler(spec); }

inline std::uint64_t run_seed(const Options& o, const EnsembleSpec& spec) { return o.seed.value_or(spec.seed); }

inline void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::invalid_argument, "cannot write '" + o.out + "'");
  f << text;
}

using Cell = std::vector<std::string>;
using rcurves::CsvWriter;

inline void cmd_generate(const Options& o, std::ostream& out) {
  EnsembleSpec spec = load_spec(o.inputs.at(0));
  if (o.seed) spec.seed = *o.seed;
  const CurveCollection coll = sample_collection(spec, o.index);
  emit(o, out, serialize_curve_file(coll, spec.dim));
}

inline void cmd_crossings(const Options& o, std::ostream& out) {
  const CurveCollection coll = read_curve_file(o.inputs.at(0));
  const Annulus ann = annulus_flags(o);
  require(coll.empty() || coll.dim() == ann.dim(), ErrorCode::dimension_mismatch,
          "--center has a different dimension than the curves");
  CsvWriter csv(out, "crossings", {"id", "multiplicity", "count", "non_generic", "intervals"});
  for (const CurveEntry& e : coll.entries()) {
    const CrossingReport rep = find_crossings(e.curve, ann);
    std::string ivs;
    for (const CrossingInterval& iv : rep.intervals) {
      if (!ivs.empty()) ivs += ';';
      ivs += format_double(iv.a) + ':' + format_double(iv.b) + ':' +
             (iv.direction == Direction::outward ? "outward" : "inward");
    }
    csv.row({e.id, CsvWriter::cell(e.multiplicity), CsvWriter::cell(rep.count()), CsvWriter::cell(rep.non_generic),
             ivs});
  }
}

inline void cmd_dist(const Options& o, std::ostream& out) {
  const CurveCollection a = read_curve_file(o.inputs.at(0));
  const CurveCollection b = read_curve_file(o.inputs.at(1));
  const std::size_t nb = b.size();
  const auto results = parallel_map(a.size() * nb, o.threads, [&](std::size_t k) {
    return curve_distance(a[k / nb].curve, b[k % nb].curve, o.tol);
  });
  CsvWriter csv(out, "dist", {"id_a", "id_b", "distance", "tolerance", "method"});
  for (std::size_t k = 0; k < results.size(); ++k)
    csv.row({a[k / nb].id, b[k % nb].id, CsvWriter::cell(results[k].value), CsvWriter::cell(results[k].tolerance),
             std::string(to_string(results[k].method))});
}

inline void cmd_cdist(const Options& o, std::ostream& out) {
  const CurveCollection a = read_curve_file(o.inputs.at(0));
  const CurveCollection b = read_curve_file(o.inputs.at(1));
  const CollectionMatch m = collection_match(a, b, o.tol, o.threads);
  CsvWriter csv(out, "cdist", {"distance", "tolerance", "method", "matched_pairs"});
  csv.row({CsvWriter::cell(m.distance.value), CsvWriter::cell(m.distance.tolerance),
           std::string(to_string(m.distance.method)), CsvWriter::cell(m.matching.pairs.size())});
}

/// Grid net over the bounding box of the curves, padded by 1/k; the
/// default spacing 2 / (k sqrt(d)) makes it 1/k-dense.
inline Net coarsening_net(const CurveCollection& coll, int k, std::optional<double> spacing) {
  const std::size_t d = coll.dim();
  const double pad = 1.0 / k;
  const double h = spacing.value_or(2.0 / (k * std::sqrt(static_cast<double>(d))) * (1.0 - 1e-9));
  require(h > 0.0, ErrorCode::invalid_argument, "--grid must be positive");
  std::vector<double> lo(d, INFINITY), hi(d, -INFINITY);
  for (const CurveEntry& e : coll.entries())
    for (const Point& p : e.curve.vertices())
      for (std::size_t a = 0; a < d; ++a) {
        lo[a] = std::min(lo[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
  std::vector<std::size_t> per_axis(d);
  double total = 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    per_axis[a] = static_cast<std::size_t>(std::ceil((hi[a] - lo[a] + 2.0 * pad) / h)) + 1;
    total *= static_cast<double>(per_axis[a]);
  }
  require(total <= 5e6, ErrorCode::input_too_large, "coarsening grid would exceed 5e6 points");
  Net net{{}, 1.0 / k};
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Point p = Point::zeros(d);
    for (std::size_t a = 0; a < d; ++a) p[a] = lo[a] - pad + static_cast<double>(idx[a]) * h;
    net.points.push_back(std::move(p));
    std::size_t a = 0;
    while (a < d && ++idx[a] == per_axis[a]) idx[a++] = 0;
    if (a == d) break;
  }
  return net;
}

inline void cmd_coarsen(const Options& o, std::ostream& out) {
  require(o.k >= 1, ErrorCode::invalid_argument, "--k must be a positive integer");
  const CurveCollection coll = read_curve_file(o.inputs.at(0));
  CsvWriter csv(out, "coarsen",
                {"k", "curves_in", "curves_out", "net_size", "measured_distance", "tolerance", "certified_bound"});
  const double bound = 11.0 / o.k;
  if (coll.empty()) {
    csv.row({std::to_string(o.k), "0", "0", "0", "0", CsvWriter::cell(o.tol), CsvWriter::cell(bound)});
    return;
  }
  const Net net = coarsening_net(coll, o.k, o.grid);
  const CurveCollection coarse = coarsen_collection(coll, net, o.k, o.threads);
  const MetricResult d = collection_distance(coll, coarse, o.tol, o.threads);
  if (!o.out.empty()) emit(o, out, serialize_curve_file(coarse, coll.dim()));
  csv.row({std::to_string(o.k), CsvWriter::cell(coll.total_count()), CsvWriter::cell(coarse.total_count()),
           CsvWriter::cell(net.size()), CsvWriter::cell(d.value), CsvWriter::cell(d.tolerance),
           CsvWriter::cell(bound)});
}

inline void cmd_tails(const Options& o, std::ostream& out) {
  const EnsembleSpec spec = load_spec(o.inputs.at(0));
  const Annulus ann = annulus_flags(o);
  const auto counts = sample_crossing_counts(spec_sampler(spec), ann, o.samples, run_seed(o, spec), o.threads);
  CsvWriter csv(out, "tails", {"threshold", "p_hat", "ci_lo", "ci_hi", "samples"});
  for (std::size_t n : parse_thresholds(o.threshold_n)) {
    const TailEstimate t = tail_from_counts(counts, ann, n);
    csv.row({CsvWriter::cell(n), CsvWriter::cell(t.p_hat), CsvWriter::cell(t.ci_lo), CsvWriter::cell(t.ci_hi),
             CsvWriter::cell(t.samples)});
  }
}

inline void cmd_regularity(const Options& o, std::ostream& out) {
  std::vector<Sampler> samplers;
  std::optional<std::uint64_t> seed = o.seed;
  for (const std::string& path : o.inputs) {
    const EnsembleSpec spec = load_spec(path);
    if (!seed) seed = spec.seed;
    samplers.push_back(spec_sampler(spec));
  }
  const Point x = parse_point_flag(o.center, "--center");
  std::vector<AnnulusSpec> grid;
  for (double r : parse_double_list(o.inner))
    for (double big_r : parse_double_list(o.outer))
      if (r < big_r) grid.push_back({x, r, big_r});
  require(!grid.empty(), ErrorCode::invalid_argument, "no (inner, outer) pair with inner < outer");
  const RegularityReport rep = regularity_report(samplers, grid, parse_thresholds(o.threshold_n), o.samples, *seed,
                                                 o.threads);
  CsvWriter csv(out, "regularity",
                {"cell", "center", "r", "R", "threshold", "p_hat", "ci_lo", "ci_hi", "sampler", "monotone",
                 "terminal"});
  for (const RegularityRow& row : rep.rows) {
    const RegularityCell& cell = rep.cells[row.cell];
    csv.row({CsvWriter::cell(row.cell), CsvWriter::cell(row.tail.x), CsvWriter::cell(row.tail.r),
             CsvWriter::cell(row.tail.big_r), CsvWriter::cell(row.tail.threshold), CsvWriter::cell(row.tail.p_hat),
             CsvWriter::cell(row.tail.ci_lo), CsvWriter::cell(row.tail.ci_hi), CsvWriter::cell(row.sampler),
             CsvWriter::cell(cell.monotone), CsvWriter::cell(cell.terminal)});
  }
}

/// Tails for every radius of the --inner ladder at fixed --outer, for each
/// threshold; one shared set of draws per radius.
inline std::vector<std::vector<TailEstimate>> ladder_tails(const Options& o, const EnsembleSpec& spec,
                                                           const std::vector<double>& radii,
                                                           const std::vector<std::size_t>& thresholds) {
  const Point x = parse_point_flag(o.center, "--center");
  const double big_r = parse_single(o.outer, "--outer");
  const Sampler sampler = spec_sampler(spec);
  std::vector<std::vector<TailEstimate>> by_threshold(thresholds.size());
  for (double r : radii) {
    const Annulus ann(x, r, big_r);
    const auto counts = sample_crossing_counts(sampler, ann, o.samples, run_seed(o, spec), o.threads);
    for (std::size_t i = 0; i < thresholds.size(); ++i) by_threshold[i].push_back(tail_from_counts(counts, ann, thresholds[i]));
  }
  return by_threshold;
}

inline void cmd_fit(const Options& o, std::ostream& out) {
  const EnsembleSpec spec = load_spec(o.inputs.at(0));
  const std::vector<std::size_t> thresholds = parse_thresholds(o.threshold_n);
  const auto tails = ladder_tails(o, spec, parse_double_list(o.inner), thresholds);
  CsvWriter csv(out, "fit", {"threshold", "lambda", "prefactor", "residual", "points", "status"});
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    try {
      const PowerFit f = fit_power(tails[i]);
      csv.row({CsvWriter::cell(thresholds[i]), CsvWriter::cell(f.lambda), CsvWriter::cell(f.prefactor),
               CsvWriter::cell(f.residual), CsvWriter::cell(f.points), "ok"});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate_fit) throw;
      csv.row({CsvWriter::cell(thresholds[i]), "", "", "", "", "degenerate"});
    }
  }
}

inline void cmd_rate(const Options& o, std::ostream& out) {
  const EnsembleSpec spec = load_spec(o.inputs.at(0));
  const std::vector<std::size_t> thresholds = parse_thresholds(o.threshold_n);
  require(thresholds.size() == 1, ErrorCode::invalid_argument, "rate takes a single --threshold-n");
  const std::vector<double> radii = parse_double_list(o.inner);
  const auto tails = ladder_tails(o, spec, radii, thresholds).front();
  std::vector<double> q, slack;
  for (const TailEstimate& t : tails) {
    q.push_back(t.p_hat);
    slack.push_back(0.5 * (t.ci_hi - t.ci_lo));
  }
  const std::size_t dim = parse_point_flag(o.center, "--center").dim();
  const RateVerdict v = rate_check(radii, q, dim, o.gauge, slack);
  CsvWriter csv(out, "rate", {"r", "q", "ci_lo", "ci_hi", "ratio", "verdict"});
  for (std::size_t i = 0; i < v.radii.size(); ++i) {
    const auto it = std::find(radii.begin(), radii.end(), v.radii[i]);
    const TailEstimate& t = tails[static_cast<std::size_t>(it - radii.begin())];
    csv.row({CsvWriter::cell(t.r), CsvWriter::cell(t.p_hat), CsvWriter::cell(t.ci_lo), CsvWriter::cell(t.ci_hi),
             CsvWriter::cell(v.ratios[i]), v.pass ? "pass" : "fail"});
  }
}

inline void cmd_hotspot(const Options& o, std::ostream& out) {
  const EnsembleSpec spec = load_spec(o.inputs.at(0));
  const Annulus ann = annulus_flags(o);
  const HotspotReport rep = locate_hotspot(spec_sampler(spec), ann, o.depth, o.samples, run_seed(o, spec), o.threads);
  CsvWriter csv(out, "hotspot", {"level", "face_center", "eps", "p_hat"});
  for (const HotspotLevel& l : rep.levels)
    csv.row({CsvWriter::cell(l.k), CsvWriter::cell(l.face.center()), CsvWriter::cell(l.eps), CsvWriter::cell(l.p_hat)});
  csv.row({"y", CsvWriter::cell(rep.y), CsvWriter::cell(rep.levels.back().eps), CsvWriter::cell(rep.cover_rate)});
}

inline void cmd_couple(const Options& o, std::ostream& out) {
  const Coding coding = parse_coupling_file(read_file(o.inputs.at(0)));
  const std::size_t horizon = o.horizon.value_or(coding.num_measures() - 1);
  const ConvergenceReport rep = convergence_diagnostic(coding, o.samples, horizon, o.seed.value_or(0), o.threads);
  CsvWriter csv(out, "couple", {"level", "fraction", "flagged", "draws", "horizon"});
  for (const LevelStability& l : rep.levels)
    csv.row({CsvWriter::cell(l.level), CsvWriter::cell(l.fraction), CsvWriter::cell(l.flagged),
             CsvWriter::cell(rep.draws), CsvWriter::cell(rep.horizon)});
}

}  // namespace detail

/// Runs one command line (without the program name). CSV reports go to
/// `out`, diagnostics to `err`; returns the process exit code.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Annulus crossings, curve metrics and regularity diagnostics for random curves", "rcurves"};
  app.require_subcommand(1);
  Options o;

  auto annulus = [&](CLI::App* sub) {
    sub->add_option("--center", o.center, "annulus center, comma-separated coordinates");
    sub->add_option("--inner", o.inner, "inner radius");
    sub->add_option("--outer", o.outer, "outer radius");
  };
  auto sampling = [&](CLI::App* sub) {
    sub->add_option("--samples", o.samples, "number of draws")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "run seed (defaults to the ensemble seed)");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  };

  std::vector<std::pair<CLI::App*, std::function<void(const Options&, std::ostream&)>>> commands;
  auto add = [&](const char* name, const char* help, std::size_t files, bool variadic, auto handler) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* opt = sub->add_option("inputs", o.inputs, "input files")->required();
    if (variadic) opt->expected(1, -1);
    else opt->expected(static_cast<int>(files));
    commands.emplace_back(sub, handler);
    return sub;
  };

  {
    auto* s = add("generate", "sample an ensemble into a curve file", 1, false, cmd_generate);
    s->add_option("--seed", o.seed, "override the ensemble seed");
    s->add_option("--index", o.index, "which draw of the ensemble");
    s->add_option("--out", o.out, "output file (default: stdout)");
  }
  annulus(add("crossings", "list annulus crossings of every curve", 1, false, cmd_crossings));
  {
    auto* s = add("dist", "uniform distance between every pair of curves", 2, false, cmd_dist);
    s->add_option("--tol", o.tol, "absolute tolerance")->check(CLI::PositiveNumber);
    s->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  }
  {
    auto* s = add("cdist", "distance between two curve collections", 2, false, cmd_cdist);
    s->add_option("--tol", o.tol, "absolute tolerance")->check(CLI::PositiveNumber);
    s->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  }
  {
    auto* s = add("coarsen", "replace curves by net skeletons at scale 1/k", 1, false, cmd_coarsen);
    s->add_option("--k", o.k, "net scale 1/k")->check(CLI::PositiveNumber);
    s->add_option("--grid", o.grid, "net grid spacing (default 2/(k sqrt(d)))");
    s->add_option("--tol", o.tol, "tolerance of the measured distance")->check(CLI::PositiveNumber);
    s->add_option("--out", o.out, "write the coarsened curve file here");
    s->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  }
  {
    auto* s = add("tails", "crossing-count tail estimates", 1, false, cmd_tails);
    annulus(s);
    sampling(s);
    s->add_option("--threshold-n", o.threshold_n, "comma-separated thresholds N");
  }
  {
    auto* s = add("regularity", "sup of tails over ensembles on a grid of annuli", 1, true, cmd_regularity);
    annulus(s);
    sampling(s);
    s->add_option("--threshold-n", o.threshold_n, "comma-separated thresholds N");
  }
  {
    auto* s = add("fit", "power-law fit of tails along an inner-radius ladder", 1, false, cmd_fit);
    annulus(s);
    sampling(s);
    s->add_option("--threshold-n", o.threshold_n, "comma-separated thresholds N");
  }
  {
    auto* s = add("rate", "finite-ladder o(r^{d-1}) check of tails", 1, false, cmd_rate);
    annulus(s);
    sampling(s);
    s->add_option("--threshold-n", o.threshold_n, "threshold N");
    s->add_option("--gauge", o.gauge, "gauge exponent a in g(r) = r^a");
  }
  {
    auto* s = add("hotspot", "locate where crossings concentrate", 1, false, cmd_hotspot);
    annulus(s);
    sampling(s);
    s->add_option("--depth", o.depth, "number of subdivision levels")->check(CLI::PositiveNumber);
  }
  {
    auto* s = add("couple", "stabilization of the consistent coupling", 1, false, cmd_couple);
    sampling(s);
    s->add_option("--horizon", o.horizon, "horizon J (default: last measure)");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return usage;
  }

  for (auto& [sub, handler] : commands) {
    if (!sub->parsed()) continue;
    try {
      handler(o, out);
      return ok;
    } catch (const Error& e) {
      err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
      return is_validation_error(e.code()) ? validation : runtime;
    }
  }
  err << app.help();
  return usage;
}

}  // namespace rcurves::cli
