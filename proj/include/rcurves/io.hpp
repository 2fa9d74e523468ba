#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rcurves/collection.hpp"
#include "rcurves/coupling.hpp"
#include "rcurves/ensembles.hpp"
#include "rcurves/error.hpp"
#include "rcurves/geometry.hpp"
#include "rcurves/nets.hpp"

namespace rcurves {

inline constexpr std::string_view kCurveFormat = "rcurves.curves";
inline constexpr std::string_view kEnsembleFormat = "rcurves.ensemble";
inline constexpr std::string_view kCouplingFormat = "rcurves.coupling";
inline constexpr int kFormatVersion = 1;

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorCode::invalid_argument,
          "not a decimal number: '" + std::string(s) + "'");
  return v;
}

/// Comma-separated decimals, e.g. "0,0.5,-1".
inline std::vector<double> parse_double_list(std::string_view s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(parse_double(s.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::invalid_argument, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

namespace detail {

using nlohmann::json;

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::parse_error, "parse error at line " + std::to_string(line) + ", column " +
                                            std::to_string(column) + ": " + e.what());
  }
}

inline void schema(bool ok, const std::string& message) { require(ok, ErrorCode::schema_error, message); }

inline void check_header(const json& j, std::string_view format) {
  schema(j.is_object(), "top level must be an object");
  schema(j.contains("format") && j["format"].is_string() && j["format"].get<std::string>() == format,
         "format must be \"" + std::string(format) + "\"");
  schema(j.contains("version") && j["version"].is_number_integer() && j["version"].get<int>() == kFormatVersion,
         "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
}

inline void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    schema(known, "unknown key '" + key + "' in " + where);
  }
}

inline Point parse_point(const json& j, std::size_t dim, const std::string& where) {
  schema(j.is_array(), where + ": vertex must be an array of numbers");
  schema(j.size() == dim, where + ": vertex has " + std::to_string(j.size()) + " coordinates, expected " +
                              std::to_string(dim));
  std::vector<double> c;
  for (const json& x : j) {
    schema(x.is_number(), where + ": coordinates must be numbers");
    c.push_back(x.get<double>());
  }
  Point p(std::move(c));
  schema(p.finite(), where + ": coordinates must be finite");
  return p;
}

inline void write_point(std::ostream& os, const Point& p) {
  os << '[';
  for (std::size_t i = 0; i < p.dim(); ++i) os << (i ? "," : "") << format_double(p[i]);
  os << ']';
}

inline std::string json_string(const std::string& s) { return json(s).dump(); }

}  // namespace detail

/// Reads a curve file:
///   {"format": "rcurves.curves", "version": 1, "dim": d,
///    "curves": [{"id": "...", "multiplicity": m, "vertices": [[...], ...]}, ...]}
/// `id` and `multiplicity` are optional (defaults: "c<index>", 1).
inline CurveCollection parse_curve_file(std::string_view text) {
  using detail::json;
  using detail::schema;
  const json j = detail::parse_json(text);
  detail::check_header(j, kCurveFormat);
  detail::check_keys(j, {"format", "version", "dim", "curves"}, "curve file");
  schema(j.contains("dim") && j["dim"].is_number_unsigned() && j["dim"].get<std::size_t>() >= 1,
         "dim must be a positive integer");
  const auto dim = j["dim"].get<std::size_t>();
  schema(j.contains("curves") && j["curves"].is_array(), "curves must be an array");
  CurveCollection out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j["curves"].size(); ++i) {
    const json& c = j["curves"][i];
    schema(c.is_object(), "curve " + std::to_string(i) + " must be an object");
    detail::check_keys(c, {"id", "multiplicity", "vertices"}, "curve " + std::to_string(i));
    std::string id = "c" + std::to_string(i);
    if (c.contains("id")) {
      schema(c["id"].is_string() && !c["id"].get<std::string>().empty(), "curve id must be a nonempty string");
      id = c["id"].get<std::string>();
    }
    schema(ids.insert(id).second, "duplicate curve id '" + id + "'");
    std::size_t mult = 1;
    if (c.contains("multiplicity")) {
      schema(c["multiplicity"].is_number_unsigned() && c["multiplicity"].get<std::size_t>() >= 1,
             "multiplicity of '" + id + "' must be a positive integer");
      mult = c["multiplicity"].get<std::size_t>();
    }
    schema(c.contains("vertices") && c["vertices"].is_array(), "curve '" + id + "' needs a vertices array");
    std::vector<Point> verts;
    for (const json& v : c["vertices"]) verts.push_back(detail::parse_point(v, dim, "curve '" + id + "'"));
    require(verts.size() >= 2, ErrorCode::trivial_path, "trivial path '" + id + "' (fewer than two vertices)");
    out.add(Polyline(std::move(verts)), mult, id);
  }
  return out;
}

inline CurveCollection read_curve_file(const std::string& path) { return parse_curve_file(read_file(path)); }

/// Writes a curve file, one curve per line. `dim` is used when the
/// collection is empty.
inline std::string serialize_curve_file(const CurveCollection& coll, std::size_t dim = 0) {
  std::ostringstream os;
  os << "{\"format\": \"" << kCurveFormat << "\", \"version\": " << kFormatVersion
     << ", \"dim\": " << (coll.empty() ? dim : coll.dim()) << ", \"curves\": [";
  for (std::size_t i = 0; i < coll.size(); ++i) {
    const CurveEntry& e = coll[i];
    os << (i ? ",\n" : "\n") << "  {\"id\": " << detail::json_string(e.id) << ", \"multiplicity\": " << e.multiplicity
       << ", \"vertices\": [";
    for (std::size_t v = 0; v < e.curve.size(); ++v) {
      if (v) os << ", ";
      detail::write_point(os, e.curve.vertex(v));
    }
    os << "]}";
  }
  os << (coll.empty() ? "]}\n" : "\n]}\n");
  return os.str();
}

/// Reads an ensemble description: {"format": "rcurves.ensemble",
/// "version": 1, "kind": "...", ...}, with the fields of EnsembleSpec
/// (hyphenated kind names, snake_case keys). Omitted fields keep defaults.
inline EnsembleSpec parse_ensemble_spec(std::string_view text) {
  using detail::json;
  using detail::schema;
  const json j = detail::parse_json(text);
  detail::check_header(j, kEnsembleFormat);
  detail::check_keys(j,
                     {"format", "version", "kind", "seed", "steps", "dim", "scale", "grid_size", "perturb_bound",
                      "num_curves", "alpha", "min_diameter", "max_diameter", "box", "center", "inner", "outer",
                      "target", "spread"},
                     "ensemble");
  schema(j.contains("kind") && j["kind"].is_string(), "ensemble needs a kind");
  EnsembleSpec s;
  s.kind = parse_ensemble_kind(j["kind"].get<std::string>());
  auto get_uint = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    schema(j[key].is_number_unsigned(), std::string(key) + " must be a nonnegative integer");
    field = j[key].get<std::remove_reference_t<decltype(field)>>();
  };
  auto get_real = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    schema(j[key].is_number(), std::string(key) + " must be a number");
    field = j[key].get<double>();
  };
  auto get_vec = [&](const char* key, std::vector<double>& field) {
    if (!j.contains(key)) return;
    schema(j[key].is_array(), std::string(key) + " must be an array of numbers");
    field.clear();
    for (const json& x : j[key]) {
      schema(x.is_number(), std::string(key) + " must be an array of numbers");
      field.push_back(x.get<double>());
    }
  };
  get_uint("seed", s.seed);
  get_uint("steps", s.steps);
  get_uint("dim", s.dim);
  get_real("scale", s.scale);
  get_uint("grid_size", s.grid_size);
  get_real("perturb_bound", s.perturb_bound);
  get_uint("num_curves", s.num_curves);
  get_real("alpha", s.alpha);
  get_real("min_diameter", s.min_diameter);
  get_real("max_diameter", s.max_diameter);
  get_real("box", s.box);
  get_vec("center", s.center);
  get_real("inner", s.inner);
  get_real("outer", s.outer);
  get_vec("target", s.target);
  get_real("spread", s.spread);
  schema(s.dim >= 1, "dim must be positive");
  if (s.kind == EnsembleKind::pathological) s.dim = 2;
  return s;
}

inline std::string serialize_ensemble_spec(const EnsembleSpec& s) {
  auto vec = [](const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
    return out + "]";
  };
  std::ostringstream os;
  os << "{\"format\": \"" << kEnsembleFormat << "\", \"version\": " << kFormatVersion << ",\n"
     << " \"kind\": \"" << to_string(s.kind) << "\", \"seed\": " << s.seed << ", \"steps\": " << s.steps
     << ", \"dim\": " << s.dim << ", \"scale\": " << format_double(s.scale) << ",\n"
     << " \"grid_size\": " << s.grid_size << ", \"perturb_bound\": " << format_double(s.perturb_bound)
     << ", \"num_curves\": " << s.num_curves << ", \"alpha\": " << format_double(s.alpha) << ",\n"
     << " \"min_diameter\": " << format_double(s.min_diameter) << ", \"max_diameter\": "
     << format_double(s.max_diameter) << ", \"box\": " << format_double(s.box) << ",\n"
     << " \"center\": " << vec(s.center) << ", \"inner\": " << format_double(s.inner)
     << ", \"outer\": " << format_double(s.outer) << ", \"target\": " << vec(s.target)
     << ", \"spread\": " << format_double(s.spread) << "}\n";
  return os.str();
}

/// Reads a coupling instance:
///   {"format": "rcurves.coupling", "version": 1, "dim": d,
///    "nets": [[point, ...], ...],                       // F^1..F^K
///    "measures": [{"atoms": [point, ...], "probs": [...]}, ...]}
inline Coding parse_coupling_file(std::string_view text) {
  using detail::json;
  using detail::schema;
  const json j = detail::parse_json(text);
  detail::check_header(j, kCouplingFormat);
  detail::check_keys(j, {"format", "version", "dim", "nets", "measures"}, "coupling file");
  schema(j.contains("dim") && j["dim"].is_number_unsigned() && j["dim"].get<std::size_t>() >= 1,
         "dim must be a positive integer");
  const auto dim = j["dim"].get<std::size_t>();
  schema(j.contains("nets") && j["nets"].is_array(), "nets must be an array");
  schema(j.contains("measures") && j["measures"].is_array() && !j["measures"].empty(),
         "measures must be a nonempty array");
  std::vector<Net> nets;
  for (const json& n : j["nets"]) {
    schema(n.is_array() && !n.empty(), "each net must be a nonempty array of points");
    Net net;
    for (const json& p : n) net.points.push_back(detail::parse_point(p, dim, "net"));
    nets.push_back(std::move(net));
  }
  std::vector<DiscreteMeasure> measures;
  for (const json& m : j["measures"]) {
    schema(m.is_object() && m.contains("atoms") && m.contains("probs") && m["atoms"].is_array() &&
               m["probs"].is_array(),
           "each measure needs atoms and probs arrays");
    std::vector<Point> atoms;
    std::vector<double> probs;
    for (const json& a : m["atoms"]) atoms.push_back(detail::parse_point(a, dim, "measure"));
    for (const json& p : m["probs"]) {
      schema(p.is_number(), "probabilities must be numbers");
      probs.push_back(p.get<double>());
    }
    measures.push_back(DiscreteMeasure(std::move(atoms), std::move(probs)));
  }
  return Coding(std::move(measures), std::move(nets));
}

/// CSV report writer. The first line names the schema and its version, the
/// second the columns; every row must have exactly that many cells.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::string_view kind, std::vector<std::string> columns)
      : os_(os), columns_(columns.size()) {
    os_ << "#schema=rcurves/" << kind << "/v1\n";
    write_cells(columns);
  }

  void row(const std::vector<std::string>& cells) {
    require(cells.size() == columns_, ErrorCode::invalid_argument, "CSV row has the wrong number of cells");
    write_cells(cells);
  }

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  static std::string cell(const Point& p) {
    std::string s;
    for (std::size_t i = 0; i < p.dim(); ++i) s += (i ? " " : "") + format_double(p[i]);
    return s;
  }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") == std::string::npos) {
        os_ << c;
      } else {
        os_ << '"';
        for (char ch : c) os_ << (ch == '"' ? "\"\"" : std::string(1, ch));
        os_ << '"';
      }
    }
    os_ << '\n';
  }

  std::ostream& os_;
  std::size_t columns_;
};

}  // namespace rcurves
