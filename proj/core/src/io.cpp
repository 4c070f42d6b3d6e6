#include "gilbert/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gilbert {

const char* to_string(InputErrorCode code) {
  switch (code) {
    case InputErrorCode::kSyntax:
      return "E10 syntax";
    case InputErrorCode::kSchema:
      return "E11 schema";
    case InputErrorCode::kDimension:
      return "E12 dimension";
    case InputErrorCode::kNorm:
      return "E13 norm";
    case InputErrorCode::kWeightFixed:
      return "E14 weight.d";
    case InputErrorCode::kWeightVariable:
      return "E15 weight.h";
    case InputErrorCode::kFlow:
      return "E16 flow";
    case InputErrorCode::kCoordinate:
      return "E17 coordinate";
    case InputErrorCode::kSinkOnSource:
      return "E18 sink";
  }
  return "E?? unknown";
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(InputErrorCode code, const std::string& what) { throw InstanceParseError(code, what); }

const json& member(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(InputErrorCode::kSchema, where + " is missing \"" + key + "\"");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(InputErrorCode::kSchema, where + " must be a number");
  return v.get<double>();
}

Vector point(const json& v, int dim, const std::string& where) {
  if (!v.is_array()) fail(InputErrorCode::kSchema, where + " must be an array");
  if (static_cast<int>(v.size()) != dim) {
    fail(InputErrorCode::kDimension,
         where + " has " + std::to_string(v.size()) + " coordinates, expected " + std::to_string(dim));
  }
  Vector p(dim);
  for (int i = 0; i < dim; ++i) {
    p[i] = number(v[static_cast<size_t>(i)], where);
    if (!std::isfinite(p[i])) fail(InputErrorCode::kCoordinate, where + " has a non-finite coordinate");
  }
  return p;
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string coords(const Vector& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out + "]";
}

// Minimal streaming writer; keys are emitted in call order.
class Writer {
 public:
  Writer& open(const std::string& key, char bracket) {
    prefix(key);
    out_ << bracket;
    first_.push_back(true);
    return *this;
  }
  Writer& close(char bracket) {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) newline();
    out_ << bracket;
    return *this;
  }
  Writer& raw(const std::string& key, const std::string& value) {
    prefix(key);
    out_ << value;
    return *this;
  }
  Writer& num(const std::string& key, double v) { return raw(key, fmt(v)); }
  Writer& integer(const std::string& key, long v) { return raw(key, std::to_string(v)); }
  Writer& str(const std::string& key, const std::string& v) { return raw(key, quote(v)); }
  std::string text() const { return out_.str() + "\n"; }

 private:
  void newline() { out_ << '\n' << std::string(2 * first_.size(), ' '); }
  void prefix(const std::string& key) {
    if (!first_.empty()) {
      if (!first_.back()) out_ << ',';
      first_.back() = false;
      newline();
    }
    if (!key.empty()) out_ << quote(key) << ": ";
  }
  std::ostringstream out_;
  std::vector<bool> first_;
};

void write_instance(Writer& w, const std::string& key, const Instance& inst) {
  w.open(key, '{');
  w.integer("dimension", inst.space.dim());
  w.open("norm", '{');
  if (inst.space.kind() == NormKind::kEuclidean) {
    w.str("kind", "euclidean");
  } else {
    w.str("kind", "lp").num("p", inst.space.exponent());
  }
  w.close('}');
  w.open("weight", '{').num("d", inst.weight.d).num("h", inst.weight.h).close('}');
  w.open("sources", '[');
  for (const Source& s : inst.sources) {
    w.open("", '{').raw("position", coords(s.position)).num("flow", s.flow).close('}');
  }
  w.close(']');
  w.raw("sink", coords(inst.sink));
  w.close('}');
}

const char* role_name(Role r) {
  switch (r) {
    case Role::kSource:
      return "source";
    case Role::kSink:
      return "sink";
    case Role::kSteiner:
      return "steiner";
  }
  return "?";
}

std::string index_list(const std::vector<int>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out + "]";
}

}  // namespace

ParsedInstance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::out_of_range& e) {
    // Only number overflow is raised while parsing; such a value cannot be a
    // finite coordinate or parameter.
    fail(InputErrorCode::kCoordinate, e.what());
  } catch (const json::exception& e) {
    fail(InputErrorCode::kSyntax, e.what());
  }
  if (!doc.is_object()) fail(InputErrorCode::kSchema, "document must be an object");

  const json& dim_v = member(doc, "dimension", "document");
  if (!dim_v.is_number_integer() || dim_v.get<long>() < 2 || dim_v.get<long>() > 64) {
    fail(InputErrorCode::kDimension, "dimension must be an integer >= 2");
  }
  const int dim = dim_v.get<int>();

  const json& norm_v = member(doc, "norm", "document");
  if (!norm_v.is_object()) fail(InputErrorCode::kSchema, "norm must be an object");
  const json& kind_v = member(norm_v, "kind", "norm");
  if (!kind_v.is_string()) fail(InputErrorCode::kSchema, "norm.kind must be a string");
  const std::string kind = kind_v.get<std::string>();
  ParsedInstance out;
  Instance& inst = out.instance;
  if (kind == "euclidean") {
    inst.space = NormSpace::euclidean(dim);
  } else if (kind == "lp") {
    const double p = number(member(norm_v, "p", "norm"), "norm.p");
    inst.space = NormSpace::lp(p, dim);
    if (const Validation v = validate_space(inst.space)) fail(InputErrorCode::kNorm, v->reason);
  } else {
    fail(InputErrorCode::kSchema, "norm.kind must be \"euclidean\" or \"lp\", got \"" + kind + "\"");
  }

  const json& weight_v = member(doc, "weight", "document");
  if (!weight_v.is_object()) fail(InputErrorCode::kSchema, "weight must be an object");
  inst.weight.d = number(member(weight_v, "d", "weight"), "weight.d");
  inst.weight.h = number(member(weight_v, "h", "weight"), "weight.h");
  if (!(inst.weight.d > 0.0) || !std::isfinite(inst.weight.d)) {
    fail(InputErrorCode::kWeightFixed, "d must be positive and finite");
  }
  if (!(inst.weight.h >= 0.0) || !std::isfinite(inst.weight.h)) {
    fail(InputErrorCode::kWeightVariable, "h must be non-negative and finite");
  }

  const json& sources_v = member(doc, "sources", "document");
  if (!sources_v.is_array() || sources_v.empty()) fail(InputErrorCode::kSchema, "sources must be a non-empty array");
  std::map<std::vector<double>, size_t> seen;
  for (size_t i = 0; i < sources_v.size(); ++i) {
    const std::string where = "sources[" + std::to_string(i) + "]";
    const json& s = sources_v[i];
    if (!s.is_object()) fail(InputErrorCode::kSchema, where + " must be an object");
    const Vector pos = point(member(s, "position", where), dim, where + ".position");
    const double flow = number(member(s, "flow", where), where + ".flow");
    if (!(flow > 0.0) || !std::isfinite(flow)) fail(InputErrorCode::kFlow, where + ".flow must be positive and finite");
    const std::vector<double> key(pos.data(), pos.data() + pos.size());
    const auto [it, fresh] = seen.emplace(key, inst.sources.size());
    if (fresh) {
      inst.sources.push_back({pos, flow});
    } else {
      inst.sources[it->second].flow += flow;
      out.warnings.push_back(where + " duplicates the position of source " + std::to_string(it->second) +
                             "; flows merged");
    }
  }

  inst.sink = point(member(doc, "sink", "document"), dim, "sink");
  for (size_t i = 0; i < inst.sources.size(); ++i) {
    if (inst.sources[i].position == inst.sink) {
      fail(InputErrorCode::kSinkOnSource, "sink coincides with source " + std::to_string(i));
    }
  }
  validate_instance(inst);
  return out;
}

std::string emit_instance(const Instance& inst) {
  Writer w;
  write_instance(w, "", inst);
  return w.text();
}

std::string emit_result(const EmbeddedArborescence& arb, const Certificate& cert, double cost,
                        const ResultMetadata& meta) {
  Writer w;
  w.open("", '{');
  w.num("cost", cost);

  w.open("vertices", '[');
  for (const Vertex& v : arb.vertices) {
    w.open("", '{')
        .integer("id", v.id)
        .str("role", role_name(v.role))
        .raw("position", coords(v.position))
        .num("supply", v.supply)
        .close('}');
  }
  w.close(']');

  w.open("edges", '[');
  for (const Edge& e : arb.edges) {
    w.open("", '{')
        .integer("tail", e.tail)
        .integer("head", e.head)
        .num("flow", e.flow)
        .num("weight", e.weight)
        .num("length", e.length)
        .close('}');
  }
  w.close(']');

  w.open("certificate", '{');
  w.str("verdict", cert.pass ? "pass" : "fail");
  w.num("max_balancing_residual", cert.max_balancing_residual());
  w.num("min_collapsing_slack", cert.min_collapsing_slack());
  w.open("tolerances", '{')
      .num("balancing", cert.tolerances.balancing)
      .num("collapsing", cert.tolerances.collapsing)
      .close('}');
  w.open("steiner_points", '[');
  for (const SteinerCertificate& p : cert.points) {
    w.open("", '{')
        .integer("vertex", p.vertex)
        .integer("degree", p.degree)
        .raw("incoming", index_list(p.incoming_neighbors))
        .integer("outgoing", p.outgoing_neighbor)
        .num("balancing_residual", p.balancing_residual)
        .num("min_collapsing_slack", p.min_slack());
    w.open("collapsing_slacks", '[');
    for (const SubsetSlack& s : p.collapsing_slacks) {
      w.open("", '{').raw("subset", index_list(s.subset)).num("slack", s.slack).close('}');
    }
    w.close(']').close('}');
  }
  w.close(']');
  w.close('}');

  w.open("solver", '{');
  w.integer("topologies_examined", meta.topologies_examined);
  w.integer("topologies_failed", meta.topologies_failed);
  w.integer("iterations", meta.iterations);
  w.str("topology_key", meta.topology_key);
  if (meta.oracle) {
    w.open("oracle", '{')
        .num("cost", meta.oracle->cost)
        .num("bound", meta.oracle->bound)
        .num("spacing", meta.oracle->spacing)
        .str("topology_key", meta.oracle->topology_key)
        .raw("agrees", std::abs(cost - meta.oracle->cost) <= meta.oracle->bound ? "true" : "false")
        .close('}');
  }
  if (meta.perturbation) {
    w.open("perturbation", '{')
        .raw("seed", std::to_string(meta.perturbation->seed))
        .integer("trials", meta.perturbation->trials)
        .num("magnitude", meta.perturbation->magnitude)
        .num("max_decrease", meta.perturbation->max_decrease)
        .close('}');
  }
  w.close('}');

  Instance echo;
  echo.space = arb.space;
  echo.weight = arb.weight;
  for (const Vertex& v : arb.vertices) {
    if (v.role == Role::kSource) echo.sources.push_back({v.position, v.supply});
    if (v.role == Role::kSink) echo.sink = v.position;
  }
  write_instance(w, "instance", echo);
  w.close('}');
  return w.text();
}

std::string emit_svg(const EmbeddedArborescence& arb) {
  if (arb.space.dim() != 2) {
    throw InvalidInput("unsupported dimension " + std::to_string(arb.space.dim()) + " for SVG output");
  }
  double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double hi[2] = {-lo[0], -lo[1]};
  for (const Vertex& v : arb.vertices) {
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], v.position[a]);
      hi[a] = std::max(hi[a], v.position[a]);
    }
  }
  double extent = std::max(hi[0] - lo[0], hi[1] - lo[1]);
  if (!(extent > 0.0)) extent = 1.0;
  const double margin = 0.05 * extent;
  double max_weight = 0.0;
  for (const Edge& e : arb.edges) max_weight = std::max(max_weight, e.weight);
  const double stroke_per_weight = max_weight > 0.0 ? 0.012 * extent / max_weight : 0.0;
  const double radius = 0.012 * extent;

  // y grows downward in SVG; flip it.
  const auto x = [&](const Vector& p) { return p[0]; };
  const auto y = [&](const Vector& p) { return -p[1]; };
  char buf[256];
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"%.9g %.9g %.9g %.9g\">\n",
                lo[0] - margin, -hi[1] - margin, hi[0] - lo[0] + 2 * margin, hi[1] - lo[1] + 2 * margin);
  out += buf;
  out +=
      "  <defs>\n"
      "    <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"4\" markerHeight=\"4\" "
      "orient=\"auto\" markerUnits=\"strokeWidth\">\n"
      "      <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#1f4e79\"/>\n"
      "    </marker>\n"
      "  </defs>\n";
  for (const Edge& e : arb.edges) {
    const Vector& a = arb.vertices[static_cast<size_t>(e.tail)].position;
    Vector b = arb.vertices[static_cast<size_t>(e.head)].position;
    const double len = (b - a).norm();
    if (len > 2 * radius) b -= (b - a) * (radius / len);
    std::snprintf(buf, sizeof buf,
                  "  <line class=\"edge\" x1=\"%.9g\" y1=\"%.9g\" x2=\"%.9g\" y2=\"%.9g\" stroke=\"#1f4e79\" "
                  "stroke-width=\"%.9g\" marker-end=\"url(#arrow)\"/>\n",
                  x(a), y(a), x(b), y(b), stroke_per_weight * e.weight);
    out += buf;
  }
  for (const Vertex& v : arb.vertices) {
    const bool steiner = v.role == Role::kSteiner;
    const char* fill = steiner ? "none" : (v.role == Role::kSink ? "#b22222" : "#222222");
    std::snprintf(buf, sizeof buf,
                  "  <circle class=\"%s\" cx=\"%.9g\" cy=\"%.9g\" r=\"%.9g\" fill=\"%s\" stroke=\"#222222\" "
                  "stroke-width=\"%.9g\"/>\n",
                  role_name(v.role), x(v.position), y(v.position), radius, fill, 0.3 * radius);
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gilbert
