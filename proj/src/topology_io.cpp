#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include "json.hpp"

#include "ctrplace/topology.hpp"

namespace ctrplace {

namespace {

namespace pt = boost::property_tree;

struct RawEdge {
  NodeId u;
  NodeId v;
  std::optional<double> latency_ms;
};

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw TopologyError("cannot parse " + what + ": '" + text + "'");
  }
}

// Shared by both loaders: fill in missing latencies from coordinates.
Topology assemble(std::string name, std::vector<Node> nodes, const std::vector<RawEdge>& raw,
                  const LoadOptions& opts) {
  if (nodes.empty()) throw TopologyError("topology '" + name + "' has no nodes");
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) {
    if (e.u == e.v) continue;
    double lat = 0.0;
    if (e.latency_ms) {
      lat = *e.latency_ms;
    } else {
      const auto& a = nodes[static_cast<std::size_t>(e.u)];
      const auto& b = nodes[static_cast<std::size_t>(e.v)];
      if (!a.coord || !b.coord) {
        const auto& missing = !a.coord ? a : b;
        throw TopologyError("node '" + missing.label + "' has no coordinates and edge (" +
                            std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") has no explicit latency");
      }
      lat = geo_latency(a, b, opts.speed_km_per_ms);
    }
    edges.push_back({e.u, e.v, lat});
  }
  return Topology(std::move(name), std::move(nodes), std::move(edges));
}

}  // namespace

Topology load_graphml(std::istream& in, const LoadOptions& opts, std::string fallback_name) {
  if (!(opts.speed_km_per_ms > 0.0)) throw std::invalid_argument("propagation speed must be > 0");
  pt::ptree doc;
  try {
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw TopologyError(std::string("GraphML parse error: ") + e.what());
  }
  const auto root = doc.get_child_optional("graphml");
  if (!root) throw TopologyError("GraphML parse error: missing <graphml> element");

  // key id -> attr.name
  std::map<std::string, std::string> key_names;
  for (const auto& [tag, child] : *root) {
    if (tag != "key") continue;
    key_names[child.get<std::string>("<xmlattr>.id", "")] =
        child.get<std::string>(pt::path("<xmlattr>/attr.name", '/'), "");
  }
  const auto graph = root->get_child_optional("graph");
  if (!graph) throw TopologyError("GraphML parse error: missing <graph> element");

  auto data_of = [&](const pt::ptree& elem) {
    std::map<std::string, std::string> out;
    for (const auto& [tag, child] : elem) {
      if (tag != "data") continue;
      auto key = child.get<std::string>("<xmlattr>.key", "");
      auto it = key_names.find(key);
      out[it != key_names.end() ? it->second : key] = child.data();
    }
    return out;
  };

  std::string name = std::move(fallback_name);
  std::vector<Node> nodes;
  std::map<std::string, NodeId> index_of;
  std::vector<RawEdge> raw;

  for (const auto& [tag, child] : *graph) {
    if (tag == "data") {
      auto key = child.get<std::string>("<xmlattr>.key", "");
      auto it = key_names.find(key);
      if (it != key_names.end() && (it->second == "Network" || it->second == "label") &&
          !child.data().empty()) {
        name = child.data();
      }
    } else if (tag == "node") {
      auto gid = child.get<std::string>("<xmlattr>.id", "");
      if (index_of.contains(gid)) throw TopologyError("duplicate node id '" + gid + "'");
      const auto data = data_of(child);
      Node nd;
      nd.id = static_cast<NodeId>(nodes.size());
      auto label = data.find("label");
      nd.label = label != data.end() ? label->second : gid;
      auto lat = data.find("Latitude");
      auto lon = data.find("Longitude");
      if (lat != data.end() && lon != data.end()) {
        nd.coord = GeoCoord{parse_double(lat->second, "Latitude of node '" + gid + "'"),
                            parse_double(lon->second, "Longitude of node '" + gid + "'")};
      }
      index_of.emplace(gid, nd.id);
      nodes.push_back(std::move(nd));
    }
  }
  for (const auto& [tag, child] : *graph) {
    if (tag != "edge") continue;
    auto src = child.get<std::string>("<xmlattr>.source", "");
    auto dst = child.get<std::string>("<xmlattr>.target", "");
    auto s = index_of.find(src);
    auto t = index_of.find(dst);
    if (s == index_of.end() || t == index_of.end()) {
      throw TopologyError("edge references unknown node ('" + src + "', '" + dst + "')");
    }
    RawEdge e{s->second, t->second, std::nullopt};
    const auto data = data_of(child);
    if (auto it = data.find("latency_ms"); it != data.end()) {
      e.latency_ms = parse_double(it->second, "latency_ms");
    }
    raw.push_back(e);
  }
  return assemble(std::move(name), std::move(nodes), raw, opts);
}

Topology load_json_topology(std::istream& in, const LoadOptions& opts) {
  if (!(opts.speed_km_per_ms > 0.0)) throw std::invalid_argument("propagation speed must be > 0");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError(std::string("JSON parse error: ") + e.what());
  }
  try {
    std::string name = doc.value("name", std::string{});
    const auto& jnodes = doc.at("nodes");
    std::vector<Node> nodes(jnodes.size());
    std::vector<bool> filled(jnodes.size(), false);
    for (const auto& jn : jnodes) {
      auto id = jn.at("id").get<long long>();
      if (id < 0 || static_cast<std::size_t>(id) >= nodes.size() ||
          filled[static_cast<std::size_t>(id)]) {
        throw TopologyError("node ids must be dense 0..N-1; bad id " + std::to_string(id));
      }
      Node& nd = nodes[static_cast<std::size_t>(id)];
      nd.id = static_cast<NodeId>(id);
      nd.label = jn.value("label", std::to_string(id));
      if (jn.contains("latitude") && jn.contains("longitude")) {
        nd.coord = GeoCoord{jn.at("latitude").get<double>(), jn.at("longitude").get<double>()};
      }
      filled[static_cast<std::size_t>(id)] = true;
    }
    std::vector<RawEdge> raw;
    for (const auto& je : doc.value("edges", nlohmann::json::array())) {
      auto u = je.at("source").get<long long>();
      auto v = je.at("target").get<long long>();
      auto n = static_cast<long long>(nodes.size());
      if (u < 0 || u >= n || v < 0 || v >= n) throw TopologyError("edge endpoint out of range");
      RawEdge e{static_cast<NodeId>(u), static_cast<NodeId>(v), std::nullopt};
      if (je.contains("latency_ms")) e.latency_ms = je.at("latency_ms").get<double>();
      raw.push_back(e);
    }
    return assemble(std::move(name), std::move(nodes), raw, opts);
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError(std::string("malformed JSON topology: ") + e.what());
  }
}

Topology load_topology(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TopologyError("cannot open topology file " + path.string());
  if (path.extension() == ".json") return load_json_topology(in, opts);
  return load_graphml(in, opts, path.stem().string());
}

}  // namespace ctrplace
