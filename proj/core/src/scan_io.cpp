#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rosarch/node_scan.hpp"

namespace rosarch {

namespace {

using nlohmann::json;

json endpoint_to_json(const EndpointRecord& e) {
  json j;
  j["kind"] = to_string(e.kind);
  j["declared_name"] = e.declared_name;
  j["interface_type"] = e.interface_type;
  if (e.handler) j["handler"] = *e.handler;
  j["file"] = e.file;
  j["line"] = e.line;
  return j;
}

json node_to_json(const NodeClassRecord& n) {
  json j;
  j["class_name"] = n.class_name;
  if (n.declared_node_name) j["declared_node_name"] = *n.declared_node_name;
  j["files"] = n.files;
  j["inheritance_chain"] = n.inheritance_chain;
  j["endpoints"] = json::array();
  for (const auto& e : n.endpoints) j["endpoints"].push_back(endpoint_to_json(e));
  return j;
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ScanIoError("scan artifact: missing key '" + where + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_string()) throw ScanIoError("scan artifact: '" + where + key + "' must be a string");
  return v.get<std::string>();
}

EndpointRecord endpoint_from_json(const json& j, const std::string& where) {
  EndpointRecord e;
  auto kind = port_kind_from_string(require_string(j, "kind", where));
  if (!kind) throw ScanIoError("scan artifact: '" + where + "kind' has an unknown value");
  e.kind = *kind;
  e.declared_name = require_string(j, "declared_name", where);
  e.interface_type = require_string(j, "interface_type", where);
  if (j.contains("handler")) e.handler = j["handler"].get<std::string>();
  e.file = require_string(j, "file", where);
  const json& line = require(j, "line", where);
  if (!line.is_number_integer())
    throw ScanIoError("scan artifact: '" + where + "line' must be an integer");
  e.line = line.get<int>();
  return e;
}

}  // namespace

std::string write_scan(const NodeScan& scan) {
  json j;
  j["repo_root"] = scan.repo_root;
  j["tool_version"] = scan.tool_version;
  j["warnings"] = scan.warnings;
  j["nodes"] = json::array();
  for (const auto& n : scan.nodes) j["nodes"].push_back(node_to_json(n));
  return j.dump(2) + "\n";
}

NodeScan read_scan(std::string_view json_bytes) {
  json j;
  try {
    j = json::parse(json_bytes);
  } catch (const json::parse_error& e) {
    throw ScanIoError(std::string("scan artifact is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ScanIoError("scan artifact: top level must be an object");

  NodeScan scan;
  scan.repo_root = require_string(j, "repo_root", "");
  scan.tool_version = require_string(j, "tool_version", "");
  const json& warnings = require(j, "warnings", "");
  if (!warnings.is_array()) throw ScanIoError("scan artifact: 'warnings' must be an array");
  for (const auto& w : warnings) scan.warnings.push_back(w.get<std::string>());

  const json& nodes = require(j, "nodes", "");
  if (!nodes.is_array()) throw ScanIoError("scan artifact: 'nodes' must be an array");
  std::size_t index = 0;
  for (const auto& nj : nodes) {
    const std::string where = "nodes[" + std::to_string(index) + "].";
    NodeClassRecord rec;
    rec.class_name = require_string(nj, "class_name", where);
    if (nj.contains("declared_node_name"))
      rec.declared_node_name = nj["declared_node_name"].get<std::string>();
    const json& files = require(nj, "files", where);
    for (const auto& f : files) rec.files.push_back(f.get<std::string>());
    if (rec.files.empty())
      throw ScanIoError("scan artifact: '" + where + "files' must list at least one path");
    const json& chain = require(nj, "inheritance_chain", where);
    for (const auto& c : chain) rec.inheritance_chain.push_back(c.get<std::string>());
    const json& eps = require(nj, "endpoints", where);
    std::size_t ei = 0;
    for (const auto& ej : eps) {
      rec.endpoints.push_back(
          endpoint_from_json(ej, where + "endpoints[" + std::to_string(ei) + "]."));
      ++ei;
    }
    scan.nodes.push_back(std::move(rec));
    ++index;
  }
  return scan;
}

void save_scan(const NodeScan& scan, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScanIoError("cannot write scan artifact: " + path.string());
  out << write_scan(scan);
}

NodeScan load_scan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScanIoError("cannot read scan artifact: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return read_scan(buffer.str());
}

}  // namespace rosarch
