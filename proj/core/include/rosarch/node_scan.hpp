#pragma once

// Rule-based static analysis of C++ sources: detects node classes by their
// inheritance chain to rclcpp::Node and extracts endpoint creation calls into
// the NodeScan hand-off artifact. Only explicit syntactic markers are used;
// no endpoint is emitted without a concrete source location.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rosarch/model.hpp"

namespace rosarch {

struct EndpointRecord {
  PortKind kind = PortKind::Publisher;
  std::string declared_name;   // "<dynamic>" when not a string literal
  std::string interface_type;  // normalized pkg::kind::Name
  std::optional<std::string> handler;
  std::string file;  // repo-relative
  int line = 0;

  bool operator==(const EndpointRecord&) const = default;
};

struct NodeClassRecord {
  std::string class_name;
  std::optional<std::string> declared_node_name;  // base-constructor argument
  std::vector<std::string> files;                 // sorted, repo-relative
  std::vector<EndpointRecord> endpoints;          // ordered by (file, line)
  std::vector<std::string> inheritance_chain;     // class .. rclcpp::Node

  bool operator==(const NodeClassRecord&) const = default;
};

struct NodeScan {
  std::string repo_root;
  std::string tool_version;
  std::vector<NodeClassRecord> nodes;  // sorted by class_name
  std::vector<std::string> warnings;

  bool operator==(const NodeScan&) const = default;
};

struct ScanConfig {
  // Globs are matched against repo-relative paths; empty include list means
  // every file with a C++ source/header extension.
  std::vector<std::string> include_globs;
  std::vector<std::string> exclude_globs;
  int max_inheritance_depth = 3;
};

// Deterministic: same tree and config produce a byte-identical artifact.
// Unreadable files are skipped with a warning, never fatal.
NodeScan scan_repository(const std::filesystem::path& root, const ScanConfig& config = {});

// Direct base classes declared in one file's text, keyed by class name.
std::map<std::string, std::vector<std::string>> collect_class_bases(std::string_view file_text);

// A class is a node iff its inheritance chain, resolved transitively over
// `known_bases`, reaches rclcpp::Node within `max_depth` hops. Endpoints and
// file attribution are left empty; scan_repository fills them in.
std::vector<NodeClassRecord> detect_node_classes(
    std::string_view file_text,
    const std::map<std::string, std::vector<std::string>>& known_bases, int max_depth = 3,
    std::vector<std::string>* warnings = nullptr);

// Recognizes create_publisher / create_subscription / create_service /
// create_client inside a class body or member definition. Non-literal names
// yield "<dynamic>" plus a warning.
std::vector<EndpointRecord> extract_endpoints(std::string_view class_body,
                                              std::vector<std::string>* warnings = nullptr);

// Port identifiers p1..pn for publishers/subscribers and s1..sn for service
// ports, assigned in declaration order.
std::vector<Port> ports_from_endpoints(const std::vector<EndpointRecord>& endpoints);

class ScanIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical JSON with sorted keys; write/read round-trips losslessly.
std::string write_scan(const NodeScan& scan);
NodeScan read_scan(std::string_view json_bytes);
void save_scan(const NodeScan& scan, const std::filesystem::path& path);
NodeScan load_scan(const std::filesystem::path& path);

}  // namespace rosarch
