#pragma once

// Launch and build configuration analysis: parses XML launch files and a
// fixed construct subset of Python launch files, maps executables to node
// classes via build files, and resolves everything into composed classifiers.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rosarch/model.hpp"
#include "rosarch/node_scan.hpp"

namespace rosarch {

struct LaunchAction;

struct NodeInstantiation {
  std::string executable;
  std::string package;
  std::optional<std::string> name;  // launch-assigned node name
  std::optional<std::string> ns;    // namespace, may be multi-segment or absolute
  std::vector<std::pair<std::string, std::string>> remappings;  // from -> to
};

struct IncludeLaunch {
  std::string target;  // repo-relative path, empty when unresolved
  std::optional<std::string> ns;
  std::optional<std::string> part_name;  // overrides the anonymous default
};

struct NamespacePush {
  std::string raw;  // may be multi-segment; split during resolution
};

struct LaunchGroup {
  std::vector<LaunchAction> children;
};

struct LaunchAction {
  std::variant<NodeInstantiation, IncludeLaunch, NamespacePush, LaunchGroup> value;
};

struct LaunchSpec {
  std::string path;  // repo-relative
  std::vector<LaunchAction> actions;
  std::vector<std::string> warnings;
};

class LaunchParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LaunchCycleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LaunchContext {
  // Package name -> repo-relative directory, for $(find-pkg-share ...) and
  // get_package_share_directory(...) resolution.
  std::map<std::string, std::string> package_dirs;
  // Values for $(var ...) lookups; fall back to declared <arg> defaults.
  std::map<std::string, std::string> argument_overrides;
};

// Dispatches on the file suffix: ".launch.xml" is parsed fully,
// ".launch.py" through pattern-based extraction of the supported construct
// subset. Unsupported constructs become warnings, never extra model content.
LaunchSpec parse_launch(const std::string& repo_relative_path, std::string_view text,
                        const LaunchContext& ctx = {});

// "counting.launch.xml" -> "counting"
std::string launch_stem(const std::string& path);

// Repo-relative paths of all *.launch.xml / *.launch.py files, sorted.
std::vector<std::string> discover_launch_files(const std::filesystem::path& repo_root);

// Package name -> repo-relative directory containing package.xml.
std::map<std::string, std::string> discover_packages(const std::filesystem::path& repo_root);

struct BuildTarget {
  std::string package;
  std::string entry_source;  // repo-relative path of the main source
  std::string node_class;

  bool operator==(const BuildTarget&) const = default;
};

struct BuildMap {
  std::map<std::string, BuildTarget> executables;
  std::vector<std::string> warnings;
};

// Scans build files textually for target declarations and matches each
// executable's entry source against the scanned node classes.
BuildMap parse_build_config(const std::filesystem::path& repo_root, const NodeScan& scan);

// Resolves one launch file into a composed classifier: parts from node
// instantiations and includes, bindings from equal resolved runtime names,
// namespace scopes from pushes, unconnected ports promoted to external
// ports. Throws LaunchCycleError on include cycles.
ComposedClassifier resolve_composition(const LaunchSpec& spec, const NodeScan& scan,
                                       const BuildMap& build,
                                       const std::map<std::string, LaunchSpec>& all_specs,
                                       std::vector<std::string>* warnings = nullptr);

}  // namespace rosarch
