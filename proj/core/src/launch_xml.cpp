#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <sstream>

#include "launch_detail.hpp"
#include "rosarch/launch.hpp"
#include "rosarch/strings.hpp"

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace rosarch {

std::string launch_stem(const std::string& path) {
  fs::path p(path);
  std::string stem = p.stem().string();
  if (fs::path(stem).extension() == ".launch") stem = fs::path(stem).stem().string();
  return stem;
}

std::vector<std::string> discover_launch_files(const fs::path& repo_root) {
  std::vector<std::string> out;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(repo_root, ec), end; it != end && !ec;
       it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    const std::string name = it->path().filename().string();
    if (name.size() > 11 && (name.ends_with(".launch.xml") || name.ends_with(".launch.py")))
      out.push_back(fs::relative(it->path(), repo_root).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, std::string> discover_packages(const fs::path& repo_root) {
  std::map<std::string, std::string> out;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(repo_root, ec), end; it != end && !ec;
       it.increment(ec)) {
    if (!it->is_regular_file() || it->path().filename() != "package.xml") continue;
    try {
      pt::ptree tree;
      pt::read_xml(it->path().string(), tree);
      auto name = tree.get_optional<std::string>("package.name");
      if (name && !name->empty())
        out.emplace(str::trim(*name),
                    fs::relative(it->path().parent_path(), repo_root).generic_string());
    } catch (const pt::xml_parser_error&) {
      // Malformed manifest; the package stays unresolvable.
    }
  }
  return out;
}

namespace detail_launch {

// Shared between the XML and Python frontends.

std::string resolve_include_target(const std::string& raw, const std::string& including_path,
                                   const LaunchContext& ctx, std::vector<std::string>& warnings) {
  std::string value = str::trim(raw);
  if (value.empty()) return "";

  // $(find-pkg-share pkg)/rest
  const std::string marker = "$(find-pkg-share ";
  if (str::starts_with(value, marker)) {
    auto close = value.find(')');
    if (close == std::string::npos) {
      warnings.push_back(including_path + ": malformed substitution in include '" + raw + "'");
      return "";
    }
    const std::string pkg = str::trim(value.substr(marker.size(), close - marker.size()));
    auto it = ctx.package_dirs.find(pkg);
    if (it == ctx.package_dirs.end()) {
      warnings.push_back(including_path + ": include references unknown package '" + pkg + "'");
      return "";
    }
    std::string rest = value.substr(close + 1);
    if (!rest.empty() && rest.front() == '/') rest.erase(rest.begin());
    return (fs::path(it->second) / rest).lexically_normal().generic_string();
  }
  if (value.find("$(") != std::string::npos) {
    warnings.push_back(including_path + ": unsupported substitution in include '" + raw + "'");
    return "";
  }
  fs::path target(value);
  if (target.is_absolute()) return target.lexically_normal().generic_string();
  return (fs::path(including_path).parent_path() / target).lexically_normal().generic_string();
}

}  // namespace detail_launch

namespace {

using detail_launch::resolve_include_target;

struct XmlParseState {
  const LaunchContext* ctx = nullptr;
  std::string path;
  std::map<std::string, std::string> arg_defaults;
  std::vector<std::string>* warnings = nullptr;
};

std::optional<std::string> attr(const pt::ptree& node, const std::string& name) {
  if (auto attrs = node.get_child_optional("<xmlattr>"))
    if (auto v = attrs->get_optional<std::string>(name)) return *v;
  return std::nullopt;
}

// Resolves $(var x) against overrides then declared defaults; nullopt when
// the value stays unresolvable.
std::optional<std::string> resolve_value(const std::string& raw, const XmlParseState& state) {
  const std::string value = str::trim(raw);
  if (!str::starts_with(value, "$(var ")) {
    if (value.find("$(") != std::string::npos) return std::nullopt;
    return value;
  }
  auto close = value.find(')');
  if (close == std::string::npos) return std::nullopt;
  const std::string name = str::trim(value.substr(6, close - 6));
  if (auto it = state.ctx->argument_overrides.find(name); it != state.ctx->argument_overrides.end())
    return it->second;
  if (auto it = state.arg_defaults.find(name); it != state.arg_defaults.end()) return it->second;
  return std::nullopt;
}

bool truthy(const std::string& v) {
  return v == "true" || v == "True" || v == "1";
}

// Evaluates if/unless conditions; nullopt means "keep the action".
// Returns false when the action must be dropped.
bool condition_keeps_action(const pt::ptree& node, const std::string& element,
                            XmlParseState& state) {
  if (auto cond = attr(node, "if")) {
    auto value = resolve_value(*cond, state);
    if (!value) {
      state.warnings->push_back(state.path + ": unresolvable if=\"" + *cond + "\" on <" +
                                element + ">, action skipped");
      return false;
    }
    return truthy(*value);
  }
  if (auto cond = attr(node, "unless")) {
    auto value = resolve_value(*cond, state);
    if (!value) {
      state.warnings->push_back(state.path + ": unresolvable unless=\"" + *cond + "\" on <" +
                                element + ">, action skipped");
      return false;
    }
    return !truthy(*value);
  }
  return true;
}

std::vector<LaunchAction> parse_xml_children(const pt::ptree& parent, XmlParseState& state);

std::optional<LaunchAction> parse_xml_element(const std::string& element, const pt::ptree& node,
                                              XmlParseState& state) {
  if (!condition_keeps_action(node, element, state)) return std::nullopt;

  if (element == "node") {
    NodeInstantiation inst;
    auto exec = attr(node, "exec");
    if (!exec) exec = attr(node, "executable");
    if (!exec) {
      state.warnings->push_back(state.path + ": <node> without exec attribute skipped");
      return std::nullopt;
    }
    auto resolved_exec = resolve_value(*exec, state);
    if (!resolved_exec) {
      state.warnings->push_back(state.path + ": unresolvable exec=\"" + *exec + "\" skipped");
      return std::nullopt;
    }
    inst.executable = *resolved_exec;
    if (auto pkg = attr(node, "pkg")) inst.package = resolve_value(*pkg, state).value_or("");
    if (auto name = attr(node, "name")) {
      if (auto v = resolve_value(*name, state)) inst.name = *v;
      else
        state.warnings->push_back(state.path + ": unresolvable name on <node " +
                                  inst.executable + ">, using the source-declared name");
    }
    if (auto ns = attr(node, "namespace")) {
      if (auto v = resolve_value(*ns, state)) inst.ns = *v;
      else
        state.warnings->push_back(state.path + ": unresolvable namespace on <node " +
                                  inst.executable + ">, ignored");
    }
    for (const auto& [child_name, child] : node) {
      if (child_name == "<xmlattr>") continue;
      if (child_name == "remap") {
        auto from = attr(child, "from");
        auto to = attr(child, "to");
        if (!from || !to) {
          state.warnings->push_back(state.path + ": <remap> missing from/to, ignored");
          continue;
        }
        auto rf = resolve_value(*from, state);
        auto rt = resolve_value(*to, state);
        if (!rf || !rt) {
          state.warnings->push_back(state.path + ": unresolvable <remap> on <node " +
                                    inst.executable + ">, ignored");
          continue;
        }
        inst.remappings.emplace_back(*rf, *rt);
      } else if (child_name == "param") {
        // Parameters are not architectural content.
      } else {
        state.warnings->push_back(state.path + ": unsupported <" + child_name +
                                  "> inside <node>, ignored");
      }
    }
    return LaunchAction{std::move(inst)};
  }

  if (element == "include") {
    IncludeLaunch inc;
    auto file = attr(node, "file");
    if (!file) {
      state.warnings->push_back(state.path + ": <include> without file attribute skipped");
      return std::nullopt;
    }
    inc.target = resolve_include_target(*file, state.path, *state.ctx, *state.warnings);
    if (auto ns = attr(node, "namespace")) inc.ns = resolve_value(*ns, state);
    if (auto name = attr(node, "name")) inc.part_name = resolve_value(*name, state);
    for (const auto& [child_name, child] : node) {
      (void)child;
      if (child_name == "<xmlattr>") continue;
      state.warnings->push_back(state.path + ": <include> child <" + child_name +
                                "> not evaluated");
    }
    return LaunchAction{std::move(inc)};
  }

  if (element == "push-ros-namespace" || element == "push_ros_namespace") {
    auto ns = attr(node, "namespace");
    if (!ns) {
      state.warnings->push_back(state.path + ": <" + element + "> without namespace, ignored");
      return std::nullopt;
    }
    auto value = resolve_value(*ns, state);
    if (!value) {
      state.warnings->push_back(state.path + ": unresolvable <" + element + ">, ignored");
      return std::nullopt;
    }
    return LaunchAction{NamespacePush{*value}};
  }

  if (element == "group") {
    if (auto scoped = attr(node, "scoped"); scoped && !truthy(*scoped))
      state.warnings->push_back(state.path + ": <group scoped=\"false\"> treated as scoped");
    LaunchGroup group;
    group.children = parse_xml_children(node, state);
    return LaunchAction{std::move(group)};
  }

  if (element == "arg" || element == "let") return std::nullopt;  // handled upfront

  state.warnings->push_back(state.path + ": unsupported launch element <" + element +
                            ">, skipped");
  return std::nullopt;
}

std::vector<LaunchAction> parse_xml_children(const pt::ptree& parent, XmlParseState& state) {
  std::vector<LaunchAction> actions;
  for (const auto& [name, child] : parent) {
    if (name == "<xmlattr>") continue;
    if (auto action = parse_xml_element(name, child, state)) actions.push_back(std::move(*action));
  }
  return actions;
}

}  // namespace

namespace detail_launch {

LaunchSpec parse_launch_xml(const std::string& repo_relative_path, std::string_view text,
                            const LaunchContext& ctx) {
  LaunchSpec spec;
  spec.path = repo_relative_path;

  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw LaunchParseError(repo_relative_path + ": " + e.what());
  }
  auto launch = tree.get_child_optional("launch");
  if (!launch) throw LaunchParseError(repo_relative_path + ": missing <launch> root element");

  XmlParseState state;
  state.ctx = &ctx;
  state.path = repo_relative_path;
  state.warnings = &spec.warnings;

  // Argument defaults first, irrespective of position.
  for (const auto& [name, child] : *launch) {
    if (name != "arg") continue;
    auto arg_name = attr(child, "name");
    auto arg_default = attr(child, "default");
    if (arg_name && arg_default) state.arg_defaults[*arg_name] = *arg_default;
  }

  spec.actions = parse_xml_children(*launch, state);
  return spec;
}

}  // namespace detail_launch

}  // namespace rosarch
