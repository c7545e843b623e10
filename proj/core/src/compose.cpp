#include <algorithm>
#include <map>
#include <set>

#include "rosarch/launch.hpp"
#include "rosarch/strings.hpp"

namespace rosarch {

namespace {

void apply_namespace(std::vector<std::string>& stack, const std::string& raw,
                     const std::string& where, std::vector<std::string>& warnings) {
  std::string value = str::trim(raw);
  if (value.empty()) return;
  if (value.front() == '/') {
    stack.clear();  // absolute namespace resets the scope
    value.erase(value.begin());
  }
  for (auto& seg : str::split(value, '/')) {
    if (seg.empty()) {
      warnings.push_back(where + ": empty namespace segment in '" + raw + "' ignored");
      continue;
    }
    stack.push_back(std::move(seg));
  }
}

const NodeClassRecord* find_record(const NodeScan& scan, const std::string& class_name) {
  for (const auto& n : scan.nodes)
    if (n.class_name == class_name) return &n;
  return nullptr;
}

class Resolver {
 public:
  Resolver(const NodeScan& scan, const BuildMap& build,
           const std::map<std::string, LaunchSpec>& specs, std::vector<std::string>& warnings)
      : scan_(scan), build_(build), specs_(specs), warnings_(warnings) {}

  const ComposedClassifier& resolve(const LaunchSpec& spec) {
    if (auto it = memo_.find(spec.path); it != memo_.end()) return it->second;
    for (const auto& active : active_stack_) {
      if (active == spec.path) {
        std::string cycle;
        bool in_cycle = false;
        for (const auto& p : active_stack_) {
          if (p == spec.path) in_cycle = true;
          if (in_cycle) cycle += p + " -> ";
        }
        throw LaunchCycleError("include cycle: " + cycle + spec.path);
      }
    }
    active_stack_.push_back(spec.path);
    ComposedClassifier out = resolve_one(spec);
    active_stack_.pop_back();
    return memo_.emplace(spec.path, std::move(out)).first->second;
  }

 private:
  void walk(const LaunchSpec& spec, const std::vector<LaunchAction>& actions,
            std::vector<std::string> stack, std::vector<NodePart>& parts, int& include_index) {
    for (const auto& action : actions) {
      if (const auto* push = std::get_if<NamespacePush>(&action.value)) {
        apply_namespace(stack, push->raw, spec.path, warnings_);
      } else if (const auto* group = std::get_if<LaunchGroup>(&action.value)) {
        walk(spec, group->children, stack, parts, include_index);
      } else if (const auto* inst = std::get_if<NodeInstantiation>(&action.value)) {
        auto it = build_.executables.find(inst->executable);
        if (it == build_.executables.end()) {
          warnings_.push_back(spec.path + ": no build target for executable '" +
                              inst->executable + "'; node skipped");
          continue;
        }
        const NodeClassRecord* record = find_record(scan_, it->second.node_class);
        if (!record) {
          warnings_.push_back(spec.path + ": executable '" + inst->executable +
                              "' maps to unscanned class '" + it->second.node_class +
                              "'; node skipped");
          continue;
        }
        if (!inst->package.empty() && !it->second.package.empty() &&
            inst->package != it->second.package)
          warnings_.push_back(spec.path + ": package mismatch for executable '" +
                              inst->executable + "' (launch: " + inst->package +
                              ", build: " + it->second.package + ")");
        NodePart part;
        // Launch-assigned name wins, then the source-declared node name.
        part.part_name =
            inst->name.value_or(record->declared_node_name.value_or(record->class_name));
        part.classifier_ref = record->class_name;
        part.effective_namespace = stack;
        if (inst->ns) apply_namespace(part.effective_namespace, *inst->ns, spec.path, warnings_);
        for (const auto& [from, to] : inst->remappings) {
          if (str::starts_with(from, "/"))
            warnings_.push_back(spec.path + ": absolute remap key '" + from + "' on part '" +
                                part.part_name + "'; remapping is applied before prefixing");
          if (!part.remappings.emplace(from, to).second)
            warnings_.push_back(spec.path + ": duplicate remapping for '" + from + "' on part '" +
                                part.part_name + "'; keeping the first");
        }
        part.ports = ports_from_endpoints(record->endpoints);
        parts.push_back(std::move(part));
      } else if (const auto* inc = std::get_if<IncludeLaunch>(&action.value)) {
        ++include_index;
        if (inc->target.empty()) {
          warnings_.push_back(spec.path + ": include with unresolved target skipped");
          continue;
        }
        auto sit = specs_.find(inc->target);
        if (sit == specs_.end()) {
          warnings_.push_back(spec.path + ": included launch file '" + inc->target +
                              "' not found; skipped");
          continue;
        }
        const ComposedClassifier& inner = resolve(sit->second);
        NodePart part;
        part.part_name = inc->part_name.value_or(inner.name + "_" + std::to_string(include_index));
        part.classifier_ref = inner.name;
        part.effective_namespace = stack;
        if (inc->ns) apply_namespace(part.effective_namespace, *inc->ns, spec.path, warnings_);
        part.ports = classifier_ports(inner);
        parts.push_back(std::move(part));
      }
    }
  }

  ComposedClassifier resolve_one(const LaunchSpec& spec) {
    ComposedClassifier out;
    out.name = launch_stem(spec.path);
    out.launch_ref = spec.path;

    std::vector<NodePart> parts;
    int include_index = 0;
    walk(spec, spec.actions, {}, parts, include_index);

    // Part names must be unique; later duplicates get a numeric suffix.
    std::set<std::string> used;
    for (auto& part : parts) {
      if (used.insert(part.part_name).second) continue;
      int n = 2;
      std::string renamed;
      do {
        renamed = part.part_name + "_" + std::to_string(n++);
      } while (!used.insert(renamed).second);
      warnings_.push_back(spec.path + ": duplicate part name '" + part.part_name +
                          "' renamed to '" + renamed + "'");
      part.part_name = renamed;
    }

    // Resolve every port name; equal runtime names form binding candidates.
    struct ResolvedPort {
      std::string part_name;
      const Port* port;
      ResolvedName name;
    };
    std::map<std::string, std::vector<ResolvedPort>> groups;
    for (auto& part : parts) {
      std::set<std::string> applied;
      for (const auto& port : part.ports) {
        if (port.declared_name == kDynamicName) continue;
        ResolvedName resolved;
        try {
          resolved =
              resolve_runtime_name(port.declared_name, part.effective_namespace, part.remappings);
        } catch (const ValidationError& e) {
          warnings_.push_back(spec.path + ": " + part.part_name + "." + port.identifier + ": " +
                              e.what());
          continue;
        }
        if (part.remappings.count(port.declared_name)) applied.insert(port.declared_name);
        groups[resolved.runtime_name].push_back({part.part_name, &port, resolved});
      }
      for (auto it = part.remappings.begin(); it != part.remappings.end();) {
        if (!applied.count(it->first)) {
          warnings_.push_back(spec.path + ": remapping '" + it->first + "' -> '" + it->second +
                              "' on part '" + part.part_name + "' matches no port; dropped");
          it = part.remappings.erase(it);
        } else {
          ++it;
        }
      }
    }

    for (auto& [runtime, endpoints] : groups) {
      if (endpoints.size() < 2) continue;  // unconnected, promoted later
      std::sort(endpoints.begin(), endpoints.end(),
                [](const ResolvedPort& a, const ResolvedPort& b) {
                  if (a.part_name != b.part_name) return a.part_name < b.part_name;
                  return str::natural_compare(a.port->identifier, b.port->identifier) < 0;
                });

      const bool any_topic =
          std::any_of(endpoints.begin(), endpoints.end(),
                      [](const ResolvedPort& e) { return is_topic_kind(e.port->kind); });
      const bool any_service =
          std::any_of(endpoints.begin(), endpoints.end(),
                      [](const ResolvedPort& e) { return is_service_kind(e.port->kind); });
      if (any_topic && any_service) {
        warnings_.push_back(spec.path + ": name '" + runtime +
                            "' is used by both topic and service ports; not bound");
        continue;
      }

      std::set<std::string> types;
      for (const auto& e : endpoints) types.insert(e.port->interface_type);
      if (types.size() > 1) {
        std::string list;
        for (const auto& t : types) list += (list.empty() ? "" : ", ") + t;
        warnings_.push_back(spec.path + ": interface type conflict on '" + runtime + "' (" +
                            list + "); not bound");
        continue;
      }

      std::string display = runtime;
      for (const auto& e : endpoints) {
        if (e.name.in_scope) {
          display = e.name.display_name;
          break;
        }
      }

      std::vector<BindingEndpoint> eps;
      eps.reserve(endpoints.size());
      for (const auto& e : endpoints) eps.push_back({e.part_name, e.port->identifier});

      if (any_topic) {
        out.topics.push_back(TopicBinding{display, runtime, *types.begin(), std::move(eps)});
      } else {
        int providers = 0;
        for (const auto& e : endpoints)
          if (e.port->kind == PortKind::ServiceProvided) ++providers;
        if (providers == 0) continue;  // clients of an external server stay unconnected
        if (providers > 1) {
          warnings_.push_back(spec.path + ": service '" + runtime + "' has " +
                              std::to_string(providers) + " providers; not bound");
          continue;
        }
        out.services.push_back(ServiceBinding{display, runtime, *types.begin(), std::move(eps)});
      }
    }

    out.parts = std::move(parts);
    build_scopes(out);
    out = promote_external_ports(std::move(out));
    canonicalize_order(out);
    return out;
  }

  // Namespace boxes come from the parts' effective namespaces; bindings are
  // placed into the deepest existing scope that prefixes their runtime name.
  static void build_scopes(ComposedClassifier& out) {
    struct ScopeBuild {
      std::map<std::string, ScopeBuild> children;
      std::vector<std::string> parts, topics, services;
    };
    ScopeBuild root;
    std::set<std::vector<std::string>> paths;
    for (const auto& part : out.parts) {
      std::vector<std::string> path;
      for (const auto& seg : part.effective_namespace) {
        path.push_back(seg);
        paths.insert(path);
      }
    }
    auto scope_at = [&root](const std::vector<std::string>& path) {
      ScopeBuild* scope = &root;
      for (const auto& seg : path) scope = &scope->children[seg];
      return scope;
    };
    for (const auto& part : out.parts)
      if (!part.effective_namespace.empty())
        scope_at(part.effective_namespace)->parts.push_back(part.part_name);

    auto place_binding = [&](const std::string& runtime, bool topic) {
      auto segments = str::split(runtime.substr(1), '/');
      segments.pop_back();  // drop the leaf name
      std::vector<std::string> best, probe;
      for (const auto& seg : segments) {
        probe.push_back(seg);
        if (paths.count(probe)) best = probe;
      }
      if (best.empty()) return;  // top level
      auto* scope = scope_at(best);
      (topic ? scope->topics : scope->services).push_back(runtime);
    };
    for (const auto& t : out.topics) place_binding(t.runtime_name, true);
    for (const auto& s : out.services) place_binding(s.runtime_name, false);

    auto convert = [](const std::string& name, const ScopeBuild& build,
                      const auto& self) -> NamespaceScope {
      NamespaceScope scope;
      scope.name = name;
      scope.part_refs = build.parts;
      scope.topic_refs = build.topics;
      scope.service_refs = build.services;
      for (const auto& [child_name, child] : build.children)
        scope.children.push_back(self(child_name, child, self));
      return scope;
    };
    out.namespaces.clear();
    for (const auto& [name, child] : root.children)
      out.namespaces.push_back(convert(name, child, convert));
  }

  const NodeScan& scan_;
  const BuildMap& build_;
  const std::map<std::string, LaunchSpec>& specs_;
  std::vector<std::string>& warnings_;
  std::map<std::string, ComposedClassifier> memo_;
  std::vector<std::string> active_stack_;
};

}  // namespace

ComposedClassifier resolve_composition(const LaunchSpec& spec, const NodeScan& scan,
                                       const BuildMap& build,
                                       const std::map<std::string, LaunchSpec>& all_specs,
                                       std::vector<std::string>* warnings) {
  std::vector<std::string> local;
  Resolver resolver(scan, build, all_specs, warnings ? *warnings : local);
  return resolver.resolve(spec);
}

}  // namespace rosarch
