#include "rosarch/model.hpp"

#include <algorithm>
#include <set>

#include "rosarch/strings.hpp"

namespace rosarch {

bool is_topic_kind(PortKind k) {
  return k == PortKind::Publisher || k == PortKind::Subscriber;
}

bool is_service_kind(PortKind k) {
  return k == PortKind::ServiceProvided || k == PortKind::ServiceRequired;
}

bool kind_has_handler(PortKind k) {
  return k == PortKind::Subscriber || k == PortKind::ServiceProvided;
}

std::string to_string(PortKind k) {
  switch (k) {
    case PortKind::Publisher: return "publisher";
    case PortKind::Subscriber: return "subscriber";
    case PortKind::ServiceProvided: return "service";
    case PortKind::ServiceRequired: return "client";
  }
  return "publisher";
}

std::optional<PortKind> port_kind_from_string(std::string_view s) {
  if (s == "publisher") return PortKind::Publisher;
  if (s == "subscriber") return PortKind::Subscriber;
  if (s == "service") return PortKind::ServiceProvided;
  if (s == "client") return PortKind::ServiceRequired;
  return std::nullopt;
}

namespace {

void check_name_shape(const std::string& name, const char* what) {
  if (name.empty()) throw ValidationError(std::string(what) + " is empty");
  if (name.find("//") != std::string::npos)
    throw ValidationError(std::string(what) + " contains '//': " + name);
  if (name.size() > 1 && name.back() == '/')
    throw ValidationError(std::string(what) + " ends with '/': " + name);
  if (name == "/") throw ValidationError(std::string(what) + " is a bare '/'");
}

}  // namespace

ResolvedName resolve_runtime_name(const std::string& declared,
                                  const std::vector<std::string>& namespace_stack,
                                  const std::map<std::string, std::string>& remappings) {
  check_name_shape(declared, "declared name");
  for (const auto& seg : namespace_stack) {
    if (seg.empty() || seg.find('/') != std::string::npos)
      throw ValidationError("namespace segment must be a single non-empty component: '" + seg + "'");
  }

  // Remapping applies to the declared name before any prefixing.
  std::string display = declared;
  if (auto it = remappings.find(declared); it != remappings.end()) display = it->second;
  check_name_shape(display, "remapped name");

  if (display.front() == '/') return {display, display, false};

  std::string runtime = "/";
  for (const auto& seg : namespace_stack) {
    runtime += seg;
    runtime += '/';
  }
  runtime += display;
  return {display, runtime, true};
}

void ModelRegistry::add(AtomicClassifier c) {
  auto name = c.name;
  atomics_.insert_or_assign(std::move(name), std::move(c));
}

void ModelRegistry::add(ComposedClassifier c) {
  auto name = c.name;
  composeds_.insert_or_assign(std::move(name), std::move(c));
}

const AtomicClassifier* ModelRegistry::find_atomic(const std::string& name) const {
  auto it = atomics_.find(name);
  return it == atomics_.end() ? nullptr : &it->second;
}

const ComposedClassifier* ModelRegistry::find_composed(const std::string& name) const {
  auto it = composeds_.find(name);
  return it == composeds_.end() ? nullptr : &it->second;
}

bool ModelRegistry::contains(const std::string& name) const {
  return atomics_.count(name) > 0 || composeds_.count(name) > 0;
}

std::optional<std::vector<Port>> ModelRegistry::classifier_ports(const std::string& name) const {
  if (const auto* a = find_atomic(name)) return a->ports;
  if (const auto* c = find_composed(name)) return rosarch::classifier_ports(*c);
  return std::nullopt;
}

std::vector<Port> classifier_ports(const ComposedClassifier& c) {
  std::vector<Port> out;
  out.reserve(c.external_ports.size());
  for (const auto& ext : c.external_ports) {
    Port p = ext.port;
    p.identifier = ext.part_name + "." + ext.port.identifier;
    out.push_back(std::move(p));
  }
  sort_ports(out);
  return out;
}

ComposedClassifier promote_external_ports(ComposedClassifier composed) {
  std::set<std::pair<std::string, std::string>> connected;
  for (const auto& t : composed.topics)
    for (const auto& e : t.endpoints) connected.emplace(e.part_name, e.port_identifier);
  for (const auto& s : composed.services)
    for (const auto& e : s.endpoints) connected.emplace(e.part_name, e.port_identifier);

  composed.external_ports.clear();
  for (const auto& part : composed.parts) {
    for (const auto& port : part.ports) {
      if (connected.count({part.part_name, port.identifier})) continue;
      Port p = port;
      // Rewrite the declared name to the scope-relative resolved form so the
      // next composition level can regroup this port by name.
      if (p.declared_name != kDynamicName) {
        try {
          auto r = resolve_runtime_name(p.declared_name, part.effective_namespace,
                                        part.remappings);
          p.declared_name = r.in_scope ? r.runtime_name.substr(1) : r.runtime_name;
        } catch (const ValidationError&) {
          // Keep the original name; promotion is total.
        }
      }
      composed.external_ports.push_back(ExternalPort{part.part_name, std::move(p)});
    }
  }
  std::sort(composed.external_ports.begin(), composed.external_ports.end(),
            [](const ExternalPort& a, const ExternalPort& b) {
              if (a.part_name != b.part_name) return a.part_name < b.part_name;
              return str::natural_compare(a.port.identifier, b.port.identifier) < 0;
            });
  return composed;
}

namespace {

void check_ports(const std::string& owner, const std::vector<Port>& ports,
                 std::vector<Violation>& out) {
  std::set<std::string> seen;
  for (const auto& p : ports) {
    if (p.identifier.empty())
      out.push_back({"port-identifier-empty", owner + ": port with empty identifier"});
    if (!seen.insert(p.identifier).second)
      out.push_back({"port-identifier-duplicate",
                     owner + ": duplicate port identifier '" + p.identifier + "'"});
    if (kind_has_handler(p.kind) && !p.handler)
      out.push_back({"handler-missing", owner + ": " + to_string(p.kind) + " port '" +
                                            p.identifier + "' has no handler"});
    if (!kind_has_handler(p.kind) && p.handler)
      out.push_back({"handler-unexpected", owner + ": " + to_string(p.kind) + " port '" +
                                               p.identifier + "' carries a handler"});
  }
}

const Port* find_part_port(const NodePart& part, const std::string& identifier) {
  for (const auto& p : part.ports)
    if (p.identifier == identifier) return &p;
  return nullptr;
}

template <typename Binding>
void check_binding_endpoints(const ComposedClassifier& model, const Binding& binding,
                             const std::string& type_name, bool topic,
                             std::vector<Violation>& out) {
  const std::string label = (topic ? "topic '" : "service '") + binding.runtime_name + "'";
  int providers = 0;
  for (const auto& e : binding.endpoints) {
    const NodePart* part = nullptr;
    for (const auto& p : model.parts)
      if (p.part_name == e.part_name) part = &p;
    if (!part) {
      out.push_back({"endpoint-unknown-part", label + ": endpoint part '" + e.part_name +
                                                  "' does not exist"});
      continue;
    }
    const Port* port = find_part_port(*part, e.port_identifier);
    if (!port) {
      out.push_back({"endpoint-unknown-port", label + ": part '" + e.part_name +
                                                  "' has no port '" + e.port_identifier + "'"});
      continue;
    }
    if (topic && !is_topic_kind(port->kind))
      out.push_back({"topic-endpoint-kind", label + ": port '" + e.port_identifier +
                                                "' is not a publisher or subscriber"});
    if (!topic && !is_service_kind(port->kind))
      out.push_back({"service-endpoint-kind", label + ": port '" + e.port_identifier +
                                                  "' is not a service port"});
    if (!topic && port->kind == PortKind::ServiceProvided) ++providers;
    if (port->interface_type != type_name)
      out.push_back({topic ? "topic-type-conflict" : "service-type-conflict",
                     label + ": endpoint type '" + port->interface_type +
                         "' differs from binding type '" + type_name + "'"});
  }
  if (!topic && providers != 1)
    out.push_back({"service-provider-cardinality",
                   label + ": expected exactly one provider, found " + std::to_string(providers)});
}

void collect_scope_refs(const NamespaceScope& scope, const std::string& path,
                        const ComposedClassifier& model,
                        std::set<std::string>& part_refs, std::set<std::string>& binding_refs,
                        std::vector<Violation>& out) {
  if (scope.name.empty() || scope.name.find('/') != std::string::npos)
    out.push_back({"scope-name-malformed", "namespace '" + scope.name + "' under '" + path +
                                               "' is not a single segment"});
  const std::string here = path + "/" + scope.name;
  for (const auto& ref : scope.part_refs) {
    if (!part_refs.insert(ref).second)
      out.push_back({"scope-member-duplicate", "part '" + ref + "' claimed by several scopes"});
    bool found = false;
    for (const auto& p : model.parts) found = found || p.part_name == ref;
    if (!found)
      out.push_back({"scope-member-unknown", "scope '" + here + "' lists unknown part '" + ref + "'"});
  }
  auto check_binding_ref = [&](const std::string& ref, bool topic) {
    if (!binding_refs.insert(ref).second)
      out.push_back({"scope-member-duplicate", "binding '" + ref + "' claimed by several scopes"});
    bool found = false;
    if (topic)
      for (const auto& t : model.topics) found = found || t.runtime_name == ref;
    else
      for (const auto& s : model.services) found = found || s.runtime_name == ref;
    if (!found)
      out.push_back({"scope-member-unknown", "scope '" + here + "' lists unknown binding '" + ref + "'"});
    if (!str::starts_with(ref, here + "/"))
      out.push_back({"scope-prefix-mismatch",
                     "binding '" + ref + "' is not prefixed by its scope path '" + here + "'"});
  };
  for (const auto& ref : scope.topic_refs) check_binding_ref(ref, true);
  for (const auto& ref : scope.service_refs) check_binding_ref(ref, false);
  for (const auto& child : scope.children)
    collect_scope_refs(child, here, model, part_refs, binding_refs, out);
}

}  // namespace

std::vector<Violation> validate_model(const AtomicClassifier& model) {
  std::vector<Violation> out;
  if (model.name.empty()) out.push_back({"classifier-name-empty", "atomic classifier without a name"});
  if (model.stereotype != kAtomicStereotype)
    out.push_back({"stereotype-mismatch", "atomic classifier '" + model.name +
                                              "' has stereotype '" + model.stereotype + "'"});
  check_ports(model.name, model.ports, out);
  return out;
}

std::vector<Violation> validate_model(const ComposedClassifier& model,
                                      const ModelRegistry* registry) {
  std::vector<Violation> out;
  if (model.name.empty()) out.push_back({"classifier-name-empty", "composed classifier without a name"});
  if (model.stereotype != kComposedStereotype)
    out.push_back({"stereotype-mismatch", "composed classifier '" + model.name +
                                              "' has stereotype '" + model.stereotype + "'"});

  std::set<std::string> part_names;
  for (const auto& part : model.parts) {
    if (!part_names.insert(part.part_name).second)
      out.push_back({"part-name-duplicate", "duplicate part name '" + part.part_name + "'"});
    if (part.stereotype != kPartStereotype)
      out.push_back({"stereotype-mismatch", "part '" + part.part_name + "' has stereotype '" +
                                                part.stereotype + "'"});
    check_ports(model.name + "." + part.part_name, part.ports, out);
    if (registry) {
      if (!registry->contains(part.classifier_ref))
        out.push_back({"classifier-ref-dangling", "part '" + part.part_name +
                                                      "' references unknown classifier '" +
                                                      part.classifier_ref + "'"});
      else if (!conforms(part, *registry))
        out.push_back({"part-nonconforming", "part '" + part.part_name +
                                                 "' does not conform to classifier '" +
                                                 part.classifier_ref + "'"});
    }
  }

  for (const auto& t : model.topics)
    check_binding_endpoints(model, t, t.message_type, true, out);
  for (const auto& s : model.services)
    check_binding_endpoints(model, s, s.service_type, false, out);

  // Every internal port must be covered by exactly one of: a binding
  // endpoint, or an external port.
  std::set<std::pair<std::string, std::string>> connected;
  for (const auto& t : model.topics)
    for (const auto& e : t.endpoints) connected.emplace(e.part_name, e.port_identifier);
  for (const auto& s : model.services)
    for (const auto& e : s.endpoints) connected.emplace(e.part_name, e.port_identifier);
  std::set<std::pair<std::string, std::string>> external;
  for (const auto& ext : model.external_ports) {
    if (!external.emplace(ext.part_name, ext.port.identifier).second)
      out.push_back({"external-port-duplicate", "external port '" + ext.part_name + "." +
                                                    ext.port.identifier + "' listed twice"});
    if (connected.count({ext.part_name, ext.port.identifier}))
      out.push_back({"external-port-connected", "external port '" + ext.part_name + "." +
                                                    ext.port.identifier +
                                                    "' is attached to a binding"});
  }
  for (const auto& part : model.parts) {
    for (const auto& port : part.ports) {
      auto key = std::make_pair(part.part_name, port.identifier);
      if (!connected.count(key) && !external.count(key))
        out.push_back({"port-unaccounted", "port '" + part.part_name + "." + port.identifier +
                                               "' is neither bound nor external"});
    }
  }

  std::set<std::string> scope_parts, scope_bindings;
  for (const auto& scope : model.namespaces)
    collect_scope_refs(scope, "", model, scope_parts, scope_bindings, out);

  return out;
}

namespace {

std::vector<std::tuple<std::string, PortKind, std::string>> port_shape(
    const std::vector<Port>& ports) {
  std::vector<std::tuple<std::string, PortKind, std::string>> shape;
  shape.reserve(ports.size());
  for (const auto& p : ports) shape.emplace_back(p.identifier, p.kind, p.interface_type);
  std::sort(shape.begin(), shape.end());
  return shape;
}

}  // namespace

bool conforms(const NodePart& part, const AtomicClassifier& classifier) {
  return port_shape(part.ports) == port_shape(classifier.ports);
}

bool conforms(const NodePart& part, const ComposedClassifier& classifier) {
  return port_shape(part.ports) == port_shape(classifier_ports(classifier));
}

bool conforms(const NodePart& part, const ModelRegistry& registry) {
  if (const auto* a = registry.find_atomic(part.classifier_ref)) return conforms(part, *a);
  if (const auto* c = registry.find_composed(part.classifier_ref)) return conforms(part, *c);
  throw ResolutionError("classifier '" + part.classifier_ref + "' referenced by part '" +
                        part.part_name + "' is not registered");
}

void sort_ports(std::vector<Port>& ports) {
  std::sort(ports.begin(), ports.end(), [](const Port& a, const Port& b) {
    return str::natural_compare(a.identifier, b.identifier) < 0;
  });
}

namespace {

void sort_scope(NamespaceScope& scope) {
  std::sort(scope.part_refs.begin(), scope.part_refs.end());
  std::sort(scope.topic_refs.begin(), scope.topic_refs.end());
  std::sort(scope.service_refs.begin(), scope.service_refs.end());
  std::sort(scope.children.begin(), scope.children.end(),
            [](const NamespaceScope& a, const NamespaceScope& b) { return a.name < b.name; });
  for (auto& child : scope.children) sort_scope(child);
}

}  // namespace

void canonicalize_order(ComposedClassifier& c) {
  std::sort(c.parts.begin(), c.parts.end(),
            [](const NodePart& a, const NodePart& b) { return a.part_name < b.part_name; });
  for (auto& part : c.parts) sort_ports(part.ports);
  std::sort(c.topics.begin(), c.topics.end(),
            [](const TopicBinding& a, const TopicBinding& b) {
              return a.runtime_name < b.runtime_name;
            });
  for (auto& t : c.topics) std::sort(t.endpoints.begin(), t.endpoints.end());
  std::sort(c.services.begin(), c.services.end(),
            [](const ServiceBinding& a, const ServiceBinding& b) {
              return a.runtime_name < b.runtime_name;
            });
  for (auto& s : c.services) std::sort(s.endpoints.begin(), s.endpoints.end());
  std::sort(c.external_ports.begin(), c.external_ports.end(),
            [](const ExternalPort& a, const ExternalPort& b) {
              if (a.part_name != b.part_name) return a.part_name < b.part_name;
              return str::natural_compare(a.port.identifier, b.port.identifier) < 0;
            });
  std::sort(c.namespaces.begin(), c.namespaces.end(),
            [](const NamespaceScope& a, const NamespaceScope& b) { return a.name < b.name; });
  for (auto& scope : c.namespaces) sort_scope(scope);
}

}  // namespace rosarch
