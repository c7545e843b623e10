#pragma once

// Structural metamodel for recovered ROS 2 architectures: atomic and composed
// classifiers, node parts, ports, interface types, namespace scopes and the
// topic/service bindings induced by launch configuration. All types are plain
// immutable value data; the operations below are pure functions.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rosarch {

// Canonical stereotype strings. These are also the scored stereotype values,
// so they are fixed here rather than configurable.
inline constexpr const char* kAtomicStereotype = "AtomicRosNodeClassifier";
inline constexpr const char* kComposedStereotype = "ComposedRosNodeClassifier";
inline constexpr const char* kPartStereotype = "RosNodePart";
inline constexpr const char* kNamespaceStereotype = "Namespace";

// Sentinel used when a topic/service name is computed at runtime and cannot
// be recovered statically.
inline constexpr const char* kDynamicName = "<dynamic>";

enum class PortKind { Publisher, Subscriber, ServiceProvided, ServiceRequired };

bool is_topic_kind(PortKind k);
bool is_service_kind(PortKind k);
// Subscribers and provided services carry a bound handler function.
bool kind_has_handler(PortKind k);
std::string to_string(PortKind k);
std::optional<PortKind> port_kind_from_string(std::string_view s);

struct Port {
  std::string identifier;      // unique within the enclosing classifier, e.g. "p1"
  PortKind kind = PortKind::Publisher;
  std::string interface_type;  // pkg::msg::Name or pkg::srv::Name
  std::string declared_name;   // topic/service name as written in source
  std::optional<std::string> handler;

  bool operator==(const Port&) const = default;
};

struct MessageTypeDef {
  std::string qualified_name;  // pkg::msg::Name
  std::vector<std::pair<std::string, std::string>> fields;  // (type, name), file order

  bool operator==(const MessageTypeDef&) const = default;
};

struct ServiceTypeDef {
  std::string qualified_name;  // pkg::srv::Name
  std::vector<std::pair<std::string, std::string>> request_fields;
  std::vector<std::pair<std::string, std::string>> response_fields;

  bool operator==(const ServiceTypeDef&) const = default;
};

struct AtomicClassifier {
  std::string name;  // identical to the source class name
  std::string stereotype = kAtomicStereotype;
  std::vector<Port> ports;                // natural order by identifier
  std::vector<std::string> source_refs;   // repo-relative paths, sorted

  bool operator==(const AtomicClassifier&) const = default;
};

struct NodePart {
  std::string part_name;
  std::string classifier_ref;  // name of the defining classifier
  std::string stereotype = kPartStereotype;
  std::vector<std::string> effective_namespace;   // segments, outermost first
  std::map<std::string, std::string> remappings;  // declared -> new name
  std::vector<Port> ports;  // derived from the defining classifier

  bool operator==(const NodePart&) const = default;
};

struct BindingEndpoint {
  std::string part_name;
  std::string port_identifier;

  auto operator<=>(const BindingEndpoint&) const = default;
};

struct TopicBinding {
  std::string display_name;  // post-remap name, as labelled in the diagram
  std::string runtime_name;  // fully resolved, namespace prefix included
  std::string message_type;
  std::vector<BindingEndpoint> endpoints;

  bool operator==(const TopicBinding&) const = default;
};

struct ServiceBinding {
  std::string display_name;
  std::string runtime_name;
  std::string service_type;
  std::vector<BindingEndpoint> endpoints;

  bool operator==(const ServiceBinding&) const = default;
};

struct NamespaceScope {
  std::string name;  // single path segment
  std::string stereotype = kNamespaceStereotype;
  std::vector<std::string> part_refs;     // member part names
  std::vector<std::string> topic_refs;    // member topic runtime names
  std::vector<std::string> service_refs;  // member service runtime names
  std::vector<NamespaceScope> children;

  bool operator==(const NamespaceScope&) const = default;
};

// A promoted port of an internal part. `port.identifier` keeps the original
// identifier; the qualified form "<part>.<identifier>" is what the enclosing
// classifier exposes. `port.declared_name` holds the scope-relative resolved
// name so that an enclosing composition can regroup it.
struct ExternalPort {
  std::string part_name;
  Port port;

  bool operator==(const ExternalPort&) const = default;
};

struct ComposedClassifier {
  std::string name;  // derived from the launch file stem
  std::string stereotype = kComposedStereotype;
  std::vector<NodePart> parts;             // sorted by part_name
  std::vector<NamespaceScope> namespaces;  // top-level scopes, sorted by name
  std::vector<TopicBinding> topics;        // sorted by runtime_name
  std::vector<ServiceBinding> services;    // sorted by runtime_name
  std::vector<ExternalPort> external_ports;  // sorted by (part, identifier)
  std::string launch_ref;

  bool operator==(const ComposedClassifier&) const = default;
};

struct ResolvedName {
  std::string display_name;  // post-remap, pre-prefix
  std::string runtime_name;  // absolute
  bool in_scope = true;      // false when the effective name was absolute

  bool operator==(const ResolvedName&) const = default;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Applies the remapping keyed by the declared name, then prefixes the result
// with the namespace stack unless it is absolute. Throws ValidationError on a
// malformed declared name (empty, "//", trailing '/') or namespace segment.
ResolvedName resolve_runtime_name(const std::string& declared,
                                  const std::vector<std::string>& namespace_stack,
                                  const std::map<std::string, std::string>& remappings);

// Lookup of defining classifiers for conformance checks and part typing.
class ModelRegistry {
 public:
  void add(AtomicClassifier c);
  void add(ComposedClassifier c);
  const AtomicClassifier* find_atomic(const std::string& name) const;
  const ComposedClassifier* find_composed(const std::string& name) const;
  bool contains(const std::string& name) const;
  // The port set a part instantiated from `name` must carry.
  std::optional<std::vector<Port>> classifier_ports(const std::string& name) const;

 private:
  std::map<std::string, AtomicClassifier> atomics_;
  std::map<std::string, ComposedClassifier> composeds_;
};

// The ports a composed classifier exposes: its external ports, identifiers
// qualified as "<part>.<identifier>".
std::vector<Port> classifier_ports(const ComposedClassifier& c);

// Recomputes external_ports from parts and bindings: every internal-part port
// not attached to any binding is promoted, connected ports never appear.
// Total and idempotent.
ComposedClassifier promote_external_ports(ComposedClassifier composed);

struct Violation {
  std::string code;
  std::string message;

  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_model(const AtomicClassifier& model);
// Part-classifier conformance is checked only when a registry is supplied.
std::vector<Violation> validate_model(const ComposedClassifier& model,
                                      const ModelRegistry* registry = nullptr);

bool conforms(const NodePart& part, const AtomicClassifier& classifier);
bool conforms(const NodePart& part, const ComposedClassifier& classifier);
// Throws ResolutionError when part.classifier_ref is not in the registry.
bool conforms(const NodePart& part, const ModelRegistry& registry);

// Natural identifier order (p1 < p2 < p10 < s1).
void sort_ports(std::vector<Port>& ports);

// Sorts every collection of a composed classifier into canonical order so
// that structurally equal models compare equal regardless of build order.
void canonicalize_order(ComposedClassifier& c);

}  // namespace rosarch
