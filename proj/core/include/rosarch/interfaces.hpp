#pragma once

// Parsers for ROS 2 interface definition files (.msg/.srv). Qualified names
// are derived from the directory layout: <pkg>/msg/Name.msg -> pkg::msg::Name.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rosarch/model.hpp"

namespace rosarch {

class InterfaceParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MessageTypeDef parse_msg(const std::filesystem::path& path, std::string_view text);
ServiceTypeDef parse_srv(const std::filesystem::path& path, std::string_view text);

// All interface definitions found in a repository, keyed by qualified name.
struct TypeRegistry {
  std::map<std::string, MessageTypeDef> messages;
  std::map<std::string, ServiceTypeDef> services;
  std::vector<std::string> warnings;

  bool has(const std::string& qualified_name) const {
    return messages.count(qualified_name) > 0 || services.count(qualified_name) > 0;
  }
};

// Walks the tree for */msg/*.msg and */srv/*.srv. Malformed files are
// reported as warnings, not errors.
TypeRegistry load_interfaces(const std::filesystem::path& repo_root);

}  // namespace rosarch
