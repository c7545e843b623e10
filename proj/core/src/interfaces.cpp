#include "rosarch/interfaces.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "rosarch/strings.hpp"

namespace fs = std::filesystem;

namespace rosarch {

namespace {

// "<pkg>/<kind>/<Stem>.<kind>" -> "pkg::<kind>::Stem"
std::string qualified_name_for(const fs::path& path, const char* kind) {
  const std::string stem = path.stem().string();
  std::string pkg;
  fs::path parent = path.parent_path();
  if (parent.filename() == kind) pkg = parent.parent_path().filename().string();
  if (pkg.empty() || stem.empty())
    throw InterfaceParseError("cannot derive qualified name from path: " + path.string() +
                              " (expected <pkg>/" + kind + "/<Name>)");
  return pkg + "::" + kind + "::" + stem;
}

// One "type name [default]" line; returns false for blank/comment/constant lines.
bool parse_field_line(const std::string& raw, int line_no, const fs::path& path,
                      std::pair<std::string, std::string>& out) {
  std::string line = raw;
  if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
  line = str::collapse_ws(line);
  if (line.empty()) return false;
  if (line.find('=') != std::string::npos) return false;  // constant declaration
  auto parts = str::split(line, ' ');
  if (parts.size() < 2)
    throw InterfaceParseError(path.string() + ":" + std::to_string(line_no) +
                              ": malformed field line '" + raw + "'");
  out = {parts[0], parts[1]};
  return true;
}

std::vector<std::pair<std::string, std::string>> parse_fields(
    const std::vector<std::string>& lines, int first_line_no, const fs::path& path) {
  std::vector<std::pair<std::string, std::string>> fields;
  std::set<std::string> names;
  int n = first_line_no;
  for (const auto& raw : lines) {
    std::pair<std::string, std::string> field;
    if (parse_field_line(raw, n, path, field)) {
      if (!names.insert(field.second).second)
        throw InterfaceParseError(path.string() + ":" + std::to_string(n) +
                                  ": duplicate field name '" + field.second + "'");
      fields.push_back(std::move(field));
    }
    ++n;
  }
  return fields;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

}  // namespace

MessageTypeDef parse_msg(const fs::path& path, std::string_view text) {
  MessageTypeDef def;
  def.qualified_name = qualified_name_for(path, "msg");
  def.fields = parse_fields(split_lines(text), 1, path);
  return def;
}

ServiceTypeDef parse_srv(const fs::path& path, std::string_view text) {
  ServiceTypeDef def;
  def.qualified_name = qualified_name_for(path, "srv");
  auto lines = split_lines(text);
  std::vector<std::string> request, response;
  int separators = 0;
  int separator_line = 0;
  int n = 0;
  for (const auto& line : lines) {
    ++n;
    if (str::trim(line) == "---") {
      ++separators;
      separator_line = n;
      continue;
    }
    (separators == 0 ? request : response).push_back(line);
  }
  if (separators != 1)
    throw InterfaceParseError(path.string() + ": expected exactly one '---' separator, found " +
                              std::to_string(separators));
  def.request_fields = parse_fields(request, 1, path);
  def.response_fields = parse_fields(response, separator_line + 1, path);
  return def;
}

TypeRegistry load_interfaces(const fs::path& repo_root) {
  TypeRegistry registry;
  std::vector<fs::path> files;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(repo_root, ec), end; it != end && !ec;
       it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    const auto ext = it->path().extension();
    if (ext == ".msg" || ext == ".srv") files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) {
      registry.warnings.push_back("unreadable interface file: " + path.string());
      continue;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      if (path.extension() == ".msg") {
        auto def = parse_msg(path, buffer.str());
        registry.messages.emplace(def.qualified_name, std::move(def));
      } else {
        auto def = parse_srv(path, buffer.str());
        registry.services.emplace(def.qualified_name, std::move(def));
      }
    } catch (const InterfaceParseError& e) {
      registry.warnings.push_back(e.what());
    }
  }
  return registry;
}

}  // namespace rosarch
