#include <algorithm>
#include <cctype>

#include "launch_detail.hpp"
#include "rosarch/strings.hpp"

namespace rosarch {

namespace {

struct PyLiteral {
  std::size_t start = 0;  // offset of the opening quote (or prefix)
  std::size_t end = 0;    // one past the closing quote
  std::string value;
  bool plain = true;  // false for f-strings and friends
};

struct PyText {
  std::string masked;  // strings and comments blanked out, offsets preserved
  std::vector<PyLiteral> literals;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

PyText preprocess(std::string_view text) {
  PyText out;
  out.masked.assign(text.size(), ' ');
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '\'' || c == '"') {
      PyLiteral lit;
      lit.start = i;
      // A string prefix (f, r, b, ...) marks the literal as non-plain when
      // it can interpolate.
      std::size_t p = i;
      while (p > 0 && ident_char(text[p - 1])) --p;
      const std::string prefix(text.substr(p, i - p));
      lit.plain = prefix.find('f') == std::string::npos && prefix.find('F') == std::string::npos;
      if (p < i) lit.start = p;

      const char quote = c;
      bool triple = i + 2 < text.size() && text[i + 1] == quote && text[i + 2] == quote;
      std::size_t j = i + (triple ? 3 : 1);
      while (j < text.size()) {
        if (text[j] == '\\') {
          lit.value.push_back(text[j]);
          if (j + 1 < text.size()) lit.value.push_back(text[j + 1]);
          j += 2;
          continue;
        }
        if (triple) {
          if (text[j] == quote && j + 2 < text.size() + 1 && j + 2 <= text.size() &&
              j + 1 < text.size() && text[j + 1] == quote && j + 2 < text.size() &&
              text[j + 2] == quote) {
            j += 3;
            break;
          }
        } else if (text[j] == quote) {
          ++j;
          break;
        } else if (text[j] == '\n') {
          ++j;  // unterminated single-line string; stop scanning it
          break;
        }
        lit.value.push_back(text[j]);
        ++j;
      }
      lit.end = j;
      out.literals.push_back(lit);
      i = j;
      continue;
    }
    out.masked[i] = c;
    ++i;
  }
  return out;
}

std::size_t matching_paren(const std::string& masked, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < masked.size(); ++i) {
    char c = masked[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']' || c == '}') {
      --depth;
      if (depth == 0) return i;
    }
  }
  return std::string::npos;
}

enum class PyKind { Node, Include, Push, Group };

struct PyCall {
  PyKind kind = PyKind::Node;
  std::size_t name_start = 0;
  std::size_t open = 0;   // '('
  std::size_t close = 0;  // ')'
};

// Word-boundary occurrences of `name` followed by '(' in the masked text.
std::vector<PyCall> find_calls(const std::string& masked, const std::string& name, PyKind kind) {
  std::vector<PyCall> out;
  std::size_t pos = 0;
  while ((pos = masked.find(name, pos)) != std::string::npos) {
    const std::size_t after = pos + name.size();
    const bool left_ok = pos == 0 || !ident_char(masked[pos - 1]);
    std::size_t open = after;
    while (open < masked.size() && (masked[open] == ' ' || masked[open] == '\n' ||
                                    masked[open] == '\t' || masked[open] == '\r'))
      ++open;
    if (!left_ok || open >= masked.size() || masked[open] != '(' ||
        (after < masked.size() && ident_char(masked[after]))) {
      pos = after;
      continue;
    }
    std::size_t close = matching_paren(masked, open);
    if (close == std::string::npos) {
      pos = after;
      continue;
    }
    out.push_back({kind, pos, open, close});
    pos = after;
  }
  return out;
}

std::vector<PyLiteral> literals_in(const PyText& text, std::size_t begin, std::size_t end) {
  std::vector<PyLiteral> out;
  for (const auto& lit : text.literals)
    if (lit.start >= begin && lit.end <= end) out.push_back(lit);
  return out;
}

// Value extent of kwarg `key` at the call's top level, if present.
std::optional<std::pair<std::size_t, std::size_t>> kwarg_extent(const std::string& masked,
                                                                const PyCall& call,
                                                                const std::string& key) {
  int depth = 0;
  for (std::size_t i = call.open; i < call.close; ++i) {
    char c = masked[i];
    if (c == '(' || c == '[' || c == '{') {
      ++depth;
      continue;
    }
    if (c == ')' || c == ']' || c == '}') {
      --depth;
      continue;
    }
    if (depth != 1) continue;
    if (masked.compare(i, key.size(), key) != 0) continue;
    if (i > 0 && ident_char(masked[i - 1])) continue;
    std::size_t j = i + key.size();
    while (j < call.close && std::isspace(static_cast<unsigned char>(masked[j]))) ++j;
    if (j >= call.close || masked[j] != '=' || (j + 1 < call.close && masked[j + 1] == '='))
      continue;
    std::size_t value_start = j + 1;
    int vdepth = 0;
    std::size_t k = value_start;
    for (; k < call.close; ++k) {
      char v = masked[k];
      if (v == '(' || v == '[' || v == '{') ++vdepth;
      else if (v == ')' || v == ']' || v == '}') --vdepth;
      else if (v == ',' && vdepth == 0) break;
    }
    return std::make_pair(value_start, k);
  }
  return std::nullopt;
}

std::optional<std::string> plain_string_kwarg(const PyText& text, const PyCall& call,
                                              const std::string& key,
                                              std::vector<std::string>& warnings,
                                              const std::string& where) {
  auto extent = kwarg_extent(text.masked, call, key);
  if (!extent) return std::nullopt;
  auto lits = literals_in(text, extent->first, extent->second);
  if (lits.size() == 1 && lits[0].plain) {
    // The literal must be the whole value, not an argument of a nested call.
    for (std::size_t i = extent->first; i < lits[0].start; ++i)
      if (ident_char(text.masked[i])) {
        warnings.push_back(where + ": " + key + "= uses an expression, ignored");
        return std::nullopt;
      }
    return lits[0].value;
  }
  warnings.push_back(where + ": " + key + "= is not a plain string literal, ignored");
  return std::nullopt;
}

const char* kUnsupportedCalls[] = {
    "OpaqueFunction",     "ComposableNodeContainer", "LoadComposableNodes",
    "RegisterEventHandler", "TimerAction",           "ExecuteProcess",
};

}  // namespace

namespace detail_launch {

LaunchSpec parse_launch_py(const std::string& repo_relative_path, std::string_view text,
                           const LaunchContext& ctx) {
  LaunchSpec spec;
  spec.path = repo_relative_path;

  PyText py = preprocess(text);

  std::vector<PyCall> calls;
  auto append = [&](std::vector<PyCall> found) {
    calls.insert(calls.end(), found.begin(), found.end());
  };
  append(find_calls(py.masked, "Node", PyKind::Node));
  append(find_calls(py.masked, "IncludeLaunchDescription", PyKind::Include));
  append(find_calls(py.masked, "PushRosNamespace", PyKind::Push));
  append(find_calls(py.masked, "GroupAction", PyKind::Group));
  std::sort(calls.begin(), calls.end(),
            [](const PyCall& a, const PyCall& b) { return a.name_start < b.name_start; });

  // LifecycleNode etc. would also match "Node"; find_calls already enforces
  // word boundaries, so only bare Node( arrives here.

  for (const char* name : kUnsupportedCalls) {
    for (const auto& call : find_calls(py.masked, name, PyKind::Node)) {
      (void)call;
      spec.warnings.push_back(repo_relative_path + ": unsupported construct " +
                              std::string(name) + "(...), skipped");
    }
  }

  auto make_action = [&](const PyCall& call) -> std::optional<LaunchAction> {
    const std::string where = repo_relative_path;
    if (kwarg_extent(py.masked, call, "condition")) {
      spec.warnings.push_back(where + ": conditional action skipped (conditions are outside "
                                      "the supported construct subset)");
      return std::nullopt;
    }
    switch (call.kind) {
      case PyKind::Node: {
        NodeInstantiation inst;
        auto exec = plain_string_kwarg(py, call, "executable", spec.warnings, where);
        if (!exec) {
          spec.warnings.push_back(where + ": Node(...) without a literal executable, skipped");
          return std::nullopt;
        }
        inst.executable = *exec;
        inst.package = plain_string_kwarg(py, call, "package", spec.warnings, where).value_or("");
        inst.name = plain_string_kwarg(py, call, "name", spec.warnings, where);
        inst.ns = plain_string_kwarg(py, call, "namespace", spec.warnings, where);
        if (auto extent = kwarg_extent(py.masked, call, "remappings")) {
          // Pairs of plain literals inside the list expression.
          auto lits = literals_in(py, extent->first, extent->second);
          if (lits.size() % 2 != 0) {
            spec.warnings.push_back(where + ": remappings= not a list of literal pairs, ignored");
          } else {
            for (std::size_t i = 0; i + 1 < lits.size(); i += 2) {
              if (!lits[i].plain || !lits[i + 1].plain) {
                spec.warnings.push_back(where + ": non-literal remapping entry ignored");
                continue;
              }
              inst.remappings.emplace_back(lits[i].value, lits[i + 1].value);
            }
          }
        }
        return LaunchAction{std::move(inst)};
      }
      case PyKind::Push: {
        auto lits = literals_in(py, call.open, call.close);
        if (lits.size() == 1 && lits[0].plain) return LaunchAction{NamespacePush{lits[0].value}};
        spec.warnings.push_back(where + ": PushRosNamespace without a literal namespace, skipped");
        return std::nullopt;
      }
      case PyKind::Include: {
        IncludeLaunch inc;
        auto lits = literals_in(py, call.open, call.close);
        // get_package_share_directory('pkg') contributes the base directory;
        // the remaining literals are joined as path components.
        std::string pkg;
        std::vector<std::string> components;
        auto share_calls = find_calls(py.masked, "get_package_share_directory", PyKind::Node);
        auto fps_calls = find_calls(py.masked, "FindPackageShare", PyKind::Node);
        share_calls.insert(share_calls.end(), fps_calls.begin(), fps_calls.end());
        for (const auto& lit : lits) {
          bool is_pkg = false;
          for (const auto& sc : share_calls)
            if (lit.start > sc.open && lit.end <= sc.close && sc.open > call.open &&
                sc.close < call.close)
              is_pkg = true;
          if (is_pkg && pkg.empty()) pkg = lit.value;
          else if (!is_pkg && lit.plain)
            components.push_back(lit.value);
        }
        std::string raw;
        if (!pkg.empty()) {
          raw = "$(find-pkg-share " + pkg + ")";
          for (const auto& c : components) raw += "/" + c;
        } else if (components.size() == 1) {
          raw = components[0];
        } else if (!components.empty()) {
          for (const auto& c : components) {
            if (!raw.empty()) raw += "/";
            raw += c;
          }
        }
        if (raw.empty()) {
          spec.warnings.push_back(where +
                                  ": IncludeLaunchDescription target not recoverable, skipped");
          return std::nullopt;
        }
        inc.target = resolve_include_target(raw, repo_relative_path, ctx, spec.warnings);
        return LaunchAction{std::move(inc)};
      }
      case PyKind::Group:
        return std::nullopt;  // handled by the frame stack
    }
    return std::nullopt;
  };

  // Containment tree over GroupAction extents: a call belongs to the
  // innermost group whose parentheses enclose it.
  struct Frame {
    const PyCall* group;
    std::vector<LaunchAction> actions;
  };
  std::vector<Frame> frames{{nullptr, {}}};
  for (const auto& call : calls) {
    while (frames.size() > 1 && call.name_start > frames.back().group->close) {
      LaunchAction group_action{LaunchGroup{std::move(frames.back().actions)}};
      frames.pop_back();
      frames.back().actions.push_back(std::move(group_action));
    }
    if (call.kind == PyKind::Group) {
      frames.push_back({&call, {}});
      continue;
    }
    if (auto action = make_action(call)) frames.back().actions.push_back(std::move(*action));
  }
  while (frames.size() > 1) {
    LaunchAction group_action{LaunchGroup{std::move(frames.back().actions)}};
    frames.pop_back();
    frames.back().actions.push_back(std::move(group_action));
  }
  spec.actions = std::move(frames.front().actions);
  return spec;
}

}  // namespace detail_launch

LaunchSpec parse_launch(const std::string& repo_relative_path, std::string_view text,
                        const LaunchContext& ctx) {
  if (repo_relative_path.ends_with(".xml"))
    return detail_launch::parse_launch_xml(repo_relative_path, text, ctx);
  if (repo_relative_path.ends_with(".py"))
    return detail_launch::parse_launch_py(repo_relative_path, text, ctx);
  throw LaunchParseError(repo_relative_path + ": unsupported launch file type");
}

}  // namespace rosarch
