#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cpp_tokens.hpp"
#include "rosarch/launch.hpp"
#include "rosarch/strings.hpp"

namespace fs = std::filesystem;

namespace rosarch {

namespace {

using detail::Token;
using detail::match_forward;
using detail::tokenize_cpp;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Raw argument list of every add_executable(...) occurrence.
std::vector<std::vector<std::string>> find_executable_targets(const std::string& text) {
  std::vector<std::vector<std::string>> targets;
  std::size_t pos = 0;
  while ((pos = text.find("add_executable", pos)) != std::string::npos) {
    std::size_t open = pos + std::string("add_executable").size();
    while (open < text.size() && std::isspace(static_cast<unsigned char>(text[open]))) ++open;
    if (open >= text.size() || text[open] != '(') {
      pos = open;
      continue;
    }
    int depth = 0;
    std::size_t close = open;
    for (; close < text.size(); ++close) {
      if (text[close] == '(') ++depth;
      else if (text[close] == ')') {
        if (--depth == 0) break;
      } else if (text[close] == '#') {
        while (close < text.size() && text[close] != '\n') ++close;
      }
    }
    if (close >= text.size()) break;

    std::string args = text.substr(open + 1, close - open - 1);
    // Drop comments, then split on whitespace.
    std::string cleaned;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == '#') {
        while (i < args.size() && args[i] != '\n') ++i;
        cleaned.push_back('\n');
        continue;
      }
      cleaned.push_back(args[i]);
    }
    std::vector<std::string> tokens;
    std::string current;
    for (char c : cleaned) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
      } else {
        current.push_back(c);
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    if (!tokens.empty()) targets.push_back(std::move(tokens));
    pos = close;
  }
  return targets;
}

bool is_source_file(const std::string& arg) {
  for (const char* ext : {".cpp", ".cc", ".cxx", ".c"})
    if (arg.ends_with(ext)) return true;
  return false;
}

// First node class mentioned inside the entry source's main() body.
std::optional<std::string> class_in_main(const std::string& text,
                                         const std::set<std::string>& known,
                                         bool& ambiguous, std::string& other) {
  auto toks = tokenize_cpp(text);
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (toks[i].kind != Token::Kind::Ident || toks[i].text != "main") continue;
    if (toks[i + 1].kind != Token::Kind::Punct || toks[i + 1].text != "(") continue;
    std::size_t params_close = match_forward(toks, i + 1);
    if (params_close == std::string::npos) continue;
    std::size_t body = params_close + 1;
    if (body >= toks.size() || toks[body].text != "{") continue;
    std::size_t body_close = match_forward(toks, body);
    if (body_close == std::string::npos) continue;

    std::optional<std::string> first;
    for (std::size_t j = body + 1; j < body_close; ++j) {
      if (toks[j].kind != Token::Kind::Ident || !known.count(toks[j].text)) continue;
      if (!first) {
        first = toks[j].text;
      } else if (*first != toks[j].text) {
        ambiguous = true;
        other = toks[j].text;
        break;
      }
    }
    return first;
  }
  return std::nullopt;
}

}  // namespace

BuildMap parse_build_config(const fs::path& repo_root, const NodeScan& scan) {
  BuildMap map;

  std::set<std::string> known;
  for (const auto& n : scan.nodes) known.insert(n.class_name);
  const auto packages = discover_packages(repo_root);

  auto package_for = [&](const std::string& rel) {
    std::string best;
    std::size_t best_len = 0;
    for (const auto& [name, dir] : packages) {
      const bool match = dir == "." || dir.empty() || rel == dir ||
                         str::starts_with(rel, dir + "/");
      const std::size_t len = (dir == "." || dir.empty()) ? 0 : dir.size();
      if (match && (best.empty() || len > best_len)) {
        best = name;
        best_len = len;
      }
    }
    return best;
  };

  std::vector<std::string> cmake_files;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(repo_root, ec), end; it != end && !ec;
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().filename() == "CMakeLists.txt")
      cmake_files.push_back(fs::relative(it->path(), repo_root).generic_string());
  }
  std::sort(cmake_files.begin(), cmake_files.end());

  for (const auto& cmake_rel : cmake_files) {
    const fs::path cmake_dir = fs::path(cmake_rel).parent_path();
    const std::string text = read_file(repo_root / cmake_rel);
    for (const auto& args : find_executable_targets(text)) {
      const std::string& exe = args[0];
      if (exe.find('$') != std::string::npos) {
        map.warnings.push_back(cmake_rel + ": executable name with substitution skipped: " + exe);
        continue;
      }
      if (map.executables.count(exe)) {
        map.warnings.push_back(cmake_rel + ": executable '" + exe +
                               "' declared more than once; keeping the first target");
        continue;
      }

      std::optional<std::string> node_class;
      std::string entry;
      bool ambiguous = false;
      std::string other;
      for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& arg = args[i];
        if (arg == "WIN32" || arg == "MACOSX_BUNDLE" || arg == "EXCLUDE_FROM_ALL") continue;
        if (!is_source_file(arg)) continue;
        if (arg.find("${") != std::string::npos) {
          map.warnings.push_back(cmake_rel + ": source with substitution not resolved: " + arg);
          continue;
        }
        const fs::path source_rel = (cmake_dir / arg).lexically_normal();
        if (!fs::exists(repo_root / source_rel)) continue;
        auto found =
            class_in_main(read_file(repo_root / source_rel), known, ambiguous, other);
        if (found) {
          node_class = found;
          entry = source_rel.generic_string();
          break;
        }
      }
      if (!node_class) {
        map.warnings.push_back(cmake_rel + ": executable '" + exe +
                               "' instantiates no known node class; excluded");
        continue;
      }
      if (ambiguous)
        map.warnings.push_back(cmake_rel + ": executable '" + exe + "' mentions both " +
                               *node_class + " and " + other + " in main(); using " +
                               *node_class);
      map.executables.emplace(
          exe, BuildTarget{package_for(entry), entry, *node_class});
    }
  }
  return map;
}

}  // namespace rosarch
