#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "cpp_tokens.hpp"
#include "rosarch/node_scan.hpp"
#include "rosarch/strings.hpp"
#include "rosarch/version.hpp"

namespace fs = std::filesystem;

namespace rosarch {

namespace {

using detail::Token;
using detail::match_forward;
using detail::tokenize_cpp;

constexpr const char* kNodeBase = "rclcpp::Node";

bool is_punct(const Token& t, std::string_view s) {
  return t.kind == Token::Kind::Punct && t.text == s;
}

bool is_ident(const Token& t, std::string_view s) {
  return t.kind == Token::Kind::Ident && t.text == s;
}

// Joins a token run into readable text: no space around "::", single space
// between adjacent words.
std::string join_tokens(const std::vector<Token>& toks, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& t = toks[i];
    if (!out.empty() && t.kind != Token::Kind::Punct && i > begin &&
        toks[i - 1].kind != Token::Kind::Punct)
      out.push_back(' ');
    out += t.text;
  }
  return out;
}

std::string normalize_type(std::string type) {
  if (str::starts_with(type, "::")) type = type.substr(2);
  return type;
}

struct ClassDecl {
  std::string name;
  std::vector<std::string> bases;
  int line = 0;
  std::size_t body_begin = std::string::npos;  // token index of '{'
  std::size_t body_end = std::string::npos;    // token index of '}'
};

// Reads a qualified name (Ident ("::" Ident)*), skipping one trailing
// template argument list. Returns the consumed end index.
std::size_t read_qualified_name(const std::vector<Token>& toks, std::size_t i,
                                std::string& out) {
  out.clear();
  if (i < toks.size() && is_punct(toks[i], "::")) {
    out += "::";
    ++i;
  }
  while (i < toks.size() && toks[i].kind == Token::Kind::Ident) {
    out += toks[i].text;
    ++i;
    if (i < toks.size() && is_punct(toks[i], "<")) {
      std::size_t close = match_forward(toks, i);
      if (close == std::string::npos) break;
      i = close + 1;  // template arguments are irrelevant for chain resolution
    }
    if (i + 1 < toks.size() && is_punct(toks[i], "::") &&
        toks[i + 1].kind == Token::Kind::Ident) {
      out += "::";
      ++i;
      continue;
    }
    break;
  }
  return i;
}

std::vector<ClassDecl> find_class_decls(const std::vector<Token>& toks) {
  std::vector<ClassDecl> decls;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (!(is_ident(toks[i], "class") || is_ident(toks[i], "struct"))) continue;
    if (i > 0 && is_ident(toks[i - 1], "enum")) continue;
    if (toks[i + 1].kind != Token::Kind::Ident) continue;

    ClassDecl decl;
    decl.name = toks[i + 1].text;
    decl.line = toks[i + 1].line;
    std::size_t j = i + 2;
    if (j < toks.size() && is_ident(toks[j], "final")) ++j;
    if (j < toks.size() && is_punct(toks[j], ";")) continue;  // forward declaration

    if (j < toks.size() && is_punct(toks[j], ":")) {
      ++j;
      while (j < toks.size() && !is_punct(toks[j], "{")) {
        if (is_ident(toks[j], "public") || is_ident(toks[j], "private") ||
            is_ident(toks[j], "protected") || is_ident(toks[j], "virtual")) {
          ++j;
          continue;
        }
        if (is_punct(toks[j], ",")) {
          ++j;
          continue;
        }
        std::string base;
        std::size_t next = read_qualified_name(toks, j, base);
        if (next == j) {
          ++j;  // unrecognized token, skip
          continue;
        }
        decl.bases.push_back(normalize_type(base));
        j = next;
      }
    }
    if (j < toks.size() && is_punct(toks[j], "{")) {
      decl.body_begin = j;
      decl.body_end = match_forward(toks, j);
      if (decl.body_end == std::string::npos) continue;  // truncated, skip
      decls.push_back(std::move(decl));
    }
  }
  return decls;
}

struct MemberDef {
  std::string class_name;
  std::size_t init_begin = std::string::npos;  // after ')', may equal body_begin
  std::size_t body_begin = std::string::npos;
  std::size_t body_end = std::string::npos;
};

// Out-of-line definitions "Class::member(...) [: init-list] { ... }".
std::vector<MemberDef> find_member_defs(const std::vector<Token>& toks) {
  std::vector<MemberDef> defs;
  for (std::size_t i = 0; i + 3 < toks.size(); ++i) {
    if (toks[i].kind != Token::Kind::Ident) continue;
    if (!is_punct(toks[i + 1], "::")) continue;
    if (toks[i + 2].kind != Token::Kind::Ident) continue;
    if (toks[i + 2].text == "operator") continue;
    if (!is_punct(toks[i + 3], "(")) continue;

    std::size_t close = match_forward(toks, i + 3);
    if (close == std::string::npos) continue;
    std::size_t j = close + 1;
    while (j < toks.size() &&
           (is_ident(toks[j], "const") || is_ident(toks[j], "noexcept") ||
            is_ident(toks[j], "override") || is_ident(toks[j], "final")))
      ++j;

    MemberDef def;
    def.class_name = toks[i].text;
    def.init_begin = j;
    if (j < toks.size() && is_punct(toks[j], ":")) {
      // Walk the constructor init list; each initializer is name(..) or
      // name{..}, so the body brace is the first '{' not owned by one.
      ++j;
      while (j < toks.size()) {
        std::string ignored;
        std::size_t next = read_qualified_name(toks, j, ignored);
        if (next != j) j = next;
        if (j < toks.size() && (is_punct(toks[j], "(") || is_punct(toks[j], "{"))) {
          bool brace_init = is_punct(toks[j], "{");
          std::size_t c = match_forward(toks, j);
          if (c == std::string::npos) break;
          j = c + 1;
          if (j < toks.size() && is_punct(toks[j], ",")) {
            ++j;
            continue;
          }
          if (brace_init && j < toks.size() && !is_punct(toks[j], "{")) continue;
          break;
        }
        break;
      }
    }
    if (j < toks.size() && is_punct(toks[j], "{")) {
      def.body_begin = j;
      def.body_end = match_forward(toks, j);
      if (def.body_end != std::string::npos) defs.push_back(std::move(def));
    }
  }
  return defs;
}

struct CreateCall {
  const char* method;
  PortKind kind;
};

constexpr CreateCall kCreateCalls[] = {
    {"create_publisher", PortKind::Publisher},
    {"create_subscription", PortKind::Subscriber},
    {"create_service", PortKind::ServiceProvided},
    {"create_client", PortKind::ServiceRequired},
};

const CreateCall* match_create_call(const Token& t) {
  if (t.kind != Token::Kind::Ident) return nullptr;
  for (const auto& c : kCreateCalls)
    if (t.text == c.method) return &c;
  return nullptr;
}

// Splits a call argument range into top-level argument extents.
std::vector<std::pair<std::size_t, std::size_t>> split_args(const std::vector<Token>& toks,
                                                            std::size_t begin,
                                                            std::size_t end) {
  std::vector<std::pair<std::size_t, std::size_t>> args;
  int depth = 0;
  std::size_t start = begin;
  for (std::size_t i = begin; i < end; ++i) {
    if (toks[i].kind != Token::Kind::Punct) continue;
    const std::string& t = toks[i].text;
    if (t == "(" || t == "{" || t == "[") ++depth;
    else if (t == ")" || t == "}" || t == "]") --depth;
    else if (t == "," && depth == 0) {
      args.emplace_back(start, i);
      start = i + 1;
    }
  }
  if (start < end) args.emplace_back(start, end);
  return args;
}

std::optional<std::string> find_member_handler(const std::vector<Token>& toks,
                                               std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i + 2 < end; ++i) {
    if (!is_punct(toks[i], "&")) continue;
    std::string name;
    std::size_t next = read_qualified_name(toks, i + 1, name);
    if (next == i + 1) continue;
    auto pos = name.rfind("::");
    return pos == std::string::npos ? name : name.substr(pos + 2);
  }
  return std::nullopt;
}

std::vector<EndpointRecord> extract_endpoints_in_range(
    const std::vector<Token>& toks, std::size_t begin, std::size_t end,
    const std::string& file, std::vector<std::string>* warnings) {
  std::vector<EndpointRecord> records;
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  for (std::size_t i = begin; i < end; ++i) {
    const CreateCall* call = match_create_call(toks[i]);
    if (!call) continue;

    EndpointRecord rec;
    rec.kind = call->kind;
    rec.file = file;
    rec.line = toks[i].line;
    const std::string at = file.empty() ? ("line " + std::to_string(rec.line))
                                        : (file + ":" + std::to_string(rec.line));

    std::size_t j = i + 1;
    if (j < end && is_punct(toks[j], "<")) {
      std::size_t close = match_forward(toks, j);
      if (close == std::string::npos || close >= end) continue;
      rec.interface_type = normalize_type(join_tokens(toks, j + 1, close));
      j = close + 1;
    }
    if (j >= end || !is_punct(toks[j], "(")) continue;  // not a call expression
    std::size_t close = match_forward(toks, j);
    if (close == std::string::npos || close > end) continue;
    if (rec.interface_type.empty()) {
      warn(at + ": " + std::string(call->method) + " without explicit interface type, skipped");
      i = close;
      continue;
    }

    auto args = split_args(toks, j + 1, close);
    rec.declared_name = kDynamicName;
    if (!args.empty()) {
      for (std::size_t k = args[0].first; k < args[0].second; ++k) {
        if (toks[k].kind == Token::Kind::String) {
          rec.declared_name = toks[k].text;
          break;
        }
      }
    }
    if (rec.declared_name == kDynamicName)
      warn(at + ": non-literal " + (is_topic_kind(rec.kind) ? "topic" : "service") +
           " name, recorded as <dynamic>");

    if (kind_has_handler(rec.kind)) {
      std::optional<std::string> handler;
      for (std::size_t a = 1; a < args.size() && !handler; ++a)
        handler = find_member_handler(toks, args[a].first, args[a].second);
      if (!handler) {
        for (std::size_t a = 1; a < args.size() && !handler; ++a)
          if (is_punct(toks[args[a].first], "[")) handler = "<lambda>";
      }
      if (!handler && args.size() >= 2) {
        auto [s, e] = args.back();
        if (e - s == 1 && toks[s].kind == Token::Kind::Ident) handler = toks[s].text;
      }
      if (!handler) {
        handler = "<unknown>";
        warn(at + ": callback expression not recognized");
      }
      rec.handler = handler;
    }
    records.push_back(std::move(rec));
    i = close;
  }
  return records;
}

// First string literal passed to a Node base-constructor call, if any.
std::optional<std::string> find_declared_node_name(const std::vector<Token>& toks,
                                                   std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i + 2 < end; ++i) {
    if (!is_ident(toks[i], "Node")) continue;
    if (i > begin && is_punct(toks[i - 1], "::") &&
        !(i >= 2 && is_ident(toks[i - 2], "rclcpp")))
      continue;  // SomeOther::Node
    if (!is_punct(toks[i + 1], "(")) continue;
    if (toks[i + 2].kind == Token::Kind::String) return toks[i + 2].text;
  }
  return std::nullopt;
}

struct ChainResult {
  std::vector<std::string> chain;  // class .. rclcpp::Node
  bool reaches = false;
};

ChainResult resolve_chain(const std::string& name,
                          const std::map<std::string, std::vector<std::string>>& bases) {
  // BFS for the shortest path to the node base class.
  std::map<std::string, std::string> parent;
  std::deque<std::string> queue{name};
  parent[name] = "";
  while (!queue.empty()) {
    std::string current = queue.front();
    queue.pop_front();
    auto it = bases.find(current);
    if (it == bases.end()) continue;
    for (const auto& base : it->second) {
      if (base == kNodeBase) {
        ChainResult result;
        result.reaches = true;
        result.chain.push_back(kNodeBase);
        for (std::string c = current; !c.empty(); c = parent[c]) result.chain.push_back(c);
        std::reverse(result.chain.begin(), result.chain.end());
        return result;
      }
      if (!parent.count(base)) {
        parent[base] = current;
        queue.push_back(base);
      }
    }
  }
  return {};
}

}  // namespace

std::map<std::string, std::vector<std::string>> collect_class_bases(std::string_view file_text) {
  std::map<std::string, std::vector<std::string>> out;
  auto toks = tokenize_cpp(file_text);
  for (auto& decl : find_class_decls(toks))
    out.emplace(std::move(decl.name), std::move(decl.bases));
  return out;
}

std::vector<NodeClassRecord> detect_node_classes(
    std::string_view file_text, const std::map<std::string, std::vector<std::string>>& known_bases,
    int max_depth, std::vector<std::string>* warnings) {
  auto toks = tokenize_cpp(file_text);
  auto decls = find_class_decls(toks);
  auto member_defs = find_member_defs(toks);

  std::map<std::string, std::vector<std::string>> bases = known_bases;
  for (const auto& d : decls)
    if (!bases.count(d.name)) bases[d.name] = d.bases;

  std::vector<NodeClassRecord> records;
  for (const auto& decl : decls) {
    auto chain = resolve_chain(decl.name, bases);
    if (!chain.reaches) continue;
    const int hops = static_cast<int>(chain.chain.size()) - 1;
    if (hops > max_depth) {
      if (warnings)
        warnings->push_back("class " + decl.name + " reaches " + kNodeBase + " in " +
                            std::to_string(hops) + " hops, beyond the configured depth " +
                            std::to_string(max_depth) + "; excluded");
      continue;
    }
    NodeClassRecord rec;
    rec.class_name = decl.name;
    rec.inheritance_chain = chain.chain;
    rec.declared_node_name = find_declared_node_name(toks, decl.body_begin, decl.body_end);
    if (!rec.declared_node_name) {
      for (const auto& def : member_defs) {
        if (def.class_name != decl.name) continue;
        rec.declared_node_name = find_declared_node_name(toks, def.init_begin, def.body_end);
        if (rec.declared_node_name) break;
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<EndpointRecord> extract_endpoints(std::string_view class_body,
                                              std::vector<std::string>* warnings) {
  auto toks = tokenize_cpp(class_body);
  return extract_endpoints_in_range(toks, 0, toks.size(), "", warnings);
}

std::vector<Port> ports_from_endpoints(const std::vector<EndpointRecord>& endpoints) {
  std::vector<Port> ports;
  ports.reserve(endpoints.size());
  int topic_seq = 0, service_seq = 0;
  for (const auto& e : endpoints) {
    Port p;
    p.identifier = is_topic_kind(e.kind) ? "p" + std::to_string(++topic_seq)
                                         : "s" + std::to_string(++service_seq);
    p.kind = e.kind;
    p.interface_type = e.interface_type;
    p.declared_name = e.declared_name;
    p.handler = e.handler;
    ports.push_back(std::move(p));
  }
  return ports;
}

NodeScan scan_repository(const fs::path& root, const ScanConfig& config) {
  NodeScan scan;
  scan.repo_root = root.generic_string();
  scan.tool_version = kToolVersion;

  static const std::set<std::string> kSourceExts = {".cpp", ".cc", ".cxx",
                                                    ".hpp", ".hh", ".h", ".hxx"};

  auto included = [&](const std::string& rel) {
    bool in = config.include_globs.empty();
    for (const auto& g : config.include_globs) in = in || str::glob_match(g, rel);
    for (const auto& g : config.exclude_globs)
      if (str::glob_match(g, rel)) return false;
    return in;
  };

  std::vector<std::string> files;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(root, ec), end; it != end && !ec; it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    if (!kSourceExts.count(it->path().extension().string())) continue;
    std::string rel = fs::relative(it->path(), root).generic_string();
    if (included(rel)) files.push_back(std::move(rel));
  }
  std::sort(files.begin(), files.end());

  struct FileScan {
    std::string rel;
    std::vector<Token> tokens;
    std::vector<ClassDecl> decls;
    std::vector<MemberDef> member_defs;
  };
  std::vector<FileScan> scans;
  for (const auto& rel : files) {
    std::ifstream in(root / rel, std::ios::binary);
    if (!in) {
      scan.warnings.push_back("unreadable file skipped: " + rel);
      continue;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    FileScan fscan;
    fscan.rel = rel;
    fscan.tokens = tokenize_cpp(buffer.str());
    fscan.decls = find_class_decls(fscan.tokens);
    fscan.member_defs = find_member_defs(fscan.tokens);
    scans.push_back(std::move(fscan));
  }

  // Global inheritance graph; the first declaration of a name wins.
  std::map<std::string, std::vector<std::string>> bases;
  std::map<std::string, std::pair<std::size_t, std::size_t>> decl_site;  // name -> (scan, decl)
  for (std::size_t s = 0; s < scans.size(); ++s) {
    for (std::size_t d = 0; d < scans[s].decls.size(); ++d) {
      const auto& decl = scans[s].decls[d];
      if (bases.count(decl.name)) {
        scan.warnings.push_back("class " + decl.name + " redeclared in " + scans[s].rel +
                                "; keeping the first declaration");
        continue;
      }
      bases[decl.name] = decl.bases;
      decl_site[decl.name] = {s, d};
    }
  }

  std::set<std::string> node_classes;
  for (const auto& [name, site] : decl_site) {
    auto chain = resolve_chain(name, bases);
    if (!chain.reaches) continue;
    const int hops = static_cast<int>(chain.chain.size()) - 1;
    if (hops > config.max_inheritance_depth) {
      scan.warnings.push_back("class " + name + " reaches " + kNodeBase + " in " +
                              std::to_string(hops) + " hops, beyond the configured depth " +
                              std::to_string(config.max_inheritance_depth) + "; excluded");
      continue;
    }
    node_classes.insert(name);

    NodeClassRecord rec;
    rec.class_name = name;
    rec.inheritance_chain = chain.chain;

    const auto& [si, di] = site;
    const auto& decl = scans[si].decls[di];
    std::set<std::string> rec_files{scans[si].rel};

    // Endpoint-bearing token ranges: the class body plus every out-of-line
    // member definition, in sorted file order.
    rec.endpoints = extract_endpoints_in_range(scans[si].tokens, decl.body_begin, decl.body_end,
                                               scans[si].rel, &scan.warnings);
    rec.declared_node_name =
        find_declared_node_name(scans[si].tokens, decl.body_begin, decl.body_end);
    for (const auto& fscan : scans) {
      for (const auto& def : fscan.member_defs) {
        if (def.class_name != name) continue;
        rec_files.insert(fscan.rel);
        auto eps = extract_endpoints_in_range(fscan.tokens, def.init_begin, def.body_end,
                                              fscan.rel, &scan.warnings);
        rec.endpoints.insert(rec.endpoints.end(), eps.begin(), eps.end());
        if (!rec.declared_node_name)
          rec.declared_node_name =
              find_declared_node_name(fscan.tokens, def.init_begin, def.body_end);
      }
    }
    std::stable_sort(rec.endpoints.begin(), rec.endpoints.end(),
                     [](const EndpointRecord& a, const EndpointRecord& b) {
                       if (a.file != b.file) return a.file < b.file;
                       return a.line < b.line;
                     });
    rec.files.assign(rec_files.begin(), rec_files.end());
    scan.nodes.push_back(std::move(rec));
  }

  std::sort(scan.nodes.begin(), scan.nodes.end(),
            [](const NodeClassRecord& a, const NodeClassRecord& b) {
              return a.class_name < b.class_name;
            });

  // Endpoint creation outside node classes is not modeled; surface it so the
  // recall loss is visible (wrapper classes, over-deep hierarchies).
  for (const auto& fscan : scans) {
    // Innermost enclosing class wins so nested helper classes are not
    // mistaken for their enclosing node class.
    auto enclosing_class = [&](std::size_t idx) -> std::string {
      std::string name;
      std::size_t best_begin = 0;
      for (const auto& decl : fscan.decls) {
        if (idx > decl.body_begin && idx < decl.body_end && decl.body_begin >= best_begin) {
          best_begin = decl.body_begin;
          name = decl.name;
        }
      }
      if (name.empty()) {
        for (const auto& def : fscan.member_defs)
          if (idx > def.init_begin && idx < def.body_end) return def.class_name;
      }
      return name;
    };
    auto in_node_range = [&](std::size_t idx) {
      const std::string cls = enclosing_class(idx);
      return !cls.empty() && node_classes.count(cls) > 0;
    };
    for (std::size_t i = 0; i < fscan.tokens.size(); ++i) {
      if (!match_create_call(fscan.tokens[i])) continue;
      if (i + 1 >= fscan.tokens.size()) continue;
      if (!is_punct(fscan.tokens[i + 1], "<") && !is_punct(fscan.tokens[i + 1], "(")) continue;
      if (in_node_range(i)) continue;
      const std::string cls = enclosing_class(i);
      scan.warnings.push_back(
          fscan.rel + ":" + std::to_string(fscan.tokens[i].line) + ": " + fscan.tokens[i].text +
          (cls.empty() ? " outside any node class" : " in non-node class '" + cls + "'") +
          ", endpoint not modeled");
    }
  }

  return scan;
}

}  // namespace rosarch
