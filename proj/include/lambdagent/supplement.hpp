#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lambdagent/lint.hpp"

namespace lambdagent {

/// Where a supplementary definition was found; feeds the mitigation note.
struct SupplementHit {
  std::string file;
  int line = 0;
  std::string snippet;
};

/// Lexical index of imperative-code definitions that can supplement
/// lint-flagged configuration fields. Identifiers are normalized
/// (lowercase, underscores stripped) so systemPrompt matches system_prompt.
struct SupplementIndex {
  std::map<std::string, std::vector<SupplementHit>> constantAssignments;
  std::map<std::string, std::vector<SupplementHit>> callKeywordArgs;
  std::map<std::string, std::vector<SupplementHit>> classAttributes;
  std::map<std::string, std::vector<SupplementHit>> frameworkPatterns;
  std::vector<std::string> ioErrors;

  bool empty() const {
    return constantAssignments.empty() && callKeywordArgs.empty() &&
           classAttributes.empty() && frameworkPatterns.empty();
  }
};

inline std::string normalizeIdentifier(const std::string& ident) {
  std::string out;
  out.reserve(ident.size());
  for (char c : ident) {
    if (c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

namespace detail {

inline bool isIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline std::string trimCopy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

inline std::size_t indentOf(const std::string& s) {
  std::size_t n = 0;
  while (n < s.size() && (s[n] == ' ' || s[n] == '\t')) ++n;
  return n;
}

/// Literal-ish right-hand sides accepted for constant/attribute matches:
/// string literals (including f-strings), numbers, lambdas, lists, dicts.
inline bool literalishValue(const std::string& value) {
  if (value.empty()) return false;
  char c = value[0];
  if (c == '"' || c == '\'' || c == '[' || c == '{' || c == '(') return c != '(';
  if ((c == 'f' || c == 'r' || c == 'b') && value.size() > 1 &&
      (value[1] == '"' || value[1] == '\''))
    return true;
  if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') return true;
  return value.rfind("lambda", 0) == 0;
}

/// Known chat-model constructor spellings (extensible pattern table).
inline const std::vector<std::string>& chatModelConstructors() {
  static const std::vector<std::string> table = {
      "ChatOpenAI(", "ChatAnthropic(", "AzureChatOpenAI(", "ChatOllama(",
      "ChatVertexAI(", "init_chat_model("};
  return table;
}

struct LineScanner {
  SupplementIndex* index;
  std::string file;
  int lineNo = 0;
  // class-block tracking (indentation based, good enough for line patterns)
  bool inClass = false;
  std::size_t classIndent = 0;

  void record(std::map<std::string, std::vector<SupplementHit>>& bucket,
              const std::string& key, const std::string& snippet) {
    bucket[key].push_back(SupplementHit{file, lineNo, trimCopy(snippet)});
  }

  void scanLine(const std::string& line) {
    ++lineNo;
    std::string trimmed = trimCopy(line);
    if (trimmed.empty() || trimmed[0] == '#') return;

    if (trimmed.rfind("class ", 0) == 0 && trimmed.back() == ':') {
      inClass = true;
      classIndent = indentOf(line);
      return;
    }
    std::size_t indent = indentOf(line);
    if (inClass && indent <= classIndent && trimmed.rfind("class ", 0) != 0)
      inClass = false;

    // Category 1/3: `ident = <literal>` at statement start; inside a class
    // block the assignment is a class attribute.
    {
      std::size_t i = 0;
      while (i < trimmed.size() && isIdentChar(trimmed[i])) ++i;
      if (i > 0 && !std::isdigit(static_cast<unsigned char>(trimmed[0]))) {
        std::string ident = trimmed.substr(0, i);
        std::size_t j = i;
        while (j < trimmed.size() && (trimmed[j] == ' ' || trimmed[j] == '\t')) ++j;
        if (j < trimmed.size() && trimmed[j] == '=' &&
            (j + 1 >= trimmed.size() || trimmed[j + 1] != '=')) {
          std::string value = trimCopy(trimmed.substr(j + 1));
          if (literalishValue(value)) {
            auto& bucket = (inClass && indent > classIndent)
                               ? index->classAttributes
                               : index->constantAssignments;
            record(bucket, normalizeIdentifier(ident), trimmed);
          }
        }
      }
    }

    // Category 2: `name=value` keyword arguments inside call parentheses.
    for (std::size_t i = 0; i + 1 < trimmed.size(); ++i) {
      if (!isIdentChar(trimmed[i])) continue;
      std::size_t start = i;
      while (i < trimmed.size() && isIdentChar(trimmed[i])) ++i;
      std::size_t j = i;
      while (j < trimmed.size() && trimmed[j] == ' ') ++j;
      if (j >= trimmed.size() || trimmed[j] != '=' ||
          (j + 1 < trimmed.size() && trimmed[j + 1] == '='))
        continue;
      // previous non-space character decides whether this is a kwarg
      std::size_t p = start;
      while (p > 0 && (trimmed[p - 1] == ' ' || trimmed[p - 1] == '\t')) --p;
      if (p == 0) continue;
      char prev = trimmed[p - 1];
      if (prev != '(' && prev != ',') continue;
      record(index->callKeywordArgs, normalizeIdentifier(trimmed.substr(start, i - start)),
             trimmed);
    }

    // Category 4: framework-specific patterns.
    for (const std::string& ctor : chatModelConstructors()) {
      if (trimmed.find(ctor) != std::string::npos) {
        record(index->frameworkPatterns, "chatModelConstructor", trimmed);
        break;
      }
    }
    std::size_t term = trimmed.find("is_termination_msg");
    if (term != std::string::npos) {
      std::size_t after = term + std::string("is_termination_msg").size();
      while (after < trimmed.size() && trimmed[after] == ' ') ++after;
      if (after < trimmed.size() && trimmed[after] == '=')
        record(index->frameworkPatterns, "terminationMsgArg", trimmed);
    }
    if (trimmed.rfind("@tool", 0) == 0)
      record(index->frameworkPatterns, "toolDecorator", trimmed);
  }
};

inline bool imperativeSourceFile(const std::filesystem::path& p) {
  static const std::set<std::string> exts = {".py", ".js", ".ts"};
  return exts.count(p.extension().string()) > 0;
}

}  // namespace detail

/// Lexically scans a repository for the four supplement categories. File
/// IO errors are collected per file, never fatal; discovery order does not
/// affect reconciliation.
inline SupplementIndex scanRepo(const std::string& rootDir) {
  SupplementIndex index;
  std::error_code ec;
  std::filesystem::recursive_directory_iterator it(rootDir, ec), end;
  if (ec) {
    index.ioErrors.push_back(rootDir + ": " + ec.message());
    return index;
  }
  std::vector<std::filesystem::path> files;
  for (; it != end; it.increment(ec)) {
    if (ec) {
      index.ioErrors.push_back(rootDir + ": " + ec.message());
      break;
    }
    if (it->is_regular_file() && detail::imperativeSourceFile(it->path()))
      files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) {
      index.ioErrors.push_back(path.string() + ": cannot open");
      continue;
    }
    detail::LineScanner scanner{&index, path.string()};
    std::string line;
    while (std::getline(in, line)) scanner.scanLine(line);
  }
  return index;
}

namespace detail {

inline const std::set<std::string>& promptLikeIdents() {
  static const std::set<std::string> s = {"systemprompt", "prompt", "systemmessage",
                                          "instructions", "backstory"};
  return s;
}
inline const std::set<std::string>& modelLikeIdents() {
  static const std::set<std::string> s = {"model", "modelname", "llm", "llmmodel",
                                          "modelid"};
  return s;
}
inline const std::set<std::string>& maxIterLikeIdents() {
  static const std::set<std::string> s = {"maxiter", "maxiterations", "maxsteps"};
  return s;
}

inline std::optional<SupplementHit> firstHit(
    const std::map<std::string, std::vector<SupplementHit>>& bucket,
    const std::set<std::string>& idents) {
  for (const auto& ident : idents) {
    auto it = bucket.find(ident);
    if (it != bucket.end() && !it->second.empty()) return it->second.front();
  }
  return std::nullopt;
}

inline std::optional<SupplementHit> patternHit(const SupplementIndex& index,
                                               const std::string& pattern) {
  auto it = index.frameworkPatterns.find(pattern);
  if (it != index.frameworkPatterns.end() && !it->second.empty())
    return it->second.front();
  return std::nullopt;
}

/// Supplement lookup per rule: L001 prompt-like assignment/kwarg/attribute,
/// L002 model-like kwarg or chat-model constructor, L004a termination
/// argument or tool decorator, L017 max-iteration kwarg.
inline std::optional<SupplementHit> supplementFor(const std::string& ruleId,
                                                  const SupplementIndex& index) {
  if (ruleId == "L001") {
    if (auto hit = firstHit(index.constantAssignments, promptLikeIdents())) return hit;
    if (auto hit = firstHit(index.callKeywordArgs, promptLikeIdents())) return hit;
    return firstHit(index.classAttributes, promptLikeIdents());
  }
  if (ruleId == "L002") {
    if (auto hit = firstHit(index.callKeywordArgs, modelLikeIdents())) return hit;
    return patternHit(index, "chatModelConstructor");
  }
  if (ruleId == "L004a") {
    if (auto hit = patternHit(index, "terminationMsgArg")) return hit;
    return patternHit(index, "toolDecorator");
  }
  if (ruleId == "L017") {
    return firstHit(index.callKeywordArgs, maxIterLikeIdents());
  }
  return std::nullopt;
}

}  // namespace detail

/// Downgrades findings whose flagged field has a code supplement to INFO,
/// attaching a file:line mitigation note. Never upgrades severity and never
/// creates findings.
inline std::vector<LintFinding> reconcile(const std::vector<LintFinding>& findings,
                                          const SupplementIndex& index) {
  std::vector<LintFinding> out;
  out.reserve(findings.size());
  for (LintFinding f : findings) {
    if (f.severity != Severity::Info) {
      if (auto hit = detail::supplementFor(f.ruleId, index)) {
        f.severity = Severity::Info;
        f.mitigation = "supplemented by " + hit->file + ":" + std::to_string(hit->line);
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace lambdagent
