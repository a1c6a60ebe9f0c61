#pragma once

#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lambdagent/type.hpp"

namespace lambdagent {

/// Registry of external tool functions. Registered functions must be total
/// on their inputs; terminate (the identity) is always present.
class ToolRegistry {
 public:
  using ToolFn = std::function<std::string(const std::string&)>;

  ToolRegistry() {
    add("terminate", [](const std::string& s) { return s; });
  }

  ToolRegistry& add(const std::string& toolId, ToolFn fn, TypePtr dom = ty::str(),
                    TypePtr cod = ty::str()) {
    tools_[toolId] = std::move(fn);
    signatures_[toolId] = {std::move(dom), std::move(cod)};
    return *this;
  }

  bool contains(const std::string& toolId) const { return tools_.count(toolId) > 0; }

  std::optional<std::string> invoke(const std::string& toolId,
                                    const std::string& input) const {
    auto it = tools_.find(toolId);
    if (it == tools_.end()) return std::nullopt;
    return it->second(input);
  }

  const std::map<std::string, std::pair<TypePtr, TypePtr>>& signatures() const {
    return signatures_;
  }

  std::vector<std::string> toolIds() const {
    std::vector<std::string> ids;
    ids.reserve(tools_.size());
    for (const auto& [id, _] : tools_) ids.push_back(id);
    return ids;
  }

 private:
  std::map<std::string, ToolFn> tools_;
  std::map<std::string, std::pair<TypePtr, TypePtr>> signatures_;
};

/// Built-in local tools used by the CLI and the test fixtures. sum and mul
/// fold whitespace-separated integers; non-numeric tokens are ignored.
inline ToolRegistry builtinToolRegistry() {
  auto numbers = [](const std::string& s) {
    std::vector<long long> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
      try {
        out.push_back(std::stoll(tok));
      } catch (const std::exception&) {
      }
    }
    return out;
  };

  ToolRegistry reg;
  reg.add("echo", [](const std::string& s) { return s; });
  reg.add("upper", [](const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  });
  reg.add("lower", [](const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  });
  reg.add("words", [](const std::string& s) {
    std::istringstream in(s);
    std::string tok;
    long long n = 0;
    while (in >> tok) ++n;
    return std::to_string(n);
  });
  reg.add("sum", [numbers](const std::string& s) {
    auto ns = numbers(s);
    return std::to_string(std::accumulate(ns.begin(), ns.end(), 0LL));
  });
  reg.add("mul", [numbers](const std::string& s) {
    auto ns = numbers(s);
    long long acc = 1;
    for (long long n : ns) acc *= n;
    return std::to_string(acc);
  });
  reg.add("reverse", [](const std::string& s) {
    return std::string(s.rbegin(), s.rend());
  });
  return reg;
}

}  // namespace lambdagent
