#pragma once

#include <memory>
#include <regex>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

namespace lambdagent {

struct Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

/// Closed DSL of decidable predicates over strings. Evaluation is total:
/// every combinator terminates on every input.
struct Predicate {
  struct NonEmpty {};
  struct MaxWords {
    int n = 0;
  };
  struct MinWords {
    int n = 0;
  };
  struct MatchesRegex {
    std::string pattern;
  };
  struct ValidJson {};
  struct Conj {
    PredicatePtr left;
    PredicatePtr right;
  };
  struct Neg {
    PredicatePtr inner;
  };

  using Node =
      std::variant<NonEmpty, MaxWords, MinWords, MatchesRegex, ValidJson, Conj, Neg>;
  Node node;
};

namespace pred {

inline PredicatePtr nonEmpty() {
  return std::make_shared<Predicate>(Predicate{Predicate::NonEmpty{}});
}
inline PredicatePtr maxWords(int n) {
  return std::make_shared<Predicate>(Predicate{Predicate::MaxWords{n}});
}
inline PredicatePtr minWords(int n) {
  return std::make_shared<Predicate>(Predicate{Predicate::MinWords{n}});
}
inline PredicatePtr matchesRegex(std::string pattern) {
  return std::make_shared<Predicate>(
      Predicate{Predicate::MatchesRegex{std::move(pattern)}});
}
inline PredicatePtr validJson() {
  return std::make_shared<Predicate>(Predicate{Predicate::ValidJson{}});
}
inline PredicatePtr conj(PredicatePtr a, PredicatePtr b) {
  return std::make_shared<Predicate>(
      Predicate{Predicate::Conj{std::move(a), std::move(b)}});
}
inline PredicatePtr neg(PredicatePtr p) {
  return std::make_shared<Predicate>(Predicate{Predicate::Neg{std::move(p)}});
}

}  // namespace pred

inline bool operator==(const Predicate& a, const Predicate& b);
inline bool predicateEqual(const PredicatePtr& a, const PredicatePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

inline bool operator==(const Predicate& a, const Predicate& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Predicate::MaxWords> ||
                      std::is_same_v<T, Predicate::MinWords>) {
          return lhs.n == rhs.n;
        } else if constexpr (std::is_same_v<T, Predicate::MatchesRegex>) {
          return lhs.pattern == rhs.pattern;
        } else if constexpr (std::is_same_v<T, Predicate::Conj>) {
          return predicateEqual(lhs.left, rhs.left) &&
                 predicateEqual(lhs.right, rhs.right);
        } else if constexpr (std::is_same_v<T, Predicate::Neg>) {
          return predicateEqual(lhs.inner, rhs.inner);
        } else {
          return true;
        }
      },
      a.node);
}

inline int countWords(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  int count = 0;
  while (in >> word) ++count;
  return count;
}

/// Total, terminating evaluation on any string. Invalid regexes simply
/// fail to match rather than aborting the evaluation.
inline bool evalPredicate(const PredicatePtr& p, const std::string& text) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Predicate::NonEmpty>) {
          return !text.empty();
        } else if constexpr (std::is_same_v<T, Predicate::MaxWords>) {
          return countWords(text) <= n.n;
        } else if constexpr (std::is_same_v<T, Predicate::MinWords>) {
          return countWords(text) >= n.n;
        } else if constexpr (std::is_same_v<T, Predicate::MatchesRegex>) {
          try {
            return std::regex_match(text, std::regex(n.pattern));
          } catch (const std::regex_error&) {
            return false;
          }
        } else if constexpr (std::is_same_v<T, Predicate::ValidJson>) {
          return nlohmann::json::accept(text);
        } else if constexpr (std::is_same_v<T, Predicate::Conj>) {
          return evalPredicate(n.left, text) && evalPredicate(n.right, text);
        } else {
          return !evalPredicate(n.inner, text);
        }
      },
      p->node);
}

inline std::string printPredicate(const PredicatePtr& p) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Predicate::NonEmpty>) {
          return "nonempty";
        } else if constexpr (std::is_same_v<T, Predicate::MaxWords>) {
          return "max_words(" + std::to_string(n.n) + ")";
        } else if constexpr (std::is_same_v<T, Predicate::MinWords>) {
          return "min_words(" + std::to_string(n.n) + ")";
        } else if constexpr (std::is_same_v<T, Predicate::MatchesRegex>) {
          return "regex(" + nlohmann::json(n.pattern).dump() + ")";
        } else if constexpr (std::is_same_v<T, Predicate::ValidJson>) {
          return "valid_json";
        } else if constexpr (std::is_same_v<T, Predicate::Conj>) {
          return "and(" + printPredicate(n.left) + ", " + printPredicate(n.right) + ")";
        } else {
          return "not(" + printPredicate(n.inner) + ")";
        }
      },
      p->node);
}

}  // namespace lambdagent
