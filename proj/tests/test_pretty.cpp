#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "lambdagent/compile.hpp"
#include "lambdagent/pretty.hpp"
#include "lambdagent/subst.hpp"
#include "support/generators.hpp"
#include "support/term_reader.hpp"

using namespace lambdagent;
using lambdagent::testsupport::readTerm;
using lambdagent::testsupport::TermGen;

namespace {

const std::string kFixtures = LAMBDAGENT_FIXTURES_DIR;

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string golden(const std::string& name) {
  std::string text = readFile(kFixtures + "/goldens/" + name);
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

int depthOf(const TermPtr& t);

int maxChildDepth(std::initializer_list<TermPtr> children) {
  int best = 0;
  for (const auto& c : children)
    if (c) best = std::max(best, depthOf(c));
  return best;
}

int depthOf(const TermPtr& t) {
  return 1 + std::visit(
                 [&](const auto& n) -> int {
                   using T = std::decay_t<decltype(n)>;
                   if constexpr (std::is_same_v<T, Term::Abs>) {
                     return maxChildDepth({n.body});
                   } else if constexpr (std::is_same_v<T, Term::App>) {
                     return maxChildDepth({n.fn, n.arg});
                   } else if constexpr (std::is_same_v<T, Term::Comp>) {
                     return maxChildDepth({n.first, n.second});
                   } else if constexpr (std::is_same_v<T, Term::If>) {
                     return maxChildDepth({n.cond, n.thenBranch, n.elseBranch});
                   } else if constexpr (std::is_same_v<T, Term::Fix>) {
                     return maxChildDepth({n.body});
                   } else if constexpr (std::is_same_v<T, Term::Pair>) {
                     return maxChildDepth({n.left, n.right});
                   } else if constexpr (std::is_same_v<T, Term::Proj>) {
                     return maxChildDepth({n.inner});
                   } else if constexpr (std::is_same_v<T, Term::Case>) {
                     int best = maxChildDepth({n.classifier, n.defaultBranch});
                     for (const auto& [_, b] : n.branches)
                       best = std::max(best, depthOf(b));
                     return best;
                   } else if constexpr (std::is_same_v<T, Term::Guard>) {
                     return maxChildDepth({n.inner});
                   } else if constexpr (std::is_same_v<T, Term::Mem>) {
                     return maxChildDepth({n.inner});
                   } else if constexpr (std::is_same_v<T, Term::Prob>) {
                     return maxChildDepth({n.left, n.right});
                   } else {
                     return 0;
                   }
                 },
                 t->node);
}

}  // namespace

TEST_CASE("pretty printing follows the documented notation") {
  TermPtr body = term::abs(
      "s", ty::arrow(ty::str(), ty::str()),
      term::abs("x", ty::str(), term::app(term::var("s"), term::var("x"))));
  CHECK(prettyPrintLambda(term::fix(20, body)).rfind("fix_20 (λs", 0) == 0);
  CHECK(prettyPrintLambda(term::str("")) == "\"\"");
  CHECK(prettyPrintLambda(term::str("a \"b\"")) == "\"a \\\"b\\\"\"");
  CHECK(prettyPrintLambda(term::tool("sum")) == "tool[sum]");
  CHECK(prettyPrintLambda(term::proj(2, term::var("p"))) == "π2 p");
  CHECK(prettyPrintLambda(term::prob(term::var("a"), term::var("b"), 0.25)) ==
        "a ⊕0.25 b");
  CHECK(prettyPrintLambda(term::pair(term::var("a"), term::var("b"))) ==
        "⟨a, b⟩");
}

TEST_CASE("nested dispatch matches the reviewed golden") {
  TermPtr nested = term::caseOf(
      term::tool("route"),
      {{"billing", term::tool("billing")},
       {"tech", term::comp(term::tool("triage"), term::tool("tech"))},
       {"sales", term::caseOf(term::lamOracle("pick", ModelParams{"m", 0.0}),
                              {{"eu", term::tool("eu")}, {"us", term::tool("us")}},
                              term::identity())}},
      term::guard(term::identity(), pred::nonEmpty()));
  CHECK(prettyPrintLambda(nested) == golden("nested_case.lambda.txt"));
}

TEST_CASE("compiled example configs match their frozen exports") {
  CanonicalConfig l1 = loadCanonicalConfig(kFixtures + "/configs/seecoder_react.yaml");
  CHECK(prettyPrintLambda(compiledTerm(compile(l1))) == golden("seecoder_react.lambda.txt"));
  CanonicalConfig l2 = loadCanonicalConfig(kFixtures + "/configs/crewai_analyst.yaml");
  CHECK(prettyPrintLambda(compiledTerm(compile(l2))) == golden("crewai_analyst.lambda.txt"));
}

TEST_CASE("the term reader inverts the printer on handwritten terms") {
  std::vector<TermPtr> corpus = {
      term::str(""),
      term::str("two words"),
      term::var("x"),
      term::identity(),
      term::abs("f", ty::arrow(ty::str(), ty::str()),
                term::app(term::var("f"), term::str("a"))),
      term::comp(term::tool("upper"), term::tool("reverse")),
      term::ifThenElse(term::tool("check"), term::tool("upper"), term::identity()),
      term::fix(3, term::abs("s", ty::arrow(ty::str(), ty::str()),
                             term::abs("x", ty::str(),
                                       term::app(term::var("s"), term::var("x"))))),
      term::pair(term::str("l"), term::pair(term::str("m"), term::str("r"))),
      term::proj(1, term::pair(term::str("a"), term::str("b"))),
      term::caseOf(term::tool("cls"), {{"a", term::tool("x")}},
                   term::identity()),
      term::guard(term::identity(), pred::conj(pred::nonEmpty(), pred::maxWords(3))),
      term::guard(term::identity(), pred::matchesRegex("[a-z]+\\d")),
      term::guard(term::identity(), pred::neg(pred::validJson())),
      term::mem(term::tool("terminate"), StoreDecl{8, 600}),
      term::prob(term::tool("upper"), term::tool("lower"), 0.75),
      term::lamOracle("summarize:\nbe brief", ModelParams{"qwen3-max", 0.7}),
      term::abs("p", ty::product(ty::str(), ty::arrow(ty::str(), ty::str())),
                term::proj(2, term::var("p"))),
      term::abs("v", ty::variant({{"a", ty::str()}, {"b", ty::str()}}),
                term::var("v")),
      term::abs("r", ty::refinement(ty::str(), pred::minWords(1)), term::var("r")),
  };
  for (const auto& t : corpus) {
    std::string printed = prettyPrintLambda(t);
    CAPTURE(printed);
    TermPtr back = readTerm(printed);
    CHECK(termEqual(back, t));
  }
}

TEST_CASE("the term reader inverts the printer on generated programs") {
  TermGen gen(71);
  for (int i = 0; i < 300; ++i) {
    TermPtr t = gen.closedProgram(3).first;
    std::string printed = prettyPrintLambda(t);
    CAPTURE(printed);
    TermPtr back = readTerm(printed);
    REQUIRE(termEqual(back, t));
  }
}

TEST_CASE("printing is injective on alpha-normalized closed terms") {
  TermGen gen(73);
  std::map<std::string, TermPtr> seen;
  std::size_t kept = 0;
  for (int i = 0; i < 2000; ++i) {
    TermPtr t = alphaNormalize(gen.closedProgram(3).first);
    if (depthOf(t) > 6) continue;
    ++kept;
    std::string printed = prettyPrintLambda(t);
    auto [it, inserted] = seen.emplace(printed, t);
    if (!inserted) {
      CAPTURE(printed);
      REQUIRE(termEqual(it->second, t));
    }
  }
  CHECK(kept > 500);  // the scan actually exercised a corpus
}
