#include <doctest.h>

#include "lambdagent/pretty.hpp"
#include "lambdagent/store.hpp"
#include "lambdagent/subst.hpp"
#include "lambdagent/typecheck.hpp"

using namespace lambdagent;

TEST_CASE("substitute replaces free occurrences") {
  TermPtr hit = substitute(term::var("x"), "x", term::str("a"));
  CHECK(termEqual(hit, term::str("a")));

  TermPtr shadowed = term::abs("x", ty::str(), term::var("x"));
  CHECK(termEqual(substitute(shadowed, "x", term::str("a")), shadowed));

  TermPtr applied = substitute(term::app(term::var("f"), term::var("x")), "f",
                               term::tool("sum"));
  CHECK(termEqual(applied, term::app(term::tool("sum"), term::var("x"))));
}

TEST_CASE("substitute avoids capture by renaming the binder") {
  // (λy:Str. f y)[f := λz:Str. y] must not capture the free y.
  TermPtr body = term::abs("y", ty::str(), term::app(term::var("f"), term::var("y")));
  TermPtr replacement = term::abs("z", ty::str(), term::var("y"));
  TermPtr out = substitute(body, "f", replacement);
  auto free = freeVars(out);
  CHECK(free.count("y") == 1);  // the replacement's y stays free
  const auto* abs = termAs<Term::Abs>(out);
  REQUIRE(abs != nullptr);
  CHECK(abs->param != "y");
}

TEST_CASE("free variables and closedness") {
  TermPtr open = term::app(term::var("f"), term::str("a"));
  CHECK(freeVars(open) == std::set<std::string>{"f"});
  CHECK(isClosed(term::abs("x", ty::str(), term::var("x"))));
  CHECK(isClosed(term::tool("sum")));
}

TEST_CASE("alpha normalization identifies renamed binders") {
  TermPtr a = term::abs("x", ty::str(), term::var("x"));
  TermPtr b = term::abs("y", ty::str(), term::var("y"));
  CHECK(alphaEqual(a, b));
  TermPtr c = term::abs("x", ty::arrow(ty::str(), ty::str()), term::var("x"));
  CHECK_FALSE(alphaEqual(a, c));  // annotations distinguish terms
}

TEST_CASE("desugarComp builds λx. second (first x)") {
  TermPtr sugar = term::comp(term::tool("a"), term::tool("b"));
  TermPtr desugared = desugarComp(sugar);
  const auto* abs = termAs<Term::Abs>(desugared);
  REQUIRE(abs != nullptr);
  const auto* outer = termAs<Term::App>(abs->body);
  REQUIRE(outer != nullptr);
  CHECK(termEqual(outer->fn, term::tool("b")));
  const auto* inner = termAs<Term::App>(outer->arg);
  REQUIRE(inner != nullptr);
  CHECK(termEqual(inner->fn, term::tool("a")));
  CHECK(termEqual(inner->arg, term::var(abs->param)));

  CHECK_THROWS_AS(desugarComp(term::tool("a")), std::invalid_argument);
}

TEST_CASE("predicate evaluation is total and matches the combinators") {
  CHECK(evalPredicate(pred::nonEmpty(), "x"));
  CHECK_FALSE(evalPredicate(pred::nonEmpty(), ""));
  CHECK(evalPredicate(pred::maxWords(3), "one two three"));
  CHECK_FALSE(evalPredicate(pred::maxWords(3), "one two three four"));
  CHECK(evalPredicate(pred::minWords(2), "a b"));
  CHECK(evalPredicate(pred::matchesRegex("[0-9]+"), "1234"));
  CHECK_FALSE(evalPredicate(pred::matchesRegex("[0-9]+"), "12a"));
  CHECK_FALSE(evalPredicate(pred::matchesRegex("(unclosed"), "anything"));
  CHECK(evalPredicate(pred::validJson(), "{\"k\": 1}"));
  CHECK_FALSE(evalPredicate(pred::validJson(), "{k: 1}"));
  CHECK(evalPredicate(pred::conj(pred::nonEmpty(), pred::maxWords(1)), "word"));
  CHECK(evalPredicate(pred::neg(pred::nonEmpty()), ""));
}

TEST_CASE("term constructors validate invariants") {
  CHECK_THROWS_AS(term::prob(term::str("a"), term::str("b"), 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(term::proj(3, term::str("a")), std::invalid_argument);
  CHECK_THROWS_AS(term::caseOf(term::tool("c"), {{"a", term::tool("x")},
                                                 {"a", term::tool("y")}}),
                  std::invalid_argument);
}

TEST_CASE("infer: oracle abstractions always type Str -> Str") {
  TypeContext ctx;
  InferResult r = infer(ctx, term::lamOracle("hi", ModelParams{"m", 0.0}));
  REQUIRE(inferOk(r));
  CHECK(typeEqual(inferType(r), ty::arrow(ty::str(), ty::str())));
}

TEST_CASE("infer: identity and tool composition") {
  TypeContext ctx;
  ctx.toolSignatures["a"] = {ty::str(), ty::str()};
  ctx.toolSignatures["b"] = {ty::str(), ty::str()};

  InferResult id = infer(ctx, term::identity());
  REQUIRE(inferOk(id));
  CHECK(typeEqual(inferType(id), ty::arrow(ty::str(), ty::str())));

  // T-Comp: a : Str->Str, b : Str->Str so a >> b : Str->Str.
  InferResult comp = infer(ctx, term::comp(term::tool("a"), term::tool("b")));
  REQUIRE(inferOk(comp));
  CHECK(typeEqual(inferType(comp), ty::arrow(ty::str(), ty::str())));
}

TEST_CASE("infer: error kinds map to the violated premise") {
  TypeContext ctx;
  InferResult unbound = infer(ctx, term::var("nope"));
  REQUIRE_FALSE(inferOk(unbound));
  CHECK(inferError(unbound).kind == TypeErrorKind::UnboundVar);

  InferResult unknown = infer(ctx, term::tool("no-such-tool"));
  REQUIRE_FALSE(inferOk(unknown));
  CHECK(inferError(unknown).kind == TypeErrorKind::UnknownTool);

  InferResult badFix = infer(ctx, term::fix(3, term::identity()));
  REQUIRE_FALSE(inferOk(badFix));
  CHECK(inferError(badFix).kind == TypeErrorKind::BadFixShape);

  InferResult mismatch =
      infer(ctx, term::app(term::str("notafn"), term::str("x")));
  REQUIRE_FALSE(inferOk(mismatch));
  CHECK(inferError(mismatch).kind == TypeErrorKind::Mismatch);
}

TEST_CASE("infer: fix with the right shape types t -> t") {
  TypeContext ctx;
  TermPtr body = term::abs(
      "s", ty::arrow(ty::str(), ty::str()),
      term::abs("x", ty::str(), term::app(term::var("s"), term::var("x"))));
  InferResult r = infer(ctx, term::fix(4, body));
  REQUIRE(inferOk(r));
  CHECK(typeEqual(inferType(r), ty::arrow(ty::str(), ty::str())));
}

TEST_CASE("infer: pair of functions applies component-wise") {
  TypeContext ctx;
  ctx.toolSignatures["a"] = {ty::str(), ty::str()};
  ctx.toolSignatures["b"] = {ty::str(), ty::str()};
  TermPtr fan = term::pair(term::tool("a"), term::tool("b"));
  InferResult r = infer(ctx, term::app(fan, term::str("x")));
  REQUIRE(inferOk(r));
  CHECK(typeEqual(inferType(r), ty::product(ty::str(), ty::str())));
}

TEST_CASE("infer: guard refines the codomain") {
  TypeContext ctx;
  InferResult r = infer(ctx, term::guard(term::identity(), pred::maxWords(3)));
  REQUIRE(inferOk(r));
  const auto* arrow = std::get_if<Type::Arrow>(&inferType(r)->node);
  REQUIRE(arrow != nullptr);
  CHECK(std::holds_alternative<Type::Refinement>(arrow->cod->node));
  // Refinement-typed results stay compatible with their base.
  CHECK(typeCompatible(arrow->cod, ty::str()));
}

TEST_CASE("caseExhaustive follows the variant coverage rule") {
  TypePtr variantAB = ty::variant({{"a", ty::str()}, {"b", ty::str()}});
  TypePtr clsAB = ty::arrow(ty::str(), variantAB);
  CHECK(caseExhaustive(clsAB, {"a", "b"}, false) == true);
  CHECK(caseExhaustive(clsAB, {"a"}, false) == false);

  TypePtr variantABC =
      ty::variant({{"a", ty::str()}, {"b", ty::str()}, {"c", ty::str()}});
  CHECK(caseExhaustive(ty::arrow(ty::str(), variantABC), {"a"}, true) == true);

  CHECK_FALSE(caseExhaustive(ty::str(), {"a"}, false).has_value());
}

TEST_CASE("infer: case over a declared variant classifier") {
  TypeContext ctx;
  ctx.toolSignatures["route"] = {
      ty::str(), ty::variant({{"a", ty::str()}, {"b", ty::str()}})};
  ctx.toolSignatures["a"] = {ty::str(), ty::str()};
  ctx.toolSignatures["b"] = {ty::str(), ty::str()};

  TermPtr covered = term::caseOf(term::tool("route"), {{"a", term::tool("a")},
                                                       {"b", term::tool("b")}});
  REQUIRE(inferOk(infer(ctx, covered)));

  TermPtr uncovered = term::caseOf(term::tool("route"), {{"a", term::tool("a")}});
  InferResult r = infer(ctx, uncovered);
  REQUIRE_FALSE(inferOk(r));
  CHECK(inferError(r).kind == TypeErrorKind::NonExhaustiveCase);

  TermPtr defaulted = term::caseOf(term::tool("route"), {{"a", term::tool("a")}},
                                   term::tool("b"));
  CHECK(inferOk(infer(ctx, defaulted)));
}

TEST_CASE("store: typed writes, ttl visibility and eviction") {
  Store store(StoreDecl{2, 10});
  CHECK(store.write("k1", val::str("a"), 0));
  CHECK(store.write("k2", val::str("b"), 1));

  SUBCASE("writes that change a key's type are rejected before mutation") {
    CHECK_FALSE(store.write("k1", val::pair(val::str("x"), val::str("y")), 2));
    auto kept = store.read("k1", 2);
    REQUIRE(kept.has_value());
    CHECK(valueEqual(*kept, val::str("a")));
  }

  SUBCASE("ttl hides stale entries from reads") {
    CHECK(store.read("k1", 9).has_value());
    CHECK_FALSE(store.read("k1", 11).has_value());
    CHECK(store.read("k2", 11).has_value());  // inserted later, still fresh
  }

  SUBCASE("capacity overflow evicts the oldest insertion") {
    CHECK(store.write("k3", val::str("c"), 2));
    CHECK(store.size() == 2);
    CHECK_FALSE(store.read("k1", 2).has_value());
    CHECK(store.read("k2", 2).has_value());
    CHECK(store.read("k3", 2).has_value());
  }
}

TEST_CASE("store typing is append-only") {
  StoreTyping sigma;
  CHECK(sigma.assign("k", ty::str()));
  CHECK(sigma.assign("k", ty::str()));
  CHECK_FALSE(sigma.assign("k", ty::product(ty::str(), ty::str())));

  StoreTyping bigger = sigma;
  bigger.assign("k2", ty::str());
  CHECK(bigger.extends(sigma));
  CHECK_FALSE(sigma.extends(bigger));
}

TEST_CASE("checkStoreCompat reports the first offending key") {
  Store store;
  StoreTyping sigma;
  CHECK_FALSE(checkStoreCompat(store, sigma).has_value());

  store.write("k", val::str("a"), 0);
  sigma.assign("k", ty::str());
  CHECK_FALSE(checkStoreCompat(store, sigma).has_value());

  Store bad;
  bad.write("k", val::pair(val::str("a"), val::str("b")), 0);
  auto conflict = checkStoreCompat(bad, sigma);
  REQUIRE(conflict.has_value());
  CHECK(conflict->kind == TypeErrorKind::StoreTypeConflict);
  CHECK(conflict->location == "k");
}
