#include <gtest/gtest.h>

#include "support.hpp"

using namespace coup;
using namespace coup::testing;

namespace {

const std::string kStreamDecls =
    "kind i type.\nkind stream type.\nconst 0 : i.\nconst s : i -> i.\n"
    "const scons : i -> stream -> stream.\nconst from : i -> stream -> o.\nfragment co-fohc.\n";

syntax::SyntaxErrorCode code_of(const std::string& text, bool autoclose = false) {
  try {
    syntax::parse_theory(text, {autoclose});
  } catch (const syntax::SyntaxError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return syntax::SyntaxErrorCode::ParseError;
}

TEST(Theory, AutocloseCapitalizedVariables) {
  syntax::TheoryDocument d =
      syntax::parse_theory(kStreamDecls + "from (s X) Y => from X (scons X Y).", {true});
  ASSERT_EQ(d.clauses.size(), 1u);
  EXPECT_EQ(d.clauses[0], load("gamma5").clauses[0]);
}

TEST(Theory, DeclarationsOnly) {
  syntax::TheoryDocument d = syntax::parse_theory(kStreamDecls);
  EXPECT_TRUE(d.clauses.empty());
  EXPECT_EQ(d.kinds, (std::vector<std::string>{"i", "stream"}));
  EXPECT_EQ(d.constants.size(), 4u);
}

TEST(Theory, FreeVariablesAreRejectedByDefault) {
  EXPECT_EQ(code_of(kStreamDecls + "from (s X) Y => from X (scons X Y)."), syntax::SyntaxErrorCode::FragmentViolation);
}

TEST(Theory, ClausesMustFitTheFragment) {
  EXPECT_EQ(code_of("kind i type.\nconst a : i.\nconst p : i -> o.\nfragment co-fohc.\np a ; p a."),
            syntax::SyntaxErrorCode::FragmentViolation);
}

TEST(Theory, TypeAndParseErrors) {
  EXPECT_EQ(code_of(kStreamDecls + "from 0 0."), syntax::SyntaxErrorCode::TypeError);
  EXPECT_EQ(code_of(kStreamDecls + "from 0 (scons 0."), syntax::SyntaxErrorCode::ParseError);
}

TEST(Theory, ErrorsCarryPositions) {
  try {
    syntax::parse_theory(kStreamDecls + "from (s x) y => from x (scons x y).");
    FAIL();
  } catch (const syntax::SyntaxError& e) {
    EXPECT_EQ(e.line(), 8);
    EXPECT_EQ(e.column(), 9);
  }
}

TEST(Theory, FixturesRoundTrip) {
  for (const char* name : {"gamma1", "gamma2", "gamma3", "gamma4", "gamma5"}) {
    syntax::TheoryDocument d = load_doc(name);
    std::string printed = syntax::print_theory(d);
    EXPECT_EQ(syntax::parse_theory(printed), d) << name;
    EXPECT_EQ(syntax::print_theory(syntax::parse_theory(printed)), printed) << name;
  }
}

TEST(Theory, DefinitionsArePrintedByName) {
  Program p = load("gamma5");
  EXPECT_EQ(show(p, formula(p, "forall x:i. from x (fr_str x)")), "forall x:i. from x (fr_str x)");
  EXPECT_EQ(show(p, term(p, "fix \\g:i -> stream. \\n:i. scons n (g (s n))")), "fr_str");
}

TEST(Goal, ParseClosedGoal) {
  Program p = load("gamma4");
  Formula g = syntax::parse_goal("forall x:i. q x => p x", p.sig);
  EXPECT_EQ(g, formula(p, "forall x:i. q x => p x"));
  EXPECT_THROW(syntax::parse_goal("p y", p.sig), syntax::SyntaxError);
  EXPECT_EQ(syntax::parse_goal("p a, q a", p.sig), syntax::parse_goal("p a & q a", p.sig));
}

class Certificates : public ::testing::Test {
 protected:
  Program g5 = load("gamma5");
  std::string golden_text = syntax::read_file(theory_path("from_proof.cert"));
};

TEST_F(Certificates, GoldenTree) {
  syntax::Certificate c = syntax::parse_certificate(golden_text, g5);
  EXPECT_TRUE(c.lemmas.empty());
  EXPECT_EQ(c.main.rule, Rule::CoFix);
  EXPECT_EQ(c.main.size(), 10u);
}

TEST_F(Certificates, GoldenRoundTrip) {
  syntax::Certificate c = syntax::parse_certificate(golden_text, g5);
  EXPECT_EQ(syntax::print_certificate(c, g5), golden_text);
  EXPECT_EQ(syntax::parse_certificate(syntax::print_certificate(c, g5), g5), c);
}

TEST_F(Certificates, SingleTopNode) {
  syntax::Certificate c = syntax::parse_certificate("(topR {} \"S;P --> true\")", g5);
  EXPECT_EQ(c.main.rule, Rule::TopR);
  EXPECT_EQ(c.main.size(), 1u);
  EXPECT_TRUE(syntax::check_certificate(g5, c).accepted);
}

TEST_F(Certificates, UnknownRuleLabel) {
  try {
    syntax::parse_certificate("(cut {} \"S;P --> true\")", g5);
    FAIL();
  } catch (const syntax::SyntaxError& e) {
    EXPECT_EQ(e.code(), syntax::SyntaxErrorCode::UnknownRuleLabel);
  }
}

TEST_F(Certificates, LemmaCertificatesRoundTrip) {
  Program g2 = load("gamma2");
  Logic hh{Fragment::CoFohh, false};
  auto r = prove(hh, g2, formula(g2, "p a"));
  ASSERT_TRUE(r && r->corollary_proof);
  g2.logic = hh;
  syntax::Certificate c{{r->invariant_proof}, *r->corollary_proof};
  std::string text = syntax::print_certificate(c, g2);
  syntax::Certificate back = syntax::parse_certificate(text, g2);
  EXPECT_EQ(back, c);
  EXPECT_TRUE(syntax::check_certificate(g2, back).accepted);
}

TEST_F(Certificates, SequentRoundTrip) {
  std::string text = "Z:i, S; P, <forall x:i. from x (fr_str x)> --> <from Z (fr_str Z)>";
  Sequent s = syntax::parse_sequent(text, g5);
  EXPECT_EQ(s.eigen.size(), 1u);
  EXPECT_TRUE(s.goal.guarded);
  EXPECT_EQ(syntax::parse_sequent(syntax::print_sequent(s, g5), g5), s);
}

}  // namespace
