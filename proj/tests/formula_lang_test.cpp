#include <gtest/gtest.h>

#include "support.hpp"

using namespace coup;
using namespace coup::testing;

namespace {

Logic L(Fragment f, bool fix = false) { return Logic{f, fix}; }

class FormulaLang : public ::testing::Test {
 protected:
  Program rs{random_signature()};
  Program g5 = load("gamma5");
};

TEST_F(FormulaLang, RigidFirstOrderAtom) {
  AtomClass c = classify_atom(rs.sig, formula(rs, "p a"));
  EXPECT_TRUE(c.rigid);
  EXPECT_TRUE(c.first_order);
  EXPECT_EQ(c.universe, Universe::U1);
}

TEST_F(FormulaLang, VariableHeadIsFlexible) {
  AtomClass c = classify_atom(rs.sig, formula(rs, "x a"));
  EXPECT_FALSE(c.rigid);
  EXPECT_FALSE(c.first_order);
}

TEST_F(FormulaLang, StreamAtomWithFixpointIsNotFirstOrder) {
  AtomClass c = classify_atom(g5.sig, formula(g5, "from 0 (fr_str 0)"));
  EXPECT_TRUE(c.rigid);
  EXPECT_FALSE(c.first_order);
  EXPECT_EQ(c.universe, Universe::U1);
}

TEST_F(FormulaLang, ClassifyRejectsCompoundFormulas) {
  EXPECT_THROW(classify_atom(rs.sig, formula(rs, "p a & q a")), NotAnAtom);
}

TEST_F(FormulaLang, ProgramClauses) {
  Program g2 = load("gamma2");
  for (Fragment f : kAllFragments) {
    EXPECT_TRUE(is_program_clause(L(f), g2.sig, formula(g2, "forall x:i. p (f x) => p x")));
    EXPECT_FALSE(is_program_clause(L(f), rs.sig, formula(rs, "p a ; p b")));
  }
  EXPECT_TRUE(is_program_clause(L(Fragment::CoFohc), g5.sig,
                                formula(g5, "forall x:i. forall y:stream. from (s x) y => from x (scons x y)")));
}

TEST_F(FormulaLang, EveryFixtureClauseIsHorn) {
  for (const char* name : {"gamma1", "gamma2", "gamma3", "gamma4", "gamma5"}) {
    Program p = load(name);
    for (const auto& c : p.clauses) EXPECT_TRUE(is_program_clause(L(Fragment::CoFohc), p.sig, c)) << name;
  }
}

TEST_F(FormulaLang, Goals) {
  Formula all = formula(rs, "forall x:i. p x");
  EXPECT_FALSE(is_goal(L(Fragment::CoFohc), rs.sig, all));
  EXPECT_TRUE(is_goal(L(Fragment::CoFohh), rs.sig, all));
  for (Fragment f : kAllFragments) EXPECT_TRUE(is_goal(L(f), rs.sig, Formula::top()));
  Formula cond = formula(rs, "forall x:i. q x => p x");
  EXPECT_TRUE(is_goal(L(Fragment::CoFohh), rs.sig, cond));
  EXPECT_FALSE(is_goal(L(Fragment::CoHohc), rs.sig, cond));
}

TEST_F(FormulaLang, CoreFormulas) {
  EXPECT_TRUE(is_core(L(Fragment::CoFohc), rs.sig, formula(rs, "p a")));
  EXPECT_TRUE(is_core(L(Fragment::CoFohh), rs.sig, formula(rs, "forall x:i. q x => p x")));
  for (Fragment f : kAllFragments) {
    EXPECT_FALSE(is_core(L(f, true), rs.sig, formula(rs, "exists x:i. p x")));
    EXPECT_FALSE(is_core(L(f, true), rs.sig, Formula::top()));
  }
}

TEST_F(FormulaLang, FixpointsNeedTheFlag) {
  Formula inv = formula(g5, "forall x:i. from x (fr_str x)");
  EXPECT_FALSE(is_core(L(Fragment::CoHohh), g5.sig, inv));
  EXPECT_TRUE(is_core(L(Fragment::CoHohh, true), g5.sig, inv));
  EXPECT_EQ(minimal_core_fragment(g5.sig, inv, true), Fragment::CoHohh);
}

TEST_F(FormulaLang, Universes) {
  EXPECT_TRUE(universe_check(term(rs, "f a"), Universe::U1));
  EXPECT_FALSE(universe_check(term(rs, "\\x:i. p x => q x"), Universe::U2));
  Term t = term(rs, "\\x:i. forall y:i. r x y");
  EXPECT_TRUE(universe_check(t, Universe::U2));
  EXPECT_FALSE(universe_check(t, Universe::U1));
}

TEST_F(FormulaLang, LatticeOrder) {
  EXPECT_TRUE(fragment_leq(Fragment::CoFohc, Fragment::CoHohh));
  EXPECT_TRUE(fragment_leq(Fragment::CoFohc, Fragment::CoHohc));
  EXPECT_FALSE(fragment_leq(Fragment::CoFohh, Fragment::CoHohc));
  EXPECT_FALSE(fragment_leq(Fragment::CoHohc, Fragment::CoFohh));
  for (Fragment f : kAllFragments) EXPECT_EQ(parse_fragment(fragment_name(f)), f);
}

}  // namespace
