#include <gtest/gtest.h>

#include "support.hpp"

using namespace coup;
using namespace coup::testing;

namespace {

class Kernel : public ::testing::Test {
 protected:
  Program g5 = load("gamma5");
  syntax::Certificate golden = syntax::parse_certificate(syntax::read_file(theory_path("from_proof.cert")), g5);

  Sequent seq(const Program& p, const std::string& text) { return syntax::parse_sequent(text, p); }
};

TEST_F(Kernel, GoldenCertificateIsAccepted) {
  CheckReport r = syntax::check_certificate(g5, golden);
  ASSERT_TRUE(r.accepted) << r.first_error->detail;
  EXPECT_EQ(r.nodes, 10u);
  std::vector<Rule> want{Rule::CoFix,   Rule::ForallR_g, Rule::Decide_g, Rule::ForallL_g, Rule::ForallL_g,
                         Rule::ImpL_g,  Rule::Initial,   Rule::Decide,   Rule::ForallL,   Rule::Initial};
  EXPECT_EQ(rule_sequence(golden.main), want);
  EXPECT_GT(r.fixbeta_budget_used, 0u);
}

TEST_F(Kernel, DecideOnGuardedHypothesisIsRejected) {
  ProofNode t = golden.main;
  ProofNode& decide = t.premises[0].premises[0];
  decide.data.clause = ClauseRef{ClauseRef::Source::Hyp, 0};
  decide.premises[0].conclusion.focus = decide.conclusion.hyps[0].formula;
  CheckReport r = check_proof(g5.logic, g5, t);
  ASSERT_FALSE(r.accepted);
  EXPECT_EQ(r.first_error->code, CheckError::GuardViolation);
  EXPECT_EQ(r.first_error->path, (std::vector<std::size_t>{0, 0}));
}

TEST_F(Kernel, ApplyCofixOnStreamInvariant) {
  Formula ch = formula(g5, "forall x:i. from x (fr_str x)");
  Sequent s = apply_cofix(g5.logic, g5.sig, Sequent::root(ch));
  EXPECT_EQ(s.kind, SequentKind::Main);
  ASSERT_EQ(s.hyps.size(), 1u);
  EXPECT_EQ(s.hyps[0], (MarkedFormula{ch, true}));
  EXPECT_EQ(s.goal, (MarkedFormula{ch, true}));
}

TEST_F(Kernel, ApplyCofixRejectsExistentials) {
  Program g3 = load("gamma3");
  try {
    apply_cofix(Logic{Fragment::CoFohc, true}, g3.sig, Sequent::root(formula(g3, "exists x:i. p x")));
    FAIL();
  } catch (const KernelError& e) {
    EXPECT_EQ(e.code(), CheckError::NonCoreCoinductiveGoal);
  }
}

TEST_F(Kernel, ApplyCofixOnAtom) {
  Program g1 = load("gamma1");
  Formula pa = formula(g1, "p a");
  Sequent s = apply_cofix(g1.logic, g1.sig, Sequent::root(pa));
  EXPECT_EQ(s, Sequent::main({}, {{pa, true}}, {pa, true}));
}

TEST_F(Kernel, TopIsNotACoinductiveGoal) {
  Program g1 = load("gamma1");
  ProofNode top{Rule::TopR, Sequent::main({}, {{Formula::top(), true}}, {Formula::top(), true}), {}, {}};
  ProofNode root{Rule::CoFix, Sequent::root(Formula::top()), {top}, {}};
  CheckReport r = check_proof(g1.logic, g1, root);
  ASSERT_FALSE(r.accepted);
  EXPECT_EQ(r.first_error->code, CheckError::NonCoreCoinductiveGoal);
}

TEST_F(Kernel, EraseMarks) {
  Formula ch = formula(g5, "forall x:i. from x (fr_str x)");
  Formula c = g5.clauses[0];
  EXPECT_EQ(erase_marks({{ch, true}, {c, false}}), (std::vector<MarkedFormula>{{ch, false}, {c, false}}));
  EXPECT_TRUE(erase_marks({}).empty());
  std::vector<MarkedFormula> plain{{ch, false}};
  EXPECT_EQ(erase_marks(plain), plain);
}

TEST_F(Kernel, InitialUpToFixbeta) {
  Sequent c = seq(g5, "Z:i, S; P, forall x:i. from x (fr_str x) -[ from Z (scons Z (fr_str (s Z))) ]-> from Z (fr_str Z)");
  EXPECT_TRUE(check_rule_instance(g5.logic, g5, Rule::Initial, c, {}, {}).ok());
  Sequent wrong = seq(g5, "Z:i, S; P -[ from Z (scons (s Z) (fr_str (s Z))) ]-> from Z (fr_str Z)");
  EXPECT_EQ(check_rule_instance(g5.logic, g5, Rule::Initial, wrong, {}, {}).error, CheckError::BadRuleInstance);
}

TEST_F(Kernel, InitialReportsBudgetExhaustion) {
  Sequent c = seq(g5, "Z:i, S; P -[ from Z (scons Z (fr_str (s Z))) ]-> from Z (fr_str Z)");
  RuleVerdict v = check_rule_instance(g5.logic, g5, Rule::Initial, c, {}, {}, CheckOptions{0});
  EXPECT_EQ(v.error, CheckError::FixBetaBudgetExhausted);
}

TEST_F(Kernel, ForallRNeedsFreshEigenvariable) {
  Program g2 = load("gamma2");
  g2.logic = Logic{Fragment::CoFohh, false};
  Sequent c = Sequent::main({}, {}, {formula(g2, "forall x:i. p x"), false});
  Sequent prem = Sequent::main({{"a", I()}}, {}, {formula(g2, "p a"), false});
  Payload d;
  d.eigen = Eigenvariable{"a", I()};
  EXPECT_EQ(check_rule_instance(g2.logic, g2, Rule::ForallR, c, {prem}, d).error, CheckError::EigenvariableCapture);
  d.eigen = Eigenvariable{"X", I()};
  prem = Sequent::main({{"X", I()}}, {}, {Formula(Term::app(Term::constant("p"), Term::constant("X"))), false});
  EXPECT_TRUE(check_rule_instance(g2.logic, g2, Rule::ForallR, c, {prem}, d).ok());
}

TEST_F(Kernel, FirstOrderWitnessesExcludeLambdas) {
  Program g1 = load("gamma1");
  Term w = Term::app(Term::lam("y", I(), Term::bvar(0)), Term::constant("a"));
  Sequent c = Sequent::main({}, {}, {formula(g1, "exists x:i. p x"), false});
  Sequent prem = Sequent::main({}, {}, {Formula(Term::app(Term::constant("p"), w)), false});
  Payload d;
  d.witness = w;
  EXPECT_EQ(check_rule_instance(g1.logic, g1, Rule::ExistsR, c, {prem}, d).error, CheckError::WitnessUniverseViolation);
  d.witness = Term::fvar("y");
  EXPECT_EQ(check_rule_instance(g1.logic, g1, Rule::ExistsR, c, {prem}, d).error, CheckError::WitnessNotClosed);
}

TEST_F(Kernel, ArityAndPayloadShape) {
  Sequent c = Sequent::main({}, {}, {Formula::top(), false});
  Payload d;
  d.witness = Term::constant("0");
  EXPECT_EQ(check_rule_instance(g5.logic, g5, Rule::TopR, c, {}, d).error, CheckError::BadRuleInstance);
  EXPECT_EQ(check_rule_instance(g5.logic, g5, Rule::TopR, c, {c}, {}).error, CheckError::BadRuleInstance);
  EXPECT_TRUE(check_rule_instance(g5.logic, g5, Rule::TopR, c, {}, {}).ok());
}

TEST_F(Kernel, CofixBelowRootIsRejected) {
  ProofNode t = golden.main;
  ProofNode* leaf = &t;
  while (!leaf->premises.empty()) leaf = &leaf->premises[0];
  leaf->rule = Rule::CoFix;
  CheckReport r = check_proof(g5.logic, g5, t);
  ASSERT_FALSE(r.accepted);
  EXPECT_EQ(r.first_error->code, CheckError::CoFixNotAtRoot);
  EXPECT_EQ(r.first_error->path.size(), 6u);
}

TEST_F(Kernel, RegisterLemmaAndUseIt) {
  Program g2 = load("gamma2");
  Logic hh{Fragment::CoFohh, false};
  g2.logic = hh;
  Formula all = formula(g2, "forall x:i. p x");
  auto inv = uniform_search(hh, g2, Sequent::root(all));
  ASSERT_TRUE(inv);
  Program with = register_lemma(g2, all, *inv);
  ASSERT_EQ(with.lemmas.size(), 1u);
  Sequent goal = Sequent::main({}, {}, {formula(g2, "p a"), false});
  auto cor = uniform_search(hh, with, goal);
  ASSERT_TRUE(cor);
  EXPECT_TRUE(check_proof(hh, with, *cor).accepted);
  EXPECT_EQ(cor->data.clause, (ClauseRef{ClauseRef::Source::Lemma, 0}));
}

TEST_F(Kernel, RegisterConditionalLemma) {
  Program g4 = load("gamma4");
  Logic hh{Fragment::CoFohh, false};
  g4.logic = hh;
  Formula ci = formula(g4, "forall x:i. q x => p x");
  auto inv = uniform_search(hh, g4, Sequent::root(ci));
  ASSERT_TRUE(inv);
  Program with = register_lemma(g4, ci, *inv);
  EXPECT_TRUE(uniform_search(hh, with, Sequent::main({}, {}, {formula(g4, "p a"), false})));
}

TEST_F(Kernel, RegisterRejectsBadCertificates) {
  Program g2 = load("gamma2");
  g2.logic = Logic{Fragment::CoFohh, false};
  Formula all = formula(g2, "forall x:i. p x");
  ProofNode bogus{Rule::CoFix, Sequent::root(all), {}, {}};
  EXPECT_THROW(register_lemma(g2, all, bogus), RejectedCertificate);
  EXPECT_THROW(register_lemma(g5, all, golden.main), RejectedCertificate);
}

TEST_F(Kernel, CheckingIsDeterministic) {
  ProofNode t = golden.main;
  t.premises[0].premises[0].premises[0].data.witness = Term::constant("0");
  CheckReport a = check_proof(g5.logic, g5, t), b = check_proof(g5.logic, g5, t);
  EXPECT_EQ(a.accepted, b.accepted);
  ASSERT_TRUE(a.first_error && b.first_error);
  EXPECT_EQ(a.first_error->code, b.first_error->code);
  EXPECT_EQ(a.first_error->path, b.first_error->path);
  EXPECT_EQ(a.nodes, b.nodes);
}

}  // namespace
