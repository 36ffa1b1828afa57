#include <gtest/gtest.h>

#include "support.hpp"

using namespace coup;
using namespace coup::testing;

namespace {

const Logic kFohc{Fragment::CoFohc, false};
const Logic kFohh{Fragment::CoFohh, false};
const Logic kFohcFix{Fragment::CoFohc, true};
const Logic kHohhFix{Fragment::CoHohh, true};

std::vector<std::string> selected(const Program& p, const DerivationTrace& tr) {
  std::vector<std::string> out;
  for (const auto& s : tr.steps) out.push_back(show(p, s.selected));
  return out;
}

// Structural facts every accepted certificate should have.
void scan(const ProofNode& n, bool is_root, std::size_t& cofix) {
  if (n.rule == Rule::CoFix) {
    ++cofix;
    EXPECT_TRUE(is_root);
  }
  const Sequent& c = n.conclusion;
  if (c.kind == SequentKind::Main && !c.goal.formula.is(FormulaKind::Atom))
    EXPECT_TRUE(n.rule != Rule::Decide && n.rule != Rule::Decide_g) << rule_label(n.rule);
  if (n.rule == Rule::Decide_g) {
    auto ref = *n.data.clause;
    if (ref.source == ClauseRef::Source::Hyp) EXPECT_FALSE(c.hyps[ref.index].guarded);
  }
  if (n.rule == Rule::ImpL_g)
    for (const auto& p : n.premises)
      for (const auto& h : p.conclusion.hyps) EXPECT_FALSE(h.guarded);
  if (n.premises.empty())
    EXPECT_TRUE(n.rule == Rule::Initial || n.rule == Rule::Initial_g || n.rule == Rule::TopR) << rule_label(n.rule);
  for (const auto& p : n.premises) scan(p, false, cofix);
}

void expect_well_formed(const Logic& lg, const Program& p, const ProofNode& t) {
  EXPECT_TRUE(check_proof(lg, p, t).accepted);
  std::size_t cofix = 0;
  scan(t, true, cofix);
  EXPECT_EQ(cofix, t.conclusion.kind == SequentKind::Root ? 1u : 0u);
}

TEST(Trace, LoopOnGamma1) {
  Program p = load("gamma1");
  DerivationTrace tr = sld_trace(p, formula(p, "p a"), 32);
  EXPECT_EQ(tr.verdict, TraceVerdict::LoopFound);
  EXPECT_EQ(tr.loop_to, 1u);
  EXPECT_EQ(show(p, tr.steps[tr.loop_to].selected), "p a");
}

TEST(Trace, NoCycleOnGamma2) {
  Program p = load("gamma2");
  DerivationTrace tr = sld_trace(p, formula(p, "p a"), 32);
  EXPECT_EQ(tr.verdict, TraceVerdict::BudgetExhausted);
  auto sel = selected(p, tr);
  ASSERT_GE(sel.size(), 3u);
  EXPECT_EQ(sel[0], "p a");
  EXPECT_EQ(sel[1], "p (f a)");
  EXPECT_EQ(sel[2], "p (f (f a))");
}

TEST(Trace, InterleavedSideGoalsOnGamma4) {
  Program p = load("gamma4");
  DerivationTrace tr = sld_trace(p, formula(p, "p a"), 32);
  EXPECT_EQ(tr.verdict, TraceVerdict::BudgetExhausted);
  ASSERT_GE(tr.steps.size(), 2u);
  std::vector<std::string> goals;
  for (const auto& g : tr.steps[1].goals) goals.push_back(show(p, g));
  EXPECT_EQ(goals, (std::vector<std::string>{"p (f a)", "q a"}));
}

TEST(Trace, FlexibleGoalHead) {
  Program p = load("gamma1");
  EXPECT_THROW(sld_trace(p, Formula(Term::app(Term::fvar("P"), Term::constant("a"))), 8), FlexibleGoalHead);
}

TEST(Trace, StepsAreSoundResolutions) {
  std::vector<std::pair<const char*, const char*>> cases{{"gamma1", "p a"},
                                                         {"gamma2", "p a"},
                                                         {"gamma3", "exists x:i. p x"},
                                                         {"gamma4", "p a"},
                                                         {"gamma5", "from 0 (fr_str 0)"},
                                                         {"gamma5", "exists y:stream. from 0 y"}};
  for (const auto& [name, goal] : cases) {
    Program p = load(name);
    DerivationTrace tr = sld_trace(p, formula(p, goal), 32);
    for (const auto& s : tr.steps) {
      if (!s.clause) continue;
      EXPECT_TRUE(fixbeta_equal(apply_subst(s.subst, s.head), apply_subst(s.subst, s.selected)).equal())
          << name << ": " << show(p, s.selected);
    }
  }
}

TEST(Candidates, LoopDetection) {
  Program g1 = load("gamma1");
  auto c = detect_loop(sld_trace(g1, formula(g1, "p a"), 32), g1);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->formula, formula(g1, "p a"));
  EXPECT_EQ(c->fragment, Fragment::CoFohc);
  EXPECT_EQ(c->provenance, Provenance::Loop);

  Program g2 = load("gamma2");
  EXPECT_FALSE(detect_loop(sld_trace(g2, formula(g2, "p a"), 32), g2));
  Program g5 = load("gamma5");
  EXPECT_FALSE(detect_loop(sld_trace(g5, formula(g5, "from 0 (fr_str 0)"), 32), g5));
  EXPECT_FALSE(detect_loop(sld_trace(g5, formula(g5, "exists y:stream. from 0 y"), 32), g5));
}

TEST(Candidates, GeneralizeGamma2) {
  Program p = load("gamma2");
  auto cs = generalize_invariant(sld_trace(p, formula(p, "p a"), 32), p);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].formula, formula(p, "forall x:i. p x"));
  EXPECT_EQ(cs[0].fragment, Fragment::CoFohh);
  EXPECT_EQ(cs[0].provenance, Provenance::Generalize);
}

TEST(Candidates, GeneralizeGamma4) {
  Program p = load("gamma4");
  auto cs = generalize_invariant(sld_trace(p, formula(p, "p a"), 32), p);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0].formula, formula(p, "forall x:i. p x"));
  EXPECT_EQ(cs[1].formula, formula(p, "forall x:i. q x => p x"));
  EXPECT_EQ(cs[1].provenance, Provenance::Conditional);
}

TEST(Candidates, SingleStepTraceHasNothingToGeneralize) {
  Program p = load("gamma2");
  EXPECT_TRUE(generalize_invariant(sld_trace(p, formula(p, "p a"), 1), p).empty());
}

TEST(Candidates, FixSynthesisGamma3) {
  Program p = load("gamma3");
  auto cs = synthesize_fix_args(sld_trace(p, formula(p, "exists x:i. p x"), 32), p);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].formula, formula(p, "p (fix \\x:i. f x)"));
  EXPECT_EQ(cs[0].fragment, Fragment::CoFohc);
  EXPECT_TRUE(cs[0].uses_fix);
  EXPECT_EQ(cs[0].provenance, Provenance::FixSynthesis);
}

TEST(Candidates, FixSynthesisGamma5) {
  Program p = load("gamma5");
  auto cs = synthesize_fix_args(sld_trace(p, formula(p, "exists y:stream. from 0 y"), 32), p);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].formula, formula(p, "forall x:i. from x (fr_str x)"));
  EXPECT_EQ(cs[0].fragment, Fragment::CoHohh);
  EXPECT_TRUE(all_fix_guarded(cs[0].formula.term()));
}

TEST(Candidates, GroundFiniteTraceHasNoRecurrence) {
  Program p = load("gamma4");
  DerivationTrace tr = sld_trace(p, formula(p, "q (f a)"), 32);
  EXPECT_EQ(tr.verdict, TraceVerdict::FiniteSuccess);
  EXPECT_TRUE(synthesize_fix_args(tr, p).empty());
}

TEST(Uniform, Gamma1GuardedSequent) {
  Program p = load("gamma1");
  Formula pa = formula(p, "p a");
  auto root = uniform_search(kFohc, p, Sequent::root(pa));
  ASSERT_TRUE(root);
  const ProofNode* t = &root->premises[0];
  EXPECT_EQ(t->conclusion, Sequent::main({}, {{pa, true}}, {pa, true}));
  std::vector<Rule> want{Rule::Decide_g, Rule::ForallL_g, Rule::ImpL_g, Rule::Initial, Rule::Decide, Rule::Initial};
  EXPECT_EQ(rule_sequence(*t), want);
  EXPECT_EQ(t->data.clause, (ClauseRef{ClauseRef::Source::Clause, 0}));
  EXPECT_EQ(t->premises[0].premises[0].premises[1].data.clause, (ClauseRef{ClauseRef::Source::Hyp, 0}));
  EXPECT_TRUE(check_rule_instance(kFohc, p, t->rule, t->conclusion, {t->premises[0].conclusion}, t->data).ok());
}

TEST(Uniform, StreamRootMatchesGolden) {
  Program p = load("gamma5");
  auto golden = syntax::parse_certificate(syntax::read_file(theory_path("from_proof.cert")), p);
  auto t = uniform_search(kHohhFix, p, Sequent::root(formula(p, "forall x:i. from x (fr_str x)")));
  ASSERT_TRUE(t);
  EXPECT_EQ(rule_sequence(*t), rule_sequence(golden.main));
  expect_well_formed(kHohhFix, p, *t);
}

TEST(Uniform, TopIsOneNode) {
  Program p = load("gamma1");
  auto t = uniform_search(kFohc, p, Sequent::main({}, {}, {Formula::top(), false}));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->rule, Rule::TopR);
  EXPECT_EQ(t->size(), 1u);
}

TEST(Uniform, FailsWithinBudget) {
  Program p = load("gamma3");
  EXPECT_FALSE(uniform_search(kFohc, p, Sequent::root(formula(p, "p a"))));
}

TEST(Prove, Gamma1IsItsOwnInvariant) {
  Program p = load("gamma1");
  auto r = prove(kFohc, p, formula(p, "p a"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->invariant.formula, formula(p, "p a"));
  EXPECT_FALSE(r->corollary_proof);
  expect_well_formed(kFohc, p, r->invariant_proof);
}

TEST(Prove, Gamma2Corollary) {
  Program p = load("gamma2");
  auto r = prove(kFohh, p, formula(p, "p a"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->invariant.formula, formula(p, "forall x:i. p x"));
  ASSERT_TRUE(r->corollary_proof);
  EXPECT_EQ(r->corollary_proof->conclusion.goal.formula, formula(p, "p a"));
  expect_well_formed(kFohh, p, r->invariant_proof);
  expect_well_formed(kFohh, r->program, *r->corollary_proof);
}

TEST(Prove, Gamma3ExistentialWitness) {
  Program p = load("gamma3");
  auto r = prove(kFohcFix, p, formula(p, "exists x:i. p x"));
  ASSERT_TRUE(r);
  Term fx = term(p, "fix \\x:i. f x");
  EXPECT_EQ(r->invariant.formula, Formula(Term::app(Term::constant("p"), fx)));
  ASSERT_TRUE(r->corollary_proof);
  EXPECT_EQ(r->corollary_proof->rule, Rule::ExistsR);
  EXPECT_EQ(r->corollary_proof->data.witness, fx);
  expect_well_formed(kFohcFix, r->program, *r->corollary_proof);
}

TEST(Prove, Gamma4NeedsTheConditionalInvariant) {
  Program p = load("gamma4");
  ProveLog log;
  auto r = prove(kFohh, p, formula(p, "p a"), {}, &log);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->invariant.formula, formula(p, "forall x:i. q x => p x"));
  EXPECT_EQ(r->invariant.provenance, Provenance::Conditional);
  std::vector<std::string> tried;
  for (const auto& a : log.attempts) tried.push_back(show(p, a.candidate.formula));
  EXPECT_EQ(tried, (std::vector<std::string>{"p a", "forall x:i. p x", "forall x:i. q x => p x"}));
  EXPECT_FALSE(log.attempts[0].invariant_proved);
  EXPECT_FALSE(log.attempts[1].invariant_proved);
}

TEST(Prove, Gamma5Stream) {
  Program p = load("gamma5");
  auto r = prove(kHohhFix, p, formula(p, "from 0 (fr_str 0)"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->invariant.formula, formula(p, "forall x:i. from x (fr_str x)"));
  EXPECT_EQ(r->invariant.provenance, Provenance::FixSynthesis);
  ASSERT_TRUE(r->corollary_proof);
  expect_well_formed(kHohhFix, r->program, *r->corollary_proof);
}

TEST(Prove, Gamma1StopsAtTheFirstCandidate) {
  Program p = load("gamma1");
  ProveLog log;
  auto r = prove(kFohc, p, formula(p, "p a"), {}, &log);
  ASSERT_TRUE(r);
  ASSERT_EQ(log.attempts.size(), 1u);
  EXPECT_TRUE(log.attempts[0].invariant_proved);
  auto loop = detect_loop(sld_trace(p, formula(p, "p a"), 32), p);
  ASSERT_TRUE(loop);
  EXPECT_EQ(loop->formula, r->invariant.formula);

  SearchConfig only_loop;
  only_loop.heuristic_order = {Provenance::Loop};
  EXPECT_TRUE(prove(kFohc, p, formula(p, "p a"), only_loop));
}

TEST(Prove, Deterministic) {
  Program p = load("gamma5");
  Formula g = formula(p, "from 0 (fr_str 0)");
  auto a = prove(kHohhFix, p, g), b = prove(kHohhFix, p, g);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(syntax::print_proof(a->invariant_proof, p), syntax::print_proof(b->invariant_proof, p));
  EXPECT_EQ(syntax::print_proof(*a->corollary_proof, a->program), syntax::print_proof(*b->corollary_proof, b->program));
}

}  // namespace
