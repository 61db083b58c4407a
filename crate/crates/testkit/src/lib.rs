//! Seeded generators of small random theories, formulas and programs, and
//! brute-force enumerators used as oracles by the property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use scl_core::formula::{now, CmpOp};
use std::collections::BTreeSet;

use scl_core::golog::{Interpreter, Procedures, Program};
use scl_core::progression::{holds_on_trace, Trace};
use scl_core::term::{name, time, LiteralTerm};
use scl_core::theory::{
    cartesian, ActionDecl, EffectClause, GroundAtom, Polarity, OBL, OBLIGE, RELEASE,
};
use scl_core::{validate, ExecBounds, ActionTerm, ContractTheory, Formula, Sort, Term, Time, Var};

/// Upper bounds for [`random_theory`].
#[derive(Clone, Copy, Debug)]
pub struct TheoryShape {
    pub fluents: usize,
    pub actions: usize,
    pub objects: usize,
}

impl Default for TheoryShape {
    fn default() -> Self {
        TheoryShape {
            fluents: 3,
            actions: 3,
            objects: 2,
        }
    }
}

fn pick<'a, T, R: Rng>(rng: &mut R, xs: &'a [T]) -> &'a T {
    xs.choose(rng).expect("non-empty choice")
}

/// A random theory with one or two sorts, unary or nullary fluents and
/// actions, guarded effects and time-dependent preconditions. The result
/// always validates.
pub fn random_theory<R: Rng>(rng: &mut R, shape: TheoryShape) -> ContractTheory {
    loop {
        let th = try_theory(rng, shape);
        if validate(&th).is_empty() {
            return th;
        }
    }
}

fn try_theory<R: Rng>(rng: &mut R, shape: TheoryShape) -> ContractTheory {
    let mut th = ContractTheory::new("Random");
    let n_sorts = rng.gen_range(1..=2);
    let mut k = 0;
    for s in 0..n_sorts {
        let n = rng.gen_range(1..=shape.objects.max(1));
        let consts: Vec<String> = (0..n)
            .map(|_| {
                k += 1;
                format!("c{k}")
            })
            .collect();
        let refs: Vec<&str> = consts.iter().map(String::as_str).collect();
        th.add_sort(&format!("S{s}"), &refs);
    }
    let sorts: Vec<Sort> = th.sorts.keys().map(|s| Sort::Object(s.clone())).collect();
    let n_fluents = rng.gen_range(1..=shape.fluents.max(1));
    for i in 0..n_fluents {
        let params = if rng.gen_bool(0.7) {
            vec![pick(rng, &sorts).clone()]
        } else {
            Vec::new()
        };
        th.add_fluent(&format!("f{i}"), params);
    }
    let n_actions = rng.gen_range(1..=shape.actions.max(1));
    let mut decls = Vec::new();
    for i in 0..n_actions {
        let params: Vec<Var> = if rng.gen_bool(0.6) {
            vec![Var::new("x", pick(rng, &sorts).clone())]
        } else {
            Vec::new()
        };
        let decl = ActionDecl {
            name: name(&format!("a{i}")),
            params,
            time_var: Var::new("t", Sort::Time),
            span: None,
        };
        let mut scope = decl.params.clone();
        scope.push(decl.time_var.clone());
        let poss = if rng.gen_bool(0.3) {
            Formula::True
        } else {
            random_uniform(rng, &th, &scope, 1)
        };
        th.add_action(decl.clone(), Some(poss));
        decls.push(decl);
    }
    let mut clauses = Vec::new();
    for decl in &decls {
        for _ in 0..rng.gen_range(1..=2) {
            clauses.push(random_clause(rng, &th, decl));
        }
    }
    th.install_effects(&clauses)
        .expect("clauses refer to declared symbols");
    let facts: Vec<_> = ground_atoms(&th)
        .into_iter()
        .filter(|_| rng.gen_bool(0.3))
        .collect();
    th.init.facts = facts.into_iter().collect();
    th
}

fn ground_atoms(th: &ContractTheory) -> Vec<scl_core::theory::GroundAtom> {
    let mut out = Vec::new();
    for f in th.user_fluents() {
        let domains: Vec<Vec<Term>> = f.params.iter().map(|s| th.domain(s).unwrap()).collect();
        for args in cartesian(&domains) {
            out.push(scl_core::theory::GroundAtom {
                symbol: f.name.clone(),
                args,
            });
        }
    }
    out
}

fn random_clause<R: Rng>(rng: &mut R, th: &ContractTheory, decl: &ActionDecl) -> EffectClause {
    let fluents: Vec<_> = th.user_fluents().cloned().collect();
    let f = pick(rng, &fluents).clone();
    let mut scope = decl.params.clone();
    scope.push(decl.time_var.clone());
    let mut extra = Vec::new();
    let mut args = Vec::new();
    for (i, s) in f.params.iter().enumerate() {
        let same: Vec<&Var> = decl.params.iter().filter(|v| &v.sort == s).collect();
        let roll = rng.gen_range(0..3);
        if roll == 0 && !same.is_empty() {
            args.push(Term::Var((*pick(rng, &same)).clone()));
        } else if roll == 1 {
            let v = Var::new(&format!("y{i}"), s.clone());
            extra.push(v.clone());
            scope.push(v.clone());
            args.push(Term::Var(v));
        } else {
            args.push(pick(rng, &th.domain(s).unwrap()).clone());
        }
    }
    let guard = if rng.gen_bool(0.5) {
        Formula::True
    } else {
        random_uniform(rng, th, &scope, 1)
    };
    EffectClause {
        action: decl.name.clone(),
        params: decl.params.clone(),
        time_var: decl.time_var.clone(),
        polarity: if rng.gen_bool(0.5) {
            Polarity::MakesTrue
        } else {
            Polarity::MakesFalse
        },
        fluent: f.name.clone(),
        fluent_args: args,
        extra,
        guard,
        span: None,
    }
}

fn object_term<R: Rng>(rng: &mut R, th: &ContractTheory, sort: &Sort, scope: &[Var]) -> Term {
    let vars: Vec<&Var> = scope.iter().filter(|v| sort.accepts(&v.sort)).collect();
    if !vars.is_empty() && rng.gen_bool(0.6) {
        return Term::Var((*pick(rng, &vars)).clone());
    }
    pick(rng, &th.domain(sort).unwrap()).clone()
}

/// A formula uniform in `now` over the variables in `scope`.
pub fn random_uniform<R: Rng>(
    rng: &mut R,
    th: &ContractTheory,
    scope: &[Var],
    depth: u32,
) -> Formula {
    let sits = [now()];
    random_formula_at(rng, th, scope, depth, &sits, &[])
}

/// A random formula whose atoms refer to the situations in `sits` and
/// whose `Poss` atoms use actions from `actions` (ground, timed).
pub fn random_formula_at<R: Rng>(
    rng: &mut R,
    th: &ContractTheory,
    scope: &[Var],
    depth: u32,
    sits: &[Term],
    actions: &[ActionTerm],
) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_atom(rng, th, scope, sits, actions);
    }
    let mut scope = scope.to_vec();
    match rng.gen_range(0..6) {
        0 => Formula::not(random_formula_at(rng, th, &scope, depth - 1, sits, actions)),
        1 => Formula::And(vec![
            random_formula_at(rng, th, &scope, depth - 1, sits, actions),
            random_formula_at(rng, th, &scope, depth - 1, sits, actions),
        ]),
        2 => Formula::Or(vec![
            random_formula_at(rng, th, &scope, depth - 1, sits, actions),
            random_formula_at(rng, th, &scope, depth - 1, sits, actions),
        ]),
        3 => Formula::implies(
            random_formula_at(rng, th, &scope, depth - 1, sits, actions),
            random_formula_at(rng, th, &scope, depth - 1, sits, actions),
        ),
        q => {
            let sorts: Vec<Sort> = th.sorts.keys().map(|s| Sort::Object(s.clone())).collect();
            let v = Var::new(&format!("q{}", scope.len()), pick(rng, &sorts).clone());
            scope.push(v.clone());
            let body = random_formula_at(rng, th, &scope, depth - 1, sits, actions);
            if q == 4 {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            }
        }
    }
}

fn random_literal<R: Rng>(rng: &mut R, th: &ContractTheory, scope: &[Var]) -> LiteralTerm {
    let fluents: Vec<_> = th.user_fluents().cloned().collect();
    let f = pick(rng, &fluents).clone();
    let args = f
        .params
        .iter()
        .map(|s| object_term(rng, th, s, scope))
        .collect();
    LiteralTerm {
        positive: rng.gen_bool(0.7),
        fluent: f.name.clone(),
        args,
    }
}

fn random_atom<R: Rng>(
    rng: &mut R,
    th: &ContractTheory,
    scope: &[Var],
    sits: &[Term],
    actions: &[ActionTerm],
) -> Formula {
    let sit = pick(rng, sits).clone();
    let times: Vec<&Var> = scope.iter().filter(|v| v.sort == Sort::Time).collect();
    match rng.gen_range(0..10) {
        0 if !actions.is_empty() && sit != now() => {
            Formula::Poss(Term::Action(pick(rng, actions).clone()), sit)
        }
        1 => {
            let lhs = Term::Start(Box::new(sit));
            let rhs = if !times.is_empty() && rng.gen_bool(0.5) {
                Term::Var((*pick(rng, &times)).clone())
            } else {
                Term::Time(time(rng.gen_range(0..4)))
            };
            let op = if rng.gen_bool(0.5) {
                CmpOp::Lt
            } else {
                CmpOp::Le
            };
            if rng.gen_bool(0.5) {
                Formula::TimeCmp(op, lhs, rhs)
            } else {
                Formula::TimeCmp(op, rhs, lhs)
            }
        }
        2 => {
            let sorts: Vec<Sort> = th.sorts.keys().map(|s| Sort::Object(s.clone())).collect();
            let s = pick(rng, &sorts).clone();
            Formula::Eq(
                object_term(rng, th, &s, scope),
                object_term(rng, th, &s, scope),
            )
        }
        3 => {
            let agent = object_term(rng, th, &Sort::AnyObject, scope);
            let lit = random_literal(rng, th, scope);
            Formula::Fluent {
                fluent: name(scl_core::theory::OBL),
                args: vec![agent, Term::Lit(lit), Term::Time(time(rng.gen_range(1..4)))],
                sit,
            }
        }
        _ => {
            let fluents: Vec<_> = th.user_fluents().cloned().collect();
            let f = pick(rng, &fluents).clone();
            let args = f
                .params
                .iter()
                .map(|s| object_term(rng, th, s, scope))
                .collect();
            Formula::Fluent {
                fluent: f.name.clone(),
                args,
                sit,
            }
        }
    }
}

/// The obligation instances used in generated traces: one `oblige` and one
/// `release` per literal, for up to two literals on the first constant.
pub fn obligation_actions<R: Rng>(rng: &mut R, th: &ContractTheory, n: usize) -> Vec<ActionTerm> {
    let agent = th.domain(&Sort::AnyObject).unwrap()[0].clone();
    let mut out = Vec::new();
    for _ in 0..n {
        let lit = random_literal(rng, th, &[]);
        let d = time(rng.gen_range(1..4));
        for sym in [OBLIGE, RELEASE] {
            out.push(ActionTerm::new(
                sym,
                vec![agent.clone(), Term::Lit(lit.clone()), Term::Time(d)],
                Term::Now,
            ));
        }
    }
    out
}

/// The alphabet of ground actions with symbolic times: every user action
/// instance plus the given obligation instances.
pub fn alphabet(th: &ContractTheory, obligations: &[ActionTerm]) -> Vec<ActionTerm> {
    let mut out = th.ground_actions().unwrap();
    out.extend(obligations.iter().cloned());
    out
}

/// Occurrence time used for the `i`-th alphabet entry after `start`:
/// alternately `start` and `start + 1`, so traces exercise both equal and
/// increasing times without multiplying the branching.
pub fn timed(a: &ActionTerm, index: usize, start: Time) -> ActionTerm {
    a.with_time(start + time((index % 2) as i64))
}

/// Every trace of length at most `depth` over `alphabet` (timed by
/// [`timed`]) that is executable and free of inconsistent effects,
/// visited depth-first with the alphabet order at each level. The
/// callback sees each trace once, `S0` first.
pub fn for_each_trace(
    th: &ContractTheory,
    alphabet: &[ActionTerm],
    depth: usize,
    f: &mut dyn FnMut(&Trace),
) {
    fn go(
        th: &ContractTheory,
        alphabet: &[ActionTerm],
        depth: usize,
        tr: &mut Trace,
        f: &mut dyn FnMut(&Trace),
    ) {
        f(tr);
        if tr.actions.len() == depth {
            return;
        }
        for (i, a) in alphabet.iter().enumerate() {
            let act = timed(a, i, tr.last().start);
            if tr.try_push(th, act).is_ok() {
                go(th, alphabet, depth, tr, f);
                tr.pop();
            }
        }
    }
    let mut tr = Trace::initial(th);
    go(th, alphabet, depth, &mut tr, f);
}

/// Every sequence of length at most `depth` over `alphabet`, executable or
/// not, shortest first.
pub fn all_sequences(alphabet: &[ActionTerm], depth: usize) -> Vec<Vec<ActionTerm>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for seq in &frontier {
            for a in alphabet {
                let mut s: Vec<ActionTerm> = seq.clone();
                s.push(a.clone());
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Checked execution from `S0`, treating inconsistent effects as failure.
pub fn execute(th: &ContractTheory, actions: &[ActionTerm]) -> Option<Trace> {
    Trace::execute(th, actions).ok()
}

/// A random program of at most `size` constructors over the theory's
/// actions, with `?` times and formulas uniform in `now`. `prims` bounds
/// the primitive action occurrences.
pub fn random_program<R: Rng>(
    rng: &mut R,
    th: &ContractTheory,
    size: usize,
    prims: usize,
) -> Program {
    let mut budget_prims = prims;
    gen_program(rng, th, size.max(1), &mut budget_prims, &[], true)
}

fn gen_program<R: Rng>(
    rng: &mut R,
    th: &ContractTheory,
    size: usize,
    prims: &mut usize,
    scope: &[Var],
    star_ok: bool,
) -> Program {
    let leaf = |rng: &mut R, prims: &mut usize| -> Program {
        if *prims > 0 && rng.gen_bool(0.75) {
            *prims -= 1;
            Program::prim(random_action(rng, th, scope))
        } else if rng.gen_bool(0.5) {
            Program::Test(random_uniform(rng, th, scope, 1))
        } else {
            Program::Nil
        }
    };
    if size <= 1 {
        return leaf(rng, prims);
    }
    match rng.gen_range(0..7) {
        0 | 1 => {
            let l = rng.gen_range(1..size);
            let p = gen_program(rng, th, l, prims, scope, star_ok);
            let q = gen_program(rng, th, (size - 1 - l).max(1), prims, scope, star_ok);
            Program::seq(p, q)
        }
        2 => {
            let l = rng.gen_range(1..size);
            let p = gen_program(rng, th, l, prims, scope, star_ok);
            let q = gen_program(rng, th, (size - 1 - l).max(1), prims, scope, star_ok);
            Program::choice(p, q)
        }
        3 if star_ok => Program::star(gen_program(rng, th, size - 1, prims, scope, false)),
        4 => {
            let sorts: Vec<Sort> = th.sorts.keys().map(|s| Sort::Object(s.clone())).collect();
            let v = Var::new(&format!("p{}", scope.len()), pick(rng, &sorts).clone());
            let mut inner = scope.to_vec();
            inner.push(v.clone());
            Program::pick(v, gen_program(rng, th, size - 1, prims, &inner, star_ok))
        }
        5 if size >= 3 => {
            let c = random_uniform(rng, th, scope, 1);
            let l = rng.gen_range(1..size - 1);
            let p = gen_program(rng, th, l, prims, scope, star_ok);
            let q = gen_program(rng, th, (size - 2 - l).max(1), prims, scope, star_ok);
            Program::if_(c, p, q)
        }
        6 if star_ok => {
            let c = random_uniform(rng, th, scope, 1);
            Program::while_(c, gen_program(rng, th, size - 1, prims, scope, false))
        }
        _ => leaf(rng, prims),
    }
}

fn random_action<R: Rng>(rng: &mut R, th: &ContractTheory, scope: &[Var]) -> ActionTerm {
    let decls: Vec<_> = th
        .actions
        .values()
        .filter(|d| !scl_core::theory::is_reserved_action(&d.name))
        .cloned()
        .collect();
    let d = pick(rng, &decls).clone();
    let args = d
        .params
        .iter()
        .map(|v| object_term(rng, th, &v.sort, scope))
        .collect();
    ActionTerm {
        symbol: d.name.clone(),
        args,
        time: Box::new(Term::Now),
    }
}

/// Relational reading of a program over a fixed executable sequence: the
/// positions `j` such that the program, started after `seq[..i]`, can
/// terminate after `seq[..j]`. Independent of the interpreter's search.
pub struct ShapeOracle<'a> {
    th: &'a ContractTheory,
    seq: &'a [ActionTerm],
    prefixes: Vec<Trace>,
}

impl<'a> ShapeOracle<'a> {
    /// `None` unless `seq` is executable.
    pub fn new(th: &'a ContractTheory, seq: &'a [ActionTerm]) -> Option<Self> {
        execute(th, seq)?;
        let mut prefixes = vec![Trace::initial(th)];
        for a in seq {
            let mut t = prefixes.last().unwrap().clone();
            t.push_unchecked(th, a.clone()).ok()?;
            prefixes.push(t);
        }
        Some(ShapeOracle { th, seq, prefixes })
    }

    fn test(&self, f: &Formula, i: usize) -> bool {
        holds_on_trace(f, &self.prefixes[i], self.th).expect("closed test formula")
    }

    pub fn ends(&self, p: &Program, i: usize) -> std::collections::BTreeSet<usize> {
        use std::collections::BTreeSet;
        let mut out = BTreeSet::new();
        match p {
            Program::Nil => {
                out.insert(i);
            }
            Program::Prim(Term::Action(a)) => {
                let mut want = a.clone();
                if *want.time == Term::Now {
                    want = want.with_time(self.prefixes[i].last().start);
                }
                if i < self.seq.len() && self.seq[i] == want {
                    out.insert(i + 1);
                }
            }
            Program::Prim(other) => panic!("unbound primitive {other}"),
            Program::Test(f) => {
                if self.test(f, i) {
                    out.insert(i);
                }
            }
            Program::Seq(p, q) => {
                for j in self.ends(p, i) {
                    out.extend(self.ends(q, j));
                }
            }
            Program::Choice(p, q) => {
                out.extend(self.ends(p, i));
                out.extend(self.ends(q, i));
            }
            Program::Pick(v, body) => {
                for value in self.th.domain(&v.sort).unwrap() {
                    let sub = scl_core::Substitution::from_pairs([(v.clone(), value)]).unwrap();
                    out.extend(self.ends(&body.substitute(&sub), i));
                }
            }
            Program::Star(body) => {
                out.insert(i);
                let mut work = vec![i];
                while let Some(j) = work.pop() {
                    for k in self.ends(body, j) {
                        if out.insert(k) {
                            work.push(k);
                        }
                    }
                }
            }
            Program::If(c, p, q) => {
                out = if self.test(c, i) {
                    self.ends(p, i)
                } else {
                    self.ends(q, i)
                };
            }
            Program::While(c, body) => {
                let mut seen: BTreeSet<usize> = BTreeSet::from([i]);
                let mut work = vec![i];
                while let Some(j) = work.pop() {
                    if self.test(c, j) {
                        for k in self.ends(body, j) {
                            if seen.insert(k) {
                                work.push(k);
                            }
                        }
                    } else {
                        out.insert(j);
                    }
                }
            }
            Program::Call(..) => panic!("procedures are not supported by the oracle"),
        }
        out
    }

    /// Whether the whole sequence is an execution of `p` from `S0`.
    pub fn accepts(&self, p: &Program) -> bool {
        self.ends(p, 0).contains(&self.seq.len())
    }
}

/// Brute force: every sequence over `alphabet` of length at most `depth`
/// that is executable and accepted by `p`.
pub fn brute_force_runs(
    th: &ContractTheory,
    p: &Program,
    alphabet: &[ActionTerm],
    depth: usize,
) -> Vec<Vec<ActionTerm>> {
    all_sequences(alphabet, depth)
        .into_iter()
        .filter(|seq| ShapeOracle::new(th, seq).is_some_and(|o| o.accepts(p)))
        .collect()
}

/// Outcome of a randomized cross-check.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Tally {
    pub fn fail(&mut self, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(msg);
        } else {
            self.failures.push(String::new());
            self.failures.truncate(21);
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        for f in other.failures {
            self.fail(f);
        }
    }
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Random theory, alphabet and every executable trace up to `depth`.
pub struct Scenario {
    pub theory: ContractTheory,
    pub alphabet: Vec<ActionTerm>,
    pub traces: Vec<Trace>,
}

pub fn scenario(seed: u64, depth: usize) -> Scenario {
    let mut rng = seeded(seed);
    let theory = random_theory(&mut rng, TheoryShape::default());
    let obl = obligation_actions(&mut rng, &theory, 1);
    let alphabet = alphabet(&theory, &obl);
    let mut traces = Vec::new();
    for_each_trace(&theory, &alphabet, depth, &mut |t| traces.push(t.clone()));
    Scenario {
        theory,
        alphabet,
        traces,
    }
}

/// Regression against progression: `formulas` random closed regressable
/// formulas per theory, each asked at every trace of the scenario.
pub fn regression_equivalence(seed: u64, depth: usize, formulas: usize) -> Tally {
    regression_equivalence_on(&scenario(seed, depth), seed, formulas)
}

pub fn regression_equivalence_on(sc: &Scenario, seed: u64, formulas: usize) -> Tally {
    let th = &sc.theory;
    let mut rng = seeded(seed ^ 0x5eed);
    // fixed reference situations besides `now`
    let short: Vec<&Trace> = sc.traces.iter().filter(|t| t.actions.len() <= 2).collect();
    let mut sits = vec![now(), Term::S0];
    for _ in 0..2 {
        sits.push(pick(&mut rng, &short).situation().clone());
    }
    let poss_actions: Vec<ActionTerm> = sc
        .alphabet
        .iter()
        .enumerate()
        .map(|(i, a)| timed(a, i, time(1)))
        .collect();
    let fs: Vec<Formula> = (0..formulas)
        .map(|_| random_formula_at(&mut rng, th, &[], 3, &sits, &poss_actions))
        .collect();
    let reg = scl_core::regression::Regressor::new(th);
    let mut tally = Tally::default();
    for tr in &sc.traces {
        for f in &fs {
            tally.cases += 1;
            let by_prog = holds_on_trace(f, tr, th);
            let by_reg = reg.holds(f, tr.situation());
            match (by_reg, by_prog) {
                (Ok(a), Ok(b)) if a == b => {}
                (a, b) => tally.fail(format!(
                    "seed {seed}: {f} at {}: regression {a:?}, progression {b:?}",
                    tr.situation()
                )),
            }
        }
    }
    tally
}

fn is_obl(atom: &GroundAtom) -> bool {
    &*atom.symbol == OBL
}

/// Every `Obl` instance true after a prefix stays true after each longer
/// prefix, up to the first `release` with the same arguments.
pub fn persistence_on(sc: &Scenario) -> Tally {
    let mut tally = Tally::default();
    for tr in &sc.traces {
        for (i, state) in tr.states.iter().enumerate() {
            for o in state.facts.iter().filter(|a| is_obl(a)) {
                tally.cases += 1;
                for k in i..tr.actions.len() {
                    let a = &tr.actions[k];
                    if &*a.symbol == RELEASE && a.args == o.args {
                        break;
                    }
                    if !tr.states[k + 1].holds(o) {
                        tally.fail(format!(
                            "{o} true after {i} action(s) but not after {} in {}",
                            k + 1,
                            tr.situation()
                        ));
                        break;
                    }
                }
            }
        }
    }
    tally
}

/// `oblige` and `release` leave every non-`Obl` atom as it was.
pub fn non_interference_on(sc: &Scenario) -> Tally {
    let mut tally = Tally::default();
    for tr in &sc.traces {
        for (k, a) in tr.actions.iter().enumerate() {
            if !scl_core::theory::is_reserved_action(&a.symbol) {
                continue;
            }
            tally.cases += 1;
            let user = |i: usize| -> Vec<&GroundAtom> {
                tr.states[i].facts.iter().filter(|a| !is_obl(a)).collect()
            };
            if user(k) != user(k + 1) {
                tally.fail(format!("{a} changed user fluents in {}", tr.situation()));
            }
        }
    }
    tally
}

/// `precedes` against proper-prefix on action lists, and the
/// foundational laws, over every situation of at most `depth` actions
/// built from two actions.
pub fn foundational_axioms(depth: usize) -> Tally {
    use scl_core::{precedes, situation_of};
    let acts = [
        ActionTerm::new("a", Vec::new(), Term::Time(time(0))),
        ActionTerm::new("b", Vec::new(), Term::Time(time(0))),
    ];
    let seqs = all_sequences(&acts, depth);
    let sits: Vec<Term> = seqs.iter().map(|s| situation_of(s)).collect();
    let prec = |x: &Term, y: &Term| precedes(x, y).expect("situations are ground");
    let mut tally = Tally::default();
    let mut check = |ok: bool, what: String| {
        tally.cases += 1;
        if !ok {
            tally.fail(what);
        }
    };
    let n = sits.len();
    let table: Vec<Vec<bool>> = sits
        .iter()
        .map(|x| sits.iter().map(|y| prec(x, y)).collect())
        .collect();
    for i in 0..n {
        check(!prec(&sits[i], &Term::S0), format!("{} < S0", sits[i]));
        check(!table[i][i], format!("{} < itself", sits[i]));
        for j in 0..n {
            let oracle = seqs[i].len() < seqs[j].len() && seqs[j].starts_with(&seqs[i]);
            check(
                table[i][j] == oracle,
                format!("precedes({}, {}) = {}", sits[i], sits[j], table[i][j]),
            );
            if table[i][j] {
                check(!table[j][i], format!("{} and {} both precede", sits[i], sits[j]));
                for k in 0..n {
                    if table[j][k] {
                        check(
                            table[i][k],
                            format!("not transitive at {}, {}, {}", sits[i], sits[j], sits[k]),
                        );
                    }
                }
            }
        }
    }
    for (j, prev) in sits.iter().enumerate() {
        if seqs[j].len() >= depth {
            continue;
        }
        for a in &acts {
            let next = Term::do_(Term::Action(a.clone()), prev.clone());
            for (i, s) in sits.iter().enumerate() {
                let lhs = prec(s, &next);
                let rhs = s == prev || table[i][j];
                check(lhs == rhs, format!("prefix law fails for {s} and {next}"));
            }
        }
    }
    tally
}

/// A random theory in which no action sequence of at most `depth` steps
/// (times at the initial start) meets an inconsistent effect.
pub fn consistent_theory<R: Rng>(rng: &mut R, depth: usize) -> ContractTheory {
    fn clean(th: &ContractTheory, alphabet: &[ActionTerm], depth: usize, tr: &mut Trace) -> bool {
        if tr.actions.len() == depth {
            return true;
        }
        for a in alphabet {
            match tr.try_push(th, a.clone()) {
                Ok(()) => {
                    let ok = clean(th, alphabet, depth, tr);
                    tr.pop();
                    if !ok {
                        return false;
                    }
                }
                Err(scl_core::progression::StepFailure::Error { .. }) => return false,
                Err(_) => {}
            }
        }
        true
    }
    loop {
        let th = random_theory(rng, TheoryShape::default());
        let alphabet: Vec<ActionTerm> = user_actions(&th)
            .into_iter()
            .map(|a| a.with_time(th.init.start))
            .collect();
        if clean(&th, &alphabet, depth, &mut Trace::initial(&th)) {
            return th;
        }
    }
}

fn user_actions(th: &ContractTheory) -> Vec<ActionTerm> {
    th.ground_actions()
        .unwrap()
        .into_iter()
        .filter(|a| !scl_core::theory::is_reserved_action(&a.symbol))
        .collect()
}

type Runs = BTreeSet<Vec<ActionTerm>>;

fn runs(it: &Interpreter, p: &Program, start: Trace) -> scl_core::Result<Runs> {
    Ok(it
        .run_from(p, start)?
        .results
        .into_iter()
        .map(|r| r.actions)
        .collect())
}

/// Outcome of [`golog_laws`]: programs checked, programs skipped because
/// some run met an execution error, and law violations.
#[derive(Clone, Debug, Default)]
pub struct LawReport {
    pub checked: usize,
    pub skipped: usize,
    pub tally: Tally,
}

impl LawReport {
    pub fn merge(&mut self, other: LawReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.tally.merge(other.tally);
    }
}

/// Compositionality, choice as union, star monotonicity, while unfolding,
/// executability of results and agreement of `run` with the transitive
/// closure of `step`, on `programs` random programs of at most `size`
/// constructors over one random theory.
pub fn golog_laws(seed: u64, programs: usize, size: usize) -> LawReport {
    let mut rng = seeded(seed);
    let th = consistent_theory(&mut rng, 4);
    let procs = Procedures::new();
    let bounds = ExecBounds {
        max_steps: 4,
        max_star: 2,
        max_results: None,
    };
    let it = Interpreter::new(&th, &procs, bounds);
    let reg = scl_core::regression::Regressor::new(&th);
    let mut report = LawReport::default();
    for _ in 0..programs {
        // p and q together stay within `size`, so Seq(p, q) does too
        let n = rng.gen_range(1..size.max(2));
        let m = size.saturating_sub(n + 1).max(1);
        let p = random_program(&mut rng, &th, n, 3);
        let q = random_program(&mut rng, &th, m, 2);
        let c = random_uniform(&mut rng, &th, &[], 1);
        match law_case(&th, &it, &reg, &p, &q, &c) {
            Ok(t) => {
                report.checked += 1;
                report.tally.merge(t);
            }
            Err(e) => {
                if std::env::var_os("SCL_DEBUG").is_some() {
                    eprintln!("skip {p}: {e}");
                }
                report.skipped += 1
            }
        }
    }
    report
}

fn law_case(
    th: &ContractTheory,
    it: &Interpreter,
    reg: &scl_core::regression::Regressor,
    p: &Program,
    q: &Program,
    c: &Formula,
) -> scl_core::Result<Tally> {
    let s0 = || Trace::initial(th);
    let mut t = Tally::default();
    let mut law = |ok: bool, what: &str, prog: &Program| {
        t.cases += 1;
        if !ok {
            t.fail(format!("{what}: {prog}"));
        }
    };
    let rp = runs(it, p, s0())?;
    let rq = runs(it, q, s0())?;

    let seq = Program::seq(p.clone(), q.clone());
    let mut composed = Runs::new();
    for r in &rp {
        composed.extend(runs(it, q, Trace::replay(th, r)?)?);
    }
    law(runs(it, &seq, s0())? == composed, "compositionality", &seq);

    let ch = Program::choice(p.clone(), q.clone());
    let union: Runs = rp.union(&rq).cloned().collect();
    law(runs(it, &ch, s0())? == union, "choice union", &ch);

    let st = Program::star(p.clone());
    let mut prev: Option<Runs> = None;
    for k in 0..=2 {
        let ik = Interpreter::new(
            th,
            it.procs,
            ExecBounds {
                max_star: k,
                ..it.bounds
            },
        );
        let now = runs(&ik, &st, s0())?;
        if let Some(prev) = &prev {
            law(prev.is_subset(&now), "star monotonicity", &st);
        }
        prev = Some(now);
    }

    let wh = Program::while_(c.clone(), p.clone());
    let unfolded = Program::if_(c.clone(), Program::seq(p.clone(), wh.clone()), Program::Nil);
    law(
        runs(it, &wh, s0())? == runs(it, &unfolded, s0())?,
        "while unfolding",
        &wh,
    );

    for r in &rp {
        let mut ok = Trace::execute(th, r).is_ok();
        for k in 0..r.len() {
            let poss = Formula::Poss(Term::Action(r[k].clone()), scl_core::situation_of(&r[..k]));
            ok &= reg.holds(&poss, &Term::S0)?;
        }
        law(ok, "executable results", p);
    }

    // the step closure has no star bound; every productive iteration
    // consumes an action, so max_star = max_steps does not bind either
    let unbounded = Interpreter::new(
        th,
        it.procs,
        ExecBounds {
            max_star: it.bounds.max_steps,
            ..it.bounds
        },
    );
    let closure: Runs = unbounded.closure_results(p)?.into_iter().collect();
    law(
        closure == runs(&unbounded, p, s0())?,
        "closure of step",
        p,
    );
    Ok(t)
}

/// `run` against [`brute_force_runs`] on `programs` random programs with
/// at most three primitive steps, both bounded to three actions.
pub fn brute_force_agreement(seed: u64, programs: usize, size: usize) -> LawReport {
    let mut rng = seeded(seed);
    let th = consistent_theory(&mut rng, 3);
    let procs = Procedures::new();
    let bounds = ExecBounds {
        max_steps: 3,
        max_star: 3,
        max_results: None,
    };
    let it = Interpreter::new(&th, &procs, bounds);
    let alphabet: Vec<ActionTerm> = user_actions(&th)
        .into_iter()
        .map(|a| a.with_time(th.init.start))
        .collect();
    let mut report = LawReport::default();
    for _ in 0..programs {
        let n = rng.gen_range(1..=size);
        let p = random_program(&mut rng, &th, n, 3);
        match runs(&it, &p, Trace::initial(&th)) {
            Ok(got) => {
                report.checked += 1;
                let want: Runs = brute_force_runs(&th, &p, &alphabet, 3).into_iter().collect();
                report.tally.cases += 1;
                if got != want {
                    report.tally.fail(format!(
                        "seed {seed}: {p}: run {} vs brute force {}",
                        got.len(),
                        want.len()
                    ));
                }
            }
            Err(_) => report.skipped += 1,
        }
    }
    report
}

/// Verifier invariants on random programs: duality of `Always` with an
/// independent search for a violating prefix, duality of `AtTermination`
/// with `ExistsExecution`, validity and minimality of counterexamples,
/// and monotonicity in the bounds.
pub fn verifier_laws(seed: u64, programs: usize, size: usize) -> LawReport {
    let mut rng = seeded(seed);
    let th = consistent_theory(&mut rng, 4);
    let procs = Procedures::new();
    let small = ExecBounds {
        max_steps: 3,
        max_star: 1,
        max_results: None,
    };
    let large = ExecBounds {
        max_steps: 4,
        max_star: 2,
        max_results: None,
    };
    let mut report = LawReport::default();
    for _ in 0..programs {
        let n = rng.gen_range(1..=size);
        let p = random_program(&mut rng, &th, n, 3);
        let phi = random_uniform(&mut rng, &th, &[], 2);
        match verifier_case(&th, &procs, &p, &phi, small, large) {
            Ok(t) => {
                report.checked += 1;
                report.tally.merge(t);
            }
            Err(_) => report.skipped += 1,
        }
    }
    report
}

fn verifier_case(
    th: &ContractTheory,
    procs: &Procedures,
    p: &Program,
    phi: &Formula,
    small: ExecBounds,
    large: ExecBounds,
) -> scl_core::Result<Tally> {
    use scl_core::verify::{check_execution, Assertion};
    use scl_core::{verify, Property};
    let mut t = Tally::default();
    let mut law = |ok: bool, what: &str| {
        t.cases += 1;
        if !ok {
            t.fail(format!("{what}: {p} with {phi}"));
        }
    };
    let results = runs(&Interpreter::new(th, procs, small), p, Trace::initial(th))?;
    // independent reading of the properties over the result set
    let mut violating: Vec<&Vec<ActionTerm>> = Vec::new();
    let mut end_true = false;
    let mut end_false = false;
    for r in &results {
        let tr = Trace::replay(th, r)?;
        let mut bad = false;
        for k in 0..=r.len() {
            let prefix = Trace::replay(th, &r[..k])?;
            bad |= !holds_on_trace(phi, &prefix, th)?;
        }
        if bad {
            violating.push(r);
        }
        if holds_on_trace(phi, &tr, th)? {
            end_true = true;
        } else {
            end_false = true;
        }
    }

    let always = Property::Always(phi.clone());
    let v = verify(&always, p, procs, th, small)?;
    law(v.holds == violating.is_empty(), "always vs violating prefix");
    law(v.executions == results.len(), "execution count");
    match &v.trace {
        Some(cx) => {
            law(!v.holds, "trace only on failure");
            law(results.contains(cx), "counterexample is an execution");
            law(!check_execution(&always, cx, th)?, "counterexample violates");
            law(violating.first() == Some(&cx), "least counterexample");
        }
        None => law(v.holds, "failure carries a counterexample"),
    }

    let at_end = verify(
        &Property::AtTermination(Assertion::Formula(phi.clone())),
        p,
        procs,
        th,
        small,
    )?;
    let not_phi = Formula::not(phi.clone());
    let exists = verify(&Property::ExistsExecution(not_phi), p, procs, th, small)?;
    law(at_end.holds == !end_false, "at_end vs results");
    law(at_end.holds != exists.holds, "at_end dual to possible not");
    law(exists.holds == exists.trace.is_some(), "witness on success");
    let possible = verify(&Property::ExistsExecution(phi.clone()), p, procs, th, small)?;
    law(possible.holds == end_true, "possible vs results");

    let sub = verify(&Property::SubtraceAll(phi.clone()), p, procs, th, small)?;
    law(
        v.holds == (sub.holds && at_end.holds),
        "always = subtraces and at_end",
    );

    for prop in [&always, &Property::SubtraceAll(phi.clone())] {
        if !verify(prop, p, procs, th, small)?.holds {
            law(!verify(prop, p, procs, th, large)?.holds, "monotone bounds");
        }
    }
    Ok(t)
}
