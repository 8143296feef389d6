//! Inclusion decision procedures.
//!
//! Both engines compute Kleene iterates `cur = F(prev)` until
//! `cur ⊑ prev` under the chosen quasiorder, then test the start component
//! of `prev` for membership. The word engine keeps words; the antichain
//! engine keeps only automaton profiles (with one witness word each).

use indexmap::IndexMap;

use crate::automata::Nfa;
use crate::foundations::{Word, WordSet};
use crate::grammar::{apply_products, derives, to_cnf, Cfg, GSym, LangVector};
use crate::quasiorders::{
    ComposableProfiles, CtxOps, PostOps, ProfileAlgebra, QuasiorderInstance, QuasiorderKind,
    WordKey,
};
use crate::{Error, Result};

pub const DEFAULT_ITERATION_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Index `m` of the stabilized iterate `F^m(∅)`.
    pub iterations: usize,
    /// Number of applications of `F`, i.e. `m + 1` for a stabilized run.
    pub f_applications: usize,
    pub words_generated: usize,
    pub comparisons: usize,
    pub membership_queries: usize,
    pub pruned: usize,
    /// Number of `F^i ⊑ F^{i+1}` checks performed (all passed).
    pub growth_checks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub counterexample: Option<Word>,
    /// Inclusion fails but the counterexample was too long to materialize.
    pub counterexample_unavailable: bool,
    pub stats: Stats,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PruneMode {
    #[default]
    None,
    Antichain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub iteration_cap: usize,
    /// Check `prev ⊑ cur` on every turn.
    pub check_growth: bool,
    /// Upper bound on the words held by one iterate of the word engine.
    pub word_cap: Option<usize>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            iteration_cap: DEFAULT_ITERATION_CAP,
            check_growth: true,
            word_cap: None,
        }
    }
}

/// Decides `u ∈ M`.
pub trait Membership {
    fn contains(&self, u: &Word) -> bool;
}

impl Membership for Nfa {
    fn contains(&self, u: &Word) -> bool {
        self.accepts(u)
    }
}

impl<F: Fn(&Word) -> bool> Membership for F {
    fn contains(&self, u: &Word) -> bool {
        self(u)
    }
}

#[derive(Debug)]
pub enum TraceEvent<'a> {
    /// Start component of the word iterate `F^index(∅)`.
    Iterate { index: usize, start_component: &'a WordSet },
    /// Antichain sizes of the profile iterate, per variable.
    Antichain { index: usize, sizes: Vec<usize> },
}

/// The result of the Kleene loop.
#[derive(Clone, Debug)]
pub struct Stabilized {
    /// Stabilized iterate index.
    pub m: usize,
    /// `F^m(∅)` (or its pruned representative) over `grammar`'s variables.
    pub prev: LangVector,
    /// The grammar actually iterated (normalized when needed).
    pub grammar: Cfg,
    pub stats: Stats,
}

/// Grammar as seen by the fixpoint function.
pub(crate) fn prepare(g: &Cfg, right_monotonic_only: bool) -> Result<Cfg> {
    if g.is_right_regular() {
        return Ok(g.clone());
    }
    if right_monotonic_only {
        return Err(Error::input(
            "right-monotonic quasiorders require a right-regular grammar",
        ));
    }
    if g.is_cnf() {
        Ok(g.clone())
    } else {
        Ok(to_cnf(g))
    }
}

fn check_alphabets(g: &Cfg, a: &Nfa) -> Result<()> {
    if g.alphabet() != a.alphabet() {
        return Err(Error::input(format!(
            "grammar alphabet {:?} differs from automaton alphabet {:?}",
            g.alphabet().names(),
            a.alphabet().names()
        )));
    }
    Ok(())
}

/// Keeps the minimal elements of `items` under `leq`, returning their
/// indices in input order. Among `leq`-equivalent elements the one with the
/// least `rank` survives (first in input order on equal ranks).
pub fn prune_by<T, K: Ord>(
    items: &[T],
    mut leq: impl FnMut(&T, &T) -> bool,
    rank: impl Fn(&T) -> K,
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| rank(&items[i]));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if kept.iter().any(|&k| leq(&items[k], &items[i])) {
            continue;
        }
        kept.retain(|&k| !leq(&items[i], &items[k]));
        kept.push(i);
    }
    kept.sort_unstable();
    kept
}

/// Word-set pruning: drops every word above another retained word.
pub fn prune(set: &WordSet, q: &QuasiorderInstance) -> WordSet {
    let items: Vec<(Word, WordKey)> = set.iter().map(|w| (w.clone(), q.key(w))).collect();
    prune_by(&items, |x, y| q.key_leq(&x.1, &y.1), |x| x.0.clone())
        .into_iter()
        .map(|i| items[i].0.clone())
        .collect()
}

type Keyed = Vec<IndexMap<Word, WordKey>>;

struct WordLoop<'a> {
    q: &'a QuasiorderInstance,
    stats: Stats,
}

impl WordLoop<'_> {
    fn leq(&mut self, a: &WordKey, b: &WordKey) -> bool {
        self.stats.comparisons += 1;
        self.q.key_leq(a, b)
    }

    /// `xs ⊑ ys` componentwise.
    fn below(&mut self, xs: &Keyed, ys: &Keyed) -> bool {
        xs.iter().zip(ys).all(|(x, y)| {
            x.values()
                .all(|kx| y.values().any(|ky| self.leq(ky, kx)))
        })
    }

    fn prune(&mut self, v: &Keyed) -> Keyed {
        v.iter()
            .map(|comp| {
                let items: Vec<(&Word, &WordKey)> = comp.iter().collect();
                let kept = prune_by(
                    &items,
                    |x, y| {
                        self.stats.comparisons += 1;
                        self.q.key_leq(x.1, y.1)
                    },
                    |x| x.0.clone(),
                );
                self.stats.pruned += items.len() - kept.len();
                kept.into_iter()
                    .map(|i| (items[i].0.clone(), items[i].1.clone()))
                    .collect()
            })
            .collect()
    }
}

/// Runs `prev := cur; cur := F(prev)` until `cur ⊑ prev`.
pub fn kleene_until_stable(
    g: &Cfg,
    q: &QuasiorderInstance,
    prune_mode: PruneMode,
    opts: &EngineOptions,
) -> Result<Stabilized> {
    kleene_until_stable_traced(g, q, prune_mode, opts, &mut |_| {})
}

pub fn kleene_until_stable_traced(
    g: &Cfg,
    q: &QuasiorderInstance,
    prune_mode: PruneMode,
    opts: &EngineOptions,
    trace: &mut dyn FnMut(TraceEvent<'_>),
) -> Result<Stabilized> {
    check_alphabets(g, q.automaton())?;
    let grammar = prepare(g, q.kind().right_monotonic_only())?;
    let n = grammar.num_vars();
    let mut lp = WordLoop {
        q,
        stats: Stats::default(),
    };
    let mut cur: Keyed = vec![IndexMap::new(); n];
    loop {
        let prev = match prune_mode {
            PruneMode::None => cur,
            PruneMode::Antichain => lp.prune(&cur),
        };
        let words = LangVector(prev.iter().map(|c| c.keys().cloned().collect()).collect());
        let image = apply_products(&grammar, &words);
        lp.stats.f_applications += 1;
        lp.stats.words_generated += image.total_words();
        if let Some(cap) = opts.word_cap {
            if image.total_words() > cap {
                return Err(Error::Resource(format!(
                    "iterate {} holds more than {cap} words",
                    lp.stats.f_applications
                )));
            }
        }
        cur = image
            .0
            .into_iter()
            .map(|comp| comp.into_iter().map(|w| {
                let k = q.key(&w);
                (w, k)
            }).collect())
            .collect();

        if opts.check_growth {
            lp.stats.growth_checks += 1;
            if !lp.below(&prev, &cur) {
                return Err(Error::Invariant(format!(
                    "iterate {} is not below its successor",
                    lp.stats.f_applications - 1
                )));
            }
        }
        let start_comp: WordSet = cur[grammar.start()].keys().cloned().collect();
        trace(TraceEvent::Iterate {
            index: lp.stats.f_applications,
            start_component: &start_comp,
        });
        if lp.below(&cur, &prev) {
            let m = lp.stats.f_applications - 1;
            lp.stats.iterations = m;
            return Ok(Stabilized {
                m,
                prev: LangVector(prev.into_iter().map(|c| c.into_keys().collect()).collect()),
                grammar,
                stats: lp.stats,
            });
        }
        if lp.stats.f_applications >= opts.iteration_cap {
            return Err(Error::Resource(format!(
                "no stabilization after {} iterations",
                opts.iteration_cap
            )));
        }
    }
}

/// The word-based decision procedure with `M = L(a)`.
pub fn decide_inclusion_word(
    g: &Cfg,
    a: &Nfa,
    q: &QuasiorderInstance,
    prune_mode: PruneMode,
    opts: &EngineOptions,
) -> Result<Verdict> {
    check_alphabets(g, a)?;
    decide_inclusion_word_with(g, q, a, prune_mode, opts, &mut |_| {})
}

/// Word-based decision with an injected membership procedure for `M`. The
/// quasiorder must be suitable for the language `member` decides.
pub fn decide_inclusion_word_with(
    g: &Cfg,
    q: &QuasiorderInstance,
    member: &dyn Membership,
    prune_mode: PruneMode,
    opts: &EngineOptions,
    trace: &mut dyn FnMut(TraceEvent<'_>),
) -> Result<Verdict> {
    let st = kleene_until_stable_traced(g, q, prune_mode, opts, trace)?;
    let mut stats = st.stats;
    let mut candidates: Vec<&Word> = st.prev.component(st.grammar.start()).iter().collect();
    candidates.sort();
    for u in candidates {
        stats.membership_queries += 1;
        if !member.contains(u) {
            if !derives(g, u) || member.contains(u) {
                return Err(Error::Invariant(format!(
                    "counterexample {u:?} failed validation"
                )));
            }
            return Ok(Verdict {
                holds: false,
                counterexample: Some(u.clone()),
                counterexample_unavailable: false,
                stats,
            });
        }
    }
    Ok(Verdict {
        holds: true,
        counterexample: None,
        counterexample_unavailable: false,
        stats,
    })
}

/// Which profiles the antichain engine keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ProfileKind {
    /// Post-sets for right-regular grammars, contexts otherwise.
    #[default]
    Auto,
    Ctx,
    Post,
}

impl ProfileKind {
    pub fn from_order(kind: QuasiorderKind) -> Result<Self> {
        match kind {
            QuasiorderKind::StateCtx => Ok(ProfileKind::Ctx),
            QuasiorderKind::StatePost => Ok(ProfileKind::Post),
            k => Err(Error::input(format!(
                "the antichain engine needs a state-based order, not `{k}`"
            ))),
        }
    }
}

/// The antichain decision procedure with default profile selection.
pub fn decide_inclusion_antichain(g: &Cfg, a: &Nfa, opts: &EngineOptions) -> Result<Verdict> {
    decide_inclusion_antichain_with(g, a, ProfileKind::Auto, opts, &mut |_| {})
}

pub fn decide_inclusion_antichain_with(
    g: &Cfg,
    a: &Nfa,
    kind: ProfileKind,
    opts: &EngineOptions,
    trace: &mut dyn FnMut(TraceEvent<'_>),
) -> Result<Verdict> {
    check_alphabets(g, a)?;
    let use_post = match kind {
        ProfileKind::Auto => g.is_right_regular(),
        ProfileKind::Post => true,
        ProfileKind::Ctx => false,
    };
    let grammar = prepare(g, use_post)?;
    if use_post {
        let ops = PostOps::new(a);
        let out = antichain_loop(&grammar, &ops, None, opts, trace)?;
        finish_antichain(g, a, &ops, out)
    } else {
        let ops = CtxOps::new(a);
        let compose = |p: &_, q: &_| ops.compose(p, q);
        let out = antichain_loop(&grammar, &ops, Some(&compose), opts, trace)?;
        finish_antichain(g, a, &ops, out)
    }
}

/// A profile together with a shortest known word having it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntichainItem<P> {
    pub profile: P,
    pub witness: Word,
}

/// The stabilized antichain vector of the profile iteration.
#[derive(Clone, Debug)]
pub struct AntichainRun<P> {
    pub m: usize,
    pub start: usize,
    pub prev: Vec<Vec<AntichainItem<P>>>,
    pub stats: Stats,
}

type Compose<'c, P> = Option<&'c dyn Fn(&P, &P) -> P>;

struct ProfileLoop<'o, O: ProfileAlgebra> {
    ops: &'o O,
    stats: Stats,
}

impl<O: ProfileAlgebra> ProfileLoop<'_, O> {
    fn leq(&mut self, a: &O::Profile, b: &O::Profile) -> bool {
        self.stats.comparisons += 1;
        self.ops.leq(a, b)
    }

    fn below(
        &mut self,
        xs: &[Vec<AntichainItem<O::Profile>>],
        ys: &[Vec<AntichainItem<O::Profile>>],
    ) -> bool {
        xs.iter().zip(ys).all(|(x, y)| {
            x.iter()
                .all(|ix| y.iter().any(|iy| self.leq(&iy.profile, &ix.profile)))
        })
    }

    fn apply(
        &mut self,
        g: &Cfg,
        prev: &[Vec<AntichainItem<O::Profile>>],
        compose: Compose<'_, O::Profile>,
    ) -> Result<Vec<Vec<AntichainItem<O::Profile>>>> {
        let n = g.num_vars();
        // exact profile duplicates collapse here, keeping the least witness
        let mut candidates: Vec<IndexMap<O::Profile, Word>> = vec![IndexMap::new(); n];
        for p in g.productions() {
            let mut partial: Vec<(Option<O::Profile>, Word)> = vec![(None, Word::empty())];
            for s in &p.body {
                let mut next = Vec::new();
                match *s {
                    GSym::Term(a) => {
                        for (prof, w) in &partial {
                            let stepped = match prof {
                                None => self.ops.of_symbol(a),
                                Some(pp) => self.ops.step(pp, a),
                            };
                            next.push((Some(stepped), w.push(a)));
                        }
                    }
                    GSym::Var(v) => {
                        for (prof, w) in &partial {
                            for item in &prev[v] {
                                let combined = match prof {
                                    None => item.profile.clone(),
                                    Some(pp) => {
                                        let f = compose.ok_or_else(|| {
                                            Error::Invariant(
                                                "profile composition needed for a non-right-regular body".into(),
                                            )
                                        })?;
                                        f(pp, &item.profile)
                                    }
                                };
                                next.push((Some(combined), w.concat(&item.witness)));
                            }
                        }
                    }
                }
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for (prof, w) in partial {
                let prof = prof.unwrap_or_else(|| self.ops.unit());
                self.stats.words_generated += 1;
                let slot = candidates[p.head].entry(prof).or_insert_with(|| w.clone());
                if w < *slot {
                    *slot = w;
                }
            }
        }
        Ok(candidates
            .into_iter()
            .map(|comp| {
                let items: Vec<AntichainItem<O::Profile>> = comp
                    .into_iter()
                    .map(|(profile, witness)| AntichainItem { profile, witness })
                    .collect();
                let kept = prune_by(
                    &items,
                    |x, y| {
                        self.stats.comparisons += 1;
                        self.ops.leq(&x.profile, &y.profile)
                    },
                    |x| x.witness.clone(),
                );
                self.stats.pruned += items.len() - kept.len();
                let mut kept_items = Vec::with_capacity(kept.len());
                let mut items: Vec<Option<AntichainItem<O::Profile>>> = items.into_iter().map(Some).collect();
                for i in kept {
                    kept_items.push(items[i].take().expect("kept once"));
                }
                kept_items
            })
            .collect())
    }
}

/// Profile iteration until `cur ⊑ prev`. `compose` is required when some
/// body concatenates two variables.
pub fn antichain_loop<O: ProfileAlgebra>(
    g: &Cfg,
    ops: &O,
    compose: Compose<'_, O::Profile>,
    opts: &EngineOptions,
    trace: &mut dyn FnMut(TraceEvent<'_>),
) -> Result<AntichainRun<O::Profile>> {
    let mut lp = ProfileLoop {
        ops,
        stats: Stats::default(),
    };
    let mut cur: Vec<Vec<AntichainItem<O::Profile>>> = vec![Vec::new(); g.num_vars()];
    loop {
        let prev = cur;
        cur = lp.apply(g, &prev, compose)?;
        lp.stats.f_applications += 1;
        if opts.check_growth {
            lp.stats.growth_checks += 1;
            if !lp.below(&prev, &cur) {
                return Err(Error::Invariant(format!(
                    "profile iterate {} is not below its successor",
                    lp.stats.f_applications - 1
                )));
            }
        }
        trace(TraceEvent::Antichain {
            index: lp.stats.f_applications,
            sizes: cur.iter().map(|c| c.len()).collect(),
        });
        if lp.below(&cur, &prev) {
            let m = lp.stats.f_applications - 1;
            lp.stats.iterations = m;
            return Ok(AntichainRun {
                m,
                start: g.start(),
                prev,
                stats: lp.stats,
            });
        }
        if lp.stats.f_applications >= opts.iteration_cap {
            return Err(Error::Resource(format!(
                "no stabilization after {} iterations",
                opts.iteration_cap
            )));
        }
    }
}

fn finish_antichain<O: ProfileAlgebra>(
    g: &Cfg,
    a: &Nfa,
    ops: &O,
    run: AntichainRun<O::Profile>,
) -> Result<Verdict> {
    let mut stats = run.stats;
    let mut items: Vec<&AntichainItem<O::Profile>> = run.prev[run.start].iter().collect();
    items.sort_by(|x, y| x.witness.cmp(&y.witness));
    for item in &items {
        if ops.profile_of(&item.witness) != item.profile {
            return Err(Error::Invariant(format!(
                "stored profile of witness {:?} is stale",
                item.witness
            )));
        }
    }
    for item in items {
        stats.membership_queries += 1;
        if !ops.accepts(&item.profile) {
            let u = &item.witness;
            if !derives(g, u) || a.accepts(u) {
                return Err(Error::Invariant(format!(
                    "counterexample {u:?} failed validation"
                )));
            }
            return Ok(Verdict {
                holds: false,
                counterexample: Some(u.clone()),
                counterexample_unavailable: false,
                stats,
            });
        }
    }
    Ok(Verdict {
        holds: true,
        counterexample: None,
        counterexample_unavailable: false,
        stats,
    })
}

/// Runs the context-profile iteration and returns the stabilized antichains.
/// Mostly useful for inspection and tests.
pub fn ctx_antichains(g: &Cfg, a: &Nfa, opts: &EngineOptions) -> Result<AntichainRun<crate::automata::CtxProfile>> {
    check_alphabets(g, a)?;
    let grammar = prepare(g, false)?;
    let ops = CtxOps::new(a);
    let compose = |p: &_, q: &_| ops.compose(p, q);
    antichain_loop(&grammar, &ops, Some(&compose), opts, &mut |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::ctx_profile;

    const ASTAR_BSTAR: &str = "alphabet: a b\nstates: p q\ninitial: p\nfinal: p q\np a p\np b q\nq b q\n";
    const AB_STAR: &str = "alphabet: a b\nstates: s t\ninitial: s\nfinal: s\ns a t\nt b s\n";
    const ANBN: &str = "vars: X1 X2 X3 X4\nstart: X1\nX1 -> EPS\nX1 -> X2 X3\nX2 -> a\nX3 -> X1 X4\nX4 -> b\n";

    fn setup(aut: &str, gram: &str) -> (Nfa, Cfg) {
        let a = Nfa::parse(aut).unwrap();
        let g = Cfg::parse_with_alphabet(gram, a.alphabet()).unwrap();
        (a, g)
    }

    fn w(a: &Nfa, s: &str) -> Word {
        Word(s.chars().map(|c| a.alphabet().symbol(&c.to_string()).unwrap()).collect())
    }

    #[test]
    fn example_run_stops_after_four_iterates() {
        let (a, g) = setup(ASTAR_BSTAR, ANBN);
        let q = QuasiorderInstance::new(QuasiorderKind::StateCtx, &a).unwrap();
        let st = kleene_until_stable(&g, &q, PruneMode::None, &EngineOptions::default()).unwrap();
        assert_eq!(st.m, 4);
        assert_eq!(st.stats.f_applications, 5);
        let mut s1: Vec<Word> = st.prev.component(0).iter().cloned().collect();
        s1.sort();
        assert_eq!(s1, vec![w(&a, ""), w(&a, "ab")]);
    }

    #[test]
    fn myhill_stabilizes_no_later() {
        let (a, g) = setup(ASTAR_BSTAR, ANBN);
        let ctx = QuasiorderInstance::new(QuasiorderKind::StateCtx, &a).unwrap();
        let my = QuasiorderInstance::new(QuasiorderKind::Myhill, &a).unwrap();
        let o = EngineOptions::default();
        let m1 = kleene_until_stable(&g, &ctx, PruneMode::None, &o).unwrap();
        let m2 = kleene_until_stable(&g, &my, PruneMode::None, &o).unwrap();
        assert!(m2.m <= m1.m);
        assert_eq!(m2.m, 4);
        assert_eq!(m1.prev, m2.prev);
    }

    #[test]
    fn single_terminal_grammar() {
        let (a, g) = setup(ASTAR_BSTAR, "vars: X1\nX1 -> a\n");
        let q = QuasiorderInstance::new(QuasiorderKind::StateCtx, &a).unwrap();
        let st = kleene_until_stable(&g, &q, PruneMode::None, &EngineOptions::default()).unwrap();
        assert_eq!(st.m, 1);
        assert_eq!(st.prev.component(0).iter().cloned().collect::<Vec<_>>(), vec![w(&a, "a")]);
    }

    #[test]
    fn word_engine_verdicts() {
        let o = EngineOptions::default();
        let (a, g) = setup(ASTAR_BSTAR, ANBN);
        let q = QuasiorderInstance::new(QuasiorderKind::StateCtx, &a).unwrap();
        assert!(decide_inclusion_word(&g, &a, &q, PruneMode::None, &o).unwrap().holds);

        let (b, g) = setup(AB_STAR, ANBN);
        let q = QuasiorderInstance::new(QuasiorderKind::StateCtx, &b).unwrap();
        for mode in [PruneMode::None, PruneMode::Antichain] {
            let v = decide_inclusion_word(&g, &b, &q, mode, &o).unwrap();
            assert!(!v.holds);
            assert_eq!(v.counterexample, Some(w(&b, "aabb")));
        }

        let (a, g) = setup(ASTAR_BSTAR, "vars: X1 X2\nX2 -> a\n");
        let q = QuasiorderInstance::new(QuasiorderKind::StateCtx, &a).unwrap();
        let v = decide_inclusion_word(&g, &a, &q, PruneMode::None, &o).unwrap();
        assert!(v.holds);
        assert_eq!(v.stats.membership_queries, 0);
    }

    #[test]
    fn right_monotonic_orders_need_right_regular_grammars() {
        let (a, g) = setup(ASTAR_BSTAR, ANBN);
        for kind in [QuasiorderKind::StatePost, QuasiorderKind::Nerode] {
            let q = QuasiorderInstance::new(kind, &a).unwrap();
            let err = decide_inclusion_word(&g, &a, &q, PruneMode::None, &EngineOptions::default()).unwrap_err();
            assert!(matches!(err, Error::Input(_)));
        }
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let a = Nfa::parse(ASTAR_BSTAR).unwrap();
        let g = Cfg::parse("vars: X\nX -> c\n").unwrap();
        let q = QuasiorderInstance::new(QuasiorderKind::StateCtx, &a).unwrap();
        assert!(matches!(
            decide_inclusion_word(&g, &a, &q, PruneMode::None, &EngineOptions::default()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn iteration_cap_is_a_resource_error() {
        let (a, g) = setup(ASTAR_BSTAR, ANBN);
        let q = QuasiorderInstance::new(QuasiorderKind::StateCtx, &a).unwrap();
        let opts = EngineOptions { iteration_cap: 3, ..Default::default() };
        assert!(matches!(
            kleene_until_stable(&g, &q, PruneMode::None, &opts),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn prune_examples() {
        let a = Nfa::parse(ASTAR_BSTAR).unwrap();
        let q = QuasiorderInstance::new(QuasiorderKind::StateCtx, &a).unwrap();
        let set = |ws: &[&str]| ws.iter().map(|s| w(&a, s)).collect::<WordSet>();
        assert_eq!(prune(&set(&["ab", "aabb"]), &q), set(&["ab"]));
        assert_eq!(prune(&set(&["aabb", "ab"]), &q), set(&["ab"]));
        assert_eq!(prune(&set(&["", "b", "ab"]), &q), set(&["", "ab"]));
        let anti = set(&["a", "b"]);
        assert_eq!(prune(&anti, &q), anti);
    }

    #[test]
    fn antichain_engine_on_example() {
        let (a, g) = setup(ASTAR_BSTAR, ANBN);
        let o = EngineOptions::default();
        assert!(decide_inclusion_antichain(&g, &a, &o).unwrap().holds);
        let run = ctx_antichains(&g, &a, &o).unwrap();
        let mut profiles: Vec<_> = run.prev[0].iter().map(|i| i.profile.clone()).collect();
        profiles.sort();
        let mut expected = vec![
            ctx_profile(&a, &w(&a, "")).unwrap(),
            ctx_profile(&a, &w(&a, "ab")).unwrap(),
        ];
        expected.sort();
        assert_eq!(profiles, expected);

        let (b, g) = setup(AB_STAR, ANBN);
        let v = decide_inclusion_antichain(&g, &b, &o).unwrap();
        assert!(!v.holds);
        let u = v.counterexample.unwrap();
        assert!(derives(&g, &u) && !b.accepts(&u));
    }

    #[test]
    fn antichain_engine_with_post_profiles() {
        let a = Nfa::parse("alphabet: a\nstates: s\ninitial: s\nfinal: s\ns a s\n").unwrap();
        let g = Cfg::parse_with_alphabet("vars: X1\nX1 -> X1 a | EPS\n", a.alphabet()).unwrap();
        let v = decide_inclusion_antichain(&g, &a, &EngineOptions::default()).unwrap();
        assert!(v.holds);
        let mut sizes = Vec::new();
        decide_inclusion_antichain_with(&g, &a, ProfileKind::Post, &EngineOptions::default(), &mut |e| {
            if let TraceEvent::Antichain { sizes: s, .. } = e {
                sizes.push(s);
            }
        })
        .unwrap();
        assert!(sizes.iter().all(|s| s == &vec![1]));
    }

    #[test]
    fn prune_by_keeps_least_rank_among_equivalents() {
        let items = [3, 1, 2, 1];
        // all equivalent
        let kept = prune_by(&items, |_, _| true, |x| *x);
        assert_eq!(kept, vec![1]);
        // discrete order: nothing is pruned
        let kept = prune_by(&items, |x, y| std::ptr::eq(x, y), |x| *x);
        assert_eq!(kept, vec![0, 1, 2, 3]);
    }
}
