//! pre* saturation of an automaton by a grammar, and the polynomial-time
//! decision of straight-line-program inclusion built on it.
//!
//! Saturation adds a variable-labelled transition `q -X-> q'` whenever some
//! rule `X → β` has a `β`-path from `q` to `q'` in the current automaton. At
//! the fixpoint the automaton accepts every sentential form that derives a
//! word of the original language.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::automata::Nfa;
use crate::bits::BitMatrix;
use crate::engine::{Stats, Verdict};
use crate::foundations::Word;
use crate::grammar::{Cfg, GSym};
use crate::{Error, Result};

pub const DEFAULT_EXPANSION_CAP: u64 = 1_000_000;

/// The base automaton plus the variable transitions added by saturation.
#[derive(Clone, Debug)]
pub struct SaturatedAutomaton {
    base: Nfa,
    // by_var[X] holds (q, q') for every added q -X-> q'
    by_var: Vec<BitMatrix>,
}

impl SaturatedAutomaton {
    pub fn base(&self) -> &Nfa {
        &self.base
    }

    pub fn contains(&self, q: usize, var: usize, q2: usize) -> bool {
        self.by_var[var].contains(q, q2)
    }

    /// Added transitions as `(q, X, q')`, sorted.
    pub fn added(&self) -> BTreeSet<(usize, usize, usize)> {
        self.by_var
            .iter()
            .enumerate()
            .flat_map(|(v, m)| m.pairs().map(move |(q, q2)| (q, v, q2)))
            .collect()
    }

    pub fn num_added(&self) -> usize {
        self.by_var.iter().map(|m| m.count()).sum()
    }

    /// Whether the saturated automaton accepts a sentential form.
    pub fn accepts_sentential(&self, alpha: &[GSym]) -> bool {
        let n = self.base.num_states();
        let mut cur = crate::bits::BitSet::singleton(n, self.base.initial());
        for s in alpha {
            cur = match *s {
                GSym::Term(a) => self.base.step(&cur, a),
                GSym::Var(v) => {
                    let mut next = crate::bits::BitSet::new(n);
                    for q in cur.iter() {
                        for q2 in self.by_var[v].row_iter(q) {
                            next.insert(q2);
                        }
                    }
                    next
                }
            };
        }
        cur.intersects(self.base.finals())
    }
}

// A partial match of `body[..pos]` of production `prod` from `from` to `at`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Item {
    prod: u32,
    pos: u32,
    from: u32,
    at: u32,
}

/// Least fixpoint of the saturation rule, computed with a worklist of
/// partial rule matches. Each match waiting on a variable at some state is
/// indexed so that a new transition only wakes the matches it extends.
pub fn saturate(a: &Nfa, g: &Cfg) -> Result<SaturatedAutomaton> {
    if g.alphabet() != a.alphabet() {
        return Err(Error::input("grammar and automaton alphabets differ"));
    }
    let n = a.num_states();
    let prods = g.productions();
    let mut by_var = vec![BitMatrix::new(n); g.num_vars()];
    let mut seen: HashSet<Item> = HashSet::new();
    let mut waiting: HashMap<(usize, usize), Vec<Item>> = HashMap::new();
    let mut queue: VecDeque<Item> = VecDeque::new();

    let push = |item: Item, seen: &mut HashSet<Item>, queue: &mut VecDeque<Item>| {
        if seen.insert(item) {
            queue.push_back(item);
        }
    };

    for (pi, _) in prods.iter().enumerate() {
        for q in 0..n {
            let item = Item { prod: pi as u32, pos: 0, from: q as u32, at: q as u32 };
            push(item, &mut seen, &mut queue);
        }
    }

    let mut added_count = 0usize;
    while let Some(item) = queue.pop_front() {
        let p = &prods[item.prod as usize];
        let pos = item.pos as usize;
        if pos == p.body.len() {
            let (from, to) = (item.from as usize, item.at as usize);
            if by_var[p.head].insert(from, to) {
                added_count += 1;
                if let Some(ws) = waiting.get(&(p.head, from)) {
                    for w in ws.clone() {
                        let next = Item { pos: w.pos + 1, at: to as u32, ..w };
                        push(next, &mut seen, &mut queue);
                    }
                }
            }
            continue;
        }
        match p.body[pos] {
            GSym::Term(sym) => {
                for q2 in a.successors(item.at as usize, sym).iter() {
                    let next = Item { pos: item.pos + 1, at: q2 as u32, ..item };
                    push(next, &mut seen, &mut queue);
                }
            }
            GSym::Var(v) => {
                waiting.entry((v, item.at as usize)).or_default().push(item);
                let targets: Vec<usize> = by_var[v].row_iter(item.at as usize).collect();
                for q2 in targets {
                    let next = Item { pos: item.pos + 1, at: q2 as u32, ..item };
                    push(next, &mut seen, &mut queue);
                }
            }
        }
    }

    // transitions are only ever added
    debug_assert_eq!(added_count, by_var.iter().map(|m| m.count()).sum::<usize>());
    Ok(SaturatedAutomaton {
        base: a.clone(),
        by_var,
    })
}

/// Outcome of [`expand_slp`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expansion {
    Word(Word),
    /// The derived word is longer than the cap.
    Overflow { length: u64 },
    /// The start variable derives nothing.
    Empty,
}

/// Length of the word each variable of an SLP derives (`None` when it
/// derives nothing), saturating at `u64::MAX`.
pub fn slp_lengths(g: &Cfg) -> Result<Vec<Option<u64>>> {
    if !g.is_slp() {
        return Err(Error::input("grammar is not a straight-line program"));
    }
    let order = g.topological_order().expect("SLPs are acyclic");
    let mut len: Vec<Option<u64>> = vec![None; g.num_vars()];
    for v in order {
        if let Some(p) = g.productions_of(v).next() {
            let mut total = Some(0u64);
            for s in &p.body {
                total = match (total, *s) {
                    (Some(t), GSym::Term(_)) => Some(t.saturating_add(1)),
                    (Some(t), GSym::Var(x)) => len[x].map(|l| t.saturating_add(l)),
                    (None, _) => None,
                };
            }
            len[v] = total;
        }
    }
    Ok(len)
}

/// The unique word derived by an SLP, if its length is at most `cap`.
/// Lengths are computed first so oversized words are never built.
pub fn expand_slp(g: &Cfg, cap: u64) -> Result<Expansion> {
    let lengths = slp_lengths(g)?;
    let length = match lengths[g.start()] {
        None => return Ok(Expansion::Empty),
        Some(l) => l,
    };
    if length > cap {
        return Ok(Expansion::Overflow { length });
    }
    let mut out = Vec::with_capacity(length as usize);
    let mut stack = vec![GSym::Var(g.start())];
    while let Some(s) = stack.pop() {
        match s {
            GSym::Term(a) => out.push(a),
            GSym::Var(v) => {
                let p = g.productions_of(v).next().expect("non-empty variable has a rule");
                stack.extend(p.body.iter().rev().copied());
            }
        }
    }
    Ok(Expansion::Word(Word(out)))
}

/// `L(G) ⊆ L(A)` for a straight-line program `G`, decided on the saturated
/// automaton: the single derived word is accepted iff saturation adds a
/// transition `q_I -start-> f` with `f` final.
pub fn decide_slp_inclusion(g: &Cfg, a: &Nfa, expansion_cap: u64) -> Result<Verdict> {
    if !g.is_slp() {
        return Err(Error::input("grammar is not a straight-line program"));
    }
    let mut stats = Stats::default();
    if !g.generating().contains(g.start()) {
        return Ok(Verdict {
            holds: true,
            counterexample: None,
            counterexample_unavailable: false,
            stats,
        });
    }
    let sat = saturate(a, g)?;
    stats.words_generated = 1;
    stats.membership_queries = 1;
    let holds = sat.accepts_sentential(&[GSym::Var(g.start())]);
    if holds {
        return Ok(Verdict {
            holds: true,
            counterexample: None,
            counterexample_unavailable: false,
            stats,
        });
    }
    match expand_slp(g, expansion_cap)? {
        Expansion::Word(w) => {
            if a.accepts(&w) {
                return Err(Error::Invariant(format!(
                    "saturation rejected {w:?} but the automaton accepts it"
                )));
            }
            Ok(Verdict {
                holds: false,
                counterexample: Some(w),
                counterexample_unavailable: false,
                stats,
            })
        }
        Expansion::Overflow { .. } => Ok(Verdict {
            holds: false,
            counterexample: None,
            counterexample_unavailable: true,
            stats,
        }),
        Expansion::Empty => Err(Error::Invariant("generating start variable expands to nothing".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ASTAR_BSTAR: &str = "alphabet: a b\nstates: p q\ninitial: p\nfinal: p q\np a p\np b q\nq b q\n";

    fn setup(gram: &str) -> (Nfa, Cfg) {
        let a = Nfa::parse(ASTAR_BSTAR).unwrap();
        let g = Cfg::parse_with_alphabet(gram, a.alphabet()).unwrap();
        (a, g)
    }

    #[test]
    fn epsilon_rule_adds_loops() {
        let (a, g) = setup("vars: X\nX -> EPS\n");
        let s = saturate(&a, &g).unwrap();
        assert_eq!(s.added(), [(0, 0, 0), (1, 0, 1)].into_iter().collect());
    }

    #[test]
    fn no_productions_adds_nothing() {
        let (a, g) = setup("vars: X Y\n");
        assert!(saturate(&a, &g).unwrap().added().is_empty());
    }

    #[test]
    fn slp_verdicts() {
        let (a, g) = setup("vars: X1 X2\nX1 -> X2 X2\nX2 -> a b\n");
        let v = decide_slp_inclusion(&g, &a, 512).unwrap();
        assert!(!v.holds);
        assert_eq!(a.alphabet().render(v.counterexample.as_ref().unwrap()), "a b a b");

        let (a, g) = setup("vars: X1 X2 X3\nX1 -> X2 X3\nX2 -> a\nX3 -> b\n");
        assert!(decide_slp_inclusion(&g, &a, 512).unwrap().holds);

        let b = Nfa::parse("alphabet: a b\nstates: s\ninitial: s\nfinal:\ns a s\n").unwrap();
        let g = Cfg::parse_with_alphabet("vars: X\nX -> EPS\n", b.alphabet()).unwrap();
        let v = decide_slp_inclusion(&g, &b, 512).unwrap();
        assert!(!v.holds);
        assert_eq!(v.counterexample, Some(Word::empty()));

        let (a, g) = setup("vars: X1 X2\nX1 -> X2 a | b\n");
        assert!(matches!(decide_slp_inclusion(&g, &a, 512), Err(Error::Input(_))));

        let (a, g) = setup("vars: X1 X2\nX2 -> a\n");
        assert!(decide_slp_inclusion(&g, &a, 512).unwrap().holds);
    }

    fn doubling(depth: usize) -> String {
        let vars: Vec<String> = (1..=depth).map(|i| format!("X{i}")).collect();
        let mut s = format!("vars: {}\n", vars.join(" "));
        for i in 1..depth {
            s += &format!("X{i} -> X{} X{}\n", i + 1, i + 1);
        }
        s += &format!("X{depth} -> a\n");
        s
    }

    #[test]
    fn expansion() {
        let (_, g) = setup(&doubling(3));
        let a = Nfa::parse(ASTAR_BSTAR).unwrap();
        assert_eq!(expand_slp(&g, 100).unwrap(), Expansion::Word(a.alphabet().parse_word("a a a a").unwrap()));
        let (_, g) = setup(&doubling(40));
        assert_eq!(expand_slp(&g, 1_000_000).unwrap(), Expansion::Overflow { length: 1 << 39 });
        let (_, g) = setup("vars: X1\nX1 -> a\n");
        assert_eq!(expand_slp(&g, 1).unwrap(), Expansion::Word(a.alphabet().parse_word("a").unwrap()));
        let (_, g) = setup("vars: X1 X2\nX1 -> X2\n");
        assert_eq!(expand_slp(&g, 1).unwrap(), Expansion::Empty);
    }

    #[test]
    fn huge_slp_fails_without_materializing() {
        let a = Nfa::parse("alphabet: a b\nstates: s t\ninitial: s\nfinal: s\ns a t\nt a s\n").unwrap();
        let g = Cfg::parse_with_alphabet(&(doubling(40).replace("X40 -> a", "X40 -> a b")), a.alphabet()).unwrap();
        let v = decide_slp_inclusion(&g, &a, 1000).unwrap();
        assert!(!v.holds);
        assert!(v.counterexample.is_none() && v.counterexample_unavailable);
    }
}
