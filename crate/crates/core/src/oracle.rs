//! Brute-force reference implementations for cross-checking the engines.
//! Nothing here is on the production path, and nothing here is fast.

use std::collections::BTreeSet;

use crate::automata::{Dfa, Nfa};
use crate::bits::BitSet;
use crate::foundations::{Quasiorder, Symbol, Word};
use crate::grammar::{Cfg, GSym};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_len: usize,
    pub max_count: usize,
}

impl EnumerationBudget {
    pub fn new(max_len: usize, max_count: usize) -> Result<Self> {
        if max_count == 0 {
            return Err(Error::input("max_count must be positive"));
        }
        Ok(EnumerationBudget { max_len, max_count })
    }

    pub fn up_to(max_len: usize) -> Self {
        EnumerationBudget {
            max_len,
            max_count: usize::MAX,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    /// Sorted by length, then lexicographically.
    pub words: Vec<Word>,
    pub truncated: bool,
}

/// `L_X(G) ∩ Σ^{≤k}` for every variable `X`, as the least fixpoint of the
/// rules with every concatenation cut off at length `k`. Works on grammars
/// of any shape (ε-rules, unit rules, long bodies).
pub fn bounded_languages(g: &Cfg, max_len: usize) -> Vec<BTreeSet<Word>> {
    let mut langs: Vec<BTreeSet<Word>> = vec![BTreeSet::new(); g.num_vars()];
    loop {
        let mut changed = false;
        for p in g.productions() {
            for w in bounded_product(&langs, &p.body, max_len) {
                if langs[p.head].insert(w) {
                    changed = true;
                }
            }
        }
        if !changed {
            return langs;
        }
    }
}

fn bounded_product(langs: &[BTreeSet<Word>], body: &[GSym], max_len: usize) -> Vec<Word> {
    let mut partial = vec![Word::empty()];
    for s in body {
        let mut next = Vec::new();
        for w in &partial {
            match *s {
                GSym::Term(a) => {
                    if w.len() < max_len {
                        next.push(w.push(a));
                    }
                }
                GSym::Var(v) => {
                    for x in &langs[v] {
                        if w.len() + x.len() <= max_len {
                            next.push(w.concat(x));
                        }
                    }
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            break;
        }
    }
    partial
}

/// Words of `L(G)` up to `max_len`, at most `max_count` of them (the least
/// ones in word order).
pub fn enumerate_words(g: &Cfg, budget: EnumerationBudget) -> Enumeration {
    let mut langs = bounded_languages(g, budget.max_len);
    let all = std::mem::take(&mut langs[g.start()]);
    let truncated = all.len() > budget.max_count;
    Enumeration {
        words: all.into_iter().take(budget.max_count).collect(),
        truncated,
    }
}

/// Words derivable from the sentential form `alpha`, up to `max_len`.
pub fn sentential_words(g: &Cfg, alpha: &[GSym], max_len: usize) -> BTreeSet<Word> {
    let langs = bounded_languages(g, max_len);
    bounded_product(&langs, alpha, max_len).into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteVerdict {
    /// No counterexample up to the bound. Not a proof of inclusion.
    HoldsUpToBound,
    /// The least counterexample in word order.
    Fails(Word),
}

pub fn brute_inclusion(g: &Cfg, a: &Nfa, budget: EnumerationBudget) -> BruteVerdict {
    enumerate_words(g, budget)
        .words
        .into_iter()
        .find(|w| !a.accepts(w))
        .map_or(BruteVerdict::HoldsUpToBound, BruteVerdict::Fails)
}

/// All words over `k` symbols of length at most `max_len`, in word order.
pub fn words_up_to(k: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * k);
        for w in &layer {
            for a in 0..k {
                next.push(w.push(Symbol(a as u32)));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Saturation by repeatedly applying the rule to every production and
/// every source state until nothing changes.
pub fn naive_saturate(a: &Nfa, g: &Cfg) -> BTreeSet<(usize, usize, usize)> {
    let n = a.num_states();
    let mut added: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    loop {
        let mut changed = false;
        for p in g.productions() {
            for q in 0..n {
                let mut cur = BitSet::singleton(n, q);
                for s in &p.body {
                    let mut next = BitSet::new(n);
                    for r in cur.iter() {
                        match *s {
                            GSym::Term(sym) => next.union_with(a.successors(r, sym)),
                            GSym::Var(v) => {
                                for &(x, y, z) in &added {
                                    if x == r && y == v {
                                        next.insert(z);
                                    }
                                }
                            }
                        }
                    }
                    cur = next;
                }
                for r in cur.iter() {
                    if added.insert((q, p.head, r)) {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return added;
        }
    }
}

/// Residual inclusion `L(s) ⊆ L(t)` checked on all words up to `max_len`.
pub fn bounded_residual_inclusion(d: &Dfa, s: usize, t: usize, max_len: usize) -> bool {
    words_up_to(d.alphabet().len(), max_len).iter().all(|w| {
        !d.is_final(d.run_from(s, w.symbols())) || d.is_final(d.run_from(t, w.symbols()))
    })
}

/// Myhill order by enumeration: `w u w' ∈ M ⇒ w v w' ∈ M` for all
/// contexts with `|w|, |w'| ≤ ctx_len`.
pub fn myhill_bounded(m: &dyn Fn(&Word) -> bool, k: usize, u: &Word, v: &Word, ctx_len: usize) -> bool {
    let ctxs = words_up_to(k, ctx_len);
    ctxs.iter().all(|w| {
        ctxs.iter().all(|w2| {
            let wu = w.concat(u).concat(w2);
            !m(&wu) || m(&w.concat(v).concat(w2))
        })
    })
}

/// Nerode order by enumeration: `u w ∈ M ⇒ v w ∈ M` for `|w| ≤ ctx_len`.
pub fn nerode_bounded(m: &dyn Fn(&Word) -> bool, k: usize, u: &Word, v: &Word, ctx_len: usize) -> bool {
    words_up_to(k, ctx_len)
        .iter()
        .all(|w| !m(&u.concat(w)) || m(&v.concat(w)))
}

/// `↑X ∩ Σ^{≤k}` under `q`.
pub fn upward_closure_bounded<Q: Quasiorder>(xs: &[Word], q: &Q, max_len: usize) -> BTreeSet<Word> {
    words_up_to(q.alphabet_len(), max_len)
        .into_iter()
        .filter(|w| xs.iter().any(|x| q.leq(x, w)))
        .collect()
}
