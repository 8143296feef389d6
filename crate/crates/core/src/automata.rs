//! Finite automata, membership, context/post profiles, and the DFA machinery
//! behind the Myhill and Nerode quasiorders.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::bits::{BitMatrix, BitSet};
use crate::foundations::{Alphabet, Symbol, Word};
use crate::{Error, Result};

/// Upper bound on the number of subset states built by [`determinize`].
pub const MAX_DFA_STATES: usize = 1 << 20;

/// A nondeterministic finite automaton without ε-moves.
#[derive(Clone, Debug)]
pub struct Nfa {
    alphabet: Alphabet,
    state_names: Vec<String>,
    initial: usize,
    finals: BitSet,
    // succ[state * |Σ| + symbol]
    succ: Vec<BitSet>,
    // one transition relation per symbol
    letters: Vec<BitMatrix>,
}

impl Nfa {
    pub fn new(
        alphabet: Alphabet,
        state_names: Vec<String>,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, Symbol, usize)>,
    ) -> Result<Self> {
        let n = state_names.len();
        if n == 0 {
            return Err(Error::input("automaton needs at least one state"));
        }
        if initial >= n {
            return Err(Error::input(format!("initial state {initial} out of range")));
        }
        let mut fin = BitSet::new(n);
        for f in finals {
            if f >= n {
                return Err(Error::input(format!("final state {f} out of range")));
            }
            fin.insert(f);
        }
        let k = alphabet.len();
        let mut succ = vec![BitSet::new(n); n * k];
        let mut letters = vec![BitMatrix::new(n); k];
        for (p, a, q) in transitions {
            if p >= n || q >= n || a.index() >= k {
                return Err(Error::input(format!(
                    "transition ({p}, {}, {q}) out of range",
                    a.0
                )));
            }
            succ[p * k + a.index()].insert(q);
            letters[a.index()].insert(p, q);
        }
        Ok(Nfa {
            alphabet,
            state_names,
            initial,
            finals: fin,
            succ,
            letters,
        })
    }

    /// Parses the line-based automaton format:
    ///
    /// ```text
    /// alphabet: a b
    /// states: p q
    /// initial: p
    /// final: p q
    /// p a p
    /// p b q
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        parse_automaton(text)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.state_names[q]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> &BitSet {
        &self.finals
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(q)
    }

    pub fn successors(&self, q: usize, a: Symbol) -> &BitSet {
        &self.succ[q * self.alphabet.len() + a.index()]
    }

    /// The transition relation of a single symbol, i.e. `ctx(a)`.
    pub fn letter_relation(&self, a: Symbol) -> &BitMatrix {
        &self.letters[a.index()]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, Symbol, usize)> + '_ {
        let k = self.alphabet.len();
        (0..self.num_states()).flat_map(move |p| {
            (0..k).flat_map(move |a| {
                self.succ[p * k + a]
                    .iter()
                    .map(move |q| (p, Symbol(a as u32), q))
            })
        })
    }

    /// The same automaton over a larger alphabet that starts with this one.
    /// New symbols get no transitions.
    pub fn with_alphabet(&self, alphabet: &Alphabet) -> Result<Nfa> {
        if !alphabet.extends(&self.alphabet) {
            return Err(Error::input(
                "automaton alphabet is not a prefix of the requested alphabet",
            ));
        }
        Nfa::new(
            alphabet.clone(),
            self.state_names.clone(),
            self.initial,
            self.finals.iter(),
            self.transitions().collect::<Vec<_>>(),
        )
    }

    fn check_word(&self, u: &Word) -> Result<()> {
        if self.alphabet.contains_word(u) {
            Ok(())
        } else {
            Err(Error::input(format!(
                "word {u:?} is not over the automaton's alphabet"
            )))
        }
    }

    /// States reachable from `from` by reading `u`.
    pub fn post_from(&self, from: &BitSet, u: &[Symbol]) -> BitSet {
        let mut cur = from.clone();
        for &a in u {
            cur = self.step(&cur, a);
            if cur.is_empty() {
                break;
            }
        }
        cur
    }

    pub fn step(&self, from: &BitSet, a: Symbol) -> BitSet {
        let mut next = BitSet::new(self.num_states());
        for q in from.iter() {
            next.union_with(self.successors(q, a));
        }
        next
    }

    /// Membership without alphabet validation. Panics on out-of-range symbols.
    pub fn accepts(&self, u: &Word) -> bool {
        let start = BitSet::singleton(self.num_states(), self.initial);
        self.post_from(&start, u.symbols()).intersects(&self.finals)
    }

    /// Renders the automaton in the text format accepted by [`Nfa::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "alphabet: {}", self.alphabet.names().join(" "));
        let _ = writeln!(out, "states: {}", self.state_names.join(" "));
        let _ = writeln!(out, "initial: {}", self.state_names[self.initial]);
        let finals: Vec<&str> = self.finals.iter().map(|q| self.state_names[q].as_str()).collect();
        let _ = writeln!(out, "final: {}", finals.join(" "));
        for (p, a, q) in self.transitions() {
            let _ = writeln!(
                out,
                "{} {} {}",
                self.state_names[p],
                self.alphabet.name(a),
                self.state_names[q]
            );
        }
        out
    }
}

/// `ctx(u)`: the pairs `(q, q')` with a `u`-labelled path from `q` to `q'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CtxProfile(pub BitMatrix);

impl CtxProfile {
    pub fn identity(num_states: usize) -> Self {
        CtxProfile(BitMatrix::identity(num_states))
    }

    pub fn empty(num_states: usize) -> Self {
        CtxProfile(BitMatrix::new(num_states))
    }

    pub fn from_pairs(num_states: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = BitMatrix::new(num_states);
        for (p, q) in pairs {
            m.insert(p, q);
        }
        CtxProfile(m)
    }

    pub fn contains(&self, p: usize, q: usize) -> bool {
        self.0.contains(p, q)
    }

    pub fn is_subset(&self, other: &CtxProfile) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.0.pairs().collect()
    }

    pub fn num_states(&self) -> usize {
        self.0.dim()
    }
}

/// `post(u)`: the states reachable from the initial state by reading `u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PostProfile(pub BitSet);

impl PostProfile {
    pub fn is_subset(&self, other: &PostProfile) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn states(&self) -> Vec<usize> {
        self.0.iter().collect()
    }
}

pub fn run_membership(a: &Nfa, u: &Word) -> Result<bool> {
    a.check_word(u)?;
    Ok(a.accepts(u))
}

pub fn ctx_profile(a: &Nfa, u: &Word) -> Result<CtxProfile> {
    a.check_word(u)?;
    Ok(ctx_profile_unchecked(a, u))
}

pub(crate) fn ctx_profile_unchecked(a: &Nfa, u: &Word) -> CtxProfile {
    let n = a.num_states();
    let mut cur = BitMatrix::identity(n);
    for &s in u.symbols() {
        cur = cur.compose(a.letter_relation(s));
    }
    CtxProfile(cur)
}

/// Relational composition; `compose_ctx(ctx(u), ctx(v)) = ctx(uv)`.
pub fn compose_ctx(c1: &CtxProfile, c2: &CtxProfile) -> Result<CtxProfile> {
    if c1.num_states() != c2.num_states() {
        return Err(Error::input(format!(
            "profiles over different automata ({} vs {} states)",
            c1.num_states(),
            c2.num_states()
        )));
    }
    Ok(CtxProfile(c1.0.compose(&c2.0)))
}

/// `w ∈ L(A)` iff `ctx(w)` relates the initial state to a final state.
pub fn ctx_accepts(a: &Nfa, c: &CtxProfile) -> bool {
    c.num_states() == a.num_states()
        && c.0.row_iter(a.initial()).any(|q| a.is_final(q))
}

pub fn post_profile(a: &Nfa, u: &Word) -> Result<PostProfile> {
    a.check_word(u)?;
    let start = BitSet::singleton(a.num_states(), a.initial());
    Ok(PostProfile(a.post_from(&start, u.symbols())))
}

/// A complete deterministic automaton obtained by subset construction.
#[derive(Clone, Debug)]
pub struct Dfa {
    alphabet: Alphabet,
    initial: usize,
    finals: BitSet,
    // delta[state * |Σ| + symbol]
    delta: Vec<u32>,
    subsets: Vec<BitSet>,
}

impl Dfa {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.subsets.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, s: usize) -> bool {
        self.finals.contains(s)
    }

    #[inline]
    pub fn step(&self, s: usize, a: Symbol) -> usize {
        self.delta[s * self.alphabet.len() + a.index()] as usize
    }

    pub fn run_from(&self, s: usize, u: &[Symbol]) -> usize {
        u.iter().fold(s, |cur, &a| self.step(cur, a))
    }

    pub fn accepts(&self, u: &Word) -> bool {
        self.is_final(self.run_from(self.initial, u.symbols()))
    }

    /// The NFA state set a DFA state stands for.
    pub fn subset(&self, s: usize) -> &BitSet {
        &self.subsets[s]
    }

    /// The sink state (the empty subset), if it is reachable.
    pub fn sink(&self) -> Option<usize> {
        self.subsets.iter().position(|s| s.is_empty())
    }

    /// Builds a complete DFA directly from a transition table. Used by tests
    /// that need arbitrary DFAs; `subset` labels are singletons.
    pub fn from_table(alphabet: Alphabet, initial: usize, finals: &[usize], delta: Vec<u32>) -> Result<Dfa> {
        let k = alphabet.len();
        if k == 0 || !delta.len().is_multiple_of(k) {
            return Err(Error::input("transition table size is not a multiple of |Σ|"));
        }
        let n = delta.len() / k;
        if initial >= n || delta.iter().any(|&d| d as usize >= n) || finals.iter().any(|&f| f >= n) {
            return Err(Error::input("state out of range in DFA table"));
        }
        Ok(Dfa {
            alphabet,
            initial,
            finals: BitSet::from_iter_with_len(n, finals.iter().copied()),
            delta,
            subsets: (0..n).map(|s| BitSet::singleton(n, s)).collect(),
        })
    }
}

/// Subset construction restricted to reachable subsets. The empty subset
/// serves as the sink when it is reachable.
pub fn determinize(a: &Nfa) -> Result<Dfa> {
    determinize_with_cap(a, MAX_DFA_STATES)
}

pub fn determinize_with_cap(a: &Nfa, cap: usize) -> Result<Dfa> {
    let k = a.alphabet().len();
    let start = BitSet::singleton(a.num_states(), a.initial());
    let mut ids: HashMap<BitSet, u32> = HashMap::new();
    let mut subsets = vec![start.clone()];
    ids.insert(start, 0);
    let mut delta: Vec<u32> = Vec::new();
    let mut next = 0;
    while next < subsets.len() {
        let cur = subsets[next].clone();
        for a_ix in 0..k {
            let succ = a.step(&cur, Symbol(a_ix as u32));
            let id = match ids.get(&succ) {
                Some(&id) => id,
                None => {
                    if subsets.len() >= cap {
                        return Err(Error::Resource(format!(
                            "determinization exceeds {cap} subset states"
                        )));
                    }
                    let id = subsets.len() as u32;
                    ids.insert(succ.clone(), id);
                    subsets.push(succ);
                    id
                }
            };
            delta.push(id);
        }
        next += 1;
    }
    let n = subsets.len();
    let finals = BitSet::from_iter_with_len(
        n,
        subsets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.intersects(a.finals()))
            .map(|(i, _)| i),
    );
    Ok(Dfa {
        alphabet: a.alphabet().clone(),
        initial: 0,
        finals,
        delta,
        subsets,
    })
}

/// `(s, t)` is in the table iff every word accepted from `s` is accepted
/// from `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualTable(BitMatrix);

impl ResidualTable {
    #[inline]
    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.0.contains(s, t)
    }

    pub fn num_states(&self) -> usize {
        self.0.dim()
    }
}

/// Greatest relation contained in `final(s) ⇒ final(t)` that is closed under
/// taking successors on every symbol. Refined by propagating removals
/// backwards along the transitions.
pub fn residual_inclusion_table(d: &Dfa) -> ResidualTable {
    let n = d.num_states();
    let k = d.alphabet().len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n * k];
    for s in 0..n {
        for a in 0..k {
            let t = d.delta[s * k + a] as usize;
            preds[t * k + a].push(s);
        }
    }
    let mut rel = BitMatrix::new(n);
    let mut work = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if d.is_final(s) && !d.is_final(t) {
                work.push((s, t));
            } else {
                rel.insert(s, t);
            }
        }
    }
    while let Some((s, t)) = work.pop() {
        for a in 0..k {
            for &ps in &preds[s * k + a] {
                for &pt in &preds[t * k + a] {
                    if rel.remove(ps, pt) {
                        work.push((ps, pt));
                    }
                }
            }
        }
    }
    ResidualTable(rel)
}

fn parse_automaton(text: &str) -> Result<Nfa> {
    let mut alphabet: Option<Alphabet> = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<usize> = None;
    let mut finals: Option<Vec<usize>> = None;
    let mut transitions = Vec::new();
    let mut last_line = 0;

    let lookup_state = |states: &Option<Vec<String>>, name: &str, line: usize| -> Result<usize> {
        let states = states
            .as_ref()
            .ok_or_else(|| Error::parse(line, "`states:` must be declared first"))?;
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::parse(line, format!("unknown state `{name}`")))
    };

    for (ix, raw) in text.lines().enumerate() {
        let line = ix + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((key, rest)) = content.split_once(':') {
            let items: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(Error::parse(line, "duplicate `alphabet:`"));
                    }
                    alphabet = Some(Alphabet::new(items.iter().copied()).map_err(|e| Error::parse(line, e.to_string()))?);
                }
                "states" => {
                    if states.is_some() {
                        return Err(Error::parse(line, "duplicate `states:`"));
                    }
                    if items.is_empty() {
                        return Err(Error::parse(line, "no states declared"));
                    }
                    let mut seen = std::collections::HashSet::new();
                    for s in &items {
                        if !seen.insert(*s) {
                            return Err(Error::parse(line, format!("duplicate state `{s}`")));
                        }
                    }
                    states = Some(items.iter().map(|s| s.to_string()).collect());
                }
                "initial" => {
                    if initial.is_some() {
                        return Err(Error::parse(line, "duplicate `initial:`"));
                    }
                    if items.len() != 1 {
                        return Err(Error::parse(line, "exactly one initial state expected"));
                    }
                    initial = Some(lookup_state(&states, items[0], line)?);
                }
                "final" | "finals" => {
                    if finals.is_some() {
                        return Err(Error::parse(line, "duplicate `final:`"));
                    }
                    finals = Some(
                        items
                            .iter()
                            .map(|s| lookup_state(&states, s, line))
                            .collect::<Result<_>>()?,
                    );
                }
                other => return Err(Error::parse(line, format!("unknown header `{other}:`"))),
            }
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(line, "expected `state symbol state`"));
        }
        let alpha = alphabet
            .as_ref()
            .ok_or_else(|| Error::parse(line, "`alphabet:` must be declared first"))?;
        let p = lookup_state(&states, toks[0], line)?;
        let a = alpha
            .symbol(toks[1])
            .ok_or_else(|| Error::parse(line, format!("unknown symbol `{}`", toks[1])))?;
        let q = lookup_state(&states, toks[2], line)?;
        transitions.push((p, a, q));
    }

    let end = last_line.max(1);
    let alphabet = alphabet.ok_or_else(|| Error::parse(end, "missing `alphabet:`"))?;
    let states = states.ok_or_else(|| Error::parse(end, "missing `states:`"))?;
    let initial = initial.ok_or_else(|| Error::parse(end, "missing `initial:`"))?;
    Nfa::new(alphabet, states, initial, finals.unwrap_or_default(), transitions)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ASTAR_BSTAR: &str = "alphabet: a b\nstates: p q\ninitial: p\nfinal: p q\np a p\np b q\nq b q\n";

    fn astar_bstar() -> Nfa {
        Nfa::parse(ASTAR_BSTAR).unwrap()
    }

    fn w(a: &Nfa, s: &str) -> Word {
        Word(s.chars().map(|c| a.alphabet().symbol(&c.to_string()).unwrap()).collect())
    }

    fn ctx(a: &Nfa, s: &str) -> Vec<(&'static str, &'static str)> {
        let names = ["p", "q"];
        ctx_profile(a, &w(a, s))
            .unwrap()
            .pairs()
            .into_iter()
            .map(|(x, y)| (names[x], names[y]))
            .collect()
    }

    #[test]
    fn membership_on_astar_bstar() {
        let a = astar_bstar();
        assert!(run_membership(&a, &w(&a, "aabb")).unwrap());
        assert!(run_membership(&a, &w(&a, "")).unwrap());
        assert!(!run_membership(&a, &w(&a, "ba")).unwrap());
        assert!(run_membership(&a, &Word::from_indices([5])).is_err());
    }

    #[test]
    fn context_table() {
        let a = astar_bstar();
        assert_eq!(ctx(&a, ""), vec![("p", "p"), ("q", "q")]);
        assert_eq!(ctx(&a, "a"), vec![("p", "p")]);
        assert_eq!(ctx(&a, "b"), vec![("p", "q"), ("q", "q")]);
        for s in ["ab", "aab", "abbb", "aaabbb"] {
            assert_eq!(ctx(&a, s), vec![("p", "q")], "{s}");
        }
    }

    #[test]
    fn composition_and_acceptance() {
        let a = astar_bstar();
        let ca = ctx_profile(&a, &w(&a, "a")).unwrap();
        let cb = ctx_profile(&a, &w(&a, "b")).unwrap();
        let ab = compose_ctx(&ca, &cb).unwrap();
        assert_eq!(ab, ctx_profile(&a, &w(&a, "ab")).unwrap());
        assert_eq!(compose_ctx(&CtxProfile::identity(2), &cb).unwrap(), cb);
        let ba = compose_ctx(&cb, &ca).unwrap();
        assert!(ba.0.is_empty());
        assert!(ctx_accepts(&a, &ab));
        assert!(!ctx_accepts(&a, &ba));
        assert!(!ctx_accepts(&a, &CtxProfile::empty(2)));
        assert!(compose_ctx(&ab, &CtxProfile::identity(3)).is_err());
    }

    #[test]
    fn post_sets() {
        let a = astar_bstar();
        assert_eq!(post_profile(&a, &w(&a, "")).unwrap().states(), vec![0]);
        assert_eq!(post_profile(&a, &w(&a, "ab")).unwrap().states(), vec![1]);
        assert!(post_profile(&a, &w(&a, "ba")).unwrap().states().is_empty());
    }

    #[test]
    fn astar_bstar_determinizes_to_three_states() {
        let a = astar_bstar();
        let d = determinize(&a).unwrap();
        assert_eq!(d.num_states(), 3);
        let sink = d.sink().expect("sink");
        assert!(!d.is_final(sink));
        for s in d.alphabet().symbols() {
            assert_eq!(d.step(sink, s), sink);
        }
        let subsets: Vec<Vec<usize>> = (0..3).map(|s| d.subset(s).iter().collect()).collect();
        assert!(subsets.contains(&vec![0]) && subsets.contains(&vec![1]) && subsets.contains(&vec![]));
    }

    #[test]
    fn complete_dfa_is_preserved_and_unreachable_states_dropped() {
        // complete and deterministic: even number of a's
        let a = Nfa::parse("alphabet: a b\nstates: e o dead\ninitial: e\nfinal: e\ne a o\no a e\ne b e\no b o\ndead a dead\n").unwrap();
        let d = determinize(&a).unwrap();
        assert_eq!(d.num_states(), 2);
        assert!(d.sink().is_none());
    }

    #[test]
    fn determinize_cap() {
        let a = astar_bstar();
        assert!(matches!(determinize_with_cap(&a, 2), Err(Error::Resource(_))));
    }

    #[test]
    fn residual_table_on_astar_bstar() {
        let a = astar_bstar();
        let d = determinize(&a).unwrap();
        let t = residual_inclusion_table(&d);
        let id = |v: Vec<usize>| (0..3).find(|&s| d.subset(s).iter().collect::<Vec<_>>() == v).unwrap();
        let (p, q, sink) = (id(vec![0]), id(vec![1]), id(vec![]));
        for s in 0..3 {
            assert!(t.contains(s, s));
            assert!(t.contains(sink, s));
        }
        assert!(t.contains(q, p), "b* ⊆ a*b*");
        assert!(!t.contains(p, q), "a is accepted from p only");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Nfa::parse("alphabet: a\nstates: p\ninitial: p\np b p\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 4, message: "unknown symbol `b`".into() });
        let err = Nfa::parse("alphabet: a\nstates: p\ninitial: r\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(Nfa::parse("states: p\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let a = astar_bstar();
        let b = Nfa::parse(&a.to_text()).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }
}
