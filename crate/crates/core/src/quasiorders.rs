//! The four word quasiorders derived from an automaton for `M`.
//!
//! | kind        | `u ≲ v` iff                                            | monotonic |
//! |-------------|--------------------------------------------------------|-----------|
//! | `StateCtx`  | `ctx(u) ⊆ ctx(v)`                                      | both sides |
//! | `StatePost` | `post(u) ⊆ post(v)`                                    | right only |
//! | `Myhill`    | `w u w' ∈ M ⇒ w v w' ∈ M` for all `w, w'`              | both sides |
//! | `Nerode`    | `u w ∈ M ⇒ v w ∈ M` for all `w`                        | right only |
//!
//! Myhill and Nerode are decided on the determinized automaton using its
//! residual inclusion table, so they are meant for small automata.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use crate::automata::{
    ctx_accepts, ctx_profile_unchecked, determinize, residual_inclusion_table, CtxProfile, Dfa,
    Nfa, PostProfile, ResidualTable,
};
use crate::bits::BitSet;
use crate::foundations::{Quasiorder, Symbol, Word};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuasiorderKind {
    StateCtx,
    StatePost,
    Myhill,
    Nerode,
}

impl QuasiorderKind {
    pub const ALL: [QuasiorderKind; 4] = [
        QuasiorderKind::StateCtx,
        QuasiorderKind::StatePost,
        QuasiorderKind::Myhill,
        QuasiorderKind::Nerode,
    ];

    /// Only right-monotonic; admissible for right-regular grammars only.
    pub fn right_monotonic_only(self) -> bool {
        matches!(self, QuasiorderKind::StatePost | QuasiorderKind::Nerode)
    }

    pub fn is_state_based(self) -> bool {
        matches!(self, QuasiorderKind::StateCtx | QuasiorderKind::StatePost)
    }

    pub fn name(self) -> &'static str {
        match self {
            QuasiorderKind::StateCtx => "ctx",
            QuasiorderKind::StatePost => "post",
            QuasiorderKind::Myhill => "myhill",
            QuasiorderKind::Nerode => "nerode",
        }
    }
}

impl fmt::Display for QuasiorderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuasiorderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QuasiorderKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::input(format!("unknown quasiorder `{s}`")))
    }
}

/// What a word is reduced to before comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WordKey {
    Ctx(CtxProfile),
    Post(PostProfile),
    /// `s ↦ δ*(s, u)` over all DFA states.
    Transform(Vec<u32>),
    /// `δ*(q_I, u)` in the DFA.
    State(u32),
}

#[derive(Clone, Debug)]
struct DfaCache {
    dfa: Dfa,
    table: ResidualTable,
}

/// A quasiorder bound to a reference automaton. Immutable once built.
#[derive(Clone, Debug)]
pub struct QuasiorderInstance {
    kind: QuasiorderKind,
    nfa: Nfa,
    cache: Option<DfaCache>,
}

impl QuasiorderInstance {
    pub fn new(kind: QuasiorderKind, nfa: &Nfa) -> Result<Self> {
        let cache = match kind {
            QuasiorderKind::Myhill | QuasiorderKind::Nerode => {
                let dfa = determinize(nfa)?;
                let table = residual_inclusion_table(&dfa);
                Some(DfaCache { dfa, table })
            }
            _ => None,
        };
        Ok(QuasiorderInstance {
            kind,
            nfa: nfa.clone(),
            cache,
        })
    }

    pub fn kind(&self) -> QuasiorderKind {
        self.kind
    }

    pub fn automaton(&self) -> &Nfa {
        &self.nfa
    }

    pub fn dfa(&self) -> Option<&Dfa> {
        self.cache.as_ref().map(|c| &c.dfa)
    }

    pub fn residual_table(&self) -> Option<&ResidualTable> {
        self.cache.as_ref().map(|c| &c.table)
    }

    /// Reduces a word to its comparison key. Symbols must be in range.
    pub fn key(&self, u: &Word) -> WordKey {
        match self.kind {
            QuasiorderKind::StateCtx => WordKey::Ctx(ctx_profile_unchecked(&self.nfa, u)),
            QuasiorderKind::StatePost => {
                let start = BitSet::singleton(self.nfa.num_states(), self.nfa.initial());
                WordKey::Post(PostProfile(self.nfa.post_from(&start, u.symbols())))
            }
            QuasiorderKind::Myhill => {
                let dfa = &self.cache.as_ref().expect("dfa cache").dfa;
                let mut t: Vec<u32> = (0..dfa.num_states() as u32).collect();
                for &a in u.symbols() {
                    for s in t.iter_mut() {
                        *s = dfa.step(*s as usize, a) as u32;
                    }
                }
                WordKey::Transform(t)
            }
            QuasiorderKind::Nerode => {
                let dfa = &self.cache.as_ref().expect("dfa cache").dfa;
                WordKey::State(dfa.run_from(dfa.initial(), u.symbols()) as u32)
            }
        }
    }

    /// Compares two keys produced by [`QuasiorderInstance::key`].
    pub fn key_leq(&self, a: &WordKey, b: &WordKey) -> bool {
        match (a, b) {
            (WordKey::Ctx(x), WordKey::Ctx(y)) => x.is_subset(y),
            (WordKey::Post(x), WordKey::Post(y)) => x.is_subset(y),
            (WordKey::Transform(x), WordKey::Transform(y)) => {
                let table = &self.cache.as_ref().expect("dfa cache").table;
                x.iter()
                    .zip(y)
                    .all(|(&s, &t)| table.contains(s as usize, t as usize))
            }
            (WordKey::State(s), WordKey::State(t)) => self
                .cache
                .as_ref()
                .expect("dfa cache")
                .table
                .contains(*s as usize, *t as usize),
            _ => panic!("keys of different quasiorder kinds"),
        }
    }

    /// `u ≲ v`.
    pub fn compare(&self, u: &Word, v: &Word) -> Result<bool> {
        for w in [u, v] {
            if !self.nfa.alphabet().contains_word(w) {
                return Err(Error::input(format!(
                    "word {w:?} is not over the automaton's alphabet"
                )));
            }
        }
        Ok(self.leq(u, v))
    }
}

impl Quasiorder for QuasiorderInstance {
    fn alphabet_len(&self) -> usize {
        self.nfa.alphabet().len()
    }

    fn leq(&self, u: &Word, v: &Word) -> bool {
        self.key_leq(&self.key(u), &self.key(v))
    }
}

pub fn compare(q: &QuasiorderInstance, u: &Word, v: &Word) -> Result<bool> {
    q.compare(u, v)
}

/// Checks `u ∈ M ∧ u ≲ v ⇒ v ∈ M` on every sample pair.
pub fn is_m_preserving_sample<'a>(
    q: &QuasiorderInstance,
    samples: impl IntoIterator<Item = &'a (Word, Word)>,
) -> bool {
    let m = q.automaton();
    samples
        .into_iter()
        .all(|(u, v)| !m.accepts(u) || !q.leq(u, v) || m.accepts(v))
}

/// Operations on word profiles, enough to run the fixpoint iteration without
/// keeping the words themselves.
pub trait ProfileAlgebra {
    type Profile: Clone + Eq + Hash + fmt::Debug;

    /// Profile of ε.
    fn unit(&self) -> Self::Profile;

    fn of_symbol(&self, a: Symbol) -> Self::Profile;

    /// Profile of `w a` from the profile of `w`.
    fn step(&self, p: &Self::Profile, a: Symbol) -> Self::Profile;

    fn accepts(&self, p: &Self::Profile) -> bool;

    fn leq(&self, p: &Self::Profile, q: &Self::Profile) -> bool;

    fn profile_of(&self, u: &Word) -> Self::Profile {
        u.symbols().iter().fold(self.unit(), |p, &a| self.step(&p, a))
    }
}

/// Profiles that can be concatenated: the profile of `uv` is a function of
/// the profiles of `u` and `v`.
pub trait ComposableProfiles: ProfileAlgebra {
    fn compose(&self, p: &Self::Profile, q: &Self::Profile) -> Self::Profile;
}

#[derive(Clone, Copy, Debug)]
pub struct CtxOps<'a> {
    nfa: &'a Nfa,
}

impl<'a> CtxOps<'a> {
    pub fn new(nfa: &'a Nfa) -> Self {
        CtxOps { nfa }
    }
}

impl ProfileAlgebra for CtxOps<'_> {
    type Profile = CtxProfile;

    fn unit(&self) -> CtxProfile {
        CtxProfile::identity(self.nfa.num_states())
    }

    fn of_symbol(&self, a: Symbol) -> CtxProfile {
        CtxProfile(self.nfa.letter_relation(a).clone())
    }

    fn step(&self, p: &CtxProfile, a: Symbol) -> CtxProfile {
        CtxProfile(p.0.compose(self.nfa.letter_relation(a)))
    }

    fn accepts(&self, p: &CtxProfile) -> bool {
        ctx_accepts(self.nfa, p)
    }

    fn leq(&self, p: &CtxProfile, q: &CtxProfile) -> bool {
        p.is_subset(q)
    }

    fn profile_of(&self, u: &Word) -> CtxProfile {
        ctx_profile_unchecked(self.nfa, u)
    }
}

impl ComposableProfiles for CtxOps<'_> {
    fn compose(&self, p: &CtxProfile, q: &CtxProfile) -> CtxProfile {
        CtxProfile(p.0.compose(&q.0))
    }
}

/// Post-set profiles. Only extension by a single symbol is offered: the
/// post-set of `uv` is not determined by the post-sets of `u` and `v`.
#[derive(Clone, Copy, Debug)]
pub struct PostOps<'a> {
    nfa: &'a Nfa,
}

impl<'a> PostOps<'a> {
    pub fn new(nfa: &'a Nfa) -> Self {
        PostOps { nfa }
    }
}

impl ProfileAlgebra for PostOps<'_> {
    type Profile = PostProfile;

    fn unit(&self) -> PostProfile {
        PostProfile(BitSet::singleton(self.nfa.num_states(), self.nfa.initial()))
    }

    fn of_symbol(&self, a: Symbol) -> PostProfile {
        self.step(&self.unit(), a)
    }

    fn step(&self, p: &PostProfile, a: Symbol) -> PostProfile {
        PostProfile(self.nfa.step(&p.0, a))
    }

    fn accepts(&self, p: &PostProfile) -> bool {
        p.0.intersects(self.nfa.finals())
    }

    fn leq(&self, p: &PostProfile, q: &PostProfile) -> bool {
        p.is_subset(q)
    }
}

#[derive(Clone, Copy, Debug)]
pub enum ProfileOps<'a> {
    Ctx(CtxOps<'a>),
    Post(PostOps<'a>),
}

/// The profile algebra of a state-based quasiorder.
pub fn profile_ops(q: &QuasiorderInstance) -> Result<ProfileOps<'_>> {
    match q.kind {
        QuasiorderKind::StateCtx => Ok(ProfileOps::Ctx(CtxOps::new(&q.nfa))),
        QuasiorderKind::StatePost => Ok(ProfileOps::Post(PostOps::new(&q.nfa))),
        k => Err(Error::input(format!(
            "quasiorder `{k}` has no finite profile algebra"
        ))),
    }
}
