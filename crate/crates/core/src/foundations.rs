//! Alphabets, words, and the lifting of word quasiorders to finite sets.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use indexmap::IndexSet;

use crate::{Error, Result};

/// An interned alphabet symbol: an index into its [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u32);

impl Symbol {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A non-empty ordered set of distinct symbol names.
///
/// Symbol order is declaration order; it is also the order used when words
/// are compared lexicographically.
#[derive(Clone, Debug)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Alphabet {}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet {
            names: Vec::new(),
            index: HashMap::new(),
        };
        for name in names {
            let name = name.into();
            if name.is_empty() {
                return Err(Error::input("empty symbol name"));
            }
            if alphabet.index.contains_key(&name) {
                return Err(Error::input(format!("duplicate symbol `{name}`")));
            }
            alphabet.push(name);
        }
        if alphabet.names.is_empty() {
            return Err(Error::input("alphabet must not be empty"));
        }
        Ok(alphabet)
    }

    fn push(&mut self, name: String) -> Symbol {
        let sym = Symbol(self.names.len() as u32);
        self.index.insert(name.clone(), sym);
        self.names.push(name);
        sym
    }

    /// Returns the symbol for `name`, appending it if it is new.
    pub(crate) fn intern(&mut self, name: &str) -> Symbol {
        match self.index.get(name) {
            Some(&s) => s,
            None => self.push(name.to_string()),
        }
    }

    pub(crate) fn empty_builder() -> Self {
        Alphabet {
            names: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn name(&self, sym: Symbol) -> &str {
        &self.names[sym.index()]
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len() as u32).map(Symbol)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// True when `self` lists the same symbols as `other`, in the same
    /// order, possibly followed by more.
    pub fn extends(&self, other: &Alphabet) -> bool {
        self.names.len() >= other.names.len() && self.names[..other.names.len()] == other.names[..]
    }

    pub fn contains_word(&self, word: &Word) -> bool {
        word.0.iter().all(|s| s.index() < self.names.len())
    }

    /// Parses whitespace-separated symbol names. An empty string or
    /// `(empty)` denotes ε.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == EMPTY_WORD {
            return Ok(Word::empty());
        }
        text.split_whitespace()
            .map(|tok| {
                self.symbol(tok)
                    .ok_or_else(|| Error::input(format!("unknown symbol `{tok}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Space-separated symbol names; ε renders as `(empty)`.
    pub fn render(&self, word: &Word) -> String {
        if word.is_empty() {
            return EMPTY_WORD.to_string();
        }
        word.0
            .iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub const EMPTY_WORD: &str = "(empty)";

/// A finite word over an alphabet, as a sequence of symbol indices.
///
/// Words are ordered by length first, then lexicographically by symbol
/// index. This is the order used for counterexamples and tie-breaking.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_indices(ix: impl IntoIterator<Item = u32>) -> Self {
        Word(ix.into_iter().map(Symbol).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, sym: Symbol) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(sym);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|s| s.0.to_string()).collect();
        write!(f, "w[{}]", parts.join(","))
    }
}

/// Deduplicated, insertion-ordered word set.
pub type WordSet = IndexSet<Word>;

/// A decidable quasiorder on words. `leq(u, v)` reads `u ≲ v`.
pub trait Quasiorder {
    /// Size of the alphabet the order is defined over.
    fn alphabet_len(&self) -> usize;

    fn leq(&self, u: &Word, v: &Word) -> bool;
}

fn check_words<'a>(q: &impl Quasiorder, words: impl IntoIterator<Item = &'a Word>) -> Result<()> {
    let k = q.alphabet_len();
    for w in words {
        if w.0.iter().any(|s| s.index() >= k) {
            return Err(Error::input(format!(
                "word {w:?} uses a symbol outside the quasiorder's alphabet"
            )));
        }
    }
    Ok(())
}

/// `X ⊑ Y`: every word of `X` is above some word of `Y`.
pub fn lift_compare<'a, X, Y, Q>(xs: X, ys: Y, q: &Q) -> Result<bool>
where
    X: IntoIterator<Item = &'a Word> + Clone,
    Y: IntoIterator<Item = &'a Word> + Clone,
    Q: Quasiorder,
{
    check_words(q, xs.clone())?;
    check_words(q, ys.clone())?;
    Ok(lift_leq(xs, ys, |y, x| q.leq(y, x)))
}

/// Componentwise [`lift_compare`] on equally long vectors of word sets.
pub fn lift_compare_vec<Q: Quasiorder>(xs: &[WordSet], ys: &[WordSet], q: &Q) -> Result<bool> {
    if xs.len() != ys.len() {
        return Err(Error::input(format!(
            "vector length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    for (x, y) in xs.iter().zip(ys) {
        if !lift_compare(x, y, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Unchecked set lifting over arbitrary elements; `below(y, x)` reads `y ≲ x`.
pub fn lift_leq<'a, T: 'a, X, Y>(xs: X, ys: Y, mut below: impl FnMut(&T, &T) -> bool) -> bool
where
    X: IntoIterator<Item = &'a T>,
    Y: IntoIterator<Item = &'a T> + Clone,
{
    xs.into_iter()
        .all(|x| ys.clone().into_iter().any(|y| below(y, x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Prefix order: `u ≲ v` iff `u` is a prefix of `v`.
    struct Prefix;

    impl Quasiorder for Prefix {
        fn alphabet_len(&self) -> usize {
            2
        }
        fn leq(&self, u: &Word, v: &Word) -> bool {
            v.0.starts_with(&u.0)
        }
    }

    fn w(ix: &[u32]) -> Word {
        Word::from_indices(ix.iter().copied())
    }

    #[test]
    fn alphabet_rejects_bad_declarations() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a", ""]).is_err());
        let a = Alphabet::new(["a", "bb"]).unwrap();
        assert_eq!(a.symbol("bb"), Some(Symbol(1)));
        assert_eq!(a.names(), &["a".to_string(), "bb".to_string()]);
    }

    #[test]
    fn word_order_is_length_then_lex() {
        let mut ws = vec![w(&[1, 0]), w(&[]), w(&[1]), w(&[0, 1]), w(&[0])];
        ws.sort();
        assert_eq!(ws, vec![w(&[]), w(&[0]), w(&[1]), w(&[0, 1]), w(&[1, 0])]);
    }

    #[test]
    fn parse_and_render_round_trip() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let u = a.parse_word("a a b").unwrap();
        assert_eq!(a.render(&u), "a a b");
        assert_eq!(a.render(&Word::empty()), "(empty)");
        assert_eq!(a.parse_word("(empty)").unwrap(), Word::empty());
        assert!(a.parse_word("a c").is_err());
    }

    #[test]
    fn lifting_basics() {
        let empty = WordSet::new();
        let ys: WordSet = [w(&[0])].into_iter().collect();
        assert!(lift_compare(&empty, &ys, &Prefix).unwrap());
        let xs: WordSet = [w(&[0, 1]), w(&[0])].into_iter().collect();
        assert!(lift_compare(&xs, &ys, &Prefix).unwrap());
        assert!(!lift_compare(&ys, &xs.iter().take(1).cloned().collect::<WordSet>(), &Prefix).unwrap());
        let bad: WordSet = [w(&[2])].into_iter().collect();
        assert!(lift_compare(&bad, &ys, &Prefix).is_err());
    }

    #[test]
    fn vector_lifting_checks_lengths() {
        let v1 = vec![WordSet::new(), WordSet::new()];
        let v2 = vec![WordSet::new()];
        assert!(lift_compare_vec(&v1, &v1, &Prefix).unwrap());
        assert!(lift_compare_vec(&v1, &v2, &Prefix).is_err());
    }
}
