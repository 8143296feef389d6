//! Fixed-size bit sets and square bit matrices.
//!
//! These back the state sets and state-pair relations used for automaton
//! profiles. Both are plain values: `Eq`, `Hash` and `Ord` compare contents.

use std::fmt;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn singleton(len: usize, bit: usize) -> Self {
        let mut s = BitSet::new(len);
        s.insert(bit);
        s
    }

    pub fn from_iter_with_len(len: usize, bits: impl IntoIterator<Item = usize>) -> Self {
        let mut s = BitSet::new(len);
        for b in bits {
            s.insert(b);
        }
        s
    }

    /// Number of addressable bits.
    pub fn capacity(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, bit: usize) -> bool {
        assert!(bit < self.len, "bit {bit} out of range {}", self.len);
        let (w, m) = (bit / WORD, 1u64 << (bit % WORD));
        let fresh = self.words[w] & m == 0;
        self.words[w] |= m;
        fresh
    }

    pub fn remove(&mut self, bit: usize) -> bool {
        assert!(bit < self.len, "bit {bit} out of range {}", self.len);
        let (w, m) = (bit / WORD, 1u64 << (bit % WORD));
        let present = self.words[w] & m != 0;
        self.words[w] &= !m;
        present
    }

    #[inline]
    pub fn contains(&self, bit: usize) -> bool {
        bit < self.len && self.words[bit / WORD] & (1u64 << (bit % WORD)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * WORD + tz)
            })
        })
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// An `n × n` boolean matrix stored row-major, one bit per entry.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let stride = words_for(n);
        BitMatrix {
            n,
            stride,
            words: vec![0; stride * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::new(n);
        for i in 0..n {
            m.insert(i, i);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, row: usize, col: usize) -> bool {
        assert!(row < self.n && col < self.n);
        let w = row * self.stride + col / WORD;
        let m = 1u64 << (col % WORD);
        let fresh = self.words[w] & m == 0;
        self.words[w] |= m;
        fresh
    }

    pub fn remove(&mut self, row: usize, col: usize) -> bool {
        assert!(row < self.n && col < self.n);
        let w = row * self.stride + col / WORD;
        let m = 1u64 << (col % WORD);
        let present = self.words[w] & m != 0;
        self.words[w] &= !m;
        present
    }

    #[inline]
    pub fn contains(&self, row: usize, col: usize) -> bool {
        row < self.n
            && col < self.n
            && self.words[row * self.stride + col / WORD] & (1u64 << (col % WORD)) != 0
    }

    fn row_words(&self, row: usize) -> &[u64] {
        &self.words[row * self.stride..(row + 1) * self.stride]
    }

    pub fn row(&self, row: usize) -> BitSet {
        BitSet {
            len: self.n,
            words: self.row_words(row).to_vec(),
        }
    }

    pub fn row_iter(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.n;
        self.row_words(row)
            .iter()
            .enumerate()
            .flat_map(move |(i, &w)| {
                let mut rest = w;
                std::iter::from_fn(move || {
                    if rest == 0 {
                        return None;
                    }
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(i * WORD + tz)
                })
            })
            .filter(move |&c| c < n)
    }

    pub fn set_row(&mut self, row: usize, bits: &BitSet) {
        debug_assert_eq!(bits.len, self.n);
        let s = row * self.stride;
        self.words[s..s + self.stride].copy_from_slice(&bits.words);
    }

    /// Boolean product: `(i, k)` is set iff some `j` has `(i, j)` in `self`
    /// and `(j, k)` in `other`.
    pub fn compose(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = BitMatrix::new(self.n);
        for i in 0..self.n {
            let dst = i * self.stride;
            for j in self.row_iter(i) {
                let src = j * other.stride;
                for w in 0..self.stride {
                    out.words[dst + w] |= other.words[src + w];
                }
            }
        }
        out
    }

    pub fn is_subset(&self, other: &BitMatrix) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// All set entries in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |r| self.row_iter(r).map(move |c| (r, c)))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}
