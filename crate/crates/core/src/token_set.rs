//! Fixed-universe bitset of token ids.

use crate::net::TokenId;

const WORD: usize = 64;

/// A set of tokens drawn from a universe `0..capacity`.
///
/// The length is cached so `len()` is O(1); all binary operations require
/// both operands to share the same capacity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TokenSet {
    words: Vec<u64>,
    capacity: usize,
    len: usize,
}

impl TokenSet {
    pub fn new(capacity: usize) -> Self {
        TokenSet {
            words: vec![0; capacity.div_ceil(WORD)],
            capacity,
            len: 0,
        }
    }

    /// The set `{0, 1, .., count - 1}` inside a universe of `capacity`.
    pub fn prefix(capacity: usize, count: usize) -> Self {
        let mut set = TokenSet::new(capacity);
        for t in 0..count.min(capacity) {
            set.insert(TokenId(t as u32));
        }
        set
    }

    pub fn from_tokens(capacity: usize, tokens: impl IntoIterator<Item = TokenId>) -> Self {
        let mut set = TokenSet::new(capacity);
        for t in tokens {
            set.insert(t);
        }
        set
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, token: TokenId) -> bool {
        let i = token.index();
        i < self.capacity && self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    /// Inserts `token`, returning `true` if it was not already present.
    ///
    /// Panics if the token lies outside the universe.
    pub fn insert(&mut self, token: TokenId) -> bool {
        let i = token.index();
        assert!(i < self.capacity, "token {i} outside universe of {}", self.capacity);
        let mask = 1u64 << (i % WORD);
        let word = &mut self.words[i / WORD];
        if *word & mask == 0 {
            *word |= mask;
            self.len += 1;
            true
        } else {
            false
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = TokenId> + '_ {
        iter_bits(self.words.iter().copied())
    }

    pub fn is_superset(&self, other: &TokenSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| b & !a == 0)
    }

    /// Number of tokens in `self \ other`.
    pub fn difference_len(&self, other: &TokenSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    /// Number of tokens in `self ∩ other`.
    pub fn intersection_len(&self, other: &TokenSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Number of tokens in the symmetric difference.
    pub fn symmetric_difference_len(&self, other: &TokenSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn difference<'a>(&'a self, other: &'a TokenSet) -> impl Iterator<Item = TokenId> + 'a {
        iter_bits(self.words.iter().zip(&other.words).map(|(a, b)| a & !b))
    }

    pub fn intersection<'a>(&'a self, other: &'a TokenSet) -> impl Iterator<Item = TokenId> + 'a {
        iter_bits(self.words.iter().zip(&other.words).map(|(a, b)| a & b))
    }

    /// The `rank`-th smallest token of `self \ other`, if it exists.
    pub fn nth_in_difference(&self, other: &TokenSet, rank: usize) -> Option<TokenId> {
        nth_bit(self.words.iter().zip(&other.words).map(|(a, b)| a & !b), rank)
    }

    /// The `rank`-th smallest token of `self △ other`, if it exists.
    pub fn nth_in_symmetric_difference(&self, other: &TokenSet, rank: usize) -> Option<TokenId> {
        nth_bit(self.words.iter().zip(&other.words).map(|(a, b)| a ^ b), rank)
    }

    /// The `rank`-th smallest token of `self`, if it exists.
    pub fn nth(&self, rank: usize) -> Option<TokenId> {
        nth_bit(self.words.iter().copied(), rank)
    }

    pub fn union_with(&mut self, other: &TokenSet) {
        let mut len = 0;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
            len += a.count_ones() as usize;
        }
        self.len = len;
    }

    pub fn intersect_with(&mut self, other: &TokenSet) {
        let mut len = 0;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
            len += a.count_ones() as usize;
        }
        self.len = len;
    }
}

impl std::fmt::Debug for TokenSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter().map(|t| t.0)).finish()
    }
}

fn iter_bits(words: impl Iterator<Item = u64>) -> impl Iterator<Item = TokenId> {
    words.enumerate().flat_map(|(w, mut bits)| {
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(TokenId((w * WORD + b) as u32))
        })
    })
}

fn nth_bit(words: impl Iterator<Item = u64>, mut rank: usize) -> Option<TokenId> {
    for (w, mut bits) in words.enumerate() {
        let count = bits.count_ones() as usize;
        if rank >= count {
            rank -= count;
            continue;
        }
        for _ in 0..rank {
            bits &= bits - 1;
        }
        return Some(TokenId((w * WORD + bits.trailing_zeros() as usize) as u32));
    }
    None
}
