//! Words of bounded length with partial concatenation.
//!
//! The free monoid on `k` letters, cut off at length `L`: elements are all
//! words of length at most `L`, and `u * v` is defined only when the
//! concatenation still fits. This is the carrier used by the unary-algebra
//! module, where definedness (rather than a total product) is the point.

use crate::budget::Budget;
use crate::error::{Error, Result};

/// All words of length at most `max_len` over the alphabet `{0, .., k-1}`,
/// ordered by length and then lexicographically, so the empty word has
/// index 0 and the single letters come right after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedFreeMonoid {
    alphabet: usize,
    max_len: usize,
    words: Vec<Vec<u8>>,
}

impl TruncatedFreeMonoid {
    pub fn new(alphabet: usize, max_len: usize, budget: &Budget) -> Result<Self> {
        if alphabet == 0 || alphabet > 255 {
            return Err(Error::InvalidInput(format!(
                "alphabet size {alphabet} not in 1..=255"
            )));
        }
        let mut count: usize = 0;
        let mut layer: usize = 1;
        for _ in 0..=max_len {
            count = count.checked_add(layer).ok_or(Error::TooLarge {
                what: "word count",
                size: usize::MAX,
                limit: budget.max_elements,
            })?;
            budget.check_size("word count", count, budget.max_elements)?;
            layer = layer.checked_mul(alphabet).ok_or(Error::TooLarge {
                what: "word count",
                size: usize::MAX,
                limit: budget.max_elements,
            })?;
        }
        let mut words = vec![Vec::new()];
        let mut start = 0;
        for _ in 0..max_len {
            let end = words.len();
            for i in start..end {
                let stem = words[i].clone();
                for a in 0..alphabet {
                    let mut w = stem.clone();
                    w.push(a as u8);
                    words.push(w);
                }
            }
            start = end;
        }
        Ok(TruncatedFreeMonoid {
            alphabet,
            max_len,
            words,
        })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Number of words, i.e. (k^(L+1) - 1) / (k - 1) for alphabet size k > 1.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The empty word.
    pub fn one(&self) -> usize {
        0
    }

    /// Index of the single-letter word `a`.
    pub fn letter(&self, a: usize) -> usize {
        assert!(a < self.alphabet, "letter out of range");
        1 + a
    }

    pub fn word(&self, idx: usize) -> &[u8] {
        &self.words[idx]
    }

    /// Index of a word, computed arithmetically from the length-then-lex
    /// ordering. Returns `None` if the word is too long or uses letters
    /// outside the alphabet.
    pub fn index_of(&self, word: &[u8]) -> Option<usize> {
        if word.len() > self.max_len || word.iter().any(|&a| a as usize >= self.alphabet) {
            return None;
        }
        let k = self.alphabet;
        // Words shorter than `word` come first: 1 + k + .. + k^(len-1).
        let mut shorter = 0;
        let mut layer = 1;
        for _ in 0..word.len() {
            shorter += layer;
            layer *= k;
        }
        let value = word.iter().fold(0, |acc, &a| acc * k + a as usize);
        Some(shorter + value)
    }

    /// Concatenation, defined only when the result still fits under the
    /// length bound.
    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        let u = &self.words[i];
        let v = &self.words[j];
        if u.len() + v.len() > self.max_len {
            return None;
        }
        let mut w = Vec::with_capacity(u.len() + v.len());
        w.extend_from_slice(u);
        w.extend_from_slice(v);
        self.index_of(&w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_counts() {
        let budget = Budget::default();
        assert_eq!(TruncatedFreeMonoid::new(1, 3, &budget).unwrap().len(), 4);
        assert_eq!(TruncatedFreeMonoid::new(2, 3, &budget).unwrap().len(), 15);
        assert_eq!(TruncatedFreeMonoid::new(3, 2, &budget).unwrap().len(), 13);
        assert_eq!(TruncatedFreeMonoid::new(2, 0, &budget).unwrap().len(), 1);
    }

    #[test]
    fn ordering_and_index_agree() {
        let budget = Budget::default();
        let t = TruncatedFreeMonoid::new(3, 3, &budget).unwrap();
        for i in 0..t.len() {
            assert_eq!(t.index_of(t.word(i)).unwrap(), i);
        }
        // Length-then-lex: empty word, then letters in order.
        assert_eq!(t.word(0), &[] as &[u8]);
        assert_eq!(t.word(t.letter(0)), &[0]);
        assert_eq!(t.word(t.letter(2)), &[2]);
        assert!(t.index_of(&[0, 0, 0, 0]).is_none());
    }

    #[test]
    fn product_is_concatenation_when_defined() {
        let budget = Budget::default();
        let t = TruncatedFreeMonoid::new(2, 3, &budget).unwrap();
        let ab = t.index_of(&[0, 1]).unwrap();
        let a = t.letter(0);
        assert_eq!(t.product(a, t.letter(1)), Some(ab));
        assert_eq!(t.product(ab, a), t.index_of(&[0, 1, 0]));
        // Too long to fit.
        assert_eq!(t.product(ab, ab), None);
        // The empty word is a two-sided identity wherever defined.
        for i in 0..t.len() {
            assert_eq!(t.product(t.one(), i), Some(i));
            assert_eq!(t.product(i, t.one()), Some(i));
        }
    }

    #[test]
    fn partial_associativity() {
        let budget = Budget::default();
        let t = TruncatedFreeMonoid::new(2, 3, &budget).unwrap();
        // When both bracketings are defined they agree.
        for i in 0..t.len() {
            for j in 0..t.len() {
                for k in 0..t.len() {
                    let left = t.product(i, j).and_then(|ij| t.product(ij, k));
                    let right = t.product(j, k).and_then(|jk| t.product(i, jk));
                    if let (Some(l), Some(r)) = (left, right) {
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn budget_limits_word_count() {
        let budget = Budget {
            max_elements: 10,
            ..Budget::default()
        };
        assert!(matches!(
            TruncatedFreeMonoid::new(2, 4, &budget),
            Err(Error::TooLarge { .. })
        ));
    }
}
