//! Dense boolean relations on `0..n` stored as bit rows.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Indices `j` with `get(i, j)`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.n;
        self.row(i).iter().enumerate().flat_map(move |(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
            .filter(move |&j| j < n)
        })
    }

    /// Warshall closure over bit rows: O(n^3 / 64).
    pub fn transitive_closure(&mut self) {
        let words = self.words;
        for k in 0..self.n {
            let row_k: Vec<u64> = self.row(k).to_vec();
            for i in 0..self.n {
                if self.get(i, k) {
                    let base = i * words;
                    for (w, rk) in row_k.iter().enumerate() {
                        self.bits[base + w] |= rk;
                    }
                }
            }
        }
    }

    /// First `(i, j, k)` with `i R j`, `j R k` and not `i R k`.
    pub fn transitivity_witness(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.n {
            for j in self.successors(i) {
                let ri = self.row(i);
                let rj = self.row(j);
                for (w, (&a, &b)) in ri.iter().zip(rj).enumerate() {
                    let missing = b & !a;
                    if missing != 0 {
                        let k = w * 64 + missing.trailing_zeros() as usize;
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_a_path() {
        let mut m = BitMatrix::identity(70);
        for i in 0..69 {
            m.set(i, i + 1, true);
        }
        assert!(m.transitivity_witness().is_some());
        m.transitive_closure();
        assert!(m.get(0, 69));
        assert!(!m.get(69, 0));
        assert!(m.transitivity_witness().is_none());
        assert_eq!(m.successors(65).collect::<Vec<_>>(), vec![65, 66, 67, 68, 69]);
    }
}
