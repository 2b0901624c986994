//! Binary words, the Prouhet–Thue–Morse sequence and circular power-freeness.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("length must be at least 1")]
    EmptyWord,
    #[error("invalid symbol {0:?}; words are over {{0,1}}")]
    InvalidSymbol(char),
    #[error("Thue-Morse prefix of length {n} is a proper power ({word})")]
    NotPrimitive { n: usize, word: Word },
}

/// A finite word over `{0, 1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<u8>);

impl Word {
    /// Panics on symbols other than 0 and 1.
    pub fn from_bits(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "binary alphabet");
        Word(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The conjugate `yx` of `w = xy` with `|x| = k mod |w|`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut bits = self.0.clone();
        bits.rotate_left(k % self.0.len());
        Word(bits)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Smallest block length `p` with `w = u^(|w|/p)`.
    pub fn primitive_root_len(&self) -> usize {
        let n = self.len();
        (1..=n)
            .filter(|p| n.is_multiple_of(*p))
            .find(|&p| (p..n).all(|i| self.0[i] == self.0[i - p]))
            .unwrap_or(n)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(WordError::InvalidSymbol(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl TryFrom<String> for Word {
    type Error = WordError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> Self {
        w.to_string()
    }
}

/// The infinite repetition of `generator`; shifting rotates the generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicStream {
    generator: Word,
    least_period: usize,
}

impl PeriodicStream {
    pub fn new(generator: Word) -> Result<Self, WordError> {
        if generator.is_empty() {
            return Err(WordError::EmptyWord);
        }
        let least_period = generator.primitive_root_len();
        Ok(Self {
            generator,
            least_period,
        })
    }

    pub fn generator(&self) -> &Word {
        &self.generator
    }

    pub fn least_period(&self) -> usize {
        self.least_period
    }

    /// The shift map.
    pub fn shift(&self) -> Self {
        Self {
            generator: self.generator.rotate(1),
            least_period: self.least_period,
        }
    }

    /// Symbol at position `i` (0-based).
    pub fn symbol(&self, i: usize) -> u8 {
        self.generator.0[i % self.generator.len()]
    }
}

/// The first `n` symbols of the Thue–Morse sequence, obtained by iterating
/// `0 -> 01, 1 -> 10` from `0`.
pub fn ptm_prefix(n: usize) -> Result<Word, WordError> {
    if n == 0 {
        return Err(WordError::EmptyWord);
    }
    let mut bits = vec![0u8];
    while bits.len() < n {
        bits = bits.iter().flat_map(|&b| [b, 1 - b]).collect();
    }
    bits.truncate(n);
    Ok(Word(bits))
}

/// Whether `bits[start..]` begins with `k` copies of its first `block` symbols.
fn power_at(bits: &[u8], start: usize, block: usize, k: usize) -> bool {
    (block..k * block).all(|j| bits[start + j] == bits[start + j - block])
}

/// Where a `k`-th power `u^k` occurs: `|u| = block`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerOccurrence {
    pub start: usize,
    pub block: usize,
}

/// First `k`-th power factor, scanning block lengths then start positions.
pub fn find_power(w: &Word, k: usize) -> Option<PowerOccurrence> {
    assert!(k >= 2, "exponent must be at least 2");
    let n = w.len();
    (1..=n / k).find_map(|block| {
        (0..=n - k * block)
            .find(|&start| power_at(&w.0, start, block, k))
            .map(|start| PowerOccurrence { start, block })
    })
}

/// No factor of the form `u^k` with `u` nonempty.
pub fn is_k_power_free(w: &Word, k: usize) -> bool {
    find_power(w, k).is_none()
}

/// Length of the shortest prefix of `w` containing a `k`-th power, if any.
/// Every shorter prefix is `k`-power-free.
pub fn shortest_prefix_with_power(w: &Word, k: usize) -> Option<usize> {
    assert!(k >= 2, "exponent must be at least 2");
    let bits = &w.0;
    (1..=bits.len()).find(|&end| {
        (1..=end / k).any(|block| power_at(bits, end - k * block, block, k))
    })
}

/// All rotations of `w` in rotation order, duplicates included.
pub fn conjugates(w: &Word) -> Vec<Word> {
    (0..w.len()).map(|i| w.rotate(i)).collect()
}

/// `w` is not `u^j` for any `j >= 2`.
pub fn is_primitive(w: &Word) -> bool {
    w.primitive_root_len() == w.len()
}

/// No conjugate of `w` begins with `u^k` for a nonempty `u` with
/// `k |u| <= |w|`. Indices wrap around `w` instead of materializing conjugates.
pub fn circular_k_power_free(w: &Word, k: usize) -> bool {
    find_circular_power(w, k).is_none()
}

/// First conjugate (by rotation `start`) that begins with a `k`-th power.
pub fn find_circular_power(w: &Word, k: usize) -> Option<PowerOccurrence> {
    assert!(k >= 2, "exponent must be at least 2");
    let n = w.len();
    let bits = &w.0;
    (0..n).find_map(|start| {
        (1..=n / k)
            .find(|&block| (block..k * block).all(|j| bits[(start + j) % n] == bits[(start + j - block) % n]))
            .map(|block| PowerOccurrence { start, block })
    })
}

/// Streams generated by each `s_n = ptm_prefix(n)` together with their shifts,
/// grouped by `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamGroup {
    pub n: usize,
    pub streams: Vec<PeriodicStream>,
}

/// Builds the orbits of the periodic streams `s_n^*` for `n <= n_max`. A
/// prefix that is a proper power aborts the construction.
pub fn build_a(n_max: usize) -> Result<Vec<StreamGroup>, WordError> {
    if n_max == 0 {
        return Err(WordError::EmptyWord);
    }
    let t = ptm_prefix(n_max)?;
    (1..=n_max)
        .map(|n| {
            let s_n = Word(t.0[..n].to_vec());
            if !is_primitive(&s_n) {
                return Err(WordError::NotPrimitive { n, word: s_n });
            }
            let streams = conjugates(&s_n)
                .into_iter()
                .map(PeriodicStream::new)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(StreamGroup { n, streams })
        })
        .collect()
}
