//! The Cantor space `{0,1}^N` with the metric `d(s, t) = 1/n`, `n` the first
//! coordinate (1-based) where `s` and `t` differ.
//!
//! A [`Word`] plays two roles. As a cylinder it is the clopen set of all
//! sequences extending it (the empty word is the whole space). As a point it
//! is the sequence `w 0 0 0 ...`; two words denote the same point iff they
//! agree after zero extension, and [`Word::to_point`] picks the canonical
//! representative with trailing zeros removed.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{zero, Rational};

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    bits: Vec<bool>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Coordinate `i` (0-based) of the zero-extended sequence.
    pub fn bit(&self, i: usize) -> bool {
        self.bits.get(i).copied().unwrap_or(false)
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn child(&self, bit: bool) -> Word {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Word { bits }
    }

    /// The suffix after the first `n` coordinates (empty when `n >= len`).
    pub fn suffix(&self, n: usize) -> Word {
        Word {
            bits: self.bits.get(n..).map(<[bool]>::to_vec).unwrap_or_default(),
        }
    }

    /// The first `n` coordinates of the zero-extended sequence.
    pub fn prefix(&self, n: usize) -> Word {
        Word {
            bits: (0..n).map(|i| self.bit(i)).collect(),
        }
    }

    /// Literal prefix test on words (cylinder containment `other ⊆ self`).
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.len() <= other.len() && other.bits[..self.len()] == self.bits[..]
    }

    /// Whether the point `x` (zero-extended) lies in the cylinder `self`.
    pub fn contains_point(&self, x: &Word) -> bool {
        self.bits.iter().enumerate().all(|(i, &b)| x.bit(i) == b)
    }

    /// Whether two cylinders intersect (one prefixes the other).
    pub fn meets(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Canonical point representative: trailing zeros stripped.
    pub fn to_point(&self) -> Word {
        let end = self.bits.iter().rposition(|&b| b).map_or(0, |i| i + 1);
        Word {
            bits: self.bits[..end].to_vec(),
        }
    }

    /// 1-based index of the first coordinate where the zero-extended
    /// sequences differ, or `None` when they are the same point.
    pub fn first_difference(&self, other: &Word) -> Option<usize> {
        let n = self.len().max(other.len());
        (0..n).find(|&i| self.bit(i) != other.bit(i)).map(|i| i + 1)
    }

    /// All words of length `n`, in lexicographic order.
    pub fn all_of_length(n: usize) -> Vec<Word> {
        (0..1u64 << n)
            .map(|k| Word {
                bits: (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect(),
            })
            .collect()
    }

    /// Diameter of the cylinder: `1/(len+1)`.
    pub fn diameter(&self) -> Rational {
        Rational::new(1, self.len() as i128 + 1)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("ε");
        }
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts a bit string; `""`, `"-"` and `"ε"` denote the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" || s == "ε" {
            return Ok(Word::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    line: 0,
                    message: format!("not a bit string: {s:?}"),
                }),
            })
            .collect::<Result<Vec<bool>>>()
            .map(Word::from_bits)
    }
}

/// Test and literal helper: `w("0110")`.
pub fn w(s: &str) -> Word {
    s.parse().expect("bit string")
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: String = self
            .bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        s.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

pub fn point_distance(u: &Word, v: &Word) -> Rational {
    match u.first_difference(v) {
        Some(n) => Rational::new(1, n as i128),
        None => zero(),
    }
}

/// The common distance between any point of `a` and any point of `b`, for
/// disjoint cylinders: `1/k` with `k` the first index where the prefixes
/// differ.
pub fn cell_distance(a: &Word, b: &Word) -> Result<Rational> {
    if a.meets(b) {
        return Err(Error::Precondition(format!(
            "cylinders {a} and {b} overlap; distance is not constant"
        )));
    }
    let k = (0..a.len().min(b.len()))
        .find(|&i| a.bits[i] != b.bits[i])
        .expect("disjoint cylinders differ within their common length");
    Ok(Rational::new(1, k as i128 + 1))
}

/// Whether `words` is a complete prefix code: every infinite sequence has
/// exactly one element of `words` as a prefix.
pub fn is_complete_prefix_code(words: &[Word]) -> bool {
    fn rec(words: &[&[bool]]) -> bool {
        if words.is_empty() {
            return false;
        }
        if words.iter().any(|w| w.is_empty()) {
            return words.len() == 1;
        }
        let zeros: Vec<&[bool]> = words.iter().filter(|w| !w[0]).map(|w| &w[1..]).collect();
        let ones: Vec<&[bool]> = words.iter().filter(|w| w[0]).map(|w| &w[1..]).collect();
        rec(&zeros) && rec(&ones)
    }
    let slices: Vec<&[bool]> = words.iter().map(|w| w.bits()).collect();
    rec(&slices)
}

/// A finite partition of the Cantor space into cylinders (a complete prefix
/// code), kept in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<Word>,
    index: HashMap<Word, usize>,
    max_len: usize,
}

impl Partition {
    pub fn from_cells(mut cells: Vec<Word>) -> Result<Self> {
        cells.sort();
        cells.dedup();
        if !is_complete_prefix_code(&cells) {
            return Err(Error::Parameter(
                "cells do not form a complete prefix code".into(),
            ));
        }
        let index = cells
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        let max_len = cells.iter().map(Word::len).max().unwrap_or(0);
        Ok(Self {
            cells,
            index,
            max_len,
        })
    }

    /// The `2^depth` cylinders of length `depth`.
    pub fn standard(depth: usize) -> Self {
        Self::from_cells(Word::all_of_length(depth)).expect("standard partition")
    }

    pub fn cells(&self) -> &[Word] {
        &self.cells
    }

    pub fn card(&self) -> usize {
        self.cells.len()
    }

    pub fn min_depth(&self) -> usize {
        self.cells.iter().map(Word::len).min().unwrap_or(0)
    }

    pub fn max_depth(&self) -> usize {
        self.max_len
    }

    pub fn index_of(&self, cell: &Word) -> Option<usize> {
        self.index.get(cell).copied()
    }

    /// Index of the cell containing the point `x`.
    pub fn locate(&self, x: &Word) -> usize {
        let mut prefix = Word::empty();
        for i in 0..=self.max_len {
            if let Some(&k) = self.index.get(&prefix) {
                return k;
            }
            prefix.push(x.bit(i));
        }
        unreachable!("a complete prefix code covers every point")
    }

    /// Maximum cell diameter.
    pub fn mesh(&self) -> Rational {
        Rational::new(1, self.min_depth() as i128 + 1)
    }

    /// Minimum distance between distinct cells (`1` for the trivial partition).
    pub fn separation(&self) -> Rational {
        // the longest common prefix over all pairs is attained by lexicographic neighbours
        self.cells
            .windows(2)
            .map(|p| cell_distance(&p[0], &p[1]).expect("cells are disjoint"))
            .min()
            .unwrap_or_else(crate::rational::one)
    }

    /// Every cell split into its two children.
    pub fn split_all(&self) -> Partition {
        Self::from_cells(
            self.cells
                .iter()
                .flat_map(|c| [c.child(false), c.child(true)])
                .collect(),
        )
        .expect("refinement of a partition")
    }

    /// Every cell of `self` is properly contained in a cell of `coarse`.
    pub fn strongly_refines(&self, coarse: &Partition) -> bool {
        self.cells.iter().all(|c| {
            coarse
                .cells
                .iter()
                .any(|a| a.is_prefix_of(c) && a.len() < c.len())
        })
    }

    /// Index of the cell of `self` containing the cylinder `c`, if any.
    pub fn cell_containing(&self, c: &Word) -> Option<usize> {
        (0..=c.len()).find_map(|n| self.index.get(&c.prefix(n)).copied())
    }
}

/// `(mesh, delta)` of a partition.
pub fn partition_stats(partition: &Partition) -> (Rational, Rational) {
    (partition.mesh(), partition.separation())
}

/// The cells of `partition` meeting the union of the cylinders in `set`.
pub fn cells_meeting(set: &[Word], partition: &Partition) -> Vec<Word> {
    partition
        .cells()
        .iter()
        .filter(|cell| set.iter().any(|c| c.meets(cell)))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn point_distance_examples() {
        assert_eq!(point_distance(&w(""), &w("")), zero());
        assert_eq!(point_distance(&w("0"), &w("1")), rat(1, 1));
        assert_eq!(point_distance(&w("000"), &w("010")), rat(1, 2));
        // zero tails are implicit
        assert_eq!(point_distance(&w("0"), &w("000")), zero());
        assert_eq!(w("0100").to_point(), w("01"));
    }

    #[test]
    fn cell_distance_examples() {
        assert_eq!(cell_distance(&w("0"), &w("1")).unwrap(), rat(1, 1));
        assert_eq!(cell_distance(&w("00"), &w("01")).unwrap(), rat(1, 2));
        assert_eq!(cell_distance(&w("01"), &w("11")).unwrap(), rat(1, 1));
        assert!(cell_distance(&w("01"), &w("01")).is_err());
    }

    #[test]
    fn stats_examples() {
        assert_eq!(
            partition_stats(&Partition::standard(1)),
            (rat(1, 2), rat(1, 1))
        );
        assert_eq!(
            partition_stats(&Partition::standard(2)),
            (rat(1, 3), rat(1, 2))
        );
        assert_eq!(
            partition_stats(&Partition::standard(5)),
            (rat(1, 6), rat(1, 5))
        );
    }

    #[test]
    fn cells_meeting_examples() {
        assert_eq!(
            cells_meeting(&[w("00")], &Partition::standard(1)),
            vec![w("0")]
        );
        assert_eq!(
            cells_meeting(&[w("0")], &Partition::standard(2)),
            vec![w("00"), w("01")]
        );
        assert_eq!(
            cells_meeting(&[w("01"), w("10")], &Partition::standard(2)),
            vec![w("01"), w("10")]
        );
    }

    #[test]
    fn prefix_code_validation() {
        assert!(is_complete_prefix_code(&[w("")]));
        assert!(is_complete_prefix_code(&[w("0"), w("10"), w("11")]));
        assert!(!is_complete_prefix_code(&[w("0"), w("10")]));
        assert!(!is_complete_prefix_code(&[w("0"), w("01"), w("1")]));
        assert!(!is_complete_prefix_code(&[]));
        assert!(Partition::from_cells(vec![w("0"), w("1"), w("10")]).is_err());
    }

    #[test]
    fn uneven_partition_stats() {
        let p = Partition::from_cells(vec![w("0"), w("10"), w("11")]).unwrap();
        assert_eq!(p.mesh(), rat(1, 2));
        assert_eq!(p.separation(), rat(1, 2));
        assert_eq!(p.locate(&w("1")), 1);
        assert_eq!(p.locate(&w("111")), 2);
        assert_eq!(p.locate(&w("")), 0);
        assert!(p.split_all().strongly_refines(&p));
        assert!(!p.strongly_refines(&p));
    }
}
