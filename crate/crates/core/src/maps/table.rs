use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cantor::{cells_meeting, is_complete_prefix_code, Partition, Word};
use crate::error::{Error, Result};

/// A map `f(p_i s) = q_i s` given by rules `(p_i, q_i)` whose domain prefixes
/// form a complete prefix code. Such maps are continuous; they are
/// homeomorphisms exactly when the image prefixes form a complete prefix
/// code as well.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Word, Word)>", into = "Vec<(Word, Word)>")]
pub struct PrefixTableMap {
    rules: Vec<(Word, Word)>,
    lookup: HashMap<Word, usize>,
    max_domain: usize,
}

impl TryFrom<Vec<(Word, Word)>> for PrefixTableMap {
    type Error = Error;

    fn try_from(rules: Vec<(Word, Word)>) -> Result<Self> {
        Self::new(rules)
    }
}

impl From<PrefixTableMap> for Vec<(Word, Word)> {
    fn from(map: PrefixTableMap) -> Self {
        map.rules
    }
}

impl PrefixTableMap {
    pub fn new(mut rules: Vec<(Word, Word)>) -> Result<Self> {
        rules.sort();
        let domains: Vec<Word> = rules.iter().map(|(p, _)| p.clone()).collect();
        if !is_complete_prefix_code(&domains) {
            return Err(Error::InvalidTable(
                "domain prefixes are not a complete prefix code".into(),
            ));
        }
        let lookup = domains
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let max_domain = domains.iter().map(Word::len).max().unwrap_or(0);
        Ok(Self {
            rules,
            lookup,
            max_domain,
        })
    }

    pub fn identity() -> Self {
        Self::new(vec![(Word::empty(), Word::empty())]).expect("identity table")
    }

    pub fn rules(&self) -> &[(Word, Word)] {
        &self.rules
    }

    pub fn is_homeomorphism(&self) -> bool {
        let images: Vec<Word> = self.rules.iter().map(|(_, q)| q.clone()).collect();
        is_complete_prefix_code(&images)
    }

    fn rule_for(&self, x: &Word) -> &(Word, Word) {
        let mut prefix = Word::empty();
        for i in 0..=self.max_domain {
            if let Some(&k) = self.lookup.get(&prefix) {
                return &self.rules[k];
            }
            prefix.push(x.bit(i));
        }
        unreachable!("domain prefixes cover every point")
    }

    /// Image of the point `x`, as a canonical (trailing-zero-free) word.
    pub fn apply(&self, x: &Word) -> Word {
        let (p, q) = self.rule_for(x);
        q.concat(&x.suffix(p.len())).to_point()
    }

    /// `f(a)` for the cylinder `a`, as a normalized union of cylinders.
    pub fn image_of_cylinder(&self, a: &Word) -> Vec<Word> {
        let parts = self
            .rules
            .iter()
            .filter_map(|(p, q)| {
                if p.is_prefix_of(a) {
                    Some(q.concat(&a.suffix(p.len())))
                } else if a.is_prefix_of(p) {
                    Some(q.clone())
                } else {
                    None
                }
            })
            .collect();
        normalize_cylinders(parts)
    }

    /// `f^{-1}(b)` for the cylinder `b`, as a normalized union of cylinders.
    pub fn preimage_of_cylinder(&self, b: &Word) -> Vec<Word> {
        let parts = self
            .rules
            .iter()
            .filter_map(|(p, q)| {
                if b.is_prefix_of(q) {
                    Some(p.clone())
                } else if q.is_prefix_of(b) {
                    Some(p.concat(&b.suffix(q.len())))
                } else {
                    None
                }
            })
            .collect();
        normalize_cylinders(parts)
    }

    pub fn image_of_set(&self, set: &[Word]) -> Vec<Word> {
        normalize_cylinders(set.iter().flat_map(|a| self.image_of_cylinder(a)).collect())
    }

    pub fn preimage_of_set(&self, set: &[Word]) -> Vec<Word> {
        normalize_cylinders(
            set.iter()
                .flat_map(|b| self.preimage_of_cylinder(b))
                .collect(),
        )
    }

    /// Cells of `partition` meeting `f(a)`.
    pub fn image_cells(&self, a: &Word, partition: &Partition) -> Vec<Word> {
        cells_meeting(&self.image_of_cylinder(a), partition)
    }

    /// Cells of `partition` meeting `f^{-1}(b)`; empty when `b` misses the range.
    pub fn preimage_cells(&self, b: &Word, partition: &Partition) -> Vec<Word> {
        cells_meeting(&self.preimage_of_cylinder(b), partition)
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &PrefixTableMap) -> PrefixTableMap {
        let mut rules = Vec::new();
        for (p, q) in &self.rules {
            for (p2, q2) in &then.rules {
                if p2.is_prefix_of(q) {
                    rules.push((p.clone(), q2.concat(&q.suffix(p2.len()))));
                } else if q.is_prefix_of(p2) {
                    rules.push((p.concat(&p2.suffix(q.len())), q2.clone()));
                }
            }
        }
        Self::new(merge_sibling_rules(rules)).expect("composition of complete tables")
    }

    /// `f^k` (`k = 0` gives the identity).
    pub fn power(&self, k: usize) -> PrefixTableMap {
        (0..k).fold(Self::identity(), |acc, _| acc.then(self))
    }

    pub fn invert(&self) -> Result<PrefixTableMap> {
        if !self.is_homeomorphism() {
            return Err(Error::NotInvertible(
                "image prefixes are not a complete prefix code".into(),
            ));
        }
        Self::new(
            self.rules
                .iter()
                .map(|(p, q)| (q.clone(), p.clone()))
                .collect(),
        )
    }
}

/// Repeatedly replaces sibling rules `(p0 -> r0), (p1 -> r1)` by `(p -> r)`.
fn merge_sibling_rules(mut rules: Vec<(Word, Word)>) -> Vec<(Word, Word)> {
    loop {
        rules.sort();
        rules.dedup();
        let index: HashMap<Word, Word> = rules.iter().cloned().collect();
        let mut merged = None;
        for (p, q) in &rules {
            if p.is_empty() || p.bits()[p.len() - 1] || q.is_empty() || q.bits()[q.len() - 1] {
                continue;
            }
            let parent = p.prefix(p.len() - 1);
            let image = q.prefix(q.len() - 1);
            if index.get(&parent.child(true)) == Some(&image.child(true)) {
                merged = Some((parent, image));
                break;
            }
        }
        match merged {
            Some((parent, image)) => {
                let zero = parent.child(false);
                let one = parent.child(true);
                rules.retain(|(p, _)| *p != zero && *p != one);
                rules.push((parent, image));
            }
            None => return rules,
        }
    }
}

/// Removes cylinders contained in others and merges complete sibling pairs,
/// giving a canonical representation of the union.
pub fn normalize_cylinders(mut set: Vec<Word>) -> Vec<Word> {
    loop {
        set.sort();
        set.dedup();
        // sorted order puts a prefix right before the words it covers
        let mut kept: Vec<Word> = Vec::with_capacity(set.len());
        for c in set {
            if kept.last().is_some_and(|k| k.is_prefix_of(&c)) {
                continue;
            }
            kept.push(c);
        }
        let mut changed = false;
        let mut out: Vec<Word> = Vec::with_capacity(kept.len());
        let mut i = 0;
        while i < kept.len() {
            let c = &kept[i];
            if i + 1 < kept.len() && !c.is_empty() {
                let n = c.len();
                let d = &kept[i + 1];
                if d.len() == n
                    && !c.bits()[n - 1]
                    && d.bits()[n - 1]
                    && c.prefix(n - 1) == d.prefix(n - 1)
                {
                    out.push(c.prefix(n - 1));
                    i += 2;
                    changed = true;
                    continue;
                }
            }
            out.push(c.clone());
            i += 1;
        }
        set = out;
        if !changed {
            return set;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::w;

    fn table(rules: &[(&str, &str)]) -> PrefixTableMap {
        PrefixTableMap::new(rules.iter().map(|(p, q)| (w(p), w(q))).collect()).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(PrefixTableMap::identity().apply(&w("011")), w("011"));
        let f = table(&[("0", "00"), ("1", "01")]);
        assert_eq!(f.apply(&w("1")), w("01"));
        assert_eq!(f.apply(&w("10")), w("01"));
        // as a point 010 is 01
        assert_eq!(f.apply(&w("10")), w("010").to_point());
        assert_eq!(f.apply(&w("11")), w("011"));
    }

    #[test]
    fn image_and_preimage_examples() {
        let id = PrefixTableMap::identity();
        let p2 = Partition::standard(2);
        assert_eq!(id.image_cells(&w("01"), &p2), vec![w("01")]);
        let f = table(&[("0", "00"), ("1", "01")]);
        assert_eq!(f.image_cells(&w("1"), &p2), vec![w("01")]);
        let g = table(&[("00", "0"), ("01", "10"), ("1", "11")]);
        assert_eq!(
            g.image_cells(&w("0"), &Partition::standard(1)),
            vec![w("0"), w("1")]
        );
        assert_eq!(id.preimage_cells(&w("10"), &p2), vec![w("10")]);
        assert!(f
            .preimage_cells(&w("1"), &Partition::standard(1))
            .is_empty());
        assert_eq!(
            f.preimage_cells(&w("0"), &Partition::standard(1)),
            vec![w("0"), w("1")]
        );
    }

    #[test]
    fn invalid_tables_rejected() {
        assert!(PrefixTableMap::new(vec![(w("0"), w("1"))]).is_err());
        assert!(
            PrefixTableMap::new(vec![(w("0"), w("1")), (w("1"), w("0")), (w("10"), w(""))])
                .is_err()
        );
    }

    #[test]
    fn invert_examples() {
        let swap = table(&[("0", "1"), ("1", "0")]);
        assert_eq!(swap.invert().unwrap(), swap);
        let g = table(&[("00", "0"), ("01", "10"), ("1", "11")]);
        assert_eq!(
            g.invert().unwrap(),
            table(&[("0", "00"), ("10", "01"), ("11", "1")])
        );
        let f = table(&[("0", "00"), ("1", "01")]);
        assert!(matches!(f.invert(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn composition_and_powers() {
        let swap = table(&[("0", "1"), ("1", "0")]);
        assert_eq!(swap.power(2), PrefixTableMap::identity());
        let g = table(&[("00", "0"), ("01", "10"), ("1", "11")]);
        let id = g.then(&g.invert().unwrap());
        assert_eq!(id, PrefixTableMap::identity());
        let f = table(&[("0", "00"), ("1", "000")]);
        let f3 = f.power(3);
        for x in ["", "1", "0110", "111"] {
            assert_eq!(f3.apply(&w(x)), f.apply(&f.apply(&f.apply(&w(x)))));
        }
    }

    #[test]
    fn normalize_merges_and_absorbs() {
        assert_eq!(
            normalize_cylinders(vec![w("00"), w("01"), w("1")]),
            vec![w("")]
        );
        assert_eq!(
            normalize_cylinders(vec![w("0"), w("01"), w("001")]),
            vec![w("0")]
        );
        assert_eq!(
            normalize_cylinders(vec![w("10"), w("0")]),
            vec![w("0"), w("10")]
        );
    }
}
