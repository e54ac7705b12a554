use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cantor::{Partition, Word};
use crate::error::{Error, Result};
use crate::maps::PrefixTableMap;
use crate::rational::{self, Rational};

/// A probability measure with finitely many atoms at eventually-zero points.
///
/// Atoms are kept sorted by point, with distinct canonical points and
/// strictly positive masses summing to one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicMeasure {
    atoms: Vec<(Word, Rational)>,
}

impl AtomicMeasure {
    pub fn new(atoms: impl IntoIterator<Item = (Word, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<Word, Rational> = BTreeMap::new();
        for (point, mass) in atoms {
            if mass < Rational::zero() {
                return Err(Error::InvalidMeasure(format!(
                    "negative mass {mass} at {point}"
                )));
            }
            *merged
                .entry(point.to_point())
                .or_insert_with(Rational::zero) += mass;
        }
        let atoms: Vec<(Word, Rational)> =
            merged.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        let total: Rational = atoms.iter().map(|(_, m)| *m).sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(Self { atoms })
    }

    /// Builds from already-canonical data produced inside the crate.
    fn from_merged(merged: BTreeMap<Word, Rational>) -> Self {
        Self {
            atoms: merged.into_iter().filter(|(_, m)| !m.is_zero()).collect(),
        }
    }

    /// The unit mass `π_z`.
    pub fn dirac(z: &Word) -> Self {
        Self {
            atoms: vec![(z.to_point(), Rational::one())],
        }
    }

    /// Equal masses on the given (distinct or not) points.
    pub fn uniform(points: &[Word]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure("no points".into()));
        }
        let mass = Rational::new(1, points.len() as i128);
        Self::new(points.iter().map(|p| (p.clone(), mass)))
    }

    pub fn atoms(&self) -> &[(Word, Rational)] {
        &self.atoms
    }

    pub fn support(&self) -> Vec<Word> {
        self.atoms.iter().map(|(p, _)| p.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass_of(&self, cylinder: &Word) -> Rational {
        self.atoms
            .iter()
            .filter(|(p, _)| cylinder.contains_point(p))
            .map(|(_, m)| *m)
            .sum()
    }

    pub fn mass_of_set(&self, set: &[Word]) -> Rational {
        self.atoms
            .iter()
            .filter(|(p, _)| set.iter().any(|c| c.contains_point(p)))
            .map(|(_, m)| *m)
            .sum()
    }

    /// `μ(a)` for every cell `a` of the partition, in cell order.
    pub fn cell_masses(&self, partition: &Partition) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); partition.card()];
        for (p, m) in &self.atoms {
            out[partition.locate(p)] += *m;
        }
        out
    }

    /// `f̃(μ)`, the image measure `μ ∘ f^{-1}`.
    pub fn pushforward(&self, map: &PrefixTableMap) -> Self {
        let mut merged = BTreeMap::new();
        for (p, m) in &self.atoms {
            *merged.entry(map.apply(p)).or_insert_with(Rational::zero) += *m;
        }
        Self::from_merged(merged)
    }

    pub fn pushforward_n(&self, map: &PrefixTableMap, n: usize) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.pushforward(map))
    }

    /// `Σ w_i μ_i` for nonnegative weights summing to one.
    pub fn convex_combine(pairs: &[(Rational, &AtomicMeasure)]) -> Result<Self> {
        let total: Rational = pairs.iter().map(|(w, _)| *w).sum();
        if !total.is_one() || pairs.iter().any(|(w, _)| *w < Rational::zero()) {
            return Err(Error::InvalidMeasure(format!(
                "convex weights must be nonnegative and sum to 1 (got {total})"
            )));
        }
        let mut merged = BTreeMap::new();
        for (w, mu) in pairs {
            for (p, m) in &mu.atoms {
                *merged.entry(p.clone()).or_insert_with(Rational::zero) += *w * *m;
            }
        }
        Ok(Self::from_merged(merged))
    }

    /// `(1 - t) self + t other`.
    pub fn mix(&self, other: &AtomicMeasure, t: Rational) -> Result<Self> {
        Self::convex_combine(&[(Rational::one() - t, self), (t, other)])
    }

    /// One `point mass` entry per line; `-` denotes the empty word.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, m) in &self.atoms {
            let word = if p.is_empty() {
                "-".to_string()
            } else {
                p.to_string()
            };
            out.push_str(&format!("{word} {}\n", rational::format(m)));
        }
        out
    }

    /// Parses the text format; `#` starts a comment and blank lines are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let mut fields = line.split_whitespace();
            let (Some(word), Some(mass), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(err(format!("expected `point mass`, got {line:?}")));
            };
            let point: Word = word
                .parse()
                .map_err(|_| err(format!("bad point {word:?}")))?;
            let mass = rational::parse(mass).map_err(|_| err(format!("bad mass {mass:?}")))?;
            if mass <= Rational::zero() {
                return Err(err(format!("mass {mass} is not positive")));
            }
            atoms.push((point, mass));
        }
        Self::new(atoms)
    }
}

impl fmt::Debug for AtomicMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (p, m)) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}: {m}")?;
        }
        f.write_str("}")
    }
}

#[derive(Serialize, Deserialize)]
struct AtomRecord {
    point: Word,
    #[serde(with = "crate::rational::serde_str")]
    mass: Rational,
}

impl Serialize for AtomicMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<AtomRecord> = self
            .atoms
            .iter()
            .map(|(point, mass)| AtomRecord {
                point: point.clone(),
                mass: *mass,
            })
            .collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AtomicMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<AtomRecord>::deserialize(d)?;
        Self::new(records.into_iter().map(|r| (r.point, r.mass))).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::w;
    use crate::rational::rat;

    fn table(rules: &[(&str, &str)]) -> PrefixTableMap {
        PrefixTableMap::new(rules.iter().map(|(p, q)| (w(p), w(q))).collect()).unwrap()
    }

    #[test]
    fn dirac_examples() {
        assert_eq!(AtomicMeasure::dirac(&w("")).atoms(), &[(w(""), rat(1, 1))]);
        assert_eq!(
            AtomicMeasure::dirac(&w("01")).atoms(),
            &[(w("01"), rat(1, 1))]
        );
        assert_eq!(
            AtomicMeasure::dirac(&w("0100")),
            AtomicMeasure::dirac(&w("01"))
        );
        assert_ne!(
            AtomicMeasure::dirac(&w("01")),
            AtomicMeasure::dirac(&w("001"))
        );
    }

    #[test]
    fn pushforward_examples() {
        let f = table(&[("0", "00"), ("1", "01")]);
        let z = w("1101");
        assert_eq!(
            AtomicMeasure::dirac(&z).pushforward(&f),
            AtomicMeasure::dirac(&f.apply(&z))
        );
        let mu = AtomicMeasure::uniform(&[w("0"), w("1")]).unwrap();
        assert_eq!(mu.pushforward(&PrefixTableMap::identity()), mu);
        let collapse = table(&[("0", "0"), ("1", "0")]);
        assert_eq!(mu.pushforward(&collapse), AtomicMeasure::dirac(&w("0")));
    }

    #[test]
    fn convex_combine_examples() {
        let p0 = AtomicMeasure::dirac(&w("0"));
        let p1 = AtomicMeasure::dirac(&w("1"));
        assert_eq!(
            AtomicMeasure::convex_combine(&[(rat(1, 1), &p0), (rat(0, 1), &p1)]).unwrap(),
            p0
        );
        assert_eq!(
            AtomicMeasure::convex_combine(&[(rat(1, 2), &p0), (rat(1, 2), &p1)]).unwrap(),
            AtomicMeasure::uniform(&[w("0"), w("1")]).unwrap()
        );
        assert!(AtomicMeasure::convex_combine(&[(rat(1, 2), &p0), (rat(1, 3), &p1)]).is_err());
    }

    #[test]
    fn cell_mass_examples() {
        let p2 = Partition::standard(2);
        assert_eq!(
            AtomicMeasure::dirac(&w("01")).cell_masses(&p2),
            vec![rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1)]
        );
        let uniform = AtomicMeasure::uniform(&Word::all_of_length(2)).unwrap();
        assert_eq!(uniform.cell_masses(&p2), vec![rat(1, 4); 4]);
        assert_eq!(
            uniform.cell_masses(&Partition::standard(1)),
            vec![rat(1, 2); 2]
        );
    }

    #[test]
    fn invalid_measures_rejected() {
        assert!(AtomicMeasure::new(vec![(w("0"), rat(1, 2))]).is_err());
        assert!(AtomicMeasure::new(vec![(w("0"), rat(3, 2)), (w("1"), rat(-1, 2))]).is_err());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let mu = AtomicMeasure::new(vec![(w(""), rat(1, 3)), (w("011"), rat(2, 3))]).unwrap();
        assert_eq!(AtomicMeasure::from_text(&mu.to_text()).unwrap(), mu);
        let text = "# comment\n- 1/3\n\n011 2/3 # trailing\n";
        assert_eq!(AtomicMeasure::from_text(text).unwrap(), mu);
        match AtomicMeasure::from_text("0 1/2\n1x 1/2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let json = serde_json::to_string(&mu).unwrap();
        assert_eq!(serde_json::from_str::<AtomicMeasure>(&json).unwrap(), mu);
    }
}
