//! Integer partitions indexing zonal polynomials.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-increasing tuple of positive parts; trailing zeros are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    /// The empty partition of weight zero.
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Accepts any non-increasing sequence; zeros are stripped.
    pub fn new(parts: &[u32]) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parse(format!("partition {parts:?} is not non-increasing")));
        }
        Ok(Self(parts.iter().copied().filter(|&k| k > 0).collect()))
    }

    /// Parses `"2,1"`, `"(2,1)"` or `""`.
    pub fn parse(text: &str) -> Result<Self> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        if inner.trim().is_empty() {
            return Ok(Self::empty());
        }
        let parts = inner
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("partition part {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Sum of the parts.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Part `j` (0-based), zero past the end.
    pub fn part(&self, j: usize) -> u32 {
        self.0.get(j).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.part(0);
        Partition(
            (1..=first)
                .map(|c| self.0.iter().filter(|&&k| k >= c).count() as u32)
                .collect(),
        )
    }

    /// `self <= other` in dominance order (equal weights required).
    pub fn dominated_by(&self, other: &Partition) -> bool {
        if self.weight() != other.weight() {
            return false;
        }
        let n = self.len().max(other.len());
        let (mut a, mut b) = (0u64, 0u64);
        for j in 0..n {
            a += self.part(j) as u64;
            b += other.part(j) as u64;
            if a > b {
                return false;
            }
        }
        true
    }

    /// Boxes `(row, col)` of the Young diagram, both 0-based.
    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| (0..k as usize).map(move |j| (i, j)))
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(&parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `k` with at most `max_parts` parts, reverse-lexicographic.
pub fn partitions_of(k: usize, max_parts: usize) -> Vec<Partition> {
    fn fill(rest: u32, cap: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        for first in (1..=cap.min(rest)).rev() {
            cur.push(first);
            fill(rest - first, first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    fill(k as u32, k as u32, max_parts, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts).unwrap()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(partitions_of(0, 3), vec![Partition::empty()]);
        assert_eq!(partitions_of(3, 2), vec![p(&[3]), p(&[2, 1])]);
        assert_eq!(
            partitions_of(4, 4),
            vec![p(&[4]), p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1]), p(&[1, 1, 1, 1])]
        );
    }

    /// Count by brute-force nested loops over non-increasing triples.
    fn brute_count(k: u32) -> usize {
        let mut n = 0;
        for a in 0..=k {
            for b in 0..=a {
                for c in 0..=b {
                    if a + b + c == k {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn counts_match_brute_force() {
        assert_eq!(partitions_of(6, 3).len(), 7);
        for k in 0..15 {
            assert_eq!(partitions_of(k as usize, 3).len(), brute_count(k));
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(Partition::parse("(2,1)").unwrap(), p(&[2, 1]));
        assert_eq!(Partition::parse("3, 0").unwrap(), p(&[3]));
        assert_eq!(Partition::parse("()").unwrap(), Partition::empty());
        assert!(Partition::parse("1,2").is_err());
        assert_eq!(p(&[3, 1, 1]).to_string(), "(3,1,1)");
        assert_eq!(p(&[3, 1, 1]).conjugate(), p(&[3, 1, 1]));
        assert_eq!(p(&[4, 2]).conjugate(), p(&[2, 2, 1, 1]));
    }

    #[test]
    fn dominance() {
        assert!(p(&[2, 1, 1]).dominated_by(&p(&[2, 2])));
        assert!(!p(&[3, 1, 1, 1]).dominated_by(&p(&[2, 2, 2])));
        assert!(!p(&[2, 2, 2]).dominated_by(&p(&[3, 1, 1, 1])));
    }

    proptest! {
        #[test]
        fn enumeration_is_sorted_and_distinct(k in 0usize..14, m in 1usize..6) {
            let list = partitions_of(k, m);
            for w in list.windows(2) {
                prop_assert!(w[0].parts() > w[1].parts());
            }
            for part in &list {
                prop_assert_eq!(part.weight(), k);
                prop_assert!(part.len() <= m);
            }
        }
    }
}
