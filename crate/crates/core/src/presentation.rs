//! Text form of group presentations.
//!
//! `2,2,2` and `2^3` both denote `Z_2^3`; factors can be mixed (`2^2,4`).
//! `prufer:p@N` is the depth-`N` truncation of the Prüfer `p`-group, which
//! carries its own subgroup chain. `trivial` (or any `n^0`) is the trivial
//! group.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::group::{prufer_truncation, FiniteAbelianGroup, Subgroup};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Shape {
    DirectSum(Vec<usize>),
    Prufer { prime: usize, depth: usize },
}

/// A parsed group spec: the group plus its canonical exhausting chain.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    shape: Shape,
    group: FiniteAbelianGroup,
    chain: Vec<Subgroup>,
}

impl GroupSpec {
    pub fn direct_sum(orders: Vec<usize>) -> Result<Self> {
        let group = FiniteAbelianGroup::new(orders.clone())?;
        let chain = group.coordinate_chain();
        Ok(GroupSpec {
            shape: Shape::DirectSum(orders),
            group,
            chain,
        })
    }

    pub fn dyadic(rank: usize) -> Self {
        GroupSpec::direct_sum(vec![2; rank]).expect("Z_2^n")
    }

    pub fn prufer(prime: usize, depth: usize) -> Result<Self> {
        let (group, chain) = prufer_truncation(prime, depth)?;
        Ok(GroupSpec {
            shape: Shape::Prufer { prime, depth },
            group,
            chain,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    /// `{0} = M_0 < M_1 < ... < M_N = G`.
    pub fn chain(&self) -> &[Subgroup] {
        &self.chain
    }
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape
    }
}

impl Eq for GroupSpec {}

fn parse_usize(tok: &str, spec: &str) -> Result<usize> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad number {tok:?} in group spec {spec:?}")));
    }
    tok.parse()
        .map_err(|_| Error::Parse(format!("number {tok:?} too large in {spec:?}")))
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = s.trim();
        if let Some(rest) = spec.strip_prefix("prufer:") {
            let (p, n) = rest
                .split_once('@')
                .ok_or_else(|| Error::Parse(format!("expected prufer:p@N, got {spec:?}")))?;
            return GroupSpec::prufer(parse_usize(p, spec)?, parse_usize(n, spec)?);
        }
        if spec == "trivial" {
            return GroupSpec::direct_sum(Vec::new());
        }
        if spec.is_empty() {
            return Err(Error::Parse("empty group spec".into()));
        }
        let mut orders = Vec::new();
        for tok in spec.split(',') {
            let tok = tok.trim();
            let (base, count) = match tok.split_once('^') {
                Some((b, k)) => (parse_usize(b, spec)?, parse_usize(k, spec)?),
                None => (parse_usize(tok, spec)?, 1),
            };
            if base < 2 {
                return Err(Error::InvalidGroup(format!(
                    "cyclic factor of order {base} in {spec:?}"
                )));
            }
            orders.extend(std::iter::repeat_n(base, count));
        }
        GroupSpec::direct_sum(orders)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Prufer { prime, depth } => write!(f, "prufer:{prime}@{depth}"),
            Shape::DirectSum(orders) if orders.is_empty() => write!(f, "trivial"),
            Shape::DirectSum(orders) => {
                let mut parts = Vec::new();
                let mut i = 0;
                while i < orders.len() {
                    let run = orders[i..].iter().take_while(|&&n| n == orders[i]).count();
                    parts.push(if run == 1 {
                        orders[i].to_string()
                    } else {
                        format!("{}^{run}", orders[i])
                    });
                    i += run;
                }
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        let g: GroupSpec = "2,2,2".parse().unwrap();
        assert_eq!(g.group().orders(), &[2, 2, 2]);
        assert_eq!(g.to_string(), "2^3");
        let g: GroupSpec = "2^4".parse().unwrap();
        assert_eq!(g.group().cardinality(), 16);
        let g: GroupSpec = "2^2,4,3".parse().unwrap();
        assert_eq!(g.to_string(), "2^2,4,3");
        let g: GroupSpec = "prufer:2@3".parse().unwrap();
        assert_eq!(g.group().orders(), &[8]);
        assert_eq!(g.chain().len(), 4);
        assert_eq!(g.to_string(), "prufer:2@3");
        let g: GroupSpec = "2^0".parse().unwrap();
        assert_eq!(g.group().cardinality(), 1);
        assert_eq!(g.to_string(), "trivial");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["2^^3", "", "2,,2", "1", "2^", "prufer:4@2", "prufer:2", "x", "-2"] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn canonical_round_trip() {
        for s in ["2,2,2", "2^3", "3,3,2", "4", "prufer:3@2", "trivial", "2^0,3"] {
            let g: GroupSpec = s.parse().unwrap();
            let again: GroupSpec = g.to_string().parse().unwrap();
            assert_eq!(g, again);
            assert_eq!(again.to_string(), g.to_string());
        }
    }
}
