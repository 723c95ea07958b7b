//! Extreme points of the convex hull of autocorrelation vectors.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::autocorr::{enumerate_classes, ClassEnumeration};
use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::lp::{self, ConvexCombination, Membership, SeparatingFunctional};
use crate::rational::{self, Rational};

/// Largest dyadic rank accepted by [`table3`].
pub const TABLE3_MAX_N: usize = 4;

/// Distinct points in `[0, 1]^D`, each with first coordinate 1.
#[derive(Clone, Debug)]
pub struct PointCloud {
    dimension: usize,
    points: Vec<Vec<Rational>>,
    labels: Vec<Vec<usize>>,
}

impl PointCloud {
    pub fn new(dimension: usize, points: Vec<Vec<Rational>>, labels: Vec<Vec<usize>>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: labels.len(),
            });
        }
        for p in &points {
            if p.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: p.len(),
                });
            }
            if dimension > 0 && !p[0].is_one() {
                return Err(Error::InvalidVector("first coordinate must be 1".into()));
            }
            if !p.iter().all(rational::in_unit_interval) {
                return Err(Error::InvalidVector("coordinates must lie in [0, 1]".into()));
            }
        }
        let mut sorted: Vec<&Vec<Rational>> = points.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("points must be pairwise distinct".into()));
        }
        Ok(PointCloud {
            dimension,
            points,
            labels,
        })
    }

    pub fn from_classes(classes: &ClassEnumeration) -> Self {
        PointCloud {
            dimension: classes.group.cardinality(),
            points: classes
                .classes
                .iter()
                .map(|c| c.vector.entries().to_vec())
                .collect(),
            labels: classes
                .classes
                .iter()
                .map(|c| c.representative.indices())
                .collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    /// Strictly separated from every other point.
    Extreme(SeparatingFunctional),
    /// Convex weights over other points (indices into the cloud).
    NonExtreme(ConvexCombination),
}

impl Classification {
    pub fn is_extreme(&self) -> bool {
        matches!(self, Classification::Extreme(_))
    }
}

#[derive(Clone, Debug)]
pub struct HullReport {
    pub classifications: Vec<Classification>,
    pub labels: Vec<Vec<usize>>,
}

impl HullReport {
    pub fn extreme_indices(&self) -> Vec<usize> {
        (0..self.classifications.len())
            .filter(|&i| self.classifications[i].is_extreme())
            .collect()
    }

    pub fn extreme_count(&self) -> usize {
        self.classifications.iter().filter(|c| c.is_extreme()).count()
    }

    /// Re-checks every certificate against the cloud.
    pub fn verify(&self, cloud: &PointCloud) -> Result<()> {
        if self.classifications.len() != cloud.len() {
            return Err(Error::DimensionMismatch {
                expected: cloud.len(),
                got: self.classifications.len(),
            });
        }
        for (i, c) in self.classifications.iter().enumerate() {
            verify_one(cloud, i, c)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let certificates: BTreeMap<String, Value> = self
            .classifications
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let cert = match c {
                    Classification::Extreme(f) => json!({
                        "kind": "separating",
                        "normal": rational::format_all(&f.normal),
                        "offset": rational::format(&f.offset),
                    }),
                    Classification::NonExtreme(w) => json!({
                        "kind": "convex",
                        "weights": w
                            .weights
                            .iter()
                            .map(|(j, r)| (j.to_string(), Value::String(rational::format(r))))
                            .collect::<serde_json::Map<_, _>>(),
                    }),
                };
                (i.to_string(), cert)
            })
            .collect();
        json!({
            "points": self.classifications.len(),
            "labels": self.labels,
            "extreme": self.extreme_indices(),
            "certificates": certificates,
        })
    }
}

fn verify_one(cloud: &PointCloud, i: usize, c: &Classification) -> Result<()> {
    let target = &cloud.points[i];
    match c {
        Classification::Extreme(f) => f.verify(
            target,
            cloud
                .points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| p.as_slice()),
        ),
        Classification::NonExtreme(w) => {
            if w.weights.iter().any(|&(j, _)| j == i) {
                return Err(Error::Certificate(format!("point {i} uses itself")));
            }
            w.verify(target, &cloud.points)
        }
    }
}

/// A 0/1 point of `[0, 1]^D` is a cube vertex: `x -> sum_i ±x_i` peaks
/// there uniquely.
fn cube_vertex_functional(cloud: &PointCloud, i: usize) -> SeparatingFunctional {
    let target = &cloud.points[i];
    let normal: Vec<Rational> = target
        .iter()
        .map(|x| if x.is_one() { Rational::one() } else { -Rational::one() })
        .collect();
    let score = |x: &[Rational]| -> Rational { normal.iter().zip(x).map(|(a, b)| a * b).sum() };
    let best_other = cloud
        .points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, p)| score(p))
        .max()
        .unwrap_or_else(|| score(target) - Rational::one());
    SeparatingFunctional {
        normal,
        offset: -best_other,
    }
}

/// Points as integer vectors over a per-point positive denominator, for fast
/// exact sign tests of functionals.
struct Scaled {
    den: Vec<i128>,
    coords: Vec<Vec<i128>>,
}

impl Scaled {
    fn new(cloud: &PointCloud) -> Option<Self> {
        let mut den = Vec::with_capacity(cloud.len());
        let mut coords = Vec::with_capacity(cloud.len());
        for p in &cloud.points {
            let d = p.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
            let c: Option<Vec<i128>> = p.iter().map(|r| (r * &d).to_integer().to_i64().map(i128::from)).collect();
            den.push(d.to_i64().map(i128::from)?);
            coords.push(c?);
        }
        Some(Scaled { den, coords })
    }
}

/// Integer form `(normal, offset)` of a functional scaled by a positive
/// common denominator.
fn integer_functional(f: &SeparatingFunctional) -> (Vec<BigInt>, BigInt) {
    let d = f
        .normal
        .iter()
        .chain(std::iter::once(&f.offset))
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let normal = f.normal.iter().map(|r| (r * &d).to_integer()).collect();
    (normal, (&f.offset * &d).to_integer())
}

/// Points `j` (not in `skip`) at which `f` is positive, with `f(v_j)` as a
/// float for ranking.
fn violators(cloud: &PointCloud, scaled: Option<&Scaled>, f: &SeparatingFunctional, skip: &[bool]) -> Vec<(usize, f64)> {
    let (normal, offset) = integer_functional(f);
    let small: Option<(Vec<i128>, i128)> = normal
        .iter()
        .map(|a| a.to_i64().map(i128::from))
        .collect::<Option<Vec<_>>>()
        .zip(offset.to_i64().map(i128::from));
    let mut out = Vec::new();
    for (j, _) in skip.iter().enumerate().filter(|(_, &s)| !s) {
        let fast = match (scaled, &small) {
            (Some(s), Some((n, o))) => {
                let mut acc = o.checked_mul(s.den[j]);
                for (a, c) in n.iter().zip(&s.coords[j]) {
                    acc = acc.and_then(|v| a.checked_mul(*c).and_then(|p| v.checked_add(p)));
                }
                acc.map(|v| (v > 0, v as f64 / s.den[j] as f64))
            }
            _ => None,
        };
        let (positive, score) = match fast {
            Some(r) => r,
            None => {
                let v = f.eval(&cloud.points[j]);
                (v.is_positive(), rational::to_f64(&v))
            }
        };
        if positive {
            out.push((j, score));
        }
    }
    out
}

/// Columns added to the working set per round.
const GENERATION_BATCH: usize = 48;

fn classify_one(cloud: &PointCloud, scaled: Option<&Scaled>, i: usize) -> Result<Classification> {
    let target = &cloud.points[i];
    let out = if target.iter().all(rational::is_zero_or_one) {
        Classification::Extreme(cube_vertex_functional(cloud, i))
    } else {
        // Solve on a working set seeded with the cube vertices; a functional
        // that separates the working set but not some other point brings the
        // most violated points in.
        let mut active = vec![false; cloud.len()];
        active[i] = true;
        let mut working: Vec<usize> = (0..cloud.len())
            .filter(|&j| j != i && cloud.points[j].iter().all(rational::is_zero_or_one))
            .collect();
        if working.is_empty() {
            working.extend((0..cloud.len()).filter(|&j| j != i).take(GENERATION_BATCH));
        }
        for &j in &working {
            active[j] = true;
        }
        loop {
            let candidates: Vec<&[Rational]> = working.iter().map(|&j| cloud.points[j].as_slice()).collect();
            match lp::decide(target, &candidates)? {
                Membership::Inside(c) => {
                    break Classification::NonExtreme(ConvexCombination {
                        weights: c.weights.into_iter().map(|(j, w)| (working[j], w)).collect(),
                    })
                }
                Membership::Outside(f) => {
                    let mut extra = violators(cloud, scaled, &f, &active);
                    if extra.is_empty() {
                        break Classification::Extreme(f);
                    }
                    extra.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                    for &(j, _) in extra.iter().take(GENERATION_BATCH) {
                        active[j] = true;
                        working.push(j);
                    }
                    working.sort_unstable();
                }
            }
        }
    };
    verify_one(cloud, i, &out)?;
    Ok(out)
}

/// Tests every point against the hull of the others with exact LPs.
pub fn classify_vertices(cloud: &PointCloud) -> Result<HullReport> {
    let scaled = Scaled::new(cloud);
    let classifications = (0..cloud.len())
        .into_par_iter()
        .map(|i| classify_one(cloud, scaled.as_ref(), i))
        .collect::<Result<Vec<_>>>()?;
    Ok(HullReport {
        classifications,
        labels: cloud.labels.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table3Row {
    pub n: usize,
    pub total: u64,
    pub distinct: usize,
    pub extreme: usize,
}

impl Table3Row {
    pub fn csv(&self) -> String {
        format!("{},{},{},{}", self.n, self.total, self.distinct, self.extreme)
    }
}

pub const TABLE3_HEADER: &str = "n,total,distinct,extreme";

pub fn table3_row(n: usize) -> Result<Table3Row> {
    if n > TABLE3_MAX_N {
        return Err(Error::BoundExceeded {
            what: "table3",
            cardinality: 1 << n.min(63),
            bound: 1 << TABLE3_MAX_N,
        });
    }
    let classes = enumerate_classes(&FiniteAbelianGroup::power(2, n)?)?;
    table3_row_from(n, &classes)
}

pub fn table3_row_from(n: usize, classes: &ClassEnumeration) -> Result<Table3Row> {
    let report = classify_vertices(&PointCloud::from_classes(classes))?;
    Ok(Table3Row {
        n,
        total: classes.total,
        distinct: classes.distinct(),
        extreme: report.extreme_count(),
    })
}

/// Rows for `Z_2^0, ..., Z_2^max_n`.
pub fn table3(max_n: usize) -> Result<Vec<Table3Row>> {
    (0..=max_n).map(table3_row).collect()
}

pub fn table3_csv(rows: &[Table3Row]) -> String {
    let mut out = String::from(TABLE3_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autocorr::SubsetGamma;
    use crate::rational::{int, ratio};

    fn dyadic_cloud(n: usize) -> PointCloud {
        PointCloud::from_classes(&enumerate_classes(&FiniteAbelianGroup::power(2, n).unwrap()).unwrap())
    }

    #[test]
    fn small_dyadic_counts() {
        let counts: Vec<usize> = (0..=3)
            .map(|n| classify_vertices(&dyadic_cloud(n)).unwrap().extreme_count())
            .collect();
        assert_eq!(counts, vec![1, 2, 5, 16]);
    }

    #[test]
    fn three_point_set_is_not_extreme() {
        let cloud = dyadic_cloud(2);
        let report = classify_vertices(&cloud).unwrap();
        let idx = cloud.labels().iter().position(|l| l == &vec![0, 1, 2]).unwrap();
        assert!(!report.classifications[idx].is_extreme());
        report.verify(&cloud).unwrap();
    }

    #[test]
    fn single_point_cloud() {
        let p = vec![int(1), ratio(1, 2)];
        let cloud = PointCloud::new(2, vec![p], vec![vec![0]]).unwrap();
        let report = classify_vertices(&cloud).unwrap();
        assert_eq!(report.extreme_count(), 1);
        let cloud = PointCloud::new(2, vec![vec![int(1), int(0)]], vec![vec![0]]).unwrap();
        assert_eq!(classify_vertices(&cloud).unwrap().extreme_count(), 1);
    }

    #[test]
    fn cloud_validation() {
        let p = vec![int(1), ratio(1, 2)];
        assert!(PointCloud::new(2, vec![p.clone(), p.clone()], vec![vec![0], vec![1]]).is_err());
        assert!(PointCloud::new(2, vec![vec![int(0), int(0)]], vec![vec![0]]).is_err());
        assert!(PointCloud::new(2, vec![vec![int(1), int(2)]], vec![vec![0]]).is_err());
        assert!(PointCloud::new(3, vec![p], vec![vec![0]]).is_err());
    }

    #[test]
    fn subgroups_are_extreme() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let classes = enumerate_classes(&g).unwrap();
        let cloud = PointCloud::from_classes(&classes);
        let report = classify_vertices(&cloud).unwrap();
        for m in g.enumerate_subgroups().unwrap() {
            let label = SubsetGamma::from_subgroup(&g, &m).indices();
            let idx = cloud.labels().iter().position(|l| *l == label).unwrap();
            assert!(report.classifications[idx].is_extreme());
        }
        report.verify(&cloud).unwrap();
    }

    #[test]
    fn json_shape() {
        let report = classify_vertices(&dyadic_cloud(2)).unwrap();
        let v = report.to_json();
        assert_eq!(v["extreme"].as_array().unwrap().len(), 5);
        assert_eq!(v["certificates"].as_object().unwrap().len(), 6);
    }

    #[test]
    fn table3_small() {
        let rows = table3(2).unwrap();
        assert_eq!(
            table3_csv(&rows),
            "n,total,distinct,extreme\n0,1,1,1\n1,3,2,2\n2,15,6,5\n"
        );
        assert!(table3_row(5).is_err());
    }
}
