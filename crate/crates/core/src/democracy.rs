//! Periodization functions constant on cosets of `M_N^perp`, the functional
//! `∫ g_Gamma p`, and the Prüfer-group counterexample.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::autocorr::{enumerate_classes, SubsetGamma};
use crate::error::{Error, Result};
use crate::group::{Element, FiniteAbelianGroup, Subgroup};
use crate::hull::{classify_vertices, PointCloud};
use crate::presentation::GroupSpec;
use crate::rational::{self, Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    /// `weights[m]` on `M_m^perp \ M_{m+1}^perp`, `tail` on `M_N^perp`.
    Annuli { weights: Vec<Rational>, tail: Rational },
    /// One value per dual element, in index order.
    Table { values: Vec<Rational> },
}

/// A nonnegative function on the dual group that is constant on the cosets
/// of `M_N^perp`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodizationSpec {
    group: FiniteAbelianGroup,
    chain: Vec<Subgroup>,
    shape: Shape,
}

fn check_nonnegative(values: &[Rational], what: &str) -> Result<()> {
    if values.iter().any(Signed::is_negative) {
        return Err(Error::InvalidArgument(format!("{what} must be nonnegative")));
    }
    Ok(())
}

fn check_chain(group: &FiniteAbelianGroup, mut chain: Vec<Subgroup>) -> Result<Vec<Subgroup>> {
    let trivial = group.generate_subgroup(&[])?;
    if chain.first() != Some(&trivial) {
        chain.insert(0, trivial);
    }
    for m in &chain {
        if !group.is_subgroup(m.elements()) {
            return Err(Error::InvalidArgument("chain member is not a subgroup".into()));
        }
    }
    if chain
        .windows(2)
        .any(|w| w[0].cardinality() >= w[1].cardinality() || !w[0].is_subset_of(&w[1]))
    {
        return Err(Error::InvalidArgument("chain must be strictly nested".into()));
    }
    Ok(chain)
}

impl PeriodizationSpec {
    /// `chain` may omit the leading `{0}`; `weights` has one entry per step
    /// of the chain.
    pub fn chain_annuli(
        group: &FiniteAbelianGroup,
        chain: Vec<Subgroup>,
        weights: Vec<Rational>,
        tail: Rational,
    ) -> Result<Self> {
        let chain = check_chain(group, chain)?;
        if weights.len() + 1 != chain.len() {
            return Err(Error::DimensionMismatch {
                expected: chain.len() - 1,
                got: weights.len(),
            });
        }
        check_nonnegative(&weights, "annulus weights")?;
        check_nonnegative(std::slice::from_ref(&tail), "tail")?;
        Ok(PeriodizationSpec {
            group: group.clone(),
            chain,
            shape: Shape::Annuli { weights, tail },
        })
    }

    /// Annuli along the canonical chain of `spec`.
    pub fn annuli_on(spec: &GroupSpec, weights: Vec<Rational>, tail: Rational) -> Result<Self> {
        PeriodizationSpec::chain_annuli(spec.group(), spec.chain().to_vec(), weights, tail)
    }

    pub fn dual_table(group: &FiniteAbelianGroup, values: Vec<Rational>) -> Result<Self> {
        PeriodizationSpec::table_with_chain(group, group.coordinate_chain(), values)
    }

    pub fn table_on(spec: &GroupSpec, values: Vec<Rational>) -> Result<Self> {
        PeriodizationSpec::table_with_chain(spec.group(), spec.chain().to_vec(), values)
    }

    fn table_with_chain(group: &FiniteAbelianGroup, chain: Vec<Subgroup>, values: Vec<Rational>) -> Result<Self> {
        if values.len() != group.cardinality() {
            return Err(Error::DimensionMismatch {
                expected: group.cardinality(),
                got: values.len(),
            });
        }
        check_nonnegative(&values, "table values")?;
        Ok(PeriodizationSpec {
            group: group.clone(),
            chain: check_chain(group, chain)?,
            shape: Shape::Table { values },
        })
    }

    /// `p = c` everywhere.
    pub fn constant(group: &FiniteAbelianGroup, c: Rational) -> Result<Self> {
        PeriodizationSpec::dual_table(group, vec![c; group.cardinality()])
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn chain(&self) -> &[Subgroup] {
        &self.chain
    }

    pub fn is_table(&self) -> bool {
        matches!(self.shape, Shape::Table { .. })
    }

    /// Values at every dual element, in index order.
    pub fn dual_values(&self) -> Vec<Rational> {
        match &self.shape {
            Shape::Table { values } => values.clone(),
            Shape::Annuli { weights, tail } => {
                let n = self.group.cardinality();
                let mut out = vec![tail.clone(); n];
                let mut assigned = vec![false; n];
                // Walk the complements from M_N^perp outwards.
                for (m, step) in self.chain.iter().enumerate().rev() {
                    let perp = self.group.orthogonal_complement(step);
                    for &t in perp.elements() {
                        if !assigned[t.0] {
                            assigned[t.0] = true;
                            if m < weights.len() {
                                out[t.0] = weights[m].clone();
                            }
                        }
                    }
                }
                out
            }
        }
    }

    pub fn to_dual_table(&self) -> PeriodizationSpec {
        PeriodizationSpec {
            group: self.group.clone(),
            chain: self.chain.clone(),
            shape: Shape::Table {
                values: self.dual_values(),
            },
        }
    }

    /// Largest value taken.
    pub fn ess_sup(&self) -> Rational {
        let max = match &self.shape {
            Shape::Table { values } => values.iter().max().cloned(),
            Shape::Annuli { weights, tail } => weights.iter().chain(std::iter::once(tail)).max().cloned(),
        };
        max.unwrap_or_else(Rational::zero)
    }
}

/// `chain:<group>;w=<p/q,...>;tail=<p/q>` or `table:<group>;v=<p/q,...>`.
impl FromStr for PeriodizationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected chain: or table:, got {s:?}")))?;
        let mut parts = rest.split(';');
        let spec: GroupSpec = parts.next().unwrap_or_default().parse()?;
        let mut fields: Vec<(&str, &str)> = Vec::new();
        for part in parts {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            if fields.iter().any(|(seen, _)| *seen == k.trim()) {
                return Err(Error::Parse(format!("duplicate field {k:?}")));
            }
            fields.push((k.trim(), v.trim()));
        }
        let list = |v: &str| -> Result<Vec<Rational>> {
            if v.is_empty() {
                return Ok(Vec::new());
            }
            v.split(',').map(|x| rational::parse(x.trim())).collect()
        };
        let get = |key: &str| fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let known: &[&str] = match kind {
            "chain" => &["w", "tail"],
            "table" => &["v"],
            _ => return Err(Error::Parse(format!("unknown periodization kind {kind:?}"))),
        };
        if let Some((k, _)) = fields.iter().find(|(k, _)| !known.contains(k)) {
            return Err(Error::Parse(format!("unknown field {k:?} for {kind}")));
        }
        match kind {
            "chain" => {
                let weights = list(get("w").unwrap_or(""))?;
                let tail = get("tail")
                    .ok_or_else(|| Error::Parse("chain spec needs tail=".into()))
                    .and_then(rational::parse)?;
                PeriodizationSpec::annuli_on(&spec, weights, tail)
            }
            _ => {
                let values = list(get("v").ok_or_else(|| Error::Parse("table spec needs v=".into()))?)?;
                PeriodizationSpec::table_on(&spec, values)
            }
        }
    }
}

/// `∫ g_Gamma p`. Annuli specs are evaluated exactly by pair counting; tables
/// go through the spectrum of `g_Gamma`.
pub fn eval_functional(gamma: &SubsetGamma, p: &PeriodizationSpec) -> Result<Scalar> {
    if gamma.group() != p.group() {
        return Err(Error::GroupMismatch {
            left: gamma.group().to_string(),
            right: p.group().to_string(),
        });
    }
    match &p.shape {
        Shape::Table { values } => Ok(gamma.g_spectrum().weighted_mean(values)),
        Shape::Annuli { weights, tail } => {
            let integrals = p
                .chain
                .iter()
                .map(|m| gamma.integral_over_perp(m))
                .collect::<Result<Vec<_>>>()?;
            let mut total = tail * integrals.last().expect("chain starts at {0}");
            for (m, w) in weights.iter().enumerate() {
                total += w * (&integrals[m] - &integrals[m + 1]);
            }
            Ok(Scalar::Exact(total))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    All,
    Extreme,
    Subgroups,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Family::All),
            "extreme" => Ok(Family::Extreme),
            "subgroups" => Ok(Family::Subgroups),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::All => "all",
            Family::Extreme => "extreme",
            Family::Subgroups => "subgroups",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyValue {
    pub gamma: Vec<usize>,
    pub value: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct DemocracyReport {
    pub group: String,
    pub family: Family,
    /// Sorted by canonical `Gamma`.
    pub values: Vec<FamilyValue>,
    pub infimum: Scalar,
    pub witness: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub ess_sup: Rational,
}

/// Canonical members of a family, sorted.
pub fn family_members(group: &FiniteAbelianGroup, family: Family) -> Result<Vec<SubsetGamma>> {
    let mut members: Vec<SubsetGamma> = match family {
        Family::All => enumerate_classes(group)?
            .classes
            .into_iter()
            .map(|c| c.representative)
            .collect(),
        Family::Extreme => {
            let classes = enumerate_classes(group)?;
            let report = classify_vertices(&PointCloud::from_classes(&classes))?;
            classes
                .classes
                .into_iter()
                .zip(&report.classifications)
                .filter(|(_, c)| c.is_extreme())
                .map(|(c, _)| c.representative)
                .collect()
        }
        Family::Subgroups => group
            .enumerate_subgroups()?
            .iter()
            .map(|m| SubsetGamma::from_subgroup(group, m))
            .collect(),
    };
    for m in members.iter_mut() {
        *m = m.canonicalize();
    }
    members.sort_by_key(SubsetGamma::indices);
    Ok(members)
}

pub fn inf_over_family(group: &FiniteAbelianGroup, p: &PeriodizationSpec, family: Family) -> Result<DemocracyReport> {
    if group != p.group() {
        return Err(Error::GroupMismatch {
            left: group.to_string(),
            right: p.group().to_string(),
        });
    }
    let members = family_members(group, family)?;
    inf_over_members(p, family, &members)
}

/// Minimum of the functional over `members`, ties going to the first
/// member in sorted order.
pub fn inf_over_members(p: &PeriodizationSpec, family: Family, members: &[SubsetGamma]) -> Result<DemocracyReport> {
    let values = members
        .par_iter()
        .map(|g| {
            Ok(FamilyValue {
                gamma: g.indices(),
                value: eval_functional(g, p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .reduce(|a, b| match b.value.cmp_value(&a.value) {
            Ordering::Less => b,
            Ordering::Equal if b.gamma < a.gamma => b,
            _ => a,
        })
        .ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
    Ok(DemocracyReport {
        group: p.group().to_string(),
        family,
        infimum: best.value.clone(),
        witness: best.gamma.clone(),
        ess_sup: p.ess_sup(),
        values,
    })
}

/// Least level `m` such that `p >= c` on all of `M_m^perp`, along `chain`
/// (default: the spec's own chain).
pub fn sufficient_condition_check(p: &PeriodizationSpec, c: &Rational, chain: Option<&[Subgroup]>) -> Result<Option<usize>> {
    if !c.is_positive() {
        return Err(Error::InvalidArgument("c must be positive".into()));
    }
    let chain = chain.unwrap_or(&p.chain);
    let values = p.dual_values();
    for (m, step) in chain.iter().enumerate() {
        let perp = p.group.orthogonal_complement(step);
        if perp.elements().iter().all(|t| values[t.0] >= *c) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelValue {
    pub level: usize,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub depth: usize,
    pub group: String,
    pub gamma: Vec<usize>,
    pub gamma_cardinality: usize,
    #[serde(with = "rational::serde_str::vec")]
    pub weights: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub tail: Rational,
    /// `∫ g_Gamma` over `M_m^perp \ M_{m+1}^perp`.
    pub annulus_integrals: Vec<LevelValue>,
    #[serde(with = "rational::serde_str")]
    pub gamma_value: Rational,
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub within_bound: bool,
    /// Functional at each chain subgroup `M_m`.
    pub subgroup_values: Vec<LevelValue>,
    #[serde(with = "rational::serde_str")]
    pub subgroup_infimum: Rational,
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub spec: GroupSpec,
    pub gamma: SubsetGamma,
    pub p: PeriodizationSpec,
    pub report: CounterexampleReport,
}

/// Largest `n` accepted by [`build_counterexample`].
pub const COUNTEREXAMPLE_MAX_N: usize = 6;

fn pow2(e: usize) -> Rational {
    Rational::from_integer(num_bigint::BigInt::one() << e)
}

/// Depth `N = 2n - 1` truncation of the Prüfer 2-group with
/// `Gamma_n = {0, s_1} + {0, s_3} + ... + {0, s_{2n-1}}`, `s_j = 2^{N-j}`, and
/// `p` equal to 1 on the even annuli.
///
/// On `M_N^perp` the truncation uses the average of the untruncated `p`
/// there (1/3 for odd `N`, 2/3 for even `N`), so every `Gamma` inside `M_N`
/// gets its untruncated value.
pub fn build_counterexample(n: usize) -> Result<Counterexample> {
    if !(1..=COUNTEREXAMPLE_MAX_N).contains(&n) {
        return Err(Error::BoundExceeded {
            what: "counterexample n",
            cardinality: n,
            bound: COUNTEREXAMPLE_MAX_N,
        });
    }
    let depth = 2 * n - 1;
    let spec = GroupSpec::prufer(2, depth)?;
    let group = spec.group().clone();

    let mut members = vec![Element::ZERO];
    for i in 1..=n {
        let s = Element(1 << (depth - (2 * i - 1)));
        let shifted: Vec<Element> = members.iter().map(|&a| group.add(a, s)).collect();
        members.extend(shifted);
    }
    let gamma = SubsetGamma::new(&group, members)?;
    debug_assert_eq!(gamma.len(), 1 << n);

    let weights: Vec<Rational> = (0..depth)
        .map(|m| if m % 2 == 0 { Rational::one() } else { Rational::zero() })
        .collect();
    let tail = if depth % 2 == 1 {
        rational::ratio(1, 3)
    } else {
        rational::ratio(2, 3)
    };
    let p = PeriodizationSpec::annuli_on(&spec, weights.clone(), tail.clone())?;

    let integrals = spec
        .chain()
        .iter()
        .map(|m| gamma.integral_over_perp(m))
        .collect::<Result<Vec<_>>>()?;
    let annulus_integrals = (0..depth)
        .map(|m| LevelValue {
            level: m,
            value: &integrals[m] - &integrals[m + 1],
        })
        .collect();
    let exact = |s: Scalar| s.exact().cloned().expect("annuli are exact");
    let gamma_value = exact(eval_functional(&gamma, &p)?);
    let bound = pow2(n - 1).recip();
    let subgroup_values: Vec<LevelValue> = spec
        .chain()
        .iter()
        .enumerate()
        .map(|(m, sub)| {
            Ok(LevelValue {
                level: m,
                value: exact(eval_functional(&SubsetGamma::from_subgroup(&group, sub), &p)?),
            })
        })
        .collect::<Result<_>>()?;
    let subgroup_infimum = subgroup_values
        .iter()
        .map(|l| l.value.clone())
        .min()
        .expect("nonempty chain");

    let report = CounterexampleReport {
        n,
        depth,
        group: spec.to_string(),
        gamma: gamma.indices(),
        gamma_cardinality: gamma.len(),
        weights,
        tail,
        annulus_integrals,
        within_bound: gamma_value <= bound,
        gamma_value,
        bound,
        subgroup_values,
        subgroup_infimum,
    };
    Ok(Counterexample {
        spec,
        gamma,
        p,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn z2(n: usize) -> FiniteAbelianGroup {
        FiniteAbelianGroup::power(2, n).unwrap()
    }

    #[test]
    fn constant_one_integrates_to_one() {
        let g = z2(2);
        let p = PeriodizationSpec::constant(&g, int(1)).unwrap();
        for family in [Family::All, Family::Extreme, Family::Subgroups] {
            let r = inf_over_family(&g, &p, family).unwrap();
            assert_eq!(r.infimum, Scalar::Exact(int(1)));
            assert!(r.values.iter().all(|v| v.value == Scalar::Exact(int(1))));
        }
    }

    #[test]
    fn trivial_character_mass() {
        let g = z2(2);
        let p = PeriodizationSpec::dual_table(&g, vec![int(1), int(0), int(0), int(0)]).unwrap();
        let r = inf_over_family(&g, &p, Family::All).unwrap();
        assert_eq!(r.infimum, Scalar::Exact(ratio(1, 4)));
        assert_eq!(r.witness, vec![0]);
        for v in &r.values {
            assert_eq!(v.value, Scalar::Exact(ratio(v.gamma.len() as i64, 4)));
        }
    }

    #[test]
    fn parse_text_forms() {
        let p: PeriodizationSpec = "table:2^2;v=1,0,0,0".parse().unwrap();
        assert!(p.is_table());
        let p: PeriodizationSpec = "chain:prufer:2@3;w=1,0,1;tail=1/3".parse().unwrap();
        assert_eq!(p.chain().len(), 4);
        assert_eq!(p.ess_sup(), int(1));
        for bad in [
            "table:2^2;v=1,0,0",
            "table:2^2;v=1,0,0,-1",
            "chain:2^2;w=1;tail=1",
            "chain:2^2;w=1,1",
            "bogus:2^2;v=1",
            "table:2^^2;v=1",
            "table:2;v=1,1;x=2",
            "table:2;v=1,1;v=1,1",
        ] {
            assert!(bad.parse::<PeriodizationSpec>().is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn counting_matches_spectral() {
        let spec: GroupSpec = "2^3".parse().unwrap();
        let p = PeriodizationSpec::annuli_on(&spec, vec![int(2), ratio(1, 3), int(0)], ratio(5, 7)).unwrap();
        let table = p.to_dual_table();
        for mask in 1u32..256 {
            let idx: Vec<usize> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
            let gamma = SubsetGamma::from_indices(spec.group(), &idx).unwrap();
            assert_eq!(
                eval_functional(&gamma, &p).unwrap(),
                eval_functional(&gamma, &table).unwrap()
            );
        }
    }

    #[test]
    fn mismatch_rejected() {
        let p = PeriodizationSpec::constant(&z2(2), int(1)).unwrap();
        let gamma = SubsetGamma::from_indices(&z2(3), &[0]).unwrap();
        assert!(eval_functional(&gamma, &p).is_err());
        assert!(inf_over_family(&z2(3), &p, Family::All).is_err());
    }

    #[test]
    fn sufficiency_levels() {
        let p = PeriodizationSpec::constant(&z2(2), int(1)).unwrap();
        assert_eq!(sufficient_condition_check(&p, &int(1), None).unwrap(), Some(0));
        let spec = GroupSpec::prufer(2, 1).unwrap();
        let p = PeriodizationSpec::annuli_on(&spec, vec![int(0)], int(1)).unwrap();
        assert_eq!(sufficient_condition_check(&p, &int(1), None).unwrap(), Some(1));
        assert!(sufficient_condition_check(&p, &int(0), None).is_err());
        let zero = PeriodizationSpec::constant(&z2(1), int(0)).unwrap();
        assert_eq!(sufficient_condition_check(&zero, &int(1), None).unwrap(), None);
    }

    #[test]
    fn counterexample_small() {
        let c = build_counterexample(2).unwrap();
        assert_eq!(c.report.gamma, vec![0, 1, 4, 5]);
        assert_eq!(c.report.annulus_integrals[1].value, ratio(1, 2));
        assert!(c.report.within_bound);
        assert_eq!(c.report.gamma_value, ratio(1, 6));
        let c = build_counterexample(1).unwrap();
        assert_eq!(c.report.gamma_cardinality, 2);
        assert_eq!(c.report.gamma, vec![0, 1]);
        assert!(build_counterexample(0).is_err());
        assert!(build_counterexample(7).is_err());
    }

    #[test]
    fn counterexample_has_no_sufficient_level_below_n_minus_one() {
        for n in 2..=4 {
            let c = build_counterexample(n).unwrap();
            let depth = 2 * n - 1;
            let chain = &c.spec.chain()[..depth - 1];
            for c_val in [ratio(1, 100), ratio(1, 3), int(1)] {
                assert_eq!(sufficient_condition_check(&c.p, &c_val, Some(chain)).unwrap(), None);
            }
        }
    }
}
