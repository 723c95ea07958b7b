//! Autocorrelation vectors `v_Gamma(k) = card(Gamma ∩ (k + Gamma)) / card Gamma`
//! and the nonnegative function `g_Gamma` on the dual group whose Fourier
//! coefficients they are.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{Element, FiniteAbelianGroup, Subgroup};
use crate::rational::{self, Rational, Scalar};

/// Default cap on the group size accepted by [`enumerate_classes`].
pub const CLASS_ENUMERATION_BOUND: usize = 16;

/// Tolerance between the two floating evaluations of `g_Gamma`.
pub const SPECTRUM_TOLERANCE: f64 = 1e-9;

/// A nonempty subset of a finite group, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetGamma {
    group: FiniteAbelianGroup,
    elements: Vec<Element>,
}

impl SubsetGamma {
    pub fn new(group: &FiniteAbelianGroup, elements: impl IntoIterator<Item = Element>) -> Result<Self> {
        let mut elements: Vec<Element> = elements.into_iter().collect();
        if elements.is_empty() {
            return Err(Error::EmptySubset);
        }
        for &e in &elements {
            group.check(e)?;
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(SubsetGamma {
            group: group.clone(),
            elements,
        })
    }

    pub fn from_indices(group: &FiniteAbelianGroup, indices: &[usize]) -> Result<Self> {
        SubsetGamma::new(group, indices.iter().map(|&i| Element(i)))
    }

    pub fn from_subgroup(group: &FiniteAbelianGroup, m: &Subgroup) -> Self {
        SubsetGamma {
            group: group.clone(),
            elements: m.elements().to_vec(),
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn indices(&self) -> Vec<usize> {
        self.elements.iter().map(|e| e.0).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, e: Element) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    /// `m + Gamma`.
    pub fn translate(&self, m: Element) -> SubsetGamma {
        let mut elements: Vec<Element> = self.elements.iter().map(|&e| self.group.add(m, e)).collect();
        elements.sort_unstable();
        SubsetGamma {
            group: self.group.clone(),
            elements,
        }
    }

    /// Lexicographically smallest translate that contains 0.
    pub fn canonicalize(&self) -> SubsetGamma {
        self.elements
            .iter()
            .map(|&e| self.translate(self.group.neg(e)))
            .min_by(|a, b| a.elements.cmp(&b.elements))
            .expect("nonempty")
    }

    /// Unnormalized autocorrelation `c(k) = #{(a, b) in Gamma^2 : a - b = k}`.
    pub fn difference_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.group.cardinality()];
        for &a in &self.elements {
            for &b in &self.elements {
                counts[self.group.sub(a, b).0] += 1;
            }
        }
        counts
    }

    pub fn autocorr_vector(&self) -> AutocorrVector {
        AutocorrVector::from_counts(&self.group, &self.difference_counts())
    }

    /// `g_Gamma` at every dual element.
    pub fn g_spectrum(&self) -> GSpectrum {
        let g = &self.group;
        let counts = self.difference_counts();
        let support: Vec<(Element, usize)> = g
            .elements()
            .zip(counts.iter().copied())
            .filter(|&(_, c)| c > 0)
            .collect();
        let size = self.len() as f64;

        // |sum_{k in Gamma} chi_t(k)|^2 / card Gamma, evaluated directly.
        let direct: Vec<f64> = g
            .elements()
            .map(|t| {
                let (re, im) = self.elements.iter().fold((0.0, 0.0), |(re, im), &k| {
                    let (c, s) = g.character(k, t);
                    (re + c, im + s)
                });
                (re * re + im * im) / size
            })
            .collect();

        let values = if g.has_real_characters() {
            let den = BigInt::from(self.len());
            SpectrumValues::Exact(
                g.elements()
                    .map(|t| {
                        let sum: i64 = support
                            .iter()
                            .map(|&(k, c)| {
                                if g.phase_numerator(k, t) == 0 {
                                    c as i64
                                } else {
                                    -(c as i64)
                                }
                            })
                            .sum();
                        Rational::new(BigInt::from(sum), den.clone())
                    })
                    .collect(),
            )
        } else {
            SpectrumValues::Approx(
                g.elements()
                    .map(|t| {
                        support
                            .iter()
                            .map(|&(k, c)| c as f64 * g.character(k, t).0)
                            .sum::<f64>()
                            / size
                    })
                    .collect(),
            )
        };
        let cross_check_error = direct
            .iter()
            .enumerate()
            .map(|(i, d)| (d - values.get_f64(i)).abs())
            .fold(0.0, f64::max);
        GSpectrum {
            group: g.clone(),
            values,
            cross_check_error,
        }
    }

    /// `∫_{M^perp} g_Gamma` under the normalized Haar measure, by counting the
    /// pairs `(k, k')` in `Gamma^2` with `k - k'` in `M`.
    pub fn integral_over_perp(&self, m: &Subgroup) -> Result<Rational> {
        let member = self.subgroup_indicator(m)?;
        let pairs = self
            .elements
            .iter()
            .flat_map(|&a| self.elements.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| member[self.group.sub(a, b).0])
            .count();
        Ok(Rational::new(
            BigInt::from(pairs),
            BigInt::from(m.cardinality() * self.len()),
        ))
    }

    fn subgroup_indicator(&self, m: &Subgroup) -> Result<Vec<bool>> {
        let n = self.group.cardinality();
        if let Some(&bad) = m.elements().iter().find(|e| e.0 >= n) {
            return Err(Error::ElementOutOfRange {
                index: bad.0,
                cardinality: n,
            });
        }
        Ok(m.indicator(n))
    }

    /// `card(F \ (k + F)) / card F`.
    pub fn folner_defect(&self, k: Element) -> Result<Rational> {
        self.group.check(k)?;
        let shifted: Vec<bool> = {
            let mut out = vec![false; self.group.cardinality()];
            for &e in &self.elements {
                out[self.group.add(k, e).0] = true;
            }
            out
        };
        let outside = self.elements.iter().filter(|e| !shifted[e.0]).count();
        Ok(rational::ratio(outside as i64, self.len() as i64))
    }

    /// `(m, M)` with `Gamma = m + M` when `Gamma` is a coset, read off from a
    /// 0/1 autocorrelation vector.
    pub fn coset_of(&self) -> Option<(Element, Subgroup)> {
        let m = coset_from_zero_one_vector(&self.autocorr_vector()).ok()??;
        let offset = self.elements[0];
        let coset = SubsetGamma::from_subgroup(&self.group, &m).translate(offset);
        (coset.elements == self.elements).then_some((offset, m))
    }
}

/// Fourier coefficients of `g_Gamma`, one exact entry per group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AutocorrVector {
    group: FiniteAbelianGroup,
    entries: Vec<Rational>,
}

impl AutocorrVector {
    fn from_counts(group: &FiniteAbelianGroup, counts: &[usize]) -> Self {
        let size = BigInt::from(counts[0]);
        AutocorrVector {
            group: group.clone(),
            entries: counts
                .iter()
                .map(|&c| Rational::new(BigInt::from(c), size.clone()))
                .collect(),
        }
    }

    /// Checks `v(0) = 1`, entries in `[0, 1]` and `v(k) = v(-k)`.
    pub fn from_entries(group: &FiniteAbelianGroup, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != group.cardinality() {
            return Err(Error::DimensionMismatch {
                expected: group.cardinality(),
                got: entries.len(),
            });
        }
        if !entries[0].is_one() {
            return Err(Error::InvalidVector("entry at 0 must be 1".into()));
        }
        for (k, e) in group.elements().zip(&entries) {
            if !rational::in_unit_interval(e) {
                return Err(Error::InvalidVector(format!("entry at {k} outside [0, 1]")));
            }
            if *e != entries[group.neg(k).0] {
                return Err(Error::InvalidVector(format!("entry at {k} differs from its negative")));
            }
        }
        Ok(AutocorrVector {
            group: group.clone(),
            entries,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn entry(&self, k: Element) -> &Rational {
        &self.entries[k.0]
    }

    pub fn is_zero_one(&self) -> bool {
        self.entries.iter().all(rational::is_zero_or_one)
    }

    /// Elements with a nonzero entry: the difference set `Gamma - Gamma`.
    pub fn support(&self) -> Vec<Element> {
        self.group
            .elements()
            .filter(|k| !self.entries[k.0].is_zero())
            .collect()
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }
}

/// If every entry is 0 or 1, the support `M` is a subgroup and every `Gamma`
/// realizing the vector is a coset of `M`.
pub fn coset_from_zero_one_vector(v: &AutocorrVector) -> Result<Option<Subgroup>> {
    if !v.is_zero_one() {
        return Ok(None);
    }
    let support = v.support();
    if !v.group.is_subgroup(&support) {
        return Err(Error::InvalidVector(
            "0/1 vector whose support is not a subgroup cannot be realized".into(),
        ));
    }
    Ok(Some(v.group.subgroup_from_closed(support)))
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumValues {
    /// Groups of exponent at most 2: characters are `±1`.
    Exact(Vec<Rational>),
    Approx(Vec<f64>),
}

impl SpectrumValues {
    fn get_f64(&self, i: usize) -> f64 {
        match self {
            SpectrumValues::Exact(v) => rational::to_f64(&v[i]),
            SpectrumValues::Approx(v) => v[i],
        }
    }
}

/// `g_Gamma(t) = |sum_{k in Gamma} chi_t(k)|^2 / card Gamma` for every `t`.
#[derive(Clone, Debug)]
pub struct GSpectrum {
    group: FiniteAbelianGroup,
    values: SpectrumValues,
    cross_check_error: f64,
}

impl GSpectrum {
    pub fn values(&self) -> &SpectrumValues {
        &self.values
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, SpectrumValues::Exact(_))
    }

    pub fn value(&self, t: Element) -> Scalar {
        match &self.values {
            SpectrumValues::Exact(v) => Scalar::Exact(v[t.0].clone()),
            SpectrumValues::Approx(v) => Scalar::Approx(v[t.0]),
        }
    }

    pub fn value_f64(&self, t: Element) -> f64 {
        self.values.get_f64(t.0)
    }

    /// Largest gap between the coefficient expansion and the direct
    /// character-sum evaluation.
    pub fn cross_check_error(&self) -> f64 {
        self.cross_check_error
    }

    /// `(1 / card G) * sum_t g(t) * weight(t)`.
    pub fn weighted_mean(&self, weights: &[Rational]) -> Scalar {
        let n = self.group.cardinality() as i64;
        match &self.values {
            SpectrumValues::Exact(v) => Scalar::Exact(
                v.iter().zip(weights).map(|(a, w)| a * w).sum::<Rational>() / rational::int(n),
            ),
            SpectrumValues::Approx(v) => Scalar::Approx(
                v.iter()
                    .zip(weights)
                    .map(|(a, w)| a * rational::to_f64(w))
                    .sum::<f64>()
                    / n as f64,
            ),
        }
    }

    /// `∫_{S} g_Gamma` for a dual subgroup `S` (normally `M^perp`).
    pub fn integral_over(&self, dual_subgroup: &Subgroup) -> Scalar {
        let weights: Vec<Rational> = dual_subgroup
            .indicator(self.group.cardinality())
            .into_iter()
            .map(|b| if b { Rational::one() } else { Rational::zero() })
            .collect();
        self.weighted_mean(&weights)
    }

    /// `sum_t g(t)`, which equals `card G`.
    pub fn total(&self) -> Scalar {
        match &self.values {
            SpectrumValues::Exact(v) => Scalar::Exact(v.iter().sum()),
            SpectrumValues::Approx(v) => Scalar::Approx(v.iter().sum()),
        }
    }

    pub fn min_value(&self) -> Scalar {
        match &self.values {
            SpectrumValues::Exact(v) => Scalar::Exact(v.iter().min().cloned().unwrap_or_default()),
            SpectrumValues::Approx(v) => Scalar::Approx(v.iter().copied().fold(f64::INFINITY, f64::min)),
        }
    }

    pub fn has_negative_exact(&self) -> bool {
        matches!(&self.values, SpectrumValues::Exact(v) if v.iter().any(Signed::is_negative))
    }
}

/// One translation class of subsets: the distinct vector and its
/// lexicographically smallest representative containing 0.
#[derive(Clone, Debug)]
pub struct AutocorrClass {
    pub representative: SubsetGamma,
    pub vector: AutocorrVector,
}

#[derive(Clone, Debug)]
pub struct ClassEnumeration {
    pub group: FiniteAbelianGroup,
    /// Number of nonempty subsets of the group.
    pub total: u64,
    /// Distinct vectors, sorted by representative.
    pub classes: Vec<AutocorrClass>,
}

impl ClassEnumeration {
    pub fn distinct(&self) -> usize {
        self.classes.len()
    }
}

pub fn enumerate_classes(group: &FiniteAbelianGroup) -> Result<ClassEnumeration> {
    enumerate_classes_bounded(group, CLASS_ENUMERATION_BOUND)
}

/// Every translation class has a representative containing 0, so only those
/// `2^(card - 1)` subsets are visited. Vectors are deduplicated on the
/// integer difference counts: `sum_k v(k) = card Gamma`, so equal vectors
/// come from equal-size sets and equal counts.
pub fn enumerate_classes_bounded(group: &FiniteAbelianGroup, bound: usize) -> Result<ClassEnumeration> {
    let n = group.cardinality();
    if n > bound {
        return Err(Error::BoundExceeded {
            what: "class enumeration",
            cardinality: n,
            bound,
        });
    }
    if n > 63 {
        return Err(Error::BoundExceeded {
            what: "class enumeration (bitmask width)",
            cardinality: n,
            bound: 63,
        });
    }
    let masks: u64 = 1 << (n - 1);
    let subset_of = |mask: u64| -> Vec<Element> {
        std::iter::once(Element::ZERO)
            .chain((1..n).filter(|i| mask >> (i - 1) & 1 == 1).map(Element))
            .collect()
    };
    let counts_of = |elements: &[Element]| -> Vec<u16> {
        let mut counts = vec![0u16; n];
        for &a in elements {
            for &b in elements {
                counts[group.sub(a, b).0] += 1;
            }
        }
        counts
    };

    let merged: HashMap<Vec<u16>, Vec<Element>> = (0..masks)
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<Vec<u16>, Vec<Element>>, mask| {
            let elements = subset_of(mask);
            let key = counts_of(&elements);
            match acc.get_mut(&key) {
                Some(rep) if *rep <= elements => {}
                Some(rep) => *rep = elements,
                None => {
                    acc.insert(key, elements);
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (key, elements) in b {
                match a.get_mut(&key) {
                    Some(rep) if *rep <= elements => {}
                    Some(rep) => *rep = elements,
                    None => {
                        a.insert(key, elements);
                    }
                }
            }
            a
        });

    let mut classes: Vec<AutocorrClass> = merged
        .into_iter()
        .map(|(counts, elements)| {
            let counts: Vec<usize> = counts.into_iter().map(usize::from).collect();
            AutocorrClass {
                representative: SubsetGamma {
                    group: group.clone(),
                    elements,
                },
                vector: AutocorrVector::from_counts(group, &counts),
            }
        })
        .collect();
    classes.sort_by(|a, b| a.representative.elements.cmp(&b.representative.elements));
    Ok(ClassEnumeration {
        group: group.clone(),
        total: (1u64 << n) - 1,
        classes,
    })
}
