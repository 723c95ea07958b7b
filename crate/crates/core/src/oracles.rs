//! Brute-force and closed-form cross-checks.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::autocorr::SubsetGamma;
use crate::error::{Error, Result};
use crate::group::{Element, FiniteAbelianGroup};
use crate::presentation::GroupSpec;
use crate::rational::{self, Rational};

/// Brute force against closed form in [`pi_ratio`].
pub const PI_TOLERANCE: f64 = 1e-9;
/// Largest `n` searched exhaustively by [`pi_ratio`].
pub const PI_BRUTE_FORCE_MAX_N: usize = 10;
/// Largest group handled by [`coset_characterization_bruteforce`].
pub const COSET_BRUTE_FORCE_BOUND: usize = 8;

/// A real rational function on a finite group, not identically zero.
#[derive(Clone, Debug)]
pub struct PsiTable {
    group: FiniteAbelianGroup,
    values: Vec<Rational>,
}

impl PsiTable {
    pub fn new(group: &FiniteAbelianGroup, values: Vec<Rational>) -> Result<Self> {
        if values.len() != group.cardinality() {
            return Err(Error::DimensionMismatch {
                expected: group.cardinality(),
                got: values.len(),
            });
        }
        if values.iter().all(Zero::is_zero) {
            return Err(Error::InvalidArgument("psi must not vanish identically".into()));
        }
        Ok(PsiTable {
            group: group.clone(),
            values,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `a(k) = sum_x psi(x) psi(x - k)`.
    pub fn autocorrelation(&self, k: Element) -> Rational {
        self.group
            .elements()
            .map(|x| &self.values[x.0] * &self.values[self.group.sub(x, k).0])
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParsevalResult {
    #[serde(with = "rational::serde_str")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
    pub equal: bool,
}

/// `(1/card Gamma) ||sum_{k in Gamma} T_k psi||^2` against
/// `sum_k v_Gamma(k) a_psi(k)`.
pub fn parseval_check(psi: &PsiTable, gamma: &SubsetGamma) -> Result<ParsevalResult> {
    let g = &psi.group;
    if gamma.group() != g {
        return Err(Error::GroupMismatch {
            left: g.to_string(),
            right: gamma.group().to_string(),
        });
    }
    let norm: Rational = g
        .elements()
        .map(|x| {
            let s: Rational = gamma.elements().iter().map(|&k| psi.values[g.sub(x, k).0].clone()).sum();
            &s * &s
        })
        .sum();
    let lhs = norm / rational::int(gamma.len() as i64);
    let v = gamma.autocorr_vector();
    let rhs: Rational = g
        .elements()
        .map(|k| v.entry(k) * psi.autocorrelation(k))
        .sum();
    Ok(ParsevalResult {
        equal: lhs == rhs,
        lhs,
        rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiRatio {
    pub n: usize,
    pub subset_max: f64,
    pub full_sum: f64,
    pub ratio: f64,
    pub closed_form: f64,
    /// Exhaustive subset maximum, for `n <= 10`.
    pub brute_force: Option<f64>,
}

/// Largest `|sum_{k in S} f_k|` over subsets `S`, `f_k = exp(pi i k / n)`,
/// compared with `|sum_k alpha_k f_k| = 2n` for `alpha_k = conj(f_k)`.
pub fn pi_ratio(n: usize) -> Result<PiRatio> {
    if n == 0 {
        return Err(Error::InvalidArgument("pi_ratio needs n >= 1".into()));
    }
    let len = 2 * n;
    let f: Vec<(f64, f64)> = (0..len)
        .map(|k| {
            let a = PI * k as f64 / n as f64;
            (a.cos(), a.sin())
        })
        .collect();
    let full: (f64, f64) = f
        .iter()
        .fold((0.0, 0.0), |(re, im), &(c, s)| (re + c * c + s * s, im + c * s - s * c));
    let full_sum = full.0.hypot(full.1);
    let closed_form = 1.0 / (PI / len as f64).sin();
    let brute_force = (n <= PI_BRUTE_FORCE_MAX_N).then(|| {
        // Gray-code walk: one element enters or leaves per step.
        let (mut re, mut im) = (0.0f64, 0.0f64);
        let mut best = 0.0f64;
        let mut prev = 0u64;
        for i in 1u64..1 << len {
            let gray = i ^ (i >> 1);
            let bit = (gray ^ prev).trailing_zeros() as usize;
            let sign = if gray >> bit & 1 == 1 { 1.0 } else { -1.0 };
            re += sign * f[bit].0;
            im += sign * f[bit].1;
            best = best.max(re.hypot(im));
            prev = gray;
        }
        best
    });
    let subset_max = brute_force.unwrap_or(closed_form);
    Ok(PiRatio {
        n,
        subset_max,
        full_sum,
        ratio: subset_max / full_sum,
        closed_form,
        brute_force,
    })
}

/// Gaussian binomial coefficient `(n choose k)_q`.
pub fn qbinomial(n: usize, k: usize, q: usize) -> Result<BigInt> {
    if k > n {
        return Err(Error::InvalidArgument(format!("qbinomial needs k <= n, got k={k}, n={n}")));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!("qbinomial needs q >= 2, got {q}")));
    }
    let q = BigInt::from(q);
    let mut out = BigInt::one();
    for i in 0..k {
        let num = q.pow((n - i) as u32) - 1u32;
        let den = q.pow((i + 1) as u32) - 1u32;
        let (quot, rem) = (out * num).div_rem(&den);
        debug_assert!(rem.is_zero());
        out = quot;
    }
    Ok(out)
}

/// Checks over every nonempty subset that a 0/1 autocorrelation vector
/// occurs exactly for cosets of subgroups.
pub fn coset_characterization_bruteforce(g: &FiniteAbelianGroup) -> Result<bool> {
    let n = g.cardinality();
    if n > COSET_BRUTE_FORCE_BOUND {
        return Err(Error::BoundExceeded {
            what: "coset brute force",
            cardinality: n,
            bound: COSET_BRUTE_FORCE_BOUND,
        });
    }
    for mask in 1u32..1 << n {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let gamma = SubsetGamma::from_indices(g, &idx)?;
        let zero_one = gamma.autocorr_vector().is_zero_one();
        let shift = g.neg(gamma.elements()[0]);
        let is_coset = g.is_subgroup(gamma.translate(shift).elements());
        if zero_one != is_coset {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralCheck {
    pub group: String,
    pub cases: usize,
    pub exact: bool,
    pub max_error: f64,
    pub passed: bool,
}

/// Counting integral against the spectral sum over `M^perp`, for every
/// nonempty `Gamma` and every subgroup `M`.
pub fn integral_equivalence_check(g: &FiniteAbelianGroup, tolerance: f64) -> Result<IntegralCheck> {
    let n = g.cardinality();
    if n > crate::autocorr::CLASS_ENUMERATION_BOUND {
        return Err(Error::BoundExceeded {
            what: "integral check",
            cardinality: n,
            bound: crate::autocorr::CLASS_ENUMERATION_BOUND,
        });
    }
    let subgroups = g.enumerate_subgroups()?;
    let perps: Vec<_> = subgroups.iter().map(|m| g.orthogonal_complement(m)).collect();
    let mut cases = 0;
    let mut max_error = 0.0f64;
    let mut exact_ok = true;
    for mask in 1u64..1 << n {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let gamma = SubsetGamma::from_indices(g, &idx)?;
        let spectrum = gamma.g_spectrum();
        for (m, perp) in subgroups.iter().zip(&perps) {
            let counted = gamma.integral_over_perp(m)?;
            let spectral = spectrum.integral_over(perp);
            match spectral.exact() {
                Some(s) => exact_ok &= *s == counted,
                None => max_error = max_error.max((spectral.to_f64() - rational::to_f64(&counted)).abs()),
            }
            cases += 1;
        }
    }
    Ok(IntegralCheck {
        group: g.to_string(),
        cases,
        exact: g.has_real_characters(),
        max_error,
        passed: exact_ok && max_error <= tolerance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FolnerCheck {
    pub group: String,
    pub chain_cases: usize,
    pub random_cases: usize,
    pub passed: bool,
}

/// `folner_defect(M_m, k) = 0` for `k` in `M_m` along the chain of `spec`,
/// and `1 - v_F(k) = folner_defect(F, k)` on random `(F, k)`.
pub fn folner_check(spec: &GroupSpec, samples: usize, rng: &mut impl Rng) -> Result<FolnerCheck> {
    let g = spec.group();
    let mut passed = true;
    let mut chain_cases = 0;
    for m in spec.chain() {
        let gamma = SubsetGamma::from_subgroup(g, m);
        for &k in m.elements() {
            passed &= gamma.folner_defect(k)?.is_zero();
            chain_cases += 1;
        }
    }
    for _ in 0..samples {
        let f = random_subset(g, rng)?;
        let k = Element(rng.gen_range(0..g.cardinality()));
        let v = f.autocorr_vector();
        passed &= Rational::one() - v.entry(k) == f.folner_defect(k)?;
    }
    Ok(FolnerCheck {
        group: spec.to_string(),
        chain_cases,
        random_cases: samples,
        passed,
    })
}

/// Uniform nonempty subset.
pub fn random_subset(g: &FiniteAbelianGroup, rng: &mut impl Rng) -> Result<SubsetGamma> {
    let n = g.cardinality();
    loop {
        let idx: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !idx.is_empty() {
            return SubsetGamma::from_indices(g, &idx);
        }
    }
}

/// Rational `psi` with small numerators and denominators, not all zero.
pub fn random_psi(g: &FiniteAbelianGroup, rng: &mut impl Rng) -> Result<PsiTable> {
    loop {
        let values: Vec<Rational> = (0..g.cardinality())
            .map(|_| rational::ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
            .collect();
        if values.iter().any(|v| !v.is_zero()) {
            return PsiTable::new(g, values);
        }
    }
}

/// Groups of cardinality at most 8 used for randomized checks.
pub fn small_groups() -> Vec<FiniteAbelianGroup> {
    [
        vec![2],
        vec![3],
        vec![4],
        vec![2, 2],
        vec![5],
        vec![6],
        vec![2, 3],
        vec![7],
        vec![8],
        vec![2, 4],
        vec![2, 2, 2],
    ]
    .into_iter()
    .map(|o| FiniteAbelianGroup::new(o).expect("valid orders"))
    .collect()
}

/// Named oracle suites run by the `check` command.
pub const SUITES: &[&str] = &["parseval", "pi-ratio", "qbinomial", "coset", "integrals", "folner", "subgroups"];

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub suite: String,
    pub passed: bool,
    pub detail: Value,
}

/// Runs one suite; randomized suites draw from `seed`.
pub fn run_suite(suite: &str, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (passed, detail) = match suite {
        "parseval" => {
            let groups = small_groups();
            let mut failures = 0;
            let instances = 500;
            for i in 0..instances {
                let g = &groups[i % groups.len()];
                let psi = random_psi(g, &mut rng)?;
                let gamma = random_subset(g, &mut rng)?;
                if !parseval_check(&psi, &gamma)?.equal {
                    failures += 1;
                }
            }
            (failures == 0, json!({"instances": instances, "failures": failures}))
        }
        "pi-ratio" => {
            let mut worst = 0.0f64;
            for n in 1..=PI_BRUTE_FORCE_MAX_N {
                let r = pi_ratio(n)?;
                worst = worst.max((r.brute_force.expect("small n") - r.closed_form).abs());
            }
            let r100 = pi_ratio(100)?;
            let gap = (r100.ratio - 1.0 / PI).abs();
            (
                worst <= PI_TOLERANCE && gap <= 1e-4,
                json!({"max_brute_force_error": worst, "tolerance": PI_TOLERANCE, "ratio_100": r100.ratio, "gap_to_inverse_pi": gap}),
            )
        }
        "qbinomial" => {
            let mut rows = Vec::new();
            let mut ok = true;
            for n in 0..=4 {
                let sum: BigInt = (0..=n).map(|k| qbinomial(n, k, 2)).sum::<Result<BigInt>>()?;
                let count = FiniteAbelianGroup::power(2, n)?.enumerate_subgroups()?.len();
                ok &= sum == BigInt::from(count);
                for k in 0..=n {
                    ok &= qbinomial(n, k, 2)? == qbinomial(n, n - k, 2)?;
                }
                rows.push(json!({"n": n, "row_sum": sum.to_string(), "subgroups": count}));
            }
            (ok, json!({"rows": rows}))
        }
        "coset" => {
            let mut ok = true;
            let mut groups = Vec::new();
            for orders in [vec![2, 2, 2], vec![6], vec![]] {
                let g = FiniteAbelianGroup::new(orders)?;
                ok &= coset_characterization_bruteforce(&g)?;
                groups.push(g.to_string());
            }
            (ok, json!({"groups": groups}))
        }
        "integrals" => {
            let mut ok = true;
            let mut reports = Vec::new();
            for orders in [vec![2, 2, 2], vec![4], vec![6]] {
                let r = integral_equivalence_check(&FiniteAbelianGroup::new(orders)?, crate::autocorr::SPECTRUM_TOLERANCE)?;
                ok &= r.passed;
                reports.push(serde_json::to_value(&r)?);
            }
            (ok, Value::Array(reports))
        }
        "folner" => {
            let mut ok = true;
            let mut reports = Vec::new();
            for spec in [GroupSpec::dyadic(4), GroupSpec::prufer(2, 4)?] {
                let r = folner_check(&spec, 200, &mut rng)?;
                ok &= r.passed;
                reports.push(serde_json::to_value(&r)?);
            }
            (ok, Value::Array(reports))
        }
        "subgroups" => {
            let expected = [1usize, 2, 5, 16, 67];
            let mut counts = Vec::new();
            for n in 0..=4 {
                counts.push(FiniteAbelianGroup::power(2, n)?.enumerate_subgroups()?.len());
            }
            let z3 = FiniteAbelianGroup::power(3, 2)?.enumerate_subgroups()?.len();
            (
                counts == expected && z3 == 6,
                json!({"dyadic": counts, "z3_squared": z3}),
            )
        }
        _ => return Err(Error::Parse(format!("unknown check suite {suite:?}"))),
    };
    Ok(CheckOutcome {
        suite: suite.to_string(),
        passed,
        detail,
    })
}
