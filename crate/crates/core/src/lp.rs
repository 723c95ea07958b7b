//! Exact convex-membership LP: is `target` a convex combination of the
//! candidate vectors?
//!
//! Variables `gamma_j >= 0` with `sum_j gamma_j = 1` and
//! `sum_j gamma_j v_j = target`, decided by a phase-1 revised simplex over
//! exact rationals with Bland's rule. A feasible basis gives the weights; an
//! infeasible optimum gives dual values that define a separating affine
//! functional. Both certificates are checked before they are returned.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Nonnegative weights (by candidate index) summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexCombination {
    pub weights: Vec<(usize, Rational)>,
}

impl ConvexCombination {
    pub fn verify(&self, target: &[Rational], candidates: &[Vec<Rational>]) -> Result<()> {
        let mut total = Rational::zero();
        let mut point = vec![Rational::zero(); target.len()];
        for (j, w) in &self.weights {
            if w.is_negative() {
                return Err(Error::Certificate(format!("negative weight on candidate {j}")));
            }
            let v = candidates
                .get(*j)
                .ok_or_else(|| Error::Certificate(format!("no candidate {j}")))?;
            if v.len() != target.len() {
                return Err(Error::DimensionMismatch {
                    expected: target.len(),
                    got: v.len(),
                });
            }
            total += w;
            for (p, x) in point.iter_mut().zip(v) {
                *p += w * x;
            }
        }
        if !total.is_one() {
            return Err(Error::Certificate(format!(
                "weights sum to {}",
                rational::format(&total)
            )));
        }
        if point != target {
            return Err(Error::Certificate("combination does not reproduce the target".into()));
        }
        Ok(())
    }
}

/// `f(x) = normal . x + offset` with `f(target) > 0 >= f(v)` for every candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatingFunctional {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl SeparatingFunctional {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>() + &self.offset
    }

    pub fn verify<'a>(
        &self,
        target: &[Rational],
        others: impl IntoIterator<Item = &'a [Rational]>,
    ) -> Result<()> {
        if !self.eval(target).is_positive() {
            return Err(Error::Certificate("functional is not positive at the target".into()));
        }
        for (j, v) in others.into_iter().enumerate() {
            if self.eval(v).is_positive() {
                return Err(Error::Certificate(format!("functional positive at candidate {j}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Inside(ConvexCombination),
    Outside(SeparatingFunctional),
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside(_))
    }
}

/// Decides `target ∈ conv(candidates)` exactly.
pub fn lp_convex_membership(target: &[Rational], candidates: &[Vec<Rational>]) -> Result<Membership> {
    let dim = target.len();
    for v in candidates {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    let refs: Vec<&[Rational]> = candidates.iter().map(Vec::as_slice).collect();
    let out = decide(target, &refs)?;
    match &out {
        Membership::Inside(c) => c.verify(target, candidates)?,
        Membership::Outside(f) => f.verify(target, refs.iter().copied())?,
    }
    Ok(out)
}

/// Extreme bound hit by the target in one coordinate.
#[derive(Clone)]
enum Face {
    Min(Rational),
    Max(Rational),
}

pub(crate) fn decide(target: &[Rational], candidates: &[&[Rational]]) -> Result<Membership> {
    let dim = target.len();

    // A candidate strictly above the target in a coordinate where the target
    // sits at the candidates' minimum (or below it at their maximum) can only
    // carry weight 0.
    let mut faces: Vec<(usize, Face)> = Vec::new();
    if !candidates.is_empty() {
        for i in 0..dim {
            let lo = candidates.iter().map(|v| &v[i]).min().expect("nonempty");
            let hi = candidates.iter().map(|v| &v[i]).max().expect("nonempty");
            if target[i] == *lo && lo != hi {
                faces.push((i, Face::Min(lo.clone())));
            } else if target[i] == *hi && lo != hi {
                faces.push((i, Face::Max(hi.clone())));
            }
        }
    }
    let slack = |v: &[Rational]| -> Rational {
        faces
            .iter()
            .map(|(i, face)| match face {
                Face::Min(lo) => &v[*i] - lo,
                Face::Max(hi) => hi - &v[*i],
            })
            .sum()
    };
    let kept: Vec<usize> = (0..candidates.len())
        .filter(|&j| slack(candidates[j]).is_zero())
        .collect();

    // Coordinates that all kept candidates already agree on with the target
    // are implied by the convexity row.
    let mut rows: Vec<usize> = (0..dim)
        .filter(|&i| kept.iter().any(|&j| candidates[j][i] != target[i]))
        .collect();
    // Identical rows are redundant.
    {
        let mut seen: Vec<usize> = Vec::new();
        rows.retain(|&i| {
            let dup = seen.iter().any(|&r| {
                target[r] == target[i] && kept.iter().all(|&j| candidates[j][r] == candidates[j][i])
            });
            if !dup {
                seen.push(i);
            }
            !dup
        });
    }

    let mut functional = if kept.is_empty() {
        SeparatingFunctional {
            normal: vec![Rational::zero(); dim],
            offset: Rational::one(),
        }
    } else {
        // Row 0 is the convexity constraint.
        let mut rhs = Vec::with_capacity(rows.len() + 1);
        rhs.push(Rational::one());
        rhs.extend(rows.iter().map(|&i| target[i].clone()));
        let mut scales = Vec::with_capacity(kept.len());
        let columns: Vec<Vec<BigInt>> = kept
            .iter()
            .map(|&j| {
                let v = candidates[j];
                let scale = rows
                    .iter()
                    .fold(BigInt::one(), |acc, &i| acc.lcm(v[i].denom()));
                let mut col = Vec::with_capacity(rows.len() + 1);
                col.push(scale.clone());
                col.extend(rows.iter().map(|&i| (&v[i] * &scale).to_integer()));
                scales.push(scale);
                col
            })
            .collect();
        match phase_one(&columns, &rhs) {
            PhaseOne::Feasible(x) => {
                let weights = kept
                    .iter()
                    .zip(x)
                    .zip(&scales)
                    .filter(|((_, xj), _)| !xj.is_zero())
                    .map(|((&j, xj), s)| (j, xj * Rational::from_integer(s.clone())))
                    .collect();
                return Ok(Membership::Inside(ConvexCombination { weights }));
            }
            PhaseOne::Infeasible(duals) => {
                let mut normal = vec![Rational::zero(); dim];
                for (&i, y) in rows.iter().zip(&duals[1..]) {
                    normal[i] = y.clone();
                }
                SeparatingFunctional {
                    normal,
                    offset: duals[0].clone(),
                }
            }
        }
    };

    // Lift over the pruned candidates: subtract a multiple of the slack,
    // which vanishes at the target and on kept candidates.
    let mut penalty = Rational::zero();
    for v in candidates {
        let s = slack(v);
        if s.is_zero() {
            continue;
        }
        let need = functional.eval(v) / s;
        if need > penalty {
            penalty = need;
        }
    }
    if penalty.is_positive() {
        for (i, face) in &faces {
            match face {
                Face::Min(lo) => {
                    functional.normal[*i] -= &penalty;
                    functional.offset += &penalty * lo;
                }
                Face::Max(hi) => {
                    functional.normal[*i] += &penalty;
                    functional.offset -= &penalty * hi;
                }
            }
        }
    }
    Ok(Membership::Outside(functional))
}

enum PhaseOne {
    /// Values of the structural variables.
    Feasible(Vec<Rational>),
    /// Dual values `y` with `y . A_j <= 0` for all columns and `y . b > 0`.
    Infeasible(Vec<Rational>),
}

/// Phase-1 revised simplex on `A x = b, x >= 0` with one artificial per row,
/// Bland's rule for entering and leaving variables. Columns are integer.
fn phase_one(columns: &[Vec<BigInt>], rhs: &[Rational]) -> PhaseOne {
    let m = rhs.len();
    let n = columns.len();

    // Make b >= 0 by flipping rows.
    let flip: Vec<bool> = rhs.iter().map(Signed::is_negative).collect();
    let b: Vec<Rational> = rhs.iter().map(Rational::abs).collect();
    let cols: Vec<Vec<BigInt>> = columns
        .iter()
        .map(|c| {
            c.iter()
                .zip(&flip)
                .map(|(a, &f)| if f { -a } else { a.clone() })
                .collect()
        })
        .collect();
    let small: Vec<Option<Vec<i128>>> = cols
        .iter()
        .map(|c| c.iter().map(|a| a.to_i64().map(i128::from)).collect())
        .collect();

    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut in_basis = vec![false; n];
    let mut binv: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|k| if i == k { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let mut x = b.clone();

    let duals = loop {
        // y = c_B^T B^{-1}; artificials cost 1, structurals 0.
        let mut y = vec![Rational::zero(); m];
        for (i, &var) in basis.iter().enumerate() {
            if var >= n {
                for (yk, bk) in y.iter_mut().zip(&binv[i]) {
                    *yk += bk;
                }
            }
        }
        let den = y.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ynum: Vec<BigInt> = y.iter().map(|r| (r * &den).to_integer()).collect();
        let ysmall: Option<Vec<i128>> = ynum
            .iter()
            .map(|v| v.to_i128().filter(|v| v.unsigned_abs() < 1u128 << 100))
            .collect();

        let improves = |j: usize| -> bool {
            if let (Some(ys), Some(cs)) = (&ysmall, &small[j]) {
                let mut acc: i128 = 0;
                let mut ok = true;
                for (a, c) in ys.iter().zip(cs) {
                    match a.checked_mul(*c).and_then(|p| acc.checked_add(p)) {
                        Some(v) => acc = v,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    return acc > 0;
                }
            }
            let dot: BigInt = ynum.iter().zip(&cols[j]).map(|(a, c)| a * c).sum();
            dot.is_positive()
        };
        let Some(entering) = (0..n).find(|&j| !in_basis[j] && improves(j)) else {
            break y;
        };

        let col = &cols[entering];
        let u: Vec<Rational> = binv
            .iter()
            .map(|row| {
                let l = den_lcm(row);
                let num: BigInt = row
                    .iter()
                    .zip(col)
                    .filter(|(r, a)| !r.is_zero() && !a.is_zero())
                    .map(|(r, a)| r.numer() * a * (&l / r.denom()))
                    .sum();
                Rational::new(num, l)
            })
            .collect();

        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !u[i].is_positive() {
                continue;
            }
            let ratio = &x[i] / &u[i];
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase 1 is bounded below, so an entering column always has a
        // positive entry.
        let (r, _) = leave.expect("phase-1 objective is bounded");

        let pivot = u[r].clone();
        for v in binv[r].iter_mut() {
            *v /= &pivot;
        }
        x[r] /= &pivot;
        let pivot_row = binv[r].clone();
        let pivot_x = x[r].clone();
        for i in 0..m {
            if i == r || u[i].is_zero() {
                continue;
            }
            for (v, p) in binv[i].iter_mut().zip(&pivot_row) {
                *v -= &u[i] * p;
            }
            x[i] -= &u[i] * &pivot_x;
        }
        if basis[r] < n {
            in_basis[basis[r]] = false;
        }
        basis[r] = entering;
        in_basis[entering] = true;
    };

    let infeasibility: Rational = basis
        .iter()
        .zip(&x)
        .filter(|(&var, _)| var >= n)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_zero() {
        let mut values = vec![Rational::zero(); n];
        for (&var, v) in basis.iter().zip(x) {
            if var < n {
                values[var] = v;
            }
        }
        PhaseOne::Feasible(values)
    } else {
        PhaseOne::Infeasible(
            duals
                .into_iter()
                .zip(&flip)
                .map(|(y, &f)| if f { -y } else { y })
                .collect(),
        )
    }
}

fn den_lcm(row: &[Rational]) -> BigInt {
    row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn v(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(a, b)| ratio(a, b)).collect()
    }

    #[test]
    fn third_two_thirds_identity() {
        let target = v(&[(1, 1), (2, 3), (2, 3), (2, 3)]);
        let cands = vec![v(&[(1, 1), (0, 1), (0, 1), (0, 1)]), v(&[(1, 1), (1, 1), (1, 1), (1, 1)])];
        match lp_convex_membership(&target, &cands).unwrap() {
            Membership::Inside(c) => {
                assert_eq!(c.weights, vec![(0, ratio(1, 3)), (1, ratio(2, 3))]);
            }
            other => panic!("expected inside, got {other:?}"),
        }
    }

    #[test]
    fn cube_vertex_is_outside() {
        let target = v(&[(1, 1), (0, 1), (1, 1)]);
        let cands = vec![
            v(&[(1, 2), (1, 2), (1, 2)]),
            v(&[(1, 3), (0, 1), (2, 3)]),
            v(&[(1, 1), (1, 4), (1, 1)]),
        ];
        assert!(!lp_convex_membership(&target, &cands).unwrap().is_inside());
    }

    #[test]
    fn midpoint() {
        let target = v(&[(1, 2), (1, 2)]);
        let cands = vec![v(&[(0, 1), (1, 1)]), v(&[(1, 1), (0, 1)]), v(&[(0, 1), (0, 1)])];
        match lp_convex_membership(&target, &cands).unwrap() {
            Membership::Inside(c) => {
                assert_eq!(c.weights, vec![(0, ratio(1, 2)), (1, ratio(1, 2))]);
            }
            other => panic!("expected inside, got {other:?}"),
        }
    }

    #[test]
    fn negative_coordinates_and_no_pruning() {
        // Square with vertices (±1, ±1); (0, 0) inside, (2, 0) outside.
        let sq = vec![
            vec![int(-1), int(-1)],
            vec![int(-1), int(1)],
            vec![int(1), int(-1)],
            vec![int(1), int(1)],
        ];
        assert!(lp_convex_membership(&[int(0), int(0)], &sq).unwrap().is_inside());
        assert!(!lp_convex_membership(&[int(2), int(0)], &sq).unwrap().is_inside());
        assert!(!lp_convex_membership(&[int(-2), ratio(1, 3)], &sq).unwrap().is_inside());
    }

    #[test]
    fn empty_candidates_and_mismatch() {
        assert!(!lp_convex_membership(&[int(1)], &[]).unwrap().is_inside());
        assert!(matches!(
            lp_convex_membership(&[int(1)], &[vec![int(1), int(2)]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn degenerate_repeated_points() {
        let target = v(&[(1, 3), (1, 3)]);
        let cands = vec![
            v(&[(0, 1), (0, 1)]),
            v(&[(0, 1), (0, 1)]),
            v(&[(1, 1), (0, 1)]),
            v(&[(0, 1), (1, 1)]),
            v(&[(1, 1), (0, 1)]),
        ];
        assert!(lp_convex_membership(&target, &cands).unwrap().is_inside());
    }
}
