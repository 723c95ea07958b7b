//! Finite abelian groups presented as direct sums of cyclic groups.
//!
//! Elements are addressed by their mixed-radix index: residue `j` has weight
//! `orders[0] * ... * orders[j-1]`, so in `Z_2^n` the index of an element is
//! its nim label and addition is bitwise xor. The dual group is identified
//! with the group itself through the pairing
//! `q(k, t) = sum_j t_j k_j / n_j (mod 1)`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Default cap on the cardinality accepted by [`FiniteAbelianGroup::enumerate_subgroups`].
pub const SUBGROUP_ENUMERATION_BOUND: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub usize);

impl Element {
    pub const ZERO: Element = Element(0);

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    orders: Vec<usize>,
    strides: Vec<usize>,
    cardinality: usize,
    exponent: usize,
}

impl FiniteAbelianGroup {
    /// `Z_{n_1} + ... + Z_{n_d}`. Every order must be at least 2; the empty
    /// list is the trivial group.
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if let Some(bad) = orders.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidGroup(format!(
                "cyclic factor of order {bad}; orders must be at least 2"
            )));
        }
        let mut strides = Vec::with_capacity(orders.len());
        let mut cardinality = 1usize;
        for &n in &orders {
            strides.push(cardinality);
            cardinality = cardinality
                .checked_mul(n)
                .ok_or_else(|| Error::InvalidGroup("cardinality overflows usize".into()))?;
        }
        let exponent = orders.iter().fold(1usize, |acc, &n| acc.lcm(&n));
        Ok(FiniteAbelianGroup {
            orders,
            strides,
            cardinality,
            exponent,
        })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup::new(Vec::new()).expect("trivial group")
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        FiniteAbelianGroup::new(vec![n])
    }

    /// `Z_p^rank`.
    pub fn power(order: usize, rank: usize) -> Result<Self> {
        FiniteAbelianGroup::new(vec![order; rank])
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    /// Every character takes values in `{1, -1}`.
    pub fn has_real_characters(&self) -> bool {
        self.exponent <= 2
    }

    pub fn identity(&self) -> Element {
        Element::ZERO
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.cardinality).map(Element)
    }

    pub fn check(&self, e: Element) -> Result<()> {
        if e.0 < self.cardinality {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                index: e.0,
                cardinality: self.cardinality,
            })
        }
    }

    pub fn element(&self, residues: &[usize]) -> Result<Element> {
        if residues.len() != self.orders.len() {
            return Err(Error::DimensionMismatch {
                expected: self.orders.len(),
                got: residues.len(),
            });
        }
        let mut index = 0;
        for ((&r, &n), &s) in residues.iter().zip(&self.orders).zip(&self.strides) {
            if r >= n {
                return Err(Error::InvalidArgument(format!(
                    "residue {r} out of range for Z_{n}"
                )));
            }
            index += r * s;
        }
        Ok(Element(index))
    }

    pub fn residues(&self, e: Element) -> Vec<usize> {
        let mut rest = e.0;
        self.orders
            .iter()
            .map(|&n| {
                let r = rest % n;
                rest /= n;
                r
            })
            .collect()
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        if self.exponent <= 2 {
            return Element(a.0 ^ b.0);
        }
        let (mut a, mut b) = (a.0, b.0);
        let mut out = 0;
        for (&n, &s) in self.orders.iter().zip(&self.strides) {
            let r = (a % n + b % n) % n;
            out += r * s;
            a /= n;
            b /= n;
        }
        Element(out)
    }

    pub fn neg(&self, a: Element) -> Element {
        if self.exponent <= 2 {
            return a;
        }
        let mut a = a.0;
        let mut out = 0;
        for (&n, &s) in self.orders.iter().zip(&self.strides) {
            let r = a % n;
            out += ((n - r) % n) * s;
            a /= n;
        }
        Element(out)
    }

    pub fn sub(&self, a: Element, b: Element) -> Element {
        if self.exponent <= 2 {
            return Element(a.0 ^ b.0);
        }
        let (mut a, mut b) = (a.0, b.0);
        let mut out = 0;
        for (&n, &s) in self.orders.iter().zip(&self.strides) {
            let r = (a % n + n - b % n) % n;
            out += r * s;
            a /= n;
            b /= n;
        }
        Element(out)
    }

    /// `m * a`.
    pub fn scale(&self, m: usize, a: Element) -> Element {
        let residues: Vec<usize> = self
            .residues(a)
            .iter()
            .zip(&self.orders)
            .map(|(&r, &n)| (r * (m % n)) % n)
            .collect();
        self.element(&residues).expect("residues reduced")
    }

    /// Least `m >= 1` with `m * a = 0`.
    pub fn order_of(&self, a: Element) -> usize {
        self.residues(a)
            .iter()
            .zip(&self.orders)
            .fold(1usize, |acc, (&r, &n)| acc.lcm(&(n / n.gcd(&r))))
    }

    /// Numerator of the pairing phase over the exponent:
    /// `q(k, t) = phase_numerator(k, t) / exponent`.
    pub fn phase_numerator(&self, k: Element, t: Element) -> usize {
        if self.exponent <= 2 {
            return ((k.0 & t.0).count_ones() & 1) as usize;
        }
        let (mut k, mut t) = (k.0, t.0);
        let mut acc = 0usize;
        for &n in &self.orders {
            let (kj, tj) = (k % n, t % n);
            acc = (acc + (kj * tj % n) * (self.exponent / n)) % self.exponent;
            k /= n;
            t /= n;
        }
        acc
    }

    /// Phase `q` in `[0, 1)` with `chi_t(k) = exp(2 pi i q)`.
    pub fn pairing(&self, k: Element, t: Element) -> Rational {
        rational::ratio(self.phase_numerator(k, t) as i64, self.exponent as i64)
    }

    /// `chi_t(k)` as `(re, im)`.
    pub fn character(&self, k: Element, t: Element) -> (f64, f64) {
        let num = self.phase_numerator(k, t);
        if self.exponent <= 2 {
            return (if num == 0 { 1.0 } else { -1.0 }, 0.0);
        }
        let angle = std::f64::consts::TAU * num as f64 / self.exponent as f64;
        (angle.cos(), angle.sin())
    }

    /// `<gens>`, by breadth-first closure under adding generators.
    pub fn generate_subgroup(&self, gens: &[Element]) -> Result<Subgroup> {
        for &g in gens {
            self.check(g)?;
        }
        Ok(self.closure(gens))
    }

    fn closure(&self, gens: &[Element]) -> Subgroup {
        let mut seen = vec![false; self.cardinality];
        let mut queue = VecDeque::from([Element::ZERO]);
        seen[0] = true;
        let mut elements = vec![Element::ZERO];
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.add(x, g);
                if !seen[y.0] {
                    seen[y.0] = true;
                    elements.push(y);
                    queue.push_back(y);
                }
            }
        }
        elements.sort_unstable();
        let mut generators = gens.to_vec();
        generators.sort_unstable();
        generators.dedup();
        Subgroup {
            elements,
            generators,
        }
    }

    /// All subgroups, sorted by `(cardinality, elements)`.
    pub fn enumerate_subgroups(&self) -> Result<Vec<Subgroup>> {
        self.enumerate_subgroups_bounded(SUBGROUP_ENUMERATION_BOUND)
    }

    pub fn enumerate_subgroups_bounded(&self, bound: usize) -> Result<Vec<Subgroup>> {
        if self.cardinality > bound {
            return Err(Error::BoundExceeded {
                what: "subgroup enumeration",
                cardinality: self.cardinality,
                bound,
            });
        }
        let trivial = self.closure(&[]);
        let mut seen: HashSet<Vec<Element>> = HashSet::from([trivial.elements.clone()]);
        let mut queue = VecDeque::from([trivial]);
        let mut out = Vec::new();
        while let Some(sub) = queue.pop_front() {
            // Extending by x and by x + s gives the same subgroup, so one
            // representative per coset of `sub` is enough.
            let mut covered = vec![false; self.cardinality];
            for &s in &sub.elements {
                covered[s.0] = true;
            }
            for x in self.elements() {
                if covered[x.0] {
                    continue;
                }
                for &s in &sub.elements {
                    covered[self.add(x, s).0] = true;
                }
                let mut gens = sub.generators.clone();
                gens.push(x);
                let ext = self.closure(&gens);
                if seen.insert(ext.elements.clone()) {
                    queue.push_back(ext);
                }
            }
            out.push(sub);
        }
        out.sort_by(|a, b| {
            (a.cardinality(), &a.elements).cmp(&(b.cardinality(), &b.elements))
        });
        Ok(out)
    }

    /// `M^perp = { t : q(k, t) = 0 for all k in M }` in the self-dual labelling.
    pub fn orthogonal_complement(&self, m: &Subgroup) -> Subgroup {
        // Characters are homomorphisms, so vanishing on generators suffices.
        let test: &[Element] = if m.generators.is_empty() {
            &m.elements
        } else {
            &m.generators
        };
        let elements: Vec<Element> = self
            .elements()
            .filter(|&t| test.iter().all(|&k| self.phase_numerator(k, t) == 0))
            .collect();
        let generators = elements.clone();
        Subgroup {
            elements,
            generators,
        }
    }

    /// `M_j = Z_{n_1} + ... + Z_{n_j} + 0 + ...` for `j = 0..=rank`.
    pub fn coordinate_chain(&self) -> Vec<Subgroup> {
        (0..=self.rank())
            .map(|j| {
                let size = if j == self.rank() {
                    self.cardinality
                } else {
                    self.strides[j]
                };
                Subgroup {
                    elements: (0..size).map(Element).collect(),
                    generators: self.strides[..j].iter().map(|&s| Element(s)).collect(),
                }
            })
            .collect()
    }

    /// Whether `set` (any order, no duplicates required) is a subgroup.
    pub fn is_subgroup(&self, set: &[Element]) -> bool {
        let mut member = vec![false; self.cardinality];
        for &x in set {
            if x.0 >= self.cardinality {
                return false;
            }
            member[x.0] = true;
        }
        if !member[0] {
            return false;
        }
        let members: Vec<Element> = self.elements().filter(|x| member[x.0]).collect();
        members
            .iter()
            .all(|&a| members.iter().all(|&b| member[self.sub(a, b).0]))
    }

    /// Subgroup from a set already known to be closed.
    pub(crate) fn subgroup_from_closed(&self, mut elements: Vec<Element>) -> Subgroup {
        elements.sort_unstable();
        elements.dedup();
        Subgroup {
            generators: elements.clone(),
            elements,
        }
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "Z_1");
        }
        let parts: Vec<String> = self.orders.iter().map(|n| format!("Z_{n}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// A subgroup given by its sorted element list. Equality and ordering look
/// at the elements only.
#[derive(Clone, Debug)]
pub struct Subgroup {
    elements: Vec<Element>,
    generators: Vec<Element>,
}

impl Subgroup {
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn cardinality(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: Element) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&e| other.contains(e))
    }

    /// Membership table indexed by element.
    pub fn indicator(&self, cardinality: usize) -> Vec<bool> {
        let mut out = vec![false; cardinality];
        for &e in &self.elements {
            out[e.0] = true;
        }
        out
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.elements.hash(state)
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `Z_{p^depth}` with the chain `M_0 < M_1 < ... < M_depth`, where `M_m` is
/// the multiples of `p^(depth - m)` (so `M_m ~ Z_{p^m}`).
pub fn prufer_truncation(p: usize, depth: usize) -> Result<(FiniteAbelianGroup, Vec<Subgroup>)> {
    if !is_prime(p) {
        return Err(Error::InvalidGroup(format!("{p} is not prime")));
    }
    let order = u32::try_from(depth)
        .ok()
        .and_then(|d| p.checked_pow(d))
        .ok_or_else(|| Error::InvalidGroup(format!("{p}^{depth} overflows")))?;
    let group = if depth == 0 {
        FiniteAbelianGroup::trivial()
    } else {
        FiniteAbelianGroup::cyclic(order)?
    };
    let chain = (0..=depth)
        .map(|m| {
            let step = p.pow((depth - m) as u32) % order.max(1);
            group.closure(&[Element(step)])
        })
        .collect();
    Ok((group, chain))
}
