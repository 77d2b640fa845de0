//! Sparse polynomials in grouped, copy-indexed ternary variables.
//!
//! Every variable is a triple `(group, copy, index)`: six groups
//! (`x, y, z` and their duals `ξ, η, ζ`), three copies and three indices.
//! That fixes the universe at 54 variables, so a monomial is a packed
//! `[u8; 54]` exponent array and ordering of keys is the ordering of
//! `(group, copy, index)`.

mod omega;

pub use omega::{
    factorized_omega_trace, naive_omega_trace, omega_apply, omega_trace_product, OmegaSpec,
};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::tensor::Tensor333;

pub const NUM_GROUPS: usize = 6;
pub const NUM_COPIES: usize = 3;
pub const NUM_VARS: usize = NUM_GROUPS * NUM_COPIES * 3;

/// Optional magnitude floor for [`SparsePoly::prune`]; keeps denormals out.
pub const DENORMAL_PRUNE: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    X,
    Y,
    Z,
    Xi,
    Eta,
    Zeta,
}

impl Group {
    pub const ALL: [Group; NUM_GROUPS] = [
        Group::X,
        Group::Y,
        Group::Z,
        Group::Xi,
        Group::Eta,
        Group::Zeta,
    ];

    #[inline]
    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::X => "x",
            Group::Y => "y",
            Group::Z => "z",
            Group::Xi => "xi",
            Group::Eta => "eta",
            Group::Zeta => "zeta",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One ternary coordinate `v_index^(copy)`; `copy` and `index` are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub group: Group,
    pub copy: u8,
    pub index: u8,
}

impl VarId {
    pub fn new(group: Group, copy: u8, index: u8) -> Self {
        assert!(
            (1..=NUM_COPIES as u8).contains(&copy),
            "copy {copy} outside the declared universe"
        );
        assert!((1..=3).contains(&index), "index {index} is not ternary");
        Self { group, copy, index }
    }

    #[inline]
    pub(crate) fn slot(self) -> usize {
        slot(self.group, self.copy, self.index)
    }

    fn from_slot(s: usize) -> Self {
        Self {
            group: Group::ALL[s / 9],
            copy: ((s / 3) % 3) as u8 + 1,
            index: (s % 3) as u8 + 1,
        }
    }
}

#[inline]
pub(crate) fn slot(group: Group, copy: u8, index: u8) -> usize {
    (group.ordinal() * NUM_COPIES + (copy as usize - 1)) * 3 + (index as usize - 1)
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}.{}", self.group, self.index, self.copy)
    }
}

/// Exponent vector over the whole variable universe.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub(crate) [u8; NUM_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NUM_VARS]);

    pub fn var(v: VarId) -> Self {
        let mut m = Self::ONE;
        m.0[v.slot()] = 1;
        m
    }

    pub fn exponent(&self, v: VarId) -> u8 {
        self.0[v.slot()]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn degree_in(&self, group: Group, copy: u8) -> u32 {
        let base = slot(group, copy, 1);
        self.0[base..base + 3].iter().map(|&e| e as u32).sum()
    }

    /// Bitmask of copies carrying a nonzero exponent (bit `c − 1` for copy `c`).
    pub fn copies_used(&self) -> u8 {
        let mut mask = 0u8;
        for (s, &e) in self.0.iter().enumerate() {
            if e > 0 {
                mask |= 1 << ((s / 3) % 3);
            }
        }
        mask
    }

    pub fn vars(&self) -> impl Iterator<Item = (VarId, u8)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(s, &e)| (VarId::from_slot(s), e))
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        out
    }

    /// Partial derivative with respect to the variable at `slot`; returns the
    /// falling-factorial weight, or `None` when the variable is absent.
    #[inline]
    pub(crate) fn derive_slot(&mut self, slot: usize) -> Option<f64> {
        let e = self.0[slot];
        if e == 0 {
            return None;
        }
        self.0[slot] = e - 1;
        Some(e as f64)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, e) in self.vars() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{v}^{e}")?;
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Sparse polynomial with complex coefficients. Exact zeros are never stored.
#[derive(Clone, Default, PartialEq)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, Complex64>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn var(v: VarId) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(v), Complex64::new(1.0, 0.0));
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Complex64)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// `Σ_i v_i w_i` for two groups on the given copies.
    pub fn dot(a: Group, copy_a: u8, b: Group, copy_b: u8) -> Self {
        Self::from_terms((1..=3).map(|i| {
            let m = Monomial::var(VarId::new(a, copy_a, i)).times(&Monomial::var(VarId::new(
                b, copy_b, i,
            )));
            (m, Complex64::new(1.0, 0.0))
        }))
    }

    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v == Complex64::new(0.0, 0.0) {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// The value when the polynomial is a constant (including zero).
    pub fn constant_value(&self) -> Option<Complex64> {
        match self.terms.len() {
            0 => Some(Complex64::new(0.0, 0.0)),
            1 => self.terms.get(&Monomial::ONE).copied(),
            _ => None,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, v)| (*m, v * c)))
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Formal partial derivative `∂p/∂v`.
    pub fn diff(&self, v: VarId) -> Self {
        let s = v.slot();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut m = *m;
            if let Some(w) = m.derive_slot(s) {
                out.add_term(m, c * w);
            }
        }
        out
    }

    /// Olver's trace for one group: every copy of `group` collapses onto copy 1.
    pub fn trace_identify(&self, group: Group) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut n = *m;
            for copy in 2..=NUM_COPIES as u8 {
                for index in 1..=3 {
                    let from = slot(group, copy, index);
                    let to = slot(group, 1, index);
                    n.0[to] += n.0[from];
                    n.0[from] = 0;
                }
            }
            out.add_term(n, *c);
        }
        out
    }

    /// Trace over all six groups.
    pub fn trace_all(&self) -> Self {
        Group::ALL
            .iter()
            .fold(self.clone(), |p, &g| p.trace_identify(g))
    }

    /// Moves every variable on copy `from` to copy `to` (all groups).
    pub fn relabel_copy(&self, from: u8, to: u8) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut n = Monomial::ONE;
            for (v, e) in m.vars() {
                let copy = if v.copy == from { to } else { v.copy };
                n.0[slot(v.group, copy, v.index)] += e;
            }
            out.add_term(n, *c);
        }
        out
    }

    /// Substitutes variables group-wise: every `(g, copy, i)` becomes
    /// `(map[g], copy, i)`. `map` must be a permutation of the groups.
    pub fn rename_groups(&self, map: &[Group; NUM_GROUPS]) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut n = Monomial::ONE;
            for (v, e) in m.vars() {
                n.0[slot(map[v.group.ordinal()], v.copy, v.index)] += e;
            }
            out.add_term(n, *c);
        }
        out
    }

    /// Bitmask of copies used by any term.
    pub fn copies_used(&self) -> u8 {
        self.terms.keys().fold(0, |acc, m| acc | m.copies_used())
    }

    /// Maximum over terms of the degree in `(group, copy)`.
    pub fn max_degree_in(&self, group: Group, copy: u8) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree_in(group, copy))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, point: impl Fn(VarId) -> Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.vars()
                    .fold(*c, |acc, (v, e)| acc * point(v).powu(e as u32))
            })
            .sum()
    }

    /// Drops coefficients with magnitude below `eps`.
    pub fn prune(&mut self, eps: f64) {
        self.terms.retain(|_, c| c.norm() >= eps);
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &SparsePoly) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, c) in &self.terms {
            worst = worst.max((c - other.coeff(m)).norm());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Debug dump: one term per line, `coeff  var^exp var^exp ...`.
impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (m, c) in &self.terms {
            writeln!(f, "{c}  {m:?}")?;
        }
        Ok(())
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, *c);
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

/// `f(x, y, z) = Σ Γ_ijk x_i y_j z_k` on the given copy.
pub fn trilinear_form(t: &Tensor333, copy: u8) -> SparsePoly {
    let mut p = SparsePoly::zero();
    for i in 0..3u8 {
        for j in 0..3u8 {
            for k in 0..3u8 {
                let c = t.get(i as usize, j as usize, k as usize);
                let mut m = Monomial::ONE;
                m.0[slot(Group::X, copy, i + 1)] = 1;
                m.0[slot(Group::Y, copy, j + 1)] = 1;
                m.0[slot(Group::Z, copy, k + 1)] = 1;
                p.add_term(m, c);
            }
        }
    }
    p
}

/// `poly_mul`.
pub fn poly_mul(p: &SparsePoly, q: &SparsePoly) -> SparsePoly {
    p * q
}

/// `poly_diff`.
pub fn poly_diff(p: &SparsePoly, v: VarId) -> SparsePoly {
    p.diff(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u8) -> SparsePoly {
        SparsePoly::var(VarId::new(Group::X, 1, i))
    }

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn product_identities() {
        let p = &(&x(1) + &x(2)) * &SparsePoly::constant(c(2.0));
        assert_eq!(&p * &SparsePoly::one(), p);
        let diff_sq = &(&x(1) + &x(2)) * &(&x(1) - &x(2));
        let expect = &(&x(1) * &x(1)) - &(&x(2) * &x(2));
        assert_eq!(diff_sq, expect);
        assert_eq!(diff_sq.len(), 2);
    }

    #[test]
    fn derivatives() {
        let x1 = VarId::new(Group::X, 1, 1);
        let y1 = VarId::new(Group::Y, 1, 1);
        assert_eq!((&x(1) * &x(1)).diff(x1), x(1).scale(c(2.0)));
        assert!(SparsePoly::var(y1).diff(x1).is_zero());
    }

    #[test]
    fn trace_and_relabel() {
        let a = SparsePoly::var(VarId::new(Group::X, 1, 1));
        let b = SparsePoly::var(VarId::new(Group::X, 2, 1));
        assert_eq!((&a * &b).trace_identify(Group::X), &x(1) * &x(1));
        let k = SparsePoly::constant(c(3.0));
        assert_eq!(k.trace_all(), k);
        assert_eq!(a.relabel_copy(1, 3), SparsePoly::var(VarId::new(Group::X, 3, 1)));
    }

    #[test]
    fn dump_format() {
        let p = &x(1).scale(c(2.0)) * &x(2);
        assert_eq!(p.to_string(), "2+0i  x1.1^1 x2.1^1\n");
        assert_eq!(SparsePoly::zero().to_string(), "0\n");
    }

    #[test]
    fn exact_cancellation_prunes() {
        let p = &x(1) - &x(1);
        assert!(p.is_zero());
        assert_eq!(p.constant_value(), Some(c(0.0)));
    }
}
