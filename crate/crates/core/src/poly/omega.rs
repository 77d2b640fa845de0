//! Cayley's Ω process.
//!
//! `Ω_v = det(∂/∂v_i^(c_j))` is expanded over the six permutations of
//! `{1, 2, 3}`: `Σ_σ sgn(σ) ∂v_σ(1)^(c1) ∂v_σ(2)^(c2) ∂v_σ(3)^(c3)`. A power
//! `Ω_v^k` is `k` independent applications.
//!
//! Two evaluation routes are provided. [`naive_omega_trace`] multiplies the
//! per-copy factors out and differentiates the expanded product.
//! [`omega_trace_product`] and [`factorized_omega_trace`] never expand the
//! product: every derivative in copy `c` only touches factor `c`, so each
//! signed permutation tuple splits into three independent per-copy
//! derivatives.

use std::collections::HashMap;

use num_complex::Complex64;

use super::{slot, Group, SparsePoly, NUM_COPIES, NUM_GROUPS};
#[cfg(test)]
use super::Monomial;
use crate::error::{Error, Result};

/// An Ω monomial such as `Ω_x² Ω_y Ω_z`, listed as `(group, power)` pairs.
pub type OmegaSpec<'a> = &'a [(Group, u32)];

const PERMS: [([u8; 3], f64); 6] = [
    ([0, 1, 2], 1.0),
    ([1, 2, 0], 1.0),
    ([2, 0, 1], 1.0),
    ([0, 2, 1], -1.0),
    ([2, 1, 0], -1.0),
    ([1, 0, 2], -1.0),
];

/// Per-copy derivative multi-index: count per `(group, index)`.
type Counts = [u8; NUM_GROUPS * 3];

/// Applies `Ω_group^power` with the determinant columns on `copies`.
pub fn omega_apply(p: &SparsePoly, group: Group, copies: [u8; 3], power: u32) -> SparsePoly {
    let slots: Vec<[usize; 3]> = PERMS
        .iter()
        .map(|(perm, _)| {
            [0, 1, 2].map(|j| slot(group, copies[j], perm[j] + 1))
        })
        .collect();
    let mut cur = p.clone();
    for _ in 0..power {
        let mut next = SparsePoly::zero();
        for (m, c) in cur.terms() {
            'perm: for (s, (_, sign)) in slots.iter().zip(PERMS.iter()) {
                let mut mm = *m;
                let mut w = c * sign;
                for &sl in s {
                    match mm.derive_slot(sl) {
                        Some(f) => w *= f,
                        None => continue 'perm,
                    }
                }
                next.add_term(mm, w);
            }
        }
        cur = next;
    }
    cur
}

/// Reference route: expand `∏ factors`, apply every Ω, then take the trace.
pub fn naive_omega_trace(factors: &[SparsePoly], ops: OmegaSpec) -> SparsePoly {
    let mut p = factors.iter().fold(SparsePoly::one(), |acc, f| &acc * f);
    for &(g, power) in ops {
        p = omega_apply(&p, g, [1, 2, 3], power);
    }
    p.trace_all()
}

fn check_copies(factors: &[SparsePoly]) -> Result<()> {
    if factors.len() != NUM_COPIES {
        return Err(Error::InvalidArgument(format!(
            "expected {NUM_COPIES} per-copy factors, got {}",
            factors.len()
        )));
    }
    for (i, f) in factors.iter().enumerate() {
        if f.copies_used() & !(1u8 << i) != 0 {
            return Err(Error::MixedCopies { factor: i });
        }
    }
    Ok(())
}

fn expand_ops(ops: OmegaSpec) -> Vec<Group> {
    ops.iter()
        .flat_map(|&(g, k)| std::iter::repeat_n(g, k as usize))
        .collect()
}

/// Largest exponent of every `(group, index)` in each factor; derivative
/// tuples exceeding it vanish and are pruned early.
fn exponent_caps(factors: &[SparsePoly]) -> [Counts; NUM_COPIES] {
    let mut caps = [[0u8; NUM_GROUPS * 3]; NUM_COPIES];
    for (c, f) in factors.iter().enumerate() {
        for (m, _) in f.terms() {
            for g in Group::ALL {
                for i in 0..3u8 {
                    let e = m.0[slot(g, c as u8 + 1, i + 1)];
                    let k = g.ordinal() * 3 + i as usize;
                    caps[c][k] = caps[c][k].max(e);
                }
            }
        }
    }
    caps
}

/// Walks every signed permutation tuple of the expanded Ω monomial and calls
/// `leaf` with the per-copy derivative multi-indices.
fn for_each_tuple(
    ops: &[Group],
    caps: &[Counts; NUM_COPIES],
    leaf: &mut impl FnMut(&[Counts; NUM_COPIES], f64),
) {
    fn rec(
        ops: &[Group],
        caps: &[Counts; NUM_COPIES],
        counts: &mut [Counts; NUM_COPIES],
        sign: f64,
        leaf: &mut impl FnMut(&[Counts; NUM_COPIES], f64),
    ) {
        let Some((&g, rest)) = ops.split_first() else {
            leaf(counts, sign);
            return;
        };
        for (perm, s) in PERMS.iter() {
            let keys = [0, 1, 2].map(|c| g.ordinal() * 3 + perm[c] as usize);
            let alive = (0..NUM_COPIES).all(|c| counts[c][keys[c]] < caps[c][keys[c]]);
            if !alive {
                continue;
            }
            for c in 0..NUM_COPIES {
                counts[c][keys[c]] += 1;
            }
            rec(rest, caps, counts, sign * s, leaf);
            for c in 0..NUM_COPIES {
                counts[c][keys[c]] -= 1;
            }
        }
    }
    let mut counts = [[0u8; NUM_GROUPS * 3]; NUM_COPIES];
    rec(ops, caps, &mut counts, 1.0, leaf);
}

fn derive_multi(p: &SparsePoly, copy: u8, counts: &Counts) -> SparsePoly {
    let mut out = SparsePoly::zero();
    'term: for (m, c) in p.terms() {
        let mut mm = *m;
        let mut w = *c;
        for (k, &n) in counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let sl = slot(Group::ALL[k / 3], copy, (k % 3) as u8 + 1);
            for _ in 0..n {
                match mm.derive_slot(sl) {
                    Some(f) => w *= f,
                    None => continue 'term,
                }
            }
        }
        out.add_term(mm, w);
    }
    out
}

/// `tr Ω… (F₁ F₂ F₃)` without expanding the product. Factor `i` must live on
/// copy `i + 1`; the result is traced over every group.
pub fn omega_trace_product(factors: &[SparsePoly], ops: OmegaSpec) -> Result<SparsePoly> {
    check_copies(factors)?;
    let seq = expand_ops(ops);
    let caps = exponent_caps(factors);
    let mut memo: HashMap<(usize, Counts), SparsePoly> = HashMap::new();
    let mut out = SparsePoly::zero();
    for_each_tuple(&seq, &caps, &mut |counts, sign| {
        let mut prod = SparsePoly::constant(Complex64::new(sign, 0.0));
        for (c, counts_c) in counts.iter().enumerate() {
            let d = memo
                .entry((c, *counts_c))
                .or_insert_with(|| derive_multi(&factors[c], c as u8 + 1, counts_c).trace_all());
            if d.is_zero() {
                return;
            }
            prod = &prod * d;
        }
        for (m, v) in prod.terms() {
            out.add_term(*m, *v);
        }
    });
    Ok(out)
}

/// Scalar Ω evaluation `tr Ω… (F₁ F₂ F₃)` for a fully contracting spec.
///
/// A fully differentiated monomial `v^α` contributes `α!` exactly when its
/// multi-index equals the derivative multi-index, so each factor reduces to
/// a lookup table and every tuple to three lookups.
pub fn factorized_omega_trace(factors: &[SparsePoly], ops: OmegaSpec) -> Result<Complex64> {
    check_copies(factors)?;
    let mut power = [0u32; NUM_GROUPS];
    for &(g, k) in ops {
        power[g.ordinal()] += k;
    }
    let mut tables: Vec<HashMap<Counts, Complex64>> = Vec::with_capacity(NUM_COPIES);
    for (c, f) in factors.iter().enumerate() {
        let copy = c as u8 + 1;
        let mut table = HashMap::new();
        for (m, coeff) in f.terms() {
            let deg = Group::ALL.map(|g| m.degree_in(g, copy));
            if Group::ALL.iter().any(|g| deg[g.ordinal()] < power[g.ordinal()]) {
                continue;
            }
            if let Some(g) = Group::ALL.into_iter().find(|g| deg[g.ordinal()] > power[g.ordinal()]) {
                return Err(Error::NonScalarResidue {
                    group: g,
                    copy,
                    degree: deg[g.ordinal()] - power[g.ordinal()],
                });
            }
            let mut key = [0u8; NUM_GROUPS * 3];
            let mut weight = 1.0;
            for g in Group::ALL {
                for i in 0..3u8 {
                    let e = m.0[slot(g, copy, i + 1)];
                    key[g.ordinal() * 3 + i as usize] = e;
                    weight *= factorial(e);
                }
            }
            table.insert(key, coeff * weight);
        }
        tables.push(table);
    }
    let seq = expand_ops(ops);
    let caps = exponent_caps(factors);
    let mut sum = Complex64::new(0.0, 0.0);
    for_each_tuple(&seq, &caps, &mut |counts, sign| {
        let mut prod = Complex64::new(sign, 0.0);
        for (table, key) in tables.iter().zip(counts) {
            match table.get(key) {
                Some(v) => prod *= v,
                None => return,
            }
        }
        sum += prod;
    });
    Ok(sum)
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

#[cfg(test)]
pub(crate) fn monomial_of(vars: &[(Group, u8, u8)]) -> Monomial {
    let mut m = Monomial::ONE;
    for &(g, c, i) in vars {
        m.0[slot(g, c, i)] += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarId;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn omega_on_diagonal_monomial() {
        let p = SparsePoly::from_terms([(
            monomial_of(&[(Group::X, 1, 1), (Group::X, 2, 2), (Group::X, 3, 3)]),
            one(),
        )]);
        assert_eq!(omega_apply(&p, Group::X, [1, 2, 3], 1), SparsePoly::one());
        let q = SparsePoly::from_terms([(
            monomial_of(&[(Group::X, 1, 2), (Group::X, 2, 1), (Group::X, 3, 3)]),
            one(),
        )]);
        assert_eq!(
            omega_apply(&q, Group::X, [1, 2, 3], 1),
            SparsePoly::constant(-one())
        );
    }

    #[test]
    fn omega_ignores_other_groups() {
        let p = SparsePoly::var(VarId::new(Group::Y, 1, 1));
        assert!(omega_apply(&p, Group::X, [1, 2, 3], 1).is_zero());
    }

    #[test]
    fn degree_mismatch_is_reported() {
        let f = |c: u8| {
            SparsePoly::from_terms([(
                monomial_of(&[(Group::X, c, 1), (Group::X, c, 2)]),
                one(),
            )])
        };
        let factors = [f(1), f(2), f(3)];
        match factorized_omega_trace(&factors, &[(Group::X, 1)]) {
            Err(Error::NonScalarResidue { group, .. }) => assert_eq!(group, Group::X),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn factors_must_be_copy_local() {
        let a = SparsePoly::var(VarId::new(Group::X, 2, 1));
        let factors = [a.clone(), a.clone(), a];
        assert!(matches!(
            factorized_omega_trace(&factors, &[(Group::X, 1)]),
            Err(Error::MixedCopies { factor: 0 })
        ));
    }
}
