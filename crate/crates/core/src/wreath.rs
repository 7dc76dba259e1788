//! The embedding `ν` of the permutation group of `X(A, B, I)` into `|I|`
//! copies of the wreath product `B ≀ A = B^A ⋊ A`, and the closed-form
//! predictions for the cyclic case.
//!
//! In each slot, `(f, a)(g, b) = (f + a·g, a + b)` with `(a·g)(x) = g(x − a)`.
//! `ν(σ_(a,b,i))` is `(f_a, 0)` in slot `i`, where `f_a(x) = φ₁(a − x)`, and
//! `(0, φ₂(b))` in every other slot.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::family::FamilyParams;
use crate::permgroup::{GroupAnalysis, Nilpotency, PermGroupData};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WreathError {
    #[error("group has degree {got}, parameters describe {expected} points")]
    SizeMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WreathCheck {
    /// The cyclic-case hypotheses hold (see [`FamilyParams::cyclic_wreath_modulus`]).
    pub applicable: bool,
    pub k: Option<u32>,
    pub predicted_order: Option<u128>,
    pub measured_order: usize,
    pub predicted_class: Option<Nilpotency>,
    pub measured_class: Nilpotency,
    pub predicted_derived_length: Option<usize>,
    pub measured_derived_length: Option<usize>,
    pub nu_homomorphic: bool,
    pub nu_injective: bool,
    /// `Some(p)` when `A` and `B` are both `p`-groups.
    pub prime: Option<u64>,
    /// Whether `|𝒢|` is a power of `prime`, when that is defined.
    pub order_is_prime_power: Option<bool>,
}

impl WreathCheck {
    /// Every prediction that applies matches its measurement, and `ν` is an embedding.
    pub fn passes(&self) -> bool {
        let pred_ok = !self.applicable
            || (self.predicted_order == Some(self.measured_order as u128)
                && self.predicted_class == Some(self.measured_class)
                && self.predicted_derived_length == self.measured_derived_length);
        pred_ok && self.nu_homomorphic && self.nu_injective && self.order_is_prime_power != Some(false)
    }
}

/// One element of `(B^A ⋊ A)^{|I|}`, flattened: each slot holds `|A|`
/// B-indices followed by one A-index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct WreathElem(Vec<u32>);

struct WreathArith {
    slots: usize,
    na: usize,
    nb: usize,
    add_a: Vec<usize>,
    neg_a: Vec<usize>,
    add_b: Vec<usize>,
    neg_b: Vec<usize>,
}

impl WreathArith {
    fn new(p: &FamilyParams) -> Self {
        Self {
            slots: p.i_count(),
            na: p.a().order(),
            nb: p.b().order(),
            add_a: p.a().addition_table(),
            neg_a: p.a().negation_table(),
            add_b: p.b().addition_table(),
            neg_b: p.b().negation_table(),
        }
    }

    fn width(&self) -> usize {
        self.na + 1
    }

    fn identity(&self) -> WreathElem {
        WreathElem(vec![0; self.slots * self.width()])
    }

    fn mul(&self, x: &WreathElem, y: &WreathElem) -> WreathElem {
        let w = self.width();
        let (na, nb) = (self.na, self.nb);
        let mut out = vec![0u32; x.0.len()];
        for s in 0..self.slots {
            let (f, a) = (&x.0[s * w..s * w + na], x.0[s * w + na] as usize);
            let (g, b) = (&y.0[s * w..s * w + na], y.0[s * w + na] as usize);
            for t in 0..na {
                // (a·g)(t) = g(t − a)
                let shifted = g[self.add_a[t * na + self.neg_a[a]]] as usize;
                out[s * w + t] = self.add_b[f[t] as usize * nb + shifted] as u32;
            }
            out[s * w + na] = self.add_a[a * na + b] as u32;
        }
        WreathElem(out)
    }

    fn inv(&self, x: &WreathElem) -> WreathElem {
        // (f, a)⁻¹ = (g, −a) with g(t) = −f(t + a)
        let w = self.width();
        let na = self.na;
        let mut out = vec![0u32; x.0.len()];
        for s in 0..self.slots {
            let (f, a) = (&x.0[s * w..s * w + na], x.0[s * w + na] as usize);
            for t in 0..na {
                out[s * w + t] = self.neg_b[f[self.add_a[t * na + a]] as usize] as u32;
            }
            out[s * w + na] = self.neg_a[a] as u32;
        }
        WreathElem(out)
    }
}

fn nu_generator(p: &FamilyParams, ar: &WreathArith, x: usize) -> WreathElem {
    let (a, b, i) = p.coordinates(x);
    let ai = p.a().index_of(&a);
    let bi = p.b().index_of(&b);
    let w = ar.width();
    let mut out = vec![0u32; ar.slots * w];
    for s in 0..ar.slots {
        if s == i {
            for t in 0..ar.na {
                let diff = ar.add_a[ai * ar.na + ar.neg_a[t]];
                out[s * w + t] = p.phi1().apply_index(diff) as u32;
            }
        } else {
            out[s * w + ar.na] = p.phi2().apply_index(bi) as u32;
        }
    }
    WreathElem(out)
}

/// `ν` on every element, computed along the BFS tree, with both embedding checks.
fn nu_checks(p: &FamilyParams, g: &PermGroupData) -> (bool, bool) {
    let ar = WreathArith::new(p);
    let n = p.size();
    let gens: Vec<WreathElem> = (0..n).map(|x| nu_generator(p, &ar, x)).collect();
    let gens_inv: Vec<WreathElem> = gens.iter().map(|e| ar.inv(e)).collect();

    let mut nu: Vec<WreathElem> = Vec::with_capacity(g.order());
    nu.push(ar.identity());
    for e in 1..g.order() {
        let (parent, letter) = g.parent(e).expect("non-identity");
        let step = if letter.inverse {
            &gens_inv[letter.generator as usize]
        } else {
            &gens[letter.generator as usize]
        };
        nu.push(ar.mul(&nu[parent], step));
    }

    // ν(e ∘ σ_x) = ν(e) ν(σ_x) for every element and every generator
    let gen_idx: Vec<usize> = (0..n).map(|x| g.generator_index(x, false)).collect();
    let homomorphic = (0..g.order()).all(|e| {
        (0..n).all(|x| nu[g.mul(e, gen_idx[x])] == ar.mul(&nu[e], &gens[x]))
    });
    let distinct: HashSet<&WreathElem> = nu.iter().collect();
    let injective = distinct.len() == g.order();
    (homomorphic, injective)
}

/// `p` if `m` is a positive power of the prime `p`.
fn prime_of_power(m: u64) -> Option<u64> {
    if m < 2 {
        return None;
    }
    let p = (2..=m).find(|d| m.is_multiple_of(*d))?;
    let mut r = m;
    while r.is_multiple_of(p) {
        r /= p;
    }
    (r == 1).then_some(p)
}

fn is_power_of(mut m: u64, p: u64) -> bool {
    if m == 0 {
        return false;
    }
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// `(α(p − 1) + 1) p^{α − 1}` for `k = p^α`, otherwise not nilpotent.
pub fn predicted_class(k: u32) -> Nilpotency {
    match prime_of_power(k as u64) {
        Some(p) => {
            let mut alpha = 0u32;
            let mut r = k as u64;
            while r > 1 {
                r /= p;
                alpha += 1;
            }
            Nilpotency::Class(((alpha as u64 * (p - 1) + 1) * p.pow(alpha - 1)) as usize)
        }
        None => Nilpotency::NotNilpotent,
    }
}

/// `(k^k · k)^{|I|}`, if it fits.
pub fn predicted_order(k: u32, i_count: usize) -> Option<u128> {
    let k = k as u128;
    let base = k.checked_pow(k as u32)?.checked_mul(k)?;
    base.checked_pow(i_count as u32)
}

pub fn wreath_check(
    p: &FamilyParams,
    g: &PermGroupData,
    analysis: &GroupAnalysis,
) -> Result<WreathCheck, WreathError> {
    if g.degree() != p.size() {
        return Err(WreathError::SizeMismatch {
            expected: p.size(),
            got: g.degree(),
        });
    }
    let k = p.cyclic_wreath_modulus();
    let (nu_homomorphic, nu_injective) = nu_checks(p, g);
    let prime = match (
        prime_of_power(p.a().order() as u64),
        prime_of_power(p.b().order() as u64),
    ) {
        (Some(x), Some(y)) if x == y => Some(x),
        _ => None,
    };
    Ok(WreathCheck {
        applicable: k.is_some(),
        k,
        predicted_order: k.and_then(|k| predicted_order(k, p.i_count())),
        measured_order: g.order(),
        predicted_class: k.map(predicted_class),
        measured_class: analysis.nilpotency_class,
        predicted_derived_length: k.map(|_| 2),
        measured_derived_length: analysis.derived_length,
        nu_homomorphic,
        nu_injective,
        prime,
        order_is_prime_power: prime.map(|q| is_power_of(g.order() as u64, q)),
    })
}

/// Determinant of the `k × k` matrix with zero diagonal and ones elsewhere,
/// by fraction-free (Bareiss) elimination.
pub fn det_nk(k: usize) -> i128 {
    assert!(k >= 1, "k must be positive");
    let mut m: Vec<Vec<i128>> = (0..k)
        .map(|r| (0..k).map(|c| i128::from(r != c)).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for piv in 0..k {
        if m[piv][piv] == 0 {
            match (piv + 1..k).find(|&r| m[r][piv] != 0) {
                Some(r) => {
                    m.swap(piv, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for r in piv + 1..k {
            for c in piv + 1..k {
                m[r][c] = (m[r][c] * m[piv][piv] - m[r][piv] * m[piv][c]) / prev;
            }
            m[r][piv] = 0;
        }
        prev = m[piv][piv];
    }
    sign * m[k - 1][k - 1]
}
