//! The family `X(A, B, I) = A × B × I` with
//!
//! ```text
//! σ_(a,b,i)(c,d,j) = (c, d + φ₁(a − c), j)   if i = j
//!                  = (c + φ₂(b), d, j)       if i ≠ j
//! ```
//!
//! where `φ₁: A → B` is an even map and `φ₂: B → A` a homomorphism.
//! Points are numbered block-major: block, then `a`, then `b`.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::abgroup::{AbElement, AbHom, EvenMap, FiniteAbelianGroup, ValidatedEvenMap, ValidatedHom};
use crate::solution::{FiniteSolution, SigmaTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("group {0} must be nontrivial")]
    TrivialGroup(&'static str),
    #[error("the index set needs at least two elements, got {0}")]
    TooFewBlocks(usize),
    #[error("φ₁ must map {expected_source} -> {expected_target}, got {source_group} -> {target_group}")]
    Phi1Shape {
        expected_source: String,
        expected_target: String,
        source_group: String,
        target_group: String,
    },
    #[error("φ₂ must map {expected_source} -> {expected_target}, got {source_group} -> {target_group}")]
    Phi2Shape {
        expected_source: String,
        expected_target: String,
        source_group: String,
        target_group: String,
    },
    #[error("{0} points do not fit in a byte-indexed permutation")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyParams {
    a: FiniteAbelianGroup,
    b: FiniteAbelianGroup,
    i_count: usize,
    phi1: ValidatedEvenMap,
    phi2: ValidatedHom,
}

/// Properties read off `φ₁` and `φ₂` alone, before building anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PropertyPrediction {
    /// Exact: the solution is square-free iff `φ₁(0) = 0`.
    pub square_free: bool,
    /// `φ₁⁻¹(0) = {0}` and `φ₂` injective; sufficient for irretractability.
    pub irretractable_sufficient: bool,
    /// `⟨φ₁(A)⟩ = B` and `φ₂` surjective; sufficient for the orbits to be the blocks.
    pub orbits_are_blocks_sufficient: bool,
    /// `φ₁⁻¹(0) = {0}`: each block then has multipermutation level exactly 2.
    pub block_level_exactly_two: bool,
}

/// Largest number of points accepted, so that permutations fit in bytes.
pub const MAX_POINTS: usize = 255;

impl FamilyParams {
    pub fn new(
        a: FiniteAbelianGroup,
        b: FiniteAbelianGroup,
        i_count: usize,
        phi1: ValidatedEvenMap,
        phi2: ValidatedHom,
    ) -> Result<Self, FamilyError> {
        if !a.is_nontrivial() {
            return Err(FamilyError::TrivialGroup("A"));
        }
        if !b.is_nontrivial() {
            return Err(FamilyError::TrivialGroup("B"));
        }
        if i_count < 2 {
            return Err(FamilyError::TooFewBlocks(i_count));
        }
        if phi1.source() != &a || phi1.target() != &b {
            return Err(FamilyError::Phi1Shape {
                expected_source: a.to_string(),
                expected_target: b.to_string(),
                source_group: phi1.source().to_string(),
                target_group: phi1.target().to_string(),
            });
        }
        if phi2.source() != &b || phi2.target() != &a {
            return Err(FamilyError::Phi2Shape {
                expected_source: b.to_string(),
                expected_target: a.to_string(),
                source_group: phi2.source().to_string(),
                target_group: phi2.target().to_string(),
            });
        }
        let n = a
            .order()
            .checked_mul(b.order())
            .and_then(|x| x.checked_mul(i_count))
            .unwrap_or(usize::MAX);
        if n > MAX_POINTS {
            return Err(FamilyError::TooLarge(n));
        }
        Ok(Self {
            a,
            b,
            i_count,
            phi1,
            phi2,
        })
    }

    /// `A = B = Z/k`, `φ₁(0) = 0`, `φ₁(x) = 1` otherwise, `φ₂(x) = m·x`.
    pub fn cyclic_indicator(k: u32, i_count: usize, m: i64) -> Result<Self, FamilyError> {
        let z = FiniteAbelianGroup::cyclic(k);
        let one = z.element(&[1]).expect("rank one");
        let phi1 = EvenMap::from_fn(&z, &z, |x| if x.is_zero() { z.zero() } else { one.clone() })
            .validate()
            .expect("indicator map is even");
        let phi2 = AbHom::new(z.clone(), z.clone(), vec![vec![m]])
            .validate()
            .expect("multiplication is a homomorphism of Z/k");
        Self::new(z.clone(), z, i_count, phi1, phi2)
    }

    /// `A = B = Z/2`, two blocks, `φ₁ = φ₂ = id`: the 8-point irretractable example.
    pub fn eight_point() -> Self {
        Self::cyclic_indicator(2, 2, 1).expect("valid parameters")
    }

    pub fn a(&self) -> &FiniteAbelianGroup {
        &self.a
    }

    pub fn b(&self) -> &FiniteAbelianGroup {
        &self.b
    }

    pub fn i_count(&self) -> usize {
        self.i_count
    }

    pub fn phi1(&self) -> &ValidatedEvenMap {
        &self.phi1
    }

    pub fn phi2(&self) -> &ValidatedHom {
        &self.phi2
    }

    pub fn size(&self) -> usize {
        self.a.order() * self.b.order() * self.i_count
    }

    fn block_size(&self) -> usize {
        self.a.order() * self.b.order()
    }

    /// Index of `(a, b, block)`, with `block` counted from 0.
    pub fn point(&self, a: &AbElement, b: &AbElement, block: usize) -> usize {
        self.point_from_indices(self.a.index_of(a), self.b.index_of(b), block)
    }

    fn point_from_indices(&self, ai: usize, bi: usize, block: usize) -> usize {
        block * self.block_size() + ai * self.b.order() + bi
    }

    /// `(a, b, block)` of a point index, block counted from 0.
    pub fn coordinates(&self, x: usize) -> (AbElement, AbElement, usize) {
        let block = x / self.block_size();
        let rest = x % self.block_size();
        (
            self.a.element_at(rest / self.b.order()),
            self.b.element_at(rest % self.b.order()),
            block,
        )
    }

    /// Label `(a,b,i)` with `i` counted from 1.
    pub fn label(&self, x: usize) -> String {
        let (a, b, block) = self.coordinates(x);
        format!("({a},{b},{})", block + 1)
    }

    /// The blocks `A × B × {i}` as index lists.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let bs = self.block_size();
        (0..self.i_count).map(|i| (i * bs..(i + 1) * bs).collect()).collect()
    }

    pub fn predict(&self) -> PropertyPrediction {
        PropertyPrediction {
            square_free: self.phi1.maps_zero_to_zero(),
            irretractable_sufficient: self.phi1.has_trivial_zero_fiber() && self.phi2.is_injective(),
            orbits_are_blocks_sufficient: self.phi1.image_generates_target()
                && self.phi2.is_surjective(),
            block_level_exactly_two: self.phi1.has_trivial_zero_fiber(),
        }
    }

    /// `k` when `A = B = Z/k`, `φ₁(0) = 0`, `φ₁(x) = 1` for `x ≠ 0`,
    /// `φ₂` surjective and `gcd(|I| − 1, k) = 1`.
    pub fn cyclic_wreath_modulus(&self) -> Option<u32> {
        let k = self.a.as_cyclic()?;
        if self.b.as_cyclic()? != k || k < 2 {
            return None;
        }
        if (self.i_count as u64 - 1).gcd(&(k as u64)) != 1 || !self.phi2.is_surjective() {
            return None;
        }
        let indicator = self.a.elements().all(|x| {
            let want = u32::from(!x.is_zero());
            self.phi1.apply(&x).coords() == [want]
        });
        indicator.then_some(k)
    }

    /// `φ₁(0) = 0`, `φ₁(A)` generates `B`, and `φ₂` is bijective.
    pub fn center_probe_hypotheses(&self) -> bool {
        self.phi1.maps_zero_to_zero()
            && self.phi1.image_generates_target()
            && self.phi2.is_injective()
            && self.phi2.is_surjective()
    }

    /// Builds the σ table directly from the two-case formula.
    pub fn sigma_table(&self) -> SigmaTable {
        let n = self.size();
        let (na, nb) = (self.a.order(), self.b.order());
        let add_a = self.a.addition_table();
        let add_b = self.b.addition_table();
        let neg_a = self.a.negation_table();
        let mut rows = vec![vec![0usize; n]; n];
        for (x, row) in rows.iter_mut().enumerate() {
            let (i, rest) = (x / (na * nb), x % (na * nb));
            let (ai, bi) = (rest / nb, rest % nb);
            let shift = self.phi2.apply_index(bi);
            for (y, slot) in row.iter_mut().enumerate() {
                let (j, rest) = (y / (na * nb), y % (na * nb));
                let (ci, di) = (rest / nb, rest % nb);
                *slot = if i == j {
                    let diff = add_a[ai * na + neg_a[ci]];
                    let e = self.phi1.apply_index(diff);
                    self.point_from_indices(ci, add_b[di * nb + e], j)
                } else {
                    self.point_from_indices(add_a[ci * na + shift], di, j)
                };
            }
        }
        let labels = (0..n).map(|x| self.label(x)).collect();
        SigmaTable::with_labels(labels, rows)
    }

    /// `γ_(c,d,j)(a,b,i)` from its closed form, independent of the σ table.
    pub fn gamma_closed_form(&self, y: usize, x: usize) -> usize {
        let (c, d, j) = self.coordinates(y);
        let (a, b, i) = self.coordinates(x);
        if i == j {
            let diff = self.a.sub(&c, &a).expect("same group");
            let e = self.phi1.apply(&diff);
            self.point(&a, &self.b.sub(&b, &e).expect("same group"), i)
        } else {
            let s = self.phi2.apply(&d);
            self.point(&self.a.sub(&a, &s).expect("same group"), &b, i)
        }
    }

    pub fn build(&self) -> FiniteSolution {
        FiniteSolution::new(self.sigma_table()).expect("every parameter set gives a solution")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(k: u32) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(k)
    }

    fn el(g: &FiniteAbelianGroup, c: i64) -> AbElement {
        g.element(&[c]).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let p = FamilyParams::eight_point();
        let s = p.build();
        let z2 = z(2);
        let x = p.point(&el(&z2, 0), &el(&z2, 0), 0);
        let y = p.point(&el(&z2, 1), &el(&z2, 0), 0);
        assert_eq!(s.label(s.sigma(x).apply(y)), "(1,1,1)");
        let x = p.point(&el(&z2, 0), &el(&z2, 1), 0);
        let y = p.point(&el(&z2, 0), &el(&z2, 0), 1);
        assert_eq!(s.label(s.sigma(x).apply(y)), "(1,0,2)");
    }

    #[test]
    fn gamma_matches_closed_form() {
        for p in [
            FamilyParams::eight_point(),
            FamilyParams::cyclic_indicator(3, 3, 2).unwrap(),
            FamilyParams::cyclic_indicator(4, 2, 2).unwrap(),
        ] {
            let s = p.build();
            for y in 0..s.len() {
                for x in 0..s.len() {
                    assert_eq!(s.gamma(y).apply(x), p.gamma_closed_form(y, x));
                }
            }
            assert!(s.check_lri());
        }
    }

    #[test]
    fn zero_maps_to_zero_gives_fixed_diagonal() {
        let p = FamilyParams::cyclic_indicator(3, 2, 1).unwrap();
        let s = p.build();
        for x in 0..s.len() {
            assert_eq!(s.sigma(x).apply(x), x);
        }
    }

    #[test]
    fn predict_examples() {
        let pr = FamilyParams::eight_point().predict();
        assert!(pr.square_free && pr.irretractable_sufficient && pr.orbits_are_blocks_sufficient);

        let pr = FamilyParams::cyclic_indicator(4, 2, 1).unwrap().predict();
        assert!(pr.square_free && pr.irretractable_sufficient && pr.orbits_are_blocks_sufficient);

        let z4 = z(4);
        let zero = EvenMap::from_fn(&z4, &z4, |_| z4.zero()).validate().unwrap();
        let id = AbHom::identity(&z4).validate().unwrap();
        let p = FamilyParams::new(z4.clone(), z4.clone(), 2, zero, id).unwrap();
        let pr = p.predict();
        assert!(pr.square_free);
        assert!(!pr.irretractable_sufficient);
        assert!(!pr.orbits_are_blocks_sufficient);
    }

    #[test]
    fn parameter_errors() {
        let z2 = z(2);
        let z3 = z(3);
        let phi1 = EvenMap::from_fn(&z2, &z2, |a| a.clone()).validate().unwrap();
        let phi2 = AbHom::identity(&z2).validate().unwrap();
        assert!(matches!(
            FamilyParams::new(z2.clone(), z2.clone(), 1, phi1.clone(), phi2.clone()),
            Err(FamilyError::TooFewBlocks(1))
        ));
        assert!(matches!(
            FamilyParams::new(z3.clone(), z2.clone(), 2, phi1.clone(), phi2.clone()),
            Err(FamilyError::Phi1Shape { .. })
        ));
        assert!(matches!(
            FamilyParams::new(z(1), z2.clone(), 2, phi1, phi2),
            Err(FamilyError::TrivialGroup("A"))
        ));
    }

    #[test]
    fn cyclic_wreath_modulus_examples() {
        assert_eq!(FamilyParams::eight_point().cyclic_wreath_modulus(), Some(2));
        assert_eq!(FamilyParams::cyclic_indicator(3, 2, 1).unwrap().cyclic_wreath_modulus(), Some(3));
        assert_eq!(FamilyParams::cyclic_indicator(3, 2, 2).unwrap().cyclic_wreath_modulus(), Some(3));
        // gcd(|I| - 1, k) = 2
        assert_eq!(FamilyParams::cyclic_indicator(2, 3, 1).unwrap().cyclic_wreath_modulus(), None);
        // φ₂ not surjective
        assert_eq!(FamilyParams::cyclic_indicator(4, 2, 2).unwrap().cyclic_wreath_modulus(), None);
    }

    #[test]
    fn labels_and_blocks() {
        let p = FamilyParams::cyclic_indicator(3, 2, 1).unwrap();
        assert_eq!(p.label(0), "(0,0,1)");
        assert_eq!(p.label(9 + 3 + 2), "(1,2,2)");
        let blocks = p.blocks();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[1], (9..18).collect::<Vec<_>>());
        for x in 0..p.size() {
            let (a, b, i) = p.coordinates(x);
            assert_eq!(p.point(&a, &b, i), x);
        }
    }
}
