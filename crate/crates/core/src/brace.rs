//! The left brace on the permutation group `𝒢(X, r)`.
//!
//! The additive group is `Z^X / K`, where `K` is the kernel of the map from
//! the free abelian group on `X` (the additive group of the structure group)
//! onto `𝒢`. Every element gets an additive lift by expanding its witness
//! word: a letter `x` after prefix `π` contributes `e_{π(x)}` and a letter
//! `x⁻¹` contributes `−e_{π(σ_x⁻¹(x))}`. Relations are the lift differences
//! along every Cayley-graph edge plus `σ_x^{ord}` words; they span `K`.

use std::hash::BuildHasherDefault;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHasher;
use serde::Serialize;
use thiserror::Error;

use crate::family::FamilyParams;
use crate::lattice::{FullRankHnf, HnfBuilder, LatticeError};
use crate::permgroup::{Letter, PermGroupData, Subgroup};

type FxHashMap<K, V> = std::collections::HashMap<K, V, BuildHasherDefault<FxHasher>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraceError {
    #[error("lattice error: {0}")]
    Lattice(#[from] LatticeError),
    #[error("lattice index {index} differs from group order {order}")]
    IndexMismatch { index: String, order: usize },
    #[error("two group elements share the coset representative {0:?}")]
    RepresentativeCollision(Vec<i64>),
    #[error("generators of the group must be the σ_x of a solution on the same points")]
    NotASolutionGroup,
}

/// An element of the brace, named by its index in the group enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BraceElement(pub usize);

#[derive(Debug, Clone)]
pub struct BraceData {
    group: PermGroupData,
    hnf: FullRankHnf,
    /// Canonical representatives, `n` entries per element.
    reps: Vec<i64>,
    coset_map: FxHashMap<Box<[i64]>, u32>,
    /// Number of relations inserted before the lattice index matched.
    relations_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomSampling {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

impl AxiomSampling {
    /// Exhaustive when `|𝒢|³ ≤ 10⁶`, otherwise `count` random triples.
    pub fn auto(order: usize, count: usize, seed: u64) -> Self {
        if (order as u128).pow(3) <= 1_000_000 {
            Self::Exhaustive
        } else {
            Self::Random { count, seed }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub exhaustive: bool,
    pub triples_checked: u64,
    /// First `(a, b, c)` with `a·(b+c) + a ≠ a·b + a·c`.
    pub compatibility_failure: Option<(usize, usize, usize)>,
    pub additive_group_ok: bool,
    pub lambda_generators_ok: bool,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.compatibility_failure.is_none() && self.additive_group_ok && self.lambda_generators_ok
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiHReport {
    pub applicable: bool,
    pub group_order: usize,
    pub ideal_order: usize,
    /// `σ_(1,0,i₁)⁻¹ σ_(0,0,i₁)` is not the identity.
    pub witness_nontrivial: bool,
    /// ... and lies in `φ(H)`.
    pub witness_in_ideal: bool,
    /// `σ_(0,0,i₁)` is not in `φ(H)`.
    pub generator_excluded: bool,
    pub normal: bool,
    pub lambda_invariant: bool,
    pub additively_closed: bool,
    /// `σ_x^k = id` for every generator.
    pub generator_orders_divide_k: bool,
}

impl PhiHReport {
    fn not_applicable(group_order: usize) -> Self {
        Self {
            applicable: false,
            group_order,
            ideal_order: 0,
            witness_nontrivial: false,
            witness_in_ideal: false,
            generator_excluded: false,
            normal: false,
            lambda_invariant: false,
            additively_closed: false,
            generator_orders_divide_k: false,
        }
    }

    /// A nontrivial proper ideal with both witnesses.
    pub fn passes(&self) -> bool {
        self.applicable
            && self.ideal_order > 1
            && self.ideal_order < self.group_order
            && self.witness_nontrivial
            && self.witness_in_ideal
            && self.generator_excluded
            && self.normal
            && self.lambda_invariant
            && self.additively_closed
            && self.generator_orders_divide_k
    }
}

impl BraceData {
    /// Builds the brace on a group enumerated from a solution (generator `x`
    /// must be `σ_x`).
    pub fn build(group: PermGroupData) -> Result<Self, BraceError> {
        let n = group.degree();
        if group.generators().len() != n {
            return Err(BraceError::NotASolutionGroup);
        }
        let order = group.order();
        // σ_x⁻¹(x) for the contribution of an inverse letter
        let tail: Vec<usize> = (0..n)
            .map(|x| group.generators()[x].inverse().apply(x))
            .collect();

        // lifts along the BFS tree
        let mut lifts = vec![0i64; order * n];
        for e in 1..order {
            let (p, letter) = group.parent(e).expect("non-identity");
            let (head, rest) = lifts.split_at_mut(e * n);
            let dst = &mut rest[..n];
            dst.copy_from_slice(&head[p * n..(p + 1) * n]);
            let (pos, sign) = contribution(&group, p, letter, &tail);
            dst[pos] += sign;
        }

        let mut builder = HnfBuilder::new(n);
        let target = BigInt::from(order);
        let mut relations_used = 0usize;
        let done = |builder: &mut HnfBuilder, rel: &[i64], used: &mut usize| -> Result<bool, BraceError> {
            *used += 1;
            if builder.insert(rel)? && builder.is_full_rank() {
                return Ok(builder.determinant().expect("full rank") == target);
            }
            Ok(false)
        };

        // seeds: σ_x^{ord} = id, whose lift is Σ_{j<ord} e_{σ_x^j(x)}
        let mut finished = false;
        for x in 0..n {
            let g = &group.generators()[x];
            let mut rel = vec![0i64; n];
            let mut y = x;
            for _ in 0..g.order() {
                rel[y] += 1;
                y = g.apply(y);
            }
            if done(&mut builder, &rel, &mut relations_used)? {
                finished = true;
                break;
            }
        }
        // Edge relations lift(p) + e_{p(x)} − lift(p·σ_x), over every x, even
        // when σ_x repeats or is the identity. The edge for σ_x⁻¹ out of p is
        // the negated edge for σ_x into p, so forward letters suffice.
        if !finished {
            let gen_idx: Vec<usize> = (0..n).map(|x| group.generator_index(x, false)).collect();
            'edges: for p in 0..order {
                for (x, &g) in gen_idx.iter().enumerate() {
                    let q = group.mul(p, g);
                    let (pos, sign) = contribution(&group, p, Letter::new(x, false), &tail);
                    let mut rel: Vec<i64> = (0..n).map(|k| lifts[p * n + k] - lifts[q * n + k]).collect();
                    rel[pos] += sign;
                    if rel.iter().all(|&v| v == 0) {
                        continue;
                    }
                    if done(&mut builder, &rel, &mut relations_used)? {
                        finished = true;
                        break 'edges;
                    }
                }
            }
        }
        if !finished {
            let index = builder
                .determinant()
                .map_or_else(|| format!("infinite (rank {})", builder.rank()), |d| d.to_string());
            return Err(BraceError::IndexMismatch { index, order });
        }
        let hnf = builder.finish()?;

        let mut reps = lifts;
        let mut coset_map: FxHashMap<Box<[i64]>, u32> = FxHashMap::default();
        coset_map.reserve(order);
        for e in 0..order {
            let r = &mut reps[e * n..(e + 1) * n];
            hnf.reduce(r);
            if coset_map.insert(r.to_vec().into_boxed_slice(), e as u32).is_some() {
                return Err(BraceError::RepresentativeCollision(r.to_vec()));
            }
        }
        Ok(Self {
            group,
            hnf,
            reps,
            coset_map,
            relations_used,
        })
    }

    pub fn group(&self) -> &PermGroupData {
        &self.group
    }

    pub fn into_group(self) -> PermGroupData {
        self.group
    }

    pub fn hnf(&self) -> &FullRankHnf {
        &self.hnf
    }

    pub fn relations_used(&self) -> usize {
        self.relations_used
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn quotient_size(&self) -> BigInt {
        self.hnf.index()
    }

    pub fn zero(&self) -> BraceElement {
        BraceElement(0)
    }

    pub fn elements(&self) -> impl Iterator<Item = BraceElement> {
        (0..self.order()).map(BraceElement)
    }

    /// `φ(x) = σ_x`.
    pub fn generator(&self, x: usize) -> BraceElement {
        BraceElement(self.group.generator_index(x, false))
    }

    pub fn rep(&self, u: BraceElement) -> &[i64] {
        let n = self.group.degree();
        &self.reps[u.0 * n..(u.0 + 1) * n]
    }

    /// The element whose coset contains `v`.
    pub fn from_vector(&self, v: &[i64]) -> BraceElement {
        let mut w = v.to_vec();
        self.hnf.reduce(&mut w);
        BraceElement(self.coset_map[w.as_slice()] as usize)
    }

    pub fn add(&self, u: BraceElement, v: BraceElement) -> BraceElement {
        let w: Vec<i64> = self.rep(u).iter().zip(self.rep(v)).map(|(a, b)| a + b).collect();
        self.from_vector(&w)
    }

    pub fn neg(&self, u: BraceElement) -> BraceElement {
        let w: Vec<i64> = self.rep(u).iter().map(|a| -a).collect();
        self.from_vector(&w)
    }

    pub fn sub(&self, u: BraceElement, v: BraceElement) -> BraceElement {
        let w: Vec<i64> = self.rep(u).iter().zip(self.rep(v)).map(|(a, b)| a - b).collect();
        self.from_vector(&w)
    }

    pub fn mul(&self, u: BraceElement, v: BraceElement) -> BraceElement {
        BraceElement(self.group.mul(u.0, v.0))
    }

    pub fn inv(&self, u: BraceElement) -> BraceElement {
        BraceElement(self.group.inv(u.0))
    }

    /// `λ_u(v) = u·v − u`.
    pub fn lambda(&self, u: BraceElement, v: BraceElement) -> BraceElement {
        self.sub(self.mul(u, v), u)
    }

    /// Elements `u` with `λ_u = id`, tested on the additive generators `σ_x`.
    pub fn socle(&self) -> Vec<BraceElement> {
        let gens: Vec<BraceElement> = (0..self.group.degree()).map(|x| self.generator(x)).collect();
        self.elements()
            .filter(|&u| gens.iter().all(|&g| self.lambda(u, g) == g))
            .collect()
    }

    pub fn verify_brace_axioms(&self, sampling: AxiomSampling) -> AxiomReport {
        let order = self.order();
        let n = self.group.degree();
        let compat = |a: BraceElement, b: BraceElement, c: BraceElement| {
            let lhs = self.add(self.mul(a, self.add(b, c)), a);
            let rhs = self.add(self.mul(a, b), self.mul(a, c));
            lhs == rhs
        };
        let mut report = AxiomReport {
            exhaustive: matches!(sampling, AxiomSampling::Exhaustive),
            triples_checked: 0,
            compatibility_failure: None,
            additive_group_ok: true,
            lambda_generators_ok: true,
        };
        match sampling {
            AxiomSampling::Exhaustive => {
                // tables make the triple loop cheap
                let add: Vec<u32> = (0..order * order)
                    .map(|k| self.add(BraceElement(k / order), BraceElement(k % order)).0 as u32)
                    .collect();
                let mul: Vec<u32> = (0..order * order)
                    .map(|k| self.group.mul(k / order, k % order) as u32)
                    .collect();
                let at = |t: &[u32], i: usize, j: usize| t[i * order + j] as usize;
                'outer: for a in 0..order {
                    for b in 0..order {
                        for c in 0..order {
                            report.triples_checked += 1;
                            let lhs = at(&add, at(&mul, a, at(&add, b, c)), a);
                            let rhs = at(&add, at(&mul, a, b), at(&mul, a, c));
                            if lhs != rhs {
                                report.compatibility_failure = Some((a, b, c));
                                break 'outer;
                            }
                            if at(&add, at(&add, a, b), c) != at(&add, a, at(&add, b, c)) {
                                report.additive_group_ok = false;
                            }
                        }
                        if at(&add, a, b) != at(&add, b, a) {
                            report.additive_group_ok = false;
                        }
                    }
                    if at(&add, a, 0) != a || at(&add, a, self.neg(BraceElement(a)).0) != 0 {
                        report.additive_group_ok = false;
                    }
                }
            }
            AxiomSampling::Random { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..count {
                    let a = BraceElement(rng.gen_range(0..order));
                    let b = BraceElement(rng.gen_range(0..order));
                    let c = BraceElement(rng.gen_range(0..order));
                    report.triples_checked += 1;
                    if !compat(a, b, c) {
                        report.compatibility_failure = Some((a.0, b.0, c.0));
                        break;
                    }
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c))
                        || self.add(a, b) != self.add(b, a)
                        || self.add(a, self.zero()) != a
                        || self.add(a, self.neg(a)) != self.zero()
                    {
                        report.additive_group_ok = false;
                    }
                }
            }
        }
        // λ_{φ(x)}(φ(y)) = φ(σ_x(y)) on all generator pairs
        for x in 0..n {
            for y in 0..n {
                let lhs = self.lambda(self.generator(x), self.generator(y));
                let rhs = self.generator(self.group.generators()[x].apply(y));
                if lhs != rhs {
                    report.lambda_generators_ok = false;
                }
            }
        }
        report
    }

    /// `φ(H)`: the normal closure of `{σ_x σ_y⁻¹ : x, y in one orbit}`.
    pub fn phi_h(&self) -> Subgroup {
        let g = &self.group;
        let mut gens = Vec::new();
        for orbit in g.orbits() {
            for &x in &orbit {
                for &y in &orbit {
                    if x != y {
                        gens.push(g.mul(g.generator_index(x, false), g.generator_index(y, true)));
                    }
                }
            }
        }
        g.normal_closure(&gens, &g.generator_elements())
    }

    /// Checks that `φ(H)` is a nontrivial proper ideal, with the explicit
    /// witnesses `σ_(1,0,i₁)⁻¹ σ_(0,0,i₁) ∈ φ(H)` and `σ_(0,0,i₁) ∉ φ(H)`.
    pub fn phi_h_ideal_check(&self, params: &FamilyParams) -> PhiHReport {
        let order = self.order();
        let Some(k) = params.cyclic_wreath_modulus() else {
            return PhiHReport::not_applicable(order);
        };
        if params.size() != self.group.degree() {
            return PhiHReport::not_applicable(order);
        }
        let g = &self.group;
        let ideal = self.phi_h();
        let za = params.a();
        let zb = params.b();
        let x00 = params.point(&za.zero(), &zb.zero(), 0);
        let x10 = params.point(&za.element(&[1]).expect("rank one"), &zb.zero(), 0);
        let witness = g.mul(g.generator_index(x10, true), g.generator_index(x00, false));
        let s00 = g.generator_index(x00, false);

        let gens: Vec<usize> = (0..g.degree()).map(|x| g.generator_index(x, false)).collect();
        let lambda_invariant = gens.iter().all(|&s| {
            ideal
                .members()
                .all(|h| ideal.contains(self.lambda(BraceElement(s), BraceElement(h)).0))
        });
        let ideal_gens: Vec<usize> = ideal.generators().collect();
        let additively_closed = ideal.members().all(|h| {
            ideal_gens
                .iter()
                .all(|&t| ideal.contains(self.add(BraceElement(h), BraceElement(t)).0))
        });
        PhiHReport {
            applicable: true,
            group_order: order,
            ideal_order: ideal.order(),
            witness_nontrivial: witness != 0,
            witness_in_ideal: ideal.contains(witness),
            generator_excluded: !ideal.contains(s00),
            normal: g.is_normal(&ideal),
            lambda_invariant,
            additively_closed,
            generator_orders_divide_k: g
                .generators()
                .iter()
                .all(|s| s.pow(k as u64).is_identity()),
        }
    }
}

/// Position and sign of the unit vector a letter adds after prefix `p`.
fn contribution(g: &PermGroupData, p: usize, letter: Letter, tail: &[usize]) -> (usize, i64) {
    let img = g.images(p);
    let x = letter.generator as usize;
    if letter.inverse {
        (img[tail[x]] as usize, -1)
    } else {
        (img[x] as usize, 1)
    }
}
