//! Exact arithmetic in the structure group `G(X, r)`.
//!
//! The additive group of `G(X, r)` is free abelian on `X`, so an element is
//! its vector `v ∈ Z^X`. Multiplication is `a·b = a + λ_a(b)`, where `λ_a`
//! permutes coordinates by the permutation `φ(a) ∈ 𝒢(X, r)`. Each element
//! caches `φ(a)`; equality and hashing use `v` alone.

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::family::FamilyParams;
use crate::perm::Permutation;
use crate::permgroup::Letter;
use crate::solution::FiniteSolution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SgError {
    #[error("x ↦ σ_x⁻¹(x) is not a bijection")]
    TailNotBijective,
    #[error("letter {0} is out of range")]
    LetterOutOfRange(u32),
    #[error("vector has length {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, Eq)]
pub struct SgElement {
    pub v: Vec<i64>,
    pub perm: Permutation,
}

impl PartialEq for SgElement {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v
    }
}

impl Hash for SgElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.v.hash(state);
    }
}

impl SgElement {
    /// The degree: coordinate sum of `v`.
    pub fn deg(&self) -> i64 {
        self.v.iter().sum()
    }

    pub fn is_identity(&self) -> bool {
        self.v.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecompositionMode {
    Product,
    Sum,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomposition {
    pub mode: DecompositionMode,
    /// `(orbit index, factor)` with increasing orbit index, factors non-identity.
    pub factors: Vec<(usize, SgElement)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub applicable: bool,
    pub radius: usize,
    pub words_enumerated: u64,
    pub distinct_elements: usize,
    /// Non-identity elements of `H` reached within the radius.
    pub h_candidates: usize,
    pub probe_set_size: usize,
    /// Vectors of candidates commuting with the whole probe set.
    pub centralizing: Vec<Vec<i64>>,
}

impl ProbeReport {
    fn not_applicable(radius: usize) -> Self {
        Self {
            applicable: false,
            radius,
            words_enumerated: 0,
            distinct_elements: 0,
            h_candidates: 0,
            probe_set_size: 0,
            centralizing: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub orbit_count: usize,
    /// Each generator maps to a standard unit vector of `Z^orbits`.
    pub generators_map_to_units: bool,
    /// Image of a product equals the sum of images, on random pairs.
    pub homomorphism_ok: bool,
    /// The image computed from `v` equals the per-orbit exponent sums of the word.
    pub word_images_agree: bool,
    /// Membership in `H` ⟺ zero image, on random words.
    pub kernel_ok: bool,
    pub samples: usize,
}

impl QuotientReport {
    pub fn passes(&self) -> bool {
        self.generators_map_to_units && self.homomorphism_ok && self.word_images_agree && self.kernel_ok
    }
}

/// Outcome of [`StructureGroup::property_sweep`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertySweep {
    pub samples: usize,
    pub max_word_len: usize,
    /// Exponent sum of a word equals the coordinate sum of its element.
    pub degree_agrees: bool,
    /// `reassemble(decompose(g)) = g` in both modes, with orbit-supported factors.
    pub decomposition_round_trip: bool,
    /// Orbit-supported factors multiplied together decompose back to themselves.
    pub decomposition_unique: bool,
    /// `H` is closed under products, inverses and every `λ_g`.
    pub h_closed: bool,
    pub first_failure: Option<String>,
}

impl PropertySweep {
    pub fn passes(&self) -> bool {
        self.degree_agrees && self.decomposition_round_trip && self.decomposition_unique && self.h_closed
    }
}

#[derive(Debug, Clone)]
pub struct StructureGroup {
    sol: FiniteSolution,
    /// `tail_inv[z]` is the `w` with `σ_w⁻¹(w) = z`.
    tail_inv: Vec<usize>,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

/// Coordinates moved by `p`: `out[p(y)] = w[y]`.
fn permute(p: &Permutation, w: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; w.len()];
    for (y, &c) in w.iter().enumerate() {
        out[p.apply(y)] = c;
    }
    out
}

impl StructureGroup {
    pub fn new(s: &FiniteSolution) -> Result<Self, SgError> {
        let n = s.len();
        let mut tail_inv = vec![usize::MAX; n];
        for w in 0..n {
            let z = s.sigma_inv(w).apply(w);
            if tail_inv[z] != usize::MAX {
                return Err(SgError::TailNotBijective);
            }
            tail_inv[z] = w;
        }
        // orbits of 𝒢 on X, ordered by least point
        let mut orbit_of = vec![usize::MAX; n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut orbit = vec![start];
            orbit_of[start] = id;
            let mut k = 0;
            while k < orbit.len() {
                let y = orbit[k];
                for x in 0..n {
                    let z = s.sigma(x).apply(y);
                    if orbit_of[z] == usize::MAX {
                        orbit_of[z] = id;
                        orbit.push(z);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        Ok(Self {
            sol: s.clone(),
            tail_inv,
            orbits,
            orbit_of,
        })
    }

    pub fn solution(&self) -> &FiniteSolution {
        &self.sol
    }

    pub fn degree(&self) -> usize {
        self.sol.len()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_of[x]
    }

    pub fn identity(&self) -> SgElement {
        SgElement {
            v: vec![0; self.degree()],
            perm: Permutation::identity(self.degree()),
        }
    }

    /// `x` or `x⁻¹ = −λ_{x⁻¹}(x)`.
    pub fn generator(&self, x: usize, inverse: bool) -> SgElement {
        let mut v = vec![0; self.degree()];
        if inverse {
            v[self.sol.sigma_inv(x).apply(x)] = -1;
            SgElement {
                v,
                perm: self.sol.sigma_inv(x).clone(),
            }
        } else {
            v[x] = 1;
            SgElement {
                v,
                perm: self.sol.sigma(x).clone(),
            }
        }
    }

    /// The additive expansion of a word: a letter `x` after prefix `c`
    /// adds `e_{φ(c)(x)}`, a letter `x⁻¹` adds `−e_{φ(c)(σ_x⁻¹(x))}`.
    pub fn from_word(&self, word: &[Letter]) -> Result<SgElement, SgError> {
        let n = self.degree();
        let mut v = vec![0i64; n];
        let mut perm = Permutation::identity(n);
        for l in word {
            let x = l.generator as usize;
            if x >= n {
                return Err(SgError::LetterOutOfRange(l.generator));
            }
            if l.inverse {
                v[perm.apply(self.sol.sigma_inv(x).apply(x))] -= 1;
                perm = perm.compose(self.sol.sigma_inv(x));
            } else {
                v[perm.apply(x)] += 1;
                perm = perm.compose(self.sol.sigma(x));
            }
        }
        Ok(SgElement { v, perm })
    }

    /// Sum of exponent signs of a word.
    pub fn word_degree(word: &[Letter]) -> i64 {
        word.iter().map(|l| if l.inverse { -1 } else { 1 }).sum()
    }

    /// `φ` of the element with additive form `v`, by writing `v` as a sum of
    /// signed unit vectors and converting sums to products with
    /// `c + t = c·λ_c⁻¹(t)`.
    pub fn perm_of_vector(&self, v: &[i64]) -> Result<Permutation, SgError> {
        let n = self.degree();
        if v.len() != n {
            return Err(SgError::Dimension {
                expected: n,
                got: v.len(),
            });
        }
        let mut perm = Permutation::identity(n);
        for (y, &c) in v.iter().enumerate() {
            for _ in 0..c.unsigned_abs() {
                let z = perm.inverse().apply(y);
                perm = if c > 0 {
                    perm.compose(self.sol.sigma(z))
                } else {
                    perm.compose(self.sol.sigma_inv(self.tail_inv[z]))
                };
            }
        }
        Ok(perm)
    }

    pub fn from_vector(&self, v: Vec<i64>) -> Result<SgElement, SgError> {
        let perm = self.perm_of_vector(&v)?;
        Ok(SgElement { v, perm })
    }

    /// `a·b = a + λ_a(b)`.
    pub fn mul(&self, a: &SgElement, b: &SgElement) -> SgElement {
        let moved = permute(&a.perm, &b.v);
        SgElement {
            v: a.v.iter().zip(&moved).map(|(x, y)| x + y).collect(),
            perm: a.perm.compose(&b.perm),
        }
    }

    pub fn inv(&self, a: &SgElement) -> SgElement {
        let pinv = a.perm.inverse();
        SgElement {
            v: permute(&pinv, &a.v).into_iter().map(|c| -c).collect(),
            perm: pinv,
        }
    }

    /// `a + b = a·λ_a⁻¹(b)`.
    pub fn add(&self, a: &SgElement, b: &SgElement) -> SgElement {
        let pulled = permute(&a.perm.inverse(), &b.v);
        let p = self.perm_of_vector(&pulled).expect("dimension matches");
        SgElement {
            v: a.v.iter().zip(&b.v).map(|(x, y)| x + y).collect(),
            perm: a.perm.compose(&p),
        }
    }

    pub fn neg(&self, a: &SgElement) -> SgElement {
        self.from_vector(a.v.iter().map(|c| -c).collect())
            .expect("dimension matches")
    }

    /// `λ_a(b) = a·b − a`, evaluated through the brace operations.
    pub fn lambda(&self, a: &SgElement, b: &SgElement) -> SgElement {
        self.add(&self.mul(a, b), &self.neg(a))
    }

    /// Coordinate sums of `v` over each orbit.
    pub fn orbit_degrees(&self, a: &SgElement) -> Vec<i64> {
        let mut out = vec![0i64; self.orbits.len()];
        for (x, &c) in a.v.iter().enumerate() {
            out[self.orbit_of[x]] += c;
        }
        out
    }

    /// Per-orbit exponent sums of a word, without building the element.
    pub fn word_orbit_degrees(&self, word: &[Letter]) -> Vec<i64> {
        let mut out = vec![0i64; self.orbits.len()];
        for l in word {
            out[self.orbit_of[l.generator as usize]] += if l.inverse { -1 } else { 1 };
        }
        out
    }

    /// Membership in `H`: every orbit degree is zero.
    pub fn in_h(&self, a: &SgElement) -> bool {
        self.orbit_degrees(a).iter().all(|&d| d == 0)
    }

    pub fn decompose(&self, g: &SgElement, mode: DecompositionMode) -> OrbitDecomposition {
        let n = self.degree();
        // sum components h_i: v restricted to orbit i
        let parts: Vec<(usize, Vec<i64>)> = self
            .orbits
            .iter()
            .enumerate()
            .filter_map(|(i, orbit)| {
                let mut w = vec![0i64; n];
                for &x in orbit {
                    w[x] = g.v[x];
                }
                w.iter().any(|&c| c != 0).then_some((i, w))
            })
            .collect();
        let factors = match mode {
            DecompositionMode::Sum => parts
                .into_iter()
                .map(|(i, w)| (i, self.from_vector(w).expect("dimension matches")))
                .collect(),
            DecompositionMode::Product => {
                // g_1⋯g_m = h_1 + λ_{g_1}(g_2) + λ_{g_1 g_2}(g_3) + ..., so
                // g_i = λ_{(g_1⋯g_{i−1})⁻¹}(h_i)
                let mut prefix = self.identity();
                let mut out = Vec::with_capacity(parts.len());
                for (i, w) in parts {
                    let h = self.from_vector(w).expect("dimension matches");
                    let gi = self.lambda(&self.inv(&prefix), &h);
                    prefix = self.mul(&prefix, &gi);
                    out.push((i, gi));
                }
                out
            }
        };
        OrbitDecomposition { mode, factors }
    }

    pub fn reassemble(&self, d: &OrbitDecomposition) -> SgElement {
        d.factors.iter().fold(self.identity(), |acc, (_, f)| match d.mode {
            DecompositionMode::Product => self.mul(&acc, f),
            DecompositionMode::Sum => self.add(&acc, f),
        })
    }

    /// Whether every factor is supported in its orbit.
    pub fn factors_supported(&self, d: &OrbitDecomposition) -> bool {
        d.factors.iter().all(|(i, f)| {
            f.v.iter()
                .enumerate()
                .all(|(x, &c)| c == 0 || self.orbit_of[x] == *i)
        })
    }

    pub fn random_word<R: Rng>(&self, rng: &mut R, max_len: usize) -> Vec<Letter> {
        let len = rng.gen_range(0..=max_len);
        (0..len)
            .map(|_| Letter::new(rng.gen_range(0..self.degree()), rng.gen_bool(0.5)))
            .collect()
    }

    /// A random element of `H`: a random word times `x⁻¹` factors that
    /// cancel each orbit degree.
    pub fn random_h_element<R: Rng>(&self, rng: &mut R, max_len: usize) -> SgElement {
        let w = self.random_word(rng, max_len);
        let mut g = self.from_word(&w).expect("letters in range");
        for (i, d) in self.orbit_degrees(&g).into_iter().enumerate() {
            let orbit = &self.orbits[i];
            for _ in 0..d.unsigned_abs() {
                let x = orbit[rng.gen_range(0..orbit.len())];
                g = self.mul(&g, &self.generator(x, d > 0));
            }
        }
        debug_assert!(self.in_h(&g));
        g
    }

    /// `{x·y⁻¹, x⁻¹·y : x ≠ y in one orbit}` together with their images
    /// under every `λ_z`, `z ∈ X`.
    pub fn h_probe_set(&self) -> Vec<SgElement> {
        let mut base = Vec::new();
        for orbit in &self.orbits {
            for &x in orbit {
                for &y in orbit {
                    if x != y {
                        base.push(self.mul(&self.generator(x, false), &self.generator(y, true)));
                        base.push(self.mul(&self.generator(x, true), &self.generator(y, false)));
                    }
                }
            }
        }
        let mut seen: HashSet<SgElement> = HashSet::new();
        let mut out = Vec::new();
        for p in &base {
            let translates = std::iter::once(p.clone())
                .chain((0..self.degree()).map(|z| self.lambda(&self.generator(z, false), p)));
            for t in translates {
                if seen.insert(t.clone()) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Bounded search for central elements of `H`: every non-identity element
    /// of `H` given by a word of length at most `radius` is tested against
    /// [`Self::h_probe_set`]. Evidence only, never a proof.
    pub fn probe_center_h(&self, params: &FamilyParams, radius: usize) -> ProbeReport {
        if !params.center_probe_hypotheses() || params.size() != self.degree() {
            return ProbeReport::not_applicable(radius);
        }
        let n = self.degree();
        let mut seen: HashSet<SgElement> = HashSet::new();
        seen.insert(self.identity());
        let mut layer = vec![self.identity()];
        let mut words = 1u64;
        for _ in 0..radius {
            let mut next = Vec::new();
            for g in &layer {
                for x in 0..n {
                    for inverse in [false, true] {
                        words += 1;
                        let h = self.mul(g, &self.generator(x, inverse));
                        if seen.insert(h.clone()) {
                            next.push(h);
                        }
                    }
                }
            }
            layer = next;
        }
        let distinct_elements = seen.len();
        let mut candidates: Vec<SgElement> = seen
            .into_iter()
            .filter(|g| !g.is_identity() && self.in_h(g))
            .collect();
        candidates.sort_by(|a, b| a.v.cmp(&b.v));
        let probes = self.h_probe_set();
        let centralizing = candidates
            .iter()
            .filter(|h| probes.iter().all(|p| self.mul(h, p) == self.mul(p, h)))
            .map(|h| h.v.clone())
            .collect();
        ProbeReport {
            applicable: true,
            radius,
            words_enumerated: words,
            distinct_elements,
            h_candidates: candidates.len(),
            probe_set_size: probes.len(),
            centralizing,
        }
    }

    /// Random checks of degree, orbit decomposition and closure of `H`.
    pub fn property_sweep<R: Rng>(&self, rng: &mut R, samples: usize, max_word_len: usize) -> PropertySweep {
        let mut out = PropertySweep {
            samples,
            max_word_len,
            degree_agrees: true,
            decomposition_round_trip: true,
            decomposition_unique: true,
            h_closed: true,
            first_failure: None,
        };
        let fail = |out: &mut PropertySweep, what: String| {
            if out.first_failure.is_none() {
                out.first_failure = Some(what);
            }
        };
        for k in 0..samples {
            let w = self.random_word(rng, max_word_len);
            let g = self.from_word(&w).expect("letters in range");
            if g.deg() != Self::word_degree(&w) {
                out.degree_agrees = false;
                fail(&mut out, format!("degree mismatch on sample {k}"));
            }

            for mode in [DecompositionMode::Product, DecompositionMode::Sum] {
                let d = self.decompose(&g, mode);
                if !self.factors_supported(&d) || self.reassemble(&d) != g {
                    out.decomposition_round_trip = false;
                    fail(&mut out, format!("{mode:?} decomposition fails on sample {k}"));
                }
            }

            // one factor per orbit, built from letters of that orbit only
            let factors: Vec<(usize, SgElement)> = self
                .orbits
                .iter()
                .enumerate()
                .map(|(i, orbit)| {
                    let len = rng.gen_range(0..=max_word_len.min(4));
                    let word: Vec<Letter> = (0..len)
                        .map(|_| Letter::new(orbit[rng.gen_range(0..orbit.len())], rng.gen_bool(0.5)))
                        .collect();
                    (i, self.from_word(&word).expect("letters in range"))
                })
                .filter(|(_, f)| !f.is_identity())
                .collect();
            let prod = factors.iter().fold(self.identity(), |acc, (_, f)| self.mul(&acc, f));
            if self.decompose(&prod, DecompositionMode::Product).factors != factors {
                out.decomposition_unique = false;
                fail(&mut out, format!("product decomposition not unique on sample {k}"));
            }

            let h1 = self.random_h_element(rng, max_word_len);
            let h2 = self.random_h_element(rng, max_word_len);
            let closed = self.in_h(&h1)
                && self.in_h(&self.mul(&h1, &h2))
                && self.in_h(&self.inv(&h1))
                && self.in_h(&self.lambda(&g, &h1))
                && self.in_h(&self.lambda(&h2, &h1));
            if !closed {
                out.h_closed = false;
                fail(&mut out, format!("H not closed on sample {k}"));
            }
        }
        out
    }

    /// Checks that `g ↦ (orbit degrees)` is a homomorphism onto `Z^orbits`
    /// with kernel `H`, on the generators and `samples` random words.
    pub fn quotient_rank_check<R: Rng>(&self, rng: &mut R, samples: usize) -> QuotientReport {
        let m = self.orbits.len();
        let generators_map_to_units = (0..self.degree()).all(|x| {
            let d = self.orbit_degrees(&self.generator(x, false));
            d.iter()
                .enumerate()
                .all(|(i, &c)| c == i64::from(i == self.orbit_of[x]))
        });
        let mut homomorphism_ok = true;
        let mut word_images_agree = true;
        let mut kernel_ok = true;
        for _ in 0..samples {
            let wa = self.random_word(rng, 10);
            let wb = self.random_word(rng, 10);
            let a = self.from_word(&wa).expect("letters in range");
            let b = self.from_word(&wb).expect("letters in range");
            let (da, db) = (self.orbit_degrees(&a), self.orbit_degrees(&b));
            let dab = self.orbit_degrees(&self.mul(&a, &b));
            if (0..m).any(|i| dab[i] != da[i] + db[i]) {
                homomorphism_ok = false;
            }
            if da != self.word_orbit_degrees(&wa) {
                word_images_agree = false;
            }
            let zero_image = self.word_orbit_degrees(&wa).iter().all(|&c| c == 0);
            if self.in_h(&a) != zero_image {
                kernel_ok = false;
            }
        }
        QuotientReport {
            orbit_count: m,
            generators_map_to_units,
            homomorphism_ok,
            word_images_agree,
            kernel_ok,
            samples,
        }
    }
}
