//! Explicit enumeration of permutation groups given by generators, with
//! word witnesses, subgroup closures and the derived and lower central series.
//!
//! Elements are stored as byte image arrays in insertion (BFS) order; index
//! 0 is the identity. Every non-identity element records its BFS parent and
//! the letter that reached it, so `elem = parent ∘ letter`.

use std::hash::BuildHasherDefault;

use indexmap::IndexSet;
use rustc_hash::FxHasher;
use serde::Serialize;
use thiserror::Error;

use crate::perm::Permutation;
use crate::solution::FiniteSolution;

/// Default enumeration cap.
pub const DEFAULT_CAP: usize = 2_000_000;

type FxIndexSet<T> = IndexSet<T, BuildHasherDefault<FxHasher>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermGroupError {
    #[error("enumeration incomplete: more than {cap} elements (stopped at {partial})")]
    CapExceeded { cap: usize, partial: usize },
    #[error("degree {0} is too large; at most 256 points are supported")]
    DegreeTooLarge(usize),
    #[error("generator {index} has degree {got}, expected {expected}")]
    DegreeMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("cap must be at least 1")]
    ZeroCap,
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Letter {
    pub generator: u32,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self {
            generator: generator as u32,
            inverse,
        }
    }

    pub fn inverted(self) -> Self {
        Self {
            inverse: !self.inverse,
            ..self
        }
    }
}

#[derive(Debug, Clone)]
pub struct PermGroupData {
    n: usize,
    generators: Vec<Permutation>,
    /// Letters used by the BFS: one per distinct non-identity generator and,
    /// when it is not an involution, one for its inverse.
    letters: Vec<Letter>,
    letter_images: Vec<Box<[u8]>>,
    elements: FxIndexSet<Box<[u8]>>,
    parent: Vec<u32>,
    via: Vec<Letter>,
    cap: usize,
}

/// A subgroup stored as a membership mask over group element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    mask: Vec<bool>,
    members: Vec<u32>,
    gens: Vec<u32>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.mask[g]
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|&m| m as usize)
    }

    pub fn generators(&self) -> impl Iterator<Item = usize> + '_ {
        self.gens.iter().map(|&m| m as usize)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum Nilpotency {
    Class(usize),
    NotNilpotent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupAnalysis {
    pub order: usize,
    pub orbits: Vec<Vec<usize>>,
    /// Orders of `G, G', G'', ...` until stable.
    pub derived_series: Vec<usize>,
    /// Orders of `γ_1 = G, γ_2 = [G, G], ...` until stable.
    pub lower_central_series: Vec<usize>,
    /// `None` when the derived series stabilizes above the identity.
    pub derived_length: Option<usize>,
    pub nilpotency_class: Nilpotency,
    pub center_order: usize,
}

impl PermGroupData {
    /// The group generated by the `σ_x` of a solution; generator `x` is `σ_x`.
    pub fn enumerate(s: &FiniteSolution, cap: usize) -> Result<Self, PermGroupError> {
        Self::from_generators(s.len(), s.sigmas().to_vec(), cap)
    }

    pub fn from_generators(
        n: usize,
        generators: Vec<Permutation>,
        cap: usize,
    ) -> Result<Self, PermGroupError> {
        if n > 256 {
            return Err(PermGroupError::DegreeTooLarge(n));
        }
        if cap == 0 {
            return Err(PermGroupError::ZeroCap);
        }
        for (index, g) in generators.iter().enumerate() {
            if g.degree() != n {
                return Err(PermGroupError::DegreeMismatch {
                    index,
                    got: g.degree(),
                    expected: n,
                });
            }
        }
        let bytes = |p: &Permutation| -> Box<[u8]> { p.images().iter().map(|&v| v as u8).collect() };

        let mut letters = Vec::new();
        let mut letter_images: Vec<Box<[u8]>> = Vec::new();
        for (x, g) in generators.iter().enumerate() {
            if g.is_identity() {
                continue;
            }
            let img = bytes(g);
            if letter_images.contains(&img) {
                continue;
            }
            letters.push(Letter::new(x, false));
            letter_images.push(img);
            let inv = bytes(&g.inverse());
            if !letter_images.contains(&inv) {
                letters.push(Letter::new(x, true));
                letter_images.push(inv);
            }
        }

        let mut elements: FxIndexSet<Box<[u8]>> = FxIndexSet::default();
        let identity: Box<[u8]> = (0..n).map(|v| v as u8).collect();
        elements.insert(identity);
        let mut parent = vec![0u32];
        let mut via = vec![Letter::new(0, false)];
        let mut head = 0;
        let mut buf = vec![0u8; n];
        while head < elements.len() {
            for (li, img) in letter_images.iter().enumerate() {
                let cur = &elements[head];
                for (slot, &y) in buf.iter_mut().zip(img.iter()) {
                    *slot = cur[y as usize];
                }
                if !elements.contains(buf.as_slice()) {
                    if elements.len() >= cap {
                        return Err(PermGroupError::CapExceeded {
                            cap,
                            partial: elements.len(),
                        });
                    }
                    elements.insert(buf.clone().into_boxed_slice());
                    parent.push(head as u32);
                    via.push(letters[li]);
                }
            }
            head += 1;
        }
        Ok(Self {
            n,
            generators,
            letters,
            letter_images,
            elements,
            parent,
            via,
            cap,
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Letters in the order the enumeration tried them.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn images(&self, g: usize) -> &[u8] {
        &self.elements[g]
    }

    pub fn element(&self, g: usize) -> Permutation {
        Permutation::from_images_unchecked(self.elements[g].iter().map(|&v| v as u32).collect())
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        if p.degree() != self.n {
            return None;
        }
        let key: Vec<u8> = p.images().iter().map(|&v| v as u8).collect();
        self.elements.get_index_of(key.as_slice())
    }

    pub fn index_of_images(&self, images: &[u8]) -> Option<usize> {
        self.elements.get_index_of(images)
    }

    /// Index of the generator `generators[x]` (or its inverse).
    pub fn generator_index(&self, x: usize, inverse: bool) -> usize {
        let p = if inverse {
            self.generators[x].inverse()
        } else {
            self.generators[x].clone()
        };
        self.index_of(&p).expect("generators lie in the group")
    }

    /// BFS parent and the letter with `g = parent ∘ letter`; `None` for the identity.
    pub fn parent(&self, g: usize) -> Option<(usize, Letter)> {
        (g != 0).then(|| (self.parent[g] as usize, self.via[g]))
    }

    /// A word `l_1 ... l_m` with `g = l_1 ∘ ... ∘ l_m`.
    pub fn word(&self, mut g: usize) -> Vec<Letter> {
        let mut w = Vec::new();
        while g != 0 {
            w.push(self.via[g]);
            g = self.parent[g] as usize;
        }
        w.reverse();
        w
    }

    pub fn evaluate_word(&self, word: &[Letter]) -> Permutation {
        word.iter().fold(Permutation::identity(self.n), |acc, l| {
            let g = &self.generators[l.generator as usize];
            if l.inverse {
                acc.compose(&g.inverse())
            } else {
                acc.compose(g)
            }
        })
    }

    /// `g ∘ h` as an index.
    pub fn mul(&self, g: usize, h: usize) -> usize {
        let a = &self.elements[g];
        let b = &self.elements[h];
        let prod: Vec<u8> = b.iter().map(|&y| a[y as usize]).collect();
        self.elements
            .get_index_of(prod.as_slice())
            .expect("enumeration is closed")
    }

    /// `g ∘ letter` as an index.
    pub fn mul_letter(&self, g: usize, letter_pos: usize) -> usize {
        let a = &self.elements[g];
        let prod: Vec<u8> = self.letter_images[letter_pos].iter().map(|&y| a[y as usize]).collect();
        self.elements
            .get_index_of(prod.as_slice())
            .expect("enumeration is closed")
    }

    pub fn inv(&self, g: usize) -> usize {
        let a = &self.elements[g];
        let mut out = vec![0u8; self.n];
        for (x, &y) in a.iter().enumerate() {
            out[y as usize] = x as u8;
        }
        self.elements
            .get_index_of(out.as_slice())
            .expect("enumeration is closed")
    }

    /// `g⁻¹ h⁻¹ g h`.
    pub fn commutator(&self, g: usize, h: usize) -> usize {
        let gi = self.inv(g);
        let hi = self.inv(h);
        self.mul(self.mul(gi, hi), self.mul(g, h))
    }

    /// `c⁻¹ g c`.
    pub fn conjugate(&self, g: usize, c: usize) -> usize {
        self.mul(self.mul(self.inv(c), g), c)
    }

    /// Indices of the distinct non-identity generators.
    pub fn generator_elements(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .letters
            .iter()
            .filter(|l| !l.inverse)
            .map(|l| self.generator_index(l.generator as usize, false))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            mask: vec![true; self.order()],
            members: (0..self.order() as u32).collect(),
            gens: self.generator_elements().into_iter().map(|g| g as u32).collect(),
        }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        let mut mask = vec![false; self.order()];
        mask[0] = true;
        Subgroup {
            mask,
            members: vec![0],
            gens: Vec::new(),
        }
    }

    /// Adds `h` to the generators of `sub` and closes under right multiplication.
    pub fn add_generator(&self, sub: &mut Subgroup, h: usize) -> bool {
        if sub.mask[h] {
            return false;
        }
        sub.gens.push(h as u32);
        let mut frontier: Vec<u32> = Vec::new();
        let old = sub.members.len();
        for k in 0..old {
            let p = self.mul(sub.members[k] as usize, h);
            if !sub.mask[p] {
                sub.mask[p] = true;
                sub.members.push(p as u32);
                frontier.push(p as u32);
            }
        }
        while let Some(x) = frontier.pop() {
            for gi in 0..sub.gens.len() {
                let p = self.mul(x as usize, sub.gens[gi] as usize);
                if !sub.mask[p] {
                    sub.mask[p] = true;
                    sub.members.push(p as u32);
                    frontier.push(p as u32);
                }
            }
        }
        true
    }

    pub fn subgroup(&self, gens: &[usize]) -> Subgroup {
        let mut sub = self.trivial_subgroup();
        for &g in gens {
            self.add_generator(&mut sub, g);
        }
        sub
    }

    /// The smallest subgroup containing `gens` and normalized by every
    /// element of `conjugators`.
    pub fn normal_closure(&self, gens: &[usize], conjugators: &[usize]) -> Subgroup {
        let mut sub = self.subgroup(gens);
        let mut k = 0;
        while k < sub.gens.len() {
            let g = sub.gens[k] as usize;
            for &c in conjugators {
                let h = self.conjugate(g, c);
                self.add_generator(&mut sub, h);
            }
            k += 1;
        }
        sub
    }

    /// `[H, H]` for a subgroup `H`.
    pub fn derived_subgroup(&self, h: &Subgroup) -> Subgroup {
        let gens: Vec<usize> = h.generators().collect();
        let mut comms = Vec::new();
        for (i, &a) in gens.iter().enumerate() {
            for &b in &gens[i + 1..] {
                comms.push(self.commutator(a, b));
            }
        }
        self.normal_closure(&comms, &gens)
    }

    /// `[G, N]` for a normal subgroup `N`.
    pub fn commutator_with_whole(&self, nsub: &Subgroup) -> Subgroup {
        let g_gens = self.generator_elements();
        let mut comms = Vec::new();
        for &s in &g_gens {
            for t in nsub.generators() {
                comms.push(self.commutator(s, t));
            }
        }
        self.normal_closure(&comms, &g_gens)
    }

    pub fn is_normal(&self, sub: &Subgroup) -> bool {
        let gens = self.generator_elements();
        sub.generators()
            .all(|h| gens.iter().all(|&c| sub.contains(self.conjugate(h, c))))
    }

    /// Orbits of `{0..n-1}` under the generators, each sorted, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits_of(self.n, self.letter_images.iter().map(|b| &b[..]))
    }

    /// Orbits computed from every element rather than the generators.
    pub fn orbits_from_elements(&self) -> Vec<Vec<usize>> {
        orbits_of(self.n, self.elements.iter().map(|b| &b[..]))
    }

    pub fn center(&self) -> Vec<usize> {
        let gens = self.generator_elements();
        (0..self.order())
            .filter(|&z| gens.iter().all(|&s| self.mul(z, s) == self.mul(s, z)))
            .collect()
    }

    pub fn analyze(&self) -> GroupAnalysis {
        let whole = self.whole();

        let mut derived_series = vec![whole.order()];
        let mut cur = whole.clone();
        while !cur.is_trivial() {
            let next = self.derived_subgroup(&cur);
            if next.order() == cur.order() {
                break;
            }
            derived_series.push(next.order());
            cur = next;
        }
        let derived_length = cur.is_trivial().then(|| derived_series.len() - 1);

        let mut lower_central_series = vec![whole.order()];
        let mut cur = whole;
        while !cur.is_trivial() {
            let next = self.commutator_with_whole(&cur);
            if next.order() == cur.order() {
                break;
            }
            lower_central_series.push(next.order());
            cur = next;
        }
        let nilpotency_class = if cur.is_trivial() {
            Nilpotency::Class(lower_central_series.len() - 1)
        } else {
            Nilpotency::NotNilpotent
        };

        GroupAnalysis {
            order: self.order(),
            orbits: self.orbits(),
            derived_series,
            lower_central_series,
            derived_length,
            nilpotency_class,
            center_order: self.center().len(),
        }
    }
}

fn orbits_of<'a>(n: usize, perms: impl Iterator<Item = &'a [u8]>) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for img in perms {
        for (x, &y) in img.iter().enumerate() {
            let (a, b) = (find(&mut parent, x), find(&mut parent, y as usize));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        let r = find(&mut parent, x);
        by_root[r].push(x);
    }
    by_root.into_iter().filter(|o| !o.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilyParams;

    fn perm(v: &[u32]) -> Permutation {
        Permutation::from_images(v.to_vec()).unwrap()
    }

    #[test]
    fn trivial_solution_gives_trivial_group() {
        let g = PermGroupData::enumerate(&FiniteSolution::trivial(4), 10).unwrap();
        assert_eq!(g.order(), 1);
        let a = g.analyze();
        assert_eq!(a.derived_length, Some(0));
        assert_eq!(a.nilpotency_class, Nilpotency::Class(0));
        assert_eq!(a.orbits, vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn eight_point_group() {
        let s = FamilyParams::eight_point().build();
        let g = PermGroupData::enumerate(&s, DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), 64);
        let a = g.analyze();
        assert_eq!(a.derived_length, Some(2));
        assert_eq!(a.nilpotency_class, Nilpotency::Class(2));
        assert_eq!(a.orbits, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
    }

    #[test]
    fn zero_phi2_orbits_refine_blocks() {
        let s = FamilyParams::cyclic_indicator(2, 2, 0).unwrap().build();
        let g = PermGroupData::enumerate(&s, DEFAULT_CAP).unwrap();
        // {a} × B × {i}
        assert_eq!(g.orbits(), vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]]);
    }

    #[test]
    fn cap_is_reported() {
        let s = FamilyParams::eight_point().build();
        let err = PermGroupData::enumerate(&s, 10).unwrap_err();
        assert_eq!(err, PermGroupError::CapExceeded { cap: 10, partial: 10 });
        assert!(PermGroupData::enumerate(&s, 64).is_ok());
    }

    #[test]
    fn words_evaluate_and_set_is_closed() {
        let s = FamilyParams::cyclic_indicator(3, 2, 1).unwrap().build();
        let g = PermGroupData::enumerate(&s, DEFAULT_CAP).unwrap();
        for e in (0..g.order()).step_by(37) {
            assert_eq!(g.evaluate_word(&g.word(e)), g.element(e));
        }
        for e in 0..g.order() {
            for x in 0..s.len() {
                assert!(g.index_of(&g.element(e).compose(s.sigma(x))).is_some());
            }
        }
        assert_eq!(g.orbits(), g.orbits_from_elements());
    }

    #[test]
    fn symmetric_group_series() {
        // S3 = <(0 1), (0 1 2)>: derived length 2, not nilpotent, trivial center
        let g = PermGroupData::from_generators(3, vec![perm(&[1, 0, 2]), perm(&[1, 2, 0])], 100).unwrap();
        assert_eq!(g.order(), 6);
        let a = g.analyze();
        assert_eq!(a.derived_series, vec![6, 3, 1]);
        assert_eq!(a.derived_length, Some(2));
        assert_eq!(a.nilpotency_class, Nilpotency::NotNilpotent);
        assert_eq!(a.lower_central_series, vec![6, 3]);
        assert_eq!(a.center_order, 1);
    }

    #[test]
    fn s4_and_dihedral_series() {
        // S4: derived series 24, 12, 4, 1
        let g = PermGroupData::from_generators(4, vec![perm(&[1, 0, 2, 3]), perm(&[1, 2, 3, 0])], 100).unwrap();
        let a = g.analyze();
        assert_eq!(a.derived_series, vec![24, 12, 4, 1]);
        assert_eq!(a.nilpotency_class, Nilpotency::NotNilpotent);
        // D4 of order 8: class 2, center of order 2
        let d = PermGroupData::from_generators(4, vec![perm(&[1, 2, 3, 0]), perm(&[0, 3, 2, 1])], 100).unwrap();
        let a = d.analyze();
        assert_eq!(a.order, 8);
        assert_eq!(a.nilpotency_class, Nilpotency::Class(2));
        assert_eq!(a.center_order, 2);
        assert_eq!(a.derived_length, Some(2));
        // A5 is perfect
        let a5 = PermGroupData::from_generators(
            5,
            vec![perm(&[1, 2, 0, 3, 4]), perm(&[0, 1, 3, 4, 2]), perm(&[1, 2, 3, 4, 0])],
            1000,
        )
        .unwrap();
        let a = a5.analyze();
        assert_eq!(a.order, 60);
        assert_eq!(a.derived_length, None);
        assert_eq!(a.derived_series, vec![60]);
    }

    #[test]
    fn normal_closure_is_normal() {
        let g = PermGroupData::from_generators(4, vec![perm(&[1, 0, 2, 3]), perm(&[1, 2, 3, 0])], 100).unwrap();
        let t = g.index_of(&perm(&[1, 0, 2, 3])).unwrap();
        let h = g.subgroup(&[t]);
        assert_eq!(h.order(), 2);
        assert!(!g.is_normal(&h));
        let n = g.normal_closure(&[t], &g.generator_elements());
        assert_eq!(n.order(), 24);
        assert!(g.is_normal(&n));
        let v = g.index_of(&perm(&[1, 0, 3, 2])).unwrap();
        let k = g.normal_closure(&[v], &g.generator_elements());
        assert_eq!(k.order(), 4);
    }
}
