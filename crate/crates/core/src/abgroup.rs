//! Finite abelian groups presented as products of cyclic groups, their
//! elements, and validated maps between them.
//!
//! A group `Z/m_1 x ... x Z/m_t` is stored by its moduli vector. Elements are
//! coordinate vectors with `0 <= c_i < m_i`. Every element also has a dense
//! index (mixed radix, first coordinate most significant) so that maps and
//! tables can be stored as plain vectors.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbError {
    #[error("a group needs at least one cyclic factor")]
    NoFactors,
    #[error("modulus must be at least 1, got {0}")]
    BadModulus(i64),
    #[error("group order overflows")]
    OrderOverflow,
    #[error("element has {got} coordinates, group has rank {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {value} is out of range for Z/{modulus}")]
    CoordinateOutOfRange { value: i64, modulus: u32 },
    #[error("matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error(
        "not a homomorphism: generator e{generator} has order {order} but {order}*e{generator} maps to {image}"
    )]
    NotAHomomorphism {
        generator: usize,
        order: u32,
        image: AbElement,
    },
    #[error("map is not even: f({a}) = {image} but f(-{a}) = {neg_image}")]
    NotEven {
        a: AbElement,
        image: AbElement,
        neg_image: AbElement,
    },
    #[error("map table has no entry for {0}")]
    MissingEntry(AbElement),
    #[error("map table has two entries for {0}")]
    DuplicateEntry(AbElement),
    #[error("cannot parse group `{0}`: expected factors like `Z/2 x Z/4`")]
    Parse(String),
}

/// `Z/m_1 x ... x Z/m_t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u32>,
    order: usize,
}

/// An element of a [`FiniteAbelianGroup`], with every coordinate reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbElement {
    coords: Vec<u32>,
}

impl AbElement {
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for AbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coords.as_slice() {
            [c] => write!(f, "{c}"),
            cs => {
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<u32>) -> Result<Self, AbError> {
        if moduli.is_empty() {
            return Err(AbError::NoFactors);
        }
        let mut order: usize = 1;
        for &m in &moduli {
            if m == 0 {
                return Err(AbError::BadModulus(0));
            }
            order = order
                .checked_mul(m as usize)
                .ok_or(AbError::OrderOverflow)?;
        }
        Ok(Self { moduli, order })
    }

    /// `Z/m`. Panics if `m == 0`.
    pub fn cyclic(m: u32) -> Self {
        Self::new(vec![m]).expect("cyclic modulus must be positive")
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Groups of order 1 are trivial; the family construction needs nontrivial ones.
    pub fn is_nontrivial(&self) -> bool {
        self.order > 1
    }

    /// The modulus when the group is presented as a single cyclic factor.
    pub fn as_cyclic(&self) -> Option<u32> {
        match self.moduli.as_slice() {
            [m] => Some(*m),
            _ => None,
        }
    }

    pub fn zero(&self) -> AbElement {
        AbElement {
            coords: vec![0; self.rank()],
        }
    }

    /// Builds an element, reducing each coordinate modulo its factor.
    pub fn element(&self, coords: &[i64]) -> Result<AbElement, AbError> {
        self.check_len(coords.len())?;
        Ok(AbElement {
            coords: coords
                .iter()
                .zip(&self.moduli)
                .map(|(&c, &m)| c.rem_euclid(m as i64) as u32)
                .collect(),
        })
    }

    /// Builds an element from coordinates that must already be reduced.
    pub fn element_exact(&self, coords: &[i64]) -> Result<AbElement, AbError> {
        self.check_len(coords.len())?;
        for (&c, &m) in coords.iter().zip(&self.moduli) {
            if c < 0 || c >= m as i64 {
                return Err(AbError::CoordinateOutOfRange {
                    value: c,
                    modulus: m,
                });
            }
        }
        self.element(coords)
    }

    pub fn contains(&self, x: &AbElement) -> bool {
        x.coords.len() == self.rank() && x.coords.iter().zip(&self.moduli).all(|(c, m)| c < m)
    }

    fn check_len(&self, got: usize) -> Result<(), AbError> {
        if got != self.rank() {
            return Err(AbError::DimensionMismatch {
                expected: self.rank(),
                got,
            });
        }
        Ok(())
    }

    fn check(&self, x: &AbElement) -> Result<(), AbError> {
        self.check_len(x.coords.len())?;
        for (&c, &m) in x.coords.iter().zip(&self.moduli) {
            if c >= m {
                return Err(AbError::CoordinateOutOfRange {
                    value: c as i64,
                    modulus: m,
                });
            }
        }
        Ok(())
    }

    pub fn add(&self, x: &AbElement, y: &AbElement) -> Result<AbElement, AbError> {
        self.check(x)?;
        self.check(y)?;
        Ok(AbElement {
            coords: x
                .coords
                .iter()
                .zip(&y.coords)
                .zip(&self.moduli)
                .map(|((&a, &b), &m)| ((a as u64 + b as u64) % m as u64) as u32)
                .collect(),
        })
    }

    pub fn neg(&self, x: &AbElement) -> Result<AbElement, AbError> {
        self.check(x)?;
        Ok(AbElement {
            coords: x
                .coords
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| (m - a) % m)
                .collect(),
        })
    }

    pub fn sub(&self, x: &AbElement, y: &AbElement) -> Result<AbElement, AbError> {
        let ny = self.neg(y)?;
        self.add(x, &ny)
    }

    /// `k * x` for any integer `k`.
    pub fn scale(&self, k: i64, x: &AbElement) -> Result<AbElement, AbError> {
        self.check(x)?;
        Ok(AbElement {
            coords: x
                .coords
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| ((a as i128 * k as i128).rem_euclid(m as i128)) as u32)
                .collect(),
        })
    }

    /// Dense index of an element in `0..order()`, lexicographic in the coordinates.
    pub fn index_of(&self, x: &AbElement) -> usize {
        x.coords
            .iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&c, &m)| acc * m as usize + c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> AbElement {
        let mut coords = vec![0; self.rank()];
        for (slot, &m) in coords.iter_mut().zip(&self.moduli).rev() {
            *slot = (index % m as usize) as u32;
            index /= m as usize;
        }
        AbElement { coords }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = AbElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    /// Addition table on dense indices: `table[i * order + j] = index(x_i + x_j)`.
    pub fn addition_table(&self) -> Vec<usize> {
        let elems: Vec<AbElement> = self.elements().collect();
        let mut table = Vec::with_capacity(self.order * self.order);
        for x in &elems {
            for y in &elems {
                let s = self.add(x, y).expect("own elements");
                table.push(self.index_of(&s));
            }
        }
        table
    }

    /// Negation on dense indices.
    pub fn negation_table(&self) -> Vec<usize> {
        self.elements()
            .map(|x| self.index_of(&self.neg(&x).expect("own element")))
            .collect()
    }

    /// Membership mask (over dense indices) of the subgroup generated by `gens`.
    pub fn generated_subgroup(&self, gens: &[AbElement]) -> Vec<bool> {
        let mut member = vec![false; self.order];
        let zero = self.index_of(&self.zero());
        member[zero] = true;
        let mut stack = vec![self.zero()];
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = self.add(&x, g).expect("generator in group");
                let iy = self.index_of(&y);
                if !member[iy] {
                    member[iy] = true;
                    stack.push(y);
                }
            }
        }
        member
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "Z/{m}")?;
        }
        Ok(())
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = AbError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AbError::Parse(s.to_string());
        let mut moduli = Vec::new();
        for factor in s.split(['x', '×']) {
            let factor = factor.trim();
            let m = factor
                .strip_prefix("Z/")
                .or_else(|| factor.strip_prefix("Z_"))
                .ok_or_else(bad)?
                .trim()
                .trim_start_matches('(')
                .trim_end_matches(')');
            let m: i64 = m.parse().map_err(|_| bad())?;
            if m < 1 || m > u32::MAX as i64 {
                return Err(AbError::BadModulus(m));
            }
            moduli.push(m as u32);
        }
        Self::new(moduli)
    }
}

/// A group homomorphism given by an integer matrix acting on coordinate
/// vectors. The matrix has one row per target factor and one column per
/// source factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbHom {
    pub source: FiniteAbelianGroup,
    pub target: FiniteAbelianGroup,
    pub matrix: Vec<Vec<i64>>,
}

/// An [`AbHom`] whose well-definedness has been checked, with its full
/// table and injectivity/surjectivity flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedHom {
    hom: AbHom,
    table: Vec<usize>,
    injective: bool,
    surjective: bool,
}

impl AbHom {
    pub fn new(source: FiniteAbelianGroup, target: FiniteAbelianGroup, matrix: Vec<Vec<i64>>) -> Self {
        Self {
            source,
            target,
            matrix,
        }
    }

    /// The identity matrix between two groups of the same rank.
    pub fn identity(group: &FiniteAbelianGroup) -> Self {
        let t = group.rank();
        let matrix = (0..t)
            .map(|r| (0..t).map(|c| i64::from(r == c)).collect())
            .collect();
        Self::new(group.clone(), group.clone(), matrix)
    }

    pub fn zero(source: &FiniteAbelianGroup, target: &FiniteAbelianGroup) -> Self {
        Self::new(
            source.clone(),
            target.clone(),
            vec![vec![0; source.rank()]; target.rank()],
        )
    }

    /// `x ↦ M x` on coordinate representatives, reduced in the target.
    fn apply_raw(&self, x: &AbElement) -> AbElement {
        let coords: Vec<i64> = self
            .matrix
            .iter()
            .zip(self.target.moduli())
            .map(|(row, &m)| {
                row.iter()
                    .zip(&x.coords)
                    .map(|(&e, &c)| e as i128 * c as i128)
                    .sum::<i128>()
                    .rem_euclid(m as i128) as i64
            })
            .collect();
        AbElement {
            coords: coords.into_iter().map(|c| c as u32).collect(),
        }
    }

    pub fn validate(self) -> Result<ValidatedHom, AbError> {
        let rows = self.matrix.len();
        let cols = self.matrix.first().map_or(0, Vec::len);
        if rows != self.target.rank()
            || self.matrix.iter().any(|r| r.len() != self.source.rank())
        {
            return Err(AbError::MatrixShape {
                rows,
                cols,
                expected_rows: self.target.rank(),
                expected_cols: self.source.rank(),
            });
        }
        for (j, &order) in self.source.moduli().iter().enumerate() {
            let image: Vec<i64> = self
                .matrix
                .iter()
                .zip(self.target.moduli())
                .map(|(row, &m)| (row[j] as i128 * order as i128).rem_euclid(m as i128) as i64)
                .collect();
            let image = self.target.element(&image)?;
            if !image.is_zero() {
                return Err(AbError::NotAHomomorphism {
                    generator: j,
                    order,
                    image,
                });
            }
        }
        let table: Vec<usize> = self
            .source
            .elements()
            .map(|x| self.target.index_of(&self.apply_raw(&x)))
            .collect();
        let mut hit = vec![false; self.target.order()];
        let mut injective = true;
        for &y in &table {
            if hit[y] {
                injective = false;
            }
            hit[y] = true;
        }
        let surjective = hit.iter().all(|&h| h);
        Ok(ValidatedHom {
            hom: self,
            table,
            injective,
            surjective,
        })
    }
}

impl ValidatedHom {
    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.hom.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.hom.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.hom.matrix
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn apply(&self, x: &AbElement) -> AbElement {
        self.hom.target.element_at(self.table[self.hom.source.index_of(x)])
    }

    /// The map on dense indices.
    pub fn apply_index(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

/// Every homomorphism `source -> target`, one per distinct map.
pub fn all_homs(source: &FiniteAbelianGroup, target: &FiniteAbelianGroup) -> Vec<ValidatedHom> {
    let rows = target.rank();
    let cols = source.rank();
    let ranges: Vec<u32> = (0..rows * cols).map(|k| target.moduli()[k / cols]).collect();
    let mut out = Vec::new();
    let mut entries = vec![0u32; rows * cols];
    loop {
        let matrix = (0..rows)
            .map(|r| (0..cols).map(|c| entries[r * cols + c] as i64).collect())
            .collect();
        if let Ok(h) = AbHom::new(source.clone(), target.clone(), matrix).validate() {
            out.push(h);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == entries.len() {
                return out;
            }
            entries[k] += 1;
            if entries[k] < ranges[k] {
                break;
            }
            entries[k] = 0;
            k += 1;
        }
    }
}

/// A set map `source -> target` given as a table, expected to satisfy
/// `f(-a) = f(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenMap {
    pub source: FiniteAbelianGroup,
    pub target: FiniteAbelianGroup,
    pub table: Vec<(AbElement, AbElement)>,
}

/// An even map that passed [`EvenMap::validate`], with the flags the family
/// construction cares about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedEvenMap {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    images: Vec<usize>,
    zero_to_zero: bool,
    zero_fiber_trivial: bool,
    generates_target: bool,
}

impl EvenMap {
    pub fn new(
        source: FiniteAbelianGroup,
        target: FiniteAbelianGroup,
        table: Vec<(AbElement, AbElement)>,
    ) -> Self {
        Self {
            source,
            target,
            table,
        }
    }

    pub fn from_fn(
        source: &FiniteAbelianGroup,
        target: &FiniteAbelianGroup,
        f: impl Fn(&AbElement) -> AbElement,
    ) -> Self {
        let table = source.elements().map(|a| {
            let b = f(&a);
            (a, b)
        });
        Self::new(source.clone(), target.clone(), table.collect())
    }

    pub fn validate(self) -> Result<ValidatedEvenMap, AbError> {
        let mut images: Vec<Option<usize>> = vec![None; self.source.order()];
        for (a, b) in &self.table {
            self.source.check(a)?;
            self.target.check(b)?;
            let slot = &mut images[self.source.index_of(a)];
            if slot.is_some() {
                return Err(AbError::DuplicateEntry(a.clone()));
            }
            *slot = Some(self.target.index_of(b));
        }
        let mut full = Vec::with_capacity(images.len());
        for (i, img) in images.iter().enumerate() {
            match img {
                Some(y) => full.push(*y),
                None => return Err(AbError::MissingEntry(self.source.element_at(i))),
            }
        }
        for a in self.source.elements() {
            let na = self.source.neg(&a)?;
            let fa = full[self.source.index_of(&a)];
            let fna = full[self.source.index_of(&na)];
            if fa != fna {
                return Err(AbError::NotEven {
                    a,
                    image: self.target.element_at(fa),
                    neg_image: self.target.element_at(fna),
                });
            }
        }
        let zero_t = self.target.index_of(&self.target.zero());
        let zero_s = self.source.index_of(&self.source.zero());
        let zero_to_zero = full[zero_s] == zero_t;
        let zero_fiber_trivial = full
            .iter()
            .enumerate()
            .all(|(i, &y)| (y == zero_t) == (i == zero_s));
        let image_elems: Vec<AbElement> = full.iter().map(|&y| self.target.element_at(y)).collect();
        let generates_target = self
            .target
            .generated_subgroup(&image_elems)
            .iter()
            .all(|&m| m);
        Ok(ValidatedEvenMap {
            source: self.source,
            target: self.target,
            images: full,
            zero_to_zero,
            zero_fiber_trivial,
            generates_target,
        })
    }
}

impl ValidatedEvenMap {
    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn apply(&self, a: &AbElement) -> AbElement {
        self.target.element_at(self.images[self.source.index_of(a)])
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `f(0) = 0`.
    pub fn maps_zero_to_zero(&self) -> bool {
        self.zero_to_zero
    }

    /// `f⁻¹(0) = {0}`.
    pub fn has_trivial_zero_fiber(&self) -> bool {
        self.zero_fiber_trivial
    }

    /// The image of `f` generates the target group.
    pub fn image_generates_target(&self) -> bool {
        self.generates_target
    }

    /// Membership mask of `⟨f(A)⟩` over the target's dense indices.
    pub fn generated_image(&self) -> Vec<bool> {
        let imgs: Vec<AbElement> = self.images.iter().map(|&y| self.target.element_at(y)).collect();
        self.target.generated_subgroup(&imgs)
    }

    pub fn table(&self) -> Vec<(AbElement, AbElement)> {
        self.source
            .elements()
            .enumerate()
            .map(|(i, a)| (a, self.target.element_at(self.images[i])))
            .collect()
    }
}
