//! Permutations of `{0..n-1}` stored as image arrays.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("image {image} at position {position} is out of range for degree {degree}")]
    OutOfRange {
        position: usize,
        image: usize,
        degree: usize,
    },
    #[error("positions {first} and {second} both map to {image}")]
    NotInjective {
        first: usize,
        second: usize,
        image: usize,
    },
}

/// A bijection of `{0..n-1}`; `images[x]` is the image of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen: Vec<Option<usize>> = vec![None; n];
        for (x, &y) in images.iter().enumerate() {
            let y = y as usize;
            if y >= n {
                return Err(PermError::OutOfRange {
                    position: x,
                    image: y,
                    degree: n,
                });
            }
            if let Some(first) = seen[y] {
                return Err(PermError::NotInjective {
                    first,
                    second: x,
                    image: y,
                });
            }
            seen[y] = Some(x);
        }
        Ok(Self { images })
    }

    /// Caller guarantees bijectivity.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_ok());
        Self { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Self {
            images: other.images.iter().map(|&y| self.images[y as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Self { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    /// Cycle lengths in descending order, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    pub fn order(&self) -> u64 {
        self.cycle_type()
            .into_iter()
            .fold(1u64, |acc, l| acc.lcm(&(l as u64)))
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut out = Self::identity(self.degree());
        for _ in 0..k {
            out = out.compose(self);
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation without fixed points; `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut wrote = false;
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.apply(x);
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_applies_right_factor_first() {
        let p = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let q = Permutation::from_images(vec![1, 0, 2]).unwrap();
        let pq = p.compose(&q);
        for x in 0..3 {
            assert_eq!(pq.apply(x), p.apply(q.apply(x)));
        }
    }

    #[test]
    fn inverse_and_order() {
        let p = Permutation::from_images(vec![1, 2, 0, 4, 3]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(p.order(), 6);
        assert_eq!(p.cycle_type(), vec![3, 2]);
        assert!(p.pow(6).is_identity());
        assert!(!p.pow(3).is_identity());
        assert_eq!(p.to_string(), "(0 1 2)(3 4)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(matches!(
            Permutation::from_images(vec![0, 0]),
            Err(PermError::NotInjective { first: 0, second: 1, image: 0 })
        ));
        assert!(matches!(
            Permutation::from_images(vec![0, 5]),
            Err(PermError::OutOfRange { .. })
        ));
    }
}
