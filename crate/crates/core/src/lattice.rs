//! Integer lattices in `Z^n` kept in row Hermite normal form.
//!
//! [`HnfBuilder`] accepts generating vectors one at a time with exact
//! arbitrary-precision arithmetic. Once the lattice has full rank, it can be
//! frozen into a [`FullRankHnf`] over `i64` for fast coset reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("vector has length {got}, lattice dimension is {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("lattice has rank {rank} < {dim}")]
    NotFullRank { rank: usize, dim: usize },
    #[error("HNF entry does not fit in 64 bits")]
    Overflow,
}

/// Upper-triangular basis indexed by pivot column.
#[derive(Debug, Clone)]
pub struct HnfBuilder {
    dim: usize,
    rows: Vec<Option<Vec<BigInt>>>,
}

impl HnfBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![None; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.iter().all(Option::is_some)
    }

    /// Product of the pivots, i.e. the index `[Z^n : L]` once full rank.
    pub fn determinant(&self) -> Option<BigInt> {
        self.rows
            .iter()
            .enumerate()
            .map(|(c, r)| r.as_ref().map(|r| r[c].clone()))
            .product()
    }

    /// Adds a generator. Returns whether the lattice grew.
    pub fn insert(&mut self, v: &[i64]) -> Result<bool, LatticeError> {
        if v.len() != self.dim {
            return Err(LatticeError::Dimension {
                expected: self.dim,
                got: v.len(),
            });
        }
        let mut v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let mut changed = false;
        for col in 0..self.dim {
            if v[col].is_zero() {
                continue;
            }
            match self.rows[col].take() {
                None => {
                    if v[col].is_negative() {
                        v.iter_mut().for_each(|x| *x = -&*x);
                    }
                    self.rows[col] = Some(v);
                    self.reduce_row(col);
                    return Ok(true);
                }
                Some(r) => {
                    let a = r[col].clone();
                    let b = v[col].clone();
                    if b.is_multiple_of(&a) {
                        // the existing row already has the right pivot
                        let q = &b / &a;
                        for c in col..self.dim {
                            v[c] -= &q * &r[c];
                        }
                        self.rows[col] = Some(r);
                        continue;
                    }
                    let e = a.extended_gcd(&b);
                    let (g, s, t) = (e.gcd, e.x, e.y);
                    let (ag, bg) = (&a / &g, &b / &g);
                    let mut new_row = vec![BigInt::zero(); self.dim];
                    let mut rest = vec![BigInt::zero(); self.dim];
                    for c in col..self.dim {
                        new_row[c] = &s * &r[c] + &t * &v[c];
                        rest[c] = &bg * &r[c] - &ag * &v[c];
                    }
                    if new_row[col].is_negative() {
                        new_row.iter_mut().for_each(|x| *x = -&*x);
                    }
                    self.rows[col] = Some(new_row);
                    self.reduce_row(col);
                    changed = true;
                    v = rest;
                }
            }
        }
        Ok(changed)
    }

    /// Reduces the entries of row `col` right of its pivot modulo later pivots.
    fn reduce_row(&mut self, col: usize) {
        let mut row = self.rows[col].take().expect("row present");
        for c in col + 1..self.dim {
            if let Some(r) = &self.rows[c] {
                let q = row[c].div_floor(&r[c]);
                if !q.is_zero() {
                    for k in c..self.dim {
                        row[k] -= &q * &r[k];
                    }
                }
            }
        }
        self.rows[col] = Some(row);
    }

    /// The canonical Hermite normal form: upper triangular, positive
    /// diagonal, and every entry above a pivot in `[0, pivot)`.
    pub fn finish(&self) -> Result<FullRankHnf, LatticeError> {
        if !self.is_full_rank() {
            return Err(LatticeError::NotFullRank {
                rank: self.rank(),
                dim: self.dim,
            });
        }
        let mut rows: Vec<Vec<BigInt>> = self.rows.iter().map(|r| r.clone().expect("full rank")).collect();
        // ascending, since reducing by row c only touches columns >= c
        for c in 0..self.dim {
            let pivot = rows[c].clone();
            for r in rows.iter_mut().take(c) {
                let q = r[c].div_floor(&pivot[c]);
                if !q.is_zero() {
                    for k in c..self.dim {
                        r[k] -= &q * &pivot[k];
                    }
                }
            }
        }
        let mut flat = Vec::with_capacity(self.dim * self.dim);
        for r in &rows {
            for x in r {
                flat.push(x.to_i64().ok_or(LatticeError::Overflow)?);
            }
        }
        Ok(FullRankHnf {
            dim: self.dim,
            rows: flat,
        })
    }
}

/// A full-rank lattice in canonical row HNF over `i64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullRankHnf {
    dim: usize,
    rows: Vec<i64>,
}

impl FullRankHnf {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.dim).map(|i| self.rows[i * self.dim + i]).collect()
    }

    /// `[Z^n : L]`.
    pub fn index(&self) -> BigInt {
        self.diagonal().into_iter().map(BigInt::from).product()
    }

    /// Rewrites `v` as the unique coset representative with `0 <= v_i < h_ii`.
    pub fn reduce(&self, v: &mut [i64]) {
        let n = self.dim;
        for c in 0..n {
            let row = &self.rows[c * n..(c + 1) * n];
            let q = v[c].div_euclid(row[c]);
            if q != 0 {
                for k in c..n {
                    v[k] -= q * row[k];
                }
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }
}

/// Index of the lattice spanned by `gens`, if it has full rank.
pub fn lattice_index(dim: usize, gens: &[Vec<i64>]) -> Result<BigInt, LatticeError> {
    let mut b = HnfBuilder::new(dim);
    for g in gens {
        b.insert(g)?;
    }
    b.determinant()
        .map(|d| d.abs())
        .ok_or(LatticeError::NotFullRank { rank: b.rank(), dim })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integer determinant by cofactor expansion.
    fn det(m: &[Vec<i64>]) -> i128 {
        let n = m.len();
        if n == 1 {
            return m[0][0] as i128;
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, &x)| x).collect())
                    .collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] as i128 * det(&minor)
            })
            .sum()
    }

    #[test]
    fn square_basis_index_is_abs_det() {
        let m = vec![vec![2, 1, 0], vec![0, 3, 1], vec![4, 0, 5]];
        assert_eq!(lattice_index(3, &m).unwrap(), BigInt::from(det(&m).abs()));
    }

    #[test]
    fn hnf_is_canonical_and_reduces() {
        let gens = vec![vec![4, 6], vec![2, 2], vec![0, 10]];
        let mut b = HnfBuilder::new(2);
        for g in &gens {
            b.insert(g).unwrap();
        }
        let h = b.finish().unwrap();
        assert_eq!(h.index(), BigInt::from(4));
        for g in &gens {
            assert!(h.contains(g));
        }
        assert_eq!(h.rows(), vec![vec![2, 0], vec![0, 2]]);
        let mut v = vec![5, -3];
        h.reduce(&mut v);
        assert_eq!(v, vec![1, 1]);
    }

    #[test]
    fn finish_reduces_every_column_above_its_pivot() {
        let mut b = HnfBuilder::new(3);
        for g in [[1, 0, 2], [0, 1, 1], [0, 0, 2]] {
            b.insert(&g).unwrap();
        }
        assert_eq!(
            b.finish().unwrap().rows(),
            vec![vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 2]]
        );
    }

    #[test]
    fn order_of_insertion_does_not_matter() {
        let gens = vec![vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5], vec![3, 5, 8], vec![9, 7, 9]];
        let mut a = HnfBuilder::new(3);
        for g in &gens {
            a.insert(g).unwrap();
        }
        let mut b = HnfBuilder::new(3);
        for g in gens.iter().rev() {
            b.insert(g).unwrap();
        }
        assert_eq!(a.finish().unwrap(), b.finish().unwrap());
    }

    #[test]
    fn rank_deficient_is_an_error() {
        let mut b = HnfBuilder::new(2);
        b.insert(&[1, 1]).unwrap();
        b.insert(&[2, 2]).unwrap();
        assert_eq!(b.rank(), 1);
        assert!(matches!(b.finish(), Err(LatticeError::NotFullRank { rank: 1, dim: 2 })));
    }
}
