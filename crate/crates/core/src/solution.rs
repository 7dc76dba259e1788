//! Finite involutive non-degenerate set-theoretic solutions, stored by their
//! left actions `σ_x`.
//!
//! The map is `r(x, y) = (σ_x(y), γ_y(x))` with `γ_y(x) = σ⁻¹_{σ_x(y)}(x)`.
//! Only the σ table is ever supplied; γ is derived.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("a solution needs at least one point")]
    Empty,
    #[error("row {row} has {got} entries, expected {expected}")]
    RowLength {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("entry {value} in row {row} is out of range for {n} points")]
    EntryOutOfRange { row: usize, value: usize, n: usize },
    #[error("{got} labels given for {expected} points")]
    LabelCount { got: usize, expected: usize },
    #[error("label `{0}` is used twice")]
    DuplicateLabel(String),
    #[error("table is not a solution: {0}")]
    NotASolution(Box<ValidationReport>),
    #[error("subset is not invariant: r({x}, {y}) leaves it")]
    NotInvariant { x: String, y: String },
    #[error("subset index {0} is out of range")]
    SubsetIndex(usize),
    #[error("subset is empty")]
    EmptySubset,
    #[error("a twisted union needs at least two blocks, got {0}")]
    TooFewBlocks(usize),
    #[error("blocks do not partition the points: {0}")]
    NotAPartition(String),
    #[error("block {block} is not invariant: σ_{x} moves {y} out of it")]
    BlockNotInvariant { block: usize, x: String, y: String },
}

/// A square table `rows[x][y] = σ_x(y)` that has not been checked yet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaTable {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<usize>>,
}

impl SigmaTable {
    /// Labels default to the decimal indices.
    pub fn new(rows: Vec<Vec<usize>>) -> Self {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        Self { labels, rows }
    }

    pub fn with_labels(labels: Vec<String>, rows: Vec<Vec<usize>>) -> Self {
        Self { labels, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn check_shape(&self) -> Result<(), SolutionError> {
        let n = self.rows.len();
        if n == 0 {
            return Err(SolutionError::Empty);
        }
        if self.labels.len() != n {
            return Err(SolutionError::LabelCount {
                got: self.labels.len(),
                expected: n,
            });
        }
        let mut seen = HashSet::new();
        for l in &self.labels {
            if !seen.insert(l) {
                return Err(SolutionError::DuplicateLabel(l.clone()));
            }
        }
        for (x, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(SolutionError::RowLength {
                    row: x,
                    got: row.len(),
                    expected: n,
                });
            }
            if let Some(&v) = row.iter().find(|&&v| v >= n) {
                return Err(SolutionError::EntryOutOfRange { row: x, value: v, n });
            }
        }
        Ok(())
    }
}

/// Outcome of one property check, with the first counterexample when it fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Flag {
    fn ok() -> Self {
        Self {
            holds: true,
            witness: None,
        }
    }

    fn fail(witness: impl Into<String>) -> Self {
        Self {
            holds: false,
            witness: Some(witness.into()),
        }
    }

    fn from_witness(w: Option<String>) -> Self {
        match w {
            None => Self::ok(),
            Some(w) => Self::fail(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub size: usize,
    pub involutive: Flag,
    pub non_degenerate: Flag,
    /// Direct check of `r12 r23 r12 = r23 r12 r23` on all triples.
    pub braid: Flag,
    /// The pairwise criterion `σ_x σ_{σ_x⁻¹(y)} = σ_y σ_{σ_y⁻¹(x)}`.
    pub braid_pairwise: Flag,
    pub square_free: Flag,
    pub lri: Flag,
    pub trivial: Flag,
}

impl ValidationReport {
    pub fn is_solution(&self) -> bool {
        self.involutive.holds && self.non_degenerate.holds && self.braid.holds
    }

    /// On involutive non-degenerate tables the two braid checks must agree.
    pub fn braid_checks_agree(&self) -> bool {
        !(self.involutive.holds && self.non_degenerate.holds)
            || self.braid.holds == self.braid_pairwise.holds
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("involutive", &self.involutive),
            ("non_degenerate", &self.non_degenerate),
            ("braid", &self.braid),
            ("braid_pairwise", &self.braid_pairwise),
            ("square_free", &self.square_free),
            ("lri", &self.lri),
            ("trivial", &self.trivial),
        ];
        for (name, flag) in rows {
            write!(f, "{name}={}", flag.holds)?;
            if let Some(w) = &flag.witness {
                write!(f, " [{w}]")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn inverse_row(row: &[usize]) -> Option<Vec<usize>> {
    let n = row.len();
    let mut inv = vec![usize::MAX; n];
    for (x, &y) in row.iter().enumerate() {
        if inv[y] != usize::MAX {
            return None;
        }
        inv[y] = x;
    }
    Some(inv)
}

/// Evaluates every flag of a σ table by exhaustion. Never fails on
/// mathematical grounds; only malformed tables are rejected.
pub fn validate(table: &SigmaTable) -> Result<ValidationReport, SolutionError> {
    table.check_shape()?;
    let n = table.len();
    let s = &table.rows;
    let lbl = |x: usize| table.labels[x].as_str();

    let square_free = Flag::from_witness(
        (0..n)
            .find(|&x| s[x][x] != x)
            .map(|x| format!("σ_{}({}) = {}", lbl(x), lbl(x), lbl(s[x][x]))),
    );
    let trivial = Flag::from_witness((0..n).find_map(|x| {
        (0..n)
            .find(|&y| s[x][y] != y)
            .map(|y| format!("σ_{}({}) = {}", lbl(x), lbl(y), lbl(s[x][y])))
    }));

    let mut inv = Vec::with_capacity(n);
    for (x, row) in s.iter().enumerate() {
        match inverse_row(row) {
            Some(r) => inv.push(r),
            None => {
                let w = format!("σ_{} is not a bijection", lbl(x));
                let skipped = || Flag::fail("not evaluated: some σ_x is not a bijection");
                return Ok(ValidationReport {
                    size: n,
                    involutive: skipped(),
                    non_degenerate: Flag::fail(w),
                    braid: skipped(),
                    braid_pairwise: skipped(),
                    square_free,
                    lri: skipped(),
                    trivial,
                });
            }
        }
    }

    // gamma[y][x] = γ_y(x)
    let gamma: Vec<Vec<usize>> = (0..n)
        .map(|y| (0..n).map(|x| inv[s[x][y]][x]).collect())
        .collect();

    let non_degenerate = Flag::from_witness(
        (0..n)
            .find(|&y| inverse_row(&gamma[y]).is_none())
            .map(|y| format!("γ_{} is not a bijection", lbl(y))),
    );

    let r = |x: usize, y: usize| (s[x][y], gamma[y][x]);
    let involutive = Flag::from_witness((0..n).find_map(|x| {
        (0..n).find_map(|y| {
            let (u, v) = r(x, y);
            let back = r(u, v);
            (back != (x, y)).then(|| {
                format!(
                    "r(r({}, {})) = ({}, {})",
                    lbl(x),
                    lbl(y),
                    lbl(back.0),
                    lbl(back.1)
                )
            })
        })
    }));

    let braid = Flag::from_witness(braid_direct_witness(s, &gamma).map(|(x, y, z)| {
        format!("braid relation fails at ({}, {}, {})", lbl(x), lbl(y), lbl(z))
    }));
    let braid_pairwise = Flag::from_witness(braid_pairwise_witness(s, &inv).map(|(x, y)| {
        format!(
            "σ_{x} σ_{{σ_{x}⁻¹({y})}} ≠ σ_{y} σ_{{σ_{y}⁻¹({x})}}",
            x = lbl(x),
            y = lbl(y)
        )
    }));

    let lri = Flag::from_witness((0..n).find_map(|z| {
        (0..n)
            .find(|&t| gamma[z][t] != inv[z][t])
            .map(|t| format!("γ_{z}({t}) ≠ σ_{z}⁻¹({t})", z = lbl(z), t = lbl(t)))
    }));

    Ok(ValidationReport {
        size: n,
        involutive,
        non_degenerate,
        braid,
        braid_pairwise,
        square_free,
        lri,
        trivial,
    })
}

fn braid_direct_witness(s: &[Vec<usize>], gamma: &[Vec<usize>]) -> Option<(usize, usize, usize)> {
    let n = s.len();
    let r = |x: usize, y: usize| (s[x][y], gamma[y][x]);
    let r12 = |(a, b, c): (usize, usize, usize)| {
        let (u, v) = r(a, b);
        (u, v, c)
    };
    let r23 = |(a, b, c): (usize, usize, usize)| {
        let (u, v) = r(b, c);
        (a, u, v)
    };
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let t = (x, y, z);
                if r12(r23(r12(t))) != r23(r12(r23(t))) {
                    return Some(t);
                }
            }
        }
    }
    None
}

fn braid_pairwise_witness(s: &[Vec<usize>], inv: &[Vec<usize>]) -> Option<(usize, usize)> {
    let n = s.len();
    for x in 0..n {
        for y in 0..n {
            let u = inv[x][y];
            let v = inv[y][x];
            if (0..n).any(|t| s[x][s[u][t]] != s[y][s[v][t]]) {
                return Some((x, y));
            }
        }
    }
    None
}

/// A validated solution. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSolution {
    labels: Vec<String>,
    sigma: Vec<Permutation>,
    sigma_inv: Vec<Permutation>,
    /// `gamma[y]` is the map `x ↦ γ_y(x)`.
    gamma: Vec<Permutation>,
    report: ValidationReport,
}

impl FiniteSolution {
    pub fn new(table: SigmaTable) -> Result<Self, SolutionError> {
        let report = validate(&table)?;
        if !report.is_solution() {
            return Err(SolutionError::NotASolution(Box::new(report)));
        }
        let n = table.len();
        let sigma: Vec<Permutation> = table
            .rows
            .iter()
            .map(|row| Permutation::from_images_unchecked(row.iter().map(|&v| v as u32).collect()))
            .collect();
        let sigma_inv: Vec<Permutation> = sigma.iter().map(Permutation::inverse).collect();
        let gamma = (0..n)
            .map(|y| {
                Permutation::from_images_unchecked(
                    (0..n)
                        .map(|x| sigma_inv[sigma[x].apply(y)].apply(x) as u32)
                        .collect(),
                )
            })
            .collect();
        Ok(Self {
            labels: table.labels,
            sigma,
            sigma_inv,
            gamma,
            report,
        })
    }

    /// `r(x, y) = (y, x)` on `n` points.
    pub fn trivial(n: usize) -> Self {
        let rows = (0..n).map(|_| (0..n).collect()).collect();
        Self::new(SigmaTable::new(rows)).expect("trivial solution is valid")
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn sigma(&self, x: usize) -> &Permutation {
        &self.sigma[x]
    }

    pub fn sigma_inv(&self, x: usize) -> &Permutation {
        &self.sigma_inv[x]
    }

    pub fn gamma(&self, y: usize) -> &Permutation {
        &self.gamma[y]
    }

    pub fn sigmas(&self) -> &[Permutation] {
        &self.sigma
    }

    pub fn r(&self, x: usize, y: usize) -> (usize, usize) {
        (self.sigma[x].apply(y), self.gamma[y].apply(x))
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn table(&self) -> SigmaTable {
        SigmaTable {
            labels: self.labels.clone(),
            rows: self
                .sigma
                .iter()
                .map(|p| p.images().iter().map(|&v| v as usize).collect())
                .collect(),
        }
    }

    pub fn is_square_free(&self) -> bool {
        (0..self.len()).all(|x| self.sigma[x].apply(x) == x)
    }

    pub fn check_lri(&self) -> bool {
        (0..self.len()).all(|z| self.gamma[z] == self.sigma_inv[z])
    }

    pub fn is_trivial(&self) -> bool {
        self.sigma.iter().all(Permutation::is_identity)
    }

    /// The induced solution on an `r`-invariant subset, in the given order.
    pub fn restrict(&self, subset: &[usize]) -> Result<FiniteSolution, SolutionError> {
        if subset.is_empty() {
            return Err(SolutionError::EmptySubset);
        }
        let mut pos = vec![usize::MAX; self.len()];
        for (k, &x) in subset.iter().enumerate() {
            if x >= self.len() {
                return Err(SolutionError::SubsetIndex(x));
            }
            if pos[x] != usize::MAX {
                return Err(SolutionError::DuplicateLabel(self.labels[x].clone()));
            }
            pos[x] = k;
        }
        for &x in subset {
            for &y in subset {
                let (u, v) = self.r(x, y);
                if pos[u] == usize::MAX || pos[v] == usize::MAX {
                    return Err(SolutionError::NotInvariant {
                        x: self.labels[x].clone(),
                        y: self.labels[y].clone(),
                    });
                }
            }
        }
        let rows = subset
            .iter()
            .map(|&x| subset.iter().map(|&y| pos[self.sigma[x].apply(y)]).collect())
            .collect();
        let labels = subset.iter().map(|&x| self.labels[x].clone()).collect();
        FiniteSolution::new(SigmaTable::with_labels(labels, rows))
    }

    /// Checks that `blocks` partition the points into σ-invariant sets.
    /// Returns the block index of every point.
    pub fn check_invariant_partition(&self, blocks: &[Vec<usize>]) -> Result<Vec<usize>, SolutionError> {
        let n = self.len();
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(SolutionError::NotAPartition(format!("block {b} is empty")));
            }
            for &x in block {
                if x >= n {
                    return Err(SolutionError::SubsetIndex(x));
                }
                if block_of[x] != usize::MAX {
                    return Err(SolutionError::NotAPartition(format!(
                        "{} lies in two blocks",
                        self.labels[x]
                    )));
                }
                block_of[x] = b;
            }
        }
        if let Some(x) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(SolutionError::NotAPartition(format!(
                "{} is in no block",
                self.labels[x]
            )));
        }
        // Invariance under every σ_x gives invariance under the whole group.
        for x in 0..n {
            for y in 0..n {
                let img = self.sigma[x].apply(y);
                if block_of[img] != block_of[y] {
                    return Err(SolutionError::BlockNotInvariant {
                        block: block_of[y],
                        x: self.labels[x].clone(),
                        y: self.labels[y].clone(),
                    });
                }
            }
        }
        Ok(block_of)
    }

    /// Checks `σ_{γ_x(z)}(y) = σ_z(y)` and `γ_{σ_z(x)}(t) = γ_x(t)` for
    /// `x, y` in one block and `z, t` in another, over all ordered block pairs.
    pub fn check_strong_twisted_union(&self, blocks: &[Vec<usize>]) -> Result<bool, SolutionError> {
        if blocks.len() < 2 {
            return Err(SolutionError::TooFewBlocks(blocks.len()));
        }
        self.check_invariant_partition(blocks)?;
        for (j, bj) in blocks.iter().enumerate() {
            for (k, bk) in blocks.iter().enumerate() {
                if j == k {
                    continue;
                }
                for &x in bj {
                    for &z in bk {
                        let gxz = self.gamma[x].apply(z);
                        if bj.iter().any(|&y| self.sigma[gxz].apply(y) != self.sigma[z].apply(y)) {
                            return Ok(false);
                        }
                        let szx = self.sigma[z].apply(x);
                        if bk.iter().any(|&t| self.gamma[szx].apply(t) != self.gamma[x].apply(t)) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Whether `eta` (a bijection of indices) satisfies
    /// `σ'_{η(x)}(η(y)) = η(σ_x(y))` for all `x, y`.
    pub fn is_isomorphism(&self, other: &FiniteSolution, eta: &[usize]) -> bool {
        let n = self.len();
        if other.len() != n || eta.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &e in eta {
            if e >= n || seen[e] {
                return false;
            }
            seen[e] = true;
        }
        (0..n).all(|x| {
            (0..n).all(|y| {
                let (u, v) = self.r(x, y);
                other.r(eta[x], eta[y]) == (eta[u], eta[v])
            })
        })
    }

    /// Exhaustive backtracking search for an isomorphism `self -> other`.
    pub fn find_isomorphism(&self, other: &FiniteSolution) -> Option<Vec<usize>> {
        let n = self.len();
        if other.len() != n {
            return None;
        }
        let fp1: Vec<Fingerprint> = (0..n).map(|x| self.fingerprint(x)).collect();
        let fp2: Vec<Fingerprint> = (0..n).map(|x| other.fingerprint(x)).collect();
        let mut m1 = fp1.clone();
        let mut m2 = fp2.clone();
        m1.sort();
        m2.sort();
        if m1 != m2 {
            return None;
        }
        let mut search = IsoSearch {
            a: self,
            b: other,
            fp1,
            fp2,
            fwd: vec![usize::MAX; n],
            bwd: vec![usize::MAX; n],
            trail: Vec::new(),
        };
        if search.solve() {
            let eta = search.fwd;
            debug_assert!(self.is_isomorphism(other, &eta));
            Some(eta)
        } else {
            None
        }
    }

    /// Invariant of a point under isomorphism: cycle types of `σ_x` and
    /// `γ_x`, and whether `x` is fixed by `σ_x`.
    fn fingerprint(&self, x: usize) -> Fingerprint {
        (
            self.sigma[x].cycle_type(),
            self.gamma[x].cycle_type(),
            self.sigma[x].apply(x) == x,
        )
    }
}

type Fingerprint = (Vec<usize>, Vec<usize>, bool);

struct IsoSearch<'a> {
    a: &'a FiniteSolution,
    b: &'a FiniteSolution,
    fp1: Vec<Fingerprint>,
    fp2: Vec<Fingerprint>,
    fwd: Vec<usize>,
    bwd: Vec<usize>,
    trail: Vec<usize>,
}

impl IsoSearch<'_> {
    fn solve(&mut self) -> bool {
        let Some(x) = self.fwd.iter().position(|&v| v == usize::MAX) else {
            return true;
        };
        let n = self.fwd.len();
        for cand in 0..n {
            if self.bwd[cand] != usize::MAX || self.fp1[x] != self.fp2[cand] {
                continue;
            }
            let mark = self.trail.len();
            if self.assign_and_propagate(x, cand) && self.solve() {
                return true;
            }
            self.undo(mark);
        }
        false
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().expect("trail entry");
            self.bwd[self.fwd[x]] = usize::MAX;
            self.fwd[x] = usize::MAX;
        }
    }

    fn set(&mut self, x: usize, y: usize, queue: &mut Vec<usize>) -> bool {
        match (self.fwd[x], self.bwd[y]) {
            (fx, _) if fx == y => true,
            (usize::MAX, usize::MAX) => {
                if self.fp1[x] != self.fp2[y] {
                    return false;
                }
                self.fwd[x] = y;
                self.bwd[y] = x;
                self.trail.push(x);
                queue.push(x);
                true
            }
            _ => false,
        }
    }

    /// Assigns `x -> y` and every assignment forced by
    /// `η σ_u = σ'_{η(u)} η` on already assigned points.
    fn assign_and_propagate(&mut self, x: usize, y: usize) -> bool {
        let mut queue = Vec::new();
        if !self.set(x, y, &mut queue) {
            return false;
        }
        while let Some(u) = queue.pop() {
            let u2 = self.fwd[u];
            let assigned: Vec<usize> = self.trail.clone();
            for w in assigned {
                let w2 = self.fwd[w];
                let pairs = [
                    (self.a.sigma(u).apply(w), self.b.sigma(u2).apply(w2)),
                    (self.a.sigma(w).apply(u), self.b.sigma(w2).apply(u2)),
                    (self.a.sigma_inv(u).apply(w), self.b.sigma_inv(u2).apply(w2)),
                    (self.a.sigma_inv(w).apply(u), self.b.sigma_inv(w2).apply(u2)),
                ];
                for (p, q) in pairs {
                    if !self.set(p, q, &mut queue) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    /// The 8-point instance, written out by hand from the two-case σ formula
    /// over A = B = Z/2, two blocks, both maps the identity. Point index is
    /// 4*(i-1) + 2*a + b.
    fn eight_point_table() -> SigmaTable {
        let idx = |a: usize, b: usize, i: usize| 4 * i + 2 * a + b;
        let mut rows = vec![vec![0; 8]; 8];
        for i in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    for j in 0..2 {
                        for c in 0..2 {
                            for d in 0..2 {
                                let img = if i == j {
                                    idx(c, (d + (a + c) % 2) % 2, j)
                                } else {
                                    idx((c + b) % 2, d, j)
                                };
                                rows[idx(a, b, i)][idx(c, d, j)] = img;
                            }
                        }
                    }
                }
            }
        }
        SigmaTable::new(rows)
    }

    #[test]
    fn trivial_solution_passes_everything() {
        let s = FiniteSolution::trivial(3);
        let r = s.report();
        assert!(r.is_solution());
        assert!(r.square_free.holds && r.lri.holds && r.trivial.holds && r.braid_pairwise.holds);
        assert!(s.is_square_free() && s.check_lri() && s.is_trivial());
    }

    #[test]
    fn eight_point_instance_flags() {
        let r = validate(&eight_point_table()).unwrap();
        assert!(r.involutive.holds);
        assert!(r.non_degenerate.holds);
        assert!(r.braid.holds);
        assert!(r.braid_pairwise.holds);
        assert!(r.square_free.holds);
        assert!(r.lri.holds);
        assert!(!r.trivial.holds);
    }

    #[test]
    fn constant_row_is_degenerate() {
        let t = SigmaTable::new(vec![vec![0, 0, 0], vec![0, 1, 2], vec![0, 1, 2]]);
        let r = validate(&t).unwrap();
        assert!(!r.non_degenerate.holds);
        assert!(r.non_degenerate.witness.as_deref().unwrap().contains("σ_0"));
        assert!(!r.is_solution());
        assert!(matches!(FiniteSolution::new(t), Err(SolutionError::NotASolution(_))));
    }

    #[test]
    fn malformed_tables_are_errors() {
        assert!(matches!(validate(&SigmaTable::new(vec![])), Err(SolutionError::Empty)));
        assert!(matches!(
            validate(&SigmaTable::new(vec![vec![0, 1], vec![0]])),
            Err(SolutionError::RowLength { row: 1, .. })
        ));
        assert!(matches!(
            validate(&SigmaTable::new(vec![vec![0, 2], vec![0, 1]])),
            Err(SolutionError::EntryOutOfRange { row: 0, value: 2, .. })
        ));
    }

    #[test]
    fn square_free_examples() {
        let s = FiniteSolution::new(eight_point_table()).unwrap();
        assert!(s.is_square_free());
        // φ₁ ≡ 1 variant: same-block action adds 1 to the B coordinate.
        let idx = |a: usize, b: usize, i: usize| 4 * i + 2 * a + b;
        let mut rows = vec![vec![0; 8]; 8];
        for i in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    for j in 0..2 {
                        for c in 0..2 {
                            for d in 0..2 {
                                rows[idx(a, b, i)][idx(c, d, j)] = if i == j {
                                    idx(c, (d + 1) % 2, j)
                                } else {
                                    idx((c + b) % 2, d, j)
                                };
                            }
                        }
                    }
                }
            }
        }
        let s = FiniteSolution::new(SigmaTable::new(rows)).unwrap();
        assert!(!s.is_square_free());
        assert_eq!(s.sigma(idx(1, 0, 0)).apply(idx(1, 0, 0)), idx(1, 1, 0));
    }

    /// Brute force over all σ tables on `n` points, using an independent
    /// evaluation of r² = id and the braid relation.
    fn brute_force_solutions(n: usize) -> Vec<Vec<Vec<usize>>> {
        let perms = all_perms(n);
        let mut out = Vec::new();
        let total = perms.len().pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let rows: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let p = perms[c % perms.len()].clone();
                    c /= perms.len();
                    p
                })
                .collect();
            let inv: Vec<Vec<usize>> = rows
                .iter()
                .map(|r| {
                    let mut q = vec![0; n];
                    for (i, &v) in r.iter().enumerate() {
                        q[v] = i;
                    }
                    q
                })
                .collect();
            let r = |x: usize, y: usize| {
                let u = rows[x][y];
                (u, inv[u][x])
            };
            let invol = (0..n).all(|x| (0..n).all(|y| {
                let (u, v) = r(x, y);
                r(u, v) == (x, y)
            }));
            if !invol {
                continue;
            }
            let mut braid = true;
            'outer: for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let (a1, b1) = r(x, y);
                        let (b2, c2) = r(b1, z);
                        let (a3, b3) = r(a1, b2);
                        let (q1, q2) = r(y, z);
                        let (p1, p2) = r(x, q1);
                        let (s2, s3) = r(p2, q2);
                        if (a3, b3, c2) != (p1, s2, s3) {
                            braid = false;
                            break 'outer;
                        }
                    }
                }
            }
            let gamma_bij = (0..n).all(|y| {
                let mut seen = vec![false; n];
                (0..n).all(|x| !std::mem::replace(&mut seen[r(x, y).1], true))
            });
            if braid && gamma_bij {
                out.push(rows);
            }
        }
        out
    }

    #[test]
    fn lri_fails_somewhere_on_four_points() {
        let sols = brute_force_solutions(4);
        assert!(!sols.is_empty());
        let mut failing = 0;
        for rows in sols {
            let s = FiniteSolution::new(SigmaTable::new(rows.clone())).unwrap();
            let oracle = (0..4).all(|z| {
                (0..4).all(|t| {
                    // γ_z(t) = σ⁻¹_{σ_t(z)}(t), compared with σ_z⁻¹(t)
                    let u = rows[t][z];
                    let g = rows[u].iter().position(|&v| v == t).unwrap();
                    let si = rows[z].iter().position(|&v| v == t).unwrap();
                    g == si
                })
            });
            assert_eq!(s.check_lri(), oracle);
            if !oracle {
                failing += 1;
            }
        }
        assert!(failing > 0);
    }

    #[test]
    fn validate_agrees_with_brute_force_on_three_points() {
        let sols = brute_force_solutions(3);
        let perms = all_perms(3);
        let mut accepted = 0;
        for a in &perms {
            for b in &perms {
                for c in &perms {
                    let rows = vec![a.clone(), b.clone(), c.clone()];
                    let r = validate(&SigmaTable::new(rows.clone())).unwrap();
                    assert!(r.braid_checks_agree());
                    assert_eq!(r.is_solution(), sols.contains(&rows));
                    accepted += usize::from(r.is_solution());
                }
            }
        }
        assert_eq!(accepted, sols.len());
    }

    #[test]
    fn restrict_examples() {
        let s = FiniteSolution::new(eight_point_table()).unwrap();
        let x1 = s.restrict(&[0, 1, 2, 3]).unwrap();
        assert_eq!(x1.len(), 4);
        let full: Vec<usize> = (0..8).collect();
        assert_eq!(s.restrict(&full).unwrap(), s);
        let single = s.restrict(&[5]).unwrap();
        assert!(single.is_trivial() && single.len() == 1);
        assert!(matches!(s.restrict(&[1, 4]), Err(SolutionError::NotInvariant { .. })));
    }

    #[test]
    fn strong_twisted_union_examples() {
        let s = FiniteSolution::new(eight_point_table()).unwrap();
        let blocks = vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]];
        assert!(s.check_strong_twisted_union(&blocks).unwrap());
        assert!(matches!(
            s.check_strong_twisted_union(&[(0..8).collect()]),
            Err(SolutionError::TooFewBlocks(1))
        ));
        let t = FiniteSolution::trivial(2);
        assert!(t.check_strong_twisted_union(&[vec![0], vec![1]]).unwrap());
        assert!(matches!(
            s.check_strong_twisted_union(&[vec![0, 1, 2, 4], vec![3, 5, 6, 7]]),
            Err(SolutionError::BlockNotInvariant { .. })
        ));
    }

    #[test]
    fn isomorphism_examples() {
        let s = FiniteSolution::new(eight_point_table()).unwrap();
        let eta = s.find_isomorphism(&s).unwrap();
        assert!(s.is_isomorphism(&s, &eta));

        // swap the two blocks
        let swap: Vec<usize> = (0..8).map(|x| (x + 4) % 8).collect();
        let t = s.table();
        let mut rows = vec![vec![0; 8]; 8];
        for x in 0..8 {
            for y in 0..8 {
                rows[swap[x]][swap[y]] = swap[t.rows[x][y]];
            }
        }
        let s2 = FiniteSolution::new(SigmaTable::new(rows)).unwrap();
        let eta = s.find_isomorphism(&s2).unwrap();
        assert!(s.is_isomorphism(&s2, &eta));

        assert!(FiniteSolution::trivial(4).find_isomorphism(&s).is_none());
        assert!(FiniteSolution::trivial(8).find_isomorphism(&s).is_none());
    }

    #[test]
    fn isomorphism_search_is_exhaustive_on_four_points() {
        // Brute force over all 24 relabelings is the oracle.
        let sols: Vec<FiniteSolution> = brute_force_solutions(4)
            .into_iter()
            .map(|r| FiniteSolution::new(SigmaTable::new(r)).unwrap())
            .collect();
        let perms = all_perms(4);
        for a in sols.iter().step_by(7) {
            for b in sols.iter().step_by(5) {
                let oracle = perms.iter().any(|p| a.is_isomorphism(b, p));
                let found = a.find_isomorphism(b);
                assert_eq!(found.is_some(), oracle);
                if let Some(eta) = found {
                    assert!(a.is_isomorphism(b, &eta));
                    let mut back = vec![0; 4];
                    for (x, &y) in eta.iter().enumerate() {
                        back[y] = x;
                    }
                    assert!(b.is_isomorphism(a, &back));
                }
            }
        }
    }
}
