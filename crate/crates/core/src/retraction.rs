//! Retraction: identify points with equal σ-maps, and iterate.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::solution::{FiniteSolution, SigmaTable, SolutionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RetractError {
    /// Representatives of the same classes disagree. Cannot happen for a
    /// valid solution.
    #[error("induced map is not well defined: [{x}] acting on [{y}]")]
    NotWellDefined { x: String, y: String },
    #[error("quotient failed validation: {0}")]
    Quotient(#[from] SolutionError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractStep {
    pub quotient: FiniteSolution,
    /// `projection[x]` is the class of `x`.
    pub projection: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum TowerClass {
    /// `ret(X, r) = (X, r)` with `|X| > 1`.
    Irretractable,
    /// Reaches one point after this many steps. One-point inputs get 0.
    MultipermutationLevel(usize),
    /// Stops shrinking at a size above 1 after the given step.
    StabilizedNontrivial(usize),
    /// The step budget ran out first.
    Unresolved,
}

impl fmt::Display for TowerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Irretractable => write!(f, "irretractable"),
            Self::MultipermutationLevel(m) => write!(f, "multipermutation level {m}"),
            Self::StabilizedNontrivial(k) => write!(f, "stabilized at a nontrivial solution after step {k}"),
            Self::Unresolved => write!(f, "unresolved within the step budget"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerResult {
    pub steps: Vec<RetractStep>,
    pub classification: TowerClass,
}

impl TowerResult {
    /// Sizes of the input followed by each quotient.
    pub fn sizes(&self, input_size: usize) -> Vec<usize> {
        std::iter::once(input_size)
            .chain(self.steps.iter().map(|s| s.quotient.len()))
            .collect()
    }
}

/// The retraction of `s`; classes are numbered by least member.
pub fn retract(s: &FiniteSolution) -> Result<RetractStep, RetractError> {
    let n = s.len();
    let mut class_of_row: HashMap<&[u32], usize> = HashMap::new();
    let mut projection = Vec::with_capacity(n);
    let mut reps = Vec::new();
    for x in 0..n {
        let next = class_of_row.len();
        let c = *class_of_row.entry(s.sigma(x).images()).or_insert(next);
        if c == reps.len() {
            reps.push(x);
        }
        projection.push(c);
    }
    let m = reps.len();
    let mut rows = vec![vec![usize::MAX; m]; m];
    for x in 0..n {
        for y in 0..n {
            let (cx, cy) = (projection[x], projection[y]);
            let img = projection[s.sigma(x).apply(y)];
            let slot = &mut rows[cx][cy];
            if *slot == usize::MAX {
                *slot = img;
            } else if *slot != img {
                return Err(RetractError::NotWellDefined {
                    x: s.label(x).to_string(),
                    y: s.label(y).to_string(),
                });
            }
        }
    }
    let labels = reps
        .iter()
        .map(|&x| format!("[{}]", s.label(x)))
        .collect();
    let quotient = FiniteSolution::new(SigmaTable::with_labels(labels, rows))?;
    Ok(RetractStep {
        quotient,
        projection,
    })
}

/// Iterates [`retract`] until one point remains or the size stops changing.
pub fn tower(s: &FiniteSolution, max_steps: usize) -> Result<TowerResult, RetractError> {
    if s.len() == 1 {
        return Ok(TowerResult {
            steps: Vec::new(),
            classification: TowerClass::MultipermutationLevel(0),
        });
    }
    let mut steps: Vec<RetractStep> = Vec::new();
    let mut current = s.clone();
    for k in 0..max_steps {
        let step = retract(&current)?;
        let size = step.quotient.len();
        let fixed = size == current.len();
        current = step.quotient.clone();
        steps.push(step);
        if size == 1 {
            return Ok(TowerResult {
                classification: TowerClass::MultipermutationLevel(k + 1),
                steps,
            });
        }
        if fixed {
            let classification = if k == 0 {
                TowerClass::Irretractable
            } else {
                TowerClass::StabilizedNontrivial(k)
            };
            return Ok(TowerResult {
                steps,
                classification,
            });
        }
    }
    Ok(TowerResult {
        steps,
        classification: TowerClass::Unresolved,
    })
}

/// [`tower`] with the default budget `|X|`, which always suffices.
pub fn tower_default(s: &FiniteSolution) -> Result<TowerResult, RetractError> {
    tower(s, s.len())
}
