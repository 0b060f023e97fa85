//! Word reduction by exhaustive braid-move closure.
//!
//! Independent of the ball engine: a word is reduced iff no word reachable
//! by braid moves contains a repeated letter, and all reduced words of an
//! element are connected by braid moves. Exponential; meant for short words.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::element::GroupElement;
use crate::matrix::CoxeterMatrix;

/// Default cap on the number of words visited per reduction.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("braid closure exceeded the budget of {0} words")]
    OracleBudgetExceeded(usize),
    #[error("generator {s} out of range for rank {rank}")]
    GeneratorOutOfRange { s: usize, rank: usize },
}

/// ShortLex normal form of the element represented by `word`.
pub fn oracle_reduce(word: &[u8], matrix: &CoxeterMatrix, budget: usize) -> Result<GroupElement, OracleError> {
    let rank = matrix.rank();
    if let Some(&s) = word.iter().find(|&&s| s as usize >= rank) {
        return Err(OracleError::GeneratorOutOfRange { s: s as usize, rank });
    }
    let mut visited = 0usize;
    let mut current = word.to_vec();
    'outer: loop {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(current.clone());
        queue.push_back(current.clone());
        while let Some(w) = queue.pop_front() {
            visited += 1;
            if visited > budget {
                return Err(OracleError::OracleBudgetExceeded(budget));
            }
            if let Some(i) = w.windows(2).position(|p| p[0] == p[1]) {
                let mut shorter = w;
                shorter.drain(i..i + 2);
                current = shorter;
                continue 'outer;
            }
            for next in braid_neighbours(&w, matrix) {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        let least = seen.into_iter().next().expect("closure contains the start word");
        return Ok(GroupElement::from_canonical(least));
    }
}

/// Words obtained by one braid move `sts... -> tst...` (length `m_st`).
fn braid_neighbours(word: &[u8], matrix: &CoxeterMatrix) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for i in 0..word.len().saturating_sub(1) {
        let (a, b) = (word[i], word[i + 1]);
        if a == b {
            continue;
        }
        let Some(m) = matrix.get(a as usize, b as usize).finite() else {
            continue;
        };
        let m = m as usize;
        if i + m > word.len() {
            continue;
        }
        let alternating = (0..m).all(|j| word[i + j] == if j % 2 == 0 { a } else { b });
        if !alternating {
            continue;
        }
        let mut next = word.to_vec();
        for j in 0..m {
            next[i + j] = if j % 2 == 0 { b } else { a };
        }
        out.push(next);
    }
    out
}
