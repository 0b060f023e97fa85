//! Coxeter matrices, diagram flags and the reduction preorder.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The order `m_st` of a product of two generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(m) => Some(m),
            Order::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinite)
    }
}

impl PartialOrd for Order {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// ∞ sits above every integer.
impl Ord for Order {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Order::Finite(a), Order::Finite(b)) => a.cmp(b),
            (Order::Finite(_), Order::Infinite) => Ordering::Less,
            (Order::Infinite, Order::Finite(_)) => Ordering::Greater,
            (Order::Infinite, Order::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(m) => write!(f, "{m}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Finite(m) => serializer.serialize_u32(*m),
            Order::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            // 0 is the compact encoding of ∞.
            Raw::Int(0) => Ok(Order::Infinite),
            Raw::Int(m) if m > 0 && m <= u32::MAX as i64 => Ok(Order::Finite(m as u32)),
            Raw::Int(m) => Err(de::Error::custom(format!("invalid order {m}"))),
            Raw::Str(s) => match s.trim() {
                "inf" | "infinity" | "∞" => Ok(Order::Infinite),
                other => other
                    .parse::<u32>()
                    .map(|m| if m == 0 { Order::Infinite } else { Order::Finite(m) })
                    .map_err(|_| de::Error::custom(format!("invalid order {other:?}"))),
            },
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {rank}")]
    NotSquare { row: usize, len: usize, rank: usize },
    #[error("matrix is not symmetric at ({s}, {t})")]
    NonSymmetric { s: usize, t: usize },
    #[error("diagonal entry m[{s}][{s}] must be 1")]
    BadDiagonal { s: usize },
    #[error("off-diagonal entry m[{s}][{t}] must be at least 2")]
    BadOffDiagonal { s: usize, t: usize },
    #[error("malformed matrix file: {0}")]
    Parse(String),
}

/// A validated Coxeter matrix `(m_st)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoxeterMatrix {
    rank: usize,
    entries: Vec<Order>,
}

impl CoxeterMatrix {
    /// Validates a raw square array of orders.
    pub fn new(raw: Vec<Vec<Order>>) -> Result<Self, MatrixError> {
        let rank = raw.len();
        if rank == 0 {
            return Err(MatrixError::Empty);
        }
        for (row, r) in raw.iter().enumerate() {
            if r.len() != rank {
                return Err(MatrixError::NotSquare {
                    row,
                    len: r.len(),
                    rank,
                });
            }
        }
        for s in 0..rank {
            for t in 0..rank {
                if raw[s][t] != raw[t][s] {
                    return Err(MatrixError::NonSymmetric {
                        s: s.min(t),
                        t: s.max(t),
                    });
                }
            }
        }
        for s in 0..rank {
            if raw[s][s] != Order::Finite(1) {
                return Err(MatrixError::BadDiagonal { s });
            }
            for t in 0..rank {
                if s != t && raw[s][t] < Order::Finite(2) {
                    return Err(MatrixError::BadOffDiagonal { s, t });
                }
            }
        }
        Ok(Self {
            rank,
            entries: raw.into_iter().flatten().collect(),
        })
    }

    /// Integer form: `0` stands for ∞.
    pub fn from_ints(raw: &[Vec<u32>]) -> Result<Self, MatrixError> {
        Self::new(
            raw.iter()
                .map(|row| {
                    row.iter()
                        .map(|&m| if m == 0 { Order::Infinite } else { Order::Finite(m) })
                        .collect()
                })
                .collect(),
        )
    }

    /// Rank `n` system with `m_st = m` for all `s != t`.
    pub fn uniform(rank: usize, m: Order) -> Result<Self, MatrixError> {
        let raw = (0..rank)
            .map(|s| (0..rank).map(|t| if s == t { Order::Finite(1) } else { m }).collect())
            .collect();
        Self::new(raw)
    }

    /// Dihedral system `I2(m)`.
    pub fn dihedral(m: u32) -> Result<Self, MatrixError> {
        Self::uniform(2, Order::Finite(m))
    }

    /// Linear diagram with the given consecutive edge labels (all other pairs commute).
    pub fn linear(labels: &[u32]) -> Result<Self, MatrixError> {
        let rank = labels.len() + 1;
        let raw = (0..rank)
            .map(|s| {
                (0..rank)
                    .map(|t| {
                        if s == t {
                            Order::Finite(1)
                        } else if s.abs_diff(t) == 1 {
                            Order::Finite(labels[s.min(t)])
                        } else {
                            Order::Finite(2)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(raw)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, s: usize, t: usize) -> Order {
        self.entries[s * self.rank + t]
    }

    /// The matrix of the standard parabolic subgroup on `subset`, in the given order.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self, MatrixError> {
        Self::new(
            subset
                .iter()
                .map(|&s| subset.iter().map(|&t| self.get(s, t)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> Vec<Vec<Order>> {
        self.entries.chunks(self.rank).map(|r| r.to_vec()).collect()
    }

    /// The common off-diagonal label, if there is one.
    pub fn uniform_label(&self) -> Option<Order> {
        if self.rank < 2 {
            return None;
        }
        let first = self.get(0, 1);
        let all = (0..self.rank)
            .flat_map(|s| (0..self.rank).map(move |t| (s, t)))
            .filter(|(s, t)| s != t)
            .all(|(s, t)| self.get(s, t) == first);
        all.then_some(first)
    }

    /// Largest finite off-diagonal label.
    pub fn max_finite_label(&self) -> Option<u32> {
        (0..self.rank)
            .flat_map(|s| (0..self.rank).map(move |t| (s, t)))
            .filter(|(s, t)| s != t)
            .filter_map(|(s, t)| self.get(s, t).finite())
            .max()
    }

    pub fn diagram_properties(&self) -> DiagramProperties {
        let off_diag = || {
            (0..self.rank)
                .flat_map(|s| (0..self.rank).map(move |t| (s, t)))
                .filter(|(s, t)| s != t)
                .map(|(s, t)| self.get(s, t))
        };
        DiagramProperties {
            two_spherical: off_diag().all(|m| !m.is_infinite()),
            complete_diagram: off_diag().all(|m| m >= Order::Finite(3)),
            uniform_label: self.uniform_label().and_then(Order::finite),
        }
    }

    /// `self ⪯ other`: some injection of generators weakly increases every label.
    pub fn precedes(&self, other: &CoxeterMatrix) -> bool {
        if self.rank > other.rank {
            return false;
        }
        let mut image = Vec::with_capacity(self.rank);
        let mut used = vec![false; other.rank];
        self.extend_injection(other, &mut image, &mut used)
    }

    fn extend_injection(&self, other: &CoxeterMatrix, image: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let s = image.len();
        if s == self.rank {
            return true;
        }
        for cand in 0..other.rank {
            if used[cand] {
                continue;
            }
            let compatible = image
                .iter()
                .enumerate()
                .all(|(t, &ft)| self.get(s, t) <= other.get(cand, ft));
            if !compatible {
                continue;
            }
            used[cand] = true;
            image.push(cand);
            if self.extend_injection(other, image, used) {
                return true;
            }
            image.pop();
            used[cand] = false;
        }
        false
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "rank": self.rank, "m": self.rows() })
    }

    /// Parses the matrix file format: `{"rank": n, "m": [[...]]}` or `{"rank": n, "uniform": m}`.
    pub fn from_json_str(text: &str) -> Result<Self, MatrixError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct MatrixFile {
            rank: Option<usize>,
            m: Option<Vec<Vec<Order>>>,
            uniform: Option<Order>,
        }
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| MatrixError::Parse(e.to_string()))?;
        match (file.m, file.uniform) {
            (Some(rows), None) => {
                if let Some(rank) = file.rank {
                    if rank != rows.len() {
                        return Err(MatrixError::Parse(format!(
                            "rank {rank} does not match {} rows",
                            rows.len()
                        )));
                    }
                }
                Self::new(rows)
            }
            (None, Some(m)) => {
                let rank = file
                    .rank
                    .ok_or_else(|| MatrixError::Parse("\"uniform\" requires \"rank\"".into()))?;
                Self::uniform(rank, m)
            }
            (Some(_), Some(_)) => Err(MatrixError::Parse("give either \"m\" or \"uniform\", not both".into())),
            (None, None) => Err(MatrixError::Parse("missing \"m\" or \"uniform\"".into())),
        }
    }
}

impl fmt::Display for CoxeterMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.rank) {
            let cells: Vec<String> = row.iter().map(|m| m.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagramProperties {
    pub two_spherical: bool,
    pub complete_diagram: bool,
    pub uniform_label: Option<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[u32]]) -> Vec<Vec<u32>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn validates_small_matrices() {
        let m = CoxeterMatrix::from_ints(&ints(&[&[1, 4], &[4, 1]])).unwrap();
        assert_eq!(m.rank(), 2);
        let m = CoxeterMatrix::from_ints(&ints(&[&[1, 4, 4], &[4, 1, 4], &[4, 4, 1]])).unwrap();
        assert_eq!(m.uniform_label(), Some(Order::Finite(4)));
    }

    #[test]
    fn rejects_bad_matrices() {
        assert_eq!(
            CoxeterMatrix::from_ints(&ints(&[&[1, 3], &[4, 1]])),
            Err(MatrixError::NonSymmetric { s: 0, t: 1 })
        );
        assert_eq!(
            CoxeterMatrix::from_ints(&ints(&[&[2, 3], &[3, 1]])),
            Err(MatrixError::BadDiagonal { s: 0 })
        );
        assert_eq!(
            CoxeterMatrix::from_ints(&ints(&[&[1, 1], &[1, 1]])),
            Err(MatrixError::BadOffDiagonal { s: 0, t: 1 })
        );
        assert!(matches!(
            CoxeterMatrix::from_ints(&ints(&[&[1, 3], &[3]])),
            Err(MatrixError::NotSquare { .. })
        ));
        assert_eq!(CoxeterMatrix::from_ints(&[]), Err(MatrixError::Empty));
    }

    #[test]
    fn diagram_flags() {
        let m444 = CoxeterMatrix::uniform(3, Order::Finite(4)).unwrap();
        assert_eq!(
            m444.diagram_properties(),
            DiagramProperties {
                two_spherical: true,
                complete_diagram: true,
                uniform_label: Some(4)
            }
        );
        let mixed = CoxeterMatrix::from_ints(&ints(&[&[1, 3, 3], &[3, 1, 0], &[3, 0, 1]])).unwrap();
        let p = mixed.diagram_properties();
        assert!(!p.two_spherical);
        assert!(p.complete_diagram);
        let mixed2 = CoxeterMatrix::from_ints(&ints(&[&[1, 3, 2], &[3, 1, 0], &[2, 0, 1]])).unwrap();
        let p = mixed2.diagram_properties();
        assert!(!p.two_spherical && !p.complete_diagram && p.uniform_label.is_none());
        let r4 = CoxeterMatrix::uniform(4, Order::Finite(3)).unwrap();
        assert_eq!(r4.diagram_properties().uniform_label, Some(3));
        assert!(r4.diagram_properties().complete_diagram);
    }

    #[test]
    fn preorder_examples() {
        let m333 = CoxeterMatrix::uniform(3, Order::Finite(3)).unwrap();
        let m444 = CoxeterMatrix::uniform(3, Order::Finite(4)).unwrap();
        assert!(m333.precedes(&m444));
        assert!(!m444.precedes(&m333));
        assert!(m444.precedes(&m444));
        let inf = CoxeterMatrix::uniform(3, Order::Infinite).unwrap();
        assert!(m444.precedes(&inf));
        assert!(!inf.precedes(&m444));
        // needs a non-identity injection
        let a = CoxeterMatrix::linear(&[5, 2]).unwrap();
        let b = CoxeterMatrix::linear(&[3, 6]).unwrap();
        assert!(a.precedes(&b));
        // rank must not drop
        let big = CoxeterMatrix::uniform(4, Order::Finite(2)).unwrap();
        assert!(!big.precedes(&m444));
        assert!(m444.precedes(&CoxeterMatrix::uniform(4, Order::Finite(4)).unwrap()));
    }

    #[test]
    fn json_formats() {
        let m = CoxeterMatrix::from_json_str(r#"{"rank": 3, "m": [[1,3,"inf"],[3,1,0],["inf",0,1]]}"#).unwrap();
        assert_eq!(m.get(0, 2), Order::Infinite);
        assert_eq!(m.get(1, 2), Order::Infinite);
        let u = CoxeterMatrix::from_json_str(r#"{"rank": 4, "uniform": 3}"#).unwrap();
        assert_eq!(u, CoxeterMatrix::uniform(4, Order::Finite(3)).unwrap());
        let out = m.to_json().to_string();
        assert!(out.contains("\"inf\""));
        assert_eq!(CoxeterMatrix::from_json_str(&out).unwrap(), m);
        assert!(matches!(CoxeterMatrix::from_json_str("{"), Err(MatrixError::Parse(_))));
        assert!(matches!(
            CoxeterMatrix::from_json_str(r#"{"rank": 2, "m": [[1,3],[3,1]], "uniform": 3}"#),
            Err(MatrixError::Parse(_))
        ));
    }
}
