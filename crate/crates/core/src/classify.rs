//! Finite-type classification of parabolic subsystems.
//!
//! A subset `J` of generators is spherical exactly when every connected
//! component of its induced diagram is one of the irreducible finite types
//! `A_k, B_k, D_k, E_6, E_7, E_8, F_4, H_3, H_4, I_2(m)`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::{CoxeterMatrix, Order};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiniteType {
    A(usize),
    B(usize),
    D(usize),
    E6,
    E7,
    E8,
    F4,
    H3,
    H4,
    /// Every rank-2 component is reported as a dihedral type.
    I2(u32),
}

impl FiniteType {
    pub fn rank(self) -> usize {
        match self {
            FiniteType::A(k) | FiniteType::B(k) | FiniteType::D(k) => k,
            FiniteType::E6 => 6,
            FiniteType::E7 => 7,
            FiniteType::E8 => 8,
            FiniteType::F4 | FiniteType::H4 => 4,
            FiniteType::H3 => 3,
            FiniteType::I2(_) => 2,
        }
    }

    /// Degrees minus one of the basic invariants.
    pub fn exponents(self) -> Vec<usize> {
        match self {
            FiniteType::A(k) => (1..=k).collect(),
            FiniteType::B(k) => (0..k).map(|i| 2 * i + 1).collect(),
            FiniteType::D(k) => {
                let mut e: Vec<usize> = (0..k - 1).map(|i| 2 * i + 1).collect();
                e.push(k - 1);
                e.sort_unstable();
                e
            }
            FiniteType::E6 => vec![1, 4, 5, 7, 8, 11],
            FiniteType::E7 => vec![1, 5, 7, 9, 11, 13, 17],
            FiniteType::E8 => vec![1, 7, 11, 13, 17, 19, 23, 29],
            FiniteType::F4 => vec![1, 5, 7, 11],
            FiniteType::H3 => vec![1, 5, 9],
            FiniteType::H4 => vec![1, 11, 19, 29],
            FiniteType::I2(m) => vec![1, m as usize - 1],
        }
    }
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteType::A(k) => write!(f, "A{k}"),
            FiniteType::B(k) => write!(f, "B{k}"),
            FiniteType::D(k) => write!(f, "D{k}"),
            FiniteType::E6 => f.write_str("E6"),
            FiniteType::E7 => f.write_str("E7"),
            FiniteType::E8 => f.write_str("E8"),
            FiniteType::F4 => f.write_str("F4"),
            FiniteType::H3 => f.write_str("H3"),
            FiniteType::H4 => f.write_str("H4"),
            FiniteType::I2(m) => write!(f, "I2({m})"),
        }
    }
}

/// One irreducible factor together with the generators it lives on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub kind: FiniteType,
    pub generators: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeLabel {
    /// Product of the listed irreducible finite types (empty for the trivial group).
    Finite(Vec<Component>),
    Infinite,
}

impl TypeLabel {
    pub fn is_finite(&self) -> bool {
        matches!(self, TypeLabel::Finite(_))
    }

    pub fn family(&self) -> String {
        match self {
            TypeLabel::Infinite => "infinite".into(),
            TypeLabel::Finite(c) if c.is_empty() => "trivial".into(),
            TypeLabel::Finite(c) if c.len() == 1 => c[0].kind.to_string(),
            TypeLabel::Finite(_) => "reducible-product".into(),
        }
    }

    /// `A1 x I2(4)` style description.
    pub fn description(&self) -> String {
        match self {
            TypeLabel::Infinite => "infinite".into(),
            TypeLabel::Finite(c) if c.is_empty() => "trivial".into(),
            TypeLabel::Finite(c) => c.iter().map(|x| x.kind.to_string()).collect::<Vec<_>>().join(" x "),
        }
    }

    pub fn exponents(&self) -> Option<Vec<usize>> {
        match self {
            TypeLabel::Infinite => None,
            TypeLabel::Finite(c) => {
                let mut e: Vec<usize> = c.iter().flat_map(|x| x.kind.exponents()).collect();
                e.sort_unstable();
                Some(e)
            }
        }
    }

    pub fn order(&self) -> Option<BigUint> {
        self.exponents()
            .map(|e| e.iter().fold(BigUint::one(), |acc, &x| acc * BigUint::from(x + 1)))
    }

    /// Length of the longest element.
    pub fn longest_length(&self) -> Option<usize> {
        self.exponents().map(|e| e.iter().sum())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("subset is not spherical")]
    NotSpherical,
}

/// Classifies the parabolic subsystem on `subset` (generator indices).
pub fn classify(matrix: &CoxeterMatrix, subset: &[usize]) -> TypeLabel {
    let mut seen = vec![false; subset.len()];
    let mut components = Vec::new();
    for start in 0..subset.len() {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(i) = stack.pop() {
            comp.push(subset[i]);
            for j in 0..subset.len() {
                if !seen[j] && matrix.get(subset[i], subset[j]) > Order::Finite(2) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        match classify_connected(matrix, &comp) {
            Some(kind) => components.push(Component { kind, generators: comp }),
            None => return TypeLabel::Infinite,
        }
    }
    components.sort_by_key(|c| c.generators[0]);
    TypeLabel::Finite(components)
}

fn classify_connected(matrix: &CoxeterMatrix, verts: &[usize]) -> Option<FiniteType> {
    let k = verts.len();
    match k {
        1 => return Some(FiniteType::A(1)),
        2 => return matrix.get(verts[0], verts[1]).finite().map(FiniteType::I2),
        _ => {}
    }
    let mut edges = Vec::new();
    for (a, &s) in verts.iter().enumerate() {
        for (b, &t) in verts.iter().enumerate().skip(a + 1) {
            match matrix.get(s, t) {
                Order::Infinite => return None,
                Order::Finite(m) if m > 2 => edges.push((a, b, m)),
                Order::Finite(_) => {}
            }
        }
    }
    // connected with k - 1 edges: a tree
    if edges.len() != k - 1 {
        return None;
    }
    let mut adj = vec![Vec::new(); k];
    for &(a, b, m) in &edges {
        adj[a].push((b, m));
        adj[b].push((a, m));
    }
    let heavy: Vec<u32> = edges.iter().map(|e| e.2).filter(|&m| m > 3).collect();
    if heavy.len() > 1 || heavy.iter().any(|&m| m > 5) {
        return None;
    }
    let branch: Vec<usize> = (0..k).filter(|&v| adj[v].len() >= 3).collect();
    match branch.as_slice() {
        [] => classify_path(&adj, k),
        [center] => {
            if adj[*center].len() != 3 || !heavy.is_empty() {
                return None;
            }
            let mut arms: Vec<usize> = adj[*center]
                .iter()
                .map(|&(next, _)| arm_length(&adj, *center, next))
                .collect();
            arms.sort_unstable();
            match arms.as_slice() {
                [1, 1, _] => Some(FiniteType::D(k)),
                [1, 2, 2] => Some(FiniteType::E6),
                [1, 2, 3] => Some(FiniteType::E7),
                [1, 2, 4] => Some(FiniteType::E8),
                _ => None,
            }
        }
        _ => None,
    }
}

fn arm_length(adj: &[Vec<(usize, u32)>], from: usize, mut cur: usize) -> usize {
    let mut prev = from;
    let mut len = 1;
    loop {
        let next: Vec<usize> = adj[cur].iter().map(|e| e.0).filter(|&v| v != prev).collect();
        match next.as_slice() {
            [] => return len,
            [n] => {
                prev = cur;
                cur = *n;
                len += 1;
            }
            _ => return len,
        }
    }
}

fn classify_path(adj: &[Vec<(usize, u32)>], k: usize) -> Option<FiniteType> {
    let start = (0..k).find(|&v| adj[v].len() == 1)?;
    let mut labels = Vec::with_capacity(k - 1);
    let (mut prev, mut cur) = (usize::MAX, start);
    while let Some(&(next, m)) = adj[cur].iter().find(|e| e.0 != prev) {
        labels.push(m);
        prev = cur;
        cur = next;
    }
    let heavy_pos = labels.iter().position(|&m| m > 3);
    let at_end = |p: usize| p == 0 || p == labels.len() - 1;
    match heavy_pos {
        None => Some(FiniteType::A(k)),
        Some(p) => match labels[p] {
            4 if at_end(p) => Some(FiniteType::B(k)),
            4 if k == 4 && p == 1 => Some(FiniteType::F4),
            5 if at_end(p) && k == 3 => Some(FiniteType::H3),
            5 if at_end(p) && k == 4 => Some(FiniteType::H4),
            _ => None,
        },
    }
}

/// A spherical subset and its classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphericalSubset {
    pub generators: Vec<usize>,
    pub label: TypeLabel,
}

#[derive(Debug, Clone, Serialize)]
pub struct SphericalSubsetRecord {
    pub generators: Vec<usize>,
    pub family: String,
    pub description: String,
    pub exponents: Vec<usize>,
    pub order: String,
}

impl SphericalSubset {
    pub fn record(&self) -> SphericalSubsetRecord {
        SphericalSubsetRecord {
            generators: self.generators.clone(),
            family: self.label.family(),
            description: self.label.description(),
            exponents: self.label.exponents().unwrap_or_default(),
            order: self.label.order().map(|o| o.to_string()).unwrap_or_default(),
        }
    }
}

/// All spherical subsets (including the empty set), ordered by size then lexicographically.
pub fn spherical_subsets(matrix: &CoxeterMatrix) -> Vec<SphericalSubset> {
    let n = matrix.rank();
    assert!(n < usize::BITS as usize, "rank too large for subset enumeration");
    let mut out = Vec::new();
    // grow by size so that only supersets of spherical sets are examined
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for subset in frontier {
            let label = classify(matrix, &subset);
            if !label.is_finite() {
                continue;
            }
            let from = subset.last().map_or(0, |&x| x + 1);
            for s in from..n {
                let mut bigger = subset.clone();
                bigger.push(s);
                next.push(bigger);
            }
            out.push(SphericalSubset {
                generators: subset,
                label,
            });
        }
        frontier = next;
    }
    out.sort_by(|a, b| {
        a.generators
            .len()
            .cmp(&b.generators.len())
            .then(a.generators.cmp(&b.generators))
    });
    out
}

/// `W_J(t) = prod_e (1 + t + ... + t^e)` over the exponents of `label`.
pub fn poincare_polynomial(label: &TypeLabel) -> Result<Poly, ClassifyError> {
    let exps = label.exponents().ok_or(ClassifyError::NotSpherical)?;
    Ok(exps.iter().fold(Poly::one(), |acc, &e| &acc * &Poly::q_integer(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn label_of(m: &CoxeterMatrix) -> TypeLabel {
        classify(m, &(0..m.rank()).collect::<Vec<_>>())
    }

    #[test]
    fn triangle_groups_spherical_subsets() {
        let m444 = CoxeterMatrix::uniform(3, Order::Finite(4)).unwrap();
        let subs = spherical_subsets(&m444);
        assert_eq!(subs.len(), 7);
        assert!(subs
            .iter()
            .filter(|s| s.generators.len() == 2)
            .all(|s| s.label.family() == "I2(4)"));
        assert!(!label_of(&m444).is_finite());

        let r4 = CoxeterMatrix::uniform(4, Order::Finite(3)).unwrap();
        let subs = spherical_subsets(&r4);
        assert_eq!(subs.len(), 1 + 4 + 6);
        assert!(subs.iter().all(|s| s.generators.len() <= 2));
        assert!(subs[0].generators.is_empty());
        assert_eq!(subs[0].label.order(), Some(BigUint::one()));
    }

    #[test]
    fn classical_and_exceptional_types() {
        let a3 = CoxeterMatrix::linear(&[3, 3]).unwrap();
        let l = label_of(&a3);
        assert_eq!(l.family(), "A3");
        assert_eq!(l.exponents(), Some(vec![1, 2, 3]));
        assert_eq!(l.order(), Some(BigUint::from(24u32)));

        let cases: &[(&[u32], &str, u64)] = &[
            (&[4, 3], "B3", 48),
            (&[3, 4], "B3", 48),
            (&[5, 3], "H3", 120),
            (&[5, 3, 3], "H4", 14400),
            (&[3, 4, 3], "F4", 1152),
            (&[3, 3, 3, 3], "A5", 720),
            (&[3, 3, 4], "B4", 384),
        ];
        for (labels, name, order) in cases {
            let l = label_of(&CoxeterMatrix::linear(labels).unwrap());
            assert_eq!(l.family(), *name, "{labels:?}");
            assert_eq!(l.order(), Some(BigUint::from(*order)), "{labels:?}");
        }
        for labels in [&[4u32, 4][..], &[3, 5, 3], &[4, 3, 4], &[6, 3], &[3, 3, 5, 3]] {
            assert_eq!(
                label_of(&CoxeterMatrix::linear(labels).unwrap()),
                TypeLabel::Infinite,
                "{labels:?}"
            );
        }
    }

    fn star(arms: &[usize]) -> CoxeterMatrix {
        // vertex 0 is the branch point
        let rank = 1 + arms.iter().sum::<usize>();
        let mut m = vec![vec![2u32; rank]; rank];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        let mut next = 1;
        for &len in arms {
            let mut prev = 0;
            for _ in 0..len {
                m[prev][next] = 3;
                m[next][prev] = 3;
                prev = next;
                next += 1;
            }
        }
        CoxeterMatrix::from_ints(&m).unwrap()
    }

    #[test]
    fn branched_types() {
        assert_eq!(label_of(&star(&[1, 1, 1])).family(), "D4");
        assert_eq!(label_of(&star(&[1, 1, 3])).family(), "D6");
        assert_eq!(label_of(&star(&[1, 2, 2])).family(), "E6");
        assert_eq!(label_of(&star(&[1, 2, 3])).family(), "E7");
        assert_eq!(label_of(&star(&[1, 2, 4])).family(), "E8");
        assert_eq!(label_of(&star(&[1, 2, 4])).order(), Some(BigUint::from(696_729_600u64)));
        assert_eq!(label_of(&star(&[2, 2, 2])), TypeLabel::Infinite);
        assert_eq!(label_of(&star(&[1, 1, 1, 1])), TypeLabel::Infinite);
        assert_eq!(label_of(&star(&[1, 1, 2])).order(), Some(BigUint::from(1920u32)));
    }

    #[test]
    fn reducible_products() {
        let m = CoxeterMatrix::from_ints(&[vec![1, 4, 2], vec![4, 1, 2], vec![2, 2, 1]]).unwrap();
        let l = label_of(&m);
        assert_eq!(l.family(), "reducible-product");
        assert_eq!(l.description(), "I2(4) x A1");
        assert_eq!(l.order(), Some(BigUint::from(16u32)));
        let inf = CoxeterMatrix::from_ints(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(label_of(&inf), TypeLabel::Infinite);
        assert_eq!(classify(&inf, &[1]).family(), "A1");
    }

    #[test]
    fn poincare_polynomials() {
        let i24 = poincare_polynomial(&TypeLabel::Finite(vec![Component {
            kind: FiniteType::I2(4),
            generators: vec![0, 1],
        }]))
        .unwrap();
        assert_eq!(i24, &Poly::q_integer(1) * &Poly::q_integer(3));
        assert_eq!(i24.eval_int(&BigInt::from(1)), BigInt::from(8));
        assert_eq!(poincare_polynomial(&TypeLabel::Finite(vec![])).unwrap(), Poly::one());
        let a2 = label_of(&CoxeterMatrix::dihedral(3).unwrap());
        assert_eq!(poincare_polynomial(&a2).unwrap(), Poly::from_i64s(&[1, 2, 2, 1]));
        assert_eq!(
            poincare_polynomial(&TypeLabel::Infinite),
            Err(ClassifyError::NotSpherical)
        );
    }

    #[test]
    fn spherical_subsets_are_downward_closed() {
        let samples = [
            CoxeterMatrix::linear(&[3, 4, 3]).unwrap(),
            CoxeterMatrix::uniform(4, Order::Finite(3)).unwrap(),
            star(&[1, 2, 3]),
            CoxeterMatrix::from_ints(&[vec![1, 3, 0, 2], vec![3, 1, 5, 2], vec![0, 5, 1, 3], vec![2, 2, 3, 1]])
                .unwrap(),
        ];
        for m in &samples {
            let subs = spherical_subsets(m);
            let set: std::collections::HashSet<Vec<usize>> = subs.iter().map(|s| s.generators.clone()).collect();
            for s in &subs {
                for drop in 0..s.generators.len() {
                    let mut smaller = s.generators.clone();
                    smaller.remove(drop);
                    assert!(set.contains(&smaller));
                }
            }
        }
    }
}
