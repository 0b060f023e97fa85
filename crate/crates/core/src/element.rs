//! Elements of `W` in ShortLex normal form and breadth-first balls.
//!
//! Layer `k + 1` is built from layer `k`: for `w` in layer `k` and an
//! ascent `s` of `w`, the product `ws` coincides with some other `w't`
//! (`t != s`, `w'` in layer `k`) exactly when `ws` has both `s` and `t` as
//! right descents. Then `ws = u · w0(s,t)` for a minimal coset
//! representative `u`, so `w` descends to `u` along the alternating word
//! `t, s, t, ...` of length `m_st - 1` and `w'` is reached from `u` along
//! the other alternating word. All identifications are found from the
//! first pair `(w, s)` in iteration order, which is also the ShortLex-least
//! preimage, so elements are created in ShortLex order within each layer.

use std::fmt;
use std::io::{self, Write};
use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::matrix::CoxeterMatrix;

/// Default element-count cap for ball construction.
pub const DEFAULT_CAP: usize = 10_000_000;

/// Largest rank the engine handles (descent sets are 64-bit masks).
pub const MAX_RANK: usize = 64;

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("element cap of {cap} exceeded while building layer {layer}")]
    ResourceLimit { cap: usize, layer: usize },
    #[error("generator {s} out of range for rank {rank}")]
    GeneratorOutOfRange { s: usize, rank: usize },
    #[error("rank {0} exceeds the supported maximum of {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("product leaves the ball of depth {depth}")]
    DepthExceeded { depth: usize },
    #[error("word {0} is not a ShortLex normal form")]
    NotCanonical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

/// Index of an element inside a [`Ball`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub u32);

impl ElementId {
    pub const IDENTITY: ElementId = ElementId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An element of `W`, identified by its ShortLex-least reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    word: Vec<u8>,
}

impl GroupElement {
    pub fn identity() -> Self {
        Self { word: Vec::new() }
    }

    /// Wraps a word that is already known to be a normal form.
    pub(crate) fn from_canonical(word: Vec<u8>) -> Self {
        Self { word }
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&word_string(&self.word))
    }
}

/// Generator indices as a string: `0-9` then `a-z`; dot-separated beyond rank 36.
pub fn word_string(word: &[u8]) -> String {
    if word.iter().all(|&s| s < 36) {
        word.iter().map(|&s| char::from_digit(s as u32, 36).unwrap()).collect()
    } else {
        word.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Inverse of [`word_string`].
pub fn parse_word(text: &str) -> Option<Vec<u8>> {
    if text.contains('.') {
        text.split('.').map(|p| p.parse().ok()).collect()
    } else {
        text.chars().map(|c| c.to_digit(36).map(|d| d as u8)).collect()
    }
}

/// A subset of the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DescentSet(u64);

impl DescentSet {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, s: usize) -> bool {
        s < 64 && self.0 >> s & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&s| self.0 >> s & 1 == 1)
    }
}

impl FromIterator<usize> for DescentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self(iter.into_iter().fold(0, |acc, s| acc | 1 << s))
    }
}

/// All elements of length at most `depth`, with right-multiplication edges.
#[derive(Debug, Clone)]
pub struct Ball {
    matrix: CoxeterMatrix,
    rank: usize,
    cap: usize,
    /// `layer_start[i]..layer_start[i + 1]` is layer `i`.
    layer_start: Vec<usize>,
    parent: Vec<u32>,
    letter: Vec<u8>,
    length: Vec<u32>,
    descents: Vec<u64>,
    /// `rank` entries per element; `NONE` when the neighbour lies outside.
    nbr: Vec<u32>,
}

impl Ball {
    /// Builds the ball of radius `depth` around the identity.
    pub fn build(matrix: &CoxeterMatrix, depth: usize, cap: usize) -> Result<Self, EngineError> {
        let mut ball = Self::identity_only(matrix, cap)?;
        ball.extend_to(depth)?;
        Ok(ball)
    }

    fn identity_only(matrix: &CoxeterMatrix, cap: usize) -> Result<Self, EngineError> {
        let rank = matrix.rank();
        if rank > MAX_RANK {
            return Err(EngineError::RankTooLarge(rank));
        }
        if cap == 0 {
            return Err(EngineError::ResourceLimit { cap, layer: 0 });
        }
        Ok(Self {
            matrix: matrix.clone(),
            rank,
            cap,
            layer_start: vec![0, 1],
            parent: vec![NONE],
            letter: vec![0],
            length: vec![0],
            descents: vec![0],
            nbr: vec![NONE; rank],
        })
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn depth(&self) -> usize {
        self.layer_start.len() - 2
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn layer(&self, i: usize) -> Range<usize> {
        if i > self.depth() {
            return 0..0;
        }
        self.layer_start[i]..self.layer_start[i + 1]
    }

    pub fn layer_ids(&self, i: usize) -> impl Iterator<Item = ElementId> {
        self.layer(i).map(|x| ElementId(x as u32))
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> {
        (0..self.len() as u32).map(ElementId)
    }

    /// Sphere cardinalities `c_0..c_depth`.
    pub fn sphere_sizes(&self) -> Vec<u64> {
        (0..=self.depth()).map(|i| self.layer(i).len() as u64).collect()
    }

    pub fn length(&self, w: ElementId) -> usize {
        self.length[w.index()] as usize
    }

    pub fn descents(&self, w: ElementId) -> DescentSet {
        DescentSet(self.descents[w.index()])
    }

    pub fn has_descent(&self, w: ElementId, s: usize) -> bool {
        self.descents[w.index()] >> s & 1 == 1
    }

    /// The neighbour `ws`, if it lies in the ball.
    pub fn step(&self, w: ElementId, s: usize) -> Option<ElementId> {
        let v = self.nbr[w.index() * self.rank + s];
        (v != NONE).then_some(ElementId(v))
    }

    pub fn direction(&self, w: ElementId, s: usize) -> Direction {
        if self.has_descent(w, s) {
            Direction::Down
        } else {
            Direction::Up
        }
    }

    pub fn multiply_right(&self, w: ElementId, s: usize) -> Result<(ElementId, Direction), EngineError> {
        if s >= self.rank {
            return Err(EngineError::GeneratorOutOfRange { s, rank: self.rank });
        }
        let v = self
            .step(w, s)
            .ok_or(EngineError::DepthExceeded { depth: self.depth() })?;
        Ok((v, self.direction(w, s)))
    }

    /// Follows `letters` from `start`; `None` once the walk leaves the ball.
    pub fn walk(&self, start: ElementId, letters: impl IntoIterator<Item = usize>) -> Option<ElementId> {
        letters.into_iter().try_fold(start, |cur, s| self.step(cur, s))
    }

    /// The element represented by an arbitrary word.
    pub fn find(&self, word: &[u8]) -> Option<ElementId> {
        if word.iter().any(|&s| s as usize >= self.rank) {
            return None;
        }
        self.walk(ElementId::IDENTITY, word.iter().map(|&s| s as usize))
    }

    /// `w^{-1}`: the reversed normal form, read from the identity.
    pub fn inverse(&self, w: ElementId) -> ElementId {
        let mut word = self.word(w);
        word.reverse();
        self.find(&word).expect("inverse has the same length")
    }

    /// `a · b` when every intermediate product stays inside the ball.
    pub fn product(&self, a: ElementId, b: ElementId) -> Option<ElementId> {
        self.walk(a, self.word(b).into_iter().map(usize::from))
    }

    pub fn parent(&self, w: ElementId) -> Option<(ElementId, usize)> {
        let p = self.parent[w.index()];
        (p != NONE).then(|| (ElementId(p), self.letter[w.index()] as usize))
    }

    pub fn word(&self, w: ElementId) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.length(w));
        let mut cur = w;
        while let Some((p, s)) = self.parent(cur) {
            out.push(s as u8);
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn element(&self, w: ElementId) -> GroupElement {
        GroupElement::from_canonical(self.word(w))
    }

    /// Locates a normal form; fails if `element` is not canonical.
    pub fn locate(&self, element: &GroupElement) -> Result<ElementId, EngineError> {
        if element.length() > self.depth() {
            return Err(EngineError::DepthExceeded { depth: self.depth() });
        }
        let id = self
            .find(element.word())
            .ok_or_else(|| EngineError::NotCanonical(element.to_string()))?;
        if self.length(id) != element.length() || self.word(id) != element.word() {
            return Err(EngineError::NotCanonical(element.to_string()));
        }
        Ok(id)
    }

    /// Builds further layers until the ball has radius `depth`.
    ///
    /// On failure the ball is left exactly as it was before the failing layer.
    pub fn extend_to(&mut self, depth: usize) -> Result<(), EngineError> {
        while self.depth() < depth {
            self.grow_layer()?;
        }
        Ok(())
    }

    fn grow_layer(&mut self) -> Result<(), EngineError> {
        let k = self.depth();
        let layer = self.layer(k);
        let first_new = self.len();
        for w in layer.clone() {
            let w = ElementId(w as u32);
            for s in 0..self.rank {
                if self.step(w, s).is_some() || self.has_descent(w, s) {
                    continue;
                }
                if self.len() >= self.cap {
                    self.rollback(layer, first_new);
                    return Err(EngineError::ResourceLimit {
                        cap: self.cap,
                        layer: k + 1,
                    });
                }
                let v = ElementId(self.len() as u32);
                self.parent.push(w.0);
                self.letter.push(s as u8);
                self.length.push(k as u32 + 1);
                self.nbr.extend(std::iter::repeat_n(NONE, self.rank));
                let mut desc = 1u64 << s;
                self.link(w, s, v);
                for t in 0..self.rank {
                    if t == s {
                        continue;
                    }
                    let Some(m) = self.matrix.get(s, t).finite() else {
                        continue;
                    };
                    if let Some(partner) = self.rank2_partner(w, s, t, m as usize) {
                        debug_assert!(self.step(partner, t).is_none());
                        desc |= 1 << t;
                        self.link(partner, t, v);
                    }
                }
                self.descents.push(desc);
            }
        }
        self.layer_start.push(self.len());
        Ok(())
    }

    fn link(&mut self, a: ElementId, s: usize, b: ElementId) {
        self.nbr[a.index() * self.rank + s] = b.0;
        self.nbr[b.index() * self.rank + s] = a.0;
    }

    /// The `w'` with `w't = ws`, if `ws` has `t` as a descent.
    fn rank2_partner(&self, w: ElementId, s: usize, t: usize, m: usize) -> Option<ElementId> {
        if self.length(w) + 1 < m {
            return None;
        }
        let mut cur = w;
        let mut letter = t;
        for _ in 0..m - 1 {
            if !self.has_descent(cur, letter) {
                return None;
            }
            cur = self.step(cur, letter)?;
            letter = if letter == s { t } else { s };
        }
        let mut letter = if (m - 1) % 2 == 1 { s } else { t };
        for _ in 0..m - 1 {
            cur = self.step(cur, letter).expect("lower layers are complete");
            letter = if letter == s { t } else { s };
        }
        Some(cur)
    }

    fn rollback(&mut self, layer: Range<usize>, first_new: usize) {
        self.parent.truncate(first_new);
        self.letter.truncate(first_new);
        self.length.truncate(first_new);
        self.descents.truncate(first_new);
        self.nbr.truncate(first_new * self.rank);
        for w in layer {
            for s in 0..self.rank {
                let slot = &mut self.nbr[w * self.rank + s];
                if *slot != NONE && *slot as usize >= first_new {
                    *slot = NONE;
                }
            }
        }
    }

    /// One JSON object per line: `{"i": length, "w": word, "desc": [...]}`.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        #[derive(Serialize)]
        struct Line<'a> {
            i: usize,
            w: &'a str,
            desc: Vec<usize>,
        }
        for id in self.ids() {
            let w = word_string(&self.word(id));
            let line = Line {
                i: self.length(id),
                w: &w,
                desc: self.descents(id).iter().collect(),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// A ball that grows on demand; serves element-level queries.
#[derive(Debug, Clone)]
pub struct Engine {
    ball: Ball,
}

impl Engine {
    pub fn new(matrix: &CoxeterMatrix, cap: usize) -> Result<Self, EngineError> {
        Ok(Self {
            ball: Ball::identity_only(matrix, cap)?,
        })
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    fn check_gen(&self, s: usize) -> Result<(), EngineError> {
        if s >= self.ball.rank {
            return Err(EngineError::GeneratorOutOfRange {
                s,
                rank: self.ball.rank,
            });
        }
        Ok(())
    }

    /// Canonical form of `ws` and whether the length went up or down.
    pub fn multiply_right(&mut self, w: &GroupElement, s: usize) -> Result<(GroupElement, Direction), EngineError> {
        self.check_gen(s)?;
        self.ball.extend_to(w.length() + 1)?;
        let id = self.ball.locate(w)?;
        let (v, dir) = self.ball.multiply_right(id, s)?;
        Ok((self.ball.element(v), dir))
    }

    pub fn right_descents(&mut self, w: &GroupElement) -> Result<DescentSet, EngineError> {
        self.ball.extend_to(w.length())?;
        let id = self.ball.locate(w)?;
        Ok(self.ball.descents(id))
    }

    /// Folds [`Engine::multiply_right`] over `word`.
    pub fn reduce(&mut self, word: &[u8]) -> Result<GroupElement, EngineError> {
        let mut cur = GroupElement::identity();
        for &s in word {
            cur = self.multiply_right(&cur, s as usize)?.0;
        }
        Ok(cur)
    }
}

/// Convenience wrapper with the default constructor signature.
pub fn build_ball(matrix: &CoxeterMatrix, depth: usize, cap: usize) -> Result<Ball, EngineError> {
    Ball::build(matrix, depth, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Order;

    fn m444() -> CoxeterMatrix {
        CoxeterMatrix::uniform(3, Order::Finite(4)).unwrap()
    }

    fn el(text: &str) -> GroupElement {
        GroupElement::from_canonical(parse_word(text).unwrap())
    }

    #[test]
    fn generators_go_up_from_identity() {
        let mut e = Engine::new(&m444(), DEFAULT_CAP).unwrap();
        let (v, d) = e.multiply_right(&GroupElement::identity(), 1).unwrap();
        assert_eq!(v.to_string(), "1");
        assert_eq!(d, Direction::Up);
        assert!(matches!(
            e.multiply_right(&GroupElement::identity(), 3),
            Err(EngineError::GeneratorOutOfRange { s: 3, rank: 3 })
        ));
    }

    #[test]
    fn dihedral_of_order_eight() {
        // s = 0, t = 1; stst = tsts, ShortLex-least is 0101
        let mut e = Engine::new(&CoxeterMatrix::dihedral(4).unwrap(), DEFAULT_CAP).unwrap();
        let (v, d) = e.multiply_right(&el("010"), 1).unwrap();
        assert_eq!((v.to_string().as_str(), d), ("0101", Direction::Up));
        let (v, d) = e.multiply_right(&el("0101"), 0).unwrap();
        assert_eq!((v.to_string().as_str(), d), ("101", Direction::Down));
        assert_eq!(e.reduce(&[1, 0, 1, 0]).unwrap().to_string(), "0101");

        let ball = Ball::build(&CoxeterMatrix::dihedral(4).unwrap(), 10, DEFAULT_CAP).unwrap();
        assert_eq!(ball.sphere_sizes(), vec![1, 2, 2, 2, 1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn descents_of_small_elements() {
        let mut e = Engine::new(&m444(), DEFAULT_CAP).unwrap();
        assert!(e.right_descents(&GroupElement::identity()).unwrap().is_empty());
        assert_eq!(e.right_descents(&el("2")).unwrap().iter().collect::<Vec<_>>(), vec![2]);
        let stst = e.reduce(&[0, 1, 0, 1]).unwrap();
        assert_eq!(e.right_descents(&stst).unwrap().iter().collect::<Vec<_>>(), vec![0, 1]);
        assert!(matches!(e.right_descents(&el("00")), Err(EngineError::NotCanonical(_))));
    }

    #[test]
    fn triangle_group_small_spheres() {
        let ball = Ball::build(&m444(), 4, DEFAULT_CAP).unwrap();
        assert_eq!(ball.sphere_sizes(), vec![1, 3, 6, 12, 21]);
    }

    #[test]
    fn layers_are_shortlex_sorted_and_reduced() {
        let ball = Ball::build(&CoxeterMatrix::uniform(4, Order::Finite(3)).unwrap(), 6, DEFAULT_CAP).unwrap();
        for i in 0..=ball.depth() {
            let words: Vec<Vec<u8>> = ball.layer_ids(i).map(|w| ball.word(w)).collect();
            assert!(words.windows(2).all(|p| p[0] < p[1]));
            assert!(words.iter().all(|w| w.len() == i));
        }
    }

    #[test]
    fn involution_closure_and_parity() {
        let ball = Ball::build(&m444(), 7, DEFAULT_CAP).unwrap();
        for w in ball.ids() {
            for s in 0..3 {
                if let Some(v) = ball.step(w, s) {
                    assert_eq!(ball.step(v, s), Some(w));
                    assert_eq!(ball.length(v).abs_diff(ball.length(w)), 1);
                    let expected = if ball.length(v) < ball.length(w) {
                        Direction::Down
                    } else {
                        Direction::Up
                    };
                    assert_eq!(ball.direction(w, s), expected);
                }
            }
            assert_eq!(ball.descents(w).is_empty(), w == ElementId::IDENTITY);
        }
    }

    #[test]
    fn finite_groups_exhaust() {
        let a3 = Ball::build(&CoxeterMatrix::linear(&[3, 3]).unwrap(), 8, DEFAULT_CAP).unwrap();
        assert_eq!(a3.len(), 24);
        assert_eq!(a3.sphere_sizes(), vec![1, 3, 5, 6, 5, 3, 1, 0, 0]);
    }

    #[test]
    fn cap_is_enforced_and_rolls_back() {
        let mut ball = Ball::build(&m444(), 3, DEFAULT_CAP).unwrap();
        let before = ball.len();
        ball.cap = before + 5;
        assert!(matches!(
            ball.extend_to(4),
            Err(EngineError::ResourceLimit { layer: 4, .. })
        ));
        assert_eq!(ball.len(), before);
        assert_eq!(ball.depth(), 3);
        ball.cap = DEFAULT_CAP;
        ball.extend_to(4).unwrap();
        assert_eq!(ball.sphere_sizes(), vec![1, 3, 6, 12, 21]);
    }

    #[test]
    fn infinite_labels_never_relate() {
        let free = CoxeterMatrix::uniform(3, Order::Infinite).unwrap();
        let ball = Ball::build(&free, 5, DEFAULT_CAP).unwrap();
        assert_eq!(ball.sphere_sizes(), vec![1, 3, 6, 12, 24, 48]);
    }

    #[test]
    fn jsonl_export() {
        let ball = Ball::build(&CoxeterMatrix::dihedral(3).unwrap(), 3, DEFAULT_CAP).unwrap();
        let mut buf = Vec::new();
        ball.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], r#"{"i":0,"w":"","desc":[]}"#);
        assert_eq!(lines[5], r#"{"i":3,"w":"010","desc":[0,1]}"#);
    }

    #[test]
    fn word_strings_roundtrip() {
        assert_eq!(word_string(&[0, 1, 10, 35]), "01az");
        assert_eq!(parse_word("01az"), Some(vec![0, 1, 10, 35]));
        assert_eq!(word_string(&[40, 1]), "40.1");
        assert_eq!(parse_word("40.1"), Some(vec![40, 1]));
    }
}
