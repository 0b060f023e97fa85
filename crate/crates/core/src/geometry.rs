//! Residues, projections, roots and walls of the chamber system, restricted
//! to a finite ball.
//!
//! A [`Geometry`] of radius `N` treats the elements of length at most `N` as
//! its chambers. Distances, reflections and root membership are evaluated in
//! an ambient ball of radius `2N + 2`, which contains every product the
//! scans form from chambers, so no query on chambers leaves it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::classify::spherical_subsets;
use crate::element::{Ball, ElementId, EngineError};
use crate::matrix::{CoxeterMatrix, Order};
use crate::report::{Comparison, ExactValue, VerificationReport};
use crate::stats::Gate;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("residue is not complete inside the ball")]
    ResidueIncomplete,
    #[error("query leaves the ambient ball of radius {depth}")]
    DepthExceeded { depth: usize },
    #[error("chamber lies outside the ball")]
    NotInBall,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("gate property fails for the projection onto a residue")]
    GateViolated,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// `w<J>` intersected with the chambers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residue {
    pub types: Vec<usize>,
    pub representative: ElementId,
    /// Sorted by id, hence by ShortLex.
    pub members: Vec<ElementId>,
    /// Whether the whole coset lies among the chambers.
    pub complete: bool,
}

impl Residue {
    pub fn contains(&self, w: ElementId) -> bool {
        self.members.binary_search(&w).is_ok()
    }

    pub fn rank(&self) -> usize {
        self.types.len()
    }
}

/// A root, held as its reflection plus the side it lies on.
///
/// `witness` is a chamber `u` with `l(us) > l(u)`; the positive root with
/// reflection `u s u^-1` is `u α_s`, and the root is that one or its negative.
#[derive(Debug, Clone, Copy)]
pub struct RootHandle {
    pub reflection: ElementId,
    pub positive: bool,
    witness: ElementId,
    generator: usize,
}

impl PartialEq for RootHandle {
    fn eq(&self, other: &Self) -> bool {
        self.reflection == other.reflection && self.positive == other.positive
    }
}

impl Eq for RootHandle {}

impl RootHandle {
    pub fn negate(self) -> Self {
        Self {
            positive: !self.positive,
            ..self
        }
    }
}

/// Panels and rank-2 residues of the ball in the wall of a root.
#[derive(Debug, Clone)]
pub struct WallSample {
    pub root: RootHandle,
    /// Each panel `{w, ws}` as `(w, s)` with `w` the shorter chamber.
    pub panels: Vec<(ElementId, usize)>,
    pub residues: Vec<Residue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trichotomy {
    InsideAlpha,
    InsideMinusAlpha,
    InBoundary,
}

#[derive(Debug, Clone)]
pub struct Geometry {
    ball: Ball,
    radius: usize,
    chambers: usize,
    /// Reflection `w s w^-1` of the panel `{w, ws}`, indexed `w * rank + s`, for chambers `w, ws`.
    panel_reflection: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl Geometry {
    pub fn new(matrix: &CoxeterMatrix, radius: usize, cap: usize) -> Result<Self, GeometryError> {
        let ball = Ball::build(matrix, 2 * radius + 2, cap)?;
        let chambers = ball.layer(radius).end;
        let rank = ball.rank();
        let mut geo = Self {
            ball,
            radius,
            chambers,
            panel_reflection: vec![NONE; chambers * rank],
        };
        for w in geo.chambers().collect::<Vec<_>>() {
            for s in 0..rank {
                let Some(ws) = geo.ball.step(w, s) else { continue };
                if !geo.is_chamber(ws) {
                    continue;
                }
                let short = if geo.ball.has_descent(w, s) { ws } else { w };
                let r = geo.conjugate(short, s)?;
                geo.panel_reflection[w.index() * rank + s] = r.0;
            }
        }
        Ok(geo)
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        self.ball.matrix()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn chambers(&self) -> impl Iterator<Item = ElementId> {
        (0..self.chambers as u32).map(ElementId)
    }

    pub fn is_chamber(&self, w: ElementId) -> bool {
        w.index() < self.chambers
    }

    fn exceeded(&self) -> GeometryError {
        GeometryError::DepthExceeded {
            depth: self.ball.depth(),
        }
    }

    fn walk_word(&self, start: ElementId, word: &[u8]) -> Result<ElementId, GeometryError> {
        self.ball
            .walk(start, word.iter().map(|&s| s as usize))
            .ok_or_else(|| self.exceeded())
    }

    /// `x^-1 y`.
    pub fn quotient(&self, x: ElementId, y: ElementId) -> Result<ElementId, GeometryError> {
        self.walk_word(self.ball.inverse(x), &self.ball.word(y))
    }

    /// Gallery distance `l(x^-1 y)`.
    pub fn distance(&self, x: ElementId, y: ElementId) -> Result<usize, GeometryError> {
        Ok(self.ball.length(self.quotient(x, y)?))
    }

    /// `s w`.
    pub fn left_multiply(&self, s: usize, w: ElementId) -> Result<ElementId, GeometryError> {
        let start = self.ball.step(ElementId::IDENTITY, s).ok_or_else(|| self.exceeded())?;
        self.walk_word(start, &self.ball.word(w))
    }

    /// `w s w^-1`.
    fn conjugate(&self, w: ElementId, s: usize) -> Result<ElementId, GeometryError> {
        let ws = self.ball.step(w, s).ok_or_else(|| self.exceeded())?;
        let mut inv = self.ball.word(w);
        inv.reverse();
        self.walk_word(ws, &inv)
    }

    /// The reflection fixing the panel `{w, ws}` of chambers.
    pub fn panel_reflection(&self, w: ElementId, s: usize) -> Option<ElementId> {
        if !self.is_chamber(w) {
            return None;
        }
        let r = self.panel_reflection[w.index() * self.ball.rank() + s];
        (r != NONE).then_some(ElementId(r))
    }

    /// `R_J(w)`, found by a `J`-gallery search through the chambers.
    pub fn residue(&self, w: ElementId, types: &[usize]) -> Result<Residue, GeometryError> {
        if !self.is_chamber(w) {
            return Err(GeometryError::NotInBall);
        }
        let mut types = types.to_vec();
        types.sort_unstable();
        types.dedup();
        let mut seen = BTreeSet::from([w]);
        let mut queue = VecDeque::from([w]);
        let mut complete = true;
        while let Some(x) = queue.pop_front() {
            for &s in &types {
                match self.ball.step(x, s) {
                    Some(y) if self.is_chamber(y) => {
                        if seen.insert(y) {
                            queue.push_back(y);
                        }
                    }
                    _ => complete = false,
                }
            }
        }
        Ok(Residue {
            types,
            representative: w,
            members: seen.into_iter().collect(),
            complete,
        })
    }

    pub fn panel(&self, w: ElementId, s: usize) -> Result<Residue, GeometryError> {
        self.residue(w, &[s])
    }

    /// The gate of `r` towards `x`: the member nearest to `x`, checked
    /// against `d(x, y) = d(x, z) + d(z, y)` for every member `y`.
    pub fn projection(&self, x: ElementId, r: &Residue) -> Result<ElementId, GeometryError> {
        if !r.complete {
            return Err(GeometryError::ResidueIncomplete);
        }
        if !self.is_chamber(x) {
            return Err(GeometryError::NotInBall);
        }
        let dists = r
            .members
            .iter()
            .map(|&y| self.distance(x, y))
            .collect::<Result<Vec<_>, _>>()?;
        let best = *dists.iter().min().expect("residues are nonempty");
        let z = r.members[dists.iter().position(|&d| d == best).unwrap()];
        for (&y, &d) in r.members.iter().zip(&dists) {
            if d != best + self.distance(z, y)? {
                return Err(GeometryError::GateViolated);
            }
        }
        Ok(z)
    }

    /// `α_s = {w : l(sw) > l(w)}`.
    pub fn simple_root(&self, s: usize) -> RootHandle {
        let reflection = self.ball.step(ElementId::IDENTITY, s).expect("radius at least 1");
        RootHandle {
            reflection,
            positive: true,
            witness: ElementId::IDENTITY,
            generator: s,
        }
    }

    /// The root containing `w` whose wall contains the panel `{w, ws}`.
    pub fn root_of_panel(&self, w: ElementId, s: usize) -> Result<RootHandle, GeometryError> {
        let reflection = self.panel_reflection(w, s).ok_or(GeometryError::NotInBall)?;
        let ws = self.ball.step(w, s).ok_or(GeometryError::NotInBall)?;
        let up = !self.ball.has_descent(w, s);
        let witness = if up { w } else { ws };
        // w α_s contains w; it is positive iff w is the shorter chamber
        Ok(RootHandle {
            reflection,
            positive: up,
            witness,
            generator: s,
        })
    }

    /// Whether the chamber `w` lies in `alpha`.
    pub fn contains(&self, alpha: &RootHandle, w: ElementId) -> Result<bool, GeometryError> {
        // w ∈ u α_s  iff  s is not a left descent of u^-1 w, i.e. not a right descent of w^-1 u
        let v = self.quotient(w, alpha.witness)?;
        let in_positive = !self.ball.has_descent(v, alpha.generator);
        Ok(in_positive == alpha.positive)
    }

    /// Reflections stabilising a residue, read off its panels.
    pub fn residue_reflections(&self, r: &Residue) -> BTreeSet<ElementId> {
        let mut out = BTreeSet::new();
        for &w in &r.members {
            for &s in &r.types {
                if let Some(refl) = self.panel_reflection(w, s) {
                    out.insert(refl);
                }
            }
        }
        out
    }

    /// Complete rank-2 spherical residues of the ball, each given by its shortest member.
    pub fn rank_two_residues(&self) -> Result<Vec<Residue>, GeometryError> {
        let rank = self.ball.rank();
        let mut out = Vec::new();
        for s in 0..rank {
            for t in s + 1..rank {
                let Order::Finite(m) = self.matrix().get(s, t) else {
                    continue;
                };
                for w in self.chambers() {
                    if self.ball.has_descent(w, s) || self.ball.has_descent(w, t) {
                        continue;
                    }
                    if self.ball.length(w) + m as usize > self.radius {
                        continue;
                    }
                    out.push(self.residue(w, &[s, t])?);
                }
            }
        }
        Ok(out)
    }

    pub fn wall_sample(&self, alpha: &RootHandle) -> Result<WallSample, GeometryError> {
        let mut panels = Vec::new();
        for w in self.chambers() {
            for s in 0..self.ball.rank() {
                if self.ball.has_descent(w, s) || self.panel_reflection(w, s) != Some(alpha.reflection) {
                    continue;
                }
                let ws = self.ball.step(w, s).unwrap();
                if self.contains(alpha, w)? == self.contains(alpha, ws)? {
                    return Err(GeometryError::Inconsistent(
                        "panel in the wall does not separate".into(),
                    ));
                }
                panels.push((w, s));
            }
        }
        let residues = self
            .rank_two_residues()?
            .into_iter()
            .filter(|r| self.residue_reflections(r).contains(&alpha.reflection))
            .collect();
        Ok(WallSample {
            root: *alpha,
            panels,
            residues,
        })
    }

    /// Where a complete rank-2 spherical residue sits relative to `alpha`.
    pub fn residue_root_trichotomy(&self, r: &Residue, alpha: &RootHandle) -> Result<Trichotomy, GeometryError> {
        if !r.complete {
            return Err(GeometryError::ResidueIncomplete);
        }
        let mut inside = 0;
        for &w in &r.members {
            inside += usize::from(self.contains(alpha, w)?);
        }
        let case = if inside == r.members.len() {
            Trichotomy::InsideAlpha
        } else if inside == 0 {
            Trichotomy::InsideMinusAlpha
        } else {
            Trichotomy::InBoundary
        };
        let stabilised = self.residue_reflections(r).contains(&alpha.reflection);
        if stabilised != (case == Trichotomy::InBoundary) {
            return Err(GeometryError::Inconsistent(
                "boundary case disagrees with the wall".into(),
            ));
        }
        Ok(case)
    }

    /// `proj_T R = T` and `proj_R T = R`.
    pub fn parallel_check(&self, r: &Residue, t: &Residue) -> Result<bool, GeometryError> {
        let image = |from: &Residue, onto: &Residue| -> Result<BTreeSet<ElementId>, GeometryError> {
            from.members.iter().map(|&x| self.projection(x, onto)).collect()
        };
        let onto_t = image(r, t)?;
        let onto_r = image(t, r)?;
        Ok(onto_t.len() == t.members.len() && onto_r.len() == r.members.len())
    }

    fn require(&self, gate: Gate, ok: bool, what: &str) -> Result<(), GeometryError> {
        if gate == Gate::Enforced && !ok {
            return Err(GeometryError::HypothesisViolated(what.into()));
        }
        Ok(())
    }

    fn two_spherical_complete(&self) -> bool {
        let p = self.matrix().diagram_properties();
        p.two_spherical && p.complete_diagram
    }

    /// Two distinct reflections stabilise at most one rank-2 residue, when no
    /// three generators generate a finite group.
    pub fn verify_l24(&self, gate: Gate) -> Result<VerificationReport, GeometryError> {
        let rank3 = spherical_subsets(self.matrix()).iter().any(|j| j.generators.len() == 3);
        self.require(gate, !rank3, "a rank-3 subset is spherical")?;
        let mut report = VerificationReport::new("L24", Some([0, self.radius]));
        let mut shared: BTreeMap<(ElementId, ElementId), Vec<ElementId>> = BTreeMap::new();
        let residues = self.rank_two_residues()?;
        for r in &residues {
            let refl: Vec<ElementId> = self.residue_reflections(r).into_iter().collect();
            if let Order::Finite(m) = self.matrix().get(r.types[0], r.types[1]) {
                if refl.len() != m as usize {
                    return Err(GeometryError::Inconsistent(
                        "rank-2 residue with wrong reflection count".into(),
                    ));
                }
            }
            for (a, &x) in refl.iter().enumerate() {
                for &y in &refl[a + 1..] {
                    shared.entry((x, y)).or_default().push(r.representative);
                }
            }
        }
        // incomplete rank-2 spherical residues meeting the ball are not scanned
        report.skipped = self.incomplete_rank_two_count();
        for ((x, y), reps) in shared {
            let cmp = Comparison {
                i: self.ball.length(reps[0]),
                part: None,
                lhs: ExactValue::Int(reps.len().into()),
                rhs: ExactValue::Int(1.into()),
                detail: Some(format!(
                    "reflections {} and {}",
                    self.ball.element(x),
                    self.ball.element(y)
                )),
            };
            report.record(cmp, reps.len() <= 1, false);
        }
        Ok(report)
    }

    fn incomplete_rank_two_count(&self) -> usize {
        let rank = self.ball.rank();
        let mut count = 0;
        for s in 0..rank {
            for t in s + 1..rank {
                let Order::Finite(m) = self.matrix().get(s, t) else {
                    continue;
                };
                count += self
                    .chambers()
                    .filter(|&w| {
                        !self.ball.has_descent(w, s)
                            && !self.ball.has_descent(w, t)
                            && self.ball.length(w) + m as usize > self.radius
                    })
                    .count();
            }
        }
        count
    }

    /// For residues `R != T` of rank 2 meeting in a panel `P` with
    /// `l(proj_R 1) < l(proj_T 1)`: `proj_T 1 = proj_P 1`.
    pub fn verify_p29(&self, gate: Gate) -> Result<VerificationReport, GeometryError> {
        self.require(
            gate,
            self.two_spherical_complete(),
            "needs a 2-spherical system with complete diagram",
        )?;
        let rank = self.ball.rank();
        let mut report = VerificationReport::new("P29", Some([0, self.radius]));
        for z in self.chambers() {
            for s in 0..rank {
                if self.ball.has_descent(z, s) {
                    continue;
                }
                // P = {z, zs} with proj_P 1 = z
                for t in (0..rank).filter(|&t| t != s) {
                    for r in (0..rank).filter(|&r| r != s && r != t) {
                        let big_r = self.residue(z, &[s, t])?;
                        let big_t = self.residue(z, &[s, r])?;
                        if !big_r.complete || !big_t.complete {
                            report.skip();
                            continue;
                        }
                        let pr = self.projection(ElementId::IDENTITY, &big_r)?;
                        let pt = self.projection(ElementId::IDENTITY, &big_t)?;
                        if self.ball.length(pr) >= self.ball.length(pt) {
                            continue;
                        }
                        let cmp = Comparison {
                            i: self.ball.length(z),
                            part: None,
                            lhs: self.ball.element(pt).to_string().into(),
                            rhs: self.ball.element(z).to_string().into(),
                            detail: Some(format!("panel {{{}, {}}}", self.ball.element(z), s)),
                        };
                        report.record(cmp, pt == z, false);
                    }
                }
            }
        }
        Ok(report)
    }

    /// `l(w w' r) = l(w) + l(w') + 1` whenever `ws`, `wt` both go up,
    /// `w' in <s, t>` has length at least 2 and `r` is neither `s` nor `t`.
    pub fn verify_c210(&self, gate: Gate) -> Result<VerificationReport, GeometryError> {
        self.require(
            gate,
            self.two_spherical_complete(),
            "needs a 2-spherical system with complete diagram",
        )?;
        let rank = self.ball.rank();
        let mut report = VerificationReport::new("C210", Some([0, self.radius]));
        for w in self.chambers() {
            let lw = self.ball.length(w);
            for s in 0..rank {
                for t in (0..rank).filter(|&t| t != s) {
                    if self.ball.has_descent(w, s) || self.ball.has_descent(w, t) {
                        continue;
                    }
                    let Some(m) = self.matrix().get(s, t).finite() else {
                        continue;
                    };
                    // w' runs over the alternating words starting with s; t-first ones come from swapping
                    for len in 2..=m as usize {
                        let word: Vec<u8> = (0..len).map(|j| if j % 2 == 0 { s as u8 } else { t as u8 }).collect();
                        for r in (0..rank).filter(|&r| r != s && r != t) {
                            let Ok(ww) = self.walk_word(w, &word) else {
                                report.skip();
                                continue;
                            };
                            let Some(wwr) = self.ball.step(ww, r) else {
                                report.skip();
                                continue;
                            };
                            let lhs = self.ball.length(wwr);
                            let rhs = lw + len + 1;
                            let cmp = Comparison {
                                i: lw,
                                part: None,
                                lhs: ExactValue::Int(lhs.into()),
                                rhs: ExactValue::Int(rhs.into()),
                                detail: Some(format!(
                                    "w={} w'={} r={}",
                                    self.ball.element(w),
                                    crate::element::word_string(&word),
                                    r
                                )),
                            };
                            report.record(cmp, lhs == rhs, false);
                        }
                    }
                }
            }
        }
        Ok(report)
    }

    /// `l(w) + 2` is one of `l(wsr)`, `l(wtr)` whenever `ws`, `wt` both go up
    /// and `r` is neither `s` nor `t`; needs every `m_st >= 4`.
    pub fn verify_l211(&self, gate: Gate) -> Result<VerificationReport, GeometryError> {
        let rank = self.ball.rank();
        let labels_ok =
            (0..rank).all(|s| (s + 1..rank).all(|t| matches!(self.matrix().get(s, t), Order::Finite(m) if m >= 4)));
        self.require(gate, labels_ok, "needs 4 <= m_st < inf for all s != t")?;
        let mut report = VerificationReport::new("L211", Some([0, self.radius]));
        for w in self.chambers() {
            let lw = self.ball.length(w);
            for s in 0..rank {
                for t in s + 1..rank {
                    if self.ball.has_descent(w, s) || self.ball.has_descent(w, t) {
                        continue;
                    }
                    for r in (0..rank).filter(|&r| r != s && r != t) {
                        let (Some(wsr), Some(wtr)) = (self.ball.walk(w, [s, r]), self.ball.walk(w, [t, r])) else {
                            report.skip();
                            continue;
                        };
                        let (a, b) = (self.ball.length(wsr), self.ball.length(wtr));
                        let cmp = Comparison {
                            i: lw,
                            part: None,
                            lhs: format!("{{{a}, {b}}}").into(),
                            rhs: ExactValue::Int((lw + 2).into()),
                            detail: Some(format!("w={} s={s} t={t} r={r}", self.ball.element(w))),
                        };
                        report.record(cmp, a == lw + 2 || b == lw + 2, false);
                    }
                }
            }
        }
        Ok(report)
    }

    /// Along each parent-chain gallery from 1, no wall is crossed twice.
    pub fn check_wall_crossing(&self) -> VerificationReport {
        let mut report = VerificationReport::new("wall-crossing", Some([0, self.radius]));
        for w in self.chambers() {
            let mut crossed = BTreeSet::new();
            let mut cur = w;
            let mut ok = true;
            while let Some((p, s)) = self.ball.parent(cur) {
                ok &= crossed.insert(self.panel_reflection(p, s).expect("gallery inside the ball"));
                cur = p;
            }
            let cmp = Comparison {
                i: self.ball.length(w),
                part: None,
                lhs: ExactValue::Int(crossed.len().into()),
                rhs: ExactValue::Int(self.ball.length(w).into()),
                detail: Some(self.ball.element(w).to_string()),
            };
            report.record(cmp, ok, false);
        }
        report
    }

    /// Membership in `α_s` matches `l(sw) > l(w)` on every chamber.
    pub fn check_simple_roots(&self) -> Result<VerificationReport, GeometryError> {
        let mut report = VerificationReport::new("simple-roots", Some([0, self.radius]));
        for s in 0..self.ball.rank() {
            let alpha = self.simple_root(s);
            for w in self.chambers() {
                let by_root = self.contains(&alpha, w)?;
                let by_length = self.ball.length(self.left_multiply(s, w)?) > self.ball.length(w);
                let cmp = Comparison {
                    i: self.ball.length(w),
                    part: None,
                    lhs: ExactValue::Text(by_root.to_string()),
                    rhs: ExactValue::Text(by_length.to_string()),
                    detail: Some(format!("s={s} w={}", self.ball.element(w))),
                };
                report.record(cmp, by_root == by_length, false);
            }
        }
        Ok(report)
    }

    /// Roots of the walls crossed within `wall_radius` of 1; used by the
    /// sampled root checks.
    pub fn sample_roots(&self, wall_radius: usize) -> Result<Vec<RootHandle>, GeometryError> {
        let mut seen = BTreeSet::new();
        let mut roots = Vec::new();
        for w in self.chambers().take_while(|&w| self.ball.length(w) <= wall_radius) {
            for s in 0..self.ball.rank() {
                if self.ball.has_descent(w, s) || self.panel_reflection(w, s).is_none() {
                    continue;
                }
                let alpha = self.root_of_panel(w, s)?;
                if seen.insert(alpha.reflection) {
                    roots.push(alpha);
                }
            }
        }
        Ok(roots)
    }

    /// For each sampled root, `w in α` exactly when `r_α w` is not, whenever
    /// `r_α w` is a chamber.
    pub fn check_reflection_swaps(&self, roots: &[RootHandle]) -> Result<VerificationReport, GeometryError> {
        let mut report = VerificationReport::new("reflection-swap", Some([0, self.radius]));
        for alpha in roots {
            let word = self.ball.word(alpha.reflection);
            for w in self.chambers() {
                let Some(rw) = self
                    .ball
                    .walk(alpha.reflection, self.ball.word(w).into_iter().map(usize::from))
                else {
                    report.skip();
                    continue;
                };
                if !self.is_chamber(rw) {
                    report.skip();
                    continue;
                }
                let (a, b) = (self.contains(alpha, w)?, self.contains(alpha, rw)?);
                let cmp = Comparison {
                    i: self.ball.length(w),
                    part: None,
                    lhs: ExactValue::Text(a.to_string()),
                    rhs: ExactValue::Text(b.to_string()),
                    detail: Some(format!(
                        "r={} w={}",
                        crate::element::word_string(&word),
                        self.ball.element(w)
                    )),
                };
                report.record(cmp, a != b, false);
            }
        }
        Ok(report)
    }

    /// Minimal galleries between two chambers of a root stay in the root,
    /// for all pairs of chambers of length at most `pair_radius`.
    pub fn check_convexity(
        &self,
        roots: &[RootHandle],
        pair_radius: usize,
    ) -> Result<VerificationReport, GeometryError> {
        let mut report = VerificationReport::new("convexity", Some([0, pair_radius.min(self.radius)]));
        let near: Vec<ElementId> = self
            .chambers()
            .take_while(|&w| self.ball.length(w) <= pair_radius)
            .collect();
        for alpha in roots {
            let inside: Vec<ElementId> = near
                .iter()
                .copied()
                .filter_map(|w| self.contains(alpha, w).map(|b| b.then_some(w)).transpose())
                .collect::<Result<_, _>>()?;
            for &x in &inside {
                for &y in &inside {
                    if x >= y {
                        continue;
                    }
                    let mut ok = true;
                    let mut cur = x;
                    for s in self.ball.word(self.quotient(x, y)?) {
                        cur = self.ball.step(cur, s as usize).ok_or_else(|| self.exceeded())?;
                        ok &= self.contains(alpha, cur)?;
                    }
                    let cmp = Comparison {
                        i: self.ball.length(y),
                        part: None,
                        lhs: self.ball.element(x).to_string().into(),
                        rhs: self.ball.element(y).to_string().into(),
                        detail: None,
                    };
                    report.record(cmp, ok, false);
                }
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo(n: usize, m: u32, radius: usize) -> Geometry {
        Geometry::new(
            &CoxeterMatrix::uniform(n, Order::Finite(m)).unwrap(),
            radius,
            10_000_000,
        )
        .unwrap()
    }

    fn id(g: &Geometry, word: &[u8]) -> ElementId {
        g.ball().find(word).unwrap()
    }

    #[test]
    fn residues_of_the_triangle_group() {
        let g = geo(3, 4, 6);
        let r = g.residue(ElementId::IDENTITY, &[0, 1]).unwrap();
        assert!(r.complete);
        assert_eq!(r.members.len(), 8);
        let far = g.residue(id(&g, &[0, 1, 2]), &[0, 1]).unwrap();
        assert!(!far.complete);
        let p = g.panel(id(&g, &[0]), 1).unwrap();
        assert_eq!(p.members.len(), 2);
    }

    #[test]
    fn projections() {
        let g = geo(3, 4, 6);
        let r = g.residue(id(&g, &[2]), &[0, 1]).unwrap();
        assert_eq!(g.projection(ElementId::IDENTITY, &r).unwrap(), id(&g, &[2]));
        let x = id(&g, &[2, 0, 1]);
        assert_eq!(g.projection(x, &r).unwrap(), x);
        // x = s, R = {t}-panel of 1
        let panel = g.panel(ElementId::IDENTITY, 1).unwrap();
        assert_eq!(g.projection(id(&g, &[0]), &panel).unwrap(), ElementId::IDENTITY);
        let far = g.residue(id(&g, &[0, 1, 2]), &[0, 1]).unwrap();
        assert_eq!(
            g.projection(ElementId::IDENTITY, &far),
            Err(GeometryError::ResidueIncomplete)
        );
    }

    #[test]
    fn trichotomy_cases() {
        let g = geo(3, 4, 6);
        let r = g.residue(ElementId::IDENTITY, &[0, 1]).unwrap();
        let a2 = g.simple_root(2);
        assert_eq!(g.residue_root_trichotomy(&r, &a2).unwrap(), Trichotomy::InsideAlpha);
        assert_eq!(
            g.residue_root_trichotomy(&r, &a2.negate()).unwrap(),
            Trichotomy::InsideMinusAlpha
        );
        // the reflected residue r_2 R = 2<0,1> lies in -α_2
        let moved = g.residue(id(&g, &[2]), &[0, 1]).unwrap();
        assert_eq!(
            g.residue_root_trichotomy(&moved, &a2).unwrap(),
            Trichotomy::InsideMinusAlpha
        );
        assert_eq!(
            g.residue_root_trichotomy(&r, &g.simple_root(0)).unwrap(),
            Trichotomy::InBoundary
        );
    }

    #[test]
    fn parallel_panels() {
        let g = geo(3, 4, 6);
        let p = g.panel(ElementId::IDENTITY, 0).unwrap();
        assert!(g.parallel_check(&p, &p).unwrap());
        let opposite = g.panel(id(&g, &[1, 0, 1]), 0).unwrap();
        assert!(g.parallel_check(&p, &opposite).unwrap());
        let other = g.panel(id(&g, &[1]), 0).unwrap();
        assert!(!g.parallel_check(&p, &other).unwrap());
    }

    #[test]
    fn roots_and_walls() {
        let g = geo(3, 4, 5);
        let alpha = g.simple_root(0);
        assert!(g.contains(&alpha, ElementId::IDENTITY).unwrap());
        assert!(!g.contains(&alpha, id(&g, &[0])).unwrap());
        let sample = g.wall_sample(&alpha).unwrap();
        assert!(sample.panels.contains(&(ElementId::IDENTITY, 0)));
        assert!(sample.residues.iter().any(|r| r.representative == ElementId::IDENTITY));
        let beta = g.root_of_panel(id(&g, &[1, 0]), 2).unwrap();
        assert!(g.contains(&beta, id(&g, &[1, 0])).unwrap());
        assert!(!g.contains(&beta, id(&g, &[1, 0, 2])).unwrap());
        assert_eq!(beta, g.root_of_panel(id(&g, &[1, 0, 2]), 2).unwrap().negate());
    }

    #[test]
    fn invariant_checks_hold() {
        let g = geo(3, 4, 5);
        assert!(g.check_wall_crossing().holds());
        assert!(g.check_simple_roots().unwrap().holds());
        let roots = g.sample_roots(2).unwrap();
        assert!(g.check_reflection_swaps(&roots).unwrap().holds());
        assert!(g.check_convexity(&roots, 3).unwrap().holds());
    }

    #[test]
    fn c210_base_case() {
        // w = 1, w' = st, r third generator
        let g = geo(3, 4, 4);
        assert_eq!(g.ball().length(id(&g, &[0, 1, 2])), 3);
        assert!(g.verify_c210(Gate::Enforced).unwrap().holds());
    }

    #[test]
    fn l211_gate_and_counterexample() {
        let g = geo(3, 3, 5);
        assert!(matches!(
            g.verify_l211(Gate::Enforced),
            Err(GeometryError::HypothesisViolated(_))
        ));
        let report = g.verify_l211(Gate::Diagnostic).unwrap();
        assert!(!report.holds());
        assert!(geo(3, 5, 5).verify_l211(Gate::Enforced).unwrap().holds());
    }

    #[test]
    fn l24_needs_no_spherical_triples() {
        let g = Geometry::new(&CoxeterMatrix::linear(&[3, 3]).unwrap(), 3, 1000).unwrap();
        assert!(matches!(
            g.verify_l24(Gate::Enforced),
            Err(GeometryError::HypothesisViolated(_))
        ));
    }
}
