//! Random Bowen balls and finite-depth approximations of Γ_δ(x,w) and Γ_δ^+(x,w).
//!
//! Symbolic fibers: depth-first enumeration of cylinders with exact rational distance bounds.
//! Circle and interval fibers: the ball is tracked as a union of domain intervals, each carrying
//! the affine lift of the orbit map, intersected with the lifted δ-balls at every time.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::base::{BasePoint, RandomScalar, Symbol};
use crate::error::{Error, Result};
use crate::exact::{pow2, pow2_neg, q, Mass, Q};
use crate::fiber::{
    circle_distance, frac, symbolic_distance_exact, FiberMap, FiberPoint, FiberSpace, FiberSystem, SymbolWord,
};
use crate::measure::FiberMeasure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sided {
    Forward,
    TwoSided,
}

/// Constraint times `k` in `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: i64,
    pub end: i64,
}

impl Window {
    /// B_w[x,δ,n] or B_w[x,δ,±n].
    pub fn ball(n: usize, sided: Sided) -> Window {
        let n = n as i64;
        match sided {
            Sided::Forward => Window { start: 0, end: n - 1 },
            Sided::TwoSided => Window { start: -(n - 1), end: n - 1 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    In,
    Out,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GammaParams {
    /// Extra cylinder length beyond the window end.
    pub buffer: usize,
    /// Cap on recorded cells and tracked components.
    pub budget: usize,
}

impl Default for GammaParams {
    fn default() -> Self {
        GammaParams { buffer: 4, budget: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GammaCells {
    /// Cylinders certified inside, and cylinders whose membership is undecided.
    Cylinders { inside: Vec<Vec<Symbol>>, boundary: Vec<Vec<Symbol>>, leaf_len: usize },
    /// Disjoint intervals of `[0,1]`; each endpoint is accurate to within `err`.
    Arcs { arcs: Vec<(f64, f64)>, err: f64, circle: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaSetApprox {
    pub window: Window,
    pub cells: GammaCells,
    /// The budget was exhausted; unexplored cells were kept as boundary cells.
    pub truncated: bool,
}

impl GammaSetApprox {
    /// Number of connected pieces (cells or arcs, wrap-around arcs counted once).
    pub fn piece_count(&self) -> usize {
        match &self.cells {
            GammaCells::Cylinders { inside, boundary, .. } => inside.len() + boundary.len(),
            GammaCells::Arcs { arcs, circle, .. } => {
                let wraps = *circle
                    && arcs.len() > 1
                    && arcs.first().is_some_and(|a| a.0 <= 0.0)
                    && arcs.last().is_some_and(|a| a.1 >= 1.0);
                arcs.len() - usize::from(wraps)
            }
        }
    }

    /// Size of the largest piece: `2^{-len}` for cylinders, length for arcs.
    pub fn largest_piece(&self) -> f64 {
        match &self.cells {
            GammaCells::Cylinders { inside, boundary, .. } => inside
                .iter()
                .chain(boundary)
                .map(|c| 2f64.powi(-(c.len() as i32)))
                .fold(0.0, f64::max),
            GammaCells::Arcs { arcs, .. } => merged_lengths(self).into_iter().fold(0.0, f64::max).max(
                arcs.iter().map(|a| a.1 - a.0).fold(0.0, f64::max),
            ),
        }
    }

    /// Size of the largest piece certified to lie inside.
    pub fn largest_certified_piece(&self) -> f64 {
        match &self.cells {
            GammaCells::Cylinders { inside, .. } => {
                inside.iter().map(|c| 2f64.powi(-(c.len() as i32))).fold(0.0, f64::max)
            }
            GammaCells::Arcs { err, .. } => merged_lengths(self)
                .into_iter()
                .map(|l| l - 2.0 * err)
                .fold(0.0, f64::max),
        }
    }

    pub fn is_whole_fiber(&self) -> bool {
        match &self.cells {
            GammaCells::Cylinders { inside, .. } => inside.len() == 1 && inside[0].is_empty(),
            GammaCells::Arcs { arcs, err, .. } => arcs.len() == 1 && arcs[0].0 <= *err && arcs[0].1 >= 1.0 - err,
        }
    }
}

fn merged_lengths(g: &GammaSetApprox) -> Vec<f64> {
    let GammaCells::Arcs { arcs, circle, .. } = &g.cells else { return Vec::new() };
    let mut lens: Vec<f64> = arcs.iter().map(|a| a.1 - a.0).collect();
    if *circle && arcs.len() > 1 && arcs[0].0 <= 0.0 && arcs[arcs.len() - 1].1 >= 1.0 {
        let last = lens.pop().unwrap();
        lens[0] += last;
    }
    lens
}

/// Whether `y` lies in the Bowen ball around `x` over `window`.
pub fn bowen_membership(
    sys: &FiberSystem,
    w: &BasePoint,
    x: &FiberPoint,
    y: &FiberPoint,
    delta: &RandomScalar,
    window: Window,
) -> Result<Membership> {
    if window.start < 0 && !sys.invertible {
        return Err(Error::NotInvertible(window.start));
    }
    match (x, y) {
        (FiberPoint::Symbolic(a), FiberPoint::Symbolic(b)) => {
            if window.start < 0 {
                return Err(Error::NotInvertible(window.start));
            }
            let (mut a, mut b) = (a.clone(), b.clone());
            for _ in 0..window.start {
                a = a.shifted();
                b = b.shifted();
            }
            for k in window.start..=window.end {
                if symbolic_distance_exact(&a, &b) > delta.at(w, k) {
                    return Ok(Membership::Out);
                }
                a = a.shifted();
                b = b.shifted();
            }
            Ok(Membership::In)
        }
        (FiberPoint::Real(a), FiberPoint::Real(b)) => {
            let mut verdict = Membership::In;
            let mut check = |k: i64, p: f64, r: f64| {
                let d = if sys.space.is_circle() { circle_distance(p, r) } else { (p - r).abs() };
                let tol = 1e-12 * (1.0 + k.unsigned_abs() as f64);
                let del = delta.at_f64(w, k);
                if d > del + tol {
                    verdict = Membership::Out;
                } else if d > del - tol && verdict == Membership::In {
                    verdict = Membership::Boundary;
                }
            };
            let (mut p, mut r) = (*a, *b);
            for k in 0..=window.end.max(-1) {
                if k >= window.start {
                    check(k, p, r);
                }
                let f = sys.map_at(w, k);
                p = apply_real(f, p);
                r = apply_real(f, r);
            }
            let (mut p, mut r) = (*a, *b);
            for k in (window.start..0).rev() {
                let g = sys.map_at(w, k).inverse().ok_or(Error::NotInvertible(k))?;
                p = apply_real(g, p);
                r = apply_real(g, r);
                if k <= window.end {
                    check(k, p, r);
                }
            }
            Ok(verdict)
        }
        _ => Err(Error::Incompatible("points are not in the same fiber space".into())),
    }
}

fn apply_real(f: FiberMap, v: f64) -> f64 {
    f.apply(&FiberPoint::Real(v)).ok().and_then(|p| p.real()).unwrap_or(v)
}

/// Γ^{(window)}: the finite intersection of Bowen constraints over the window.
pub fn gamma_approx(
    sys: &FiberSystem,
    w: &BasePoint,
    x: &FiberPoint,
    delta: &RandomScalar,
    window: Window,
    params: GammaParams,
) -> Result<GammaSetApprox> {
    if window.start < 0 && !sys.invertible {
        return Err(Error::NotInvertible(window.start));
    }
    match (&sys.space, x) {
        (FiberSpace::Symbolic { .. }, FiberPoint::Symbolic(word)) => symbolic_gamma(sys, w, word, delta, window, params),
        (FiberSpace::Circle | FiberSpace::Interval, FiberPoint::Real(v)) => {
            let mut seq = real_gamma_windows(sys, w, *v, delta, window.start, window.end, params)?;
            Ok(seq.pop().expect("window is nonempty"))
        }
        _ => Err(Error::Incompatible("point does not lie in the fiber space".into())),
    }
}

/// Γ^{(n)} for `n = 1..=n_max`.
pub fn gamma_sequence(
    sys: &FiberSystem,
    w: &BasePoint,
    x: &FiberPoint,
    delta: &RandomScalar,
    n_max: usize,
    sided: Sided,
    params: GammaParams,
) -> Result<Vec<GammaSetApprox>> {
    if sided == Sided::TwoSided && !sys.invertible {
        return Err(Error::NotInvertible(-1));
    }
    match x {
        FiberPoint::Real(v) if !sys.space.is_symbolic() => {
            let fwd = real_pass(sys, w, *v, delta, 0, n_max as i64 - 1, false, params)?;
            match sided {
                Sided::Forward => Ok(fwd
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| s.into_gamma(Window::ball(i + 1, sided), sys))
                    .collect()),
                Sided::TwoSided => {
                    let bwd = real_pass(sys, w, *v, delta, -(n_max as i64 - 1), -1, true, params)?;
                    Ok(fwd
                        .into_iter()
                        .enumerate()
                        .map(|(i, f)| {
                            // backward constraints at times -1..-i
                            let set = if i == 0 { f } else { f.intersect(&bwd[i - 1]) };
                            set.into_gamma(Window::ball(i + 1, sided), sys)
                        })
                        .collect())
                }
            }
        }
        _ => (1..=n_max)
            .map(|n| gamma_approx(sys, w, x, delta, Window::ball(n, sided), params))
            .collect(),
    }
}

/// Γ sets over the windows `[start, k]`, `k = start..=end`, for `start ≥ 0`.
pub fn gamma_windows(
    sys: &FiberSystem,
    w: &BasePoint,
    x: &FiberPoint,
    delta: &RandomScalar,
    start: usize,
    end: usize,
    params: GammaParams,
) -> Result<Vec<GammaSetApprox>> {
    match x {
        FiberPoint::Real(v) if !sys.space.is_symbolic() => {
            real_gamma_windows(sys, w, *v, delta, start as i64, end as i64, params)
        }
        _ => (start..=end)
            .map(|k| gamma_approx(sys, w, x, delta, Window { start: start as i64, end: k as i64 }, params))
            .collect(),
    }
}

/// Certified bracket for μ_w(Γ).
pub fn gamma_mass(mu: &FiberMeasure, g: &GammaSetApprox) -> Result<(Mass, Mass)> {
    match (&g.cells, mu) {
        (GammaCells::Cylinders { inside, boundary, .. }, FiberMeasure::Cylinder(_)) => {
            let mut lo = Q::zero();
            for c in inside {
                lo += mu.cylinder_mass(c)?;
            }
            let mut hi = lo.clone();
            for c in boundary {
                hi += mu.cylinder_mass(c)?;
            }
            Ok((Mass::Exact(lo), Mass::Exact(hi)))
        }
        (GammaCells::Cylinders { inside, boundary, .. }, FiberMeasure::Atomic(atoms)) => {
            let (mut lo, mut hi) = (0.0, 0.0);
            for a in atoms {
                let Some(word) = a.point.word() else {
                    return Err(Error::Incompatible("real atom on a symbolic fiber".into()));
                };
                let hit = |c: &Vec<Symbol>| word.take(c.len()) == *c;
                if inside.iter().any(hit) {
                    lo += a.weight;
                    hi += a.weight;
                } else if boundary.iter().any(hit) {
                    hi += a.weight;
                }
            }
            Ok((Mass::Approx(lo), Mass::Approx(hi)))
        }
        (GammaCells::Arcs { arcs, err, .. }, FiberMeasure::Grid(grid)) => {
            let (inner, outer) = shrink_grow(arcs, *err);
            Ok((Mass::Approx(grid.mass_of(&inner)), Mass::Approx(grid.mass_of(&outer))))
        }
        (GammaCells::Arcs { arcs, err, .. }, FiberMeasure::Atomic(atoms)) => {
            let (inner, outer) = shrink_grow(arcs, *err);
            let within = |v: f64, set: &[(f64, f64)]| set.iter().any(|&(a, b)| a <= v && v <= b);
            let (mut lo, mut hi) = (0.0, 0.0);
            for a in atoms {
                let v = a.point.real().ok_or_else(|| Error::Incompatible("symbolic atom on a real fiber".into()))?;
                if within(v, &inner) {
                    lo += a.weight;
                }
                if within(v, &outer) || within(v + 1.0, &outer) {
                    hi += a.weight;
                }
            }
            Ok((Mass::Approx(lo), Mass::Approx(hi)))
        }
        _ => Err(Error::Incompatible("measure representation does not match the Γ cells".into())),
    }
}

fn shrink_grow(arcs: &[(f64, f64)], err: f64) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let inner = arcs
        .iter()
        .filter_map(|&(a, b)| {
            let (a2, b2) = (if a <= 0.0 { a } else { a + err }, if b >= 1.0 { b } else { b - err });
            (a2 < b2).then_some((a2, b2))
        })
        .collect();
    let mut outer: Vec<(f64, f64)> = Vec::new();
    for &(a, b) in arcs {
        let (a2, b2) = ((a - err).max(0.0), (b + err).min(1.0));
        match outer.last_mut() {
            Some(last) if last.1 >= a2 => last.1 = last.1.max(b2),
            _ => outer.push((a2, b2)),
        }
    }
    (inner, outer)
}

// ---------------------------------------------------------------------------------------------
// symbolic fibers

struct SymbolicSearch {
    alphabet: Vec<u32>,
    /// t[m][s-1] = |1/x_m - 1/s|
    terms: Vec<Vec<Q>>,
    /// scaled_tail[j][m] = 2^j · sup Σ_{i ≥ max(m,j)} 2^{-i} |1/x_i - 1/y_i|
    scaled_tail: Vec<Vec<Q>>,
    delta: Vec<Q>,
    start: usize,
    end: usize,
    leaf_len: usize,
    budget: usize,
    inside: Vec<Vec<Symbol>>,
    boundary: Vec<Vec<Symbol>>,
    truncated: bool,
}

fn symbolic_gamma(
    sys: &FiberSystem,
    w: &BasePoint,
    x: &SymbolWord,
    delta: &RandomScalar,
    window: Window,
    params: GammaParams,
) -> Result<GammaSetApprox> {
    let FiberSpace::Symbolic { alphabet } = &sys.space else { unreachable!() };
    if window.start < 0 {
        return Err(Error::NotInvertible(window.start));
    }
    let start = window.start as usize;
    let end = window.end as usize;
    let leaf_len = end + 1 + params.buffer;
    let horizon = leaf_len + 48;
    let ks: Vec<u32> = (0..horizon).map(|i| alphabet.at(w, i as i64)).collect();
    let kmax = alphabet.max();
    let terms: Vec<Vec<Q>> = (0..leaf_len)
        .map(|m| {
            let xm = x.get(m) as i64;
            (1..=ks[m] as i64).map(|s| q((xm - s).abs(), xm * s)).collect()
        })
        .collect();
    // sup_y |1/x_i - 1/y| over 1 ≤ y ≤ k_i
    let sup_term = |i: usize| {
        let xi = x.get(i) as i64;
        let k = ks[i] as i64;
        std::cmp::max(q(xi - 1, xi), q(k - xi, xi * k))
    };
    let mut tail = vec![Q::zero(); horizon + 1];
    // remainder beyond the horizon: Σ_{i ≥ H} 2^{-i} (1 - 1/kmax) ≤ 2^{-(H-1)}
    tail[horizon] = pow2_neg(horizon as u32 - 1) * q(kmax as i64 - 1, kmax as i64);
    for i in (0..horizon).rev() {
        tail[i] = &tail[i + 1] + sup_term(i) * pow2_neg(i as u32);
    }
    let scaled_tail = (0..=end)
        .map(|j| (0..=leaf_len).map(|m| &tail[m.max(j)] * pow2(j as u32)).collect())
        .collect();
    let deltas = (0..=end).map(|j| delta.at(w, j as i64)).collect();
    let mut search = SymbolicSearch {
        alphabet: ks,
        terms,
        scaled_tail,
        delta: deltas,
        start,
        end,
        leaf_len,
        budget: params.budget,
        inside: Vec::new(),
        boundary: Vec::new(),
        truncated: false,
    };
    let mut word = Vec::with_capacity(leaf_len);
    let mut partial = vec![Q::zero(); end + 1];
    search.visit(&mut word, &mut partial);
    Ok(GammaSetApprox {
        window,
        cells: GammaCells::Cylinders { inside: search.inside, boundary: search.boundary, leaf_len },
        truncated: search.truncated,
    })
}

impl SymbolicSearch {
    /// `partial[j] = 2^j Σ_{j ≤ i < m} 2^{-i} t_i` for the current word of length `m`.
    fn visit(&mut self, word: &mut Vec<Symbol>, partial: &mut [Q]) {
        let m = word.len();
        let certain = (self.start..=self.end).all(|j| &partial[j] + &self.scaled_tail[j][m] <= self.delta[j]);
        if certain {
            self.inside.push(word.clone());
            return;
        }
        if m == self.leaf_len {
            self.boundary.push(word.clone());
            return;
        }
        if self.inside.len() + self.boundary.len() >= self.budget {
            self.truncated = true;
            self.boundary.push(word.clone());
            return;
        }
        for s in 1..=self.alphabet[m] {
            let t = &self.terms[m][s as usize - 1];
            let mut next = partial.to_vec();
            let mut out = false;
            if !t.is_zero() {
                for j in 0..=self.end.min(m) {
                    // 2^{j-m} t_m
                    next[j] += t * pow2_neg((m - j) as u32);
                    if j >= self.start && next[j] > self.delta[j] {
                        out = true;
                        break;
                    }
                }
            }
            if out {
                continue;
            }
            word.push(s);
            self.visit(word, &mut next);
            word.pop();
        }
    }
}

// ---------------------------------------------------------------------------------------------
// circle and interval fibers

/// A domain interval of E_w on which the lifted orbit map is `y ↦ slope·y + shift`.
#[derive(Clone, Copy, Debug)]
struct Piece {
    lo: f64,
    hi: f64,
    slope: f64,
    shift: f64,
    /// bound on the accumulated error of `shift`
    shift_err: f64,
}

#[derive(Clone, Debug)]
struct ArcSet {
    arcs: Vec<(f64, f64)>,
    err: f64,
    truncated: bool,
}

impl ArcSet {
    fn from_pieces(pieces: &[Piece], err: f64, truncated: bool) -> ArcSet {
        let mut arcs: Vec<(f64, f64)> = pieces.iter().map(|p| (p.lo, p.hi)).collect();
        arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in arcs {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        ArcSet { arcs: merged, err, truncated }
    }

    fn intersect(&self, other: &ArcSet) -> ArcSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.arcs.len() && j < other.arcs.len() {
            let (a1, b1) = self.arcs[i];
            let (a2, b2) = other.arcs[j];
            let (a, b) = (a1.max(a2), b1.min(b2));
            if a <= b {
                out.push((a, b));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        ArcSet { arcs: out, err: self.err.max(other.err), truncated: self.truncated || other.truncated }
    }

    fn into_gamma(self, window: Window, sys: &FiberSystem) -> GammaSetApprox {
        GammaSetApprox {
            window,
            cells: GammaCells::Arcs { arcs: self.arcs, err: self.err, circle: sys.space.is_circle() },
            truncated: self.truncated,
        }
    }
}

const EPS: f64 = f64::EPSILON;

/// Γ sets for the windows `[start, k]`, `k = start..=end` (or `k = max(start,0)..=end`).
fn real_gamma_windows(
    sys: &FiberSystem,
    w: &BasePoint,
    x: f64,
    delta: &RandomScalar,
    start: i64,
    end: i64,
    params: GammaParams,
) -> Result<Vec<GammaSetApprox>> {
    if end < 0 {
        let bwd = real_pass(sys, w, x, delta, start, end, true, params)?;
        return Ok(vec![bwd.last().cloned().unwrap().into_gamma(Window { start, end }, sys)]);
    }
    let fwd = real_pass(sys, w, x, delta, start.max(0), end, false, params)?;
    let back = if start < 0 { real_pass(sys, w, x, delta, start, -1, true, params)?.pop() } else { None };
    let first = start.max(0);
    Ok(fwd
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let set = match &back {
                Some(b) => f.intersect(b),
                None => f,
            };
            set.into_gamma(Window { start, end: first + i as i64 }, sys)
        })
        .collect())
}

/// One directional pass. Forward: constraints at times `lo..=hi` (`lo ≥ 0`), one set per time
/// from `lo`; unconstrained steps before `lo` are just iterated. Backward: constraints at times
/// `-1, -2, …, lo` with `hi = -1`, one set per time.
#[allow(clippy::too_many_arguments)]
fn real_pass(
    sys: &FiberSystem,
    w: &BasePoint,
    x: f64,
    delta: &RandomScalar,
    lo: i64,
    hi: i64,
    backward: bool,
    params: GammaParams,
) -> Result<Vec<ArcSet>> {
    let circle = sys.space.is_circle();
    let mut pieces = vec![Piece { lo: 0.0, hi: 1.0, slope: 1.0, shift: 0.0, shift_err: 0.0 }];
    let mut p = x;
    let mut p_err = 0.0;
    let mut err: f64 = 0.0;
    let mut truncated = false;
    let mut out = Vec::new();
    let times: Vec<i64> = if backward { (lo..=hi).rev().collect() } else { (0..=hi).collect() };
    for k in times {
        if backward {
            let g = sys.map_at(w, k).inverse().ok_or(Error::NotInvertible(k))?;
            (pieces, truncated) = apply_map(g, pieces, circle, params.budget, truncated);
            let (np, ne) = step_point(g, p, p_err, circle);
            p = np;
            p_err = ne;
        }
        if k >= lo || backward {
            let del = delta.at_f64(w, k);
            let del_err = del * EPS;
            let mut next = Vec::with_capacity(pieces.len());
            for piece in &pieces {
                constrain(piece, p, p_err + del_err, del, circle, &mut next, &mut err);
            }
            pieces = next;
            out.push(ArcSet::from_pieces(&pieces, err, truncated));
        }
        if !backward {
            let f = sys.map_at(w, k);
            (pieces, truncated) = apply_map(f, pieces, circle, params.budget, truncated);
            let (np, ne) = step_point(f, p, p_err, circle);
            p = np;
            p_err = ne;
        }
    }
    Ok(out)
}

fn step_point(f: FiberMap, p: f64, p_err: f64, circle: bool) -> (f64, f64) {
    let branches = f.branches();
    let b = branches.iter().find(|b| p <= b.hi).copied().unwrap_or(branches[branches.len() - 1]);
    let raw = b.slope * p + b.intercept;
    let v = if circle { frac(raw) } else { raw.clamp(0.0, 1.0) };
    (v, b.slope * p_err + 4.0 * EPS * (raw.abs() + 1.0))
}

/// Keeps the part of `piece` whose image is within `del` of `p` (mod 1 on the circle).
fn constrain(piece: &Piece, p: f64, target_err: f64, del: f64, circle: bool, out: &mut Vec<Piece>, err: &mut f64) {
    if circle && del >= 0.5 {
        out.push(*piece);
        return;
    }
    let img_lo = piece.slope * piece.lo + piece.shift;
    let img_hi = piece.slope * piece.hi + piece.shift;
    let (m_lo, m_hi) = if circle {
        ((img_lo - p - del).floor() as i64 - 1, (img_hi - p + del).ceil() as i64 + 1)
    } else {
        (0, 0)
    };
    for m in m_lo..=m_hi {
        let a = p - del + m as f64;
        let b = p + del + m as f64;
        let (ia, ib) = (a.max(img_lo), b.min(img_hi));
        if ia > ib {
            continue;
        }
        let to_domain = |t: f64| {
            if t == img_lo {
                piece.lo
            } else if t == img_hi {
                piece.hi
            } else {
                ((t - piece.shift) / piece.slope).clamp(piece.lo, piece.hi)
            }
        };
        let (da, db) = (to_domain(ia), to_domain(ib));
        let e = (target_err + piece.shift_err + 4.0 * EPS * (a.abs() + b.abs() + piece.shift.abs() + 1.0)) / piece.slope;
        *err = err.max(e);
        out.push(Piece {
            lo: da,
            hi: db,
            slope: piece.slope,
            shift: piece.shift - m as f64,
            shift_err: piece.shift_err + EPS * (piece.shift.abs() + m.unsigned_abs() as f64),
        });
    }
}

fn apply_map(f: FiberMap, pieces: Vec<Piece>, circle: bool, budget: usize, truncated: bool) -> (Vec<Piece>, bool) {
    let branches = f.branches();
    let mut out = Vec::with_capacity(pieces.len());
    for piece in pieces {
        if circle {
            let b = branches[0];
            out.push(Piece {
                slope: piece.slope * b.slope,
                shift: b.slope * piece.shift + b.intercept,
                shift_err: b.slope * piece.shift_err + 4.0 * EPS * (b.slope * piece.shift.abs() + b.intercept.abs() + 1.0),
                ..piece
            });
            continue;
        }
        // interval maps: split where the image crosses a breakpoint
        for b in &branches {
            let img_lo = piece.slope * piece.lo + piece.shift;
            let img_hi = piece.slope * piece.hi + piece.shift;
            let (ia, ib) = (img_lo.max(b.lo), img_hi.min(b.hi));
            if ia > ib || (ia == ib && branches.len() > 1 && ia == b.hi && img_hi > b.hi) {
                continue;
            }
            let to_domain = |t: f64| {
                if t == img_lo {
                    piece.lo
                } else if t == img_hi {
                    piece.hi
                } else {
                    ((t - piece.shift) / piece.slope).clamp(piece.lo, piece.hi)
                }
            };
            out.push(Piece {
                lo: to_domain(ia),
                hi: to_domain(ib),
                slope: piece.slope * b.slope,
                shift: b.slope * piece.shift + b.intercept,
                shift_err: b.slope * piece.shift_err + 4.0 * EPS * (b.slope * piece.shift.abs() + b.intercept.abs() + 1.0),
            });
        }
    }
    if out.len() > budget {
        out.truncate(budget);
        return (out, true);
    }
    (out, truncated)
}

/// Upper bound on the mass of a union of arcs grown by `err`, for a quick whole-fiber check.
pub fn arc_total_length(g: &GammaSetApprox) -> f64 {
    match &g.cells {
        GammaCells::Arcs { arcs, .. } => arcs.iter().map(|a| a.1 - a.0).sum(),
        GammaCells::Cylinders { .. } => f64::NAN,
    }
}
