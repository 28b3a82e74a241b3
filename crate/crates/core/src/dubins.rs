//! Shortest curvature-bounded forward paths between oriented configurations.
//!
//! Each candidate word is solved in closed form in a frame normalised by the
//! turning radius; the shortest feasible word wins, ties going to the earlier
//! word in [`Word::ALL`].

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Point;

/// Tolerance used for length comparisons and angle snapping.
pub const ANGLE_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum DubinsError {
    #[error("turning radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("sampling step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

// mod 2π with near-full turns snapped to zero
fn mod2pi(theta: f64) -> f64 {
    let t = normalize_angle(theta);
    if TAU - t < ANGLE_EPS {
        0.0
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub x: f64,
    pub y: f64,
    /// Heading in radians, `[0, 2π)`.
    pub theta: f64,
}

impl Configuration {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Word {
    LSL,
    RSR,
    LSR,
    RSL,
    RLR,
    LRL,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Left,
    Straight,
    Right,
}

impl Word {
    /// Tie-break order.
    pub const ALL: [Word; 6] = [
        Word::LSL,
        Word::RSR,
        Word::LSR,
        Word::RSL,
        Word::RLR,
        Word::LRL,
    ];

    pub fn kinds(self) -> [SegmentKind; 3] {
        use SegmentKind::{Left as L, Right as R, Straight as S};
        match self {
            Word::LSL => [L, S, L],
            Word::RSR => [R, S, R],
            Word::LSR => [L, S, R],
            Word::RSL => [R, S, L],
            Word::RLR => [R, L, R],
            Word::LRL => [L, R, L],
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A geometric primitive of a path, in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line {
        start: Point,
        end: Point,
        heading: f64,
    },
    Arc {
        center: Point,
        radius: f64,
        start: Point,
        end: Point,
        start_heading: f64,
        /// Signed turn angle, positive counter-clockwise.
        sweep: f64,
    },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match self {
            Segment::Line { start, end, .. } => start.distance(end),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn start(&self) -> Point {
        match *self {
            Segment::Line { start, .. } | Segment::Arc { start, .. } => start,
        }
    }

    pub fn end(&self) -> Point {
        match *self {
            Segment::Line { end, .. } | Segment::Arc { end, .. } => end,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DubinsPath {
    pub start: Configuration,
    pub end: Configuration,
    pub radius: f64,
    pub word: Word,
    /// Segment parameters in the radius-normalised frame (radians for turns).
    pub params: [f64; 3],
}

impl DubinsPath {
    /// Segment lengths in meters.
    pub fn segment_lengths(&self) -> [f64; 3] {
        self.params.map(|p| p * self.radius)
    }

    pub fn total_length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Configuration after travelling `dist` meters along the path (clamped).
    pub fn config_at(&self, dist: f64) -> Configuration {
        let mut q = self.start;
        let mut left = dist.clamp(0.0, self.total_length());
        for (kind, len) in self.word.kinds().into_iter().zip(self.segment_lengths()) {
            let step = left.min(len);
            q = advance(q, kind, step, self.radius);
            left -= step;
            if left <= 0.0 {
                break;
            }
        }
        q
    }

    /// Samples at most `step` apart along the path, both endpoints included.
    pub fn sample(&self, step: f64) -> Result<Vec<Configuration>, DubinsError> {
        if !(step.is_finite() && step > 0.0) {
            return Err(DubinsError::InvalidStep(step));
        }
        let total = self.total_length();
        let n = ((total / step) - ANGLE_EPS).ceil().max(1.0) as usize;
        Ok((0..=n)
            .map(|i| self.config_at(total * i as f64 / n as f64))
            .collect())
    }

    /// Non-degenerate line and arc primitives making up the path.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(3);
        let mut q = self.start;
        for (kind, len) in self.word.kinds().into_iter().zip(self.segment_lengths()) {
            if len <= ANGLE_EPS * self.radius.max(1.0) {
                continue;
            }
            let next = advance(q, kind, len, self.radius);
            out.push(match kind {
                SegmentKind::Straight => Segment::Line {
                    start: q.position(),
                    end: next.position(),
                    heading: q.theta,
                },
                SegmentKind::Left | SegmentKind::Right => {
                    let sign = if kind == SegmentKind::Left { 1.0 } else { -1.0 };
                    Segment::Arc {
                        center: turn_center(q, kind, self.radius),
                        radius: self.radius,
                        start: q.position(),
                        end: next.position(),
                        start_heading: q.theta,
                        sweep: sign * len / self.radius,
                    }
                }
            });
            q = next;
        }
        out
    }
}

fn turn_center(q: Configuration, kind: SegmentKind, r: f64) -> Point {
    let (s, c) = q.theta.sin_cos();
    match kind {
        SegmentKind::Left => Point::new(q.x - r * s, q.y + r * c),
        SegmentKind::Right => Point::new(q.x + r * s, q.y - r * c),
        SegmentKind::Straight => q.position(),
    }
}

fn advance(q: Configuration, kind: SegmentKind, len: f64, r: f64) -> Configuration {
    match kind {
        SegmentKind::Straight => {
            let (s, c) = q.theta.sin_cos();
            Configuration {
                x: q.x + len * c,
                y: q.y + len * s,
                theta: q.theta,
            }
        }
        SegmentKind::Left => {
            let center = turn_center(q, kind, r);
            let th = q.theta + len / r;
            Configuration::new(center.x + r * th.sin(), center.y - r * th.cos(), th)
        }
        SegmentKind::Right => {
            let center = turn_center(q, kind, r);
            let th = q.theta - len / r;
            Configuration::new(center.x - r * th.sin(), center.y + r * th.cos(), th)
        }
    }
}

struct Frame {
    alpha: f64,
    beta: f64,
    d: f64,
    sa: f64,
    sb: f64,
    ca: f64,
    cb: f64,
    c_ab: f64,
}

impl Frame {
    fn new(q0: Configuration, q1: Configuration, r: f64) -> Self {
        let dx = q1.x - q0.x;
        let dy = q1.y - q0.y;
        let d = dx.hypot(dy) / r;
        let theta = if d > 0.0 { mod2pi(dy.atan2(dx)) } else { 0.0 };
        let alpha = mod2pi(q0.theta - theta);
        let beta = mod2pi(q1.theta - theta);
        let (sa, ca) = alpha.sin_cos();
        let (sb, cb) = beta.sin_cos();
        Self {
            alpha,
            beta,
            d,
            sa,
            sb,
            ca,
            cb,
            c_ab: (alpha - beta).cos(),
        }
    }

    fn solve(&self, word: Word) -> Option<[f64; 3]> {
        let Frame {
            alpha,
            beta,
            d,
            sa,
            sb,
            ca,
            cb,
            c_ab,
        } = *self;
        match word {
            Word::LSL => {
                let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb);
                if p_sq < -ANGLE_EPS {
                    return None;
                }
                if p_sq < ANGLE_EPS * ANGLE_EPS {
                    // coincident turning circles
                    return Some([mod2pi(beta - alpha), 0.0, 0.0]);
                }
                let tmp = (cb - ca).atan2(d + sa - sb);
                Some([mod2pi(tmp - alpha), p_sq.sqrt(), mod2pi(beta - tmp)])
            }
            Word::RSR => {
                let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa);
                if p_sq < -ANGLE_EPS {
                    return None;
                }
                if p_sq < ANGLE_EPS * ANGLE_EPS {
                    return Some([mod2pi(alpha - beta), 0.0, 0.0]);
                }
                let tmp = (ca - cb).atan2(d - sa + sb);
                Some([mod2pi(alpha - tmp), p_sq.sqrt(), mod2pi(tmp - beta)])
            }
            Word::LSR => {
                let p_sq = -2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb);
                if p_sq < 0.0 {
                    return None;
                }
                let p = p_sq.sqrt();
                let tmp = (-ca - cb).atan2(d + sa + sb) - (-2.0f64).atan2(p);
                Some([mod2pi(tmp - alpha), p, mod2pi(tmp - beta)])
            }
            Word::RSL => {
                let p_sq = -2.0 + d * d + 2.0 * c_ab - 2.0 * d * (sa + sb);
                if p_sq < 0.0 {
                    return None;
                }
                let p = p_sq.sqrt();
                let tmp = (ca + cb).atan2(d - sa - sb) - 2.0f64.atan2(p);
                Some([mod2pi(alpha - tmp), p, mod2pi(beta - tmp)])
            }
            Word::RLR => {
                let tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0;
                if tmp.abs() > 1.0 {
                    return None;
                }
                let phi = (ca - cb).atan2(d - sa + sb);
                let p = mod2pi(TAU - tmp.acos());
                let t = mod2pi(alpha - phi + mod2pi(p / 2.0));
                Some([t, p, mod2pi(alpha - beta - t + mod2pi(p))])
            }
            Word::LRL => {
                let tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0;
                if tmp.abs() > 1.0 {
                    return None;
                }
                let phi = (ca - cb).atan2(d + sa - sb);
                let p = mod2pi(TAU - tmp.acos());
                let t = mod2pi(-alpha - phi + p / 2.0);
                Some([t, p, mod2pi(beta - alpha - t + mod2pi(p))])
            }
        }
    }
}

fn check_radius(r: f64) -> Result<(), DubinsError> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(DubinsError::InvalidRadius(r))
    }
}

/// The path of one specific word, if that word is feasible.
pub fn dubins_word(
    q0: Configuration,
    q1: Configuration,
    r: f64,
    word: Word,
) -> Result<Option<DubinsPath>, DubinsError> {
    check_radius(r)?;
    let q0 = Configuration::new(q0.x, q0.y, q0.theta);
    let q1 = Configuration::new(q1.x, q1.y, q1.theta);
    Ok(Frame::new(q0, q1, r).solve(word).map(|params| DubinsPath {
        start: q0,
        end: q1,
        radius: r,
        word,
        params,
    }))
}

/// Shortest forward Dubins path from `q0` to `q1` with turning radius `r`.
pub fn dubins_shortest(
    q0: Configuration,
    q1: Configuration,
    r: f64,
) -> Result<DubinsPath, DubinsError> {
    check_radius(r)?;
    let q0 = Configuration::new(q0.x, q0.y, q0.theta);
    let q1 = Configuration::new(q1.x, q1.y, q1.theta);
    let frame = Frame::new(q0, q1, r);
    let mut best: Option<([f64; 3], Word, f64)> = None;
    for word in Word::ALL {
        if let Some(params) = frame.solve(word) {
            let len: f64 = params.iter().sum();
            if best.is_none_or(|(_, _, b)| len < b - ANGLE_EPS) {
                best = Some((params, word, len));
            }
        }
    }
    // LSL and RSR are always feasible
    let (params, word, _) = best.expect("no feasible Dubins word");
    Ok(DubinsPath {
        start: q0,
        end: q1,
        radius: r,
        word,
        params,
    })
}

/// Free-function form of [`DubinsPath::sample`].
pub fn sample_path(path: &DubinsPath, step: f64) -> Result<Vec<Configuration>, DubinsError> {
    path.sample(step)
}

/// Smallest absolute difference between two headings.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TAU - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn q(x: f64, y: f64, t: f64) -> Configuration {
        Configuration::new(x, y, t)
    }

    #[test]
    fn straight_line() {
        let p = dubins_shortest(q(0.0, 0.0, 0.0), q(10.0, 0.0, 0.0), 1.0).unwrap();
        assert!((p.total_length() - 10.0).abs() < 1e-12);
        assert_eq!(p.word, Word::LSL);
        assert_eq!(p.params[0], 0.0);
        assert_eq!(p.params[2], 0.0);
    }

    #[test]
    fn half_turn_left() {
        let p = dubins_shortest(q(0.0, 0.0, 0.0), q(0.0, 2.0, PI), 1.0).unwrap();
        assert!((p.total_length() - PI).abs() < 1e-9);
        let end = p.config_at(p.total_length());
        assert!(end.x.abs() < 1e-9 && (end.y - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_radius_and_step() {
        assert_eq!(
            dubins_shortest(q(0.0, 0.0, 0.0), q(1.0, 0.0, 0.0), 0.0),
            Err(DubinsError::InvalidRadius(0.0))
        );
        let p = dubins_shortest(q(0.0, 0.0, 0.0), q(1.0, 0.0, 0.0), 1.0).unwrap();
        assert_eq!(p.sample(0.0), Err(DubinsError::InvalidStep(0.0)));
        assert!(p.sample(-1.0).is_err());
    }

    #[test]
    fn straight_samples() {
        let p = dubins_shortest(q(0.0, 0.0, 0.0), q(10.0, 0.0, 0.0), 1.0).unwrap();
        let s = sample_path(&p, 1.0).unwrap();
        assert_eq!(s.len(), 11);
        for (i, c) in s.iter().enumerate() {
            assert!((c.x - i as f64).abs() < 1e-12 && c.y.abs() < 1e-12);
        }
    }

    #[test]
    fn half_turn_samples_quarter_points() {
        let p = dubins_shortest(q(0.0, 0.0, 0.0), q(0.0, 2.0, PI), 1.0).unwrap();
        let s = p.sample(PI / 2.0).unwrap();
        assert_eq!(s.len(), 3);
        let expect = [(0.0, 0.0), (1.0, 1.0), (0.0, 2.0)];
        for (c, (x, y)) in s.iter().zip(expect) {
            assert!((c.x - x).abs() < 1e-9 && (c.y - y).abs() < 1e-9, "{c:?}");
        }
    }

    #[test]
    fn segments_are_continuous() {
        let p = dubins_shortest(q(0.0, 0.0, 1.0), q(3.0, -4.0, 4.0), 2.0).unwrap();
        let segs = p.segments();
        assert!(!segs.is_empty());
        assert!(segs[0].start().distance(&p.start.position()) < 1e-9);
        for w in segs.windows(2) {
            assert!(w[0].end().distance(&w[1].start()) < 1e-9);
        }
        let total: f64 = segs.iter().map(Segment::length).sum();
        assert!((total - p.total_length()).abs() < 1e-9);
        assert!(segs.last().unwrap().end().distance(&p.end.position()) < 1e-6);
    }

    #[test]
    fn normalize() {
        assert_eq!(normalize_angle(-PI / 2.0), 3.0 * PI / 2.0);
        assert_eq!(normalize_angle(TAU), 0.0);
        assert!(angle_diff(0.1, TAU - 0.1) < 0.2 + 1e-12);
    }
}
