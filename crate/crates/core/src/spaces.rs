//! Deterministic samples of the earring, gasket and carpet pre-fractals and
//! of a few standard fixtures.
//!
//! The pre-fractal pieces of the gasket and carpet are sampled filled, on a
//! lattice whose spacing divides the smallest side an odd number of times;
//! the deepest earring disc is filled with concentric rings. Filled pieces are
//! what make the remaining holes the only loops at the reference scales.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::FiniteMetricSpace;

pub const MAX_EARRING_STAGE: usize = 4;
pub const MAX_GASKET_LEVEL: usize = 3;
pub const MAX_CARPET_LEVEL: usize = 2;

/// Relative offsets applied to the reference scales in towers. At an exact reference
/// scale a deeper earring circle is at distance exactly `ε` from the sampled
/// point that cones it off, and a deeper gasket hole has a medial triangle of
/// side exactly `ε`; nudging the scale puts both on the intended side.
pub const EARRING_OFFSET: f64 = 1.0 + 1.0 / 64.0;
pub const GASKET_OFFSET: f64 = 1.0 - 1.0 / 64.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("density must be positive, got {0}")]
    Density(f64),
    #[error("{family} level {level} exceeds the supported maximum {max}")]
    LevelTooDeep { family: &'static str, level: usize, max: usize },
    #[error("density {density} too coarse: the smallest feature is {feature}, density must be at most {limit}", limit = feature / 4.0)]
    TooCoarse { density: f64, feature: f64 },
    #[error("{0} has no expected rank")]
    NoExpectedRank(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("{0} needs at least one petal or oscillation")]
    Degenerate(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Circle { radius: f64 },
    WedgeOfCircles { petals: usize },
    HawaiianStage { level: usize },
    GasketLevel { level: usize },
    CarpetLevel { level: usize },
    SineCurve { oscillations: usize },
    UnitSquareCorners,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Circle { radius } => write!(f, "circle(radius {radius})"),
            Family::WedgeOfCircles { petals } => write!(f, "wedge({petals})"),
            Family::HawaiianStage { level } => write!(f, "earring({level})"),
            Family::GasketLevel { level } => write!(f, "gasket({level})"),
            Family::CarpetLevel { level } => write!(f, "carpet({level})"),
            Family::SineCurve { oscillations } => write!(f, "sine({oscillations})"),
            Family::UnitSquareCorners => f.write_str("square"),
        }
    }
}

impl Family {
    /// Family by command-line name; `level` is the stage, petal count or
    /// oscillation count as appropriate.
    pub fn from_name(name: &str, level: usize) -> Result<Family, SampleError> {
        Ok(match name {
            "circle" => Family::Circle { radius: 0.5 },
            "wedge" => Family::WedgeOfCircles { petals: level },
            "earring" | "hawaiian" => Family::HawaiianStage { level },
            "gasket" => Family::GasketLevel { level },
            "carpet" => Family::CarpetLevel { level },
            "sine" => Family::SineCurve { oscillations: level },
            "square" => Family::UnitSquareCorners,
            other => return Err(SampleError::UnknownFamily(other.to_string())),
        })
    }

    /// The rank of the free deck group at the reference scale of this level.
    pub fn expected_rank(&self) -> Result<usize, SampleError> {
        match *self {
            Family::HawaiianStage { level } => Ok(level),
            Family::GasketLevel { level } => Ok((0..level as u32).map(|k| 3usize.pow(k)).sum()),
            Family::CarpetLevel { level } => Ok((0..level as u32).map(|k| 8usize.pow(k)).sum()),
            other => Err(SampleError::NoExpectedRank(other.to_string())),
        }
    }

    /// `1/2^{n+1}` for the earring and gasket, `3^{-n}/2` for the carpet.
    pub fn reference_scale(&self) -> Option<f64> {
        match *self {
            Family::HawaiianStage { level } | Family::GasketLevel { level } => Some(0.5f64.powi(level as i32 + 1)),
            Family::CarpetLevel { level } => Some(0.5 / 3f64.powi(level as i32)),
            _ => None,
        }
    }

    /// Paper scales for levels `0..=level` with the tower offsets applied,
    /// coarsest first.
    pub fn reference_schedule(&self) -> Option<Vec<f64>> {
        let (level, factor) = match *self {
            Family::HawaiianStage { level } => (level, EARRING_OFFSET),
            Family::GasketLevel { level } => (level, GASKET_OFFSET),
            Family::CarpetLevel { level } => (level, 1.0),
            _ => return None,
        };
        Some((0..=level).map(|k| self.with_level(k).reference_scale().unwrap() * factor).collect())
    }

    fn with_level(&self, k: usize) -> Family {
        match *self {
            Family::HawaiianStage { .. } => Family::HawaiianStage { level: k },
            Family::GasketLevel { .. } => Family::GasketLevel { level: k },
            Family::CarpetLevel { .. } => Family::CarpetLevel { level: k },
            other => other,
        }
    }

    /// Size of the smallest feature a sample must resolve.
    pub fn smallest_feature(&self) -> f64 {
        match *self {
            Family::Circle { radius } => radius,
            Family::WedgeOfCircles { petals } => 1.0 / petals.max(1) as f64,
            Family::SineCurve { oscillations } => sine_left_end(oscillations),
            Family::UnitSquareCorners => f64::INFINITY,
            _ => self.reference_scale().unwrap(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub family: Family,
    /// Largest allowed spacing between consecutive samples along a piece.
    pub density: f64,
}

impl SamplerSpec {
    pub fn new(family: Family, density: f64) -> Self {
        SamplerSpec { family, density }
    }

    /// The coarsest density the reference scale tolerates, `ε_n / 4`, capped at 1
    /// for families without a small feature.
    pub fn at_reference_density(family: Family) -> Self {
        SamplerSpec { family, density: (family.smallest_feature() / 4.0).min(1.0) }
    }
}

pub fn sample(spec: &SamplerSpec) -> Result<FiniteMetricSpace, SampleError> {
    let h = spec.density;
    if !(h > 0.0 && h.is_finite()) {
        return Err(SampleError::Density(h));
    }
    let check_level = |family, level, max| {
        if level > max {
            Err(SampleError::LevelTooDeep { family, level, max })
        } else {
            Ok(())
        }
    };
    match spec.family {
        Family::HawaiianStage { level } => check_level("earring", level, MAX_EARRING_STAGE)?,
        Family::GasketLevel { level } => check_level("gasket", level, MAX_GASKET_LEVEL)?,
        Family::CarpetLevel { level } => check_level("carpet", level, MAX_CARPET_LEVEL)?,
        Family::WedgeOfCircles { petals: 0 } => return Err(SampleError::Degenerate("wedge")),
        Family::SineCurve { oscillations: 0 } => return Err(SampleError::Degenerate("sine curve")),
        _ => {}
    }
    let feature = spec.family.smallest_feature();
    if h > feature / 4.0 {
        return Err(SampleError::TooCoarse { density: h, feature });
    }
    let points = match spec.family {
        Family::Circle { radius } => circle_points(circle_count(radius, h), radius),
        Family::WedgeOfCircles { petals } => wedge(petals, h),
        Family::HawaiianStage { level } => earring(level, h),
        Family::GasketLevel { level } => gasket(level, h),
        Family::CarpetLevel { level } => carpet(level, h),
        Family::SineCurve { oscillations } => sine_curve(oscillations, h),
        Family::UnitSquareCorners => square_corners(),
    };
    Ok(FiniteMetricSpace::from_points(&points, 0).expect("samplers emit valid points"))
}

/// `n` equally spaced points on the circle of the given radius centered at
/// `(0, radius)`, starting from the origin and running counterclockwise.
pub fn circle(n: usize, radius: f64) -> FiniteMetricSpace {
    FiniteMetricSpace::from_points(&circle_points(n, radius), 0).expect("valid circle")
}

/// Corners of the unit square, counterclockwise from the origin.
pub fn unit_square() -> FiniteMetricSpace {
    FiniteMetricSpace::from_points(&square_corners(), 0).expect("valid square")
}

/// Indices of a loop winding `k` times around [`circle`] (negative `k` runs
/// clockwise), sampled at every point.
pub fn circle_winding(n: usize, k: i64) -> Vec<usize> {
    let mut out = vec![0];
    for step in 1..=(k.unsigned_abs() as usize * n) {
        let i = step % n;
        out.push(if k >= 0 { i } else { (n - i) % n });
    }
    out
}

fn square_corners() -> Vec<Vec<f64>> {
    vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]
}

fn circle_count(radius: f64, h: f64) -> usize {
    4 * ((2.0 * PI * radius / (4.0 * h)).ceil() as usize).max(1)
}

/// Unit vector at `j/n` of a turn, measured from straight down, exact at the
/// quarter turns when `n` is a multiple of four.
fn turn(j: usize, n: usize) -> (f64, f64) {
    if n.is_multiple_of(4) && j.is_multiple_of(n / 4) {
        return [(0.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)][(j / (n / 4)) % 4];
    }
    let a = 2.0 * PI * j as f64 / n as f64;
    (a.sin(), -a.cos())
}

fn circle_points(n: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|j| {
            let (x, y) = turn(j, n);
            vec![radius * x, radius + radius * y]
        })
        .collect()
}

/// Circles of diameters `1, 1/2, …, 2^{1-n}` tangent to the x-axis at the
/// origin, and the filled disc of diameter `2^{-n}` tangent there too.
fn earring(level: usize, h: f64) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0, 0.0]];
    for k in 0..level {
        let r = 0.5f64.powi(k as i32 + 1);
        pts.extend(circle_points(circle_count(r, h), r).into_iter().skip(1));
    }
    let rho = 0.5f64.powi(level as i32 + 1);
    let rings = (rho / h).ceil() as usize;
    pts.push(vec![0.0, rho]);
    for i in 1..=rings {
        let ri = rho * i as f64 / rings as f64;
        let n = circle_count(ri, h);
        for j in 0..n {
            if i == rings && j == 0 {
                continue; // the origin
            }
            let (x, y) = turn(j, n);
            pts.push(vec![ri * x, rho + ri * y]);
        }
    }
    pts
}

fn odd_at_least(x: f64) -> usize {
    let m = (x.ceil() as usize).max(1);
    if m.is_multiple_of(2) {
        m + 1
    } else {
        m
    }
}

/// Filled small triangles of the level-`n` pre-gasket (side 1), on the
/// triangular lattice dividing each small side into an odd number of steps.
fn gasket(level: usize, h: f64) -> Vec<Vec<f64>> {
    let cells = 1usize << level;
    let side = 1.0 / cells as f64;
    let m = odd_at_least(side / h);
    let sigma = side / m as f64;
    let mut lattice = BTreeSet::new();
    for b in 0..cells {
        for a in 0..cells - b {
            if a & b != 0 {
                continue;
            }
            for j in 0..=m {
                for i in 0..=m - j {
                    lattice.insert((b * m + j, a * m + i));
                }
            }
        }
    }
    let h3 = 3f64.sqrt() / 2.0;
    lattice.into_iter().map(|(jj, ii)| vec![(ii as f64 + jj as f64 / 2.0) * sigma, jj as f64 * h3 * sigma]).collect()
}

/// Filled small squares of the level-`n` pre-carpet (side `1/√2`, so of
/// diameter 1) on a square lattice with an odd number of steps per side.
fn carpet(level: usize, h: f64) -> Vec<Vec<f64>> {
    let cells = 3usize.pow(level as u32);
    let side = std::f64::consts::FRAC_1_SQRT_2 / cells as f64;
    let m = odd_at_least(side / h);
    let sigma = side / m as f64;
    let kept = |mut a: usize, mut b: usize| {
        for _ in 0..level {
            if a % 3 == 1 && b % 3 == 1 {
                return false;
            }
            a /= 3;
            b /= 3;
        }
        true
    };
    let mut lattice = BTreeSet::new();
    for b in 0..cells {
        for a in 0..cells {
            if !kept(a, b) {
                continue;
            }
            for j in 0..=m {
                for i in 0..=m {
                    lattice.insert((b * m + j, a * m + i));
                }
            }
        }
    }
    lattice.into_iter().map(|(jj, ii)| vec![ii as f64 * sigma, jj as f64 * sigma]).collect()
}

/// Petals of the rose `r = cos(p(θ - 2πj/p))`, meeting only at the origin.
fn wedge(petals: usize, h: f64) -> Vec<Vec<f64>> {
    let p = petals as f64;
    let half = PI / (2.0 * p);
    let mut pts = vec![vec![0.0, 0.0]];
    for j in 0..petals {
        let phi = 2.0 * PI * j as f64 / p;
        let dense: Vec<[f64; 2]> = (0..=20_000)
            .map(|k| {
                let t = phi - half + 2.0 * half * k as f64 / 20_000.0;
                let r = (p * (t - phi)).cos().max(0.0);
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        let mut petal = resample(&dense, h);
        petal.pop();
        pts.extend(petal.into_iter().skip(1).map(|q| q.to_vec()));
    }
    pts
}

fn sine_left_end(oscillations: usize) -> f64 {
    1.0 / (FRAC_PI_2 + 2.0 * PI * oscillations as f64)
}

/// A Warsaw-circle style curve: `y = sin(1/x)` over `[x₀, 2/π]` with `K` full
/// oscillations, the limit segment `{0} × [-1, 1]`, and a connector running
/// from `(2/π, 1)` around below the segment to its lower end, the basepoint.
fn sine_curve(oscillations: usize, h: f64) -> Vec<Vec<f64>> {
    let right = 2.0 / PI;
    let mut pts: Vec<[f64; 2]> = Vec::new();
    pts.extend(resample(&[[0.0, -1.0], [0.0, 1.0]], h));
    let connector = [[0.0, -1.0], [0.0, -1.5], [right + 0.5, -1.5], [right + 0.5, 1.0], [right, 1.0]];
    let c = resample(&connector, h);
    pts.extend(&c[1..]);
    let u_end = 1.0 / sine_left_end(oscillations);
    let steps = ((u_end - FRAC_PI_2) * 4000.0).ceil() as usize;
    let dense: Vec<[f64; 2]> = (0..=steps)
        .map(|k| {
            let u = FRAC_PI_2 + (u_end - FRAC_PI_2) * k as f64 / steps as f64;
            [1.0 / u, u.sin()]
        })
        .collect();
    let curve = resample(&dense, h);
    pts.extend(&curve[1..]);
    pts.into_iter().map(|q| q.to_vec()).collect()
}

/// Points along a polyline at equal arc-length steps of at most `h`,
/// including both ends.
pub fn resample(polyline: &[[f64; 2]], h: f64) -> Vec<[f64; 2]> {
    let seg = |a: [f64; 2], b: [f64; 2]| ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    let mut cumulative = vec![0.0];
    for w in polyline.windows(2) {
        cumulative.push(cumulative.last().unwrap() + seg(w[0], w[1]));
    }
    let total = *cumulative.last().unwrap();
    let n = ((total / h).ceil() as usize).max(1);
    let step = total / n as f64;
    let mut out = vec![polyline[0]];
    let mut k = 0;
    for i in 1..n {
        let target = step * i as f64;
        while cumulative[k + 1] < target {
            k += 1;
        }
        let len = cumulative[k + 1] - cumulative[k];
        let t = if len > 0.0 { (target - cumulative[k]) / len } else { 0.0 };
        let (a, b) = (polyline[k], polyline[k + 1]);
        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }
    out.push(*polyline.last().unwrap());
    out
}
