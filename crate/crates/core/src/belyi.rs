//! Numerical verification of candidate Belyi functions `f = p/q`: critical
//! values must lie over {0, 1, ∞} and the fibers must realize a passport.
//!
//! Multiplicities come from an exact square-free decomposition, so only root
//! positions are floating point. For maps with decimal coefficients the fiber
//! over 1 is not exactly factorable; there the ramified white points are
//! recovered by grouping the simple roots of `p - q` around the exact critical
//! points of `f` (which do not depend on a decimal overall constant).

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::dessin::Passport;
use crate::expr::{self, ExprError};
use crate::field::{Field, Mq};
use crate::perm::CycleType;
use crate::poly::{aberth, Poly};

pub const DEFAULT_TOL: f64 = 1e-8;
/// Tolerance for maps whose coefficients were given as decimals.
pub const APPROXIMATE_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum BelyiError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("the map is constant")]
    Constant,
    #[error("numerator and denominator share the factor {0}")]
    NotCoprime(String),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

#[derive(Clone, Debug)]
pub struct RationalMap {
    p: Poly<Mq>,
    q: Poly<Mq>,
    approximate: bool,
}

impl RationalMap {
    pub fn new(p: Poly<Mq>, q: Poly<Mq>, approximate: bool) -> Result<Self, BelyiError> {
        if q.is_zero() || p.is_zero() {
            return Err(BelyiError::Constant);
        }
        let g = p.gcd(&q);
        if g.degree().unwrap_or(0) > 0 {
            return Err(BelyiError::NotCoprime(g.to_string()));
        }
        let m = RationalMap { p, q, approximate };
        if m.degree() == 0 {
            return Err(BelyiError::Constant);
        }
        Ok(m)
    }

    /// A single expression such as `(x-1)^4/(16x^2)`.
    pub fn parse(text: &str) -> Result<Self, BelyiError> {
        let (f, approximate) = expr::parse_fraction(text).map_err(|e| at_line(1, 0, e))?;
        RationalMap::new(f.num, f.den, approximate)
    }

    pub fn numerator(&self) -> &Poly<Mq> {
        &self.p
    }

    pub fn denominator(&self) -> &Poly<Mq> {
        &self.q
    }

    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    pub fn degree(&self) -> usize {
        deg(&self.p).max(deg(&self.q))
    }

    /// `None` at a pole.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        let d = self.q.eval_c64(z);
        if d.norm() == 0.0 {
            None
        } else {
            Some(self.p.eval_c64(z) / d)
        }
    }

    fn fiber_poly(&self, fiber: Fiber) -> Poly<Mq> {
        match fiber {
            Fiber::Zero => self.p.clone(),
            Fiber::One => self.p.sub(&self.q),
            Fiber::Infinity => self.q.clone(),
        }
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.p, self.q)
    }
}

fn deg(p: &Poly<Mq>) -> usize {
    p.degree().unwrap_or(0)
}

fn at_line(line: usize, offset: usize, e: ExprError) -> BelyiError {
    BelyiError::Parse { line, column: e.column + offset, message: e.message }
}

/// Contents of a map file.
#[derive(Clone, Debug)]
pub struct MapFile {
    pub name: Option<String>,
    pub map: RationalMap,
    pub passport: Option<Passport>,
}

impl MapFile {
    /// `key = value` lines, `#` comments. Keys: `f` (a rational expression) or
    /// `p` and `q` (polynomials, `q` defaulting to 1, either an expression or
    /// a `[c0, c1, …]` list lowest degree first), plus optional `name` and
    /// `passport`.
    pub fn parse(text: &str) -> Result<Self, BelyiError> {
        let mut name = None;
        let mut passport = None;
        let mut f: Option<(expr::Fraction, bool)> = None;
        let mut p: Option<(Poly<Mq>, bool)> = None;
        let mut q: Option<(Poly<Mq>, bool)> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(BelyiError::Parse { line, column: 1, message: "expected key = value".into() });
            };
            let offset = key.chars().count() + 1;
            match key.trim() {
                "name" => name = Some(value.trim().to_string()),
                "passport" => {
                    passport = Some(value.trim().parse().map_err(|e| BelyiError::Parse {
                        line,
                        column: offset + 1,
                        message: format!("{e}"),
                    })?)
                }
                "f" => f = Some(expr::parse_fraction(value).map_err(|e| at_line(line, offset, e))?),
                "p" => p = Some(expr::parse_polynomial(value).map_err(|e| at_line(line, offset, e))?),
                "q" => q = Some(expr::parse_polynomial(value).map_err(|e| at_line(line, offset, e))?),
                other => {
                    return Err(BelyiError::Parse { line, column: 1, message: format!("unknown key {other:?}") })
                }
            }
        }
        let map = match (f, p, q) {
            (Some((f, a)), None, None) => RationalMap::new(f.num, f.den, a)?,
            (None, Some((p, a)), q) => {
                let (q, b) = q.unwrap_or((Poly::one(), false));
                RationalMap::new(p, q, a || b)?
            }
            (None, None, _) => {
                return Err(BelyiError::Parse { line: 1, column: 1, message: "no map given (need f= or p=)".into() })
            }
            _ => {
                return Err(BelyiError::Parse { line: 1, column: 1, message: "give either f= or p=/q=, not both".into() })
            }
        };
        Ok(MapFile { name, map, passport })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Fiber {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "inf")]
    Infinity,
}

const FIBERS: [Fiber; 3] = [Fiber::Zero, Fiber::One, Fiber::Infinity];

/// A point of the Riemann sphere.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Place {
    Finite { re: f64, im: f64 },
    Infinity(InfinityTag),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum InfinityTag {
    #[serde(rename = "inf")]
    Inf,
}

impl Place {
    pub fn finite(z: Complex64) -> Self {
        Place::Finite { re: z.re, im: z.im }
    }

    pub const INFINITY: Place = Place::Infinity(InfinityTag::Inf);

    pub fn as_complex(&self) -> Option<Complex64> {
        match *self {
            Place::Finite { re, im } => Some(Complex64::new(re, im)),
            Place::Infinity(_) => None,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite { re, im } if *im == 0.0 => write!(f, "{re}"),
            Place::Finite { re, im } => write!(f, "{re}{:+}i", im),
            Place::Infinity(_) => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub point: Place,
    /// Local degree of `f` at the point.
    pub ramification: usize,
    pub value: Place,
    /// Set when the value is known exactly (the point is a root of `p`, `q` or `p - q`).
    pub exact_fiber: Option<Fiber>,
}

impl CriticalPoint {
    pub fn classify(&self, tol: f64) -> Option<Fiber> {
        if self.exact_fiber.is_some() {
            return self.exact_fiber;
        }
        match self.value.as_complex() {
            None => Some(Fiber::Infinity),
            Some(v) if v.norm() <= tol => Some(Fiber::Zero),
            Some(v) if (v - 1.0).norm() <= tol => Some(Fiber::One),
            Some(v) if v.norm() >= 1.0 / tol => Some(Fiber::Infinity),
            _ => None,
        }
    }
}

/// Critical points of `f` with their values. Finite ones are the roots of
/// `p'q - pq'`; the point at infinity is analyzed by comparing degrees.
pub fn critical_data(f: &RationalMap) -> Vec<CriticalPoint> {
    let (p, q) = (&f.p, &f.q);
    let d = p.derivative().mul(q).sub(&p.mul(&q.derivative()));
    let one_poly = p.sub(q);
    let mut out = Vec::new();
    for (g, m) in d.square_free() {
        // split the factor by which fiber its roots lie in; these are coprime
        let mut rest = g.clone();
        let mut pieces = Vec::new();
        for (fiber, target) in [(Fiber::Zero, p), (Fiber::Infinity, q), (Fiber::One, &one_poly)] {
            let h = rest.gcd(target);
            if h.degree().unwrap_or(0) > 0 {
                rest = rest.divrem(&h).0;
                pieces.push((Some(fiber), h));
            }
        }
        if rest.degree().unwrap_or(0) > 0 {
            pieces.push((None, rest));
        }
        for (fiber, h) in pieces {
            for z in aberth(&h.to_c64()) {
                let value = match fiber {
                    Some(Fiber::Zero) => Place::finite(Complex64::new(0.0, 0.0)),
                    Some(Fiber::One) => Place::finite(Complex64::new(1.0, 0.0)),
                    Some(Fiber::Infinity) => Place::INFINITY,
                    None => f.eval(z).map_or(Place::INFINITY, Place::finite),
                };
                out.push(CriticalPoint { point: Place::finite(z), ramification: m + 1, value, exact_fiber: fiber });
            }
        }
    }
    if let Some(cp) = infinity_point(f) {
        if cp.ramification > 1 {
            out.push(cp);
        }
    }
    sort_points(&mut out, |c| (c.point, c.ramification));
    out
}

/// The point at infinity with its local degree and value.
fn infinity_point(f: &RationalMap) -> Option<CriticalPoint> {
    let (dp, dq) = (deg(&f.p), deg(&f.q));
    let n = f.degree();
    let (e, value, exact) = if dp > dq {
        (dp - dq, Place::INFINITY, Some(Fiber::Infinity))
    } else if dp < dq {
        (dq - dp, Place::finite(Complex64::new(0.0, 0.0)), Some(Fiber::Zero))
    } else {
        let c = f.p.leading()?.div(f.q.leading()?)?;
        let diff = f.p.sub(&f.q.scale(&c));
        let e = n - diff.degree().unwrap_or(0);
        let exact = (c == Mq::one()).then_some(Fiber::One);
        (e, Place::finite(c.to_c64()), exact)
    };
    Some(CriticalPoint { point: Place::INFINITY, ramification: e, value, exact_fiber: exact })
}

fn sort_points<T>(v: &mut [T], key: impl Fn(&T) -> (Place, usize)) {
    v.sort_by(|a, b| {
        let (pa, ea) = key(a);
        let (pb, eb) = key(b);
        let order = |p: Place| match p {
            Place::Finite { re, im } => (0, re, im),
            Place::Infinity(_) => (1, 0.0, 0.0),
        };
        eb.cmp(&ea).then_with(|| {
            let (ka, ra, ia) = order(pa);
            let (kb, rb, ib) = order(pb);
            ka.cmp(&kb).then(ra.total_cmp(&rb)).then(ia.total_cmp(&ib))
        })
    });
}

#[derive(Clone, Debug, Serialize)]
pub struct Vertex {
    pub position: Place,
    pub multiplicity: usize,
    /// `|g(z)| / ((1+|z|)^deg g · max|coeff g|)` for the fiber polynomial `g`.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexPositions {
    pub black: Vec<Vertex>,
    pub white: Vec<Vertex>,
    pub faces: Vec<Vertex>,
    /// Problems met while grouping roots of approximate maps.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl VertexPositions {
    fn fiber(&self, fiber: Fiber) -> &[Vertex] {
        match fiber {
            Fiber::Zero => &self.black,
            Fiber::One => &self.white,
            Fiber::Infinity => &self.faces,
        }
    }
}

fn residual(g: &Poly<Mq>, z: Complex64) -> f64 {
    let c = g.to_c64();
    let norm = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let scale = (1.0 + z.norm()).powi(deg(g) as i32) * norm;
    if scale == 0.0 {
        0.0
    } else {
        g.eval_c64(z).norm() / scale
    }
}

/// Preimages of 0 (black vertices), 1 (white vertices) and ∞ (face centres)
/// with multiplicities.
pub fn vertex_positions(f: &RationalMap) -> VertexPositions {
    let tol = if f.approximate { APPROXIMATE_TOL } else { DEFAULT_TOL };
    vertex_positions_with(f, &critical_data(f), tol)
}

fn vertex_positions_with(f: &RationalMap, crit: &[CriticalPoint], tol: f64) -> VertexPositions {
    let n = f.degree();
    let mut diagnostics = Vec::new();
    let mut fibers: Vec<Vec<Vertex>> = Vec::new();
    for fiber in FIBERS {
        let g = f.fiber_poly(fiber);
        let mut verts: Vec<Vertex> = Vec::new();
        for (h, m) in g.square_free() {
            for z in aberth(&h.to_c64()) {
                verts.push(Vertex { position: Place::finite(z), multiplicity: m, residual: residual(&g, z) });
            }
        }
        let at_infinity = n - deg(&g);
        if at_infinity > 0 {
            verts.push(Vertex { position: Place::INFINITY, multiplicity: at_infinity, residual: 0.0 });
        }
        if f.approximate {
            group_near_critical(&g, fiber, crit, tol, &mut verts, &mut diagnostics);
        }
        sort_points(&mut verts, |v| (v.position, v.multiplicity));
        fibers.push(verts);
    }
    let faces = fibers.pop().unwrap_or_default();
    let white = fibers.pop().unwrap_or_default();
    let black = fibers.pop().unwrap_or_default();
    VertexPositions { black, white, faces, diagnostics }
}

/// Replace the `e` simple roots nearest each inexactly located critical point
/// of local degree `e` by that point.
fn group_near_critical(
    g: &Poly<Mq>,
    fiber: Fiber,
    crit: &[CriticalPoint],
    tol: f64,
    verts: &mut Vec<Vertex>,
    diagnostics: &mut Vec<String>,
) {
    for c in crit {
        if c.exact_fiber.is_some() || c.classify(tol) != Some(fiber) {
            continue;
        }
        let Some(z) = c.point.as_complex() else { continue };
        let e = c.ramification;
        let mut near: Vec<(f64, usize)> = verts
            .iter()
            .enumerate()
            .filter(|(_, v)| v.multiplicity == 1)
            .filter_map(|(k, v)| v.position.as_complex().map(|w| ((w - z).norm(), k)))
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0));
        let radius = 10.0 * tol.powf(1.0 / e as f64) * (1.0 + z.norm());
        if near.len() < e || near[e - 1].0 > radius {
            diagnostics.push(format!(
                "could not group {e} roots of the fiber over {} around the critical point {}",
                fiber_name(fiber),
                c.point
            ));
            continue;
        }
        let mut drop: Vec<usize> = near[..e].iter().map(|&(_, k)| k).collect();
        drop.sort_unstable_by(|a, b| b.cmp(a));
        for k in drop {
            verts.remove(k);
        }
        verts.push(Vertex { position: c.point, multiplicity: e, residual: residual(g, z) });
    }
}

fn fiber_name(f: Fiber) -> &'static str {
    match f {
        Fiber::Zero => "0",
        Fiber::One => "1",
        Fiber::Infinity => "inf",
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    DegreeMismatch,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::DegreeMismatch => "degree-mismatch",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BelyiReport {
    pub verdict: Verdict,
    pub map: String,
    pub degree: usize,
    pub expected_degree: usize,
    pub approximate: bool,
    pub tol: f64,
    pub critical_points: Vec<CriticalPoint>,
    /// Critical points whose value is not within tolerance of 0, 1 or ∞.
    pub stray_critical_values: Vec<CriticalPoint>,
    pub vertices: VertexPositions,
    /// Passport read off the fibers over 0, 1, ∞.
    #[serde(serialize_with = "display")]
    pub computed_passport: Passport,
    #[serde(serialize_with = "display")]
    pub expected_passport: Passport,
    pub fiber_matches: [bool; 3],
    /// Σ (e - 1) over the three fibers, and the genus-0 value 2·deg - 2.
    pub branching: usize,
    pub riemann_hurwitz: usize,
    pub max_residual: f64,
    pub diagnostics: Vec<String>,
}

fn display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl BelyiReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Check `f` against a passport `[C_α, C_β, C_γ]`.
pub fn verify(f: &RationalMap, passport: &Passport, tol: f64) -> Result<BelyiReport, BelyiError> {
    if !(tol > 0.0) {
        return Err(BelyiError::BadTolerance(tol));
    }
    let n = f.degree();
    let expected_degree = passport.alpha().total();
    let mut diagnostics = Vec::new();
    if passport.beta().total() != expected_degree || passport.gamma().total() != expected_degree {
        diagnostics.push(format!("passport {passport} has entries of different degrees"));
    }

    let crit = critical_data(f);
    let stray: Vec<CriticalPoint> = crit.iter().filter(|c| c.classify(tol).is_none()).cloned().collect();
    for c in &stray {
        diagnostics.push(format!("critical point {} has critical value {}", c.point, c.value));
    }

    let vertices = vertex_positions_with(f, &crit, tol);
    diagnostics.extend(vertices.diagnostics.iter().cloned());
    let mut types = Vec::new();
    let mut branching = 0;
    for fiber in FIBERS {
        let mults: Vec<usize> = vertices.fiber(fiber).iter().map(|v| v.multiplicity).collect();
        let total: usize = mults.iter().sum();
        if total != n {
            diagnostics.push(format!("fiber over {} has total multiplicity {total}, not {n}", fiber_name(fiber)));
        }
        branching += mults.iter().map(|m| m - 1).sum::<usize>();
        types.push(CycleType::new(mults));
    }
    let computed = Passport([types[0].clone(), types[1].clone(), types[2].clone()]);
    let fiber_matches = [0, 1, 2].map(|k| computed.0[k] == passport.0[k]);
    let riemann_hurwitz = 2 * n - 2;
    if branching != riemann_hurwitz {
        diagnostics.push(format!("branching over 0, 1, inf is {branching}, Riemann-Hurwitz needs {riemann_hurwitz}"));
    }

    let max_residual = [&vertices.black, &vertices.white, &vertices.faces]
        .iter()
        .flat_map(|v| v.iter().map(|x| x.residual))
        .fold(0.0, f64::max);
    if max_residual > tol {
        diagnostics.push(format!("root residual {max_residual:e} exceeds the tolerance"));
    }

    let verdict = if n != expected_degree {
        diagnostics.insert(0, format!("map has degree {n} but the passport has degree {expected_degree}"));
        Verdict::DegreeMismatch
    } else if stray.is_empty() && fiber_matches.iter().all(|&b| b) && branching == riemann_hurwitz && max_residual <= tol
    {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(BelyiReport {
        verdict,
        map: f.to_string(),
        degree: n,
        expected_degree,
        approximate: f.approximate,
        tol,
        critical_points: crit,
        stray_critical_values: stray,
        vertices,
        computed_passport: computed,
        expected_passport: passport.clone(),
        fiber_matches,
        branching,
        riemann_hurwitz,
        max_residual,
        diagnostics,
    })
}
