//! Multi-qubit Pauli operators in the binary symplectic representation, with
//! dense Gaussian-integer matrices for CHSH checks and line-product tests of
//! magic (contextual) configurations.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::square_free_split;
use crate::geometry::Geometry;
use crate::spectrum::{charpoly_gaussian, spectrum_from_charpoly, Spectrum, SpectrumError};

pub const MAX_QUBITS: usize = 63;
/// Largest matrix dimension `2^n` for dense checks.
pub const DENSE_BOUND: usize = 1024;
/// Dense checks up to this dimension use the exact characteristic polynomial.
pub const EXACT_BOUND: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("operators act on {0} and {1} qubits")]
    SizeMismatch(usize, usize),
    #[error("column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("dense matrices need 2^n <= {bound}, got n = {n}")]
    TooLarge { n: usize, bound: usize },
    #[error("square counting supports 1 to 4 qubits, got {0}")]
    QubitRange(usize),
    #[error("line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("empty operator list")]
    Empty,
}

/// `i^phase · P₁ ⊗ … ⊗ Pₙ` with `Pₖ` given by the bits `(xₖ, zₖ)`:
/// I = (0,0), X = (1,0), Z = (0,1), Y = (1,1). Qubit 0 is the leftmost factor
/// and the most significant bit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PauliOp {
    n: usize,
    phase: u8,
    x: u64,
    z: u64,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        PauliOp { n, phase: 0, x: 0, z: 0 }
    }

    pub fn from_bits(n: usize, x: u64, z: u64) -> Self {
        PauliOp { n, phase: 0, x, z }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Exponent `k` of the phase `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn bits(&self) -> (u64, u64) {
        (self.x, self.z)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0 && self.phase == 0
    }

    /// Same operator up to a global phase.
    pub fn unphased(&self) -> Self {
        PauliOp { phase: 0, ..*self }
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn with_phase(&self, phase: u8) -> Self {
        PauliOp { phase: phase % 4, ..*self }
    }

    fn check(&self, o: &PauliOp) -> Result<(), PauliError> {
        if self.n == o.n {
            Ok(())
        } else {
            Err(PauliError::SizeMismatch(self.n, o.n))
        }
    }

    pub fn commutes(&self, o: &PauliOp) -> Result<bool, PauliError> {
        self.check(o)?;
        Ok(self.commutes_unchecked(o))
    }

    fn commutes_unchecked(&self, o: &PauliOp) -> bool {
        ((self.x & o.z) ^ (o.x & self.z)).count_ones() % 2 == 0
    }

    pub fn mul(&self, o: &PauliOp) -> Result<PauliOp, PauliError> {
        self.check(o)?;
        let mut phase = self.phase as i64 + o.phase as i64;
        for k in 0..self.n {
            let (x1, z1) = ((self.x >> k) & 1, (self.z >> k) & 1);
            let (x2, z2) = ((o.x >> k) & 1, (o.z >> k) & 1);
            let (x2, z2) = (x2 as i64, z2 as i64);
            // phase picked up by one single-qubit product
            phase += match (x1, z1) {
                (0, 0) => 0,
                (1, 1) => z2 - x2,
                (1, 0) => z2 * (2 * x2 - 1),
                _ => x2 * (1 - 2 * z2),
            };
        }
        Ok(PauliOp { n: self.n, phase: phase.rem_euclid(4) as u8, x: self.x ^ o.x, z: self.z ^ o.z })
    }

    /// Dense `2^n × 2^n` matrix as separate real and imaginary integer parts.
    pub fn matrix(&self) -> Result<GaussianMatrix, PauliError> {
        let d = dense_dim(self.n)?;
        let mut m = GaussianMatrix::zeros(d);
        let ys = (self.x & self.z).count_ones() as u8;
        for c in 0..d {
            let r = c ^ self.x as usize;
            let k = (self.phase + ys + 2 * ((self.z as usize & c).count_ones() % 2) as u8) % 4;
            let (re, im) = [(1, 0), (0, 1), (-1, 0), (0, -1)][k as usize];
            m.set(r, c, re, im);
        }
        Ok(m)
    }
}

fn dense_dim(n: usize) -> Result<usize, PauliError> {
    if n >= 63 || (1usize << n) > DENSE_BOUND {
        return Err(PauliError::TooLarge { n, bound: DENSE_BOUND });
    }
    Ok(1 << n)
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["", "i", "-", "-i"][self.phase as usize])?;
        for k in 0..self.n {
            let bit = self.n - 1 - k;
            let c = match ((self.x >> bit) & 1, (self.z >> bit) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliOp {
    type Err = PauliError;

    /// `XI`, `-iYY`, `+ZZ`, `iX`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let chars: Vec<char> = s.chars().collect();
        let mut k = 0;
        let mut phase = 0u8;
        if let Some(&c) = chars.first() {
            if c == '+' {
                k = 1;
            } else if c == '-' || c == '\u{2212}' {
                phase = 2;
                k = 1;
            }
        }
        if chars.get(k) == Some(&'i') {
            phase = (phase + 1) % 4;
            k += 1;
        }
        let body = &chars[k..];
        if body.is_empty() {
            return Err(PauliError::Parse { column: k + 1, message: "missing Pauli letters".into() });
        }
        if body.len() > MAX_QUBITS {
            return Err(PauliError::Parse { column: k + 1, message: format!("more than {MAX_QUBITS} qubits") });
        }
        let n = body.len();
        let (mut x, mut z) = (0u64, 0u64);
        for (j, c) in body.iter().enumerate() {
            let bit = 1u64 << (n - 1 - j);
            match c {
                'I' => {}
                'X' => x |= bit,
                'Z' => z |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit
                }
                _ => {
                    return Err(PauliError::Parse { column: k + j + 1, message: format!("unexpected {c:?}") });
                }
            }
        }
        Ok(PauliOp { n, phase, x, z })
    }
}

impl Serialize for PauliOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn commutes(a: &PauliOp, b: &PauliOp) -> Result<bool, PauliError> {
    a.commutes(b)
}

/// Ordered product `ops[0] · ops[1] · …`.
pub fn product(ops: &[PauliOp]) -> Result<PauliOp, PauliError> {
    let first = ops.first().ok_or(PauliError::Empty)?;
    ops.iter().try_fold(PauliOp::identity(first.n), |acc, o| acc.mul(o))
}

/// Square matrix with Gaussian-integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianMatrix {
    d: usize,
    re: Vec<i64>,
    im: Vec<i64>,
}

impl GaussianMatrix {
    pub fn zeros(d: usize) -> Self {
        GaussianMatrix { d, re: vec![0; d * d], im: vec![0; d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = GaussianMatrix::zeros(d);
        for k in 0..d {
            m.set(k, k, 1, 0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, r: usize, c: usize) -> (i64, i64) {
        (self.re[r * self.d + c], self.im[r * self.d + c])
    }

    fn set(&mut self, r: usize, c: usize, re: i64, im: i64) {
        self.re[r * self.d + c] = re;
        self.im[r * self.d + c] = im;
    }

    pub fn add(&self, o: &Self) -> Self {
        let zip = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        GaussianMatrix { d: self.d, re: zip(&self.re, &o.re), im: zip(&self.im, &o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let zip = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        GaussianMatrix { d: self.d, re: zip(&self.re, &o.re), im: zip(&self.im, &o.im) }
    }

    /// Skips zero entries of the left factor, so products of sparse Pauli
    /// combinations stay cheap.
    pub fn mul(&self, o: &Self) -> Self {
        let d = self.d;
        let mut out = GaussianMatrix::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let (a, b) = self.get(r, k);
                if a == 0 && b == 0 {
                    continue;
                }
                for c in 0..d {
                    let (x, y) = o.get(k, c);
                    if x == 0 && y == 0 {
                        continue;
                    }
                    out.re[r * d + c] += a * x - b * y;
                    out.im[r * d + c] += a * y + b * x;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = GaussianMatrix::zeros(self.d);
        for r in 0..self.d {
            for c in 0..self.d {
                let (a, b) = self.get(r, c);
                out.set(c, r, a, -b);
            }
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    fn rows(v: &[i64], d: usize) -> Vec<Vec<i64>> {
        v.chunks(d).map(|r| r.to_vec()).collect()
    }

    /// Exact characteristic polynomial (real coefficients required).
    pub fn charpoly(&self) -> Result<Vec<num_bigint::BigInt>, SpectrumError> {
        charpoly_gaussian(&Self::rows(&self.re, self.d), &Self::rows(&self.im, self.d))
    }

    fn to_nalgebra(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_fn(self.d, self.d, |r, c| {
            let (a, b) = self.get(r, c);
            Complex::new(a as f64, b as f64)
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChshReport {
    pub operators: [PauliOp; 4],
    /// Broken requirements: adjacent pairs must commute, diagonals anticommute,
    /// operators be Hermitian and pairwise distinct.
    pub violations: Vec<String>,
    /// Whether the spectrum below came from the exact characteristic polynomial.
    pub exact: bool,
    /// Eigenvalues of `C²` (of `C†C` when `C` is not Hermitian).
    pub eigenvalues: Vec<(f64, usize)>,
    pub exact_eigenvalues: Vec<Option<String>>,
    pub norm: f64,
    /// Closed form of `‖C‖` when its square is an integer.
    pub exact_norm: Option<String>,
}

/// `C = σ₂(σ₁ + σ₃) + σ₄(σ₃ − σ₁)`: spectrum of `C²` and operator norm of `C`.
pub fn chsh_check(quad: &[PauliOp; 4]) -> Result<ChshReport, PauliError> {
    let n = quad[0].n;
    for o in &quad[1..] {
        quad[0].check(o)?;
    }
    let d = dense_dim(n)?;
    let mut violations = Vec::new();
    for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        if !quad[a].commutes_unchecked(&quad[b]) {
            violations.push(format!("σ{} and σ{} should commute", a + 1, b + 1));
        }
    }
    for (a, b) in [(0, 2), (1, 3)] {
        if quad[a].commutes_unchecked(&quad[b]) {
            violations.push(format!("σ{} and σ{} should anticommute", a + 1, b + 1));
        }
    }
    for a in 0..4 {
        if !quad[a].is_hermitian() {
            violations.push(format!("σ{} = {} is not Hermitian", a + 1, quad[a]));
        }
        for b in a + 1..4 {
            if quad[a].unphased() == quad[b].unphased() {
                violations.push(format!("σ{} = σ{} up to phase", a + 1, b + 1));
            }
        }
    }

    let m: Vec<GaussianMatrix> = quad.iter().map(|o| o.matrix()).collect::<Result<_, _>>()?;
    let c = m[1].mul(&m[0].add(&m[2])).add(&m[3].mul(&m[2].sub(&m[0])));
    let hermitian = c.is_hermitian();
    let sq = if hermitian { c.mul(&c) } else { c.adjoint().mul(&c) };

    let (exact, spectrum) = if d <= EXACT_BOUND {
        match sq.charpoly() {
            Ok(cp) => (true, Some(spectrum_from_charpoly(&cp))),
            Err(_) => (false, None),
        }
    } else {
        (false, None)
    };
    let (eigenvalues, exact_eigenvalues) = match &spectrum {
        Some(s) => split_spectrum(s),
        None => numeric_spectrum(&sq),
    };
    let top = eigenvalues.first().map_or(0.0, |e| e.0).max(0.0);
    let exact_norm = exact_eigenvalues.first().cloned().flatten().and_then(|s| sqrt_form(&s));
    Ok(ChshReport {
        operators: *quad,
        violations,
        exact,
        eigenvalues,
        exact_eigenvalues,
        norm: top.sqrt(),
        exact_norm,
    })
}

fn split_spectrum(s: &Spectrum) -> (Vec<(f64, usize)>, Vec<Option<String>>) {
    s.eigenvalues.iter().map(|e| ((e.value, e.multiplicity), e.exact.clone())).unzip()
}

fn numeric_spectrum(m: &GaussianMatrix) -> (Vec<(f64, usize)>, Vec<Option<String>>) {
    let eig = nalgebra::SymmetricEigen::new(m.to_nalgebra());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for v in vals {
        match out.last_mut() {
            Some(last) if (last.0 - v).abs() < 1e-9 * (1.0 + v.abs()) => last.1 += 1,
            _ => out.push((v, 1)),
        }
    }
    let exact = vec![None; out.len()];
    (out, exact)
}

/// `"8"` ↦ `"2*sqrt(2)"`.
fn sqrt_form(s: &str) -> Option<String> {
    let k: i64 = s.parse().ok()?;
    if k < 0 {
        return None;
    }
    if k == 0 {
        return Some("0".into());
    }
    let (a, b) = square_free_split(k);
    Some(match (a, b) {
        (a, 1) => a.to_string(),
        (1, b) => format!("sqrt({b})"),
        (a, b) => format!("{a}*sqrt({b})"),
    })
}

/// Nontrivial operators on `n` qubits modulo phase, in index order
/// `x | z << n` from 1.
pub fn nontrivial_operators(n: usize) -> Vec<PauliOp> {
    (1u64..1 << (2 * n)).map(|k| PauliOp::from_bits(n, k & ((1 << n) - 1), k >> n)).collect()
}

/// Commutation graph on the `4^n - 1` nontrivial operators.
pub fn commutation_geometry(n: usize) -> Result<(Vec<PauliOp>, Geometry), PauliError> {
    if !(1..=4).contains(&n) {
        return Err(PauliError::QubitRange(n));
    }
    let ops = nontrivial_operators(n);
    let mut edges = Vec::new();
    for a in 0..ops.len() {
        for b in a + 1..ops.len() {
            if ops[a].commutes_unchecked(&ops[b]) {
                edges.push((a, b));
            }
        }
    }
    let g = Geometry::uniform(ops.len(), &edges);
    Ok((ops, g))
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn contains(&self, k: usize) -> bool {
        self.0[k / 64] >> (k % 64) & 1 == 1
    }
}

fn adjacency_sets(ops: &[PauliOp]) -> Vec<Bitset> {
    let words = ops.len().div_ceil(64);
    ops.iter()
        .enumerate()
        .map(|(a, oa)| {
            let mut b = vec![0u64; words];
            for (c, oc) in ops.iter().enumerate() {
                if a != c && oa.commutes_unchecked(oc) {
                    b[c / 64] |= 1 << (c % 64);
                }
            }
            Bitset(b)
        })
        .collect()
}

/// Squares `(σ₁, σ₂, σ₃, σ₄)` rooted at `u = σ₁`, the smallest index among the four.
fn squares_from(u: usize, adj: &[Bitset]) -> Vec<[usize; 4]> {
    let m = adj.len();
    let mut out = Vec::new();
    for w in u + 1..m {
        if adj[u].contains(w) {
            continue;
        }
        let common: Vec<usize> = (u + 1..m).filter(|&v| adj[u].contains(v) && adj[w].contains(v)).collect();
        for (i, &v) in common.iter().enumerate() {
            for &y in &common[i + 1..] {
                if !adj[v].contains(y) {
                    out.push([u, v, w, y]);
                }
            }
        }
    }
    out
}

/// All chordless 4-cycles of the commutation graph, each once, as
/// `[σ₁, σ₂, σ₃, σ₄]` with diagonals `σ₁σ₃` and `σ₂σ₄`. Deterministic order.
pub fn squares(n: usize) -> Result<Vec<[PauliOp; 4]>, PauliError> {
    if !(1..=4).contains(&n) {
        return Err(PauliError::QubitRange(n));
    }
    let ops = nontrivial_operators(n);
    let adj = adjacency_sets(&ops);
    let found: Vec<Vec<[usize; 4]>> = (0..ops.len()).into_par_iter().map(|u| squares_from(u, &adj)).collect();
    Ok(found.into_iter().flatten().map(|s| s.map(|k| ops[k])).collect())
}

/// Number of squares, parallel over the smallest operator of each square.
pub fn count_squares(n: usize) -> Result<u64, PauliError> {
    if !(1..=4).contains(&n) {
        return Err(PauliError::QubitRange(n));
    }
    let ops = nontrivial_operators(n);
    let adj = adjacency_sets(&ops);
    Ok((0..ops.len()).into_par_iter().map(|u| squares_from(u, &adj).len() as u64).sum())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LineSign {
    #[serde(rename = "+I")]
    Plus,
    #[serde(rename = "-I")]
    Minus,
    /// Not ±I (a non-scalar or an imaginary multiple of I).
    #[serde(rename = "other")]
    Other,
}

#[derive(Clone, Debug, Serialize)]
pub struct LineReport {
    pub operators: Vec<PauliOp>,
    pub commuting: bool,
    pub product: PauliOp,
    pub sign: LineSign,
}

#[derive(Clone, Debug, Serialize)]
pub struct MagicVerdict {
    pub lines: Vec<LineReport>,
    pub negative_lines: usize,
    pub odd_parity: bool,
    /// Every operator (up to phase) lies on an even number of lines, which the
    /// parity argument also needs.
    pub even_incidence: bool,
    pub contextual: bool,
}

/// A geometry whose points carry Pauli operators.
#[derive(Clone, Debug)]
pub struct LabeledGeometry {
    pub geometry: Geometry,
    pub operators: Vec<PauliOp>,
}

impl LabeledGeometry {
    /// One geometry line per text line, operators separated by commas; `#`
    /// starts a comment. Points are the distinct operators up to phase, in
    /// order of first appearance; the phase written on a line is the one used
    /// for that line's product.
    pub fn parse(text: &str) -> Result<(Self, Vec<Vec<PauliOp>>), PauliError> {
        let mut index: HashMap<PauliOp, usize> = HashMap::new();
        let mut operators: Vec<PauliOp> = Vec::new();
        let mut lines: Vec<Vec<usize>> = Vec::new();
        let mut phased: Vec<Vec<PauliOp>> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut line = Vec::new();
            let mut ops = Vec::new();
            for tok in content.split(',') {
                let op: PauliOp = tok
                    .parse()
                    .map_err(|e: PauliError| PauliError::Config { line: k + 1, message: format!("{tok:?}: {e}") })?;
                if let Some(first) = operators.first() {
                    if first.n != op.n {
                        return Err(PauliError::Config {
                            line: k + 1,
                            message: format!("{op} acts on {} qubits, expected {}", op.n, first.n),
                        });
                    }
                }
                let key = op.unphased();
                let id = *index.entry(key).or_insert_with(|| {
                    operators.push(key);
                    operators.len() - 1
                });
                line.push(id);
                ops.push(op);
            }
            lines.push(line);
            phased.push(ops);
        }
        if operators.is_empty() {
            return Err(PauliError::Empty);
        }
        let geometry = Geometry::from_lines(operators.len(), &lines);
        Ok((LabeledGeometry { geometry, operators }, phased))
    }

    /// Adjacent points whose operators anticommute.
    pub fn violations(&self) -> Vec<(usize, usize)> {
        self.geometry
            .graph()
            .plain_edges()
            .into_iter()
            .filter(|&(u, v)| !self.operators[u].commutes_unchecked(&self.operators[v]))
            .collect()
    }
}

/// Line products with phases; contextual iff every line commutes, every
/// product is ±I and the number of −I lines is odd.
pub fn magic_check(lines: &[Vec<PauliOp>]) -> Result<MagicVerdict, PauliError> {
    let mut reports = Vec::new();
    let mut incidence: HashMap<PauliOp, usize> = HashMap::new();
    for line in lines {
        let first = line.first().ok_or(PauliError::Empty)?;
        let commuting = line
            .iter()
            .enumerate()
            .all(|(a, oa)| line[a + 1..].iter().all(|ob| oa.commutes_unchecked(ob)));
        for o in line {
            first.check(o)?;
            *incidence.entry(o.unphased()).or_default() += 1;
        }
        let p = product(line)?;
        let sign = match (p.x, p.z, p.phase) {
            (0, 0, 0) => LineSign::Plus,
            (0, 0, 2) => LineSign::Minus,
            _ => LineSign::Other,
        };
        reports.push(LineReport { operators: line.clone(), commuting, product: p, sign });
    }
    let negative_lines = reports.iter().filter(|r| r.sign == LineSign::Minus).count();
    let odd_parity = negative_lines % 2 == 1;
    let contextual = odd_parity && reports.iter().all(|r| r.commuting && r.sign != LineSign::Other);
    Ok(MagicVerdict {
        lines: reports,
        negative_lines,
        odd_parity,
        even_incidence: incidence.values().all(|c| c % 2 == 0),
        contextual,
    })
}
