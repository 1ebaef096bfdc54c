//! Exact characteristic polynomials of integer and Gaussian-integer matrices,
//! and eigenvalues with exact multiplicities.
//!
//! The characteristic polynomial is computed modulo enough primes `p ≡ 1 (mod 4)`
//! by Hessenberg reduction and recombined by the Chinese remainder theorem.
//! `i` is sent to a square root of `-1` mod `p`; evaluating at both square
//! roots separates real and imaginary parts of the coefficients.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::{rational_to_f64, Field};
use crate::poly::{aberth, Poly};

pub const DEFAULT_SPECTRUM_BOUND: usize = 256;
pub const CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectrumError {
    #[error("matrix has {got} rows, bound is {bound}")]
    TooLarge { got: usize, bound: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("characteristic polynomial has non-real coefficients")]
    NotReal,
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes `p ≡ 1 (mod 4)` below 2³¹, descending, with a square root of `-1`.
fn primes_with_i() -> impl Iterator<Item = (u64, u64)> {
    let start = (1u64 << 31) - 1;
    (0..)
        .map(move |k| start - 2 * k)
        .filter(|&p| p % 4 == 1 && is_prime(p))
        .map(|p| {
            let mut a = 2;
            loop {
                let s = pow_mod(a, (p - 1) / 4, p);
                if s * s % p == p - 1 {
                    return (p, s);
                }
                a += 1;
            }
        })
}

fn to_mod(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

/// Characteristic polynomial `det(xI - M)` over `F_p`, lowest degree first.
fn charpoly_mod(mut h: Vec<Vec<u64>>, p: u64) -> Vec<u64> {
    let n = h.len();
    let inv = |a: u64| pow_mod(a, p - 2, p);
    // similarity reduction to upper Hessenberg form
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| h[i][m - 1] != 0) else {
            continue;
        };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let t = inv(h[m][m - 1]);
        for j in (m + 1)..n {
            let u = h[j][m - 1] * t % p;
            if u == 0 {
                continue;
            }
            for k in 0..n {
                let sub = u * h[m][k] % p;
                h[j][k] = (h[j][k] + p - sub) % p;
            }
            for row in h.iter_mut() {
                row[m] = (row[m] + u * row[j]) % p;
            }
        }
    }
    // p_k(x) for the leading k×k block
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 0..n {
        let prev = &polys[m];
        let mut next = vec![0u64; m + 2];
        for (k, &c) in prev.iter().enumerate() {
            next[k + 1] = (next[k + 1] + c) % p;
            next[k] = (next[k] + p - c * h[m][m] % p) % p;
        }
        let mut t = 1u64;
        for i in (0..m).rev() {
            t = t * h[i + 1][i] % p;
            let coef = t * h[i][m] % p;
            if coef == 0 {
                continue;
            }
            for (k, &c) in polys[i].iter().enumerate() {
                next[k] = (next[k] + p - coef * c % p) % p;
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn symmetric_residue(v: &BigInt, m: &BigInt) -> BigInt {
    let r = v.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Exact `det(xI - M)` for `M = re + i·im` with integer entries, lowest degree
/// first. Fails unless the result has real coefficients.
pub fn charpoly_gaussian(re: &[Vec<i64>], im: &[Vec<i64>]) -> Result<Vec<BigInt>, SpectrumError> {
    let n = re.len();
    if re.iter().any(|r| r.len() != n) || im.len() != n || im.iter().any(|r| r.len() != n) {
        return Err(SpectrumError::NotSquare);
    }
    // Hadamard-style bound on every coefficient: C(n,k)·R^k ≤ 2^n·R^n
    let r2 = (0..n)
        .map(|i| (0..n).map(|j| (re[i][j] as f64).powi(2) + (im[i][j] as f64).powi(2)).sum::<f64>())
        .fold(1.0, f64::max);
    let bits = n as f64 + n as f64 * r2.sqrt().log2().max(0.0) + 4.0;
    let mut modulus = BigInt::one();
    let mut acc_re = vec![BigInt::zero(); n + 1];
    let mut acc_im = vec![BigInt::zero(); n + 1];
    for (p, s) in primes_with_i() {
        let build = |s: u64| -> Vec<Vec<u64>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (to_mod(re[i][j], p) + to_mod(im[i][j], p) * s) % p)
                        .collect()
                })
                .collect()
        };
        let c_plus = charpoly_mod(build(s), p);
        let c_minus = charpoly_mod(build(p - s), p);
        let inv2 = pow_mod(2, p - 2, p);
        let inv2s = pow_mod(2 * s % p, p - 2, p);
        let pb = BigInt::from(p);
        for k in 0..=n {
            let (a, b) = (c_plus[k], c_minus[k]);
            let real = (a + b) % p * inv2 % p;
            let imag = (a + p - b) % p * inv2s % p;
            for (acc, val) in [(&mut acc_re[k], real), (&mut acc_im[k], imag)] {
                // x ≡ acc (mod M), x ≡ val (mod p)
                let t = (BigInt::from(val) - &*acc).mod_floor(&pb);
                let minv = BigInt::from(pow_mod(
                    (&modulus % &pb).try_into().unwrap_or(0u64),
                    p - 2,
                    p,
                ));
                let t = (t * minv).mod_floor(&pb);
                *acc += &modulus * t;
            }
        }
        modulus *= pb;
        if (modulus.bits() as f64) > bits + 1.0 {
            break;
        }
    }
    let coeffs: Vec<BigInt> = acc_re.iter().map(|c| symmetric_residue(c, &modulus)).collect();
    if acc_im.iter().any(|c| !symmetric_residue(c, &modulus).is_zero()) {
        return Err(SpectrumError::NotReal);
    }
    Ok(coeffs)
}

pub fn charpoly_integer(m: &[Vec<i64>]) -> Result<Vec<BigInt>, SpectrumError> {
    let zero: Vec<Vec<i64>> = m.iter().map(|r| vec![0; r.len()]).collect();
    charpoly_gaussian(m, &zero)
}

/// Adjacency matrix of a simple graph on `n` vertices.
pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0i64; n]; n];
    for &(u, v) in edges {
        a[u][v] = 1;
        a[v][u] = 1;
    }
    a
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Eigenvalue {
    pub value: f64,
    pub multiplicity: usize,
    /// Closed form when rational or quadratic, such as `"-2"` or `"1+sqrt(2)"`.
    pub exact: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    /// Descending by value.
    pub eigenvalues: Vec<Eigenvalue>,
    pub charpoly: Vec<String>,
}

impl Spectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    /// `sp(10^1, 1^20, -5^6)`.
    pub fn notation(&self) -> String {
        let parts: Vec<String> = self
            .eigenvalues
            .iter()
            .map(|e| {
                let v = e.exact.clone().unwrap_or_else(|| format!("{:.6}", e.value));
                format!("{v}^{}", e.multiplicity)
            })
            .collect();
        format!("sp({})", parts.join(", "))
    }

    /// Whether this matches `(value, multiplicity)` pairs within `tol`.
    pub fn matches(&self, expected: &[(f64, usize)], tol: f64) -> bool {
        let mut want: Vec<(f64, usize)> = expected.to_vec();
        want.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        self.eigenvalues.len() == want.len()
            && self
                .eigenvalues
                .iter()
                .zip(&want)
                .all(|(e, w)| (e.value - w.0).abs() <= tol && e.multiplicity == w.1)
    }
}

fn int_poly(c: &[BigInt]) -> Poly<BigRational> {
    Poly::new(c.iter().map(|v| BigRational::from_integer(v.clone())).collect())
}

fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn nearest_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < 1e-6 && r.abs() < 9e15).then_some(r as i64)
}

/// Closed forms for the roots of a rational square-free factor with the given
/// floating roots: exact integers, then quadratic pairs `(a ± √d)/b`.
fn closed_forms(factor: &Poly<BigRational>, roots: &[Complex64]) -> Vec<Option<String>> {
    let mut out = vec![None; roots.len()];
    for (k, z) in roots.iter().enumerate() {
        if z.im.abs() > 1e-9 {
            continue;
        }
        if let Some(v) = nearest_integer(z.re) {
            if Zero::is_zero(&factor.eval(&BigRational::from_i64(v))) {
                out[k] = Some(v.to_string());
            }
        }
    }
    for a in 0..roots.len() {
        for b in (a + 1)..roots.len() {
            if out[a].is_some() || out[b].is_some() {
                continue;
            }
            let (s, p) = (roots[a] + roots[b], roots[a] * roots[b]);
            if s.im.abs() > 1e-9 || p.im.abs() > 1e-9 {
                continue;
            }
            // x² - s x + p with 2s, 4p integral covers (a ± √d)/2
            let (Some(s2), Some(p4)) = (nearest_integer(2.0 * s.re), nearest_integer(4.0 * p.re)) else {
                continue;
            };
            let q = Poly::new(vec![
                BigRational::new(p4.into(), 4.into()),
                BigRational::new((-s2).into(), 2.into()),
                <BigRational as One>::one(),
            ]);
            if !factor.divrem(&q).1.is_zero() {
                continue;
            }
            // roots (s2 ± √(s2² - 4 p4)) / 4 ... simplified
            let disc = s2 * s2 - 4 * p4;
            if disc <= 0 {
                continue;
            }
            let (k, d) = crate::field::square_free_split(disc);
            let centre = BigRational::new(s2.into(), 4.into());
            let coef = BigRational::new(k.into(), 4.into());
            let fmt = |sign: &str| -> String {
                let rad = if coef.is_one() {
                    format!("sqrt({d})")
                } else {
                    format!("{}*sqrt({d})", rational_string(&coef))
                };
                if Zero::is_zero(&centre) {
                    if sign == "+" {
                        rad
                    } else {
                        format!("-{rad}")
                    }
                } else {
                    format!("{}{sign}{rad}", rational_string(&centre))
                }
            };
            let (hi, lo) = if roots[a].re > roots[b].re { (a, b) } else { (b, a) };
            out[hi] = Some(fmt("+"));
            out[lo] = Some(fmt("-"));
        }
    }
    out
}

/// Spectrum of a real symmetric matrix (or Hermitian, via [`charpoly_gaussian`]).
pub fn spectrum_from_charpoly(cp: &[BigInt]) -> Spectrum {
    let p = int_poly(cp);
    let mut eigen: Vec<Eigenvalue> = Vec::new();
    for (factor, m) in p.square_free() {
        let roots = aberth(&factor.to_c64());
        let forms = closed_forms(&factor, &roots);
        for (z, exact) in roots.into_iter().zip(forms) {
            let value = match &exact {
                Some(s) if !s.contains("sqrt") => s.parse::<f64>().unwrap_or(z.re),
                _ => z.re,
            };
            eigen.push(Eigenvalue {
                value,
                multiplicity: m,
                exact,
            });
        }
    }
    eigen.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap());
    // distinct exact roots never coincide; the merge only guards numerics
    let mut merged: Vec<Eigenvalue> = Vec::new();
    for e in eigen {
        match merged.last_mut() {
            Some(last) if (last.value - e.value).abs() < CLUSTER_TOL => last.multiplicity += e.multiplicity,
            _ => merged.push(e),
        }
    }
    Spectrum {
        eigenvalues: merged,
        charpoly: cp.iter().map(|c| c.to_string()).collect(),
    }
}

pub fn graph_spectrum(n: usize, edges: &[(usize, usize)], bound: usize) -> Result<Spectrum, SpectrumError> {
    if n > bound {
        return Err(SpectrumError::TooLarge { got: n, bound });
    }
    let cp = charpoly_integer(&adjacency(n, edges))?;
    Ok(spectrum_from_charpoly(&cp))
}

/// Largest relative coefficient error of `Π (x - λ)^m` against the exact polynomial.
pub fn expansion_error(s: &Spectrum) -> f64 {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for e in &s.eigenvalues {
        for _ in 0..e.multiplicity {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, v) in c.iter().enumerate() {
                next[k + 1] += v;
                next[k] -= v * e.value;
            }
            c = next;
        }
    }
    let exact: Vec<f64> = s
        .charpoly
        .iter()
        .map(|t| rational_to_f64(&BigRational::from_integer(t.parse::<BigInt>().unwrap())))
        .collect();
    if exact.len() != c.len() {
        return f64::INFINITY;
    }
    let scale = exact.iter().map(|v| v.abs()).fold(1.0, f64::max);
    exact
        .iter()
        .zip(&c)
        .map(|(e, v)| (v.re - e).abs().max(v.im.abs()) / scale)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    }

    #[test]
    fn single_edge() {
        let s = graph_spectrum(2, &[(0, 1)], 256).unwrap();
        assert!(s.matches(&[(1.0, 1), (-1.0, 1)], 1e-12));
        assert_eq!(s.charpoly, vec!["-1", "0", "1"]);
    }

    #[test]
    fn charpoly_of_triangle() {
        // x³ - 3x - 2
        let cp = charpoly_integer(&adjacency(3, &cycle(3))).unwrap();
        assert_eq!(cp, vec![BigInt::from(-2), BigInt::from(-3), BigInt::zero(), BigInt::one()]);
    }

    #[test]
    fn five_cycle_has_golden_eigenvalues() {
        let s = graph_spectrum(5, &cycle(5), 256).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(s.matches(&[(2.0, 1), (phi - 1.0, 2), (-phi, 2)], 1e-12));
        let forms: Vec<_> = s.eigenvalues.iter().map(|e| e.exact.clone().unwrap()).collect();
        assert_eq!(forms, vec!["2", "-1/2+1/2*sqrt(5)", "-1/2-1/2*sqrt(5)"]);
    }

    #[test]
    fn complete_graph() {
        let edges: Vec<_> = (0..9).flat_map(|i| ((i + 1)..9).map(move |j| (i, j))).collect();
        let s = graph_spectrum(9, &edges, 256).unwrap();
        assert!(s.matches(&[(8.0, 1), (-1.0, 8)], 1e-12));
        assert!(expansion_error(&s) < 1e-12);
    }

    #[test]
    fn hermitian_gaussian_matrix() {
        // [[0, i], [-i, 0]] has eigenvalues ±1
        let re = vec![vec![0, 0], vec![0, 0]];
        let im = vec![vec![0, 1], vec![-1, 0]];
        let cp = charpoly_gaussian(&re, &im).unwrap();
        assert_eq!(cp, vec![BigInt::from(-1), BigInt::zero(), BigInt::one()]);
    }

    #[test]
    fn non_hermitian_rejected() {
        let re = vec![vec![0]];
        let im = vec![vec![1]];
        assert_eq!(charpoly_gaussian(&re, &im), Err(SpectrumError::NotReal));
    }

    #[test]
    fn bound_enforced() {
        assert_eq!(
            graph_spectrum(300, &[], 256).unwrap_err(),
            SpectrumError::TooLarge { got: 300, bound: 256 }
        );
    }
}
