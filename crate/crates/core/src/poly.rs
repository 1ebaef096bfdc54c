//! Dense univariate polynomials over an exact [`Field`], with square-free
//! decomposition and a floating-point simultaneous root finder.

use std::fmt;

use num_complex::Complex64;

use crate::field::Field;

/// Coefficients lowest degree first; no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F: Field> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Poly::new(vec![c])
    }

    pub fn x() -> Self {
        Poly::new(vec![F::zero(), F::one()])
    }

    /// `Π (x - r)` over `roots`.
    pub fn from_roots(roots: &[F]) -> Self {
        roots
            .iter()
            .fold(Poly::one(), |acc, r| acc.mul(&Poly::new(vec![r.neg(), F::one()])))
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = F::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z).add(o.coeffs.get(i).unwrap_or(&z)))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn scale(&self, c: &F) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul(&F::from_i64(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc.mul(x).add(c))
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_c64()).collect()
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        horner(&self.to_c64(), z)
    }

    /// `(q, r)` with `self = q·d + r`, `deg r < deg d`.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dl = d.leading().expect("division by the zero polynomial");
        let inv = dl.inv().expect("nonzero leading coefficient");
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].mul(&inv);
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].sub(&c.mul(dj));
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&l.inv().expect("nonzero")),
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `self = c · Π aᵢ^i`, returning the
    /// non-constant monic `(aᵢ, i)`.
    pub fn square_free(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.divrem(&a0).0;
        let mut c = df.divrem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.divrem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }
}

impl<F: Field + fmt::Display> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*x"),
                _ => format!("({c})*x^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

const ABERTH_MAX_ITER: usize = 1000;

/// All complex roots of a polynomial with simple roots (Aberth–Ehrlich, then
/// Newton polishing). Coefficients lowest degree first.
pub fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let c: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    if n == 1 {
        return vec![-c[0]];
    }
    // Fujiwara bound for the initial circle
    let radius = (0..n)
        .map(|k| {
            let f = if k == 0 { 0.5 } else { 1.0 };
            (f * c[k].norm()).powf(1.0 / (n - k) as f64)
        })
        .fold(0.0, f64::max)
        * 2.0;
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let mut converged = vec![false; n];
    for _ in 0..ABERTH_MAX_ITER {
        if converged.iter().all(|&b| b) {
            break;
        }
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let (p, dp) = horner_with_derivative(&c, z[k]);
            if p.norm() == 0.0 {
                converged[k] = true;
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[k] -= w;
            if w.norm() <= 1e-15 * z[k].norm().max(1e-300) {
                converged[k] = true;
            }
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = horner_with_derivative(&c, *zk);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *zk -= step;
        }
    }
    z
}

/// Roots with multiplicities: exact square-free decomposition, then [`aberth`]
/// on each factor.
pub fn roots_with_multiplicity<F: Field>(p: &Poly<F>) -> Vec<(Complex64, usize)> {
    let mut out = Vec::new();
    for (factor, m) in p.square_free() {
        for r in aberth(&factor.to_c64()) {
            out.push((r, m));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn qp(c: &[i64]) -> Poly<Q> {
        Poly::new(c.iter().map(|&v| Q::from_i64(v)).collect())
    }

    #[test]
    fn division_identity() {
        let a = qp(&[1, -3, 0, 2, 5]);
        let b = qp(&[2, 1, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn yun_recovers_multiplicities() {
        // (x-1)^3 (x+2)^2 (x^2+1)
        let f = qp(&[-1, 1]).pow(3).mul(&qp(&[2, 1]).pow(2)).mul(&qp(&[1, 0, 1]));
        let sf = f.square_free();
        assert_eq!(sf, vec![(qp(&[1, 0, 1]), 1), (qp(&[2, 1]), 2), (qp(&[-1, 1]), 3)]);
    }

    #[test]
    fn aberth_on_known_roots() {
        let f = qp(&[-6, 11, -6, 1]); // (x-1)(x-2)(x-3)
        let mut r: Vec<f64> = aberth(&f.to_c64()).iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, e) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - e).abs() < 1e-12);
        }
    }

    #[test]
    fn aberth_roots_of_unity() {
        let mut c = vec![Complex64::new(0.0, 0.0); 13];
        c[0] = Complex64::new(-1.0, 0.0);
        c[12] = Complex64::new(1.0, 0.0);
        for z in aberth(&c) {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powi(12) - 1.0).norm() < 1e-11);
        }
    }

    #[test]
    fn repeated_roots_through_square_free_split() {
        let f = qp(&[-2, 0, 1]).pow(5).mul(&qp(&[3, 1]));
        let mut roots = roots_with_multiplicity(&f);
        roots.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());
        assert_eq!(roots.len(), 3);
        assert!((roots[0].0.re + 3.0).abs() < 1e-12 && roots[0].1 == 1);
        assert!((roots[1].0.re + 2f64.sqrt()).abs() < 1e-12 && roots[1].1 == 5);
        assert!((roots[2].0.re - 2f64.sqrt()).abs() < 1e-12 && roots[2].1 == 5);
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let a = qp(&[-1, 1]).mul(&qp(&[1, 1]));
        let b = qp(&[-1, 1]).mul(&qp(&[5, 1])).scale(&Q::from_i64(7));
        assert_eq!(a.gcd(&b), qp(&[-1, 1]));
    }
}
