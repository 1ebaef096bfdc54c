//! Exact coefficient fields: the rationals and multiquadratic extensions
//! `Q(i, √p₁, …, √p_k)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn to_c64(&self) -> Complex64;

    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // huge numerator and denominator: shift both down first
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(900);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Splits `n ≠ 0` into `(k, s)` with `n = k²·s` and `s` squarefree, sign kept in `s`.
pub fn square_free_split(n: i64) -> (i64, i64) {
    assert!(n != 0);
    let sign = n.signum();
    let mut m = n.unsigned_abs();
    let mut k: u64 = 1;
    let mut s: u64 = 1;
    let mut p: u64 = 2;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        k *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    s *= m;
    (k as i64, sign * s as i64)
}

fn prime_factors(m: i64) -> Vec<i64> {
    let mut out = Vec::new();
    if m < 0 {
        out.push(-1);
    }
    let mut m = m.unsigned_abs();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p as i64);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m as i64);
    }
    out
}

/// `Σ c_m · r_m` over squarefree `m`, where `r_m = √|m|` for `m > 0` and `i·√|m|` for `m < 0`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Mq {
    terms: BTreeMap<i64, BigRational>,
}

impl Mq {
    pub fn rational(r: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&r) {
            terms.insert(1, r);
        }
        Mq { terms }
    }

    pub fn integer(v: i64) -> Self {
        Mq::rational(BigRational::from_integer(v.into()))
    }

    pub fn i() -> Self {
        Mq::basis(-1)
    }

    fn basis(m: i64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, One::one());
        Mq { terms }
    }

    /// Principal square root of a rational (imaginary for negatives).
    pub fn sqrt_rational(r: &BigRational) -> Result<Self, String> {
        if Zero::is_zero(r) {
            return Ok(Mq::zero());
        }
        // √(a/b) = √(ab)/b
        let ab: BigInt = r.numer() * r.denom();
        let ab = ab
            .to_i64()
            .ok_or_else(|| format!("radicand {r} is too large"))?;
        let (k, s) = square_free_split(ab);
        let mut out = Mq::basis(s);
        let scale = BigRational::new(k.into(), r.denom().abs());
        out = out.scale(&scale);
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Mq::default();
        if Zero::is_zero(c) {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(*m, v * c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(m, v)| (*m, v))
    }

    /// `Some(q)` when the element is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(Zero::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: i64, c: BigRational) {
        if Zero::is_zero(&c) {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Zero::zero);
        *e += c;
        if Zero::is_zero(e) {
            self.terms.remove(&m);
        }
    }

    fn basis_product(a: i64, b: i64) -> (BigRational, i64) {
        let (ua, ub) = (a.unsigned_abs(), b.unsigned_abs());
        let g = ua.gcd(&ub);
        let s = (ua / g) * (ub / g);
        let negatives = (a < 0) as u8 + (b < 0) as u8;
        let g = BigRational::from_integer(BigInt::from(g));
        match negatives {
            0 => (g, s as i64),
            1 => (g, -(s as i64)),
            _ => (-g, s as i64),
        }
    }

    /// Generators `q` (a prime or `-1`) occurring in some radicand.
    fn generators(&self) -> Vec<i64> {
        let mut gens: Vec<i64> = self
            .terms
            .keys()
            .filter(|&&m| m != 1)
            .flat_map(|&m| prime_factors(m))
            .collect();
        gens.sort_unstable();
        gens.dedup();
        gens
    }

    /// The automorphism negating `√q` (or `i` when `q = -1`).
    fn conjugate(&self, q: i64) -> Self {
        let mut out = Mq::default();
        for (&m, v) in &self.terms {
            let flips = if q == -1 { m < 0 } else { m % q == 0 };
            out.terms.insert(m, if flips { -v } else { v.clone() });
        }
        out
    }

    pub fn conj_complex(&self) -> Self {
        self.conjugate(-1)
    }
}

impl Field for Mq {
    fn zero() -> Self {
        Mq::default()
    }
    fn one() -> Self {
        Mq::integer(1)
    }
    fn from_i64(v: i64) -> Self {
        Mq::integer(v)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&m, v) in &o.terms {
            out.add_term(m, v.clone());
        }
        out
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = Mq::default();
        for (&a, va) in &self.terms {
            for (&b, vb) in &o.terms {
                let (c, m) = Mq::basis_product(a, b);
                out.add_term(m, c * va * vb);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -v.clone();
        }
        out
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(Mq::rational(r.recip()));
        }
        // x⁻¹ = σ(x) · (x σ(x))⁻¹ with x σ(x) free of the generator σ negates
        let q = *self.generators().last().expect("irrational element has a generator");
        let c = self.conjugate(q);
        let norm = self.mul(&c);
        Some(c.mul(&norm.inv()?))
    }
    fn to_c64(&self) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (&m, v) in &self.terms {
            let c = rational_to_f64(v);
            let r = (m.unsigned_abs() as f64).sqrt();
            if m < 0 {
                z.im += c * r;
            } else {
                z.re += c * r;
            }
        }
        z
    }
}

impl fmt::Display for Mq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, v) in &self.terms {
            let (neg, mag) = if v.is_negative() { (true, -v.clone()) } else { (false, v.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = match m {
                1 => String::new(),
                -1 => "i".to_string(),
                m if m < 0 => format!("i*sqrt({})", -m),
                m => format!("sqrt({m})"),
            };
            if unit.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{unit}")?;
            } else {
                write!(f, "{mag}*{unit}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12 * (1.0 + b.norm())
    }

    #[test]
    fn square_free_parts() {
        assert_eq!(square_free_split(8), (2, 2));
        assert_eq!(square_free_split(-12), (2, -3));
        assert_eq!(square_free_split(7), (1, 7));
        assert_eq!(square_free_split(1), (1, 1));
        assert_eq!(square_free_split(-1), (1, -1));
    }

    #[test]
    fn radical_products() {
        let s2 = Mq::sqrt_rational(&q(2, 1)).unwrap();
        assert_eq!(s2.mul(&s2), Mq::integer(2));
        let i = Mq::i();
        assert_eq!(i.mul(&i), Mq::integer(-1));
        let s7i = Mq::sqrt_rational(&q(-7, 1)).unwrap();
        assert_eq!(s7i.mul(&s7i), Mq::integer(-7));
        let s6 = Mq::sqrt_rational(&q(6, 1)).unwrap();
        let s3 = Mq::sqrt_rational(&q(3, 1)).unwrap();
        assert_eq!(s2.mul(&s3), s6);
        assert_eq!(s6.mul(&s2), Mq::integer(2).mul(&s3));
    }

    #[test]
    fn sqrt_of_fraction() {
        let r = Mq::sqrt_rational(&q(2, 3)).unwrap();
        assert!(close(r.to_c64(), Complex64::new((2.0f64 / 3.0).sqrt(), 0.0)));
        assert_eq!(r.mul(&r), Mq::rational(q(2, 3)));
        let s8 = Mq::sqrt_rational(&q(8, 1)).unwrap();
        assert_eq!(s8.to_string(), "2*sqrt(2)");
    }

    #[test]
    fn inverse_in_a_biquadratic_field() {
        // 1 + √2 + i√3 + √5
        let x = Mq::integer(1)
            .add(&Mq::sqrt_rational(&q(2, 1)).unwrap())
            .add(&Mq::sqrt_rational(&q(-3, 1)).unwrap())
            .add(&Mq::sqrt_rational(&q(5, 1)).unwrap());
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), Mq::one());
        assert!(close(y.to_c64(), Complex64::new(1.0, 0.0) / x.to_c64()));
    }

    #[test]
    fn complex_conjugation() {
        let z = Mq::integer(3).add(&Mq::sqrt_rational(&q(-7, 1)).unwrap());
        assert!(close(z.conj_complex().to_c64(), z.to_c64().conj()));
        assert!(z.mul(&z.conj_complex()).as_rational().is_some());
    }

    #[test]
    fn rational_field_ops() {
        let a = q(3, 4);
        assert_eq!(Field::mul(&a, &Field::inv(&a).unwrap()), <BigRational as One>::one());
        assert!(Field::inv(&<BigRational as Zero>::zero()).is_none());
    }
}
