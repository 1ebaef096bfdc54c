//! Permutations of `{1..n}` and their cycle types.
//!
//! Internally points are `0..n`; the textual cycle notation is 1-based.
//!
//! Composition is left-to-right: `p.then(&q)` (also [`compose`]) maps `i` to
//! `q(p(i))`. Every product in the crate follows this convention, including
//! the face permutation `γ = (αβ)⁻¹`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("not a bijection on 1..{0}")]
    NotBijection(usize),
    #[error("label {label} out of range 1..{degree}")]
    LabelOutOfRange { label: usize, degree: usize },
    #[error("malformed cycle notation at column {column}: {msg}")]
    Parse { column: usize, msg: String },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    /// Builds from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(PermError::NotBijection(n));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Builds from disjoint 1-based cycles on `n` points.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &label) in cycle.iter().enumerate() {
                if label == 0 || label > n {
                    return Err(PermError::LabelOutOfRange { label, degree: n });
                }
                if touched[label - 1] {
                    return Err(PermError::NotBijection(n));
                }
                touched[label - 1] = true;
                let next = cycle[(k + 1) % cycle.len()];
                images[label - 1] = (next - 1) as u32;
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 0-based point.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Permutation { images }
    }

    pub fn pow(&self, mut k: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            k >>= 1;
        }
        acc
    }

    /// `σ⁻¹ · self · σ`, i.e. the relabeling of `self` by `σ`.
    pub fn conjugate_by(&self, sigma: &Permutation) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for i in 0..self.degree() {
            images[sigma.apply(i)] = sigma.images[self.apply(i)];
        }
        Permutation { images }
    }

    /// Disjoint cycles (0-based), each starting at its smallest point, fixed points included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.apply(i);
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if !seen[start] {
                count += 1;
                let mut i = start;
                while !seen[i] {
                    seen[i] = true;
                    i = self.apply(i);
                }
            }
        }
        count
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.cycles().iter().map(Vec::len).collect())
    }

    /// Order of the permutation (lcm of cycle lengths).
    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| num_integer::lcm(acc, c.len() as u64))
    }

    pub fn fixes(&self, i: usize) -> bool {
        self.apply(i) == i
    }
}

/// `p` first, then `q`.
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation, PermError> {
    if p.degree() != q.degree() {
        return Err(PermError::DegreeMismatch(p.degree(), q.degree()));
    }
    Ok(p.then(q))
}

pub fn cycle_type(p: &Permutation) -> CycleType {
    p.cycle_type()
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles() {
            if cycle.len() < 2 {
                continue;
            }
            any = true;
            write!(f, "(")?;
            for (k, i) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parses 1-based cycle notation such as `(1,2,4,3)(5,7,6,8)`; `()` or an empty
/// string is the identity. Whitespace is ignored.
pub fn parse_cycles(n: usize, text: &str) -> Result<Permutation, PermError> {
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut current: Option<Vec<usize>> = None;
    let mut number = String::new();
    // columns refer to the original text; whitespace is skipped
    let bytes: Vec<(usize, char)> = text
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let flush = |number: &mut String, current: &mut Option<Vec<usize>>, column: usize| {
        if number.is_empty() {
            return Ok(());
        }
        let value: usize = number.parse().map_err(|_| PermError::Parse {
            column,
            msg: format!("bad label {number:?}"),
        })?;
        match current {
            Some(c) => c.push(value),
            None => {
                return Err(PermError::Parse {
                    column,
                    msg: "label outside parentheses".into(),
                })
            }
        }
        number.clear();
        Ok(())
    };
    for &(col, ch) in &bytes {
        let column = col + 1;
        match ch {
            '(' => {
                if current.is_some() {
                    return Err(PermError::Parse {
                        column,
                        msg: "nested '('".into(),
                    });
                }
                current = Some(Vec::new());
            }
            ')' => {
                flush(&mut number, &mut current, column)?;
                match current.take() {
                    Some(c) => {
                        if !c.is_empty() {
                            cycles.push(c)
                        }
                    }
                    None => {
                        return Err(PermError::Parse {
                            column,
                            msg: "unmatched ')'".into(),
                        })
                    }
                }
            }
            ',' => {
                if number.is_empty() {
                    return Err(PermError::Parse {
                        column,
                        msg: "empty label".into(),
                    });
                }
                flush(&mut number, &mut current, column)?
            }
            c if c.is_ascii_digit() => {
                if current.is_none() {
                    return Err(PermError::Parse {
                        column,
                        msg: "label outside parentheses".into(),
                    });
                }
                number.push(c)
            }
            other => {
                return Err(PermError::Parse {
                    column,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    if current.is_some() {
        return Err(PermError::Parse {
            column: text.chars().count(),
            msg: "unclosed '('".into(),
        });
    }
    Permutation::from_cycles(n, &cycles)
}

/// Largest label mentioned in a cycle string (0 for the identity).
pub fn max_label(text: &str) -> usize {
    text.split(|c: char| !c.is_ascii_digit())
        .filter_map(|t| t.parse::<usize>().ok())
        .max()
        .unwrap_or(0)
}

/// Multiset of cycle lengths, sorted descending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut lengths: Vec<usize>) -> Self {
        lengths.retain(|&l| l > 0);
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        CycleType(lengths)
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn cycle_count(&self) -> usize {
        self.0.len()
    }

    /// `(length, multiplicity)` pairs, longest first.
    pub fn factors(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &l in &self.0 {
            match out.last_mut() {
                Some((len, m)) if *len == l => *m += 1,
                _ => out.push((l, 1)),
            }
        }
        out
    }

    /// A permutation with this cycle type: consecutive labels fill each cycle.
    pub fn representative(&self) -> Permutation {
        let n = self.total();
        let mut images = vec![0u32; n];
        let mut start = 0;
        for &l in &self.0 {
            for k in 0..l {
                images[start + k] = (start + (k + 1) % l) as u32;
            }
            start += l;
        }
        Permutation::from_images_unchecked(images)
    }

    /// All integer partitions of `n`, each as a cycle type.
    pub fn all_of_degree(n: usize) -> Vec<CycleType> {
        fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<CycleType>) {
            if rem == 0 {
                out.push(CycleType(cur.clone()));
                return;
            }
            for part in (1..=rem.min(max)).rev() {
                cur.push(part);
                rec(rem - part, part, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for CycleType {
    /// Rendered as `6^1 3^2 2^1 1^1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors()
            .iter()
            .map(|(l, m)| format!("{l}^{m}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for CycleType {
    type Err = PermError;

    /// Accepts `6^1 3^2 2^1 1^1`, `6^1.3^2`, `6 3 3 2 1` (bare lengths).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lengths = Vec::new();
        for (idx, token) in s
            .split(|c: char| c.is_whitespace() || c == '.' || c == '·')
            .filter(|t| !t.is_empty())
            .enumerate()
        {
            let bad = || PermError::Parse {
                column: idx + 1,
                msg: format!("bad cycle-type factor {token:?}"),
            };
            let (l, m) = match token.split_once('^') {
                Some((l, m)) => (
                    l.parse::<usize>().map_err(|_| bad())?,
                    m.parse::<usize>().map_err(|_| bad())?,
                ),
                None => (token.parse::<usize>().map_err(|_| bad())?, 1),
            };
            if l == 0 {
                return Err(bad());
            }
            lengths.extend(std::iter::repeat(l).take(m));
        }
        Ok(CycleType::new(lengths))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Permutation {
        parse_cycles(n, s).unwrap()
    }

    #[test]
    fn involution_squared_is_identity() {
        let t = p(2, "(1,2)");
        assert!(compose(&t, &t).unwrap().is_identity());
    }

    #[test]
    fn three_cycle_squared() {
        let c = p(3, "(1,2,3)");
        assert_eq!(compose(&c, &c).unwrap(), p(3, "(1,3,2)"));
    }

    #[test]
    fn left_to_right_product_of_b3_generators() {
        let a = p(4, "(1,2,4,3)");
        let b = p(4, "(1,2)(3,4)");
        let ab = compose(&a, &b).unwrap();
        assert_eq!(ab, p(4, "(2,3)"));
        // inverse is also a transposition: three face cycles
        assert_eq!(ab.inverse().cycle_type().to_string(), "2^1 1^2");
        assert_eq!(ab.inverse().cycle_count(), 3);
    }

    #[test]
    fn degree_mismatch() {
        assert_eq!(
            compose(&Permutation::identity(3), &Permutation::identity(4)),
            Err(PermError::DegreeMismatch(3, 4))
        );
    }

    #[test]
    fn cycle_types_from_published_generators() {
        assert_eq!(Permutation::identity(4).cycle_type().to_string(), "1^4");
        assert_eq!(p(7, "(2,7,6,5)(3,4)").cycle_type().to_string(), "4^1 2^1 1^1");
        assert_eq!(p(9, "(1,2,4,8,7,3)(5,9,6)").cycle_type().to_string(), "6^1 3^1");
    }

    #[test]
    fn printing_and_parsing() {
        let q = p(8, "(1,2,4,3)(5,7,6,8)");
        assert_eq!(q.to_string(), "(1,2,4,3)(5,7,6,8)");
        assert_eq!(Permutation::identity(5).to_string(), "()");
        assert!(p(3, "").is_identity());
        assert!(p(3, "()").is_identity());
        assert_eq!(p(3, " ( 1 , 2 ) ").to_string(), "(1,2)");
    }

    #[test]
    fn parse_errors_carry_columns() {
        match parse_cycles(4, "(1,2)(3,x)") {
            Err(PermError::Parse { column, .. }) => assert_eq!(column, 9),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_cycles(3, "(1,4)"),
            Err(PermError::LabelOutOfRange { label: 4, degree: 3 })
        ));
        assert!(matches!(
            parse_cycles(3, "(1,2)(2,3)"),
            Err(PermError::NotBijection(3))
        ));
        assert!(matches!(parse_cycles(3, "(1,2"), Err(PermError::Parse { .. })));
    }

    #[test]
    fn cycle_type_text_forms() {
        let a: CycleType = "6^1 3^2 2^1 1^1".parse().unwrap();
        let b: CycleType = "1 2 3 3 6".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total(), 15);
        assert_eq!(a.representative().cycle_type(), a);
    }

    #[test]
    fn partitions_of_ten() {
        assert_eq!(CycleType::all_of_degree(10).len(), 42);
        assert_eq!(CycleType::all_of_degree(1).len(), 1);
    }

    #[test]
    fn conjugation_relabels() {
        let a = p(4, "(1,2,3)");
        let s = p(4, "(1,4)");
        assert_eq!(a.conjugate_by(&s), p(4, "(4,2,3)"));
    }
}
