//! Dessins as permutation pairs `(α, β)` on edge labels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::PermGroup;
use crate::perm::{parse_cycles, CycleType, PermError, Permutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// White vertices have valency at most two: `β² = 1`.
    Preclean,
    /// Arbitrary `β`.
    Hypermap,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "preclean" => Ok(Mode::Preclean),
            "hypermap" => Ok(Mode::Hypermap),
            other => Err(format!("unknown mode {other:?} (expected preclean|hypermap)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Preclean => "preclean",
            Mode::Hypermap => "hypermap",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DessinError {
    #[error("⟨α, β⟩ is not transitive: the map is disconnected")]
    NotTransitive,
    #[error("β is not an involution (required in preclean mode)")]
    NotInvolution,
    #[error("permutation degree {got} does not match n = {n}")]
    Degree { n: usize, got: usize },
    #[error("Euler characteristic violated: B+W+F-n = {0} is not 2-2g with g >= 0")]
    Euler(i64),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("line {line}: {msg}")]
    File { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    #[serde(rename = "B")]
    pub black: usize,
    #[serde(rename = "W")]
    pub white: usize,
    #[serde(rename = "F")]
    pub faces: usize,
    #[serde(rename = "g")]
    pub genus: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.black, self.white, self.faces, self.genus)
    }
}

impl FromStr for Signature {
    type Err = String;

    /// `(B,W,F,g)`, parentheses optional.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<usize> = inner
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad signature entry {:?}", x.trim())))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [black, white, faces, genus] => Ok(Signature { black, white, faces, genus }),
            _ => Err(format!("signature needs four entries (B,W,F,g), got {}", parts.len())),
        }
    }
}

/// `[C_α, C_β, C_γ]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Passport(pub [CycleType; 3]);

impl Passport {
    pub fn alpha(&self) -> &CycleType {
        &self.0[0]
    }
    pub fn beta(&self) -> &CycleType {
        &self.0[1]
    }
    pub fn gamma(&self) -> &CycleType {
        &self.0[2]
    }
}

impl fmt::Display for Passport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Debug for Passport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// A passport in which entries may be left open (`*`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassportPattern(pub [Option<CycleType>; 3]);

impl PassportPattern {
    pub fn matches(&self, p: &Passport) -> bool {
        self.0
            .iter()
            .zip(p.0.iter())
            .all(|(want, got)| want.as_ref().map_or(true, |w| w == got))
    }

    pub fn exact(&self) -> Option<Passport> {
        match &self.0 {
            [Some(a), Some(b), Some(c)] => Some(Passport([a.clone(), b.clone(), c.clone()])),
            _ => None,
        }
    }
}

impl From<Passport> for PassportPattern {
    fn from(p: Passport) -> Self {
        let [a, b, c] = p.0;
        PassportPattern([Some(a), Some(b), Some(c)])
    }
}

impl FromStr for PassportPattern {
    type Err = PermError;

    /// `[6^1 3^2 2^1 1^1, 2^6 1^3, 6^2 3^1]`; brackets optional; `*` leaves an entry open.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(PermError::Parse {
                column: 1,
                msg: format!("passport needs three entries, got {}", parts.len()),
            });
        }
        let mut out: [Option<CycleType>; 3] = [None, None, None];
        for (slot, part) in out.iter_mut().zip(parts) {
            if part != "*" {
                *slot = Some(part.parse()?);
            }
        }
        Ok(PassportPattern(out))
    }
}

impl FromStr for Passport {
    type Err = PermError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let pattern: PassportPattern = s.parse()?;
        pattern.exact().ok_or(PermError::Parse {
            column: 1,
            msg: "passport has open entries".into(),
        })
    }
}

/// Canonical encoding of a dessin up to simultaneous relabeling of `(α, β)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalForm(Vec<u32>);

impl CanonicalForm {
    pub(crate) fn from_raw(v: Vec<u32>) -> Self {
        CanonicalForm(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Big-endian 16-bit labels: `n`, then `α'(k), β'(k)` for each new label `k`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.0.len() / 2;
        let mut out = Vec::with_capacity(2 + 4 * n);
        out.extend_from_slice(&(n as u16).to_be_bytes());
        for &x in &self.0 {
            out.extend_from_slice(&(x as u16).to_be_bytes());
        }
        out
    }

    /// Rebuilds the canonical representative `(α, β)`.
    pub fn to_pair(&self) -> (Permutation, Permutation) {
        let n = self.0.len() / 2;
        let a = (0..n).map(|k| self.0[2 * k]).collect();
        let b = (0..n).map(|k| self.0[2 * k + 1]).collect();
        (
            Permutation::from_images(a).expect("canonical form is a bijection"),
            Permutation::from_images(b).expect("canonical form is a bijection"),
        )
    }
}

/// Relabels by breadth-first search from every root over `α, α⁻¹, β, β⁻¹`
/// and keeps the lexicographically smallest `(α'(k), β'(k))_k` sequence.
/// Returns the form and how many roots attain it (the automorphism count).
///
/// Assumes `⟨α, β⟩` is transitive.
pub(crate) fn canonical_raw(a: &[u32], b: &[u32]) -> (Vec<u32>, usize) {
    let n = a.len();
    let mut ai = vec![0u32; n];
    let mut bi = vec![0u32; n];
    for i in 0..n {
        ai[a[i] as usize] = i as u32;
        bi[b[i] as usize] = i as u32;
    }
    const UNSET: u32 = u32::MAX;
    let mut best: Vec<u32> = Vec::new();
    let mut best_count = 0usize;
    let mut cur: Vec<u32> = Vec::with_capacity(2 * n);
    let mut new_of = vec![UNSET; n];
    let mut order: Vec<u32> = Vec::with_capacity(n);
    for root in 0..n {
        new_of.iter_mut().for_each(|x| *x = UNSET);
        order.clear();
        cur.clear();
        new_of[root] = 0;
        order.push(root as u32);
        // -1: still equal to best so far, 0: already smaller, 1: worse
        let mut state: i8 = if best.is_empty() { 0 } else { -1 };
        let mut head = 0;
        while head < order.len() {
            let v = order[head] as usize;
            head += 1;
            for w in [a[v], ai[v], b[v], bi[v]] {
                let w = w as usize;
                if new_of[w] == UNSET {
                    new_of[w] = order.len() as u32;
                    order.push(w as u32);
                }
            }
            for x in [new_of[a[v] as usize], new_of[b[v] as usize]] {
                if state == -1 {
                    let pos = cur.len();
                    match x.cmp(&best[pos]) {
                        std::cmp::Ordering::Less => state = 0,
                        std::cmp::Ordering::Greater => state = 1,
                        std::cmp::Ordering::Equal => {}
                    }
                }
                cur.push(x);
            }
            if state == 1 {
                break;
            }
        }
        match state {
            0 => {
                std::mem::swap(&mut best, &mut cur);
                best_count = 1;
            }
            -1 => best_count += 1,
            _ => {}
        }
    }
    (best, best_count)
}

/// A validated dessin (or hypermap) on `n` edges.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dessin {
    n: usize,
    alpha: Permutation,
    beta: Permutation,
    mode: Mode,
}

pub(crate) fn is_transitive_raw(a: &[u32], b: &[u32]) -> bool {
    let n = a.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for w in [a[v] as usize, b[v] as usize] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

impl Dessin {
    pub fn new(n: usize, alpha: Permutation, beta: Permutation, mode: Mode) -> Result<Self, DessinError> {
        for p in [&alpha, &beta] {
            if p.degree() != n {
                return Err(DessinError::Degree { n, got: p.degree() });
            }
        }
        if mode == Mode::Preclean && !beta.then(&beta).is_identity() {
            return Err(DessinError::NotInvolution);
        }
        if !is_transitive_raw(alpha.images(), beta.images()) {
            return Err(DessinError::NotTransitive);
        }
        let d = Dessin { n, alpha, beta, mode };
        d.try_signature()?;
        Ok(d)
    }

    /// Parses cycle notation for both generators.
    pub fn from_cycles(n: usize, alpha: &str, beta: &str, mode: Mode) -> Result<Self, DessinError> {
        Dessin::new(n, parse_cycles(n, alpha)?, parse_cycles(n, beta)?, mode)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn alpha(&self) -> &Permutation {
        &self.alpha
    }
    pub fn beta(&self) -> &Permutation {
        &self.beta
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `γ = (αβ)⁻¹`, so that `αβγ = 1` under left-to-right composition.
    pub fn gamma(&self) -> Permutation {
        self.alpha.then(&self.beta).inverse()
    }

    fn try_signature(&self) -> Result<Signature, DessinError> {
        let b = self.alpha.cycle_count();
        let w = self.beta.cycle_count();
        let f = self.gamma().cycle_count();
        let chi = b as i64 + w as i64 + f as i64 - self.n as i64;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(DessinError::Euler(chi));
        }
        Ok(Signature {
            black: b,
            white: w,
            faces: f,
            genus: ((2 - chi) / 2) as usize,
        })
    }

    pub fn signature(&self) -> Signature {
        self.try_signature().expect("validated at construction")
    }

    pub fn passport(&self) -> Passport {
        Passport([
            self.alpha.cycle_type(),
            self.beta.cycle_type(),
            self.gamma().cycle_type(),
        ])
    }

    pub fn group(&self) -> PermGroup {
        PermGroup::new(self.n, &[self.alpha.clone(), self.beta.clone()]).expect("same degree")
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        CanonicalForm(canonical_raw(self.alpha.images(), self.beta.images()).0)
    }

    /// Number of relabelings commuting with both `α` and `β`.
    pub fn automorphism_count(&self) -> usize {
        canonical_raw(self.alpha.images(), self.beta.images()).1
    }

    /// The canonical representative of this dessin's class.
    pub fn canonical(&self) -> Dessin {
        let (alpha, beta) = self.canonical_form().to_pair();
        Dessin {
            n: self.n,
            alpha,
            beta,
            mode: self.mode,
        }
    }

    /// Relabels edges by `σ`.
    pub fn relabel(&self, sigma: &Permutation) -> Dessin {
        Dessin {
            n: self.n,
            alpha: self.alpha.conjugate_by(sigma),
            beta: self.beta.conjugate_by(sigma),
            mode: self.mode,
        }
    }

    /// Text file form: `n=`, `alpha=`, `beta=`, `mode=` lines.
    pub fn to_file_string(&self) -> String {
        format!(
            "n={}\nalpha={}\nbeta={}\nmode={}\n",
            self.n, self.alpha, self.beta, self.mode
        )
    }

    pub fn parse_file(text: &str) -> Result<Self, DessinError> {
        let mut n: Option<usize> = None;
        let mut alpha: Option<(usize, String)> = None;
        let mut beta: Option<(usize, String)> = None;
        let mut mode = Mode::Preclean;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(DessinError::File {
                line,
                msg: format!("expected key=value, got {content:?}"),
            })?;
            let value = value.trim();
            match key.trim() {
                "n" => {
                    n = Some(value.parse().map_err(|_| DessinError::File {
                        line,
                        msg: format!("bad n {value:?}"),
                    })?)
                }
                "alpha" => alpha = Some((line, value.to_string())),
                "beta" => beta = Some((line, value.to_string())),
                "mode" => {
                    mode = value
                        .parse()
                        .map_err(|msg| DessinError::File { line, msg })?
                }
                other => {
                    return Err(DessinError::File {
                        line,
                        msg: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        let missing = |what: &str| DessinError::File {
            line: text.lines().count().max(1),
            msg: format!("missing {what}"),
        };
        let n = n.ok_or_else(|| missing("n"))?;
        let parse = |(line, s): (usize, String)| {
            parse_cycles(n, &s).map_err(|e| DessinError::File {
                line,
                msg: e.to_string(),
            })
        };
        let alpha = parse(alpha.ok_or_else(|| missing("alpha"))?)?;
        let beta = parse(beta.ok_or_else(|| missing("beta"))?)?;
        Dessin::new(n, alpha, beta, mode)
    }

    pub fn report(&self) -> DessinReport {
        let passport = self.passport();
        DessinReport {
            schema: "dessin/1".into(),
            n: self.n,
            alpha: self.alpha.to_string(),
            beta: self.beta.to_string(),
            mode: self.mode,
            signature: self.signature(),
            passport: passport.0.iter().map(|c| c.to_string()).collect(),
            group_order: self.group().order().to_string(),
        }
    }
}

pub fn make_dessin(n: usize, alpha: Permutation, beta: Permutation, mode: Mode) -> Result<Dessin, DessinError> {
    Dessin::new(n, alpha, beta, mode)
}

impl fmt::Debug for Dessin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dessin(n={}, α={}, β={})", self.n, self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DessinReport {
    pub schema: String,
    pub n: usize,
    pub alpha: String,
    pub beta: String,
    pub mode: Mode,
    pub signature: Signature,
    pub passport: Vec<String>,
    pub group_order: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b1() -> Dessin {
        Dessin::from_cycles(4, "(2,3)", "(1,2)(3,4)", Mode::Preclean).unwrap()
    }

    #[test]
    fn single_edge() {
        let d = Dessin::from_cycles(1, "", "", Mode::Preclean).unwrap();
        let s = d.signature();
        assert_eq!((s.black, s.white, s.faces, s.genus), (1, 1, 1, 0));
        assert_eq!(d.automorphism_count(), 1);
    }

    #[test]
    fn b1_signature_and_passport() {
        let d = b1();
        assert_eq!(d.signature().to_string(), "(3,2,1,0)");
        assert_eq!(d.passport().to_string(), "[2^1 1^2, 2^2, 4^1]");
        // the path is symmetric under (1,4)(2,3)
        assert_eq!(d.automorphism_count(), 2);
    }

    #[test]
    fn disconnected_rejected() {
        assert_eq!(
            Dessin::from_cycles(4, "", "(1,2)", Mode::Preclean),
            Err(DessinError::NotTransitive)
        );
    }

    #[test]
    fn non_involution_only_in_hypermap_mode() {
        assert_eq!(
            Dessin::from_cycles(3, "", "(1,2,3)", Mode::Preclean),
            Err(DessinError::NotInvolution)
        );
        assert!(Dessin::from_cycles(3, "", "(1,2,3)", Mode::Hypermap).is_ok());
    }

    #[test]
    fn mermin_square_dessin_is_genus_one() {
        let d = Dessin::from_cycles(9, "(1,2,4,8,7,3)(5,9,6)", "(2,5)(3,6)(4,7)(8,9)", Mode::Preclean)
            .unwrap();
        assert_eq!(d.signature().to_string(), "(2,5,2,1)");
        assert_eq!(d.passport().to_string(), "[6^1 3^1, 2^4 1^1, 6^1 3^1]");
    }

    #[test]
    fn star_automorphisms() {
        let d = Dessin::from_cycles(3, "(1,2,3)", "", Mode::Preclean).unwrap();
        assert_eq!(d.automorphism_count(), 3);
    }

    #[test]
    fn canonical_form_of_relabeling() {
        let d = b1();
        let sigma = parse_cycles(4, "(1,4)(2,3)").unwrap();
        assert_eq!(d.canonical_form(), d.relabel(&sigma).canonical_form());
        let b2 = Dessin::from_cycles(4, "(1,2)(3,4)", "(2,3)", Mode::Preclean).unwrap();
        assert_ne!(d.canonical_form(), b2.canonical_form());
        assert_eq!(d.canonical().canonical_form(), d.canonical_form());
    }

    #[test]
    fn file_round_trip() {
        let d = b1();
        let text = d.to_file_string();
        assert_eq!(Dessin::parse_file(&text).unwrap(), d);
        let with_comment = format!("# comment\n{text}");
        assert_eq!(Dessin::parse_file(&with_comment).unwrap(), d);
    }

    #[test]
    fn file_errors_name_lines() {
        let err = Dessin::parse_file("n=4\nalpha=(1,2\nbeta=()\n").unwrap_err();
        assert!(matches!(err, DessinError::File { line: 2, .. }), "{err:?}");
        let err = Dessin::parse_file("n=4\nalpha=()\n").unwrap_err();
        assert!(matches!(err, DessinError::File { .. }));
        let err = Dessin::parse_file("n=2\nalpha=()\nbeta=(1,2)\nmode=weird\n").unwrap_err();
        assert!(matches!(err, DessinError::File { line: 4, .. }));
    }

    #[test]
    fn passport_pattern_parsing() {
        let p: PassportPattern = "[*, 2^4 1^2, 5^2]".parse().unwrap();
        assert!(p.0[0].is_none());
        assert_eq!(p.0[2].as_ref().unwrap().to_string(), "5^2");
        let full: Passport = "[6^1 3^2 2^1 1^1, 2^6 1^3, 6^2 3^1]".parse().unwrap();
        assert_eq!(full.to_string(), "[6^1 3^2 2^1 1^1, 2^6 1^3, 6^2 3^1]");
        assert!("[*, 2, 2]".parse::<Passport>().is_err());
    }

    #[test]
    fn json_report_schema() {
        let r = b1().report();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["signature"]["B"], 3);
        assert_eq!(v["group_order"], "8");
        assert_eq!(v["passport"][2], "4^1");
    }

    #[test]
    fn signature_parses_its_display() {
        let s: Signature = "(4,6,2,0)".parse().unwrap();
        assert_eq!(s.to_string(), "(4,6,2,0)");
        assert_eq!("4, 6, 2, 0".parse::<Signature>().unwrap(), s);
        assert!("(1,2,3)".parse::<Signature>().is_err());
    }
}
