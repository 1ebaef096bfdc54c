//! Exhaustive enumeration of dessins and hypermaps up to simultaneous conjugation.
//!
//! Work is split by the cycle type of `α` (a conjugation invariant), with one
//! fixed representative `α` per type. Within a partition every admissible `β`
//! is generated, non-transitive pairs are dropped, and classes are deduplicated
//! by canonical form. Partitions never share classes, so they run independently
//! and the merged output is sorted by canonical form.

use std::collections::HashSet;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::dessin::{canonical_raw, is_transitive_raw, CanonicalForm, Dessin, Mode, PassportPattern, Signature};
use crate::perm::CycleType;

/// Largest index enumerated without an explicit override.
pub const DEFAULT_MAX_INDEX: usize = 13;

/// Published class counts, index 1 first.
pub const PRECLEAN_COUNTS: [u64; 13] = [1, 3, 3, 10, 15, 56, 131, 482, 1551, 5916, 22171, 90033, 370199];
pub const HYPERMAP_COUNTS: [u64; 7] = [1, 3, 7, 26, 97, 624, 4163];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("index must be at least 1")]
    ZeroIndex,
    #[error("index {n} exceeds the resource bound {bound} (raise it with DESSIN_MAX_INDEX or --max-index)")]
    ResourceBound { n: usize, bound: usize },
    #[error("passport entry sums to {got}, expected {n}")]
    PassportDegree { n: usize, got: usize },
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Debug, Default)]
pub struct Filters {
    pub passport: Option<PassportPattern>,
    pub signature: Option<Signature>,
    pub group_order: Option<BigUint>,
}

#[derive(Clone, Debug)]
pub struct EnumerationTask {
    pub n: usize,
    pub mode: Mode,
    pub filters: Filters,
    pub max_index: usize,
}

impl EnumerationTask {
    pub fn new(n: usize, mode: Mode) -> Self {
        EnumerationTask {
            n,
            mode,
            filters: Filters::default(),
            max_index: DEFAULT_MAX_INDEX,
        }
    }

    pub fn with_passport(mut self, p: PassportPattern) -> Self {
        self.filters.passport = Some(p);
        self
    }

    pub fn with_group_order(mut self, order: impl Into<BigUint>) -> Self {
        self.filters.group_order = Some(order.into());
        self
    }

    pub fn with_max_index(mut self, bound: usize) -> Self {
        self.max_index = bound;
        self
    }

    fn validate(&self) -> Result<(), EnumError> {
        if self.n == 0 {
            return Err(EnumError::ZeroIndex);
        }
        if self.n > self.max_index {
            return Err(EnumError::ResourceBound {
                n: self.n,
                bound: self.max_index,
            });
        }
        if let Some(p) = &self.filters.passport {
            for ct in p.0.iter().flatten() {
                if ct.total() != self.n {
                    return Err(EnumError::PassportDegree {
                        n: self.n,
                        got: ct.total(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Whether `count` for this index is a published value.
pub fn published_count(mode: Mode, n: usize) -> Option<u64> {
    let table: &[u64] = match mode {
        Mode::Preclean => &PRECLEAN_COUNTS,
        Mode::Hypermap => &HYPERMAP_COUNTS,
    };
    n.checked_sub(1).and_then(|i| table.get(i)).copied()
}

/// Calls `f` with the images of every permutation of `0..n` having cycle type `ct`.
pub fn for_each_of_cycle_type(ct: &CycleType, mut f: impl FnMut(&[u32])) {
    let n = ct.total();
    let mut lengths: Vec<(usize, usize)> = ct.factors();
    let mut images = vec![u32::MAX; n];
    let mut cycle: Vec<usize> = Vec::with_capacity(n);
    fn rec(
        images: &mut Vec<u32>,
        lengths: &mut Vec<(usize, usize)>,
        cycle: &mut Vec<usize>,
        f: &mut dyn FnMut(&[u32]),
    ) {
        let Some(start) = images.iter().position(|&x| x == u32::MAX) else {
            f(images);
            return;
        };
        for li in 0..lengths.len() {
            let (len, mult) = lengths[li];
            if mult == 0 {
                continue;
            }
            lengths[li].1 -= 1;
            cycle.clear();
            cycle.push(start);
            // reserve `start` while choosing the rest of its cycle
            images[start] = start as u32;
            fill(images, lengths, cycle, len, f);
            images[start] = u32::MAX;
            lengths[li].1 += 1;
        }
    }
    fn fill(
        images: &mut Vec<u32>,
        lengths: &mut Vec<(usize, usize)>,
        cycle: &mut Vec<usize>,
        len: usize,
        f: &mut dyn FnMut(&[u32]),
    ) {
        if cycle.len() == len {
            let snapshot: Vec<u32> = cycle.iter().map(|&c| images[c]).collect();
            for k in 0..len {
                images[cycle[k]] = cycle[(k + 1) % len] as u32;
            }
            let saved = cycle.clone();
            rec(images, lengths, cycle, f);
            for (k, &c) in saved.iter().enumerate() {
                images[c] = snapshot[k];
            }
            *cycle = saved;
            return;
        }
        let start = cycle[0];
        for next in (start + 1)..images.len() {
            if images[next] != u32::MAX {
                continue;
            }
            images[next] = next as u32;
            cycle.push(next);
            fill(images, lengths, cycle, len, f);
            cycle.pop();
            images[next] = u32::MAX;
        }
    }
    if n == 0 {
        f(&images);
        return;
    }
    rec(&mut images, &mut lengths, &mut cycle, &mut f);
}

/// Calls `f` with every involution (including the identity) on `0..n`.
pub fn for_each_involution(n: usize, mut f: impl FnMut(&[u32])) {
    fn rec(images: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        let Some(i) = images.iter().position(|&x| x == u32::MAX) else {
            f(images);
            return;
        };
        images[i] = i as u32;
        rec(images, f);
        for j in (i + 1)..images.len() {
            if images[j] == u32::MAX {
                images[i] = j as u32;
                images[j] = i as u32;
                rec(images, f);
                images[j] = u32::MAX;
            }
        }
        images[i] = u32::MAX;
    }
    let mut images = vec![u32::MAX; n];
    rec(&mut images, &mut f);
}

/// Calls `f` with every permutation of `0..n`.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[u32])) {
    fn rec(images: &mut Vec<u32>, used: &mut Vec<bool>, k: usize, f: &mut dyn FnMut(&[u32])) {
        if k == images.len() {
            f(images);
            return;
        }
        for v in 0..images.len() {
            if !used[v] {
                used[v] = true;
                images[k] = v as u32;
                rec(images, used, k + 1, f);
                used[v] = false;
            }
        }
    }
    let mut images = vec![0u32; n];
    let mut used = vec![false; n];
    rec(&mut images, &mut used, 0, &mut f);
}

fn product_cycle_type(a: &[u32], b: &[u32], buf: &mut Vec<u32>, seen: &mut Vec<bool>) -> CycleType {
    buf.clear();
    buf.extend(a.iter().map(|&i| b[i as usize]));
    seen.iter_mut().for_each(|s| *s = false);
    let mut lengths = Vec::new();
    for s in 0..buf.len() {
        if !seen[s] {
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = buf[i] as usize;
                len += 1;
            }
            lengths.push(len);
        }
    }
    CycleType::new(lengths)
}

/// Canonical forms of all classes with `α` of cycle type `alpha_type`.
fn partition_forms(task: &EnumerationTask, alpha_type: &CycleType) -> Vec<Vec<u32>> {
    let alpha = alpha_type.representative();
    let a = alpha.images().to_vec();
    let n = task.n;
    let gamma_filter = task.filters.passport.as_ref().and_then(|p| p.0[2].clone());
    let mut seen_forms: HashSet<Vec<u32>> = HashSet::new();
    let mut buf = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut visit = |b: &[u32]| {
        if let Some(g) = &gamma_filter {
            if &product_cycle_type(&a, b, &mut buf, &mut seen) != g {
                return;
            }
        }
        if !is_transitive_raw(&a, b) {
            return;
        }
        let (form, _) = canonical_raw(&a, b);
        seen_forms.insert(form);
    };
    let beta_filter = task.filters.passport.as_ref().and_then(|p| p.0[1].clone());
    match (task.mode, beta_filter) {
        (Mode::Preclean, Some(bt)) => {
            if bt.lengths().iter().all(|&l| l <= 2) {
                for_each_of_cycle_type(&bt, &mut visit);
            }
        }
        (Mode::Hypermap, Some(bt)) => for_each_of_cycle_type(&bt, &mut visit),
        (Mode::Preclean, None) => for_each_involution(n, &mut visit),
        (Mode::Hypermap, None) => for_each_permutation(n, &mut visit),
    }
    seen_forms.into_iter().collect()
}

fn alpha_types(task: &EnumerationTask) -> Vec<CycleType> {
    match task.filters.passport.as_ref().and_then(|p| p.0[0].clone()) {
        Some(t) => vec![t],
        None => CycleType::all_of_degree(task.n),
    }
}

fn all_forms(task: &EnumerationTask) -> Vec<Vec<u32>> {
    let types = alpha_types(task);
    let mut forms: Vec<Vec<u32>> = types
        .par_iter()
        .map(|t| partition_forms(task, t))
        .flatten()
        .collect();
    forms.sort_unstable();
    forms
}

fn form_to_dessin(form: Vec<u32>, mode: Mode) -> Dessin {
    let (alpha, beta) = CanonicalForm::from_raw(form).to_pair();
    let n = alpha.degree();
    Dessin::new(n, alpha, beta, mode).expect("enumerated pairs are valid")
}

fn passes_expensive_filters(task: &EnumerationTask, d: &Dessin) -> bool {
    if let Some(sig) = &task.filters.signature {
        if &d.signature() != sig {
            return false;
        }
    }
    if let Some(order) = &task.filters.group_order {
        if &d.group().order() != order {
            return false;
        }
    }
    true
}

/// One representative per conjugacy class, sorted by canonical form.
pub fn enumerate(task: &EnumerationTask) -> Result<Vec<Dessin>, EnumError> {
    task.validate()?;
    let forms = all_forms(task);
    Ok(forms
        .into_par_iter()
        .map(|f| form_to_dessin(f, task.mode))
        .filter(|d| passes_expensive_filters(task, d))
        .collect())
}

/// As [`enumerate`], on a dedicated pool of `workers` threads.
pub fn enumerate_with_workers(task: &EnumerationTask, workers: usize) -> Result<Vec<Dessin>, EnumError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| EnumError::Pool(e.to_string()))?;
    pool.install(|| enumerate(task))
}

/// Number of classes; equals `enumerate(task).len()`.
pub fn count(task: &EnumerationTask) -> Result<u64, EnumError> {
    task.validate()?;
    let f = &task.filters;
    if f.signature.is_none() && f.group_order.is_none() {
        return Ok(all_forms(task).len() as u64);
    }
    Ok(enumerate(task)?.len() as u64)
}

pub fn count_with_workers(task: &EnumerationTask, workers: usize) -> Result<u64, EnumError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| EnumError::Pool(e.to_string()))?;
    pool.install(|| count(task))
}

/// All classes of index `n` matching a (possibly partial) passport and group order.
///
/// Uses hypermap mode when the `β` entry is not an involution type.
pub fn find_by_passport(
    n: usize,
    passport: &PassportPattern,
    group_order: Option<BigUint>,
) -> Result<Vec<Dessin>, EnumError> {
    let mode = match &passport.0[1] {
        Some(bt) if bt.lengths().iter().any(|&l| l > 2) => Mode::Hypermap,
        None => Mode::Preclean,
        _ => Mode::Preclean,
    };
    let mut task = EnumerationTask::new(n, mode).with_passport(passport.clone());
    task.max_index = task.max_index.max(n);
    task.filters.group_order = group_order;
    enumerate(&task)
}

/// Number of transitive pairs `(α, β)` divided by `(n-1)!`, i.e. rooted classes.
pub fn rooted_count_from_classes(classes: &[Dessin]) -> BigUint {
    // Σ n / |Aut| is an integer class by class
    classes
        .iter()
        .map(|d| BigUint::from(d.n() / d.automorphism_count()))
        .sum()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn count_of(ct: &str) -> usize {
        let ct: CycleType = ct.parse().unwrap();
        let mut k = 0;
        for_each_of_cycle_type(&ct, |_| k += 1);
        k
    }

    #[test]
    fn cycle_type_generator_counts() {
        // n! / Π(l^m m!)
        assert_eq!(count_of("2^6 1^3"), 4_729_725);
        assert_eq!(count_of("3^1 1^1"), 8);
        assert_eq!(count_of("2^2"), 3);
        assert_eq!(count_of("5^2"), 10 * 9 * 8 * 7 * 6 * 5 * 4 * 3 * 2 / (25 * 2));
    }

    #[test]
    fn cycle_type_generator_yields_that_type() {
        let ct: CycleType = "3^1 2^2 1^1".parse().unwrap();
        let mut seen = HashSet::new();
        for_each_of_cycle_type(&ct, |img| {
            let p = Permutation::from_images(img.to_vec()).unwrap();
            assert_eq!(p.cycle_type(), ct);
            assert!(seen.insert(img.to_vec()));
        });
        assert_eq!(seen.len(), 40320 / (3 * 4 * 2));
    }

    #[test]
    fn involution_counts() {
        let counts: Vec<usize> = (1..=10)
            .map(|n| {
                let mut k = 0;
                for_each_involution(n, |_| k += 1);
                k
            })
            .collect();
        assert_eq!(counts, vec![1, 2, 4, 10, 26, 76, 232, 764, 2620, 9496]);
    }

    #[test]
    fn small_counts() {
        assert_eq!(count(&EnumerationTask::new(1, Mode::Preclean)).unwrap(), 1);
        assert_eq!(count(&EnumerationTask::new(5, Mode::Preclean)).unwrap(), 15);
        assert_eq!(count(&EnumerationTask::new(3, Mode::Hypermap)).unwrap(), 7);
        assert_eq!(enumerate(&EnumerationTask::new(4, Mode::Hypermap)).unwrap().len(), 26);
    }

    #[test]
    fn resource_bound_is_an_error() {
        let task = EnumerationTask::new(14, Mode::Preclean);
        assert_eq!(
            count(&task),
            Err(EnumError::ResourceBound { n: 14, bound: 13 })
        );
        assert_eq!(count(&EnumerationTask::new(0, Mode::Preclean)), Err(EnumError::ZeroIndex));
    }

    #[test]
    fn b3_class_by_passport() {
        let p: PassportPattern = "[4^1, 2^2, 2^1 1^2]".parse().unwrap();
        let found = find_by_passport(4, &p, None).unwrap();
        assert_eq!(found.len(), 1);
        let b3 = Dessin::from_cycles(4, "(1,2,4,3)", "(1,2)(3,4)", Mode::Preclean).unwrap();
        assert_eq!(found[0].canonical_form(), b3.canonical_form());
    }

    #[test]
    fn output_is_sorted_and_unique() {
        let ds = enumerate(&EnumerationTask::new(6, Mode::Preclean)).unwrap();
        let forms: Vec<_> = ds.iter().map(|d| d.canonical_form()).collect();
        assert!(forms.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn passport_degree_checked() {
        let p: PassportPattern = "[4^1, *, *]".parse().unwrap();
        assert!(matches!(
            find_by_passport(5, &p, None),
            Err(EnumError::PassportDegree { .. })
        ));
    }
}
