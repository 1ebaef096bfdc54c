use std::collections::{BTreeSet, HashSet};

use dessins::enumerate::{
    count, count_with_workers, enumerate, enumerate_with_workers, for_each_involution, for_each_permutation,
    rooted_count_from_classes, EnumerationTask, HYPERMAP_COUNTS, PRECLEAN_COUNTS,
};
use dessins::{Dessin, Mode, Permutation};
use num_bigint::BigUint;

fn all_perms(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for_each_permutation(n, |p| out.push(p.to_vec()));
    out
}

fn transitive(a: &[u32], b: &[u32]) -> bool {
    let n = a.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in [a[i] as usize, b[i] as usize] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn conj(p: &[u32], s: &[u32]) -> Vec<u32> {
    let mut out = vec![0; p.len()];
    for i in 0..p.len() {
        out[s[i] as usize] = s[p[i] as usize];
    }
    out
}

/// Orbits of transitive pairs under simultaneous conjugation by all of S_n.
fn brute_force_classes(n: usize, mode: Mode) -> (Vec<BTreeSet<(Vec<u32>, Vec<u32>)>>, usize) {
    let perms = all_perms(n);
    let betas: Vec<Vec<u32>> = match mode {
        Mode::Preclean => {
            let mut v = Vec::new();
            for_each_involution(n, |p| v.push(p.to_vec()));
            v
        }
        Mode::Hypermap => perms.clone(),
    };
    let mut assigned: HashSet<(Vec<u32>, Vec<u32>)> = HashSet::new();
    let mut classes = Vec::new();
    let mut pairs = 0;
    for a in &perms {
        for b in &betas {
            if !transitive(a, b) {
                continue;
            }
            pairs += 1;
            if assigned.contains(&(a.clone(), b.clone())) {
                continue;
            }
            let orbit: BTreeSet<_> = perms.iter().map(|s| (conj(a, s), conj(b, s))).collect();
            assigned.extend(orbit.iter().cloned());
            classes.push(orbit);
        }
    }
    (classes, pairs)
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

#[test]
fn matches_brute_force_up_to_index_five() {
    for mode in [Mode::Preclean, Mode::Hypermap] {
        for n in 1..=5 {
            let (classes, pairs) = brute_force_classes(n, mode);
            let found = enumerate(&EnumerationTask::new(n, mode)).unwrap();
            assert_eq!(found.len(), classes.len(), "{mode} n={n}");
            // every oracle class holds exactly one representative
            for orbit in &classes {
                let hits = found
                    .iter()
                    .filter(|d| orbit.contains(&(d.alpha().images().to_vec(), d.beta().images().to_vec())))
                    .count();
                assert_eq!(hits, 1, "{mode} n={n}");
            }
            // orbit-stabilizer: |orbit| = n!/|Aut|
            for d in &found {
                let orbit = classes
                    .iter()
                    .find(|o| o.contains(&(d.alpha().images().to_vec(), d.beta().images().to_vec())))
                    .unwrap();
                assert_eq!(orbit.len() * d.automorphism_count(), (1..=n).product::<usize>());
            }
            assert_eq!(
                rooted_count_from_classes(&found) * factorial(n - 1),
                BigUint::from(pairs)
            );
        }
    }
}

#[test]
fn preclean_counts_through_ten() {
    for n in 1..=10 {
        let c = count(&EnumerationTask::new(n, Mode::Preclean)).unwrap();
        assert_eq!(c, PRECLEAN_COUNTS[n - 1], "n={n}");
    }
}

#[test]
fn hypermap_counts_through_six() {
    for n in 1..=6 {
        let c = count(&EnumerationTask::new(n, Mode::Hypermap)).unwrap();
        assert_eq!(c, HYPERMAP_COUNTS[n - 1], "n={n}");
    }
}

#[test]
#[ignore = "minutes of CPU time"]
fn preclean_counts_eleven_to_thirteen() {
    for n in 11..=13 {
        let c = count(&EnumerationTask::new(n, Mode::Preclean)).unwrap();
        assert_eq!(c, PRECLEAN_COUNTS[n - 1], "n={n}");
    }
}

#[test]
fn independent_of_worker_count() {
    let task = EnumerationTask::new(8, Mode::Preclean);
    let one = enumerate_with_workers(&task, 1).unwrap();
    let four = enumerate_with_workers(&task, 4).unwrap();
    let a: Vec<_> = one.iter().map(|d| d.canonical_form()).collect();
    let b: Vec<_> = four.iter().map(|d| d.canonical_form()).collect();
    assert_eq!(a, b);
    assert_eq!(count_with_workers(&task, 3).unwrap(), 482);
}

#[test]
fn euler_characteristic_is_even_and_genus_nonnegative() {
    for n in 1..=10 {
        for d in enumerate(&EnumerationTask::new(n, Mode::Preclean)).unwrap() {
            let s = d.signature();
            let chi = s.black as i64 + s.white as i64 + s.faces as i64 - n as i64;
            assert_eq!(chi, 2 - 2 * s.genus as i64);
        }
    }
}

#[test]
fn representatives_are_canonical() {
    for d in enumerate(&EnumerationTask::new(6, Mode::Hypermap)).unwrap() {
        let again = Dessin::new(
            d.n(),
            Permutation::from_images(d.alpha().images().to_vec()).unwrap(),
            d.beta().clone(),
            Mode::Hypermap,
        )
        .unwrap();
        assert_eq!(again.canonical().alpha(), d.alpha());
    }
}
