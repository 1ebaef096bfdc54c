use dessins::{Dessin, Mode, Permutation};
use proptest::prelude::*;

fn perm(images: Vec<usize>) -> Permutation {
    Permutation::from_images(images.into_iter().map(|v| v as u32).collect()).unwrap()
}

/// Random involution on `n` points from a shuffled list, pairing its first `2k` entries.
fn involution(order: &[usize], k: usize) -> Permutation {
    let mut images: Vec<usize> = (0..order.len()).collect();
    for pair in order[..2 * k].chunks(2) {
        images[pair[0]] = pair[1];
        images[pair[1]] = pair[0];
    }
    perm(images)
}

fn shuffled(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

fn arb_case() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, usize, Vec<usize>, bool)> {
    (2..=10usize).prop_flat_map(|n| (shuffled(n), shuffled(n), 0..=n / 2, shuffled(n), any::<bool>()))
}

// hand-rolled relabeling, independent of Permutation::conjugate_by
fn relabel_images(p: &Permutation, s: &[usize]) -> Permutation {
    let mut out = vec![0usize; s.len()];
    for i in 0..s.len() {
        out[s[i]] = s[p.apply(i)];
    }
    perm(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_form_is_a_conjugation_invariant((a, b, k, s, hyper) in arb_case()) {
        let n = a.len();
        let alpha = perm(a);
        let (beta, mode) = if hyper { (perm(b), Mode::Hypermap) } else { (involution(&b, k), Mode::Preclean) };
        let Ok(d) = Dessin::new(n, alpha.clone(), beta.clone(), mode) else {
            // intransitive pairs are not dessins
            return Ok(());
        };
        let e = Dessin::new(n, relabel_images(&alpha, &s), relabel_images(&beta, &s), mode).unwrap();
        prop_assert_eq!(d.canonical_form(), e.canonical_form());
        prop_assert_eq!(d.automorphism_count(), e.automorphism_count());
        prop_assert_eq!(d.passport(), e.passport());
        prop_assert_eq!(d.signature(), e.signature());
        prop_assert_eq!(d.group().order(), e.group().order());
        prop_assert_eq!(d.canonical(), e.canonical());
    }
}
