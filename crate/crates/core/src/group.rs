//! Permutation groups via a deterministic Schreier–Sims stabilizer chain.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::perm::Permutation;

/// Element-order fingerprints are only computed up to this many group elements.
pub const DEFAULT_FINGERPRINT_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("generators have mixed degrees")]
    MixedDegrees,
    #[error("subgroups belong to different parent groups")]
    DifferentParents,
    #[error("label {0} out of range")]
    BadPoint(usize),
}

#[derive(Clone, Debug)]
struct Level {
    base_point: usize,
    gens: Vec<Permutation>,
    /// `transversal[p]` maps the base point to `p`.
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(base_point: usize, degree: usize) -> Self {
        let mut level = Level {
            base_point,
            gens: Vec::new(),
            transversal: vec![None; degree],
            orbit: Vec::new(),
        };
        level.rebuild(degree);
        level
    }

    fn rebuild(&mut self, degree: usize) {
        self.transversal = vec![None; degree];
        self.transversal[self.base_point] = Some(Permutation::identity(degree));
        self.orbit = vec![self.base_point];
        let mut head = 0;
        while head < self.orbit.len() {
            let p = self.orbit[head];
            head += 1;
            for g in &self.gens {
                let q = g.apply(p);
                if self.transversal[q].is_none() {
                    let u = self.transversal[p].as_ref().unwrap().then(g);
                    self.transversal[q] = Some(u);
                    self.orbit.push(q);
                }
            }
        }
    }
}

/// A permutation group with a base and strong generating set.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermGroup {
    /// Group generated by `gens` on `degree` points (an empty list gives the trivial group).
    pub fn new(degree: usize, gens: &[Permutation]) -> Result<Self, GroupError> {
        Self::with_base_prefix(degree, gens, &[])
    }

    pub fn from_generators(gens: &[Permutation]) -> Result<Self, GroupError> {
        let degree = gens.first().map(|g| g.degree()).unwrap_or(0);
        Self::new(degree, gens)
    }

    /// Builds the chain with the given points first in the base, so that the
    /// pointwise stabilizer of a prefix is a tail of the chain.
    pub fn with_base_prefix(
        degree: usize,
        gens: &[Permutation],
        prefix: &[usize],
    ) -> Result<Self, GroupError> {
        if gens.iter().any(|g| g.degree() != degree) {
            return Err(GroupError::MixedDegrees);
        }
        if let Some(&p) = prefix.iter().find(|&&p| p >= degree) {
            return Err(GroupError::BadPoint(p + 1));
        }
        let gens: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut group = PermGroup {
            degree,
            gens: gens.clone(),
            levels: Vec::new(),
        };
        let mut base: Vec<usize> = Vec::new();
        for &p in prefix {
            if !base.contains(&p) {
                base.push(p);
            }
        }
        for g in &gens {
            if base.iter().all(|&b| g.fixes(b)) {
                if let Some(p) = (0..degree).find(|&p| !g.fixes(p)) {
                    base.push(p);
                }
            }
        }
        for &b in &base {
            group.levels.push(Level::new(b, degree));
        }
        for g in &gens {
            group.add_strong_gen(g.clone(), 0);
        }
        group.schreier_sims();
        Ok(group)
    }

    fn add_strong_gen(&mut self, g: Permutation, from_level: usize) {
        for level in self.levels.iter_mut().skip(from_level) {
            if level.gens.iter().any(|h| h == &g) {
                break;
            }
            level.gens.push(g.clone());
            if !g.fixes(level.base_point) {
                break;
            }
        }
        for i in from_level..self.levels.len() {
            self.levels[i].rebuild(self.degree);
        }
    }

    /// Sifts `g` through levels starting at `start`; returns the residue and the
    /// level at which sifting stopped (`levels.len()` if it passed all levels).
    fn strip(&self, mut g: Permutation, start: usize) -> (Permutation, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let p = g.apply(level.base_point);
            match &level.transversal[p] {
                Some(u) => g = g.then(&u.inverse()),
                None => return (g, i),
            }
        }
        (g, self.levels.len())
    }

    fn schreier_sims(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let level_idx = i - 1;
            let mut restart_at = None;
            'scan: for &p in &self.levels[level_idx].orbit.clone() {
                let gens = self.levels[level_idx].gens.clone();
                for s in &gens {
                    let up = self.levels[level_idx].transversal[p].clone().unwrap();
                    let q = s.apply(p);
                    let uq = self.levels[level_idx].transversal[q].clone().unwrap();
                    let schreier = up.then(s).then(&uq.inverse());
                    let (h, j) = self.strip(schreier, level_idx + 1);
                    if !h.is_identity() {
                        if j == self.levels.len() {
                            let moved = (0..self.degree).find(|&x| !h.fixes(x)).unwrap();
                            self.levels.push(Level::new(moved, self.degree));
                        }
                        for l in (level_idx + 1)..=j {
                            self.levels[l].gens.push(h.clone());
                            self.levels[l].rebuild(self.degree);
                        }
                        restart_at = Some(j + 1);
                        break 'scan;
                    }
                }
            }
            match restart_at {
                Some(next) => i = next,
                None => i -= 1,
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    /// Lengths of the fundamental orbits along the chain.
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, j) = self.strip(g.clone(), 0);
        j == self.levels.len() && h.is_identity()
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit_of(0).len() == self.degree
    }

    pub fn orbit_of(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut orbit = vec![point];
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            for g in &self.gens {
                let q = g.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                }
            }
        }
        orbit
    }

    /// Strong generators and chain of the tail starting at `level`.
    fn tail(&self, level: usize) -> PermGroup {
        let levels: Vec<Level> = self.levels[level.min(self.levels.len())..].to_vec();
        let gens = levels.first().map(|l| l.gens.clone()).unwrap_or_default();
        PermGroup {
            degree: self.degree,
            gens,
            levels,
        }
    }

    /// Calls `f` on every element. Stops early when `f` returns `false`.
    pub fn for_each_element(&self, mut f: impl FnMut(&Permutation) -> bool) {
        fn rec(
            levels: &[Level],
            idx: usize,
            acc: &Permutation,
            f: &mut dyn FnMut(&Permutation) -> bool,
        ) -> bool {
            if idx == levels.len() {
                return f(acc);
            }
            // g = t_k · … · t_0 with t_i from level i
            let level = &levels[idx];
            for &p in &level.orbit {
                let u = level.transversal[p].as_ref().unwrap();
                let next = acc.then(u);
                if !rec(levels, idx + 1, &next, f) {
                    return false;
                }
            }
            true
        }
        let mut levels = self.levels.clone();
        levels.reverse();
        rec(&levels, 0, &Permutation::identity(self.degree), &mut f);
    }

    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = Vec::new();
        self.for_each_element(|g| {
            out.push(g.clone());
            true
        });
        out
    }

    /// Multiset of element orders, or `None` if the group exceeds `cap` elements.
    pub fn element_order_counts(&self, cap: u64) -> Option<BTreeMap<u64, u64>> {
        let order = self.order_u64()?;
        if order > cap {
            return None;
        }
        let mut counts = BTreeMap::new();
        self.for_each_element(|g| {
            *counts.entry(g.order()).or_insert(0) += 1;
            true
        });
        Some(counts)
    }

    /// Pointwise stabilizer of `points`.
    pub fn pointwise_stabilizer(self: &Arc<Self>, points: &[usize]) -> Result<Subgroup, GroupError> {
        let chain = PermGroup::with_base_prefix(self.degree, &self.gens, points)?;
        let mut depth = 0;
        for &p in points {
            if chain.levels.get(depth).map(|l| l.base_point) == Some(p) {
                depth += 1;
            }
        }
        let tail = chain.tail(depth);
        Ok(Subgroup::new(Arc::clone(self), tail, DEFAULT_FINGERPRINT_CAP))
    }

    /// Setwise stabilizer of the unordered pair `{i, j}`.
    pub fn pair_setwise_stabilizer(self: &Arc<Self>, i: usize, j: usize) -> Result<Subgroup, GroupError> {
        if i == j {
            return self.pointwise_stabilizer(&[i]);
        }
        let chain = PermGroup::with_base_prefix(self.degree, &self.gens, &[i, j])?;
        let pointwise = chain.tail(2);
        let mut gens = pointwise.gens.clone();
        // an element swapping i and j: u ∈ transversal(i → j) composed after h ∈ Stab(i) with h(j) = u⁻¹(i)
        if let Some(u) = &chain.levels[0].transversal[j] {
            let target = u.inverse().apply(i);
            if let Some(level1) = chain.levels.get(1) {
                if let Some(h) = &level1.transversal[target] {
                    let swap = h.then(u);
                    debug_assert!(swap.apply(i) == j && swap.apply(j) == i);
                    gens.push(swap);
                }
            }
        }
        let sub = PermGroup::new(self.degree, &gens)?;
        Ok(Subgroup::new(Arc::clone(self), sub, DEFAULT_FINGERPRINT_CAP))
    }
}

pub fn group_from_generators(gens: &[Permutation]) -> Result<PermGroup, GroupError> {
    PermGroup::from_generators(gens)
}

/// Conjugation-invariant summary of a subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fingerprint {
    pub order: String,
    /// `(element order, count)`; `None` when the subgroup is above the cap.
    pub element_orders: Option<Vec<(u64, u64)>>,
}

impl std::fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "order {}", self.order)?;
        if let Some(eo) = &self.element_orders {
            let parts: Vec<String> = eo.iter().map(|(o, c)| format!("{o}:{c}")).collect();
            write!(f, " [{}]", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Element-order multiset, memoized for full symmetric and alternating groups
/// on their moved points since those dominate at large index.
fn element_orders(group: &PermGroup, cap: u64) -> Option<Vec<(u64, u64)>> {
    static FULL: OnceLock<Mutex<HashMap<(usize, bool, u64), Option<Vec<(u64, u64)>>>>> = OnceLock::new();
    let order = group.order();
    let m = (0..group.degree())
        .filter(|&p| group.generators().iter().any(|g| !g.fixes(p)))
        .count();
    let factorial: BigUint = (1..=m as u64).product();
    let key = if m >= 2 && order == factorial {
        Some((m, false, cap))
    } else if m >= 3 && order * 2u32 == factorial {
        Some((m, true, cap))
    } else {
        None
    };
    let compute = || group.element_order_counts(cap).map(|m| m.into_iter().collect());
    match key {
        None => compute(),
        Some(k) => {
            let cache = FULL.get_or_init(Default::default);
            if let Some(hit) = cache.lock().unwrap().get(&k) {
                return hit.clone();
            }
            let v = compute();
            cache.lock().unwrap().insert(k, v.clone());
            v
        }
    }
}

/// A subgroup of a parent [`PermGroup`], with its own stabilizer chain.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: Arc<PermGroup>,
    group: PermGroup,
    fingerprint: Fingerprint,
}

impl Subgroup {
    pub fn new(parent: Arc<PermGroup>, group: PermGroup, cap: u64) -> Self {
        let fingerprint = Fingerprint {
            order: group.order().to_string(),
            element_orders: element_orders(&group, cap),
        };
        Subgroup {
            parent,
            group,
            fingerprint,
        }
    }

    pub fn parent(&self) -> &Arc<PermGroup> {
        &self.parent
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn generators(&self) -> &[Permutation] {
        self.group.generators()
    }

    pub fn order(&self) -> BigUint {
        self.group.order()
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.group.contains(g)
    }

    /// Points fixed by every element.
    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.group.degree())
            .filter(|&p| self.generators().iter().all(|g| g.fixes(p)))
            .collect()
    }
}

fn same_parent(a: &Arc<PermGroup>, b: &Arc<PermGroup>) -> bool {
    Arc::ptr_eq(a, b) || (a.degree == b.degree && a.gens == b.gens)
}

/// Equality as subgroups (mutual membership of generators), not isomorphism.
pub fn subgroup_equal(a: &Subgroup, b: &Subgroup) -> Result<bool, GroupError> {
    if !same_parent(&a.parent, &b.parent) {
        return Err(GroupError::DifferentParents);
    }
    if a.fingerprint != b.fingerprint {
        return Ok(false);
    }
    Ok(a.generators().iter().all(|g| b.contains(g)) && b.generators().iter().all(|g| a.contains(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_cycles;

    fn group(n: usize, gens: &[&str]) -> Arc<PermGroup> {
        let gens: Vec<_> = gens.iter().map(|g| parse_cycles(n, g).unwrap()).collect();
        Arc::new(PermGroup::new(n, &gens).unwrap())
    }

    #[test]
    fn dihedral_order_eight() {
        assert_eq!(group(4, &["(2,3)", "(1,2)(3,4)"]).order(), BigUint::from(8u32));
    }

    #[test]
    fn fano_group_order() {
        assert_eq!(
            group(7, &["(2,7,6,5)(3,4)", "(1,2)(3,5)"]).order(),
            BigUint::from(168u32)
        );
    }

    #[test]
    fn mermin_square_group_order() {
        let g = group(9, &["(1,2,4,8,7,3)(5,9,6)", "(2,5)(3,6)(4,7)(8,9)"]);
        assert_eq!(g.order(), BigUint::from(36u32));
    }

    #[test]
    fn trivial_group_from_empty_generators() {
        let g = PermGroup::new(5, &[]).unwrap();
        assert_eq!(g.order(), BigUint::one());
        assert!(g.contains(&Permutation::identity(5)));
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 2..=9usize {
            let mut cycle: Vec<usize> = (1..=n).collect();
            let s = format!(
                "({})",
                cycle.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            );
            cycle.clear();
            let g = group(n, &[&s, "(1,2)"]);
            let fact: u64 = (1..=n as u64).product();
            assert_eq!(g.order_u64(), Some(fact));
        }
    }

    #[test]
    fn regular_action_has_trivial_pair_stabilizer() {
        let g = group(6, &["(1,2,3,4,5,6)"]);
        let s = g.pointwise_stabilizer(&[0, 1]).unwrap();
        assert_eq!(s.order(), BigUint::one());
    }

    #[test]
    fn fano_pair_stabilizers() {
        let g = group(7, &["(2,7,6,5)(3,4)", "(1,2)(3,5)"]);
        for i in 0..7 {
            for j in (i + 1)..7 {
                let s = g.pointwise_stabilizer(&[i, j]).unwrap();
                assert_eq!(s.order(), BigUint::from(4u32));
                // fixes exactly three points: a Fano line
                assert_eq!(s.fixed_points().len(), 3);
            }
        }
    }

    #[test]
    fn distinct_fano_lines_have_distinct_stabilizers() {
        let g = group(7, &["(2,7,6,5)(3,4)", "(1,2)(3,5)"]);
        let s01 = g.pointwise_stabilizer(&[0, 1]).unwrap();
        let line: Vec<usize> = s01.fixed_points();
        let other = (0..7).find(|p| !line.contains(p)).unwrap();
        let t = g.pointwise_stabilizer(&[0, other]).unwrap();
        assert_eq!(s01.fingerprint(), t.fingerprint());
        assert!(!subgroup_equal(&s01, &t).unwrap());
        assert!(subgroup_equal(&s01, &s01).unwrap());
        let third = line.iter().copied().find(|&p| p != 0 && p != 1).unwrap();
        let u = g.pointwise_stabilizer(&[1, third]).unwrap();
        assert!(subgroup_equal(&s01, &u).unwrap());
    }

    #[test]
    fn printed_index_eight_generators_generate_a8() {
        // the generators printed next to the stellated octahedron generate the
        // alternating group, not a group of order 16 (cross-checked by closure)
        let g = group(8, &["(1,2,4,3)(5,7,6,8)", "(2,5)(3,7)"]);
        assert_eq!(g.order(), BigUint::from(20160u32));
        let s = g.pointwise_stabilizer(&[0, 1]).unwrap();
        assert_eq!(s.order(), BigUint::from(360u32));
    }

    #[test]
    fn setwise_stabilizer_contains_swap() {
        let g = group(4, &["(1,2,3,4)", "(1,2)"]);
        let s = g.pair_setwise_stabilizer(0, 1).unwrap();
        assert_eq!(s.order(), BigUint::from(4u32));
        assert!(s.contains(&parse_cycles(4, "(1,2)").unwrap()));
    }

    #[test]
    fn different_parents_rejected() {
        let g = group(4, &["(1,2,3,4)"]);
        let h = group(4, &["(1,2)"]);
        let a = g.pointwise_stabilizer(&[0]).unwrap();
        let b = h.pointwise_stabilizer(&[0]).unwrap();
        assert_eq!(subgroup_equal(&a, &b), Err(GroupError::DifferentParents));
    }

    #[test]
    fn element_orders_of_s3() {
        let g = group(3, &["(1,2,3)", "(1,2)"]);
        let counts = g.element_order_counts(100).unwrap();
        assert_eq!(counts.into_iter().collect::<Vec<_>>(), vec![(1, 1), (2, 3), (3, 2)]);
        assert!(g.element_order_counts(5).is_none());
    }
}
