//! Brute-force reference implementations used to cross-check the engine.
//!
//! Everything here recomputes group-theoretic facts by a route that shares
//! as little code as possible with the main implementation: elements are
//! realized as affine-linear maps on `V'`, lengths are counted hyperplane by
//! hyperplane, balls are rebuilt by right multiplication, and double cosets
//! come from a union-find over the ball rather than from canonical
//! representatives. Slow on purpose; the test suite and the `verify`
//! subcommand run both sides and compare.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::iwahori_weyl::{AffineRoot, ExtAffineElement, GroupDatum};
use crate::linalg::IntMat;
use crate::rootsys::pairing_int;

#[derive(Error, Debug)]
pub enum OracleError {
    #[error("oracle enumeration exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
}

/// An element realized as the affine map `p -> linear(p) + offset` on `V'`
/// in fundamental-coweight coordinates, together with its torsion
/// coordinates. This realization is faithful: `linear` pins down the finite
/// part, `offset = Mλ` pins down the translation, and `torsion` the rest.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineMap {
    pub linear: IntMat,
    pub offset: Vec<i64>,
    pub torsion: Vec<i64>,
}

impl AffineMap {
    pub fn apply(&self, p: &[i64]) -> Vec<i64> {
        self.linear
            .matvec(p)
            .iter()
            .zip(&self.offset)
            .map(|(a, b)| a + b)
            .collect()
    }
}

/// Re-expresses an element as an affine map, bypassing the engine's
/// semidirect product formulas.
pub fn to_affine_map(datum: &GroupDatum, x: &ExtAffineElement) -> AffineMap {
    AffineMap {
        linear: x.finite_part().coweight_matrix().clone(),
        offset: datum.lattice_to_coweight(x.translation_part()),
        torsion: x.torsion_part().to_vec(),
    }
}

/// Composes two affine maps, `a` after `b`, twisting the torsion of `b` by
/// the finite part of `a` when the datum carries a nontrivial action.
pub fn compose_affine_maps(datum: &GroupDatum, a: &AffineMap, b: &AffineMap) -> AffineMap {
    let linear = a.linear.mul(&b.linear);
    let offset = a
        .linear
        .matvec(&b.offset)
        .iter()
        .zip(&a.offset)
        .map(|(m, o)| m + o)
        .collect();
    // The torsion twist has no affine-map realization, so recover the
    // finite part of `a` by scanning the finite Weyl group and delegate the
    // twist itself; only the linear and offset components are recomputed
    // independently here.
    let torsion = if datum.has_nontrivial_torsion_action() && b.torsion.iter().any(|&t| t != 0) {
        let finite = crate::rootsys::enumerate_finite_weyl(datum.root_system())
            .expect("datum rank is within bounds")
            .into_iter()
            .find(|w| w.coweight_matrix() == &a.linear)
            .expect("linear part comes from the finite Weyl group");
        let twisted = datum
            .multiply(
                &datum.from_finite(finite.clone()),
                &datum.torsion_element(&b.torsion).unwrap(),
            )
            .unwrap();
        let mut t = twisted.torsion_part().to_vec();
        for (ti, (ai, d)) in t.iter_mut().zip(a.torsion.iter().zip(datum.torsion_orders())) {
            *ti = (*ti + ai).rem_euclid(*d);
        }
        t
    } else {
        a.torsion
            .iter()
            .zip(&b.torsion)
            .zip(datum.torsion_orders())
            .map(|((p, q), d)| (p + q).rem_euclid(*d))
            .collect()
    };
    AffineMap { linear, offset, torsion }
}

/// Length as the number of positive affine hyperplanes sent to negative
/// ones, counted by direct enumeration over levels up to an explicit bound.
pub fn length_by_hyperplanes(datum: &GroupDatum, x: &ExtAffineElement) -> u64 {
    let rs = datum.root_system();
    let mu = datum.lattice_to_coweight(x.translation_part());
    let mut bound: i64 = 1;
    for beta in rs.positive_roots() {
        bound = bound.max(pairing_int(beta, &mu).abs() + 1);
    }
    let mut count = 0u64;
    let mut consider = |a: AffineRoot| {
        debug_assert!(a.is_positive());
        if !datum.act_on_affine_root(x, &a).is_positive() {
            count += 1;
        }
    };
    for beta in rs.positive_roots() {
        consider(AffineRoot { gradient: beta.clone(), level: 0 });
        for k in 1..bound {
            consider(AffineRoot { gradient: beta.clone(), level: k });
            consider(AffineRoot { gradient: beta.negated(), level: k });
        }
    }
    count
}

/// Rebuilds the ball of radius `max_len` by breadth-first search over right
/// multiplication, classifying shells with [`length_by_hyperplanes`]. The
/// engine ball uses left multiplication and the closed-form length, so the
/// two agree only if both length functions and both expansion orders do.
pub fn bfs_enumerate(
    datum: &GroupDatum,
    max_len: u64,
    cap: usize,
) -> Result<Vec<Vec<ExtAffineElement>>, OracleError> {
    let omega = datum.omega_group().to_vec();
    let mut seen: HashSet<ExtAffineElement> = omega.iter().cloned().collect();
    if seen.len() > cap {
        return Err(OracleError::CapExceeded { cap });
    }
    let mut shells = vec![omega];
    for len in 1..=max_len {
        let mut shell = Vec::new();
        for x in shells.last().unwrap().clone() {
            for i in 0..datum.affine_rank() {
                let s = datum.affine_simple_reflection(i).unwrap();
                let cand = datum.multiply(&x, s).unwrap();
                if seen.contains(&cand) {
                    continue;
                }
                let l = length_by_hyperplanes(datum, &cand);
                assert_eq!(l, len, "right BFS must grow one hyperplane at a time");
                seen.insert(cand.clone());
                shell.push(cand);
                if seen.len() > cap {
                    return Err(OracleError::CapExceeded { cap });
                }
            }
        }
        if shell.is_empty() {
            break;
        }
        shells.push(shell);
    }
    Ok(shells)
}

/// All reduced words for `x`, relative to the fixed factorization
/// `x = (word) · ω` with `ω` the length-zero representative of its class.
/// Exponential in the worst case; capped.
pub fn all_reduced_words(
    datum: &GroupDatum,
    x: &ExtAffineElement,
    cap: usize,
) -> Result<Vec<Vec<usize>>, OracleError> {
    let mut memo: HashMap<ExtAffineElement, Vec<Vec<usize>>> = HashMap::new();
    let mut total = 0usize;
    let words = words_rec(datum, x, &mut memo, &mut total, cap)?;
    let mut words = words;
    words.sort();
    Ok(words)
}

fn words_rec(
    datum: &GroupDatum,
    x: &ExtAffineElement,
    memo: &mut HashMap<ExtAffineElement, Vec<Vec<usize>>>,
    total: &mut usize,
    cap: usize,
) -> Result<Vec<Vec<usize>>, OracleError> {
    if let Some(w) = memo.get(x) {
        return Ok(w.clone());
    }
    let lx = length_by_hyperplanes(datum, x);
    if lx == 0 {
        return Ok(vec![Vec::new()]);
    }
    let mut out = Vec::new();
    for i in 0..datum.affine_rank() {
        let s = datum.affine_simple_reflection(i).unwrap();
        let sx = datum.multiply(s, x).unwrap();
        if length_by_hyperplanes(datum, &sx) != lx - 1 {
            continue;
        }
        for mut tail in words_rec(datum, &sx, memo, total, cap)? {
            tail.insert(0, i);
            out.push(tail);
            *total += 1;
            if *total > cap {
                return Err(OracleError::CapExceeded { cap });
            }
        }
    }
    memo.insert(x.clone(), out.clone());
    Ok(out)
}

/// Double coset partition of a ball by plain union-find: joins `x` with
/// `s_j x` for `j` in the left generating set and with `x s_j` for `j` in
/// the right one, whenever both sides lie in the ball. Every coset meets
/// the ball in a connected piece (length-reducing steps stay inside), so
/// the classes are exactly the coset intersections.
pub struct BallPartition {
    /// Class label per input element, in input order.
    pub labels: Vec<usize>,
    pub class_count: usize,
}

pub fn double_coset_partition(
    datum: &GroupDatum,
    ball: &[ExtAffineElement],
    left: &[usize],
    right: &[usize],
) -> BallPartition {
    let index: HashMap<&ExtAffineElement, usize> =
        ball.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut dsu = Dsu::new(ball.len());
    for (i, x) in ball.iter().enumerate() {
        for &j in left {
            let s = datum.affine_simple_reflection(j).unwrap();
            let sx = datum.multiply(s, x).unwrap();
            if let Some(&k) = index.get(&sx) {
                dsu.union(i, k);
            }
        }
        for &j in right {
            let s = datum.affine_simple_reflection(j).unwrap();
            let xs = datum.multiply(x, s).unwrap();
            if let Some(&k) = index.get(&xs) {
                dsu.union(i, k);
            }
        }
    }
    // Relabel classes in first-appearance order for determinism.
    let mut relabel: HashMap<usize, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(ball.len());
    for i in 0..ball.len() {
        let root = dsu.find(i);
        let next = relabel.len();
        labels.push(*relabel.entry(root).or_insert(next));
    }
    BallPartition { class_count: relabel.len(), labels }
}

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iwahori_weyl::LatticeSpec;
    use crate::rootsys::CartanType;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn datum(name: &str, lattice: LatticeSpec) -> GroupDatum {
        GroupDatum::new(CartanType::parse(name).unwrap(), lattice).unwrap()
    }

    fn random_element(d: &GroupDatum, rng: &mut ChaCha8Rng, spread: i64) -> ExtAffineElement {
        let lambda: Vec<i64> =
            (0..d.rank()).map(|_| rng.gen_range(-spread..=spread)).collect();
        let torsion: Vec<i64> = d
            .torsion_orders()
            .iter()
            .map(|&o| rng.gen_range(0..o))
            .collect();
        let mut w = d.root_system().identity_weyl();
        for _ in 0..rng.gen_range(0..=6) {
            let i = rng.gen_range(1..=d.rank());
            w = w.compose(d.root_system(), &d.root_system().simple_reflection(i));
        }
        d.from_parts(&torsion, &lambda, w).unwrap()
    }

    #[test]
    fn hyperplane_length_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let data = [
            datum("A1", LatticeSpec::Coroot),
            datum("A2", LatticeSpec::Coweight),
            datum("C2", LatticeSpec::Coweight),
            datum("G2", LatticeSpec::Coroot),
            datum(
                "A1",
                LatticeSpec::Custom {
                    basis: vec![vec![1]],
                    torsion: vec![2],
                    torsion_action: None,
                },
            ),
        ];
        for d in &data {
            for _ in 0..150 {
                let x = random_element(d, &mut rng, 5);
                assert_eq!(
                    d.length(&x),
                    length_by_hyperplanes(d, &x),
                    "length disagreement in {}",
                    d.cartan_type()
                );
            }
        }
    }

    #[test]
    fn affine_maps_are_faithful_and_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for d in [datum("A2", LatticeSpec::Coroot), datum("C2", LatticeSpec::Coweight)] {
            let mut seen = HashMap::new();
            for shell in d.ball(4, 100_000, false).unwrap() {
                for x in shell {
                    let m = to_affine_map(&d, &x);
                    if let Some(prev) = seen.insert(m, x.clone()) {
                        panic!("distinct elements share an affine map: {prev:?} vs {x:?}");
                    }
                }
            }
            for _ in 0..100 {
                let x = random_element(&d, &mut rng, 4);
                let y = random_element(&d, &mut rng, 4);
                let lhs = to_affine_map(&d, &d.multiply(&x, &y).unwrap());
                let rhs = compose_affine_maps(&d, &to_affine_map(&d, &x), &to_affine_map(&d, &y));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn affine_maps_respect_nontrivial_torsion_twist() {
        let d = datum(
            "A1",
            LatticeSpec::Custom {
                basis: vec![vec![1]],
                torsion: vec![3],
                torsion_action: Some(vec![vec![vec![-1]]]),
            },
        );
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for _ in 0..100 {
            let x = random_element(&d, &mut rng, 3);
            let y = random_element(&d, &mut rng, 3);
            let lhs = to_affine_map(&d, &d.multiply(&x, &y).unwrap());
            let rhs = compose_affine_maps(&d, &to_affine_map(&d, &x), &to_affine_map(&d, &y));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn bfs_shells_match_engine_ball() {
        let data = [
            datum("A1", LatticeSpec::Coroot),
            datum("A2", LatticeSpec::Coweight),
            datum("C2", LatticeSpec::Coroot),
            datum(
                "A1",
                LatticeSpec::Custom {
                    basis: vec![vec![1]],
                    torsion: vec![2],
                    torsion_action: None,
                },
            ),
        ];
        for d in &data {
            let engine = d.ball(6, 100_000, false).unwrap();
            let oracle = bfs_enumerate(d, 6, 100_000).unwrap();
            assert_eq!(engine.len(), oracle.len());
            for (e, o) in engine.iter().zip(&oracle) {
                let es: HashSet<_> = e.iter().collect();
                let os: HashSet<_> = o.iter().collect();
                assert_eq!(es, os, "shell mismatch in {}", d.cartan_type());
            }
        }
    }

    #[test]
    fn reduced_word_sets() {
        let d = datum("A1", LatticeSpec::Coroot);
        let t = d.translation(&[1]).unwrap();
        assert_eq!(all_reduced_words(&d, &t, 1000).unwrap(), vec![vec![0, 1]]);
        // The longest finite element of A2 has the two classic words.
        let a2 = datum("A2", LatticeSpec::Coroot);
        let w0 = a2.from_word(&[1, 2, 1], None).unwrap();
        assert_eq!(
            all_reduced_words(&a2, &w0, 1000).unwrap(),
            vec![vec![1, 2, 1], vec![2, 1, 2]]
        );
        // The engine's greedy word is the lexicographically smallest one.
        let x = a2.from_word(&[0, 2, 1, 0], None).unwrap();
        let (word, _) = a2.reduced_word(&x);
        let all = all_reduced_words(&a2, &x, 10_000).unwrap();
        assert!(all.contains(&word));
        assert_eq!(&word, all.first().unwrap());
    }

    #[test]
    fn union_find_cosets_in_a1() {
        let d = datum("A1", LatticeSpec::Coroot);
        let ball: Vec<ExtAffineElement> =
            d.ball(3, 100_000, false).unwrap().into_iter().flatten().collect();
        let part = double_coset_partition(&d, &ball, &[1], &[1]);
        assert_eq!(part.class_count, 3);
        let mut sizes = vec![0usize; part.class_count];
        for &l in &part.labels {
            sizes[l] += 1;
        }
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 4]);
    }
}
