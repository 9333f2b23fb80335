//! Parabolic subgroups, double cosets, Bruhat order, and diagram
//! automorphisms.
//!
//! Parabolic subgroups are generated by subsets of the affine simple
//! reflections `s_0, ..., s_r`. A double coset `W_J x W_J'` contains a
//! unique element of minimal length, reached from any starting point by
//! greedily peeling descents; [`min_double_rep`] returns it together with a
//! factorization `x = w · x_0 · w'` in which the lengths add up. Coset
//! enumeration groups a length ball by these canonical representatives,
//! which the union-find oracle double-checks.
//!
//! Bruhat order is decided by the lifting property, recursing along a
//! descent of the larger element. Diagram automorphisms are permutations of
//! the affine nodes fixing node 0; they act on elements by permuting
//! coordinates and are the input to the descent report, which compares
//! setwise stability of each coset against fixedness of its canonical
//! representative.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::iwahori_weyl::{ExtAffineElement, GroupDatum, GroupError};
use crate::linalg::IntMat;

#[derive(Error, Debug)]
pub enum CosetError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("parabolic subgroup on {gens:?} is infinite: the generators span the whole affine diagram")]
    NotFinite { gens: Vec<usize> },
    #[error("generator index {index} is out of range 0..={max}")]
    InvalidGenerator { index: usize, max: usize },
    #[error("diagram automorphism is not compatible: {0}")]
    SigmaIncompatible(String),
}

fn validate_generators(datum: &GroupDatum, gens: &[usize]) -> Result<Vec<usize>, CosetError> {
    let max = datum.rank();
    let mut out: Vec<usize> = gens.to_vec();
    for &g in &out {
        if g > max {
            return Err(CosetError::InvalidGenerator { index: g, max });
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// A deduplicated generator set spans a finite group exactly when it is a
/// proper subset of the affine nodes: dropping any node from an irreducible
/// affine diagram leaves a finite type, while the full set generates the
/// affine Weyl group.
fn ensure_finite(datum: &GroupDatum, gens: &[usize]) -> Result<(), CosetError> {
    if gens.len() == datum.affine_rank() {
        return Err(CosetError::NotFinite { gens: gens.to_vec() });
    }
    Ok(())
}

fn ensure_owned(datum: &GroupDatum, x: &ExtAffineElement) -> Result<(), CosetError> {
    if !datum.owns(x) {
        return Err(CosetError::Group(GroupError::DatumMismatch));
    }
    Ok(())
}

/// A standard parabolic subgroup, fully materialized. Construction fails
/// with [`CosetError::NotFinite`] when the generators span the whole affine
/// diagram, and with a cap error when a finite closure outgrows the guard.
pub struct ParabolicSubgroup {
    generators: Vec<usize>,
    elements: Vec<ExtAffineElement>,
}

impl ParabolicSubgroup {
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Elements in breadth-first (length) order, identity first.
    pub fn elements(&self) -> &[ExtAffineElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &ExtAffineElement) -> bool {
        self.elements.contains(x)
    }
}

pub fn parabolic_subgroup(
    datum: &GroupDatum,
    gens: &[usize],
    cap: usize,
) -> Result<ParabolicSubgroup, CosetError> {
    let generators = validate_generators(datum, gens)?;
    ensure_finite(datum, &generators)?;
    let mut elements = vec![datum.identity()];
    let mut seen: std::collections::HashSet<ExtAffineElement> =
        elements.iter().cloned().collect();
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for &j in &generators {
                let s = datum.affine_simple_reflection(j)?;
                let xs = datum.multiply(x, s)?;
                if seen.insert(xs.clone()) {
                    if seen.len() > cap {
                        return Err(CosetError::Group(GroupError::CapExceeded { cap }));
                    }
                    next.push(xs);
                }
            }
        }
        elements.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(ParabolicSubgroup { generators, elements })
}

/// Canonical factorization of an element relative to a pair of parabolic
/// generating sets: `x = w · x0 · w'` with `w` a product of left-set
/// letters, `w'` of right-set letters, `x0` the unique minimal-length
/// element of the double coset, and `ℓ(x) = ℓ(w) + ℓ(x0) + ℓ(w')`.
pub struct DoubleCosetRep {
    pub w: ExtAffineElement,
    pub x0: ExtAffineElement,
    pub w_prime: ExtAffineElement,
    pub w_word: Vec<usize>,
    pub x0_word: Vec<usize>,
    pub w_prime_word: Vec<usize>,
}

pub fn min_double_rep(
    datum: &GroupDatum,
    x: &ExtAffineElement,
    left: &[usize],
    right: &[usize],
) -> Result<DoubleCosetRep, CosetError> {
    ensure_owned(datum, x)?;
    let left = validate_generators(datum, left)?;
    let right = validate_generators(datum, right)?;
    let mut cur = x.clone();
    let mut w_word: Vec<usize> = Vec::new();
    let mut wp_peeled: Vec<usize> = Vec::new();
    loop {
        if let Some(&j) = right.iter().find(|&&j| datum.right_descends(&cur, j)) {
            let s = datum.affine_simple_reflection(j)?;
            cur = datum.multiply(&cur, s)?;
            wp_peeled.push(j);
            continue;
        }
        if let Some(&i) = left.iter().find(|&&i| datum.left_descends(i, &cur)) {
            let s = datum.affine_simple_reflection(i)?;
            cur = datum.multiply(s, &cur)?;
            w_word.push(i);
            continue;
        }
        break;
    }
    let w_prime_word: Vec<usize> = wp_peeled.into_iter().rev().collect();
    let w = datum.from_word(&w_word, None)?;
    let w_prime = datum.from_word(&w_prime_word, None)?;
    let x0_word = datum.reduced_word(&cur).0;
    debug_assert_eq!(
        datum.length(x),
        datum.length(&w) + datum.length(&cur) + datum.length(&w_prime),
        "lengths must add in the canonical factorization"
    );
    debug_assert_eq!(
        &datum
            .multiply(&datum.multiply(&w, &cur)?, &w_prime)?,
        x,
        "factorization must recompose"
    );
    Ok(DoubleCosetRep { w, x0: cur, w_prime, w_word, x0_word, w_prime_word })
}

/// Decides `x <= y` in Bruhat order via the lifting property. Elements in
/// different components (distinct Kottwitz classes) are incomparable.
pub fn bruhat_leq(
    datum: &GroupDatum,
    x: &ExtAffineElement,
    y: &ExtAffineElement,
) -> Result<bool, CosetError> {
    ensure_owned(datum, x)?;
    ensure_owned(datum, y)?;
    if datum.kottwitz_class(x) != datum.kottwitz_class(y) {
        return Ok(false);
    }
    Ok(bruhat_rec(datum, x.clone(), y.clone()))
}

fn bruhat_rec(datum: &GroupDatum, x: ExtAffineElement, y: ExtAffineElement) -> bool {
    let ly = datum.length(&y);
    if datum.length(&x) > ly {
        return false;
    }
    if ly == 0 {
        return x == y;
    }
    let i = (0..datum.affine_rank())
        .find(|&i| datum.left_descends(i, &y))
        .expect("positive length forces a descent");
    let s = datum.affine_simple_reflection(i).unwrap();
    let sy = datum.multiply(s, &y).unwrap();
    if datum.left_descends(i, &x) {
        let sx = datum.multiply(s, &x).unwrap();
        bruhat_rec(datum, sx, sy)
    } else {
        bruhat_rec(datum, x, sy)
    }
}

/// One double coset met by a ball: its canonical representative and how
/// much of it the ball sees. `truncated` is set when the coset continues
/// past the ball boundary.
#[derive(Clone, Debug)]
pub struct CosetClass {
    pub x0: ExtAffineElement,
    pub x0_word: Vec<usize>,
    pub omega_index: usize,
    pub length: u64,
    pub size_in_ball: usize,
    pub truncated: bool,
}

/// Groups the ball of radius `max_len` into double cosets by canonical
/// representative. Classes are sorted by (length, representative word,
/// component index).
pub fn enumerate_double_cosets(
    datum: &GroupDatum,
    left: &[usize],
    right: &[usize],
    max_len: u64,
    cap: usize,
    parallel: bool,
) -> Result<Vec<CosetClass>, CosetError> {
    let left = validate_generators(datum, left)?;
    let right = validate_generators(datum, right)?;
    ensure_finite(datum, &left)?;
    ensure_finite(datum, &right)?;
    let ball: Vec<ExtAffineElement> = datum
        .ball(max_len, cap, parallel)?
        .into_iter()
        .flatten()
        .collect();
    let reps: Vec<ExtAffineElement> = if parallel {
        ball.par_iter()
            .map(|x| min_double_rep(datum, x, &left, &right).map(|r| r.x0))
            .collect::<Result<_, _>>()?
    } else {
        ball.iter()
            .map(|x| min_double_rep(datum, x, &left, &right).map(|r| r.x0))
            .collect::<Result<_, _>>()?
    };
    let mut groups: HashMap<&ExtAffineElement, Vec<usize>> = HashMap::new();
    for (i, rep) in reps.iter().enumerate() {
        groups.entry(rep).or_default().push(i);
    }
    let mut classes = Vec::with_capacity(groups.len());
    for (rep, members) in groups {
        let mut truncated = false;
        'outer: for &m in &members {
            for &j in &left {
                let s = datum.affine_simple_reflection(j)?;
                if datum.length(&datum.multiply(s, &ball[m])?) > max_len {
                    truncated = true;
                    break 'outer;
                }
            }
            for &j in &right {
                let s = datum.affine_simple_reflection(j)?;
                if datum.length(&datum.multiply(&ball[m], s)?) > max_len {
                    truncated = true;
                    break 'outer;
                }
            }
        }
        classes.push(CosetClass {
            x0: rep.clone(),
            x0_word: datum.reduced_word(rep).0,
            omega_index: datum.omega_index(rep),
            length: datum.length(rep),
            size_in_ball: members.len(),
            truncated,
        });
    }
    classes.sort_by(|a, b| {
        (a.length, &a.x0_word, a.omega_index).cmp(&(b.length, &b.x0_word, b.omega_index))
    });
    Ok(classes)
}

/// A diagram automorphism: a permutation of the affine nodes that fixes
/// node 0 and preserves the affine Cartan matrix, inducing a length- and
/// descent-preserving automorphism of the whole group.
pub struct DiagramAutomorphism {
    perm: Vec<usize>,
    /// Permutation action on simple-root coordinates; its own transpose
    /// gives the inverse and the coweight-coordinate action coincides.
    root_perm: IntMat,
    /// Induced map on lattice coordinates.
    lattice_map: IntMat,
}

impl DiagramAutomorphism {
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn image_of_node(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn maps_set_to_itself(&self, gens: &[usize]) -> bool {
        let image: std::collections::HashSet<usize> =
            gens.iter().map(|&g| self.perm[g]).collect();
        let original: std::collections::HashSet<usize> = gens.iter().copied().collect();
        image == original
    }

    /// Applies the automorphism to an element.
    pub fn apply(
        &self,
        datum: &GroupDatum,
        x: &ExtAffineElement,
    ) -> Result<ExtAffineElement, CosetError> {
        ensure_owned(datum, x)?;
        let lambda = self.lattice_map.matvec(x.translation_part());
        let conjugated = self
            .root_perm
            .mul(x.finite_part().root_matrix())
            .mul(&self.root_perm.transpose());
        let finite = datum
            .root_system()
            .weyl_from_root_matrix(conjugated)
            .map_err(GroupError::from)?;
        Ok(datum.from_parts(x.torsion_part(), &lambda, finite)?)
    }
}

/// Validates a permutation of the affine nodes as a diagram automorphism.
pub fn diagram_automorphism(
    datum: &GroupDatum,
    perm: &[usize],
) -> Result<DiagramAutomorphism, CosetError> {
    let n = datum.affine_rank();
    let r = datum.rank();
    if perm.len() != n {
        return Err(CosetError::SigmaIncompatible(format!(
            "expected a permutation of {n} affine nodes, got {} entries",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(CosetError::SigmaIncompatible(
                "node images are not a permutation".into(),
            ));
        }
        seen[p] = true;
    }
    if perm[0] != 0 {
        return Err(CosetError::SigmaIncompatible(
            "the extra node 0 must be fixed".into(),
        ));
    }

    // Affine Cartan matrix, with node 0 attached through the highest root.
    let rs = datum.root_system();
    let theta = rs.theta().clone();
    let theta_co = rs.coroot_int(&theta).expect("highest root is a root");
    let mut affine_cartan = IntMat::zeros(n, n);
    affine_cartan.set(0, 0, 2);
    for j in 1..=r {
        let alpha_j = rs.simple_root(j);
        // <θ∨, α_j> and <α_j∨, θ>.
        affine_cartan.set(0, j, -crate::rootsys::pairing_int(&alpha_j, &theta_co));
        affine_cartan.set(j, 0, -rs.coroot_pairing(&alpha_j, &theta).unwrap());
        for k in 1..=r {
            affine_cartan.set(j, k, rs.cartan_matrix().get(j - 1, k - 1));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if affine_cartan.get(perm[i], perm[j]) != affine_cartan.get(i, j) {
                return Err(CosetError::SigmaIncompatible(format!(
                    "nodes {i} and {j} break the affine Cartan matrix"
                )));
            }
        }
    }

    let mut root_perm = IntMat::zeros(r, r);
    for j in 1..=r {
        root_perm.set(perm[j] - 1, j - 1, 1);
    }

    // The induced map on lattice coordinates must be integral (the
    // permutation action in coweight coordinates is again `root_perm`).
    let m = datum.lattice_basis();
    let m_inv = m.inverse().expect("lattice basis is invertible");
    let lattice_map = m_inv
        .mul(&root_perm.to_rat())
        .mul(&m.to_rat())
        .to_int()
        .ok_or_else(|| {
            CosetError::SigmaIncompatible("the lattice is not stable under the map".into())
        })?;
    assert_eq!(lattice_map.det().abs(), 1, "integral permutation conjugate is unimodular");

    // With the trivial action on torsion coordinates, compatibility means
    // the generator actions are themselves permuted into each other.
    if datum.has_nontrivial_torsion_action() {
        for i in 1..=r {
            let ni = datum.torsion_generator_action(i).unwrap();
            let npi = datum.torsion_generator_action(perm[i]).unwrap();
            let ok = (0..ni.rows()).all(|p| {
                (0..ni.cols()).all(|q| {
                    (ni.get(p, q) - npi.get(p, q)).rem_euclid(datum.torsion_orders()[p]) == 0
                })
            });
            if !ok {
                return Err(CosetError::SigmaIncompatible(format!(
                    "torsion action of node {i} differs from node {}",
                    perm[i]
                )));
            }
        }
    }

    Ok(DiagramAutomorphism { perm: perm.to_vec(), root_perm, lattice_map })
}

/// True when the double coset of `x0` is mapped to itself, decided by
/// re-canonicalizing the image of the representative.
pub fn is_sigma_stable_coset(
    datum: &GroupDatum,
    sigma: &DiagramAutomorphism,
    x0: &ExtAffineElement,
    left: &[usize],
    right: &[usize],
) -> Result<bool, CosetError> {
    let image = sigma.apply(datum, x0)?;
    let rep = min_double_rep(datum, &image, left, right)?;
    Ok(&rep.x0 == x0)
}

/// Comparison of setwise coset stability against fixedness of canonical
/// representatives, over all double cosets met by a ball.
#[derive(Clone, Debug)]
pub struct DescentReport {
    pub total_classes: usize,
    /// Classes whose coset is mapped to itself.
    pub stable_classes: usize,
    /// Classes whose canonical representative is fixed pointwise.
    pub fixed_reps: usize,
    /// Representative words of classes where the two notions disagree.
    /// The two are provably equivalent, so anything here is a bug.
    pub counterexamples: Vec<Vec<usize>>,
    pub truncated_classes: usize,
}

/// Runs the stable-versus-fixed comparison for a diagram automorphism that
/// preserves both generating sets.
pub fn descent_check(
    datum: &GroupDatum,
    sigma: &DiagramAutomorphism,
    left: &[usize],
    right: &[usize],
    max_len: u64,
    cap: usize,
    parallel: bool,
) -> Result<DescentReport, CosetError> {
    let left = validate_generators(datum, left)?;
    let right = validate_generators(datum, right)?;
    ensure_finite(datum, &left)?;
    ensure_finite(datum, &right)?;
    if !sigma.maps_set_to_itself(&left) {
        return Err(CosetError::SigmaIncompatible(
            "the left generating set is not preserved".into(),
        ));
    }
    if !sigma.maps_set_to_itself(&right) {
        return Err(CosetError::SigmaIncompatible(
            "the right generating set is not preserved".into(),
        ));
    }
    let classes = enumerate_double_cosets(datum, &left, &right, max_len, cap, parallel)?;
    let mut report = DescentReport {
        total_classes: classes.len(),
        stable_classes: 0,
        fixed_reps: 0,
        counterexamples: Vec::new(),
        truncated_classes: classes.iter().filter(|c| c.truncated).count(),
    };
    for class in &classes {
        let stable = is_sigma_stable_coset(datum, sigma, &class.x0, &left, &right)?;
        let fixed = sigma.apply(datum, &class.x0)? == class.x0;
        if stable {
            report.stable_classes += 1;
        }
        if fixed {
            report.fixed_reps += 1;
        }
        if stable != fixed {
            report.counterexamples.push(class.x0_word.clone());
        }
    }
    Ok(report)
}
