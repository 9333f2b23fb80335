//! Finite root system combinatorics for the Cartan families A through G.
//!
//! Two coordinate systems are used throughout, both with exact arithmetic:
//!
//! * roots live in the root space `V` and are written in the basis of simple
//!   roots, so a root is an integer vector and the simple root `α_i` is the
//!   `i`-th unit vector (indices are 1-based in the mathematics, 0-based in
//!   the vectors);
//! * coweights live in the dual space `V'` and are written in the basis of
//!   fundamental coweights, so coordinate `j` of `x` is the value `α_j(x)`.
//!
//! With these choices the natural pairing is a plain dot product, the coroot
//! `α∨_i` is the `i`-th row of the Cartan matrix, and every Weyl group
//! element acts by an integer matrix on either side.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{IntMat, Rat};

/// Default cap on the rank accepted by `enumerate_finite_weyl`.
pub const DEFAULT_RANK_BOUND: usize = 8;

#[derive(Error, Debug)]
pub enum RootSystemError {
    #[error("unknown Cartan type `{0}`; expected a letter A-G followed by a rank")]
    UnknownType(String),
    #[error("rank {rank} is not valid for family {family}")]
    InvalidRank { family: char, rank: usize },
    #[error("rank {rank} exceeds the enumeration bound {bound}")]
    RankBoundExceeded { rank: usize, bound: usize },
    #[error("`{0}` is not a root of this system")]
    NotARoot(String),
    #[error("rank mismatch: expected a vector of length {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
}

/// One of the irreducible Cartan families.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

/// An irreducible Cartan type such as `C2` or `E8`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self, RootSystemError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(CartanType { family, rank })
        } else {
            Err(RootSystemError::InvalidRank { family: family.letter(), rank })
        }
    }

    /// Parses notation like `A2`, `e7`, `D 4`.
    pub fn parse(s: &str) -> Result<Self, RootSystemError> {
        let t = s.trim();
        let mut chars = t.chars();
        let letter = chars
            .next()
            .ok_or_else(|| RootSystemError::UnknownType(s.to_string()))?;
        let family = match letter.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return Err(RootSystemError::UnknownType(s.to_string())),
        };
        let rank: usize = chars
            .as_str()
            .trim()
            .parse()
            .map_err(|_| RootSystemError::UnknownType(s.to_string()))?;
        CartanType::new(family, rank)
    }

    /// Order of the finite Weyl group, `None` if it overflows `u128`.
    pub fn weyl_order(&self) -> Option<u128> {
        let factorial = |n: usize| -> Option<u128> {
            (2..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
        };
        let r = self.rank;
        match self.family {
            Family::A => factorial(r + 1),
            Family::B | Family::C => factorial(r)?.checked_mul(1u128.checked_shl(r as u32)?),
            Family::D => factorial(r)?.checked_mul(1u128.checked_shl(r as u32 - 1)?),
            Family::E => Some(match r {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            }),
            Family::F => Some(1_152),
            Family::G => Some(12),
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

/// A vector in the root space, in simple-root coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct RootVector(pub Vec<i64>);

impl RootVector {
    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// Height: the sum of simple-root coefficients.
    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    /// True when every coefficient is `>= 0` and some coefficient is `> 0`.
    /// Every root of the system is either positive or negative in this sense.
    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c >= 0) && self.0.iter().any(|&c| c > 0)
    }

    pub fn negated(&self) -> RootVector {
        RootVector(self.0.iter().map(|&c| -c).collect())
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A vector in the coweight space `V'`, in fundamental-coweight coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoweightVector(pub Vec<Rat>);

impl CoweightVector {
    pub fn from_int(coords: &[i64]) -> Self {
        CoweightVector(coords.iter().map(|&c| Rat::from_integer(c)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        CoweightVector(vec![Rat::zero(); rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn add(&self, other: &CoweightVector) -> CoweightVector {
        assert_eq!(self.rank(), other.rank());
        CoweightVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CoweightVector) -> CoweightVector {
        assert_eq!(self.rank(), other.rank());
        CoweightVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, f: Rat) -> CoweightVector {
        CoweightVector(self.0.iter().map(|a| a * f).collect())
    }
}

/// The abelian group `Z/d_1 + ... + Z/d_k` given by its invariant factors
/// (each `> 1`, each dividing the next).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<i64>,
}

impl FiniteAbelianGroup {
    pub fn order(&self) -> i64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

/// An irreducible finite root system with its Weyl-group action data.
#[derive(Clone, Debug)]
pub struct RootSystem {
    cartan_type: CartanType,
    /// `cartan.get(i, j) = <α∨_{i+1}, α_{j+1}>`.
    cartan: IntMat,
    /// Minimal positive integers with `d_i A[i][j] = d_j A[j][i]`.
    symmetrizer: Vec<i64>,
    /// All positive roots, sorted by height then lexicographically.
    positive_roots: Vec<RootVector>,
    /// Coroot coordinates of each positive root, aligned with
    /// `positive_roots`; entry `k` is `<α∨, α_{k+1}>`.
    coroots: Vec<Vec<i64>>,
    /// Index of each positive root's coordinate vector.
    root_index: HashMap<Vec<i64>, usize>,
    /// Highest root.
    theta: RootVector,
    /// Sum of all positive roots.
    two_rho: RootVector,
}

impl RootSystem {
    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.cartan_type.rank
    }

    pub fn cartan_matrix(&self) -> &IntMat {
        &self.cartan
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    pub fn positive_roots(&self) -> &[RootVector] {
        &self.positive_roots
    }

    pub fn simple_root(&self, i: usize) -> RootVector {
        assert!((1..=self.rank()).contains(&i), "simple root index out of range");
        let mut c = vec![0; self.rank()];
        c[i - 1] = 1;
        RootVector(c)
    }

    pub fn theta(&self) -> &RootVector {
        &self.theta
    }

    pub fn two_rho(&self) -> &RootVector {
        &self.two_rho
    }

    /// Coefficients of the highest root over the simple roots.
    pub fn marks(&self) -> &[i64] {
        self.theta.coords()
    }

    /// True when `β` or `-β` appears in the positive root list.
    pub fn is_root(&self, beta: &RootVector) -> bool {
        beta.rank() == self.rank()
            && (self.root_index.contains_key(beta.coords())
                || self.root_index.contains_key(beta.negated().coords()))
    }

    /// Integer coweight coordinates of the coroot `β∨`; `β` must be a root.
    pub fn coroot_int(&self, beta: &RootVector) -> Result<Vec<i64>, RootSystemError> {
        if let Some(&i) = self.root_index.get(beta.coords()) {
            return Ok(self.coroots[i].clone());
        }
        if let Some(&i) = self.root_index.get(beta.negated().coords()) {
            return Ok(self.coroots[i].iter().map(|&c| -c).collect());
        }
        Err(RootSystemError::NotARoot(beta.to_string()))
    }

    /// The coroot `β∨` as a coweight vector.
    pub fn coroot(&self, beta: &RootVector) -> Result<CoweightVector, RootSystemError> {
        Ok(CoweightVector::from_int(&self.coroot_int(beta)?))
    }

    /// `<β∨, γ>` for roots `β`, `γ`.
    pub fn coroot_pairing(&self, beta: &RootVector, gamma: &RootVector) -> Result<i64, RootSystemError> {
        let co = self.coroot_int(beta)?;
        Ok(co.iter().zip(gamma.coords()).map(|(a, b)| a * b).sum())
    }

    /// The reflection `s_{α_i}` as a Weyl group element (1-based index).
    pub fn simple_reflection(&self, i: usize) -> FiniteWeylElement {
        assert!((1..=self.rank()).contains(&i), "simple reflection index out of range");
        self.reflection(&self.simple_root(i)).expect("simple root is a root")
    }

    /// The reflection in an arbitrary root `α`.
    pub fn reflection(&self, alpha: &RootVector) -> Result<FiniteWeylElement, RootSystemError> {
        let co = self.coroot_int(alpha)?;
        let r = self.rank();
        // On V: α_j -> α_j - <α∨, α_j> α, so column j picks up -co[j] * α.
        let mut root_mat = IntMat::identity(r);
        for j in 0..r {
            for k in 0..r {
                let x = root_mat.get(k, j) - co[j] * alpha.coords()[k];
                root_mat.set(k, j, x);
            }
        }
        // On V': x -> x - α(x) α∨, i.e. S[k][j] = δ_kj - co[k] α_j.
        let mut coweight_mat = IntMat::identity(r);
        for k in 0..r {
            for j in 0..r {
                let x = coweight_mat.get(k, j) - co[k] * alpha.coords()[j];
                coweight_mat.set(k, j, x);
            }
        }
        Ok(FiniteWeylElement::from_matrices(self, root_mat, coweight_mat))
    }

    pub fn identity_weyl(&self) -> FiniteWeylElement {
        let r = self.rank();
        FiniteWeylElement {
            root_mat: IntMat::identity(r),
            coweight_mat: IntMat::identity(r),
            length: 0,
        }
    }

    /// Builds a Weyl-compatible element from its action on simple-root
    /// coordinates, checking that the matrix permutes the root set. Used
    /// for maps given extrinsically, like diagram automorphisms.
    pub fn weyl_from_root_matrix(
        &self,
        root_mat: IntMat,
    ) -> Result<FiniteWeylElement, RootSystemError> {
        for beta in &self.positive_roots {
            let image = RootVector(root_mat.matvec(beta.coords()));
            if !self.is_root(&image) {
                return Err(RootSystemError::NotARoot(format!(
                    "matrix does not permute the roots: image {image} of {beta}"
                )));
            }
        }
        let coweight_mat = root_mat
            .transpose()
            .inverse()
            .and_then(|m| m.to_int())
            .ok_or_else(|| {
                RootSystemError::NotARoot("matrix is not invertible over the integers".into())
            })?;
        Ok(FiniteWeylElement::from_matrices(self, root_mat, coweight_mat))
    }

    /// Number of positive roots a Weyl element sends negative.
    fn inversion_count(&self, root_mat: &IntMat) -> u32 {
        let mut n = 0;
        for beta in &self.positive_roots {
            let image = root_mat.matvec(beta.coords());
            if RootVector(image).is_positive() {
                continue;
            }
            n += 1;
        }
        n
    }
}

/// An element of the finite Weyl group `W_0`, stored as its pair of integer
/// matrices: the action on `V` in simple-root coordinates and the action on
/// `V'` in fundamental-coweight coordinates. The two matrices are mutually
/// inverse-transpose, which makes inversion a pair of transpositions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FiniteWeylElement {
    root_mat: IntMat,
    coweight_mat: IntMat,
    length: u32,
}

impl FiniteWeylElement {
    fn from_matrices(rs: &RootSystem, root_mat: IntMat, coweight_mat: IntMat) -> Self {
        let length = rs.inversion_count(&root_mat);
        FiniteWeylElement { root_mat, coweight_mat, length }
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    pub fn root_matrix(&self) -> &IntMat {
        &self.root_mat
    }

    pub fn coweight_matrix(&self) -> &IntMat {
        &self.coweight_mat
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, rs: &RootSystem, other: &FiniteWeylElement) -> FiniteWeylElement {
        let root_mat = self.root_mat.mul(&other.root_mat);
        let coweight_mat = self.coweight_mat.mul(&other.coweight_mat);
        FiniteWeylElement::from_matrices(rs, root_mat, coweight_mat)
    }

    pub fn inverse(&self) -> FiniteWeylElement {
        FiniteWeylElement {
            root_mat: self.coweight_mat.transpose(),
            coweight_mat: self.root_mat.transpose(),
            length: self.length,
        }
    }

    pub fn apply_to_root(&self, beta: &RootVector) -> RootVector {
        RootVector(self.root_mat.matvec(beta.coords()))
    }

    pub fn apply_to_coweight(&self, x: &CoweightVector) -> CoweightVector {
        let mut out = vec![Rat::zero(); self.coweight_mat.rows()];
        for (k, item) in out.iter_mut().enumerate() {
            let mut acc = Rat::zero();
            for j in 0..self.coweight_mat.cols() {
                acc += Rat::from_integer(self.coweight_mat.get(k, j)) * x.coords()[j];
            }
            *item = acc;
        }
        CoweightVector(out)
    }

    /// Integer coweight action, used for lattice points.
    pub fn apply_to_coweight_int(&self, x: &[i64]) -> Vec<i64> {
        self.coweight_mat.matvec(x)
    }

    /// Images of the simple roots, i.e. the columns of the root matrix.
    pub fn simple_images(&self) -> Vec<RootVector> {
        (0..self.root_mat.cols())
            .map(|j| RootVector(self.root_mat.col(j)))
            .collect()
    }
}

/// Builds the root system of an irreducible Cartan type: Cartan matrix,
/// symmetrizer, the full set of positive roots with coroots, the highest
/// root, and the sum of positive roots.
pub fn build_root_system(ct: CartanType) -> RootSystem {
    let cartan = cartan_matrix(ct);
    let symmetrizer = symmetrizer_from_cartan(&cartan);
    let r = ct.rank;

    // Generate positive roots by saturating root strings upward in height.
    // For a positive root β ≠ α_i, the string through α_i gives
    // q = p - <α∨_i, β> copies above β, where p is the depth below.
    let mut found: HashSet<Vec<i64>> = HashSet::new();
    let mut by_height: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
    for i in 0..r {
        let mut c = vec![0i64; r];
        c[i] = 1;
        found.insert(c.clone());
        by_height[0].push(c);
    }
    loop {
        let current = by_height.last().unwrap().clone();
        let mut next: Vec<Vec<i64>> = Vec::new();
        for beta in &current {
            for i in 0..r {
                let is_simple_i = beta.iter().enumerate().all(|(k, &c)| c == i64::from(k == i));
                if is_simple_i {
                    continue;
                }
                let mut p = 0i64;
                loop {
                    let mut lower = beta.clone();
                    lower[i] -= p + 1;
                    if lower[i] < 0 || !found.contains(&lower) {
                        break;
                    }
                    p += 1;
                }
                let pair: i64 = (0..r).map(|j| cartan.get(i, j) * beta[j]).sum();
                if p - pair >= 1 {
                    let mut upper = beta.clone();
                    upper[i] += 1;
                    if found.insert(upper.clone()) {
                        next.push(upper);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        by_height.push(next);
    }

    let mut positive: Vec<RootVector> = found.into_iter().map(RootVector).collect();
    positive.sort_by(|a, b| (a.height(), a.coords()).cmp(&(b.height(), b.coords())));

    let top_height = positive.last().unwrap().height();
    let top: Vec<&RootVector> = positive.iter().filter(|b| b.height() == top_height).collect();
    assert_eq!(top.len(), 1, "highest root must be unique");
    let theta = top[0].clone();

    let mut two_rho = vec![0i64; r];
    for beta in &positive {
        for (k, c) in beta.coords().iter().enumerate() {
            two_rho[k] += c;
        }
    }

    // Coroot of β = Σ c_j α_j: <β∨, α_k> = 2 Σ_j c_j d_j A[j][k] / (β,β)
    // with (β,β) = Σ_{j,k} c_j c_k d_j A[j][k]. Integrality is an invariant.
    let mut coroots = Vec::with_capacity(positive.len());
    for beta in &positive {
        let c = beta.coords();
        let mut norm2 = 0i64;
        for j in 0..r {
            for k in 0..r {
                norm2 += c[j] * c[k] * symmetrizer[j] * cartan.get(j, k);
            }
        }
        assert!(norm2 > 0, "root of non-positive norm");
        let mut co = vec![0i64; r];
        for (k, item) in co.iter_mut().enumerate() {
            let num: i64 = (0..r).map(|j| 2 * c[j] * symmetrizer[j] * cartan.get(j, k)).sum();
            assert_eq!(num % norm2, 0, "non-integral coroot coordinate");
            *item = num / norm2;
        }
        coroots.push(co);
    }

    let root_index = positive
        .iter()
        .enumerate()
        .map(|(i, b)| (b.coords().to_vec(), i))
        .collect();

    RootSystem {
        cartan_type: ct,
        cartan,
        symmetrizer,
        positive_roots: positive,
        coroots,
        root_index,
        theta,
        two_rho: RootVector(two_rho),
    }
}

/// Cartan matrix in the convention `A[i][j] = <α∨_i, α_j>`, with Bourbaki
/// node numbering.
fn cartan_matrix(ct: CartanType) -> IntMat {
    let r = ct.rank;
    let mut a = IntMat::zeros(r, r);
    for i in 0..r {
        a.set(i, i, 2);
    }
    // 1-based undirected edges; simply-laced entries are -1 on both sides.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    match ct.family {
        Family::A | Family::B | Family::C => {
            for i in 1..r {
                edges.push((i, i + 1));
            }
        }
        Family::D => {
            for i in 1..r - 1 {
                edges.push((i, i + 1));
            }
            edges.push((r - 2, r));
        }
        Family::E => {
            edges.push((1, 3));
            edges.push((2, 4));
            for i in 3..r {
                edges.push((i, i + 1));
            }
        }
        Family::F => {
            edges.push((1, 2));
            edges.push((2, 3));
            edges.push((3, 4));
        }
        Family::G => {
            edges.push((1, 2));
        }
    }
    for (i, j) in edges {
        a.set(i - 1, j - 1, -1);
        a.set(j - 1, i - 1, -1);
    }
    // Multiple edges: the entry <long∨, short> stays -1 while
    // <short∨, long> doubles or triples.
    match ct.family {
        // α_r is short: <α∨_r, α_{r-1}> = -2.
        Family::B => a.set(r - 1, r - 2, -2),
        // α_r is long: <α∨_{r-1}, α_r> = -2.
        Family::C => a.set(r - 2, r - 1, -2),
        // α_1, α_2 long and α_3, α_4 short: <α∨_3, α_2> = -2.
        Family::F => a.set(2, 1, -2),
        // α_1 short, α_2 long: <α∨_1, α_2> = -3.
        Family::G => a.set(0, 1, -3),
        _ => {}
    }
    a
}

/// Minimal positive integers `d` with `d_i A[i][j] = d_j A[j][i]`, found by
/// propagating ratios along the (tree-shaped) Dynkin graph.
fn symmetrizer_from_cartan(a: &IntMat) -> Vec<i64> {
    let r = a.rows();
    let mut d = vec![Rat::zero(); r];
    d[0] = Rat::from_integer(1);
    let mut seen = vec![false; r];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..r {
            if i == j || seen[j] || a.get(i, j) == 0 {
                continue;
            }
            d[j] = d[i] * Rat::new(a.get(i, j), a.get(j, i));
            seen[j] = true;
            queue.push_back(j);
        }
    }
    assert!(seen.iter().all(|&s| s), "Dynkin diagram not connected");
    let lcm_den = d.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i64> = d
        .iter()
        .map(|x| x.numer() * (lcm_den / x.denom()))
        .collect();
    let gcd = ints.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    ints.iter().map(|&x| x / gcd).collect()
}

/// `<x, α>` as a dot product of coordinates.
pub fn pairing(alpha: &RootVector, x: &CoweightVector) -> Result<Rat, RootSystemError> {
    if alpha.rank() != x.rank() {
        return Err(RootSystemError::RankMismatch { expected: alpha.rank(), got: x.rank() });
    }
    Ok(alpha
        .coords()
        .iter()
        .zip(x.coords())
        .map(|(&a, b)| Rat::from_integer(a) * b)
        .fold(Rat::zero(), |acc, t| acc + t))
}

/// Integer pairing for lattice points in `V'`.
pub fn pairing_int(alpha: &RootVector, x: &[i64]) -> i64 {
    assert_eq!(alpha.rank(), x.len(), "rank mismatch in pairing");
    alpha.coords().iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Reflects a coweight point in the wall of the root `α`:
/// `x -> x - α(x) α∨`.
pub fn reflect(
    rs: &RootSystem,
    alpha: &RootVector,
    x: &CoweightVector,
) -> Result<CoweightVector, RootSystemError> {
    if x.rank() != rs.rank() {
        return Err(RootSystemError::RankMismatch { expected: rs.rank(), got: x.rank() });
    }
    let co = rs.coroot(alpha)?;
    let val = pairing(alpha, x)?;
    Ok(x.sub(&co.scaled(val)))
}

/// Enumerates the finite Weyl group by closing the simple reflections under
/// right multiplication (breadth-first, so elements come out sorted by
/// length, identity first). Refuses ranks above `bound` to keep the result
/// sizes sane.
pub fn enumerate_finite_weyl_bounded(
    rs: &RootSystem,
    bound: usize,
) -> Result<Vec<FiniteWeylElement>, RootSystemError> {
    if rs.rank() > bound {
        return Err(RootSystemError::RankBoundExceeded { rank: rs.rank(), bound });
    }
    let gens: Vec<FiniteWeylElement> = (1..=rs.rank()).map(|i| rs.simple_reflection(i)).collect();
    let mut seen: HashSet<IntMat> = HashSet::new();
    let mut out: Vec<FiniteWeylElement> = Vec::new();
    let mut queue: VecDeque<FiniteWeylElement> = VecDeque::new();
    let e = rs.identity_weyl();
    seen.insert(e.root_mat.clone());
    queue.push_back(e);
    while let Some(w) = queue.pop_front() {
        for s in &gens {
            let next = w.compose(rs, s);
            if seen.insert(next.root_mat.clone()) {
                queue.push_back(next);
            }
        }
        out.push(w);
    }
    Ok(out)
}

pub fn enumerate_finite_weyl(rs: &RootSystem) -> Result<Vec<FiniteWeylElement>, RootSystemError> {
    enumerate_finite_weyl_bounded(rs, DEFAULT_RANK_BOUND)
}

/// The quotient of the coweight lattice by the coroot lattice, via the Smith
/// normal form of the matrix whose columns are the simple coroots.
pub fn fundamental_group(rs: &RootSystem) -> FiniteAbelianGroup {
    let snf = crate::linalg::smith_normal_form(&rs.cartan_matrix().transpose());
    FiniteAbelianGroup {
        invariant_factors: snf.d.into_iter().filter(|&x| x > 1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weyl_order_matches_enumeration() {
        for name in ["A1", "A3", "B2", "C3", "D4", "G2"] {
            let system = rs(name);
            let enumerated = enumerate_finite_weyl(&system).unwrap().len();
            assert_eq!(system.cartan_type().weyl_order(), Some(enumerated as u128), "{name}");
        }
        assert_eq!(CartanType::parse("F4").unwrap().weyl_order(), Some(1152));
        assert_eq!(CartanType::parse("E8").unwrap().weyl_order(), Some(696_729_600));
        assert_eq!(CartanType::parse("A40").unwrap().weyl_order(), None);
    }

    fn rs(name: &str) -> RootSystem {
        build_root_system(CartanType::parse(name).unwrap())
    }

    /// Independent generation of the full root set: close the simple roots
    /// under all simple reflections computed straight from the Cartan
    /// matrix, `s_i(β) = β - <α∨_i, β> α_i`.
    fn roots_by_reflection_closure(system: &RootSystem) -> HashSet<Vec<i64>> {
        let r = system.rank();
        let a = system.cartan_matrix();
        let mut all: HashSet<Vec<i64>> = HashSet::new();
        let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
        for i in 0..r {
            let mut c = vec![0i64; r];
            c[i] = 1;
            all.insert(c.clone());
            queue.push_back(c);
        }
        while let Some(beta) = queue.pop_front() {
            for i in 0..r {
                let pair: i64 = (0..r).map(|j| a.get(i, j) * beta[j]).sum();
                let mut img = beta.clone();
                img[i] -= pair;
                if all.insert(img.clone()) {
                    queue.push_back(img);
                }
            }
        }
        all
    }

    #[test]
    fn positive_roots_match_reflection_closure() {
        for name in [
            "A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D3", "D4", "F4", "G2",
            "E6", "E7", "E8",
        ] {
            let system = rs(name);
            let closure = roots_by_reflection_closure(&system);
            let positives: HashSet<Vec<i64>> = closure
                .iter()
                .filter(|c| RootVector((*c).clone()).is_positive())
                .cloned()
                .collect();
            let ours: HashSet<Vec<i64>> = system
                .positive_roots()
                .iter()
                .map(|b| b.coords().to_vec())
                .collect();
            assert_eq!(ours, positives, "positive roots disagree for {name}");
            assert_eq!(closure.len(), 2 * ours.len(), "roots not closed under negation for {name}");
        }
    }

    #[test]
    fn positive_root_counts() {
        for (name, count) in [
            ("A1", 1),
            ("A2", 3),
            ("A3", 6),
            ("B2", 4),
            ("B3", 9),
            ("C2", 4),
            ("C3", 9),
            ("D4", 12),
            ("G2", 6),
            ("F4", 24),
            ("E6", 36),
            ("E7", 63),
            ("E8", 120),
        ] {
            assert_eq!(rs(name).positive_roots().len(), count, "count for {name}");
        }
    }

    #[test]
    fn highest_roots_and_marks() {
        assert_eq!(rs("A2").theta().coords(), &[1, 1]);
        assert_eq!(rs("B2").theta().coords(), &[1, 2]);
        assert_eq!(rs("C2").theta().coords(), &[2, 1]);
        assert_eq!(rs("G2").theta().coords(), &[3, 2]);
        assert_eq!(rs("F4").theta().coords(), &[2, 3, 4, 2]);
        assert_eq!(rs("A2").two_rho().coords(), &[2, 2]);
    }

    #[test]
    fn symmetrizers() {
        assert_eq!(rs("A3").symmetrizer(), &[1, 1, 1]);
        assert_eq!(rs("B3").symmetrizer(), &[2, 2, 1]);
        assert_eq!(rs("C3").symmetrizer(), &[1, 1, 2]);
        assert_eq!(rs("F4").symmetrizer(), &[2, 2, 1, 1]);
        assert_eq!(rs("G2").symmetrizer(), &[1, 3]);
    }

    #[test]
    fn cartan_type_validation() {
        assert!(CartanType::parse("B1").is_err());
        assert!(CartanType::parse("D2").is_err());
        assert!(CartanType::parse("E9").is_err());
        assert!(CartanType::parse("F3").is_err());
        assert!(CartanType::parse("G3").is_err());
        assert!(CartanType::parse("A0").is_err());
        assert!(CartanType::parse("H3").is_err());
        assert!(CartanType::parse("A").is_err());
        assert!(CartanType::parse("").is_err());
        assert_eq!(CartanType::parse(" e7 ").unwrap().to_string(), "E7");
    }

    #[test]
    fn pairing_examples() {
        let a2 = rs("A2");
        let theta = a2.theta().clone();
        let coroot1 = a2.coroot(&a2.simple_root(1)).unwrap();
        assert_eq!(pairing(&theta, &coroot1).unwrap(), Rat::from_integer(1));
        let bad = CoweightVector::zero(3);
        assert!(pairing(&theta, &bad).is_err());
    }

    #[test]
    fn coroots_of_simple_roots_are_cartan_rows() {
        for name in ["A2", "B2", "C2", "G2", "F4"] {
            let system = rs(name);
            for i in 1..=system.rank() {
                let co = system.coroot_int(&system.simple_root(i)).unwrap();
                let row: Vec<i64> = system.cartan_matrix().row(i - 1).to_vec();
                assert_eq!(co, row, "coroot of α_{i} in {name}");
            }
        }
    }

    #[test]
    fn reflect_examples() {
        let a2 = rs("A2");
        let alpha1 = a2.simple_root(1);
        // ω∨_1 in fundamental-coweight coordinates is the unit vector.
        let omega1 = CoweightVector::from_int(&[1, 0]);
        let image = reflect(&a2, &alpha1, &omega1).unwrap();
        assert_eq!(image, CoweightVector::from_int(&[-1, 1]));
        // Reflecting a coroot in its own wall negates it.
        let co = a2.coroot(&alpha1).unwrap();
        let neg = reflect(&a2, &alpha1, &co).unwrap();
        assert_eq!(neg, co.scaled(Rat::from_integer(-1)));
        // Not a root.
        assert!(reflect(&a2, &RootVector(vec![1, 2]), &omega1).is_err());
    }

    #[test]
    fn reflect_is_an_involution_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in ["A2", "B2", "C2", "G2", "A3"] {
            let system = rs(name);
            for beta in system.positive_roots() {
                for _ in 0..100 {
                    let x = CoweightVector(
                        (0..system.rank())
                            .map(|_| Rat::new(rng.gen_range(-60i64..60), rng.gen_range(1i64..6)))
                            .collect(),
                    );
                    let once = reflect(&system, beta, &x).unwrap();
                    let twice = reflect(&system, beta, &once).unwrap();
                    assert_eq!(twice, x, "double reflection in {beta} of {name}");
                }
            }
        }
    }

    #[test]
    fn weyl_group_orders() {
        for (name, order) in [
            ("A1", 2usize),
            ("A2", 6),
            ("A3", 24),
            ("A4", 120),
            ("B2", 8),
            ("B3", 48),
            ("B4", 384),
            ("C2", 8),
            ("C3", 48),
            ("C4", 384),
            ("D3", 24),
            ("D4", 192),
            ("G2", 12),
            ("F4", 1152),
        ] {
            let system = rs(name);
            let elements = enumerate_finite_weyl(&system).unwrap();
            assert_eq!(elements.len(), order, "group order for {name}");
            // Exactly one longest element, of length |positive roots|.
            let top = system.positive_roots().len() as u32;
            assert_eq!(elements.iter().filter(|w| w.length() == top).count(), 1);
            assert!(elements.iter().all(|w| w.length() <= top));
            assert_eq!(elements[0].length(), 0);
        }
    }

    #[test]
    fn rank_bound_is_enforced() {
        let system = rs("A3");
        assert!(enumerate_finite_weyl_bounded(&system, 2).is_err());
        assert!(enumerate_finite_weyl_bounded(&system, 3).is_ok());
    }

    #[test]
    fn weyl_elements_invert_and_respect_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for name in ["A2", "C2", "G2", "B3"] {
            let system = rs(name);
            let elements = enumerate_finite_weyl(&system).unwrap();
            for w in &elements {
                let winv = w.inverse();
                assert!(w.compose(&system, &winv).is_identity());
                assert_eq!(winv.length(), w.length());
            }
            // <w x, w β> = <x, β> on random data.
            for _ in 0..200 {
                let w = &elements[rng.gen_range(0..elements.len())];
                let beta = &system.positive_roots()
                    [rng.gen_range(0..system.positive_roots().len())];
                let x = CoweightVector(
                    (0..system.rank())
                        .map(|_| Rat::new(rng.gen_range(-30i64..30), rng.gen_range(1i64..5)))
                        .collect(),
                );
                let lhs = pairing(&w.apply_to_root(beta), &w.apply_to_coweight(&x)).unwrap();
                let rhs = pairing(beta, &x).unwrap();
                assert_eq!(lhs, rhs, "pairing not Weyl-invariant in {name}");
            }
        }
    }

    #[test]
    fn weyl_action_permutes_roots() {
        for name in ["A2", "B2", "G2"] {
            let system = rs(name);
            for w in enumerate_finite_weyl(&system).unwrap() {
                for beta in system.positive_roots() {
                    assert!(system.is_root(&w.apply_to_root(beta)));
                }
            }
        }
    }

    #[test]
    fn fundamental_groups() {
        assert_eq!(fundamental_group(&rs("A2")).invariant_factors, vec![3]);
        assert_eq!(fundamental_group(&rs("A3")).invariant_factors, vec![4]);
        assert_eq!(fundamental_group(&rs("B2")).invariant_factors, vec![2]);
        assert_eq!(fundamental_group(&rs("C3")).invariant_factors, vec![2]);
        assert_eq!(fundamental_group(&rs("D4")).invariant_factors, vec![2, 2]);
        assert_eq!(fundamental_group(&rs("E6")).invariant_factors, vec![3]);
        assert_eq!(fundamental_group(&rs("E7")).invariant_factors, vec![2]);
        assert!(fundamental_group(&rs("E8")).is_trivial());
        assert!(fundamental_group(&rs("F4")).is_trivial());
        assert!(fundamental_group(&rs("G2")).is_trivial());
        assert_eq!(fundamental_group(&rs("A2")).order(), 3);
    }

    #[test]
    fn all_supported_types_build() {
        for name in [
            "A1", "A8", "B2", "B8", "C2", "C8", "D3", "D8", "E6", "E7", "E8", "F4", "G2",
        ] {
            let system = rs(name);
            assert_eq!(system.rank(), system.cartan_matrix().rows());
            // Symmetrized Cartan matrix is symmetric.
            let a = system.cartan_matrix();
            let d = system.symmetrizer();
            for i in 0..system.rank() {
                for j in 0..system.rank() {
                    assert_eq!(d[i] * a.get(i, j), d[j] * a.get(j, i), "{name} symmetrizer");
                }
            }
        }
    }
}
