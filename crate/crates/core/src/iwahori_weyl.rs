//! The extended affine Weyl group attached to a root system and a lattice.
//!
//! A group datum fixes an irreducible root system `Σ` with finite Weyl group
//! `W_0`, a `W_0`-stable lattice `Λ` squeezed between the coroot lattice
//! `Q∨` and the coweight lattice `P∨`, and an optional finite torsion part.
//! The group is the semidirect product `W = Λ ⋊ W_0`; elements are stored in
//! the normal form
//!
//! ```text
//! x = (torsion part, translation t_λ, finite part w)
//! ```
//!
//! with the product `(t_λ u)(t_μ v) = t_{λ + uμ} (uv)`. The affine simple
//! reflections are `s_1, ..., s_r` from `W_0` together with
//! `s_0 = t_{θ∨} s_θ`, the reflection in the wall `θ(x) = 1`. Lengths count
//! the affine root hyperplanes separating the base alcove from its image;
//! the engine evaluates the closed form
//!
//! ```text
//! ℓ(t_λ w) = Σ_{α > 0, w⁻¹α > 0} |<λ, α>|  +  Σ_{α > 0, w⁻¹α < 0} |<λ, α> - 1|
//! ```
//!
//! which the test suite checks against a direct hyperplane count. Elements
//! of length zero form the subgroup `Ω`; it maps bijectively onto the
//! component group `Λ/Q∨ ⊕ torsion`, which is also the target of the
//! Kottwitz map.

use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{rat_vec_to_int, IntMat, Rat, RatMat};
use crate::rootsys::{
    build_root_system, enumerate_finite_weyl, pairing, pairing_int, CartanType, CoweightVector,
    FiniteAbelianGroup, FiniteWeylElement, RootSystem, RootSystemError, RootVector,
};

/// Cap on materialized elements in ball and closure enumerations.
pub const DEFAULT_ELEMENT_CAP: usize = 1_000_000;

#[derive(Error, Debug)]
pub enum DatumError {
    #[error("datum JSON is malformed: {0}")]
    Json(String),
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error("lattice specification is malformed: {0}")]
    MalformedLattice(String),
    #[error("lattice does not contain the coroot lattice")]
    LatticeTooSmall,
    #[error("lattice is not contained in the coweight lattice")]
    LatticeTooLarge,
    #[error("torsion action is not compatible: {0}")]
    ActionNotCompatible(String),
}

#[derive(Error, Debug)]
pub enum GroupError {
    #[error("element belongs to a different group datum")]
    DatumMismatch,
    #[error("rank mismatch: expected a vector of length {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("word letter {index} is out of range 0..={max}")]
    WordIndexOutOfRange { index: usize, max: usize },
    #[error("the supplied remainder element does not have length zero")]
    OmegaNotLengthZero,
    #[error("enumeration exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
}

/// Lattice half of a group datum, before validation.
#[derive(Clone, Debug)]
pub enum LatticeSpec {
    /// `Λ = Q∨`, with the simple coroots as basis.
    Coroot,
    /// `Λ = P∨`, with the fundamental coweights as basis.
    Coweight,
    /// An explicit sublattice of `P∨` (columns of `basis` in
    /// fundamental-coweight coordinates), plus a finite torsion part given
    /// by cyclic orders and an optional action of the simple reflections.
    Custom {
        basis: Vec<Vec<i64>>,
        torsion: Vec<i64>,
        torsion_action: Option<Vec<Vec<Vec<i64>>>>,
    },
}

/// An affine root `(β, k)`, the affine function `p -> β(p) + k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineRoot {
    pub gradient: RootVector,
    pub level: i64,
}

impl AffineRoot {
    /// Positive affine roots are those non-negative on the base alcove:
    /// positive level, or level zero with positive gradient.
    pub fn is_positive(&self) -> bool {
        self.level > 0 || (self.level == 0 && self.gradient.is_positive())
    }

    /// Evaluates the affine function at a point of `V'`.
    pub fn eval(&self, p: &CoweightVector) -> Result<Rat, RootSystemError> {
        Ok(pairing(&self.gradient, p)? + Rat::from_integer(self.level))
    }
}

/// The affine simple system: reflections `s_0, ..., s_r` paired with the
/// affine roots `a_0 = (-θ, 1)` and `a_i = (α_i, 0)` whose walls bound the
/// base alcove.
#[derive(Clone, Debug)]
pub struct AffineSimpleSystem {
    pub reflections: Vec<ExtAffineElement>,
    pub roots: Vec<AffineRoot>,
}

/// Image of an element under the Kottwitz map: its class in
/// `Λ/Q∨ ⊕ torsion`. The `free` residues are listed per nontrivial
/// invariant factor of `Λ/Q∨`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct KottwitzClass {
    pub free: Vec<i64>,
    pub torsion: Vec<i64>,
}

impl KottwitzClass {
    pub fn is_trivial(&self) -> bool {
        self.free.iter().all(|&x| x == 0) && self.torsion.iter().all(|&x| x == 0)
    }
}

/// An element of the extended affine Weyl group in semidirect normal form.
/// Plain data; all operations live on [`GroupDatum`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExtAffineElement {
    datum_id: u64,
    torsion: Vec<i64>,
    translation: Vec<i64>,
    finite: FiniteWeylElement,
}

impl ExtAffineElement {
    /// Torsion coordinates, reduced mod the torsion orders.
    pub fn torsion_part(&self) -> &[i64] {
        &self.torsion
    }

    /// Translation coordinates in the lattice basis.
    pub fn translation_part(&self) -> &[i64] {
        &self.translation
    }

    pub fn finite_part(&self) -> &FiniteWeylElement {
        &self.finite
    }

    pub fn is_identity(&self) -> bool {
        self.torsion.iter().all(|&t| t == 0)
            && self.translation.iter().all(|&c| c == 0)
            && self.finite.is_identity()
    }

    /// True when the finite part is trivial, i.e. the element is a pure
    /// translation possibly with torsion.
    pub fn is_translation(&self) -> bool {
        self.finite.is_identity()
    }
}

/// Raw JSON schema for a datum. Strict: unknown keys are rejected.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDatum {
    cartan_type: String,
    lattice: RawLattice,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawLattice {
    Preset(String),
    Custom(RawCustomLattice),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCustomLattice {
    basis: Vec<Vec<i64>>,
    #[serde(default)]
    torsion: Vec<i64>,
    #[serde(default)]
    torsion_action: Option<RawTorsionAction>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTorsionAction {
    Keyword(String),
    Matrices(Vec<Vec<Vec<i64>>>),
}

/// A validated group datum: root system, lattice, torsion, and every cache
/// the group operations need. Construct once and share by reference;
/// elements carry a fingerprint so that cross-datum mixing is detected.
pub struct GroupDatum {
    root_system: RootSystem,
    /// Columns are the lattice basis in fundamental-coweight coordinates.
    m: IntMat,
    m_inv: RatMat,
    torsion_orders: Vec<i64>,
    /// Action of `s_1, ..., s_r` on the torsion part; `None` means trivial.
    torsion_action: Option<Vec<IntMat>>,
    /// Smith data of the matrix whose columns are the simple coroots in
    /// lattice coordinates: `u * c * v = diag(d)`.
    kottwitz_u: IntMat,
    kottwitz_d: Vec<i64>,
    /// Positions `i` with `d_i > 1`, i.e. the nontrivial cyclic factors of
    /// `Λ/Q∨`.
    free_positions: Vec<usize>,
    /// `θ∨` in lattice coordinates.
    theta_coroot: Vec<i64>,
    affine_simple: AffineSimpleSystem,
    fingerprint: u64,
    omega_cache: OnceLock<Vec<ExtAffineElement>>,
    /// Memo of torsion-action matrices per finite Weyl element, keyed by the
    /// root matrix. Only consulted when the torsion action is nontrivial.
    torsion_memo: Mutex<HashMap<IntMat, IntMat>>,
}

impl GroupDatum {
    pub fn from_json(json: &str) -> Result<GroupDatum, DatumError> {
        let raw: RawDatum =
            serde_json::from_str(json).map_err(|e| DatumError::Json(e.to_string()))?;
        let ct = CartanType::parse(&raw.cartan_type)?;
        let spec = match raw.lattice {
            RawLattice::Preset(p) => match p.as_str() {
                "coroot" => LatticeSpec::Coroot,
                "coweight" => LatticeSpec::Coweight,
                other => {
                    return Err(DatumError::MalformedLattice(format!(
                        "unknown preset `{other}`; expected \"coroot\" or \"coweight\""
                    )))
                }
            },
            RawLattice::Custom(c) => {
                let torsion_action = match c.torsion_action {
                    None => None,
                    Some(RawTorsionAction::Keyword(k)) if k == "trivial" => None,
                    Some(RawTorsionAction::Keyword(k)) => {
                        return Err(DatumError::MalformedLattice(format!(
                            "unknown torsion action keyword `{k}`"
                        )))
                    }
                    Some(RawTorsionAction::Matrices(m)) => Some(m),
                };
                LatticeSpec::Custom { basis: c.basis, torsion: c.torsion, torsion_action }
            }
        };
        GroupDatum::new(ct, spec)
    }

    /// Validates a lattice specification against a root system and builds
    /// the group datum.
    pub fn new(ct: CartanType, spec: LatticeSpec) -> Result<GroupDatum, DatumError> {
        let root_system = build_root_system(ct);
        let r = root_system.rank();

        let (m, torsion_orders, raw_action) = match spec {
            LatticeSpec::Coroot => (root_system.cartan_matrix().transpose(), Vec::new(), None),
            LatticeSpec::Coweight => (IntMat::identity(r), Vec::new(), None),
            LatticeSpec::Custom { basis, torsion, torsion_action } => {
                if basis.len() != r {
                    return Err(DatumError::MalformedLattice(format!(
                        "expected {r} basis vectors, got {}",
                        basis.len()
                    )));
                }
                if basis.iter().any(|v| v.len() != r) {
                    return Err(DatumError::MalformedLattice(
                        "basis vectors must have length equal to the rank".into(),
                    ));
                }
                if torsion.iter().any(|&d| d < 2) {
                    return Err(DatumError::MalformedLattice(
                        "torsion factors must be integers >= 2".into(),
                    ));
                }
                (IntMat::from_cols(&basis), torsion, torsion_action)
            }
        };

        // Λ ⊆ P∨ holds because the basis is integral in coweight
        // coordinates; a failure here would be LatticeTooLarge.
        let Some(m_inv) = m.inverse() else {
            // A singular basis spans a proper subspace, so it cannot
            // contain the full coroot lattice.
            return Err(DatumError::LatticeTooSmall);
        };

        // Q∨ ⊆ Λ: every simple coroot must have integral lattice
        // coordinates.
        let mut coroot_cols: Vec<Vec<i64>> = Vec::with_capacity(r);
        for i in 0..r {
            let coroot: Vec<i64> = root_system.cartan_matrix().row(i).to_vec();
            let coords = rat_vec_to_int(&m_inv.matvec_int(&coroot))
                .ok_or(DatumError::LatticeTooSmall)?;
            coroot_cols.push(coords);
        }

        // The sandwich Q∨ ⊆ Λ ⊆ P∨ forces W_0-stability; keep the check as
        // an internal invariant.
        for i in 1..=r {
            let s = root_system.simple_reflection(i);
            let action = m_inv.matvec_int(&s.apply_to_coweight_int(&m.col(0)));
            assert!(
                rat_vec_to_int(&action).is_some(),
                "validated lattice must be Weyl-stable"
            );
        }

        let torsion_action = match raw_action {
            None => None,
            Some(mats) => Some(validate_torsion_action(
                &root_system,
                &torsion_orders,
                &mats,
            )?),
        };

        let snf = crate::linalg::smith_normal_form(&IntMat::from_cols(&coroot_cols));
        assert!(snf.d.iter().all(|&d| d >= 1), "coroot matrix must be nonsingular");
        let kottwitz_u_int = snf.u;
        let free_positions = (0..r).filter(|&i| snf.d[i] > 1).collect();

        let theta_coroot_v = root_system.coroot_int(&root_system.theta().clone())
            .expect("highest root is a root");
        let theta_coroot = rat_vec_to_int(&m_inv.matvec_int(&theta_coroot_v))
            .expect("θ∨ lies in Q∨ ⊆ Λ");

        let fingerprint = datum_fingerprint(ct, &m, &torsion_orders, torsion_action.as_deref());

        let mut datum = GroupDatum {
            root_system,
            m,
            m_inv,
            torsion_orders,
            torsion_action,
            kottwitz_u: kottwitz_u_int,
            kottwitz_d: snf.d,
            free_positions,
            theta_coroot,
            affine_simple: AffineSimpleSystem { reflections: Vec::new(), roots: Vec::new() },
            fingerprint,
            omega_cache: OnceLock::new(),
            torsion_memo: Mutex::new(HashMap::new()),
        };

        let r = datum.rank();
        let mut reflections = Vec::with_capacity(r + 1);
        let mut roots = Vec::with_capacity(r + 1);
        let s_theta = datum
            .root_system
            .reflection(&datum.root_system.theta().clone())
            .expect("highest root is a root");
        reflections.push(ExtAffineElement {
            datum_id: fingerprint,
            torsion: vec![0; datum.torsion_orders.len()],
            translation: datum.theta_coroot.clone(),
            finite: s_theta,
        });
        roots.push(AffineRoot { gradient: datum.root_system.theta().negated(), level: 1 });
        for i in 1..=r {
            reflections.push(ExtAffineElement {
                datum_id: fingerprint,
                torsion: vec![0; datum.torsion_orders.len()],
                translation: vec![0; r],
                finite: datum.root_system.simple_reflection(i),
            });
            roots.push(AffineRoot { gradient: datum.root_system.simple_root(i), level: 0 });
        }
        datum.affine_simple = AffineSimpleSystem { reflections, roots };
        Ok(datum)
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.root_system
    }

    pub fn cartan_type(&self) -> CartanType {
        self.root_system.cartan_type()
    }

    pub fn rank(&self) -> usize {
        self.root_system.rank()
    }

    /// Rank of the free part of the lattice (always the root-system rank).
    pub fn lattice_rank(&self) -> usize {
        self.rank()
    }

    pub fn torsion_orders(&self) -> &[i64] {
        &self.torsion_orders
    }

    pub fn torsion_order(&self) -> i64 {
        self.torsion_orders.iter().product()
    }

    pub fn has_nontrivial_torsion_action(&self) -> bool {
        self.torsion_action.is_some()
    }

    /// Lattice basis matrix: columns in fundamental-coweight coordinates.
    pub fn lattice_basis(&self) -> &IntMat {
        &self.m
    }

    /// Invariant factors (each `> 1`) of `Λ/Q∨`.
    pub fn component_invariant_factors(&self) -> Vec<i64> {
        self.free_positions.iter().map(|&i| self.kottwitz_d[i]).collect()
    }

    /// `Λ/Q∨ ⊕ torsion` as an abstract finite abelian group order.
    pub fn component_group_order(&self) -> i64 {
        self.component_invariant_factors().iter().product::<i64>() * self.torsion_order()
    }

    pub fn fundamental_group(&self) -> FiniteAbelianGroup {
        FiniteAbelianGroup { invariant_factors: self.component_invariant_factors() }
    }

    pub fn affine_simple_system(&self) -> &AffineSimpleSystem {
        &self.affine_simple
    }

    /// Number of affine simple reflections, `rank + 1`.
    pub fn affine_rank(&self) -> usize {
        self.rank() + 1
    }

    pub fn affine_simple_reflection(&self, i: usize) -> Result<&ExtAffineElement, GroupError> {
        self.affine_simple
            .reflections
            .get(i)
            .ok_or(GroupError::WordIndexOutOfRange { index: i, max: self.rank() })
    }

    fn check(&self, x: &ExtAffineElement) -> Result<(), GroupError> {
        if x.datum_id != self.fingerprint {
            return Err(GroupError::DatumMismatch);
        }
        Ok(())
    }

    /// True when the element was built against this datum.
    pub fn owns(&self, x: &ExtAffineElement) -> bool {
        x.datum_id == self.fingerprint
    }

    /// The torsion action matrix of `s_i` (1-based), when nontrivial.
    pub fn torsion_generator_action(&self, i: usize) -> Option<&IntMat> {
        self.torsion_action.as_ref().map(|mats| &mats[i - 1])
    }

    // ---- element constructors ----

    pub fn identity(&self) -> ExtAffineElement {
        ExtAffineElement {
            datum_id: self.fingerprint,
            torsion: vec![0; self.torsion_orders.len()],
            translation: vec![0; self.rank()],
            finite: self.root_system.identity_weyl(),
        }
    }

    /// The translation `t_λ` for `λ` in lattice coordinates.
    pub fn translation(&self, lambda: &[i64]) -> Result<ExtAffineElement, GroupError> {
        if lambda.len() != self.rank() {
            return Err(GroupError::RankMismatch { expected: self.rank(), got: lambda.len() });
        }
        Ok(ExtAffineElement {
            datum_id: self.fingerprint,
            torsion: vec![0; self.torsion_orders.len()],
            translation: lambda.to_vec(),
            finite: self.root_system.identity_weyl(),
        })
    }

    /// A pure torsion element.
    pub fn torsion_element(&self, t: &[i64]) -> Result<ExtAffineElement, GroupError> {
        if t.len() != self.torsion_orders.len() {
            return Err(GroupError::RankMismatch {
                expected: self.torsion_orders.len(),
                got: t.len(),
            });
        }
        Ok(ExtAffineElement {
            datum_id: self.fingerprint,
            torsion: self.canon_torsion(t),
            translation: vec![0; self.rank()],
            finite: self.root_system.identity_weyl(),
        })
    }

    pub fn from_finite(&self, w: FiniteWeylElement) -> ExtAffineElement {
        ExtAffineElement {
            datum_id: self.fingerprint,
            torsion: vec![0; self.torsion_orders.len()],
            translation: vec![0; self.rank()],
            finite: w,
        }
    }

    pub fn from_parts(
        &self,
        torsion: &[i64],
        lambda: &[i64],
        w: FiniteWeylElement,
    ) -> Result<ExtAffineElement, GroupError> {
        if lambda.len() != self.rank() {
            return Err(GroupError::RankMismatch { expected: self.rank(), got: lambda.len() });
        }
        if torsion.len() != self.torsion_orders.len() {
            return Err(GroupError::RankMismatch {
                expected: self.torsion_orders.len(),
                got: torsion.len(),
            });
        }
        Ok(ExtAffineElement {
            datum_id: self.fingerprint,
            torsion: self.canon_torsion(torsion),
            translation: lambda.to_vec(),
            finite: w,
        })
    }

    fn canon_torsion(&self, t: &[i64]) -> Vec<i64> {
        t.iter()
            .zip(&self.torsion_orders)
            .map(|(&x, &d)| x.rem_euclid(d))
            .collect()
    }

    // ---- torsion action ----

    /// Matrix of the torsion action of a finite Weyl element, memoized.
    /// Only called when the action is nontrivial.
    fn torsion_matrix_of(&self, w: &FiniteWeylElement) -> IntMat {
        let k = self.torsion_orders.len();
        if w.is_identity() {
            return IntMat::identity(k);
        }
        if let Some(m) = self.torsion_memo.lock().unwrap().get(w.root_matrix()) {
            return m.clone();
        }
        // Peel a left descent: w = s_i w' with ℓ(w') < ℓ(w).
        let gens = self.torsion_action.as_ref().expect("nontrivial action");
        let winv = w.inverse();
        let i = (1..=self.rank())
            .find(|&i| {
                !winv
                    .apply_to_root(&self.root_system.simple_root(i))
                    .is_positive()
            })
            .expect("non-identity element has a left descent");
        let rest = self.root_system.simple_reflection(i).compose(&self.root_system, w);
        let mat = gens[i - 1].mul(&self.torsion_matrix_of(&rest));
        let mat = self.reduce_torsion_matrix(mat);
        self.torsion_memo
            .lock()
            .unwrap()
            .insert(w.root_matrix().clone(), mat.clone());
        mat
    }

    fn reduce_torsion_matrix(&self, mut m: IntMat) -> IntMat {
        for p in 0..m.rows() {
            for q in 0..m.cols() {
                m.set(p, q, m.get(p, q).rem_euclid(self.torsion_orders[p]));
            }
        }
        m
    }

    fn act_on_torsion(&self, w: &FiniteWeylElement, t: &[i64]) -> Vec<i64> {
        if self.torsion_action.is_none() || t.iter().all(|&x| x == 0) {
            return t.to_vec();
        }
        let mat = self.torsion_matrix_of(w);
        self.canon_torsion(&mat.matvec(t))
    }

    // ---- lattice action ----

    /// Action of a finite Weyl element on lattice coordinates.
    pub fn lattice_action(&self, w: &FiniteWeylElement, lambda: &[i64]) -> Vec<i64> {
        let in_coweight = self.m.matvec(lambda);
        let moved = w.apply_to_coweight_int(&in_coweight);
        rat_vec_to_int(&self.m_inv.matvec_int(&moved))
            .expect("lattice is Weyl-stable")
    }

    /// `λ` in fundamental-coweight coordinates.
    pub fn lattice_to_coweight(&self, lambda: &[i64]) -> Vec<i64> {
        self.m.matvec(lambda)
    }

    // ---- group operations ----

    pub fn multiply(
        &self,
        x: &ExtAffineElement,
        y: &ExtAffineElement,
    ) -> Result<ExtAffineElement, GroupError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul_unchecked(x, y))
    }

    fn mul_unchecked(&self, x: &ExtAffineElement, y: &ExtAffineElement) -> ExtAffineElement {
        let moved_torsion = self.act_on_torsion(&x.finite, &y.torsion);
        let torsion = self.canon_torsion(
            &x.torsion
                .iter()
                .zip(&moved_torsion)
                .map(|(a, b)| a + b)
                .collect::<Vec<_>>(),
        );
        let moved = self.lattice_action(&x.finite, &y.translation);
        let translation = x
            .translation
            .iter()
            .zip(&moved)
            .map(|(a, b)| a + b)
            .collect();
        ExtAffineElement {
            datum_id: self.fingerprint,
            torsion,
            translation,
            finite: x.finite.compose(&self.root_system, &y.finite),
        }
    }

    pub fn invert(&self, x: &ExtAffineElement) -> Result<ExtAffineElement, GroupError> {
        self.check(x)?;
        Ok(self.inv_unchecked(x))
    }

    fn inv_unchecked(&self, x: &ExtAffineElement) -> ExtAffineElement {
        let winv = x.finite.inverse();
        let neg_t: Vec<i64> = x.torsion.iter().map(|&t| -t).collect();
        let torsion = self.canon_torsion(&self.act_on_torsion(&winv, &neg_t));
        let neg_l: Vec<i64> = x.translation.iter().map(|&c| -c).collect();
        let translation = self.lattice_action(&winv, &neg_l);
        ExtAffineElement { datum_id: self.fingerprint, torsion, translation, finite: winv }
    }

    /// Left action on a point of `V'`: `p -> λ + w(p)` (torsion acts
    /// trivially).
    pub fn act_on_point(
        &self,
        x: &ExtAffineElement,
        p: &CoweightVector,
    ) -> Result<CoweightVector, GroupError> {
        self.check(x)?;
        if p.rank() != self.rank() {
            return Err(GroupError::RankMismatch { expected: self.rank(), got: p.rank() });
        }
        let mu = self.lattice_to_coweight(&x.translation);
        let moved = x.finite.apply_to_coweight(p);
        Ok(CoweightVector::from_int(&mu).add(&moved))
    }

    /// Action on affine roots, satisfying `(x·a)(p) = a(x⁻¹·p)`:
    /// `t_λ w · (β, k) = (wβ, k - <λ, wβ>)`.
    pub fn act_on_affine_root(&self, x: &ExtAffineElement, a: &AffineRoot) -> AffineRoot {
        debug_assert_eq!(a.gradient.rank(), self.rank());
        let gradient = x.finite.apply_to_root(&a.gradient);
        let mu = self.lattice_to_coweight(&x.translation);
        let level = a.level - pairing_int(&gradient, &mu);
        AffineRoot { gradient, level }
    }

    /// Length via the closed form over positive roots.
    pub fn length(&self, x: &ExtAffineElement) -> u64 {
        let mu = self.lattice_to_coweight(&x.translation);
        let winv = x.finite.inverse();
        let mut len: u64 = 0;
        for alpha in self.root_system.positive_roots() {
            let n = pairing_int(alpha, &mu);
            let back = winv.apply_to_root(alpha);
            let term = if back.is_positive() { n.abs() } else { (n - 1).abs() };
            len += term as u64;
        }
        len
    }

    /// True when left multiplication by `s_i` shortens `x`, i.e.
    /// `x⁻¹ · a_i` is a negative affine root.
    pub fn left_descends(&self, i: usize, x: &ExtAffineElement) -> bool {
        let xinv = self.inv_unchecked(x);
        !self
            .act_on_affine_root(&xinv, &self.affine_simple.roots[i])
            .is_positive()
    }

    fn left_descends_inv(&self, i: usize, xinv: &ExtAffineElement) -> bool {
        !self
            .act_on_affine_root(xinv, &self.affine_simple.roots[i])
            .is_positive()
    }

    /// True when right multiplication by `s_i` shortens `x`, i.e.
    /// `x · a_i` is a negative affine root.
    pub fn right_descends(&self, x: &ExtAffineElement, i: usize) -> bool {
        !self
            .act_on_affine_root(x, &self.affine_simple.roots[i])
            .is_positive()
    }

    /// Canonical reduced word: repeatedly strips the smallest-index left
    /// descent. Returns the word over `0..=rank` and the length-zero
    /// remainder in `Ω`, so that `x = s_{i_1} ··· s_{i_ℓ} · ω`.
    pub fn reduced_word(&self, x: &ExtAffineElement) -> (Vec<usize>, ExtAffineElement) {
        let mut word = Vec::new();
        let mut cur = x.clone();
        loop {
            let curinv = self.inv_unchecked(&cur);
            let descent =
                (0..self.affine_rank()).find(|&i| self.left_descends_inv(i, &curinv));
            match descent {
                Some(i) => {
                    word.push(i);
                    cur = self.mul_unchecked(&self.affine_simple.reflections[i], &cur);
                }
                None => break,
            }
        }
        debug_assert_eq!(word.len() as u64, self.length(x), "word length mismatch");
        debug_assert_eq!(self.length(&cur), 0, "remainder must have length zero");
        (word, cur)
    }

    /// Evaluates a word over the affine simple reflections, optionally
    /// followed by a length-zero remainder.
    pub fn from_word(
        &self,
        word: &[usize],
        omega: Option<&ExtAffineElement>,
    ) -> Result<ExtAffineElement, GroupError> {
        let mut acc = match omega {
            Some(o) => {
                self.check(o)?;
                if self.length(o) != 0 {
                    return Err(GroupError::OmegaNotLengthZero);
                }
                o.clone()
            }
            None => self.identity(),
        };
        for &i in word.iter().rev() {
            if i >= self.affine_rank() {
                return Err(GroupError::WordIndexOutOfRange { index: i, max: self.rank() });
            }
            acc = self.mul_unchecked(&self.affine_simple.reflections[i], &acc);
        }
        Ok(acc)
    }

    // ---- component group and Ω ----

    /// The Kottwitz class of an element: `(λ mod Q∨, torsion part)`. The
    /// finite part does not contribute.
    pub fn kottwitz_class(&self, x: &ExtAffineElement) -> KottwitzClass {
        let u_lambda = self.kottwitz_u.matvec(&x.translation);
        let free = self
            .free_positions
            .iter()
            .map(|&i| u_lambda[i].rem_euclid(self.kottwitz_d[i]))
            .collect();
        KottwitzClass { free, torsion: x.torsion.clone() }
    }

    /// True when the element lies in the affine Weyl group `W_a`, the
    /// kernel of the Kottwitz map.
    pub fn in_affine_weyl(&self, x: &ExtAffineElement) -> bool {
        self.kottwitz_class(x).is_trivial()
    }

    /// The length-zero subgroup `Ω`, one element per component-group class,
    /// sorted with the identity first. Computed on first use by scanning
    /// `W_0` for the unique length-zero representative of each class.
    pub fn omega_group(&self) -> &[ExtAffineElement] {
        self.omega_cache.get_or_init(|| self.compute_omega())
    }

    fn compute_omega(&self) -> Vec<ExtAffineElement> {
        let r = self.rank();
        let mut free_reps: HashMap<Vec<i64>, ExtAffineElement> = HashMap::new();
        let finite = enumerate_finite_weyl(&self.root_system)
            .expect("rank was validated at construction");
        for w in finite {
            // A length-zero t_λ w forces <Mλ, α_j> to be the indicator of
            // {j : w⁻¹ α_j < 0}, so each w admits at most one candidate λ.
            let winv = w.inverse();
            let mu: Vec<i64> = (1..=r)
                .map(|j| {
                    let back = winv.apply_to_root(&self.root_system.simple_root(j));
                    i64::from(!back.is_positive())
                })
                .collect();
            let Some(lambda) = rat_vec_to_int(&self.m_inv.matvec_int(&mu)) else {
                continue;
            };
            let cand = ExtAffineElement {
                datum_id: self.fingerprint,
                torsion: vec![0; self.torsion_orders.len()],
                translation: lambda,
                finite: w,
            };
            if self.length(&cand) != 0 {
                continue;
            }
            let class = self.kottwitz_class(&cand).free;
            let prev = free_reps.insert(class, cand);
            assert!(
                prev.is_none(),
                "two length-zero elements share a component class"
            );
        }
        let n_free: i64 = self
            .free_positions
            .iter()
            .map(|&i| self.kottwitz_d[i])
            .product();
        assert_eq!(
            free_reps.len() as i64,
            n_free,
            "Ω must map onto the free component group"
        );

        // The base alcove barycenter must be fixed by every ω.
        let bary = self.base_alcove_barycenter();

        let mut torsion_vectors = vec![vec![0i64; self.torsion_orders.len()]];
        for (idx, &d) in self.torsion_orders.iter().enumerate() {
            let mut next = Vec::new();
            for v in &torsion_vectors {
                for t in 0..d {
                    let mut w = v.clone();
                    w[idx] = t;
                    next.push(w);
                }
            }
            torsion_vectors = next;
        }

        let mut out = Vec::new();
        let mut free_classes: Vec<Vec<i64>> = free_reps.keys().cloned().collect();
        free_classes.sort();
        for class in &free_classes {
            let rep = &free_reps[class];
            let moved = self
                .act_on_point(rep, &bary)
                .expect("barycenter has the right rank");
            assert_eq!(moved, bary, "length-zero element must fix the base alcove");
            for t in &torsion_vectors {
                let mut elt = rep.clone();
                elt.torsion = t.clone();
                out.push(elt);
            }
        }
        out.sort_by_key(|x| {
            let k = self.kottwitz_class(x);
            (k.free, k.torsion)
        });
        out
    }

    /// Barycenter of the base alcove, the average of `0` and the vertices
    /// `ω∨_i / m_i` over the marks `m` of the highest root.
    pub fn base_alcove_barycenter(&self) -> CoweightVector {
        let r = self.rank();
        let marks = self.root_system.marks();
        let mut coords = vec![Rat::from_integer(0); r];
        for i in 0..r {
            coords[i] = Rat::new(1, marks[i]);
        }
        CoweightVector(coords).scaled(Rat::new(1, (r + 1) as i64))
    }

    /// The `Ω`-representative of an element's Kottwitz class.
    pub fn omega_of(&self, x: &ExtAffineElement) -> &ExtAffineElement {
        let class = self.kottwitz_class(x);
        self.omega_group()
            .iter()
            .find(|o| self.kottwitz_class(o) == class)
            .expect("Ω covers every component class")
    }

    /// Index of an element's class in the canonical `Ω` ordering.
    pub fn omega_index(&self, x: &ExtAffineElement) -> usize {
        let class = self.kottwitz_class(x);
        self.omega_group()
            .iter()
            .position(|o| self.kottwitz_class(o) == class)
            .expect("Ω covers every component class")
    }

    // ---- projections and sections ----

    /// The finite part, i.e. the image in `W_0` under `t_λ w -> w`.
    pub fn project_to_finite(&self, x: &ExtAffineElement) -> FiniteWeylElement {
        x.finite.clone()
    }

    /// The subgroup of elements fixing the origin (a special vertex):
    /// `{(0, 0, w) : w ∈ W_0}`.
    pub fn special_vertex_subgroup(&self) -> Result<Vec<ExtAffineElement>, GroupError> {
        Ok(enumerate_finite_weyl(&self.root_system)?
            .into_iter()
            .map(|w| self.from_finite(w))
            .collect())
    }

    // ---- torsion quotient ----

    /// The datum with the torsion part removed.
    pub fn quotient_datum(&self) -> GroupDatum {
        let basis: Vec<Vec<i64>> = (0..self.rank()).map(|j| self.m.col(j)).collect();
        GroupDatum::new(
            self.cartan_type(),
            LatticeSpec::Custom { basis, torsion: Vec::new(), torsion_action: None },
        )
        .expect("torsion-free part of a valid datum is valid")
    }

    /// Projection onto the torsion-free quotient; the result belongs to
    /// `quotient_datum()`.
    pub fn quotient_mod_torsion(&self, x: &ExtAffineElement) -> Result<ExtAffineElement, GroupError> {
        self.check(x)?;
        let qfp = datum_fingerprint(self.cartan_type(), &self.m, &[], None);
        Ok(ExtAffineElement {
            datum_id: qfp,
            torsion: Vec::new(),
            translation: x.translation.clone(),
            finite: x.finite.clone(),
        })
    }

    // ---- ball enumeration ----

    /// All elements of length `<= max_len`, grouped into shells by length.
    /// Breadth-first over left multiplication by the affine simple
    /// reflections, seeded with `Ω`; order within a shell is discovery
    /// order, which is deterministic. The `parallel` flag fans the shell
    /// expansion out over threads without changing the output.
    pub fn ball(
        &self,
        max_len: u64,
        cap: usize,
        parallel: bool,
    ) -> Result<Vec<Vec<ExtAffineElement>>, GroupError> {
        let mut shells: Vec<Vec<ExtAffineElement>> = Vec::new();
        let mut seen: HashSet<ExtAffineElement> = HashSet::new();
        let mut count = 0usize;
        let omega: Vec<ExtAffineElement> = self.omega_group().to_vec();
        for o in &omega {
            seen.insert(o.clone());
        }
        count += omega.len();
        if count > cap {
            return Err(GroupError::CapExceeded { cap });
        }
        shells.push(omega);
        for len in 1..=max_len {
            let prev = shells.last().unwrap();
            let candidates: Vec<ExtAffineElement> = if parallel {
                prev.par_iter()
                    .flat_map_iter(|x| {
                        (0..self.affine_rank())
                            .map(|i| self.mul_unchecked(&self.affine_simple.reflections[i], x))
                            .collect::<Vec<_>>()
                    })
                    .collect()
            } else {
                prev.iter()
                    .flat_map(|x| {
                        (0..self.affine_rank())
                            .map(|i| self.mul_unchecked(&self.affine_simple.reflections[i], x))
                            .collect::<Vec<_>>()
                    })
                    .collect()
            };
            let mut shell = Vec::new();
            for cand in candidates {
                if seen.contains(&cand) {
                    continue;
                }
                debug_assert_eq!(self.length(&cand), len);
                seen.insert(cand.clone());
                shell.push(cand);
                count += 1;
                if count > cap {
                    return Err(GroupError::CapExceeded { cap });
                }
            }
            if shell.is_empty() {
                break;
            }
            shells.push(shell);
        }
        Ok(shells)
    }
}

/// Deterministic fingerprint of the defining data, stamped into every
/// element so cross-datum mixing is caught at the API boundary.
fn datum_fingerprint(
    ct: CartanType,
    m: &IntMat,
    torsion_orders: &[i64],
    torsion_action: Option<&[IntMat]>,
) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    ct.to_string().hash(&mut h);
    m.hash(&mut h);
    torsion_orders.hash(&mut h);
    if let Some(mats) = torsion_action {
        for mat in mats {
            mat.hash(&mut h);
        }
    }
    h.finish()
}

/// Checks that per-generator torsion matrices define an action of `W_0` on
/// `⊕ Z/d_i`: well-defined, involutive, and satisfying the braid relations.
fn validate_torsion_action(
    rs: &RootSystem,
    orders: &[i64],
    mats: &[Vec<Vec<i64>>],
) -> Result<Vec<IntMat>, DatumError> {
    let r = rs.rank();
    let k = orders.len();
    if mats.len() != r {
        return Err(DatumError::ActionNotCompatible(format!(
            "expected {r} generator matrices, got {}",
            mats.len()
        )));
    }
    let mut out = Vec::with_capacity(r);
    for (i, rows) in mats.iter().enumerate() {
        if rows.len() != k || rows.iter().any(|row| row.len() != k) {
            return Err(DatumError::ActionNotCompatible(format!(
                "generator {} must be a {k}x{k} matrix",
                i + 1
            )));
        }
        let mat = IntMat::from_rows(rows);
        // Well-defined on ⊕ Z/d: d_q N[p][q] ≡ 0 mod d_p.
        for p in 0..k {
            for q in 0..k {
                if (orders[q] * mat.get(p, q)).rem_euclid(orders[p]) != 0 {
                    return Err(DatumError::ActionNotCompatible(format!(
                        "generator {} is not well-defined modulo the torsion orders",
                        i + 1
                    )));
                }
            }
        }
        out.push(mat);
    }
    let congruent = |a: &IntMat, b: &IntMat| -> bool {
        (0..k).all(|p| (0..k).all(|q| (a.get(p, q) - b.get(p, q)).rem_euclid(orders[p]) == 0))
    };
    let id = IntMat::identity(k);
    for (i, mat) in out.iter().enumerate() {
        if !congruent(&mat.mul(mat), &id) {
            return Err(DatumError::ActionNotCompatible(format!(
                "generator {} is not an involution modulo the torsion orders",
                i + 1
            )));
        }
    }
    // Braid relations (N_i N_j)^m ≡ 1 with m the Coxeter order of s_i s_j.
    for i in 0..r {
        for j in i + 1..r {
            let prod = rs.cartan_matrix().get(i, j) * rs.cartan_matrix().get(j, i);
            let m = match prod {
                0 => 2,
                1 => 3,
                2 => 4,
                3 => 6,
                _ => unreachable!("invalid Cartan entry product"),
            };
            let step = out[i].mul(&out[j]);
            let mut acc = IntMat::identity(k);
            for _ in 0..m {
                acc = acc.mul(&step);
            }
            if !congruent(&acc, &id) {
                return Err(DatumError::ActionNotCompatible(format!(
                    "generators {} and {} break the braid relation of order {m}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn datum(name: &str, lattice: LatticeSpec) -> GroupDatum {
        GroupDatum::new(CartanType::parse(name).unwrap(), lattice).unwrap()
    }

    fn coroot(name: &str) -> GroupDatum {
        datum(name, LatticeSpec::Coroot)
    }

    fn coweight(name: &str) -> GroupDatum {
        datum(name, LatticeSpec::Coweight)
    }

    /// A1 coweight with a Z/2 torsion factor and trivial action.
    fn a1_torsion() -> GroupDatum {
        datum(
            "A1",
            LatticeSpec::Custom {
                basis: vec![vec![1]],
                torsion: vec![2],
                torsion_action: None,
            },
        )
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
    fn presets_validate() {
        for name in ["A1", "A2", "A3", "B2", "C2", "G2"] {
            coroot(name);
            coweight(name);
        }
        a1_torsion();
    }

    #[test]
    fn bad_data_are_rejected() {
        // Basis does not contain the coroot lattice.
        let err = GroupDatum::new(
            CartanType::parse("A1").unwrap(),
            LatticeSpec::Custom { basis: vec![vec![3]], torsion: vec![], torsion_action: None },
        );
        assert!(matches!(err, Err(DatumError::LatticeTooSmall)));
        // Singular basis.
        let err = GroupDatum::new(
            CartanType::parse("A2").unwrap(),
            LatticeSpec::Custom {
                basis: vec![vec![1, 0], vec![2, 0]],
                torsion: vec![],
                torsion_action: None,
            },
        );
        assert!(matches!(err, Err(DatumError::LatticeTooSmall)));
        // Wrong basis arity.
        let err = GroupDatum::new(
            CartanType::parse("A2").unwrap(),
            LatticeSpec::Custom { basis: vec![vec![1, 0]], torsion: vec![], torsion_action: None },
        );
        assert!(matches!(err, Err(DatumError::MalformedLattice(_))));
        // Torsion factors below 2.
        let err = GroupDatum::new(
            CartanType::parse("A1").unwrap(),
            LatticeSpec::Custom { basis: vec![vec![1]], torsion: vec![1], torsion_action: None },
        );
        assert!(matches!(err, Err(DatumError::MalformedLattice(_))));
    }

    #[test]
    fn torsion_actions_validate() {
        // -1 on Z/3 is a valid involution for A1.
        let d = GroupDatum::new(
            CartanType::parse("A1").unwrap(),
            LatticeSpec::Custom {
                basis: vec![vec![1]],
                torsion: vec![3],
                torsion_action: Some(vec![vec![vec![-1]]]),
            },
        )
        .unwrap();
        assert!(d.has_nontrivial_torsion_action());
        // The zero map is not an involution.
        let err = GroupDatum::new(
            CartanType::parse("A1").unwrap(),
            LatticeSpec::Custom {
                basis: vec![vec![1]],
                torsion: vec![3],
                torsion_action: Some(vec![vec![vec![0]]]),
            },
        );
        assert!(matches!(err, Err(DatumError::ActionNotCompatible(_))));
        // Doubling is well-defined on Z/3 (2 = -1) but on Z/4 it is not
        // invertible, hence not an involution.
        let err = GroupDatum::new(
            CartanType::parse("A1").unwrap(),
            LatticeSpec::Custom {
                basis: vec![vec![1]],
                torsion: vec![4],
                torsion_action: Some(vec![vec![vec![2]]]),
            },
        );
        assert!(matches!(err, Err(DatumError::ActionNotCompatible(_))));
    }

    #[test]
    fn json_datum_roundtrip_and_strictness() {
        let d = GroupDatum::from_json(r#"{"cartan_type": "C2", "lattice": "coroot"}"#).unwrap();
        assert_eq!(d.cartan_type().to_string(), "C2");
        let d = GroupDatum::from_json(
            r#"{"cartan_type": "A1", "lattice": {"basis": [[1]], "torsion": [2]}}"#,
        )
        .unwrap();
        assert_eq!(d.torsion_orders(), &[2]);
        let d = GroupDatum::from_json(
            r#"{"cartan_type": "A1", "lattice": {"basis": [[1]], "torsion": [3],
                "torsion_action": [[[-1]]]}}"#,
        )
        .unwrap();
        assert!(d.has_nontrivial_torsion_action());
        // Unknown keys and bad presets are rejected.
        assert!(GroupDatum::from_json(
            r#"{"cartan_type": "A1", "lattice": "coroot", "extra": 1}"#
        )
        .is_err());
        assert!(GroupDatum::from_json(
            r#"{"cartan_type": "A1", "lattice": {"basis": [[1]], "oops": true}}"#
        )
        .is_err());
        assert!(GroupDatum::from_json(r#"{"cartan_type": "A1", "lattice": "weight"}"#).is_err());
        assert!(GroupDatum::from_json("not json").is_err());
    }

    #[test]
    fn affine_simple_reflections_have_length_one() {
        for d in [coroot("A1"), coroot("A2"), coweight("C2"), coroot("G2"), a1_torsion()] {
            for (i, s) in d.affine_simple_system().reflections.iter().enumerate() {
                assert_eq!(d.length(s), 1, "ℓ(s_{i}) in {}", d.cartan_type());
                let sq = d.multiply(s, s).unwrap();
                assert!(sq.is_identity(), "s_{i}^2 in {}", d.cartan_type());
            }
        }
    }

    #[test]
    fn a1_s0_s1_is_coroot_translation() {
        let d = coroot("A1");
        let s0 = d.affine_simple_reflection(0).unwrap().clone();
        let s1 = d.affine_simple_reflection(1).unwrap().clone();
        let prod = d.multiply(&s0, &s1).unwrap();
        // t_{α∨} has lattice coordinate 1 in the coroot basis.
        assert_eq!(prod, d.translation(&[1]).unwrap());
        assert_eq!(d.length(&prod), 2);
    }

    #[test]
    fn a1_s0_moves_origin_to_coroot() {
        let d = coroot("A1");
        let s0 = d.affine_simple_reflection(0).unwrap();
        let origin = CoweightVector::zero(1);
        let image = d.act_on_point(s0, &origin).unwrap();
        // α∨ has fundamental-coweight coordinate 2.
        assert_eq!(image, CoweightVector::from_int(&[2]));
    }

    #[test]
    fn affine_root_action_examples() {
        let d = coroot("A1");
        let theta = d.root_system().theta().clone();
        // Translation by α∨ drops the level of (α, 0) by <α∨, α> = 2.
        let t = d.translation(&[1]).unwrap();
        let a = AffineRoot { gradient: theta.clone(), level: 0 };
        let moved = d.act_on_affine_root(&t, &a);
        assert_eq!(moved, AffineRoot { gradient: theta.clone(), level: -2 });
        // s_0 sends (θ, 0) to (-θ, 2): the level follows from evaluating
        // the defining identity (x·a)(p) = a(x⁻¹·p) at sample points.
        let s0 = d.affine_simple_reflection(0).unwrap();
        let moved = d.act_on_affine_root(s0, &a);
        assert_eq!(moved, AffineRoot { gradient: theta.negated(), level: 2 });
    }

    #[test]
    fn affine_root_action_matches_point_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in [coroot("A2"), coweight("C2"), coroot("G2")] {
            for _ in 0..50 {
                let x = random_element(&d, &mut rng, 3);
                let xinv = d.invert(&x).unwrap();
                let beta = &d.root_system().positive_roots()
                    [rng.gen_range(0..d.root_system().positive_roots().len())];
                let a = AffineRoot {
                    gradient: if rng.gen_bool(0.5) { beta.clone() } else { beta.negated() },
                    level: rng.gen_range(-3..=3),
                };
                let moved = d.act_on_affine_root(&x, &a);
                for _ in 0..10 {
                    let p = CoweightVector(
                        (0..d.rank())
                            .map(|_| Rat::new(rng.gen_range(-40i64..40), rng.gen_range(1i64..5)))
                            .collect(),
                    );
                    let lhs = moved.eval(&p).unwrap();
                    let rhs = a.eval(&d.act_on_point(&xinv, &p).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "affine action identity in {}", d.cartan_type());
                }
            }
        }
    }

    #[test]
    fn group_axioms_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for d in [coroot("A2"), coweight("C2"), a1_torsion(), coroot("G2")] {
            let e = d.identity();
            for _ in 0..200 {
                let x = random_element(&d, &mut rng, 4);
                let y = random_element(&d, &mut rng, 4);
                let z = random_element(&d, &mut rng, 4);
                let xy_z = d.multiply(&d.multiply(&x, &y).unwrap(), &z).unwrap();
                let x_yz = d.multiply(&x, &d.multiply(&y, &z).unwrap()).unwrap();
                assert_eq!(xy_z, x_yz, "associativity in {}", d.cartan_type());
                let xinv = d.invert(&x).unwrap();
                assert_eq!(d.multiply(&x, &xinv).unwrap(), e);
                assert_eq!(d.multiply(&xinv, &x).unwrap(), e);
                assert_eq!(d.multiply(&x, &e).unwrap(), x);
                assert_eq!(d.multiply(&e, &x).unwrap(), x);
            }
        }
    }

    #[test]
    fn nontrivial_torsion_action_twists_products() {
        let d = GroupDatum::new(
            CartanType::parse("A1").unwrap(),
            LatticeSpec::Custom {
                basis: vec![vec![1]],
                torsion: vec![3],
                torsion_action: Some(vec![vec![vec![-1]]]),
            },
        )
        .unwrap();
        let s1 = d.affine_simple_reflection(1).unwrap().clone();
        let t = d.torsion_element(&[1]).unwrap();
        // s_1 · t · s_1 = t^{-1} under the sign action.
        let conj = d
            .multiply(&d.multiply(&s1, &t).unwrap(), &s1)
            .unwrap();
        assert_eq!(conj, d.torsion_element(&[2]).unwrap());
        // Group axioms still hold.
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let e = d.identity();
        for _ in 0..200 {
            let x = random_element(&d, &mut rng, 4);
            let y = random_element(&d, &mut rng, 4);
            let z = random_element(&d, &mut rng, 4);
            let xy_z = d.multiply(&d.multiply(&x, &y).unwrap(), &z).unwrap();
            let x_yz = d.multiply(&x, &d.multiply(&y, &z).unwrap()).unwrap();
            assert_eq!(xy_z, x_yz);
            let xinv = d.invert(&x).unwrap();
            assert_eq!(d.multiply(&x, &xinv).unwrap(), e);
        }
    }

    #[test]
    fn datum_mismatch_is_detected() {
        let d1 = coroot("A2");
        let d2 = coweight("A2");
        let x = d1.identity();
        assert!(matches!(
            d2.multiply(&x, &d2.identity()),
            Err(GroupError::DatumMismatch)
        ));
        assert!(d2.act_on_point(&x, &CoweightVector::zero(2)).is_err());
    }

    #[test]
    fn length_examples() {
        let d = coroot("A1");
        assert_eq!(d.length(&d.identity()), 0);
        assert_eq!(d.length(&d.translation(&[1]).unwrap()), 2);
        let dw = coweight("A1");
        assert_eq!(dw.length(&dw.translation(&[1]).unwrap()), 1);
        // A2 coweight: ℓ(t_{ω∨_1}) = 2.
        let a2 = coweight("A2");
        assert_eq!(a2.length(&a2.translation(&[1, 0]).unwrap()), 2);
    }

    #[test]
    fn reduced_word_examples() {
        let d = coroot("A1");
        let t = d.translation(&[1]).unwrap();
        let (word, omega) = d.reduced_word(&t);
        assert_eq!(word, vec![0, 1]);
        assert!(omega.is_identity());
        // Round trip.
        assert_eq!(d.from_word(&word, Some(&omega)).unwrap(), t);
        assert_eq!(d.from_word(&[], None).unwrap(), d.identity());
        // Identity has the empty word.
        let (word, omega) = d.reduced_word(&d.identity());
        assert!(word.is_empty() && omega.is_identity());
    }

    #[test]
    fn reduced_words_roundtrip_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for d in [coroot("A2"), coweight("C2"), a1_torsion(), coweight("G2")] {
            for _ in 0..100 {
                let x = random_element(&d, &mut rng, 4);
                let (word, omega) = d.reduced_word(&x);
                assert_eq!(word.len() as u64, d.length(&x));
                assert_eq!(d.length(&omega), 0);
                assert_eq!(d.from_word(&word, Some(&omega)).unwrap(), x);
            }
        }
    }

    #[test]
    fn from_word_validates_input() {
        let d = coroot("A2");
        assert!(matches!(
            d.from_word(&[7], None),
            Err(GroupError::WordIndexOutOfRange { .. })
        ));
        let not_omega = d.translation(&[1, 0]).unwrap();
        assert!(matches!(
            d.from_word(&[0], Some(&not_omega)),
            Err(GroupError::OmegaNotLengthZero)
        ));
    }

    #[test]
    fn kottwitz_examples() {
        let a2 = coweight("A2");
        assert_eq!(a2.component_invariant_factors(), vec![3]);
        // A coroot translation is in the kernel.
        let theta_co = a2.translation(&[1, 1]).unwrap();
        assert!(a2.in_affine_weyl(&theta_co));
        // t_{ω∨_1} generates the component group Z/3.
        let t1 = a2.translation(&[1, 0]).unwrap();
        let k1 = a2.kottwitz_class(&t1);
        assert!(!k1.is_trivial());
        let t2 = a2.multiply(&t1, &t1).unwrap();
        assert!(!a2.kottwitz_class(&t2).is_trivial());
        assert_ne!(a2.kottwitz_class(&t2), k1);
        let t3 = a2.multiply(&t2, &t1).unwrap();
        assert!(a2.kottwitz_class(&t3).is_trivial());
        // The Kottwitz map ignores the finite part.
        let s1 = a2.affine_simple_reflection(1).unwrap();
        assert!(a2.kottwitz_class(s1).is_trivial());
    }

    #[test]
    fn kottwitz_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for d in [coweight("A2"), coweight("C2"), a1_torsion(), coroot("A3")] {
            let factors = d.component_invariant_factors();
            for _ in 0..300 {
                let x = random_element(&d, &mut rng, 4);
                let y = random_element(&d, &mut rng, 4);
                let kx = d.kottwitz_class(&x);
                let ky = d.kottwitz_class(&y);
                let kxy = d.kottwitz_class(&d.multiply(&x, &y).unwrap());
                let sum_free: Vec<i64> = kx
                    .free
                    .iter()
                    .zip(&ky.free)
                    .zip(&factors)
                    .map(|((a, b), m)| (a + b).rem_euclid(*m))
                    .collect();
                let sum_tor: Vec<i64> = kx
                    .torsion
                    .iter()
                    .zip(&ky.torsion)
                    .zip(d.torsion_orders())
                    .map(|((a, b), m)| (a + b).rem_euclid(*m))
                    .collect();
                assert_eq!(kxy.free, sum_free, "free part additive in {}", d.cartan_type());
                assert_eq!(kxy.torsion, sum_tor, "torsion part additive");
            }
        }
    }

    #[test]
    fn omega_sizes() {
        assert_eq!(coroot("A1").omega_group().len(), 1);
        assert_eq!(coweight("A1").omega_group().len(), 2);
        assert_eq!(coweight("A2").omega_group().len(), 3);
        assert_eq!(coweight("C2").omega_group().len(), 2);
        assert_eq!(coroot("G2").omega_group().len(), 1);
        assert_eq!(coweight("G2").omega_group().len(), 1);
        assert_eq!(a1_torsion().omega_group().len(), 4);
    }

    #[test]
    fn omega_is_a_subgroup_of_length_zero_elements() {
        for d in [coweight("A2"), coweight("C2"), a1_torsion(), coweight("A3")] {
            let omega = d.omega_group().to_vec();
            assert!(omega[0].is_identity(), "identity sorts first");
            let set: HashSet<&ExtAffineElement> = omega.iter().collect();
            for a in &omega {
                assert_eq!(d.length(a), 0);
                for b in &omega {
                    let ab = d.multiply(a, b).unwrap();
                    assert!(set.contains(&ab), "Ω not closed in {}", d.cartan_type());
                }
                let ainv = d.invert(a).unwrap();
                assert!(set.contains(&ainv));
            }
            // Classes are pairwise distinct and cover the component group.
            let classes: HashSet<KottwitzClass> =
                omega.iter().map(|o| d.kottwitz_class(o)).collect();
            assert_eq!(classes.len() as i64, d.component_group_order());
        }
    }

    #[test]
    fn omega_representative_of_a2_coweight_class() {
        let a2 = coweight("A2");
        let t1 = a2.translation(&[1, 0]).unwrap();
        let omega = a2.omega_of(&t1);
        assert_eq!(a2.length(omega), 0);
        assert_eq!(a2.kottwitz_class(omega), a2.kottwitz_class(&t1));
        // ω = t_{ω∨_1} w with w of length 2 in W_0.
        assert_eq!(omega.translation_part(), &[1, 0]);
        assert_eq!(omega.finite_part().length(), 2);
    }

    #[test]
    fn exact_sequence_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for d in [coroot("A2"), coweight("C2"), a1_torsion()] {
            for _ in 0..100 {
                let x = random_element(&d, &mut rng, 4);
                let y = random_element(&d, &mut rng, 4);
                let lhs = d.project_to_finite(&d.multiply(&x, &y).unwrap());
                let rhs = d
                    .project_to_finite(&x)
                    .compose(d.root_system(), &d.project_to_finite(&y));
                assert_eq!(lhs, rhs, "projection is a homomorphism");
            }
            // Kernel elements are exactly the (torsion, translation) pairs.
            let ball = d.ball(4, 100_000, false).unwrap();
            for x in ball.iter().flatten() {
                assert_eq!(
                    d.project_to_finite(x).is_identity(),
                    x.is_translation(),
                    "kernel of the projection"
                );
            }
        }
    }

    #[test]
    fn special_vertex_subgroup_bijects_with_finite_weyl() {
        let d = coweight("C2");
        let sub = d.special_vertex_subgroup().unwrap();
        assert_eq!(sub.len(), 8);
        let set: HashSet<&ExtAffineElement> = sub.iter().collect();
        assert_eq!(set.len(), 8);
        for x in &sub {
            assert!(x.translation_part().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn quotient_mod_torsion_kernel() {
        let d = a1_torsion();
        let q = d.quotient_datum();
        assert_eq!(q.torsion_orders().len(), 0);
        let ball = d.ball(6, 100_000, false).unwrap();
        let mut kernel = Vec::new();
        for x in ball.iter().flatten() {
            let qx = d.quotient_mod_torsion(x).unwrap();
            // The image is a valid element of the quotient datum.
            assert_eq!(q.length(&qx), d.length(x));
            if qx.is_identity() {
                kernel.push(x.clone());
            }
        }
        assert_eq!(kernel.len(), 2, "kernel is the torsion part");
        for x in &kernel {
            assert_eq!(d.length(x), 0, "kernel lies in Ω");
        }
    }

    #[test]
    fn ball_shell_sizes_a1() {
        let d = coroot("A1");
        let shells = d.ball(3, 100_000, false).unwrap();
        let sizes: Vec<usize> = shells.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 2, 2, 2]);
        let dw = coweight("A1");
        let shells = dw.ball(3, 100_000, false).unwrap();
        let sizes: Vec<usize> = shells.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![2, 4, 4, 4]);
    }

    #[test]
    fn ball_respects_cap_and_parallel_mode_agrees() {
        let d = coweight("A2");
        assert!(matches!(
            d.ball(30, 10, false),
            Err(GroupError::CapExceeded { cap: 10 })
        ));
        let serial = d.ball(5, 100_000, false).unwrap();
        let parallel = d.ball(5, 100_000, true).unwrap();
        assert_eq!(serial, parallel, "parallel expansion must not reorder");
    }

    #[test]
    fn ball_lengths_are_exact() {
        for d in [coroot("A2"), coweight("C2"), a1_torsion()] {
            let shells = d.ball(5, 100_000, false).unwrap();
            for (len, shell) in shells.iter().enumerate() {
                for x in shell {
                    assert_eq!(d.length(x), len as u64);
                }
            }
        }
    }

    #[test]
    fn descent_flags_match_length_changes() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for d in [coroot("A2"), coweight("C2"), coroot("G2"), a1_torsion()] {
            for _ in 0..100 {
                let x = random_element(&d, &mut rng, 3);
                let lx = d.length(&x);
                for i in 0..d.affine_rank() {
                    let s = d.affine_simple_reflection(i).unwrap().clone();
                    let sx = d.multiply(&s, &x).unwrap();
                    assert_eq!(
                        d.left_descends(i, &x),
                        d.length(&sx) < lx,
                        "left descent at {i} in {}",
                        d.cartan_type()
                    );
                    let xs = d.multiply(&x, &s).unwrap();
                    assert_eq!(
                        d.right_descends(&x, i),
                        d.length(&xs) < lx,
                        "right descent at {i}"
                    );
                }
            }
        }
    }
}
