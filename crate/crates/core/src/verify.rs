//! The property suite behind `verify` and the acceptance test target.
//!
//! Each check runs one structural property over fixed preset
//! data plus seeded random samples, and reports how many cases it checked
//! and the first few failures instead of panicking. The report text is
//! deterministic for a fixed seed; wall-clock time is carried separately so
//! callers can keep it out of comparable output.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cosets;
use crate::iwahori_weyl::{ExtAffineElement, GroupDatum, LatticeSpec};
use crate::oracle;
use crate::rootsys::CartanType;

const BALL_CAP: usize = 1_000_000;

/// Outcome of one property run.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub name: String,
    pub passed: bool,
    /// Number of individual cases checked.
    pub checked: u64,
    /// Deterministic summary; includes the first few failures if any.
    pub detail: String,
    /// Wall time; excluded from the deterministic portion.
    pub millis: u128,
}

impl PropertyReport {
    pub fn status_line(&self) -> String {
        format!(
            "{}: {} ({} cases checked{})",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.checked,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!("; {}", self.detail)
            }
        )
    }
}

/// Failure accumulator shared by all criteria.
struct Check {
    checked: u64,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Check {
        Check { checked: 0, failures: Vec::new() }
    }

    fn pass(&mut self) {
        self.checked += 1;
    }

    fn verify(&mut self, cond: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !cond && self.failures.len() < 4 {
            self.failures.push(msg());
        } else if !cond && self.failures.len() == 4 {
            self.failures.push("...".into());
        }
    }

    fn note_context(&mut self, msg: String) {
        if self.failures.len() < 4 {
            self.failures.push(msg);
        }
    }

    fn into_report(self, name: &str, start: Instant) -> PropertyReport {
        PropertyReport {
            name: name.to_string(),
            passed: self.failures.is_empty(),
            checked: self.checked,
            detail: self.failures.join(" | "),
            millis: start.elapsed().as_millis(),
        }
    }
}

fn preset(name: &str, lattice: LatticeSpec) -> GroupDatum {
    GroupDatum::new(CartanType::parse(name).expect("preset type"), lattice)
        .expect("preset datum validates")
}

fn both_presets(name: &str) -> Vec<(String, GroupDatum)> {
    vec![
        (format!("{name}/coroot"), preset(name, LatticeSpec::Coroot)),
        (format!("{name}/coweight"), preset(name, LatticeSpec::Coweight)),
    ]
}

fn torsion_a1() -> GroupDatum {
    GroupDatum::new(
        CartanType::parse("A1").unwrap(),
        LatticeSpec::Custom { basis: vec![vec![1]], torsion: vec![2], torsion_action: None },
    )
    .unwrap()
}

fn flat_ball(datum: &GroupDatum, max_len: u64) -> Vec<ExtAffineElement> {
    datum
        .ball(max_len, BALL_CAP, false)
        .expect("ball within cap")
        .into_iter()
        .flatten()
        .collect()
}

fn random_element(d: &GroupDatum, rng: &mut ChaCha8Rng, spread: i64) -> ExtAffineElement {
    let lambda: Vec<i64> = (0..d.rank()).map(|_| rng.gen_range(-spread..=spread)).collect();
    let torsion: Vec<i64> =
        d.torsion_orders().iter().map(|&o| rng.gen_range(0..o)).collect();
    let mut w = d.root_system().identity_weyl();
    for _ in 0..rng.gen_range(0..=8) {
        let i = rng.gen_range(1..=d.rank());
        w = w.compose(d.root_system(), &d.root_system().simple_reflection(i));
    }
    d.from_parts(&torsion, &lambda, w).unwrap()
}

/// Every ball element splits uniquely as a translation part
/// times an element of the origin-fixing copy of the finite Weyl group,
/// and that copy bijects with `W_0`.
pub fn check_semidirect_splitting() -> PropertyReport {
    let start = Instant::now();
    let mut c = Check::new();
    for name in ["A1", "A2", "C2", "A3"] {
        for (label, d) in both_presets(name) {
            let svs = d.special_vertex_subgroup().expect("rank in bounds");
            let order = crate::rootsys::enumerate_finite_weyl(d.root_system())
                .expect("rank in bounds")
                .len();
            let distinct: HashSet<&ExtAffineElement> = svs.iter().collect();
            c.verify(svs.len() == order && distinct.len() == order, || {
                format!("{label}: special-vertex subgroup has {} of {order} elements", svs.len())
            });
            for x in flat_ball(&d, 6) {
                let t = d
                    .from_parts(x.torsion_part(), x.translation_part(), d.root_system().identity_weyl())
                    .unwrap();
                let k = d.from_finite(d.project_to_finite(&x));
                let recomposed = d.multiply(&t, &k).unwrap();
                c.verify(recomposed == x, || format!("{label}: translation*vertex recomposition"));
                // Uniqueness: the factors are forced by the projections.
                let forced_k = d.from_finite(d.project_to_finite(&recomposed));
                let forced_t = d.multiply(&recomposed, &d.invert(&forced_k).unwrap()).unwrap();
                c.verify(forced_t == t && forced_k == k, || {
                    format!("{label}: factorization is not unique")
                });
            }
        }
    }
    c.into_report("semidirect splitting", start)
}

/// The length-zero subgroup has the predicted order, and every
/// ball element factors uniquely as a word in the affine reflections times
/// a length-zero element.
pub fn check_component_group_and_omega() -> PropertyReport {
    let start = Instant::now();
    let mut c = Check::new();
    let expectations: [(&str, LatticeSpec, usize); 5] = [
        ("A1", LatticeSpec::Coweight, 2),
        ("A2", LatticeSpec::Coweight, 3),
        ("C2", LatticeSpec::Coweight, 2),
        ("G2", LatticeSpec::Coweight, 1),
        ("G2", LatticeSpec::Coroot, 1),
    ];
    for (name, lattice, expected) in expectations {
        let d = preset(name, lattice);
        c.verify(d.omega_group().len() == expected, || {
            format!("{name}: |Ω| = {}, expected {expected}", d.omega_group().len())
        });
    }
    for (label, d) in [
        ("A2/coweight".to_string(), preset("A2", LatticeSpec::Coweight)),
        ("C2/coweight".to_string(), preset("C2", LatticeSpec::Coweight)),
        ("A1/torsion".to_string(), torsion_a1()),
    ] {
        let omega_set: HashSet<ExtAffineElement> = d.omega_group().iter().cloned().collect();
        for x in flat_ball(&d, 6) {
            let (word, omega) = d.reduced_word(&x);
            let word_part = d.from_word(&word, None).unwrap();
            c.verify(
                omega_set.contains(&omega)
                    && d.kottwitz_class(&word_part).is_trivial()
                    && d.multiply(&word_part, &omega).unwrap() == x,
                || format!("{label}: word*omega factorization failed"),
            );
            // Uniqueness: the length-zero factor is pinned by the class.
            c.verify(&omega == d.omega_of(&x), || {
                format!("{label}: omega factor is not the class representative")
            });
        }
    }
    c.into_report("component group and omega factorization", start)
}

/// On the ball, the kernel of the projection to the finite
/// Weyl group is exactly the set of translation-torsion elements.
pub fn check_projection_kernel() -> PropertyReport {
    let start = Instant::now();
    let mut c = Check::new();
    let mut data: Vec<(String, GroupDatum)> = Vec::new();
    for name in ["A1", "A2", "C2"] {
        data.extend(both_presets(name));
    }
    data.push(("A1/torsion".to_string(), torsion_a1()));
    for (label, d) in data {
        for x in flat_ball(&d, 6) {
            c.verify(
                d.project_to_finite(&x).is_identity() == x.is_translation(),
                || format!("{label}: projection kernel mismatch"),
            );
        }
    }
    c.into_report("finite projection kernel", start)
}

/// The closed-form length, the hyperplane count, and the
/// reduced-word length agree, on exhaustive balls and on seeded random
/// elements (at least a thousand per datum).
pub fn check_length_oracle_agreement(seed: u64) -> PropertyReport {
    let start = Instant::now();
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut low_rank: Vec<(String, GroupDatum)> = Vec::new();
    for name in ["A1", "A2", "C2"] {
        low_rank.extend(both_presets(name));
    }
    low_rank.push(("G2/coroot".to_string(), preset("G2", LatticeSpec::Coroot)));
    low_rank.push(("A1/torsion".to_string(), torsion_a1()));
    let mut rank_three: Vec<(String, GroupDatum)> = both_presets("A3");
    rank_three.push(("B3/coroot".to_string(), preset("B3", LatticeSpec::Coroot)));

    let mut run = |label: &str, d: &GroupDatum, max_len: u64, rng: &mut ChaCha8Rng| {
        let compare = |x: &ExtAffineElement, c: &mut Check| {
            let closed = d.length(x);
            let walls = oracle::length_by_hyperplanes(d, x);
            let word = d.reduced_word(x).0.len() as u64;
            c.verify(closed == walls && closed == word, || {
                format!("{label}: lengths {closed}/{walls}/{word} disagree")
            });
        };
        for x in flat_ball(d, max_len) {
            compare(&x, &mut c);
        }
        for _ in 0..1000 {
            let x = random_element(d, rng, 4);
            compare(&x, &mut c);
        }
    };
    for (label, d) in &low_rank {
        run(label, d, 8, &mut rng);
    }
    for (label, d) in &rank_three {
        run(label, d, 6, &mut rng);
    }
    c.into_report("length oracle agreement", start)
}

/// Over all proper parabolic pairs of A2 and C2, every ball
/// element has a unique orbit-scan minimum which the canonical
/// factorization finds, and the factorization re-multiplies to the input.
pub fn check_double_coset_canonical_form() -> PropertyReport {
    let start = Instant::now();
    let mut c = Check::new();
    for name in ["A2", "C2"] {
        for (label, d) in both_presets(name) {
            // All proper subsets of the affine node set.
            let nodes: Vec<usize> = (0..d.affine_rank()).collect();
            let mut proper: Vec<Vec<usize>> = Vec::new();
            for mask in 0u32..(1 << nodes.len()) as u32 {
                let subset: Vec<usize> = nodes
                    .iter()
                    .filter(|&&i| mask & (1 << i) != 0)
                    .copied()
                    .collect();
                if subset.len() < nodes.len() {
                    proper.push(subset);
                }
            }
            let subgroups: Vec<cosets::ParabolicSubgroup> = proper
                .iter()
                .map(|j| cosets::parabolic_subgroup(&d, j, BALL_CAP).expect("proper is finite"))
                .collect();
            let ball = flat_ball(&d, 6);
            for (ji, j) in proper.iter().enumerate() {
                for (ki, k) in proper.iter().enumerate() {
                    for x in &ball {
                        let rep = match cosets::min_double_rep(&d, x, j, k) {
                            Ok(rep) => rep,
                            Err(e) => {
                                c.verify(false, || format!("{label}: rep failed: {e}"));
                                continue;
                            }
                        };
                        // Full orbit scan.
                        let mut min_len = u64::MAX;
                        let mut minima: HashSet<ExtAffineElement> = HashSet::new();
                        for u in subgroups[ji].elements() {
                            let ux = d.multiply(u, x).unwrap();
                            for v in subgroups[ki].elements() {
                                let uxv = d.multiply(&ux, v).unwrap();
                                let l = d.length(&uxv);
                                match l.cmp(&min_len) {
                                    std::cmp::Ordering::Less => {
                                        min_len = l;
                                        minima.clear();
                                        minima.insert(uxv);
                                    }
                                    std::cmp::Ordering::Equal => {
                                        minima.insert(uxv);
                                    }
                                    std::cmp::Ordering::Greater => {}
                                }
                            }
                        }
                        c.verify(
                            minima.len() == 1 && minima.contains(&rep.x0),
                            || {
                                format!(
                                    "{label}: J={j:?} J'={k:?}: {} minima, canonical match {}",
                                    minima.len(),
                                    minima.contains(&rep.x0)
                                )
                            },
                        );
                        let recomposed = d
                            .multiply(&d.multiply(&rep.w, &rep.x0).unwrap(), &rep.w_prime)
                            .unwrap();
                        c.verify(recomposed == *x, || {
                            format!("{label}: J={j:?} J'={k:?}: factorization mismatch")
                        });
                    }
                }
            }
        }
    }
    c.into_report("double coset canonical form", start)
}

/// The canonical enumeration and the union-find oracle agree
/// on the number of double cosets meeting the ball, for three parabolic
/// pairs per type.
pub fn check_double_coset_count_parity() -> PropertyReport {
    let start = Instant::now();
    let mut c = Check::new();
    let cases: Vec<(String, GroupDatum, Vec<(Vec<usize>, Vec<usize>)>)> = vec![
        (
            "A2/coroot".into(),
            preset("A2", LatticeSpec::Coroot),
            vec![
                (vec![1, 2], vec![1, 2]),
                (vec![0, 1], vec![2]),
                (vec![0], vec![1]),
            ],
        ),
        (
            "C2/coroot".into(),
            preset("C2", LatticeSpec::Coroot),
            vec![
                (vec![1, 2], vec![1, 2]),
                (vec![0, 1], vec![1, 2]),
                (vec![2], vec![0]),
            ],
        ),
        (
            "A3/coroot".into(),
            preset("A3", LatticeSpec::Coroot),
            vec![
                (vec![1, 2, 3], vec![1, 2, 3]),
                (vec![0, 1], vec![2, 3]),
                (vec![1], vec![3]),
            ],
        ),
        (
            "A2/coweight".into(),
            preset("A2", LatticeSpec::Coweight),
            vec![
                (vec![1, 2], vec![1, 2]),
                (vec![0, 2], vec![0, 1]),
                (vec![], vec![1]),
            ],
        ),
    ];
    for (label, d, pairs) in &cases {
        let ball = flat_ball(d, 6);
        for (j, k) in pairs {
            let classes = match cosets::enumerate_double_cosets(d, j, k, 6, BALL_CAP, false) {
                Ok(cl) => cl,
                Err(e) => {
                    c.verify(false, || format!("{label}: enumeration failed: {e}"));
                    continue;
                }
            };
            let part = oracle::double_coset_partition(d, &ball, j, k);
            c.verify(classes.len() == part.class_count, || {
                format!(
                    "{label}: J={j:?} J'={k:?}: {} classes vs oracle {}",
                    classes.len(),
                    part.class_count
                )
            });
            let mut engine_sizes: Vec<usize> =
                classes.iter().map(|cl| cl.size_in_ball).collect();
            let mut oracle_sizes = vec![0usize; part.class_count];
            for &l in &part.labels {
                oracle_sizes[l] += 1;
            }
            engine_sizes.sort_unstable();
            oracle_sizes.sort_unstable();
            c.verify(engine_sizes == oracle_sizes, || {
                format!("{label}: J={j:?} J'={k:?}: size profiles differ")
            });
        }
    }
    c.into_report("double coset count parity", start)
}

/// For the order-two flip of A3, every stable double coset has
/// a fixed canonical representative, stable and fixed counts agree, and
/// distinct stable cosets keep distinct representatives.
pub fn check_flip_descent() -> PropertyReport {
    let start = Instant::now();
    let mut c = Check::new();
    for (label, d) in both_presets("A3") {
        let sigma = match cosets::diagram_automorphism(&d, &[0, 3, 2, 1]) {
            Ok(s) => s,
            Err(e) => {
                c.verify(false, || format!("{label}: flip rejected: {e}"));
                continue;
            }
        };
        let pairs: [(Vec<usize>, Vec<usize>); 4] = [
            (vec![1, 2, 3], vec![1, 2, 3]),
            (vec![1, 3], vec![2]),
            (vec![0, 2], vec![1, 3]),
            (vec![], vec![]),
        ];
        for (j, k) in &pairs {
            let report = match cosets::descent_check(&d, &sigma, j, k, 6, BALL_CAP, false) {
                Ok(r) => r,
                Err(e) => {
                    c.verify(false, || format!("{label}: descent check failed: {e}"));
                    continue;
                }
            };
            c.verify(report.counterexamples.is_empty(), || {
                format!(
                    "{label}: J={j:?} J'={k:?}: {} counterexamples",
                    report.counterexamples.len()
                )
            });
            c.verify(report.stable_classes == report.fixed_reps, || {
                format!(
                    "{label}: J={j:?} J'={k:?}: {} stable vs {} fixed",
                    report.stable_classes, report.fixed_reps
                )
            });
            c.verify(report.total_classes > 0, || format!("{label}: empty enumeration"));
            // Distinct stable cosets have distinct fixed representatives.
            let classes = cosets::enumerate_double_cosets(&d, j, k, 6, BALL_CAP, false).unwrap();
            let mut fixed_reps: HashSet<ExtAffineElement> = HashSet::new();
            let mut fixed_count = 0usize;
            for class in &classes {
                if sigma.apply(&d, &class.x0).unwrap() == class.x0 {
                    fixed_count += 1;
                    fixed_reps.insert(class.x0.clone());
                }
            }
            c.verify(fixed_reps.len() == fixed_count, || {
                format!("{label}: fixed representatives collide")
            });
        }
    }
    c.into_report("flip descent", start)
}

/// Adjoining a two-element torsion part to the A1 coweight
/// datum, the torsion quotient map is a homomorphism whose kernel has
/// exactly two elements, both of length zero.
pub fn check_torsion_quotient() -> PropertyReport {
    let start = Instant::now();
    let mut c = Check::new();
    let d = torsion_a1();
    let q = d.quotient_datum();
    let ball = flat_ball(&d, 6);
    let mut kernel = 0usize;
    for x in &ball {
        let qx = d.quotient_mod_torsion(x).unwrap();
        c.verify(q.length(&qx) == d.length(x), || "quotient changes length".to_string());
        if qx.is_identity() {
            kernel += 1;
            c.verify(d.length(x) == 0, || "kernel element has positive length".to_string());
        }
    }
    c.verify(kernel == 2, || format!("kernel size {kernel}, expected 2"));
    for x in &ball {
        for y in ball.iter().take(40) {
            let lhs = d.quotient_mod_torsion(&d.multiply(x, y).unwrap()).unwrap();
            let rhs = q
                .multiply(
                    &d.quotient_mod_torsion(x).unwrap(),
                    &d.quotient_mod_torsion(y).unwrap(),
                )
                .unwrap();
            c.verify(lhs == rhs, || "quotient is not a homomorphism".to_string());
        }
    }
    c.into_report("torsion quotient", start)
}

/// The affine-map realization separates torsion-free ball
/// elements and turns products into compositions on ten thousand random
/// pairs.
pub fn check_affine_map_oracle(seed: u64) -> PropertyReport {
    let start = Instant::now();
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let data: Vec<(String, GroupDatum)> = vec![
        ("A2/coroot".into(), preset("A2", LatticeSpec::Coroot)),
        ("C2/coweight".into(), preset("C2", LatticeSpec::Coweight)),
        ("A3/coroot".into(), preset("A3", LatticeSpec::Coroot)),
        ("A1/coweight".into(), preset("A1", LatticeSpec::Coweight)),
    ];
    for (label, d) in &data {
        let mut seen: HashMap<oracle::AffineMap, ExtAffineElement> = HashMap::new();
        for x in flat_ball(d, 6) {
            let m = oracle::to_affine_map(d, &x);
            if let Some(prev) = seen.get(&m) {
                let prev = prev.clone();
                c.verify(false, || {
                    format!("{label}: affine map collision between {prev:?} and {x:?}")
                });
            } else {
                seen.insert(m, x);
                c.pass();
            }
        }
        for _ in 0..2500 {
            let x = random_element(d, &mut rng, 4);
            let y = random_element(d, &mut rng, 4);
            let lhs = oracle::to_affine_map(d, &d.multiply(&x, &y).unwrap());
            let rhs = oracle::compose_affine_maps(
                d,
                &oracle::to_affine_map(d, &x),
                &oracle::to_affine_map(d, &y),
            );
            c.verify(lhs == rhs, || format!("{label}: map composition mismatch"));
        }
    }
    c.into_report("affine map oracle", start)
}

/// Runs the full fixed-data property suite, one report per check.
pub fn run_all(seed: u64) -> Vec<PropertyReport> {
    vec![
        check_semidirect_splitting(),
        check_component_group_and_omega(),
        check_projection_kernel(),
        check_length_oracle_agreement(seed),
        check_double_coset_canonical_form(),
        check_double_coset_count_parity(),
        check_flip_descent(),
        check_torsion_quotient(),
        check_affine_map_oracle(seed),
    ]
}

/// Datum-generic property suite for user-supplied data: runs the checks
/// that make sense for any single validated datum at the given radius.
pub fn verify_datum(datum: &GroupDatum, max_len: u64, seed: u64) -> Vec<PropertyReport> {
    let mut reports = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    {
        let start = Instant::now();
        let mut c = Check::new();
        let e = datum.identity();
        for _ in 0..300 {
            let x = random_element(datum, &mut rng, 4);
            let y = random_element(datum, &mut rng, 4);
            let z = random_element(datum, &mut rng, 4);
            let xy_z = datum.multiply(&datum.multiply(&x, &y).unwrap(), &z).unwrap();
            let x_yz = datum.multiply(&x, &datum.multiply(&y, &z).unwrap()).unwrap();
            c.verify(xy_z == x_yz, || "associativity failed".to_string());
            let xinv = datum.invert(&x).unwrap();
            c.verify(
                datum.multiply(&x, &xinv).unwrap() == e
                    && datum.multiply(&xinv, &x).unwrap() == e,
                || "inverse failed".to_string(),
            );
        }
        reports.push(c.into_report("group axioms", start));
    }

    {
        let start = Instant::now();
        let mut c = Check::new();
        match datum.ball(max_len, BALL_CAP, false) {
            Ok(shells) => {
                let engine: Vec<Vec<ExtAffineElement>> = shells;
                match oracle::bfs_enumerate(datum, max_len, BALL_CAP) {
                    Ok(reference) => {
                        c.verify(engine.len() == reference.len(), || {
                            "shell counts differ".to_string()
                        });
                        for (e, o) in engine.iter().zip(&reference) {
                            let es: HashSet<_> = e.iter().collect();
                            let os: HashSet<_> = o.iter().collect();
                            c.verify(es == os, || "shell contents differ".to_string());
                        }
                        for x in engine.iter().flatten() {
                            c.verify(
                                datum.length(x) == oracle::length_by_hyperplanes(datum, x),
                                || "length mismatch".to_string(),
                            );
                            let (word, omega) = datum.reduced_word(x);
                            c.verify(
                                word.len() as u64 == datum.length(x)
                                    && datum.from_word(&word, Some(&omega)).unwrap() == *x,
                                || "reduced word failed to round-trip".to_string(),
                            );
                        }
                    }
                    Err(e) => c.note_context(format!("oracle enumeration failed: {e}")),
                }
            }
            Err(e) => c.note_context(format!("ball enumeration failed: {e}")),
        }
        reports.push(c.into_report("ball and length against the oracle", start));
    }

    {
        let start = Instant::now();
        let mut c = Check::new();
        let factors = datum.component_invariant_factors();
        let omega = datum.omega_group();
        let expected: i64 = datum.component_group_order();
        c.verify(omega.len() as i64 == expected, || {
            format!("|Ω| = {}, component group order {expected}", omega.len())
        });
        for _ in 0..300 {
            let x = random_element(datum, &mut rng, 4);
            let y = random_element(datum, &mut rng, 4);
            let kx = datum.kottwitz_class(&x);
            let ky = datum.kottwitz_class(&y);
            let kxy = datum.kottwitz_class(&datum.multiply(&x, &y).unwrap());
            let free_ok = kxy
                .free
                .iter()
                .zip(kx.free.iter().zip(&ky.free))
                .zip(&factors)
                .all(|((s, (a, b)), m)| *s == (a + b).rem_euclid(*m));
            let torsion_ok = datum.has_nontrivial_torsion_action()
                || kxy
                    .torsion
                    .iter()
                    .zip(kx.torsion.iter().zip(&ky.torsion))
                    .zip(datum.torsion_orders())
                    .all(|((s, (a, b)), m)| *s == (a + b).rem_euclid(*m));
            c.verify(free_ok && torsion_ok, || "component map is not additive".to_string());
        }
        reports.push(c.into_report("component group", start));
    }

    {
        let start = Instant::now();
        let mut c = Check::new();
        // One default parabolic pair: all finite nodes on both sides.
        let j: Vec<usize> = (1..datum.affine_rank()).collect();
        match cosets::enumerate_double_cosets(datum, &j, &j, max_len, BALL_CAP, false) {
            Ok(classes) => {
                let ball = flat_ball(datum, max_len);
                let part = oracle::double_coset_partition(datum, &ball, &j, &j);
                c.verify(classes.len() == part.class_count, || {
                    format!("{} classes vs oracle {}", classes.len(), part.class_count)
                });
            }
            Err(e) => c.note_context(format!("coset enumeration failed: {e}")),
        }
        reports.push(c.into_report("double cosets against union-find", start));
    }

    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datum_suite_passes_on_a_small_example() {
        let d = preset("A2", LatticeSpec::Coroot);
        let reports = verify_datum(&d, 3, 7);
        for r in &reports {
            assert!(r.passed, "{}", r.status_line());
        }
    }

    #[test]
    fn status_lines_are_stable() {
        let r = PropertyReport {
            name: "sample".into(),
            passed: true,
            checked: 12,
            detail: String::new(),
            millis: 99,
        };
        assert_eq!(r.status_line(), "sample: PASS (12 cases checked)");
        let r = PropertyReport {
            name: "sample".into(),
            passed: false,
            checked: 3,
            detail: "boom".into(),
            millis: 1,
        };
        assert_eq!(r.status_line(), "sample: FAIL (3 cases checked; boom)");
    }
}
