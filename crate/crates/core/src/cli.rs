//! Command-line front end.
//!
//! Machine-readable rows go to standard output, one JSON object or one TSV
//! row per line; diagnostics and timings go to standard error. Identical
//! invocations produce byte-identical standard output.
//!
//! The row builders ([`info_object`], [`enumerate_rows`], [`coset_rows`])
//! and the element parser ([`parse_element`]) are public so that other
//! front ends can expose the same data with the same field names.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad input,
//! 3 enumeration cap exceeded, 4 a requested parabolic subgroup is
//! infinite.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cosets::{self, CosetError};
use crate::iwahori_weyl::{
    DatumError, ExtAffineElement, GroupDatum, GroupError, LatticeSpec, DEFAULT_ELEMENT_CAP,
};
use crate::rootsys::CartanType;
use crate::verify;

const EXIT_OK: i32 = 0;
const EXIT_PROPERTY: i32 = 1;
const EXIT_INPUT: i32 = 2;
const EXIT_CAP: i32 = 3;
const EXIT_INFINITE: i32 = 4;

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_INPUT, message: message.into() }
}

impl From<DatumError> for CliError {
    fn from(e: DatumError) -> CliError {
        input_error(e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> CliError {
        let code = match e {
            GroupError::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<CosetError> for CliError {
    fn from(e: CosetError) -> CliError {
        let code = match &e {
            CosetError::NotFinite { .. } => EXIT_INFINITE,
            CosetError::Group(GroupError::CapExceeded { .. }) => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> CliError {
        // A closed pipe (`iwahori ... | head`) is a normal way to stop early.
        if e.kind() == io::ErrorKind::BrokenPipe {
            return CliError { code: EXIT_OK, message: String::new() };
        }
        CliError { code: EXIT_INPUT, message: format!("cannot write output: {e}") }
    }
}

#[derive(Parser)]
#[command(name = "iwahori", version, about = "Exact computations in extended affine Weyl groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the basic invariants of a group datum.
    Info {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List every element up to a length bound.
    Enumerate {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Print the canonical reduced word of one element.
    Word {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Element, e.g. "t=1,0 w=1,2 tor=0"; any part may be omitted.
        spec: Vec<String>,
    },
    /// Enumerate parabolic double cosets meeting a ball.
    Dcosets {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        parabolic: ParabolicArgs,
    },
    /// Compare stable double cosets with fixed representatives under a
    /// diagram automorphism.
    Descent {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        parabolic: ParabolicArgs,
        /// JSON file with the affine node permutation, e.g. [0,3,2,1].
        #[arg(long, value_name = "FILE")]
        sigma: PathBuf,
    },
    /// Run the property suite on the built-in data, or on one datum.
    Verify {
        #[command(flatten)]
        datum: DatumArgs,
        /// Length bound for the single-datum suite.
        #[arg(long, default_value_t = 4)]
        max_len: u64,
        /// Seed for the randomized properties.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct DatumArgs {
    /// Cartan type, e.g. A2, C3, g2.
    #[arg(long = "type", value_name = "TYPE")]
    cartan_type: Option<String>,
    /// Lattice preset (default coroot).
    #[arg(long, value_enum)]
    lattice: Option<LatticeArg>,
    /// JSON file describing the datum; excludes --type and --lattice.
    #[arg(long, value_name = "FILE", conflicts_with = "cartan_type")]
    datum: Option<PathBuf>,
}

impl DatumArgs {
    fn is_given(&self) -> bool {
        self.cartan_type.is_some() || self.datum.is_some()
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeArg {
    Coroot,
    Coweight,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// One JSON object per line.
    Json,
    /// Tab separated with a header row; list cells hold compact JSON.
    Tsv,
}

#[derive(Args)]
struct LimitArgs {
    /// Length bound for enumeration.
    #[arg(long, default_value_t = 4)]
    max_len: u64,
    /// Hard cap on enumerated elements.
    #[arg(long, default_value_t = DEFAULT_ELEMENT_CAP)]
    cap: usize,
    /// Enumerate shells in parallel; the output order does not change.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct ParabolicArgs {
    /// Left generator indices (affine nodes), comma separated; omit for
    /// the empty set.
    #[arg(long, value_delimiter = ',')]
    left: Vec<usize>,
    /// Right generator indices, same syntax as --left.
    #[arg(long, value_delimiter = ',')]
    right: Vec<usize>,
}

/// Parses the process arguments, runs one subcommand, and returns the exit
/// code. Used by the binary entry point.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    match dispatch(cli, &mut out, &mut err) {
        Ok(code) => code,
        Err(e) => {
            if !e.message.is_empty() {
                let _ = writeln!(err, "error: {}", e.message);
            }
            e.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Info { datum, output } => {
            let d = load_datum(&datum)?;
            emit_objects(out, output.format, &INFO_COLUMNS, &[info_object(&d)])?;
            Ok(EXIT_OK)
        }
        Command::Enumerate { datum, output, limits } => {
            let d = load_datum(&datum)?;
            let rows = enumerate_rows(&d, limits.max_len, limits.cap, limits.parallel)?;
            emit_objects(out, output.format, &ENUMERATE_COLUMNS, &rows)?;
            Ok(EXIT_OK)
        }
        Command::Word { datum, output, spec } => {
            let d = load_datum(&datum)?;
            let x = parse_element(&d, &spec.join(" ")).map_err(input_error)?;
            cmd_word(&d, &x, output.format, out)?;
            Ok(EXIT_OK)
        }
        Command::Dcosets { datum, output, limits, parabolic } => {
            let d = load_datum(&datum)?;
            let rows = coset_rows(
                &d,
                &parabolic.left,
                &parabolic.right,
                limits.max_len,
                limits.cap,
                limits.parallel,
            )?;
            emit_objects(out, output.format, &DCOSET_COLUMNS, &rows)?;
            Ok(EXIT_OK)
        }
        Command::Descent { datum, output, limits, parabolic, sigma } => {
            let d = load_datum(&datum)?;
            cmd_descent(&d, &sigma, &parabolic, &limits, output.format, out)
        }
        Command::Verify { datum, max_len, seed } => {
            let reports = if datum.is_given() {
                verify::verify_datum(&load_datum(&datum)?, max_len, seed)
            } else {
                verify::run_all(seed)
            };
            let mut failed = false;
            for r in &reports {
                writeln!(out, "{}", r.status_line())?;
                writeln!(err, "# {}: {} ms", r.name, r.millis)?;
                failed |= !r.passed;
            }
            Ok(if failed { EXIT_PROPERTY } else { EXIT_OK })
        }
    }
}

fn load_datum(args: &DatumArgs) -> Result<GroupDatum, CliError> {
    if let Some(path) = &args.datum {
        if args.lattice.is_some() {
            return Err(input_error("--lattice has no effect when --datum is given"));
        }
        let text = fs::read_to_string(path)
            .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
        return Ok(GroupDatum::from_json(&text)?);
    }
    let Some(type_name) = &args.cartan_type else {
        return Err(input_error("either --type or --datum is required"));
    };
    let ct = CartanType::parse(type_name).map_err(|e| input_error(e.to_string()))?;
    let lattice = match args.lattice.unwrap_or(LatticeArg::Coroot) {
        LatticeArg::Coroot => LatticeSpec::Coroot,
        LatticeArg::Coweight => LatticeSpec::Coweight,
    };
    Ok(GroupDatum::new(ct, lattice)?)
}

/// Parses the element syntax "t=1,0 w=1,2 tor=0": lattice coordinates of
/// the translation, a word in the finite simple reflections, and torsion
/// coordinates. Omitted parts default to zero translation, the identity,
/// and zero torsion; "tor=0" is accepted even when the datum has no
/// torsion component.
pub fn parse_element(datum: &GroupDatum, spec: &str) -> Result<ExtAffineElement, String> {
    let mut translation: Option<Vec<i64>> = None;
    let mut word: Option<Vec<usize>> = None;
    let mut torsion: Option<Vec<i64>> = None;
    for token in spec.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got \"{token}\""))?;
        let taken = match key {
            "t" => translation.replace(parse_list(value, key)?).is_some(),
            "w" => {
                let letters: Vec<i64> = parse_list(value, key)?;
                let mut w = Vec::with_capacity(letters.len());
                for l in letters {
                    if l < 1 || l as usize > datum.rank() {
                        return Err(format!(
                            "w letters are finite reflections 1..={}, got {l}",
                            datum.rank()
                        ));
                    }
                    w.push(l as usize);
                }
                word.replace(w).is_some()
            }
            "tor" => torsion.replace(parse_list(value, key)?).is_some(),
            _ => return Err(format!("unknown key \"{key}\" (expected t, w, or tor)")),
        };
        if taken {
            return Err(format!("key \"{key}\" given twice"));
        }
    }
    let translation = translation.unwrap_or_else(|| vec![0; datum.rank()]);
    if translation.len() != datum.rank() {
        return Err(format!(
            "t must list {} coordinates, got {}",
            datum.rank(),
            translation.len()
        ));
    }
    let torsion = match torsion {
        None => vec![0; datum.torsion_orders().len()],
        Some(t) if datum.torsion_orders().is_empty() && t == [0] => Vec::new(),
        Some(t) if t.len() == datum.torsion_orders().len() => t,
        Some(t) => {
            return Err(format!(
                "tor must list {} coordinates, got {}",
                datum.torsion_orders().len(),
                t.len()
            ))
        }
    };
    let rs = datum.root_system();
    let mut finite = rs.identity_weyl();
    for i in word.unwrap_or_default() {
        finite = finite.compose(rs, &rs.simple_reflection(i));
    }
    datum
        .from_parts(&torsion, &translation, finite)
        .map_err(|e| e.to_string())
}

fn parse_list(value: &str, key: &str) -> Result<Vec<i64>, String> {
    if value.is_empty() {
        return Err(format!("empty value for \"{key}\""));
    }
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| format!("\"{s}\" in \"{key}\" is not an integer"))
        })
        .collect()
}

// ---- row builders ----

pub const INFO_COLUMNS: [&str; 7] = [
    "type",
    "rank",
    "finite_weyl_order",
    "omega_order",
    "invariant_factors",
    "torsion_orders",
    "affine_generators",
];

/// The invariants reported by the info subcommand, as one JSON object.
pub fn info_object(datum: &GroupDatum) -> Value {
    let ct = datum.cartan_type();
    json!({
        "type": ct.to_string(),
        "rank": datum.rank(),
        "finite_weyl_order": ct.weyl_order().map_or(Value::Null, |n| {
            u64::try_from(n).map_or_else(|_| json!(n.to_string()), |m| json!(m))
        }),
        "omega_order": datum.component_group_order(),
        "invariant_factors": datum.component_invariant_factors(),
        "torsion_orders": datum.torsion_orders(),
        "affine_generators": datum.affine_rank(),
    })
}

pub const ENUMERATE_COLUMNS: [&str; 7] = [
    "length",
    "word",
    "omega",
    "kottwitz_free",
    "kottwitz_torsion",
    "translation",
    "finite_images",
];

/// One JSON object per element of the ball, sorted by length, then by
/// canonical word, then by component index.
pub fn enumerate_rows(
    datum: &GroupDatum,
    max_len: u64,
    cap: usize,
    parallel: bool,
) -> Result<Vec<Value>, GroupError> {
    let shells = datum.ball(max_len, cap, parallel)?;
    let mut keyed: Vec<(u64, Vec<usize>, usize, ExtAffineElement)> = Vec::new();
    for (len, shell) in shells.into_iter().enumerate() {
        for x in shell {
            let (word, _) = datum.reduced_word(&x);
            keyed.push((len as u64, word, datum.omega_index(&x), x));
        }
    }
    keyed.sort_by(|a, b| (a.0, &a.1, a.2).cmp(&(b.0, &b.1, b.2)));
    Ok(keyed
        .iter()
        .map(|(len, word, omega, x)| {
            let class = datum.kottwitz_class(x);
            let images: Vec<Vec<i64>> = (0..datum.rank())
                .map(|j| x.finite_part().root_matrix().col(j))
                .collect();
            json!({
                "length": len,
                "word": word,
                "omega": omega,
                "kottwitz_free": class.free,
                "kottwitz_torsion": class.torsion,
                "translation": x.translation_part(),
                "finite_images": images,
            })
        })
        .collect())
}

pub const DCOSET_COLUMNS: [&str; 5] =
    ["x0_word", "omega", "length", "coset_size_in_ball", "truncated"];

/// One JSON object per double coset meeting the ball, in enumeration
/// order (length, representative word, component index).
pub fn coset_rows(
    datum: &GroupDatum,
    left: &[usize],
    right: &[usize],
    max_len: u64,
    cap: usize,
    parallel: bool,
) -> Result<Vec<Value>, CosetError> {
    let classes = cosets::enumerate_double_cosets(datum, left, right, max_len, cap, parallel)?;
    Ok(classes
        .iter()
        .map(|c| {
            json!({
                "x0_word": c.x0_word,
                "omega": c.omega_index,
                "length": c.length,
                "coset_size_in_ball": c.size_in_ball,
                "truncated": c.truncated,
            })
        })
        .collect())
}

// ---- row emission ----

fn emit_objects(
    out: &mut impl Write,
    format: FormatArg,
    columns: &[&str],
    rows: &[Value],
) -> Result<(), CliError> {
    match format {
        FormatArg::Tsv => {
            writeln!(out, "{}", columns.join("\t"))?;
            for row in rows {
                let cells: Vec<String> = columns.iter().map(|c| tsv_cell(&row[*c])).collect();
                writeln!(out, "{}", cells.join("\t"))?;
            }
        }
        FormatArg::Json => {
            for row in rows {
                writeln!(out, "{row}")?;
            }
        }
    }
    Ok(())
}

fn tsv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

// ---- subcommands without a shared row builder ----

fn cmd_word(
    datum: &GroupDatum,
    x: &ExtAffineElement,
    format: FormatArg,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let (word, omega) = datum.reduced_word(x);
    debug_assert_eq!(&datum.from_word(&word, Some(&omega)).unwrap(), x);
    let class = datum.kottwitz_class(x);
    let columns = ["word", "omega", "length", "kottwitz_free", "kottwitz_torsion"];
    let row = json!({
        "word": word,
        "omega": datum.omega_index(&omega),
        "length": word.len(),
        "kottwitz_free": class.free,
        "kottwitz_torsion": class.torsion,
    });
    emit_objects(out, format, &columns, &[row])
}

fn cmd_descent(
    datum: &GroupDatum,
    sigma_path: &Path,
    parabolic: &ParabolicArgs,
    limits: &LimitArgs,
    format: FormatArg,
    out: &mut impl Write,
) -> Result<i32, CliError> {
    let text = fs::read_to_string(sigma_path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", sigma_path.display())))?;
    let perm = parse_sigma_json(&text)?;
    let sigma = cosets::diagram_automorphism(datum, &perm)?;
    let report = cosets::descent_check(
        datum,
        &sigma,
        &parabolic.left,
        &parabolic.right,
        limits.max_len,
        limits.cap,
        limits.parallel,
    )?;
    let columns = [
        "total_classes",
        "stable_classes",
        "fixed_reps",
        "counterexamples",
        "truncated_classes",
    ];
    let row = json!({
        "total_classes": report.total_classes,
        "stable_classes": report.stable_classes,
        "fixed_reps": report.fixed_reps,
        "counterexamples": report.counterexamples,
        "truncated_classes": report.truncated_classes,
    });
    emit_objects(out, format, &columns, &[row])?;
    Ok(if report.counterexamples.is_empty() { EXIT_OK } else { EXIT_PROPERTY })
}

/// Accepts either a bare array [0,3,2,1] or {"perm": [0,3,2,1]}.
fn parse_sigma_json(text: &str) -> Result<Vec<usize>, CliError> {
    #[derive(serde::Deserialize)]
    struct Wrapped {
        perm: Vec<usize>,
    }
    if let Ok(perm) = serde_json::from_str::<Vec<usize>>(text) {
        return Ok(perm);
    }
    serde_json::from_str::<Wrapped>(text)
        .map(|w| w.perm)
        .map_err(|e| input_error(format!("sigma file is not a node permutation: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(name: &str, lattice: LatticeSpec) -> GroupDatum {
        GroupDatum::new(CartanType::parse(name).unwrap(), lattice).unwrap()
    }

    #[test]
    fn element_spec_round_trips() {
        let d = datum("A2", LatticeSpec::Coroot);
        let x = parse_element(&d, "t=1,0 w=1,2 tor=0").unwrap();
        assert_eq!(x.translation_part(), &[1, 0]);
        assert_eq!(d.length(&d.from_parts(&[], &[0, 0], d.project_to_finite(&x)).unwrap()), 2);
        assert!(parse_element(&d, "").unwrap().is_identity());
        assert_eq!(parse_element(&d, "w=1,1").unwrap(), d.identity());
    }

    #[test]
    fn element_spec_rejects_junk() {
        let d = datum("A2", LatticeSpec::Coroot);
        for bad in [
            "t=1",
            "t=1,x",
            "w=0",
            "w=3",
            "tor=1",
            "q=1",
            "t=1,0 t=0,1",
            "t=",
            "w",
        ] {
            assert!(parse_element(&d, bad).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn tsv_and_json_rows_carry_the_same_data() {
        let d = datum("A1", LatticeSpec::Coroot);
        let rows = enumerate_rows(&d, 2, 10_000, false).unwrap();
        let mut tsv = Vec::new();
        let mut jsonl = Vec::new();
        emit_objects(&mut tsv, FormatArg::Tsv, &ENUMERATE_COLUMNS, &rows).unwrap();
        emit_objects(&mut jsonl, FormatArg::Json, &ENUMERATE_COLUMNS, &rows).unwrap();
        let tsv = String::from_utf8(tsv).unwrap();
        let jsonl = String::from_utf8(jsonl).unwrap();
        let mut lines = tsv.lines();
        let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
        let cells: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
        let objects: Vec<Value> =
            jsonl.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(cells.len(), 5);
        assert_eq!(objects.len(), 5);
        for (row, obj) in cells.iter().zip(&objects) {
            for (name, cell) in header.iter().zip(row) {
                let parsed: Value = serde_json::from_str(cell).unwrap();
                assert_eq!(&parsed, obj.get(*name).unwrap(), "column {name}");
            }
        }
    }

    #[test]
    fn info_reports_the_component_group() {
        let obj = info_object(&datum("A2", LatticeSpec::Coweight));
        assert_eq!(obj["omega_order"], json!(3));
        assert_eq!(obj["finite_weyl_order"], json!(6));
        assert_eq!(obj["invariant_factors"], json!([3]));
        assert_eq!(obj["affine_generators"], json!(3));
    }

    #[test]
    fn sigma_json_forms() {
        assert_eq!(parse_sigma_json("[0,3,2,1]").unwrap(), vec![0, 3, 2, 1]);
        assert_eq!(parse_sigma_json("{\"perm\":[0,2,1]}").unwrap(), vec![0, 2, 1]);
        assert!(parse_sigma_json("{\"nodes\":[0]}").is_err());
    }
}
