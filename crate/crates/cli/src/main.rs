//! `quartic`: singularities of quartic surfaces and elliptic fibrations in
//! characteristic 2.
//!
//! Exit codes:
//! - 0: success (for `family`, the verification passed)
//! - 1: usage error, unreadable or malformed input, unknown family, or a
//!   degenerate Weierstrass model
//! - 2: `analyze` on a non-normal surface; `fibration` on a quasi-elliptic model
//! - 3: certification failure (incomplete singular locus, infinite defect,
//!   roots beyond `--max-ext`, or a family that failed verification)

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use quartic_core::error::Error;
use quartic_core::families::{build_family, verify_family, FamilyKind, FamilyReport};
use quartic_core::fibrations::{
    euler_ledger, is_square_poly, max_disjoint_sum, quasi_elliptic_types, DisjointSum, EulerLedger,
    Place, WeierstrassModel,
};
use quartic_core::gauss_dual::{
    configuration_report_in, degree_ledger, dual_plane_kernel, ConfigurationReport, DegreeLedger,
};
use quartic_core::json::{parse_fe, poly_from_json, PolyJson};
use quartic_core::pic_lattice::{surface_lattice, SurfaceLattice};
use quartic_core::singularities::{
    find_singular_points, theorem_checks, AnalysisOptions, QuarticSurface, SingularLocusReport,
    SingularityKind, TheoremChecks,
};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_NON_NORMAL: u8 = 2;
const EXIT_QUASI_ELLIPTIC: u8 = 2;
const EXIT_CERTIFICATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "quartic",
    version,
    about = "Quartic surfaces and elliptic fibrations over GF(2^m)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Seed for every randomized choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest extension degree searched for points and roots.
    #[arg(long = "max-ext", default_value_t = 24)]
    max_ext: u32,
    /// Cap on local colength computations.
    #[arg(long, default_value_t = 40)]
    cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Singular points, degree ledger and configuration of a quartic given as JSON.
    Analyze {
        /// Surface JSON file
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Also report the lattice spanned by H and the exceptional curves.
        #[arg(long)]
        lattice: bool,
    },
    /// Build and verify a member of one of the families a3, special, insep, dualplane.
    Family {
        /// a3, special, insep or dualplane
        name: String,
        /// Field exponent: the surface is defined over GF(2^m).
        #[arg(long, default_value_t = 3)]
        m: u32,
        /// Coefficient λ of the dual-plane family, as hex.
        #[arg(long)]
        lambda: Option<String>,
        /// Also write the surface JSON to this file.
        #[arg(long = "surface-out")]
        surface_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Fibre census and Euler ledger of a Weierstrass model given as JSON.
    Fibration {
        /// Weierstrass model JSON file
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

struct Outcome {
    code: u8,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn fail(code: u8, msg: impl Into<String>) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("CHAR2_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match cli.command {
        Command::Analyze {
            input,
            common,
            lattice,
        } => cmd_analyze(&input, &common, lattice),
        Command::Family {
            name,
            m,
            lambda,
            surface_out,
            common,
        } => cmd_family(&name, m, lambda.as_deref(), surface_out.as_ref(), &common),
        Command::Fibration { input, common } => cmd_fibration(&input, &common),
    };
    print!("{}", out.stdout);
    if !out.stderr.is_empty() {
        eprintln!("{}", out.stderr.trim_end());
    }
    ExitCode::from(out.code)
}

fn options(c: &Common) -> AnalysisOptions {
    AnalysisOptions {
        max_ext: c.max_ext,
        cap: c.cap,
        seed: c.seed,
        ..AnalysisOptions::default()
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read(path: &PathBuf) -> Result<String, Outcome> {
    std::fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))
}

#[derive(Serialize)]
struct AnalyzeOutput {
    singular: SingularLocusReport,
    ledger: Option<DegreeLedger>,
    configuration: Option<ConfigurationReport>,
    kernel_dim: usize,
    checks: TheoremChecks,
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice: Option<SurfaceLattice>,
    diagnostics: Vec<String>,
}

fn cmd_analyze(input: &PathBuf, common: &Common, with_lattice: bool) -> Outcome {
    let text = match read(input) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let f = match poly_from_json(&text) {
        Ok(f) => f,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}")),
    };
    let x = match QuarticSurface::new(f) {
        Ok(x) => x,
        Err(Error::InvalidSurface(msg)) => {
            return Outcome::fail(EXIT_NON_NORMAL, format!("non-normal surface: {msg}"))
        }
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}")),
    };
    let singular = match find_singular_points(&x, &options(common)) {
        Ok(r) => r,
        Err(Error::NotZeroDimensional) => {
            return Outcome::fail(
                EXIT_NON_NORMAL,
                "non-normal surface: the singular locus is not finite",
            )
        }
        Err(e) => return Outcome::fail(EXIT_CERTIFICATION, format!("certification failed: {e}")),
    };
    let mut diagnostics = Vec::new();
    let ledger = match degree_ledger(&singular) {
        Ok(l) => Some(l),
        Err(e) => {
            diagnostics.push(e.to_string());
            None
        }
    };
    let tower = x.tower();
    let configuration = match configuration_report_in(&tower, &singular.conjugate_points(&tower)) {
        Ok(c) => Some(c),
        Err(e) => {
            diagnostics.push(format!("configuration: {e}"));
            None
        }
    };
    let lattice = if with_lattice {
        match surface_lattice(&singular) {
            Ok(l) => Some(l),
            Err(e) => {
                diagnostics.push(format!("lattice: {e}"));
                None
            }
        }
    } else {
        None
    };
    let out = AnalyzeOutput {
        checks: theorem_checks(&singular),
        kernel_dim: dual_plane_kernel(&x).len(),
        singular,
        ledger,
        configuration,
        lattice,
        diagnostics,
    };
    let code = if out.singular.complete && out.ledger.is_some() {
        EXIT_OK
    } else {
        EXIT_CERTIFICATION
    };
    let stdout = match common.format {
        Format::Json => to_json(&out),
        Format::Text => analyze_text(&out),
    };
    Outcome {
        code,
        stdout,
        stderr: out.diagnostics.join("\n"),
    }
}

fn analyze_text(o: &AnalyzeOutput) -> String {
    let r = &o.singular;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "singular points: {} (double {}, nodes {}, biplanar {}, uniplanar {}, triple {}), complete: {}",
        r.count,
        r.nu,
        r.count_kind(SingularityKind::Node), r.b, r.u, r.triple, r.complete
    );
    for p in &r.points {
        let coords: Vec<String> = p.point.iter().map(|c| c.to_hex()).collect();
        let _ = writeln!(
            s,
            "  ({}) orbit {} {:?}{} defect {} {}",
            coords.join(":"),
            p.orbit_size,
            p.kind,
            p.an_index.map(|n| format!(" A{n}")).unwrap_or_default(),
            p.defect
                .finite()
                .map_or("infinite".into(), |d| d.to_string()),
            serde_json::to_value(p.rdp_status)
                .map_or(String::new(), |v| v.as_str().unwrap_or("").to_string())
        );
    }
    if let Some(l) = &o.ledger {
        let _ = writeln!(
            s,
            "defect sum {}, deg(gamma)*deg(dual) = {}, bound ok: {}",
            l.defect_sum, l.product, l.bound_ok
        );
    }
    if let Some(c) = &o.configuration {
        let _ = writeln!(
            s,
            "max collinear {}, max coplanar {}, companion pairs {}",
            c.max_collinear,
            c.max_coplanar,
            c.companion_pairs.len()
        );
    }
    let _ = writeln!(s, "dual-plane kernel dimension {}", o.kernel_dim);
    let _ = writeln!(
        s,
        "theorem checks: {}",
        if o.checks.all() { "pass" } else { "FAIL" }
    );
    if let Some(l) = &o.lattice {
        let _ = writeln!(
            s,
            "lattice rank {}, exceptional span negative definite: {}",
            l.basis.rank(),
            l.exceptional_negative_definite
        );
    }
    s
}

#[derive(Serialize)]
struct FamilyOutput {
    family: String,
    m: u32,
    seed: u64,
    surface: PolyJson,
    verified: bool,
    report: FamilyReport,
}

fn cmd_family(
    name: &str,
    m: u32,
    lambda: Option<&str>,
    surface_out: Option<&PathBuf>,
    common: &Common,
) -> Outcome {
    let kind: FamilyKind = match name.parse() {
        Ok(k) => k,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}")),
    };
    let field = match quartic_core::json::field_of_m(m) {
        Ok(f) => f,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}")),
    };
    let lambda = match lambda.map(|h| parse_fe(field, h)).transpose() {
        Ok(l) => l,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: --lambda: {e}")),
    };
    let x = match build_family(kind, field, common.seed, lambda) {
        Ok(x) => x,
        Err(e) => return Outcome::fail(EXIT_CERTIFICATION, format!("construction failed: {e}")),
    };
    let surface = PolyJson::from_poly(x.equation());
    if let Some(path) = surface_out {
        let text = serde_json::to_string(&surface).expect("serializable");
        if let Err(e) = std::fs::write(path, text) {
            return Outcome::fail(EXIT_INPUT, format!("cannot write {}: {e}", path.display()));
        }
    }
    let report = match verify_family(kind, &x, &options(common)) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(EXIT_CERTIFICATION, format!("verification failed: {e}")),
    };
    let out = FamilyOutput {
        family: name.into(),
        m,
        seed: common.seed,
        surface,
        verified: report.verified(),
        report,
    };
    let stdout = match common.format {
        Format::Json => to_json(&out),
        Format::Text => {
            let r = out.report.singular();
            let mut s = format!(
                "family {} over GF(2^{}), seed {}: {} singular points (nodes {}, biplanar {}), verified: {}\n",
                out.family,
                m,
                out.seed,
                r.count,
                r.count_kind(SingularityKind::Node),
                r.b,
                out.verified
            );
            for d in out.report.diagnostics() {
                let _ = writeln!(s, "  {d}");
            }
            s
        }
    };
    Outcome {
        code: if out.verified {
            EXIT_OK
        } else {
            EXIT_CERTIFICATION
        },
        stderr: out.report.diagnostics().join("\n"),
        stdout,
    }
}

#[derive(Serialize)]
struct FibrationOutput {
    ledger: EulerLedger,
    disjoint: DisjointSum,
    square_discriminant: bool,
}

#[derive(Serialize)]
struct QuasiEllipticOutput {
    quasi_elliptic: bool,
    possible_fibre_types: Vec<&'static str>,
}

fn cmd_fibration(input: &PathBuf, common: &Common) -> Outcome {
    let text = match read(input) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let model = match WeierstrassModel::from_json(&text) {
        Ok(m) => m,
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}")),
    };
    if model.is_quasi_elliptic() {
        let out = QuasiEllipticOutput {
            quasi_elliptic: true,
            possible_fibre_types: quasi_elliptic_types(),
        };
        let stdout = match common.format {
            Format::Json => to_json(&out),
            Format::Text => format!(
                "quasi-elliptic; possible fibre types: {}\n",
                out.possible_fibre_types.join(", ")
            ),
        };
        return Outcome {
            code: EXIT_QUASI_ELLIPTIC,
            stdout,
            stderr: "model is quasi-elliptic".into(),
        };
    }
    let ledger = match euler_ledger(&model, common.max_ext) {
        Ok(l) => l,
        Err(Error::Certification(msg)) => {
            return Outcome::fail(EXIT_CERTIFICATION, format!("certification failed: {msg}"))
        }
        Err(e) => return Outcome::fail(EXIT_INPUT, format!("error: {e}")),
    };
    let out = FibrationOutput {
        disjoint: max_disjoint_sum(&ledger),
        square_discriminant: is_square_poly(&model.discriminant()),
        ledger,
    };
    let stdout = match common.format {
        Format::Json => to_json(&out),
        Format::Text => census_text(&out),
    };
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn census_text(o: &FibrationOutput) -> String {
    let mut s = format!(
        "{:<24} {:>3} {:>5} {:>4} {:>4} {:>4} {:>4} {:>4}\n",
        "place", "deg", "type", "m_v", "e_v", "vD", "d_v", "N_v"
    );
    for f in &o.ledger.fibers {
        let place = match &f.place {
            Place::Infinity => "infinity".to_string(),
            Place::Finite { root, .. } => format!("t = {}", root.to_hex()),
        };
        let _ = writeln!(
            s,
            "{:<24} {:>3} {:>5} {:>4} {:>4} {:>4} {:>4} {:>4}",
            place,
            f.degree,
            f.kodaira.to_string(),
            f.m_v,
            f.e_v,
            f.v_delta,
            f.delta_v,
            f.n_v
        );
    }
    let _ = writeln!(
        s,
        "Euler total {}, sum N_v {} (bound ok: {}, extremal ok: {}), square discriminant: {}",
        o.ledger.total,
        o.disjoint.sum,
        o.disjoint.bound_ok,
        o.disjoint.extremal_ok,
        o.square_discriminant
    );
    s
}
