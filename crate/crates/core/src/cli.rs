//! Command-line front end: argument parsing, the code document format and
//! the registry of worked examples.
//!
//! [`run`] is the whole program minus process plumbing; it writes to the
//! given streams and returns the exit code (0 success, 1 verification
//! failure, 2 usage or parse error).

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::{FieldCtx, Fq, MatFq};
use crate::constructions::{
    construct_from_sys_mrd, construct_gab_subcode, mds_diagonal_construct, optimal_gab_subcode, recipe_thm_com1,
    recipe_thm_com3, shorten_to_diagram, sys_mrd_build, sys_mrd_search, Com1Parts, Part, SysMrdSpec,
};
use crate::ferrers::{parse_diagram, CellMap, FerrersDiagram};
use crate::rankcode::{certify, Certificate, Optimality, RankCode, SearchOptions, DEFAULT_BUDGET};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Random codewords checked when a code is too large to enumerate.
pub const DEFAULT_SAMPLES: u64 = 10_000;

#[derive(Parser, Debug)]
#[command(name = "fdrm", version, about = "Construct and verify Ferrers diagram rank-metric codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct CheckArgs {
    /// Largest code (in codewords) enumerated exhaustively
    #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Random codewords checked beyond the budget
    #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Worker threads for the distance search
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: u16,
}

impl CheckArgs {
    pub fn options(&self) -> SearchOptions {
        SearchOptions {
            budget: self.budget,
            samples: Some(self.samples),
            workers: self.workers as usize,
            ..SearchOptions::default()
        }
    }
}

impl Default for CheckArgs {
    fn default() -> CheckArgs {
        CheckArgs { budget: DEFAULT_BUDGET, samples: DEFAULT_SAMPLES, workers: 1 }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the dimension bound of a diagram
    Bound {
        /// `cols:a,b,...`, a grid of `.`/`*`, or `@path`
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        delta: usize,
    },
    /// Build a code on a diagram and certify it
    Construct {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        diagram: String,
        /// Field size, a prime power
        #[arg(long)]
        q: u64,
        #[arg(long)]
        delta: usize,
        /// Number of staircase columns for gab-subcode
        #[arg(long)]
        r: Option<usize>,
        /// Write the code document here instead of stdout
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Re-check a code document from its basis
    Verify {
        path: PathBuf,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Rebuild a worked example and certify it
    Example {
        id: String,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// List construction methods and examples
    List,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// MRD code forced to zero off the diagram
    Shorten,
    /// One MDS code per diagonal
    MdsDiag,
    /// Systematic monomial generator, searched coefficients
    SysMrd,
    /// Staircase subcode of a Gabidulin code
    GabSubcode,
    /// Single-dot combination
    ThmCom3,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Shorten => "shorten",
            Method::MdsDiag => "mds-diag",
            Method::SysMrd => "sys-mrd",
            Method::GabSubcode => "gab-subcode",
            Method::ThmCom3 => "thm-com3",
        }
    }
}

/// `F_q` for a prime power `q`.
pub fn field_of_order(q: u64) -> Result<Fq> {
    if q < 2 {
        return Err(Error::Parse(format!("q = {q} is not a prime power")));
    }
    let p = (2..=q).find(|p| q.is_multiple_of(*p)).unwrap();
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(Error::Parse(format!("q = {q} is not a prime power")));
    }
    Fq::new(p, e)
}

/// Reads `@path` arguments from disk, anything else is diagram text.
pub fn read_diagram(arg: &str) -> Result<FerrersDiagram> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            parse_diagram(&text)
        }
        None => parse_diagram(arg),
    }
}

pub fn bound_report(f: &FerrersDiagram, delta: usize) -> Result<String> {
    let (kmax, v) = f.singleton_like_bound(delta)?;
    let v = v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    Ok(format!("v=[{v}] kmax={kmax}"))
}

/// Runs one construction method on `f`.
pub fn construct(method: Method, f: &FerrersDiagram, fq: Arc<Fq>, delta: usize, r: Option<usize>) -> Result<RankCode> {
    match method {
        Method::Shorten => shorten_to_diagram(f, delta, fq),
        Method::MdsDiag => mds_diagonal_construct(f, delta, fq),
        Method::GabSubcode => match r {
            Some(r) => construct_gab_subcode(f, delta, r, fq),
            None => optimal_gab_subcode(f, delta, fq),
        },
        Method::ThmCom3 => recipe_thm_com3(f, delta, fq),
        Method::SysMrd => {
            let n = f.n();
            if delta == 0 || delta > n {
                return Err(Error::Precondition(format!("need 1 <= delta <= n = {n}, got {delta}")));
            }
            let k = n + 1 - delta;
            let m = f.m().max(n).max(k * n + 2 - k * k);
            let spec = sys_mrd_search(&fq, n, delta, DEFAULT_BUDGET)?.ok_or_else(|| {
                Error::Precondition(format!("no coefficients over F_{} give nonvanishing minors", fq.q()))
            })?;
            let ctx = FieldCtx::try_over(fq, m)?;
            construct_from_sys_mrd(&sys_mrd_build(&ctx, n, delta, &spec)?, f)
        }
    }
}

/// Serializes a code: header lines, then `basis:` and one block of `m`
/// rows per basis matrix.
pub fn write_document(code: &RankCode) -> String {
    let fq = code.fq();
    let diagram = code.diagram().map_or_else(|| FerrersDiagram::full(code.m(), code.n()), Clone::clone);
    let sep = if fq.q() > 9 { " " } else { "" };
    let mut s = String::new();
    let _ = writeln!(s, "p={}", fq.p());
    let _ = writeln!(s, "e={}", fq.e());
    let _ = writeln!(s, "m={}", code.m());
    let _ = writeln!(s, "n={}", code.n());
    let _ = writeln!(s, "k={}", code.k());
    let _ = writeln!(s, "delta={}", code.delta());
    let _ = writeln!(s, "diagram={diagram}");
    s.push_str("basis:\n");
    for b in code.basis() {
        for i in 0..b.rows() {
            let row: Vec<String> = b.row(i).iter().map(u32::to_string).collect();
            s.push_str(&row.join(sep));
            s.push('\n');
        }
    }
    s
}

/// A parsed code document. `k` is the header's claim; the code itself
/// holds whatever the basis section contains.
#[derive(Clone, Debug)]
pub struct Document {
    pub k: usize,
    pub delta: usize,
    pub diagram: FerrersDiagram,
    pub code: RankCode,
}

fn header<'a>(lines: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<&'a str> {
    let line = lines.next().ok_or_else(|| Error::Parse(format!("missing `{key}=` line")))?;
    line.strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .ok_or_else(|| Error::Parse(format!("expected `{key}=`, found {line:?}")))
}

fn number<T: std::str::FromStr>(text: &str, key: &str) -> Result<T> {
    text.trim().parse().map_err(|_| Error::Parse(format!("bad value {text:?} for {key}")))
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut lines = text.lines().map(str::trim_end).filter(|l| !l.is_empty());
    let p: u64 = number(header(&mut lines, "p")?, "p")?;
    let e: u32 = number(header(&mut lines, "e")?, "e")?;
    let m: usize = number(header(&mut lines, "m")?, "m")?;
    let n: usize = number(header(&mut lines, "n")?, "n")?;
    let k: usize = number(header(&mut lines, "k")?, "k")?;
    let delta: usize = number(header(&mut lines, "delta")?, "delta")?;
    let diagram = parse_diagram(header(&mut lines, "diagram")?)?;
    if lines.next() != Some("basis:") {
        return Err(Error::Parse("expected `basis:`".into()));
    }
    let fq = Arc::new(Fq::new(p, e).map_err(|err| Error::Parse(err.to_string()))?);
    let rows: Vec<Vec<u32>> = lines
        .enumerate()
        .map(|(i, line)| {
            let cells: Vec<&str> = if fq.q() > 9 {
                line.split_whitespace().collect()
            } else {
                line.split("").filter(|c| !c.trim().is_empty()).collect()
            };
            if cells.len() != n {
                return Err(Error::Parse(format!("basis row {i} has {} entries, expected {n}", cells.len())));
            }
            cells
                .iter()
                .map(|c| match c.parse::<u32>() {
                    Ok(v) if u64::from(v) < fq.q() => Ok(v),
                    _ => Err(Error::Parse(format!("basis row {i}: {c:?} is not an element of F_{}", fq.q()))),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if m == 0 || !rows.len().is_multiple_of(m) {
        return Err(Error::Parse(format!("{} basis rows do not split into {m}-row blocks", rows.len())));
    }
    let basis = rows.chunks(m).map(MatFq::from_rows).collect();
    let code = RankCode::new(fq, m, n, basis, delta, None)?;
    Ok(Document { k, delta, diagram, code })
}

fn distance_text(cert: &Certificate) -> String {
    match cert.distance_observed {
        Some(d) => format!("{d}({})", cert.distance_method),
        None => "none".into(),
    }
}

/// `k=.. delta>=.. method=.. verify=.. optimal=..`.
pub fn certificate_line(method: &str, cert: &Certificate) -> String {
    format!(
        "k={} delta>={} method={method} distance={} bound={} optimal={}",
        cert.k_observed,
        cert.delta_claimed,
        distance_text(cert),
        cert.bound_value,
        cert.optimal
    )
}

/// Checks a parsed document from its basis alone. Returns the report and
/// the first failed check, if any.
pub fn verify_document(doc: &Document, opts: &SearchOptions) -> Result<(String, Option<String>)> {
    let code = &doc.code;
    if (doc.diagram.m(), doc.diagram.n()) != (code.m(), code.n()) {
        return Ok((
            String::new(),
            Some(format!(
                "dimension mismatch: diagram is {}x{}, header says {}x{}",
                doc.diagram.m(),
                doc.diagram.n(),
                code.m(),
                code.n()
            )),
        ));
    }
    let cert = certify(code, &doc.diagram, doc.delta, opts)?;
    let report = format!(
        "k={} delta>={} support_ok={} distance={} bound={} optimal={}",
        cert.k_observed,
        cert.delta_claimed,
        cert.support_ok,
        distance_text(&cert),
        cert.bound_value,
        cert.optimal
    );
    let failure = if doc.k != code.k() {
        Some(format!("dimension mismatch: header claims k = {}, basis has {} matrices", doc.k, code.k()))
    } else {
        cert.failure()
    };
    Ok((report, failure))
}

/// A worked example: how to build it and what it must achieve.
pub struct Example {
    pub id: &'static str,
    pub summary: &'static str,
    pub q: u64,
    pub delta: usize,
    pub k: usize,
    pub expect: Optimality,
    pub build: fn(Arc<Fq>) -> Result<RankCode>,
}

fn sys_example(fq: Arc<Fq>, m: usize, gamma: &[usize], coeffs: &[Vec<u32>]) -> Result<RankCode> {
    let f = FerrersDiagram::new(gamma.to_vec())?;
    let spec = SysMrdSpec::new(&fq, coeffs)?;
    let n = spec.n();
    let ctx = FieldCtx::try_over(fq, m)?;
    construct_from_sys_mrd(&sys_mrd_build(&ctx, n, n + 1 - spec.k(), &spec)?, &f)
}

/// The four-part example: `F1` with a relocated dot `F2` fills a 3x3
/// square, `F3` a single column at the bottom right, `F4` the top right.
pub fn com1_example(fq: Arc<Fq>) -> Result<RankCode> {
    let f = parse_diagram("cols:2,3,3,4,4,4,4,10")?;
    let f1 = Part::window(parse_diagram("cols:2,3,3")?, 0, 0);
    let phi1 = CellMap::identity(&f1.diagram);
    let parts = Com1Parts {
        f1,
        f2: Some(Part::window(parse_diagram("cols:1")?, 3, 3)),
        f3: Part::window(parse_diagram("cols:3")?, 7, 7),
        f4: Part::window(parse_diagram("cols:3,4,4,4,7")?, 0, 3),
        phi1,
        phi2: CellMap::new(vec![((0, 0), (2, 0))]),
    };
    let c12 = shorten_to_diagram(&FerrersDiagram::full(3, 3), 3, Arc::clone(&fq))?;
    let c3 = shorten_to_diagram(&parts.f3.diagram, 1, Arc::clone(&fq))?;
    let c4 = optimal_gab_subcode(&parts.f4.diagram, 4, Arc::clone(&fq))?;
    crate::constructions::combine_com1(&f, &parts, &c12, &c3, &c4)
}

pub fn examples() -> Vec<Example> {
    vec![
        Example {
            id: "sysmds1",
            summary: "monomial systematic generator, q=2, n=4, m=6, on cols:2,3,4,6",
            q: 2,
            delta: 3,
            k: 5,
            expect: Optimality::Yes,
            build: |fq| sys_example(fq, 6, &[2, 3, 4, 6], &[vec![1, 1], vec![1, 1]]),
        },
        Example {
            id: "sysmds2",
            summary: "monomial systematic generator, q=5, n=7, m=14 (sampled)",
            q: 5,
            delta: 5,
            k: 24,
            expect: Optimality::Unknown,
            build: |fq| {
                let a = [vec![2, 3, 4, 1], vec![1, 1, 1, 1], vec![1, 2, 4, 3]];
                sys_example(fq, 14, &[7, 8, 9, 10, 11, 12, 14], &a)
            },
        },
        Example {
            id: "sysmds3",
            summary: "monomial systematic generator, q=7, n=9, m=20 (sampled)",
            q: 7,
            delta: 7,
            k: 36,
            expect: Optimality::Unknown,
            build: |fq| {
                let a = [vec![2, 3, 4, 5, 6, 1], vec![1, 1, 1, 1, 1, 1], vec![1, 6, 3, 5, 2, 4]];
                sys_example(fq, 20, &[11, 12, 13, 14, 15, 16, 17, 18, 20], &a)
            },
        },
        Example {
            id: "gabsub-n3",
            summary: "staircase subcode with r=2 on cols:2,2,4,4,6,8",
            q: 2,
            delta: 4,
            k: 8,
            expect: Optimality::Yes,
            build: |fq| construct_gab_subcode(&parse_diagram("cols:2,2,4,4,6,8")?, 4, 2, fq),
        },
        Example {
            id: "com1",
            summary: "four-part block combination on cols:2,3,3,4,4,4,4,10",
            q: 2,
            delta: 4,
            k: 10,
            expect: Optimality::Yes,
            build: com1_example,
        },
        Example {
            id: "com2",
            summary: "combined short rows on cols:3,3,3,3,3,4,4,4,4,12",
            q: 2,
            delta: 4,
            k: 13,
            expect: Optimality::Yes,
            build: |fq| recipe_thm_com1(12, 10, 5, 4, &[1, 1], fq),
        },
        Example {
            id: "com3",
            summary: "single-dot combination on cols:2,2,2,3,6",
            q: 2,
            delta: 3,
            k: 5,
            expect: Optimality::Yes,
            build: |fq| recipe_thm_com3(&parse_diagram("cols:2,2,2,3,6")?, 3, fq),
        },
        Example {
            id: "diag-ex",
            summary: "MDS codes on the diagonals of cols:2,3,4,5, q=4",
            q: 4,
            delta: 3,
            k: 5,
            expect: Optimality::Yes,
            build: |fq| mds_diagonal_construct(&parse_diagram("cols:2,3,4,5")?, 3, fq),
        },
    ]
}

/// Outcome of [`run_example`].
#[derive(Clone, Debug)]
pub struct ExampleReport {
    pub line: String,
    pub document: String,
    pub certificate: Certificate,
    pub pass: bool,
}

pub fn run_example(id: &str, opts: &SearchOptions) -> Result<ExampleReport> {
    let ex =
        examples().into_iter().find(|e| e.id == id).ok_or_else(|| Error::Parse(format!("unknown example {id:?}")))?;
    let fq = Arc::new(field_of_order(ex.q)?);
    let code = (ex.build)(fq)?;
    let f = code.diagram().cloned().ok_or_else(|| Error::Precondition("example has no diagram".into()))?;
    let certificate = certify(&code, &f, ex.delta, opts)?;
    let pass = certificate.passes()
        && certificate.k_observed == ex.k
        && code.delta() >= ex.delta
        && certificate.optimal == ex.expect;
    let line =
        format!("{id} q={} {} {}", ex.q, certificate_line(ex.id, &certificate), if pass { "PASS" } else { "FAIL" });
    Ok(ExampleReport { line, document: write_document(&code), certificate, pass })
}

fn usage(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    EXIT_USAGE
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match cli.command {
        Command::Bound { diagram, delta } => match read_diagram(&diagram).and_then(|f| bound_report(&f, delta)) {
            Ok(line) => {
                let _ = writeln!(out, "{line}");
                EXIT_OK
            }
            Err(e) => usage(err, &e),
        },
        Command::Construct { method, diagram, q, delta, r, out: path, check } => {
            let built = read_diagram(&diagram).and_then(|f| {
                let fq = Arc::new(field_of_order(q)?);
                let code = construct(method, &f, fq, delta, r)?;
                let cert = certify(&code, &f, delta, &check.options())?;
                Ok((code, cert))
            });
            let (code, cert) = match built {
                Ok(x) => x,
                Err(e) => return usage(err, &e),
            };
            let doc = write_document(&code);
            let line = certificate_line(method.name(), &cert);
            match path {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, &doc) {
                        let _ = writeln!(err, "error: {}: {e}", p.display());
                        return EXIT_USAGE;
                    }
                    let _ = writeln!(out, "{line}");
                }
                None => {
                    let _ = write!(out, "{doc}");
                    let _ = writeln!(err, "{line}");
                }
            }
            match cert.failure() {
                Some(why) => {
                    let _ = writeln!(err, "FAIL: {why}");
                    EXIT_FAIL
                }
                None => EXIT_OK,
            }
        }
        Command::Verify { path, check } => {
            let doc = std::fs::read_to_string(&path)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
                .and_then(|t| parse_document(&t));
            let doc = match doc {
                Ok(d) => d,
                Err(e) => return usage(err, &e),
            };
            match verify_document(&doc, &check.options()) {
                Ok((report, failure)) => {
                    if !report.is_empty() {
                        let _ = writeln!(out, "{report}");
                    }
                    match failure {
                        Some(why) => {
                            let _ = writeln!(out, "FAIL: {why}");
                            EXIT_FAIL
                        }
                        None => {
                            let _ = writeln!(out, "PASS");
                            EXIT_OK
                        }
                    }
                }
                Err(e) => {
                    let _ = writeln!(out, "FAIL: {e}");
                    EXIT_FAIL
                }
            }
        }
        Command::Example { id, check } => match run_example(&id, &check.options()) {
            Ok(report) => {
                let _ = writeln!(out, "{}", report.line);
                if report.pass {
                    EXIT_OK
                } else {
                    EXIT_FAIL
                }
            }
            Err(e @ Error::Parse(_)) => usage(err, &e),
            Err(e) => {
                let _ = writeln!(out, "{id} FAIL: {e}");
                EXIT_FAIL
            }
        },
        Command::List => {
            let _ = writeln!(out, "methods:");
            for m in Method::value_variants() {
                let help = m.to_possible_value().and_then(|v| v.get_help().map(ToString::to_string));
                let _ = writeln!(out, "  {:<12} {}", m.name(), help.unwrap_or_default());
            }
            let _ = writeln!(out, "examples:");
            for ex in examples() {
                let _ = writeln!(out, "  {:<12} {}", ex.id, ex.summary);
            }
            EXIT_OK
        }
    }
}
