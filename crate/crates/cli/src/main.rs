//! `cusp`: batch front end over `cusp-core` documents.

mod render;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cusp_core::document::{Decomposition, DocError, Document, LiftCertificate, Lifted, Problem};
use cusp_core::entourage::{entourage_failure, GeneratorSet, MorphismTable, PairFamily};
use cusp_core::lifting;
use cusp_core::morphism::CuMap;
use cusp_core::tower;
use cusp_core::{CuElement, Error, ExtNat};

#[derive(Parser)]
#[command(name = "cusp", version, about = "Cuntz-semigroup computations for splitting interval algebras")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Relation {
    Leq,
    Wb,
}

#[derive(Subcommand)]
enum Command {
    /// Load a document and report whether it is valid.
    Validate { path: PathBuf },
    /// Decide f ≤ g or f ≪ g; false verdicts carry a witness.
    Compare { relation: Relation, f: PathBuf, g: PathBuf },
    /// Apply the Cu-map induced by a hom to an element.
    Apply {
        hom: PathBuf,
        element: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tabulate a hom on the generator set F_n.
    Table {
        hom: PathBuf,
        #[arg(long)]
        depth: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether two maps (homs or tables) are close on F_n.
    Entourage {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        depth: u32,
    },
    /// Lift a table to a standard-form hom, with its entourage certificate.
    Lift {
        table: PathBuf,
        /// Restrict the table to this depth first.
        #[arg(long)]
        depth: Option<u32>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build and verify an intertwining certificate for a tower and table family.
    Classify {
        tower: PathBuf,
        alpha: PathBuf,
        #[arg(long)]
        depth: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Split a finite rank function into nested level-set indicators.
    Decompose {
        rankfn: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a seeded battery of round-trip checks.
    Selftest {
        #[arg(long, default_value_t = 25)]
        rounds: u32,
    },
}

/// Exit statuses: 1 false or invalid, 2 usage, 3 broken internal postcondition.
enum Failure {
    Invalid(String),
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::PostconditionFailure(_) => Failure::Internal(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Failure {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Document, Failure> {
    let text = read(path)?;
    Document::parse(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn wrong_kind(path: &Path, d: &Document, want: &str) -> Failure {
    Failure::Usage(format!("{}: expected a {want} document, found {}", path.display(), d.kind()))
}

fn load_element(path: &Path) -> Result<CuElement, Failure> {
    match load(path)? {
        d @ (Document::Rankfn(_) | Document::Element(_)) => Ok(d.into_element()?),
        d => Err(wrong_kind(path, &d, "rankfn or element")),
    }
}

/// Either a hom or a table, as a map on generators.
fn load_map(path: &Path) -> Result<Box<dyn CuMap>, Failure> {
    match load(path)? {
        Document::Hom(h) => Ok(Box::new(h)),
        Document::Table(t) => Ok(Box::new(t)),
        Document::Lift(l) => Ok(Box::new(l.hom)),
        d => Err(wrong_kind(path, &d, "hom or table")),
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| Failure::Usage(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn emit(doc: &Document, output: Option<&Path>, format: Format) -> Result<(), Failure> {
    // A freshly built document must load back to itself.
    let text = doc.to_json();
    match Document::parse(&text) {
        Ok(back) if &back == doc => {}
        Ok(_) => return Err(Failure::Internal(format!("emitted {} does not reload to itself", doc.kind()))),
        Err(e) => return Err(Failure::Internal(format!("emitted {} does not reload: {e}", doc.kind()))),
    }
    match output {
        Some(p) => {
            write_atomic(p, &text)?;
            if format == Format::Human {
                println!("wrote {} to {}", doc.kind(), p.display());
            }
        }
        None => match format {
            Format::Json => print!("{text}"),
            Format::Human => print!("{}", render::document(doc)),
        },
    }
    Ok(())
}

fn verdict(format: Format, fields: serde_json::Value, holds: bool, witness: Option<String>) -> Outcome {
    match format {
        Format::Human => match &witness {
            Some(w) if !holds => println!("false: {w}"),
            _ => println!("{holds}"),
        },
        Format::Json => {
            let mut v = fields;
            v["holds"] = json!(holds);
            v["witness"] = json!(witness);
            println!("{}", serde_json::to_string_pretty(&v).expect("json values serialise"));
        }
    }
    Ok(holds)
}

fn validate(path: &Path, format: Format) -> Outcome {
    let text = read(path)?;
    let (valid, kind, error) = match Document::parse(&text) {
        Ok(d) => (true, Some(d.kind()), None),
        Err(e) => (false, None, Some(e)),
    };
    match format {
        Format::Human => match (&kind, &error) {
            (Some(k), _) => println!("valid {k}"),
            (_, Some(e)) => println!("{}: {e}", path.display()),
            _ => unreachable!(),
        },
        Format::Json => {
            let v = json!({
                "valid": valid,
                "kind": kind,
                "problem": error.as_ref().map(|e| match e.problem {
                    Problem::Syntax => "parse",
                    Problem::Invalid => "invalid",
                    Problem::Version => "version",
                    Problem::UnknownKind => "kind",
                }),
                "line": error.as_ref().filter(|e| e.line > 0).map(|e| e.line),
                "message": error.as_ref().map(|e| e.message.clone()),
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("json values serialise"));
        }
    }
    Ok(valid)
}

/// Where `a ≤ b` or `a ≪ b` breaks, if it does.
fn witness(rel: Relation, a: &CuElement, b: &CuElement) -> Result<Option<String>, Failure> {
    if a.target() != b.target() {
        return Err(Failure::Usage(format!("elements live in different semigroups: {} vs {}", a.target(), b.target())));
    }
    Ok(match (a, b) {
        (CuElement::Scalar(x), CuElement::Scalar(y)) => match rel {
            Relation::Leq if x > y => Some(format!("{x} > {y}")),
            Relation::Wb if *x == ExtNat::Inf => Some("left side is inf".into()),
            Relation::Wb if x > y => Some(format!("{x} > {y}")),
            _ => None,
        },
        (CuElement::Rank(f), CuElement::Rank(g)) => match rel {
            Relation::Leq => f.exceeds_at(g)?.map(|pt| {
                let (u, v) = (f.value_at(&pt), g.value_at(&pt));
                match (u, v) {
                    (Ok(u), Ok(v)) => format!("exceeds at {pt}: {u} > {v}"),
                    _ => format!("exceeds at {pt}"),
                }
            }),
            Relation::Wb => f.way_below_failure(g)?.map(|w| w.to_string()),
        },
        (CuElement::Sum(xs), CuElement::Sum(ys)) => {
            for (k, (x, y)) in xs.iter().zip(ys).enumerate() {
                if let Some(w) = witness(rel, x, y)? {
                    return Ok(Some(format!("summand {}: {w}", k + 1)));
                }
            }
            None
        }
        _ => return Err(Failure::Usage("mismatched element kinds".into())),
    })
}

fn compare(rel: Relation, f: &Path, g: &Path, format: Format) -> Outcome {
    let (a, b) = (load_element(f)?, load_element(g)?);
    let w = witness(rel, &a, &b)?;
    let name = match rel {
        Relation::Leq => "leq",
        Relation::Wb => "wb",
    };
    verdict(format, json!({ "relation": name }), w.is_none(), w)
}

fn entourage(a: &Path, b: &Path, depth: u32, format: Format) -> Outcome {
    let (alpha, beta) = (load_map(a)?, load_map(b)?);
    let fam = GeneratorSet::new(alpha.source(), depth);
    let fail = entourage_failure(fam.as_ref(), alpha.as_ref(), beta.as_ref())?;
    let w = match fail {
        None => None,
        Some((i, j)) => {
            let (x, y) = (&fam.elements()[i], &fam.elements()[j]);
            let (ax, ay, bx, by) = (alpha.eval(x)?, alpha.eval(y)?, beta.eval(x)?, beta.eval(y)?);
            let (ka, kb) = (&fam.keys()[i], &fam.keys()[j]);
            Some(if !ax.leq(&by)? {
                format!("pair ({ka}, {kb}): first({ka}) = {ax} is not below second({kb}) = {by}")
            } else {
                format!("pair ({ka}, {kb}): second({ka}) = {bx} is not below first({kb}) = {ay}")
            })
        }
    };
    verdict(format, json!({ "depth": depth }), w.is_none(), w)
}

fn lift(path: &Path, depth: Option<u32>, output: Option<&Path>, format: Format) -> Outcome {
    let table = match load(path)? {
        Document::Table(t) => t,
        d => return Err(wrong_kind(path, &d, "table")),
    };
    let table = match depth {
        Some(n) if n > table.depth() => {
            return Err(Failure::Usage(format!("--depth {n} exceeds the table depth {}", table.depth())))
        }
        Some(n) => table.restrict(n)?,
        None => table,
    };
    let hom = lifting::lift(&table)?;
    let certificate = LiftCertificate {
        table_depth: table.depth(),
        entourage_depth: lifting::certified_depth(&table),
        checked: true,
    };
    emit(&Document::Lift(Lifted { hom, certificate }), output, format)?;
    Ok(true)
}

fn classify(tp: &Path, ap: &Path, depth: u32, output: Option<&Path>, format: Format) -> Outcome {
    let t = match load(tp)? {
        Document::Tower(t) => t,
        d => return Err(wrong_kind(tp, &d, "tower")),
    };
    let fam = match load(ap)? {
        Document::AlphaFamily(f) => f,
        d => return Err(wrong_kind(ap, &d, "alpha-family")),
    };
    let cert = tower::intertwine(&t, &fam, depth)?;
    tower::verify_certificate(&t, &fam, &cert)
        .map_err(|e| Failure::Internal(format!("certificate does not re-verify: {e}")))?;
    emit(&Document::Certificate(cert), output, format)?;
    Ok(true)
}

fn decompose(path: &Path, output: Option<&Path>, format: Format) -> Outcome {
    let f = match load(path)? {
        Document::Rankfn(f) => f,
        d => return Err(wrong_kind(path, &d, "rankfn")),
    };
    let levels = f.decompose()?;
    emit(&Document::Decomposition(Decomposition { shape: f.shape().clone(), levels }), output, format)?;
    Ok(true)
}

fn selftest(rounds: u32, format: Format) -> Outcome {
    use cusp_core::sample::{self, TargetKind};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut checks = 0u32;
    let trap = |what: String| Failure::Internal(format!("selftest: {what}"));
    for round in 0..rounds {
        let sh = sample::shape(&mut rng, 3, 2);
        let f = sample::rank_function(&mut rng, &sh, 3, 3);
        let parts = f.decompose()?;
        let sum = cusp_core::RankFunction::sum(
            &sh,
            &parts.iter().map(|u| cusp_core::RankFunction::indicator(&sh, u)).collect::<Result<Vec<_>, _>>()?,
        )?;
        if sum != f {
            return Err(trap(format!("round {round}: decomposition does not add up")));
        }
        let kind = [TargetKind::Matrix, TargetKind::MatrixSum, TargetKind::Algebra][rng.gen_range(0..3)];
        let h = sample::hom(&mut rng, &sh, kind, 2, true)?;
        let n = 5;
        let t = MorphismTable::tabulate(&h, n)?;
        let lifted = lifting::lift(&t)?;
        let d = lifting::certified_depth(&t);
        if entourage_failure(GeneratorSet::new(&sh, d).as_ref(), &t, &lifted)?.is_some() {
            return Err(trap(format!("round {round}: lift leaves the entourage")));
        }
        for doc in [Document::Rankfn(f), Document::Hom(h), Document::Table(t)] {
            let s = doc.to_json();
            if Document::parse(&s).ok().as_ref() != Some(&doc) {
                return Err(trap(format!("round {round}: {} does not round-trip", doc.kind())));
            }
        }
        checks += 6;
    }
    match format {
        Format::Human => println!("selftest: {checks} checks passed over {rounds} rounds"),
        Format::Json => println!("{}", json!({ "rounds": rounds, "checks": checks, "passed": true })),
    }
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    let fmt = cli.format;
    match cli.command {
        Command::Validate { path } => validate(&path, fmt),
        Command::Compare { relation, f, g } => compare(relation, &f, &g, fmt),
        Command::Apply { hom, element, output } => {
            let h = match load(&hom)? {
                Document::Hom(h) => h,
                d => return Err(wrong_kind(&hom, &d, "hom")),
            };
            let doc = match load_element(&element)? {
                CuElement::Rank(f) => match h.apply(&f)? {
                    CuElement::Rank(g) => Document::Rankfn(g),
                    e => Document::Element(e),
                },
                e => return Err(Failure::Usage(format!("cannot apply a hom to the non-rank element {e}"))),
            };
            emit(&doc, output.as_deref(), fmt)?;
            Ok(true)
        }
        Command::Table { hom, depth, output } => {
            let h = match load(&hom)? {
                Document::Hom(h) => h,
                d => return Err(wrong_kind(&hom, &d, "hom")),
            };
            emit(&Document::Table(MorphismTable::tabulate(&h, depth)?), output.as_deref(), fmt)?;
            Ok(true)
        }
        Command::Entourage { a, b, depth } => entourage(&a, &b, depth, fmt),
        Command::Lift { table, depth, output } => lift(&table, depth, output.as_deref(), fmt),
        Command::Classify { tower, alpha, depth, output } => classify(&tower, &alpha, depth, output.as_deref(), fmt),
        Command::Decompose { rankfn, output } => decompose(&rankfn, output.as_deref(), fmt),
        Command::Selftest { rounds } => selftest(rounds, fmt),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            let (code, msg) = match f {
                Failure::Invalid(m) => (1, m),
                Failure::Usage(m) => (2, m),
                Failure::Internal(m) => (3, m),
            };
            eprintln!("cusp: {msg}");
            ExitCode::from(code)
        }
    }
}
