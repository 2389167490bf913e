//! Command-line driver. Every subcommand reads one document and writes
//! `key: value` lines; documents in the output use the same text format as
//! the input.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corkcalc::{encase, mu, pinwheel, pinwheel_twist, CertificateMap, MulticorkModel};
use crate::error::Error;
use crate::format::{format_certificate, format_move, parse_word_str, Body, Document, Scope};
use crate::presentation::{
    abelianization_matrix, count_homomorphisms, homology, is_ac_structure, smith_normal_form, standard_test_groups,
    BiPresentation, Movable, MoveToken, Presentation, SlidePath, DEFAULT_HOM_BUDGET,
};
use crate::search::{certificate_search, scramble, trivialization_search, SearchBudget};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "handlecalc", version, about = "Handle calculus on group presentations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Read the document from FILE instead of standard input.
    #[arg(long, global = true, value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    max_depth: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    max_nodes: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    beam: Option<usize>,
    /// Depth at which breadth-first search switches to the beam.
    #[arg(long, global = true, value_name = "N")]
    bfs_depth: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    conj_cap: Option<usize>,
    /// Allow stabilization and destabilization in search.
    #[arg(long, global = true)]
    stable: bool,
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Document whose `group:` tables replace the default test groups.
    #[arg(long, global = true, value_name = "FILE")]
    groups: Option<PathBuf>,
    /// TOML file with search budget fields.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SlideKind {
    Single,
    Double,
    General,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Balance and AC-structure report.
    Check,
    /// Abelianization, Smith normal form, H1 and homomorphism counts.
    Invariants,
    /// Apply the document's move lines.
    Move,
    /// Slide handle I over handle J of a bi-presentation.
    Slide {
        i: usize,
        j: usize,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        cstar: String,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i8,
        #[arg(long, value_enum, default_value_t = SlideKind::General)]
        kind: SlideKind,
    },
    /// Boundary sum of the `component:` blocks (or of N copies with --mu).
    Pinwheel {
        #[arg(long, value_name = "N")]
        mu: Option<usize>,
    },
    /// Pinwheel with component i replaced by component i + J.
    Twist {
        #[arg(short, long, allow_hyphen_values = true)]
        j: i64,
        #[arg(long, value_name = "N")]
        mu: Option<usize>,
    },
    /// Rewrite decomposed relators to their generators.
    Encase,
    /// Apply K random moves; the output carries the undoing script.
    Scramble {
        #[arg(short, long)]
        k: usize,
    },
    /// Search for a script to the trivial presentation.
    Trivialize,
    /// Search for the `target:` word as a product of relator conjugates.
    Certsearch,
}

/// What a run wrote and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

enum Failure {
    Parse(String),
    Verify(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(p) => Failure::Parse(p.to_string()),
            Error::BudgetExceeded(m) => Failure::Budget(format!("budget exceeded: {m}")),
            other => Failure::Verify(other.to_string()),
        }
    }
}

type Run<T = ()> = std::result::Result<T, Failure>;

/// Runs the command line `args` (program name first). Standard input is
/// read only when no `--input` file is given.
pub fn run<I, S>(args: I, stdin: impl Read) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Output { stdout, stderr, code };
        }
    };
    let mut out = String::new();
    let result = dispatch(&cli, stdin, &mut out);
    let (code, stderr) = match result {
        Ok(code) => (code, String::new()),
        Err(Failure::Parse(m)) => (EXIT_PARSE, format!("error: {m}\n")),
        Err(Failure::Verify(m)) => (EXIT_VERIFY, format!("error: {m}\n")),
        Err(Failure::Budget(m)) => (EXIT_BUDGET, format!("error: {m}\n")),
    };
    Output {
        stdout: out,
        stderr,
        code,
    }
}

fn read_file(path: &Path) -> Run<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn parse_doc(text: &str) -> Run<Document> {
    Document::parse(text).map_err(|e| Failure::Parse(e.to_string()))
}

fn budget(g: &Global) -> Run<SearchBudget> {
    let mut b = match &g.config {
        Some(path) => {
            let text = read_file(path)?;
            toml::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?
        }
        None => SearchBudget::default(),
    };
    b.rng_seed = g.seed.unwrap_or(b.rng_seed);
    b.max_depth = g.max_depth.unwrap_or(b.max_depth);
    b.max_nodes = g.max_nodes.unwrap_or(b.max_nodes);
    b.beam_width = g.beam.unwrap_or(b.beam_width);
    b.bfs_depth = g.bfs_depth.unwrap_or(b.bfs_depth);
    b.conjugator_length_cap = g.conj_cap.unwrap_or(b.conjugator_length_cap);
    b.workers = g.workers.unwrap_or(b.workers);
    b.stable |= g.stable;
    b.validate()?;
    Ok(b)
}

fn body(doc: &Document) -> Run<&Body> {
    doc.body
        .as_ref()
        .ok_or_else(|| Failure::Parse("the document has no `gens:` line".into()))
}

fn bi(doc: &Document) -> Run<&BiPresentation> {
    match body(doc)? {
        Body::Bi(bp) => Ok(bp),
        Body::Presentation(_) => Err(Failure::Parse(
            "this command needs a bi-presentation (`duals:` line)".into(),
        )),
    }
}

fn dispatch(cli: &Cli, mut stdin: impl Read, out: &mut String) -> Run<i32> {
    let text = match &cli.global.input {
        Some(path) => read_file(path)?,
        None => {
            let mut text = String::new();
            stdin
                .read_to_string(&mut text)
                .map_err(|e| Failure::Parse(format!("standard input: {e}")))?;
            text
        }
    };
    let doc = parse_doc(&text)?;
    let g = &cli.global;
    match &cli.command {
        Command::Check => check(&doc, out),
        Command::Invariants => invariants(&doc, g, out),
        Command::Move => apply_script(&doc, out),
        Command::Slide {
            i,
            j,
            c,
            cstar,
            sign,
            kind,
        } => slide(&doc, (*i, *j), c, cstar, *sign, *kind, out),
        Command::Pinwheel { mu: n } => pinwheel_cmd(&doc, *n, None, out),
        Command::Twist { j, mu: n } => pinwheel_cmd(&doc, *n, Some(*j), out),
        Command::Encase => encase_cmd(&doc, out),
        Command::Scramble { k } => scramble_cmd(&doc, *k, g, out),
        Command::Trivialize => trivialize(&doc, g, out),
        Command::Certsearch => certsearch(&doc, g, out),
    }
}

fn kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key}: {value}");
}

fn check(doc: &Document, out: &mut String) -> Run<i32> {
    let p = body(doc)?.presentation();
    let status = is_ac_structure(&p);
    kv(out, "generators", p.generator_count());
    kv(out, "relators", p.relator_count());
    kv(out, "balanced", p.is_balanced());
    kv(out, "ac_type1", status.type1);
    kv(out, "ac_type2", status.type2);
    if let Some(matching) = &status.matching {
        let pairs: Vec<String> = matching
            .iter()
            .map(|m| {
                let name = p.alphabet().name(m.generator).unwrap_or("?");
                let inv = if m.inverse { "^-1" } else { "" };
                format!("{}={name}{inv}", m.relator + 1)
            })
            .collect();
        kv(out, "ac_matching", pairs.join(" "));
    }
    Ok(EXIT_OK)
}

fn invariants(doc: &Document, g: &Global, out: &mut String) -> Run<i32> {
    let p = body(doc)?.presentation();
    let m = abelianization_matrix(&p);
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    kv(out, "abelianization", rows.join(" ; "));
    let snf = smith_normal_form(&m);
    kv(
        out,
        "snf",
        snf.invariants.iter().map(i64::to_string).collect::<Vec<_>>().join(" "),
    );
    kv(out, "h1", homology(&p));
    let groups = match &g.groups {
        Some(path) => {
            let groups = parse_doc(&read_file(path)?)?.groups;
            if groups.is_empty() {
                return Err(Failure::Parse(format!("{}: no `group:` tables", path.display())));
            }
            groups
        }
        None => standard_test_groups(),
    };
    let mut code = EXIT_OK;
    for group in &groups {
        let key = format!("hom_count[{}]", group.name());
        match count_homomorphisms(&p, group, DEFAULT_HOM_BUDGET) {
            Ok(n) => kv(out, &key, n),
            Err(Error::BudgetExceeded(_)) => {
                kv(out, &key, "exceeded");
                code = EXIT_BUDGET;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(code)
}

fn apply_script(doc: &Document, out: &mut String) -> Run<i32> {
    let result = match body(doc)? {
        Body::Presentation(p) => Document::from_presentation(doc.script.fold(p)?),
        Body::Bi(bp) => Document::from_bi(doc.script.fold(bp)?),
    };
    out.push_str(&result.print());
    Ok(EXIT_OK)
}

fn slide(
    doc: &Document,
    (i, j): (usize, usize),
    c: &str,
    cstar: &str,
    sign: i8,
    kind: SlideKind,
    out: &mut String,
) -> Run<i32> {
    let bp = bi(doc)?;
    let index = |n: usize| {
        n.checked_sub(1)
            .ok_or_else(|| Failure::Parse("handle indices are 1-based".into()))
    };
    let (i, j) = (index(i)?, index(j)?);
    let c = parse_word_str(c, bp.primary()).map_err(|e| Failure::Parse(format!("--c: {e}")))?;
    let c_star = parse_word_str(cstar, bp.dual()).map_err(|e| Failure::Parse(format!("--cstar: {e}")))?;
    if kind != SlideKind::General && !c_star.is_empty() {
        return Err(Failure::Parse("--cstar is only meaningful for --kind general".into()));
    }
    let token = match kind {
        SlideKind::Single => MoveToken::SingleSlide { i, j, c, sign },
        SlideKind::Double => MoveToken::DoubleSlide { i, j, c, sign },
        SlideKind::General => MoveToken::GeneralSlide {
            i,
            j,
            path: SlidePath::new(c, c_star),
            sign,
        },
    };
    let moved = bp.apply_move(&token)?;
    out.push_str(&Document::from_bi(moved).print());
    Ok(EXIT_OK)
}

fn multicork(doc: &Document, n: Option<usize>) -> Run<MulticorkModel> {
    match n {
        Some(n) => Ok(mu(&body(doc)?.presentation(), n)?),
        None if doc.components.is_empty() => Err(Failure::Parse(
            "no `component:` blocks; pass --mu N to repeat the main presentation".into(),
        )),
        None => Ok(MulticorkModel::new(doc.components.clone())?),
    }
}

fn pinwheel_cmd(doc: &Document, n: Option<usize>, twist: Option<i64>, out: &mut String) -> Run<i32> {
    let pw = pinwheel(&multicork(doc, n)?)?;
    match twist {
        Some(j) => out.push_str(&Document::from_presentation(pinwheel_twist(&pw, j)).print()),
        None => {
            kv(out, "order", pw.order());
            for (i, span) in pw.spans().iter().enumerate() {
                let _ = writeln!(
                    out,
                    "span: {} gens {}-{} rels {}-{}",
                    i + 1,
                    span.generators.start + 1,
                    span.generators.end,
                    span.relators.start + 1,
                    span.relators.end
                );
            }
            out.push_str(&Document::from_presentation(pw.total().clone()).print());
        }
    }
    Ok(EXIT_OK)
}

fn encase_cmd(doc: &Document, out: &mut String) -> Run<i32> {
    let bp = bi(doc)?;
    let d = doc
        .decomposition
        .as_ref()
        .ok_or_else(|| Failure::Parse("encase needs `decomp:` lines".into()))?;
    let mut certs = CertificateMap::new();
    for line in &doc.certificates {
        let key = line
            .key
            .ok_or_else(|| Failure::Parse("encase certificates must be keyed `cert: i j : …`".into()))?;
        if certs.insert(key, line.certificate.clone()).is_some() {
            return Err(Failure::Parse(format!(
                "two certificates for b({}, {})",
                key.0 + 1,
                key.1 + 1
            )));
        }
    }
    let (result, script) = encase(bp, d, &certs)?;
    if script.fold(bp)? != result {
        return Err(Failure::Verify(
            "encasement script does not reproduce the result".into(),
        ));
    }
    kv(out, "status", "ok");
    out.push_str(&Document::from_bi(result).print());
    write_script(out, &script, bp.primary().clone(), bp.dual().clone());
    Ok(EXIT_OK)
}

fn write_script(out: &mut String, script: &crate::MoveScript, primary: crate::Alphabet, dual: crate::Alphabet) {
    kv(out, "script", script.len());
    let mut scope = Scope { primary, dual };
    for t in script.iter() {
        kv(out, "move", format_move(t, &scope));
        scope.step(t);
    }
}

fn presentation(doc: &Document) -> Run<Presentation> {
    match body(doc)? {
        Body::Presentation(p) => Ok(p.clone()),
        Body::Bi(_) => Err(Failure::Parse("this command needs a plain presentation".into())),
    }
}

fn scramble_cmd(doc: &Document, k: usize, g: &Global, out: &mut String) -> Run<i32> {
    let p = presentation(doc)?;
    let b = budget(g)?;
    let (q, inverse) = scramble(&p, k, b.rng_seed, b.conjugator_length_cap)?;
    let mut result = Document::from_presentation(q);
    result.script = inverse;
    out.push_str(&result.print());
    Ok(EXIT_OK)
}

fn trivialize(doc: &Document, g: &Global, out: &mut String) -> Run<i32> {
    let p = presentation(doc)?;
    let outcome = trivialization_search(&p, &budget(g)?)?;
    let status = if outcome.result.is_some() { "found" } else { "exhausted" };
    kv(out, "status", status);
    kv(out, "nodes_expanded", outcome.nodes_expanded);
    kv(out, "states_seen", outcome.states_seen);
    match outcome.result {
        Some(script) => {
            write_script(out, &script, p.alphabet().clone(), crate::Alphabet::default());
            Ok(EXIT_OK)
        }
        None => Ok(EXIT_BUDGET),
    }
}

fn certsearch(doc: &Document, g: &Global, out: &mut String) -> Run<i32> {
    let p = body(doc)?.presentation();
    let target = doc
        .target
        .as_ref()
        .ok_or_else(|| Failure::Parse("certsearch needs a `target:` line".into()))?;
    let outcome = certificate_search(&p, target, &budget(g)?)?;
    let status = if outcome.result.is_some() { "found" } else { "exhausted" };
    kv(out, "status", status);
    kv(out, "nodes_expanded", outcome.nodes_expanded);
    match outcome.result {
        Some(cert) => {
            kv(out, "factors", cert.factors.len());
            let text = format_certificate(&cert, p.alphabet());
            if text.is_empty() {
                out.push_str("cert:\n");
            } else {
                kv(out, "cert", text);
            }
            Ok(EXIT_OK)
        }
        None => Ok(EXIT_BUDGET),
    }
}
