//! Line-oriented text format for presentations and everything that acts on
//! them.
//!
//! ```text
//! # comment
//! gens: x y
//! duals: a b          # present only for bi-presentations
//! boundary: m         # dual boundary letters
//! rel: x y x^-1 | a   # one line per relator; dual word after `|`
//! target: y
//! decomp: 1 a= x b= y
//! cert: 1 1 : +2 c= x ; -1 c= 1
//! move: singleslide 1 2 c= x y^-1
//! group: Z2
//!   0 1
//!   1 0
//! component:
//! gens: u
//! rel: u
//! ```
//!
//! Words are whitespace-separated `name`, `name^k` or `name^-k` tokens; the
//! empty word is `1`. Indices are 1-based. Presentation sections come
//! first, then the other sections in any order, then `component:` blocks.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::corkcalc::{CertificateFactor, CommutatorDecomposition, NormalClosureCertificate};
use crate::error::ParseError;
use crate::presentation::{
    BiPresentation, FiniteGroup, HandlePair, MoveScript, MoveToken, Presentation, Side, SlidePath,
};
use crate::words::{is_valid_identifier, Alphabet, Letter, Word};

const MAX_EXPONENT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Presentation(Presentation),
    Bi(BiPresentation),
}

impl Body {
    /// The primary presentation.
    pub fn presentation(&self) -> Presentation {
        match self {
            Body::Presentation(p) => p.clone(),
            Body::Bi(bp) => bp.presentation(),
        }
    }

    fn alphabets(&self) -> (Alphabet, Alphabet) {
        match self {
            Body::Presentation(p) => (p.alphabet().clone(), Alphabet::default()),
            Body::Bi(bp) => (bp.primary().clone(), bp.dual().clone()),
        }
    }
}

/// A `cert:` line; keyed lines name the `b(i, j)` they certify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateLine {
    pub key: Option<(usize, usize)>,
    pub certificate: NormalClosureCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub body: Option<Body>,
    pub target: Option<Word>,
    pub decomposition: Option<CommutatorDecomposition>,
    pub certificates: Vec<CertificateLine>,
    pub script: MoveScript,
    pub groups: Vec<FiniteGroup>,
    pub components: Vec<Presentation>,
}

impl Document {
    pub fn from_presentation(p: Presentation) -> Self {
        Document {
            body: Some(Body::Presentation(p)),
            ..Default::default()
        }
    }

    pub fn from_bi(bp: BiPresentation) -> Self {
        Document {
            body: Some(Body::Bi(bp)),
            ..Default::default()
        }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser::default().run(text)
    }

    pub fn print(&self) -> String {
        let mut out = String::new();
        let (primary, dual) = match &self.body {
            Some(body) => {
                print_body(&mut out, body);
                body.alphabets()
            }
            None => Default::default(),
        };
        if let Some(t) = &self.target {
            line(&mut out, "target:", &primary.format_word(t));
        }
        if let Some(d) = &self.decomposition {
            for (i, pairs) in &d.entries {
                let mut text = (i + 1).to_string();
                for (a, b) in pairs {
                    let _ = write!(text, " a= {} b= {}", primary.format_word(a), primary.format_word(b));
                }
                line(&mut out, "decomp:", &text);
            }
        }
        for c in &self.certificates {
            let factors = format_certificate(&c.certificate, &primary);
            let text = match c.key {
                Some((i, j)) if factors.is_empty() => format!("{} {} :", i + 1, j + 1),
                Some((i, j)) => format!("{} {} : {factors}", i + 1, j + 1),
                None => factors,
            };
            line(&mut out, "cert:", &text);
        }
        let mut scope = Scope { primary, dual };
        for t in self.script.iter() {
            line(&mut out, "move:", &format_move(t, &scope));
            scope.step(t);
        }
        for g in &self.groups {
            line(&mut out, "group:", g.name());
            for row in g.table() {
                let cells: Vec<String> = row.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "  {}", cells.join(" "));
            }
        }
        for c in &self.components {
            out.push_str("component:\n");
            print_body(&mut out, &Body::Presentation(c.clone()));
        }
        out
    }
}

/// Factors as `+r c= w ; -s c= v`.
pub fn format_certificate(cert: &NormalClosureCertificate, alphabet: &Alphabet) -> String {
    let factors: Vec<String> = cert
        .factors
        .iter()
        .map(|f| {
            let sign = if f.sign < 0 { '-' } else { '+' };
            format!("{sign}{} c= {}", f.relator + 1, alphabet.format_word(&f.conjugator))
        })
        .collect();
    factors.join(" ; ")
}

fn line(out: &mut String, header: &str, text: &str) {
    if text.is_empty() {
        let _ = writeln!(out, "{header}");
    } else {
        let _ = writeln!(out, "{header} {text}");
    }
}

fn print_body(out: &mut String, body: &Body) {
    match body {
        Body::Presentation(p) => {
            line(out, "gens:", &p.alphabet().names().join(" "));
            for r in p.relators() {
                line(out, "rel:", &p.alphabet().format_word(r));
            }
        }
        Body::Bi(bp) => {
            line(out, "gens:", &bp.primary().names().join(" "));
            line(out, "duals:", &bp.dual().names().join(" "));
            if !bp.dual().boundary_names().is_empty() {
                line(out, "boundary:", &bp.dual().boundary_names().join(" "));
            }
            for pair in bp.pairs() {
                let text = format!(
                    "{} | {}",
                    bp.primary().format_word(&pair.relator),
                    bp.dual().format_word(&pair.dual_relator)
                );
                line(out, "rel:", &text);
            }
        }
    }
}

/// Alphabets in force at a given point of a move script.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    pub primary: Alphabet,
    pub dual: Alphabet,
}

impl Scope {
    /// Tracks the names added, removed or swapped by `t`.
    pub fn step(&mut self, t: &MoveToken) {
        match t {
            MoveToken::Stabilize | MoveToken::AddCancellingPairPrimary => {
                let name = self.primary.fresh_name("z", false);
                self.primary.push_generator(name);
            }
            MoveToken::AddCancellingPairDual => {
                let name = self.dual.fresh_name("d", true);
                self.dual.push_generator(name);
            }
            MoveToken::Destabilize { generator, side, .. } => {
                let alphabet = match side {
                    Side::Primary => &mut self.primary,
                    Side::Dual => &mut self.dual,
                };
                if *generator < alphabet.rank() {
                    alphabet.remove_generator(*generator);
                }
            }
            MoveToken::SwapGenerators { i, j } if *i < self.primary.rank() && *j < self.primary.rank() => {
                self.primary.swap_generators(*i, *j);
            }
            _ => {}
        }
    }
}

/// The one-line text form of a move (without the `move:` header).
pub fn format_move(t: &MoveToken, scope: &Scope) -> String {
    let word = |w: &Word| scope.primary.format_word(w);
    let sign = |s: i8| if s < 0 { " sign=-1" } else { "" };
    let kw = t.keyword();
    match t {
        MoveToken::InvertRelator { i } => format!("{kw} {}", i + 1),
        MoveToken::GeneratorInvert { g } => format!("{kw} {}", g + 1),
        MoveToken::MultiplyRelator { i, j, c, sign: s }
        | MoveToken::SingleSlide { i, j, c, sign: s }
        | MoveToken::DoubleSlide { i, j, c, sign: s } => {
            format!("{kw} {} {} c= {}{}", i + 1, j + 1, word(c), sign(*s))
        }
        MoveToken::GeneralSlide { i, j, path, sign: s } => format!(
            "{kw} {} {} c= {} cstar= {}{}",
            i + 1,
            j + 1,
            word(&path.c),
            scope.dual.format_word(&path.c_star),
            sign(*s)
        ),
        MoveToken::GeneratorMultiply { i, j, sign: s } => format!("{kw} {} {}{}", i + 1, j + 1, sign(*s)),
        MoveToken::SwapRelators { i, j } | MoveToken::SwapGenerators { i, j } => format!("{kw} {} {}", i + 1, j + 1),
        MoveToken::Destabilize {
            relator,
            generator,
            side,
        } => {
            let side = if *side == Side::Dual { " side=dual" } else { "" };
            format!("{kw} {} {}{side}", relator + 1, generator + 1)
        }
        MoveToken::Stabilize | MoveToken::AddCancellingPairPrimary | MoveToken::AddCancellingPairDual => kw.to_string(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Tok<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

fn tokenize(text: &str, line: usize) -> Vec<Tok<'_>> {
    let text = text.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (n, (byte, ch)) in text.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (true, Some((b, col))) => {
                out.push(Tok {
                    text: &text[b..byte],
                    line,
                    column: col,
                });
                start = None;
            }
            (false, None) => start = Some((byte, n + 1)),
            _ => {}
        }
    }
    if let Some((b, col)) = start {
        out.push(Tok {
            text: &text[b..],
            line,
            column: col,
        });
    }
    out
}

/// Parses a whole word; `1` alone is the empty word.
pub fn parse_word_str(text: &str, alphabet: &Alphabet) -> Result<Word, ParseError> {
    let toks = tokenize(text, 1);
    parse_word(&toks, alphabet)
}

fn parse_word(toks: &[Tok], alphabet: &Alphabet) -> Result<Word, ParseError> {
    if toks.is_empty() {
        return Ok(Word::identity());
    }
    if toks.len() == 1 && toks[0].text == "1" {
        return Ok(Word::identity());
    }
    let mut letters = Vec::new();
    for tok in toks {
        let (name, exp) = match tok.text.split_once('^') {
            Some((name, exp)) => {
                let value: i64 = exp
                    .parse()
                    .map_err(|_| tok.error(format!("malformed exponent `{exp}`")))?;
                if value == 0 {
                    return Err(tok.error("exponent must be nonzero"));
                }
                if value.unsigned_abs() > MAX_EXPONENT {
                    return Err(tok.error(format!("exponent {value} is too large")));
                }
                (name, value)
            }
            None => (tok.text, 1),
        };
        if name == "1" {
            return Err(tok.error("`1` must stand alone as the empty word"));
        }
        let code = alphabet
            .index_of(name)
            .ok_or_else(|| tok.error(format!("unknown identifier `{name}`")))?;
        let letter = Letter::new(code, exp < 0);
        letters.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
    }
    Ok(Word::reduce(letters))
}

fn parse_index(tok: &Tok, what: &str) -> Result<usize, ParseError> {
    match tok.text.parse::<usize>() {
        Ok(0) => Err(tok.error(format!("{what} indices are 1-based"))),
        Ok(n) => Ok(n - 1),
        Err(_) => Err(tok.error(format!("expected a {what} index, found `{}`", tok.text))),
    }
}

fn names<'a>(toks: &[Tok<'a>]) -> Result<Vec<&'a str>, ParseError> {
    for t in toks {
        if !is_valid_identifier(t.text) {
            return Err(t.error(format!("invalid identifier `{}`", t.text)));
        }
    }
    Ok(toks.iter().map(|t| t.text).collect())
}

/// Splits `c= x y sign=-1` style arguments into positional tokens and
/// keyed groups. `key=value` glued forms are accepted.
fn keyed<'a>(toks: &[Tok<'a>], keys: &[&str]) -> Result<(Vec<Tok<'a>>, Vec<(Tok<'a>, Vec<Tok<'a>>)>), ParseError> {
    let mut positional = Vec::new();
    let mut groups: Vec<(Tok<'a>, Vec<Tok<'a>>)> = Vec::new();
    for tok in toks {
        if let Some((key, rest)) = tok.text.split_once('=') {
            if !keys.contains(&key) {
                return Err(tok.error(format!("unexpected key `{key}=`")));
            }
            if groups.iter().any(|(k, _)| k.text == key) {
                return Err(tok.error(format!("key `{key}=` given twice")));
            }
            let key_tok = Tok { text: key, ..*tok };
            let mut values = Vec::new();
            if !rest.is_empty() {
                values.push(Tok {
                    text: rest,
                    line: tok.line,
                    column: tok.column + key.len() + 1,
                });
            }
            groups.push((key_tok, values));
        } else if let Some((_, values)) = groups.last_mut() {
            values.push(*tok);
        } else {
            positional.push(*tok);
        }
    }
    Ok((positional, groups))
}

fn parse_sign(key: &Tok, values: &[Tok]) -> Result<i8, ParseError> {
    match values {
        [v] if v.text == "1" || v.text == "+1" => Ok(1),
        [v] if v.text == "-1" => Ok(-1),
        _ => Err(key.error("sign must be 1 or -1")),
    }
}

/// Parses a move (keyword and arguments) against the alphabets in `scope`.
fn parse_move(toks: &[Tok], header: Tok, scope: &Scope) -> Result<MoveToken, ParseError> {
    let Some((kw, rest)) = toks.split_first() else {
        return Err(header.error("missing move keyword"));
    };
    let keys: &[&str] = match kw.text {
        "multiply" | "singleslide" | "doubleslide" => &["c", "cstar", "sign"],
        "slide" => &["c", "cstar", "sign"],
        "genmultiply" => &["sign"],
        "destabilize" => &["side"],
        _ => &[],
    };
    let (pos, groups) = keyed(rest, keys)?;
    let arity = match kw.text {
        "stabilize" | "addpair" | "adddualpair" => 0,
        "invert" | "geninvert" => 1,
        "multiply" | "genmultiply" | "destabilize" | "singleslide" | "doubleslide" | "slide" | "swaprel"
        | "swapgen" => 2,
        other => return Err(kw.error(format!("unknown move `{other}`"))),
    };
    if pos.len() != arity {
        let at = pos.get(arity).copied().unwrap_or(*kw);
        return Err(at.error(format!(
            "`{}` takes {arity} index arguments, found {}",
            kw.text,
            pos.len()
        )));
    }
    let what = if matches!(kw.text, "geninvert" | "genmultiply" | "swapgen") {
        "generator"
    } else {
        "relator"
    };
    let idx: Vec<usize> = pos.iter().map(|t| parse_index(t, what)).collect::<Result<_, _>>()?;
    let group = |key: &str| groups.iter().find(|(k, _)| k.text == key);
    let sign = match group("sign") {
        Some((k, v)) => parse_sign(k, v)?,
        None => 1,
    };
    let c = match group("c") {
        Some((_, v)) => parse_word(v, &scope.primary)?,
        None => Word::identity(),
    };
    if !scope.primary.covers_generators(&c) {
        return Err(kw.error("conjugator must use generators only"));
    }
    let c_star = match group("cstar") {
        Some((_, v)) => parse_word(v, &scope.dual)?,
        None => Word::identity(),
    };
    if kw.text != "slide" && !c_star.is_empty() {
        let (k, _) = group("cstar").expect("nonempty cstar was given");
        return Err(k.error(format!("`{}` has a trivial dual path; use `slide` for cstar", kw.text)));
    }
    let token = match kw.text {
        "invert" => MoveToken::InvertRelator { i: idx[0] },
        "geninvert" => MoveToken::GeneratorInvert { g: idx[0] },
        "multiply" => MoveToken::MultiplyRelator {
            i: idx[0],
            j: idx[1],
            c,
            sign,
        },
        "genmultiply" => MoveToken::GeneratorMultiply {
            i: idx[0],
            j: idx[1],
            sign,
        },
        "singleslide" => MoveToken::SingleSlide {
            i: idx[0],
            j: idx[1],
            c,
            sign,
        },
        "doubleslide" => MoveToken::DoubleSlide {
            i: idx[0],
            j: idx[1],
            c,
            sign,
        },
        "slide" => MoveToken::GeneralSlide {
            i: idx[0],
            j: idx[1],
            path: SlidePath::new(c, c_star),
            sign,
        },
        "swaprel" => MoveToken::SwapRelators { i: idx[0], j: idx[1] },
        "swapgen" => MoveToken::SwapGenerators { i: idx[0], j: idx[1] },
        "stabilize" => MoveToken::Stabilize,
        "addpair" => MoveToken::AddCancellingPairPrimary,
        "adddualpair" => MoveToken::AddCancellingPairDual,
        "destabilize" => {
            let side = match group("side") {
                None => Side::Primary,
                Some((_, v)) if v.len() == 1 && v[0].text == "primary" => Side::Primary,
                Some((_, v)) if v.len() == 1 && v[0].text == "dual" => Side::Dual,
                Some((k, _)) => return Err(k.error("side must be `primary` or `dual`")),
            };
            MoveToken::Destabilize {
                relator: idx[0],
                generator: idx[1],
                side,
            }
        }
        _ => unreachable!("keyword checked above"),
    };
    if let Some((i, j)) = match &token {
        MoveToken::MultiplyRelator { i, j, .. }
        | MoveToken::GeneratorMultiply { i, j, .. }
        | MoveToken::SingleSlide { i, j, .. }
        | MoveToken::DoubleSlide { i, j, .. }
        | MoveToken::GeneralSlide { i, j, .. }
        | MoveToken::SwapRelators { i, j }
        | MoveToken::SwapGenerators { i, j } => Some((*i, *j)),
        _ => None,
    } {
        if i == j {
            return Err(pos[1].error("the two indices must differ"));
        }
    }
    Ok(token)
}

/// Parses one move line body, e.g. `multiply 1 2 c= x sign=-1`.
pub fn parse_move_str(text: &str, scope: &Scope) -> Result<MoveToken, ParseError> {
    let toks = tokenize(text, 1);
    parse_move(
        &toks,
        Tok {
            text: "",
            line: 1,
            column: 1,
        },
        scope,
    )
}

#[derive(Default)]
struct BodyDraft<'a> {
    header: Option<Tok<'a>>,
    gens: Option<Alphabet>,
    duals: Option<Vec<String>>,
    boundary: Option<Vec<String>>,
    dual_alphabet: Option<Alphabet>,
    relators: Vec<Word>,
    dual_relators: Vec<Option<Word>>,
}

impl<'a> BodyDraft<'a> {
    fn dual(&mut self, at: Tok) -> Result<Option<&Alphabet>, ParseError> {
        if self.dual_alphabet.is_none() && (self.duals.is_some() || self.boundary.is_some()) {
            let names = self.duals.clone().unwrap_or_default();
            let boundary = self.boundary.clone().unwrap_or_default();
            let alphabet = Alphabet::with_boundary(names, boundary).map_err(|e| at.error(e.to_string()))?;
            self.dual_alphabet = Some(alphabet);
        }
        Ok(self.dual_alphabet.as_ref())
    }

    fn finish(mut self) -> Result<Option<Body>, ParseError> {
        let Some(header) = self.header else {
            return Ok(None);
        };
        let Some(gens) = self.gens.take() else {
            return Err(header.error("missing `gens:` line"));
        };
        if self.duals.is_none() && self.boundary.is_some() {
            return Err(header.error("`boundary:` needs a `duals:` line"));
        }
        if self.duals.is_none() {
            let p = Presentation::new(gens, self.relators).map_err(|e| header.error(e.to_string()))?;
            return Ok(Some(Body::Presentation(p)));
        }
        let dual = self.dual(header)?.cloned().unwrap_or_default();
        let pairs = self
            .relators
            .into_iter()
            .zip(self.dual_relators)
            .map(|(r, d)| HandlePair::new(r, d.unwrap_or_default()))
            .collect();
        let bp = BiPresentation::new(gens, dual, pairs).map_err(|e| header.error(e.to_string()))?;
        Ok(Some(Body::Bi(bp)))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stage {
    Body,
    Sections,
    Component,
}

struct GroupDraft<'a> {
    header: Tok<'a>,
    name: String,
    rows: Vec<Vec<usize>>,
}

struct Parser<'a> {
    doc: Document,
    stage: Stage,
    body: BodyDraft<'a>,
    component: Option<BodyDraft<'a>>,
    scope: Option<Scope>,
    group: Option<GroupDraft<'a>>,
    decomp: BTreeMap<usize, Vec<(Word, Word)>>,
    has_decomp: bool,
}

impl Default for Parser<'_> {
    fn default() -> Self {
        Parser {
            doc: Document::default(),
            stage: Stage::Body,
            body: BodyDraft::default(),
            component: None,
            scope: None,
            group: None,
            decomp: BTreeMap::new(),
            has_decomp: false,
        }
    }
}

impl<'a> Parser<'a> {
    fn run(mut self, text: &'a str) -> Result<Document, ParseError> {
        for (n, raw) in text.lines().enumerate() {
            let toks = tokenize(raw, n + 1);
            let Some((head, rest)) = toks.split_first() else {
                continue;
            };
            if self.group.is_some() && head.text.parse::<usize>().is_ok() {
                self.group_row(&toks)?;
                continue;
            }
            self.close_group()?;
            let Some(name) = head.text.strip_suffix(':') else {
                return Err(head.error(format!("expected a section header, found `{}`", head.text)));
            };
            match name {
                "gens" | "duals" | "boundary" | "rel" => self.body_line(name, *head, rest)?,
                "component" => {
                    if let Some(t) = rest.first() {
                        return Err(t.error("`component:` takes no arguments"));
                    }
                    self.end_body()?;
                    self.close_component()?;
                    self.stage = Stage::Component;
                    self.component = Some(BodyDraft {
                        header: Some(*head),
                        ..Default::default()
                    });
                }
                "target" | "decomp" | "cert" | "move" | "group" => {
                    if self.stage == Stage::Component {
                        return Err(head.error(format!("`{name}:` must come before `component:` blocks")));
                    }
                    self.end_body()?;
                    self.section(name, *head, rest)?;
                }
                other => return Err(head.error(format!("unknown section `{other}:`"))),
            }
        }
        self.close_group()?;
        self.end_body()?;
        self.close_component()?;
        if self.has_decomp {
            self.doc.decomposition = Some(CommutatorDecomposition::new(std::mem::take(&mut self.decomp)));
        }
        Ok(self.doc)
    }

    fn end_body(&mut self) -> Result<(), ParseError> {
        if self.stage == Stage::Body {
            self.doc.body = std::mem::take(&mut self.body).finish()?;
            self.stage = Stage::Sections;
        }
        Ok(())
    }

    fn close_component(&mut self) -> Result<(), ParseError> {
        if let Some(draft) = self.component.take() {
            let header = draft.header.expect("component drafts carry their header");
            match draft.finish()? {
                Some(Body::Presentation(p)) => self.doc.components.push(p),
                Some(Body::Bi(_)) => return Err(header.error("components cannot carry dual relators")),
                None => unreachable!("component header is set"),
            }
        }
        Ok(())
    }

    fn body_line(&mut self, name: &str, head: Tok<'a>, rest: &[Tok<'a>]) -> Result<(), ParseError> {
        let draft = match self.stage {
            Stage::Body => &mut self.body,
            Stage::Component => self.component.as_mut().expect("component stage has a draft"),
            Stage::Sections => {
                return Err(head.error(format!("`{name}:` must come before the other sections")));
            }
        };
        draft.header.get_or_insert(head);
        let duplicate = || head.error(format!("duplicate `{name}:` line"));
        let before_rel = || head.error(format!("`{name}:` must come before `rel:` lines"));
        match name {
            "gens" => {
                if draft.gens.is_some() {
                    return Err(duplicate());
                }
                if !draft.relators.is_empty() {
                    return Err(before_rel());
                }
                let alphabet = Alphabet::new(names(rest)?).map_err(|e| head.error(e.to_string()))?;
                draft.gens = Some(alphabet);
            }
            "duals" | "boundary" => {
                if !draft.relators.is_empty() {
                    return Err(before_rel());
                }
                let slot = if name == "duals" {
                    &mut draft.duals
                } else {
                    &mut draft.boundary
                };
                if slot.is_some() {
                    return Err(duplicate());
                }
                *slot = Some(names(rest)?.into_iter().map(String::from).collect());
            }
            _ => {
                let Some(gens) = draft.gens.clone() else {
                    return Err(head.error("`rel:` before `gens:`"));
                };
                let bar = rest.iter().position(|t| t.text == "|");
                let (left, right) = match bar {
                    Some(b) => (&rest[..b], Some(&rest[b + 1..])),
                    None => (rest, None),
                };
                let relator = parse_word(left, &gens)?;
                let dual = match (right, draft.duals.is_some()) {
                    (Some(words), true) => {
                        let alphabet = draft.dual(head)?.expect("duals declared");
                        Some(parse_word(words, alphabet)?)
                    }
                    (Some(_), false) => {
                        return Err(rest[bar.unwrap_or(0)].error("dual relator given without a `duals:` line"));
                    }
                    (None, true) => return Err(head.error("missing `| dual word` on a bi-presentation relator")),
                    (None, false) => None,
                };
                draft.relators.push(relator);
                draft.dual_relators.push(dual);
            }
        }
        Ok(())
    }

    fn primary(&self) -> Alphabet {
        self.doc.body.as_ref().map(|b| b.alphabets().0).unwrap_or_default()
    }

    fn section(&mut self, name: &str, head: Tok<'a>, rest: &[Tok<'a>]) -> Result<(), ParseError> {
        match name {
            "target" => {
                if self.doc.target.is_some() {
                    return Err(head.error("duplicate `target:` line"));
                }
                self.doc.target = Some(parse_word(rest, &self.primary())?);
            }
            "decomp" => {
                let Some((first, pairs)) = rest.split_first() else {
                    return Err(head.error("missing relator index"));
                };
                let i = parse_index(first, "relator")?;
                if self.decomp.contains_key(&i) {
                    return Err(first.error(format!("relator {} decomposed twice", i + 1)));
                }
                let primary = self.primary();
                let mut list = Vec::new();
                for chunk in split_pairs(pairs)? {
                    let (_, a, _, b) = chunk;
                    let a = parse_word(&a, &primary)?;
                    let b = parse_word(&b, &primary)?;
                    list.push((a, b));
                }
                self.decomp.insert(i, list);
                self.has_decomp = true;
            }
            "cert" => {
                let colon = rest.iter().position(|t| t.text == ":");
                let (key, factors) = match colon {
                    Some(c) => {
                        if c != 2 {
                            return Err(rest[c].error("expected `i j :` before the factors"));
                        }
                        let i = parse_index(&rest[0], "relator")?;
                        let j = parse_index(&rest[1], "commutator")?;
                        (Some((i, j)), &rest[3..])
                    }
                    None => (None, rest),
                };
                let primary = self.primary();
                let mut list = Vec::new();
                for chunk in factors.split(|t| t.text == ";").filter(|_| !factors.is_empty()) {
                    let Some((lead, tail)) = chunk.split_first() else {
                        let at = factors.first().copied().unwrap_or(head);
                        return Err(at.error("empty certificate factor"));
                    };
                    let (sign, digits) = match lead.text.split_at(lead.text.len().min(1)) {
                        ("+", d) => (1, d),
                        ("-", d) => (-1, d),
                        _ => return Err(lead.error("factor must start with `+r` or `-r`")),
                    };
                    let relator = parse_index(&Tok { text: digits, ..*lead }, "relator")?;
                    let conjugator = match tail.split_first() {
                        None => Word::identity(),
                        Some((k, v)) if k.text == "c=" => parse_word(v, &primary)?,
                        Some((k, _)) => match k.text.strip_prefix("c=") {
                            Some(glued) if !glued.is_empty() => {
                                let mut toks = vec![Tok {
                                    text: glued,
                                    column: k.column + 2,
                                    ..*k
                                }];
                                toks.extend_from_slice(&tail[1..]);
                                parse_word(&toks, &primary)?
                            }
                            _ => return Err(k.error("expected `c=`")),
                        },
                    };
                    list.push(CertificateFactor {
                        sign,
                        relator,
                        conjugator,
                    });
                }
                self.doc.certificates.push(CertificateLine {
                    key,
                    certificate: NormalClosureCertificate::new(list),
                });
            }
            "move" => {
                if self.scope.is_none() {
                    let (primary, dual) = self.doc.body.as_ref().map(Body::alphabets).unwrap_or_default();
                    self.scope = Some(Scope { primary, dual });
                }
                let scope = self.scope.as_mut().expect("scope set above");
                let token = parse_move(rest, head, scope)?;
                scope.step(&token);
                self.doc.script.push(token);
            }
            _ => {
                let [name] = rest else {
                    return Err(head.error("`group:` takes exactly one name"));
                };
                if !name.text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(name.error(format!("invalid group name `{}`", name.text)));
                }
                self.group = Some(GroupDraft {
                    header: head,
                    name: name.text.to_string(),
                    rows: Vec::new(),
                });
            }
        }
        Ok(())
    }

    fn group_row(&mut self, toks: &[Tok]) -> Result<(), ParseError> {
        let group = self.group.as_mut().expect("called inside a group");
        let row = toks
            .iter()
            .map(|t| {
                t.text
                    .parse::<usize>()
                    .map_err(|_| t.error(format!("expected an element index, found `{}`", t.text)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        group.rows.push(row);
        Ok(())
    }

    fn close_group(&mut self) -> Result<(), ParseError> {
        if let Some(g) = self.group.take() {
            let table = FiniteGroup::from_table(g.name, g.rows).map_err(|e| g.header.error(e.to_string()))?;
            self.doc.groups.push(table);
        }
        Ok(())
    }
}

type PairChunk<'a> = (Tok<'a>, Vec<Tok<'a>>, Tok<'a>, Vec<Tok<'a>>);

/// Splits `a= w b= w a= w b= w …` into word pairs.
fn split_pairs<'a>(toks: &[Tok<'a>]) -> Result<Vec<PairChunk<'a>>, ParseError> {
    let mut groups: Vec<(Tok<'a>, Vec<Tok<'a>>)> = Vec::new();
    for tok in toks {
        match tok.text.split_once('=') {
            Some((key @ ("a" | "b"), rest)) => {
                let mut values = Vec::new();
                if !rest.is_empty() {
                    values.push(Tok {
                        text: rest,
                        line: tok.line,
                        column: tok.column + 2,
                    });
                }
                groups.push((Tok { text: key, ..*tok }, values));
            }
            Some(_) => return Err(tok.error(format!("unexpected key in `{}`", tok.text))),
            None => match groups.last_mut() {
                Some((_, values)) => values.push(*tok),
                None => return Err(tok.error("expected `a=`")),
            },
        }
    }
    let mut out = Vec::new();
    let mut it = groups.into_iter();
    while let Some((ka, a)) = it.next() {
        if ka.text != "a" {
            return Err(ka.error("expected `a=`"));
        }
        let Some((kb, b)) = it.next() else {
            return Err(ka.error("`a=` without a matching `b=`"));
        };
        if kb.text != "b" {
            return Err(kb.error("expected `b=`"));
        }
        out.push((ka, a, kb, b));
    }
    Ok(out)
}
