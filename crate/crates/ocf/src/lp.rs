//! LP text format: a deterministic writer and a reference reader.
//!
//! The writer emits every column in the objective (zero coefficients
//! included) so that column order survives a round trip, prints numbers
//! with 17 significant digits, and records the objective constant in a
//! header comment, since common readers drop constants from the objective.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use ocf_core::milp::{Constraint, MilpModel, Relation, VarId, VarKind};

use crate::error::{Error, Result};

const WHAT: &str = "LP";
const WRAP: usize = 200;
const CONSTANT_TAG: &str = "objective constant:";
const KEYWORDS: &[&str] = &[
    "minimize", "minimum", "min", "maximize", "maximum", "max", "subject", "such", "st", "s.t.", "bounds", "bound",
    "binaries", "binary", "bin", "general", "generals", "gen", "end", "free", "inf", "infinity",
];

/// `%.17g`-style rendering: shortest of fixed or scientific notation with
/// 17 significant digits, trailing zeros removed.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s.to_owned()
        }
    };
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant), exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    }
}

/// Names must start with a letter or `_`, contain only ASCII letters,
/// digits, `_` and `.`, and not be a section keyword.
pub fn check_name(name: &str) -> Result<()> {
    let bad = |why: &str| Err(Error::Config(format!("name `{name}` is not LP-safe: {why}")));
    let mut chars = name.chars();
    match chars.next() {
        None => return bad("empty"),
        Some(c) if !(c.is_ascii_alphabetic() || c == '_') => return bad("must start with a letter or underscore"),
        _ => {}
    }
    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
        return bad("reserved character");
    }
    if name.len() > 255 {
        return bad("longer than 255 characters");
    }
    if KEYWORDS.contains(&name.to_ascii_lowercase().as_str()) {
        return bad("section keyword");
    }
    Ok(())
}

struct Wrapped<'a> {
    out: &'a mut String,
    col: usize,
}

impl Wrapped<'_> {
    fn push(&mut self, piece: &str) {
        if self.col + piece.len() > WRAP {
            self.out.push_str("\n   ");
            self.col = 3;
        }
        self.out.push_str(piece);
        self.col += piece.len();
    }
}

fn push_terms(w: &mut Wrapped<'_>, model: &MilpModel, terms: impl Iterator<Item = (VarId, f64)>) {
    for (v, c) in terms {
        let sign = if c.is_sign_negative() { '-' } else { '+' };
        w.push(&format!(" {sign} {} {}", format_number(c.abs()), model.variable(v).name));
    }
}

fn relation_text(rel: Relation) -> &'static str {
    match rel {
        Relation::Le => "<=",
        Relation::Eq => "=",
        Relation::Ge => ">=",
    }
}

/// LP text for `model`. Deterministic for a given model.
pub fn write_lp(model: &MilpModel) -> Result<String> {
    model.validate()?;
    if model.num_variables() == 0 {
        return Err(Error::Config("cannot write a model without variables".into()));
    }
    for v in model.variables() {
        check_name(&v.name)?;
    }
    for c in model.constraints() {
        check_name(&c.name)?;
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ {} variables, {} constraints",
        model.num_variables(),
        model.constraints().len()
    );
    let _ = writeln!(out, "\\ {CONSTANT_TAG} {}", format_number(model.objective_constant()));
    out.push_str("Minimize\n");
    {
        let mut w = Wrapped { out: &mut out, col: 0 };
        w.push(" obj:");
        push_terms(&mut w, model, model.objective().iter().enumerate().map(|(j, &c)| (VarId(j), c)));
    }
    out.push_str("\nSubject To\n");
    for row in model.constraints() {
        let mut w = Wrapped { out: &mut out, col: 0 };
        w.push(&format!(" {}:", row.name));
        if row.terms.is_empty() {
            w.push(&format!(" 0 {}", model.variables()[0].name));
        } else {
            push_terms(&mut w, model, row.terms.iter().copied());
        }
        w.push(&format!(" {} {}", relation_text(row.relation), format_number(row.rhs)));
        out.push('\n');
    }
    out.push_str("Bounds\n");
    for v in model.variables().iter().filter(|v| v.kind == VarKind::Continuous) {
        let line = match (v.lower.is_finite(), v.upper.is_finite()) {
            (false, false) => format!(" {} free", v.name),
            (true, false) => format!(" {} >= {}", v.name, format_number(v.lower)),
            _ => format!(" {} <= {} <= {}", format_number(v.lower), v.name, format_number(v.upper)),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("Binaries\n");
    {
        let mut w = Wrapped { out: &mut out, col: 0 };
        for v in model.variables().iter().filter(|v| v.kind == VarKind::Binary) {
            w.push(&format!(" {}", v.name));
        }
    }
    out.push_str("\nEnd\n");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Sign(f64),
    Colon,
    Rel(Relation),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize_line(text: &str, line: usize, out: &mut Vec<Token>) -> Result<()> {
    let bytes = text.as_bytes();
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k] as char;
        let col = k + 1;
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line, col });
        if c.is_ascii_whitespace() {
            k += 1;
        } else if c == '\\' {
            break;
        } else if c == ':' {
            push(out, Tok::Colon);
            k += 1;
        } else if c == '+' || c == '-' {
            push(out, Tok::Sign(if c == '-' { -1.0 } else { 1.0 }));
            k += 1;
        } else if c == '<' || c == '>' || c == '=' {
            let mut j = k + 1;
            while j < bytes.len() && matches!(bytes[j], b'<' | b'>' | b'=') {
                j += 1;
            }
            let rel = match &text[k..j] {
                "<=" | "=<" | "<" => Relation::Le,
                ">=" | "=>" | ">" => Relation::Ge,
                "=" => Relation::Eq,
                other => return Err(Error::parse(WHAT, line, col, format!("unknown operator `{other}`"))),
            };
            push(out, Tok::Rel(rel));
            k = j;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = k;
            while j < bytes.len() {
                let d = bytes[j];
                if d.is_ascii_digit() || d == b'.' {
                    j += 1;
                } else if (d == b'e' || d == b'E') && j + 1 < bytes.len() {
                    j += 1;
                    if matches!(bytes[j], b'+' | b'-') {
                        j += 1;
                    }
                } else {
                    break;
                }
            }
            let v: f64 = text[k..j]
                .parse()
                .map_err(|_| Error::parse(WHAT, line, col, format!("bad number `{}`", &text[k..j])))?;
            push(out, Tok::Num(v));
            k = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = k;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || matches!(bytes[j], b'_' | b'.')) {
                j += 1;
            }
            push(out, Tok::Name(text[k..j].to_owned()));
            k = j;
        } else {
            return Err(Error::parse(WHAT, line, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

fn section_of(lower: &str) -> Option<Section> {
    Some(match lower {
        "minimize" | "minimum" | "min" => Section::Objective,
        "subject to" | "such that" | "st" | "s.t." => Section::Constraints,
        "bounds" | "bound" => Section::Bounds,
        "binaries" | "binary" | "bin" => Section::Binaries,
        "end" => Section::End,
        _ => return None,
    })
}

struct RowDraft {
    name: String,
    terms: Vec<(String, f64)>,
    relation: Relation,
    rhs: f64,
}

#[derive(Default)]
struct Draft {
    order: Vec<String>,
    known: BTreeSet<String>,
    objective: BTreeMap<String, f64>,
    constant: f64,
    rows: Vec<RowDraft>,
    bounds: BTreeMap<String, (f64, f64)>,
    binaries: BTreeSet<String>,
}

impl Draft {
    fn touch(&mut self, name: &str) {
        if self.known.insert(name.to_owned()) {
            self.order.push(name.to_owned());
        }
    }
}

/// Linear expression `(+|-)? number? name ...`; returns the terms and the
/// sum of bare numbers.
fn parse_expr(tokens: &[Token], stop_at_rel: bool) -> Result<(Vec<(String, f64)>, f64, usize)> {
    let mut terms = Vec::new();
    let mut constant = 0.0;
    let mut k = 0;
    while k < tokens.len() {
        if stop_at_rel && matches!(tokens[k].tok, Tok::Rel(_)) {
            break;
        }
        let mut sign = 1.0;
        let mut saw_sign = false;
        while let Some(Tok::Sign(s)) = tokens.get(k).map(|t| &t.tok) {
            sign *= s;
            saw_sign = true;
            k += 1;
        }
        let t = tokens.get(k).ok_or_else(|| {
            let last = &tokens[tokens.len() - 1];
            Error::parse(WHAT, last.line, last.col, "expression ends after a sign")
        })?;
        if !saw_sign && !terms.is_empty() && matches!(t.tok, Tok::Num(_) | Tok::Name(_)) {
            return Err(Error::parse(WHAT, t.line, t.col, "missing operator between terms"));
        }
        match &t.tok {
            Tok::Num(v) => {
                if let Some(Token { tok: Tok::Name(n), .. }) = tokens.get(k + 1) {
                    terms.push((n.clone(), sign * v));
                    k += 2;
                } else {
                    constant += sign * v;
                    k += 1;
                }
            }
            Tok::Name(n) => {
                terms.push((n.clone(), sign));
                k += 1;
            }
            _ => return Err(Error::parse(WHAT, t.line, t.col, "expected a coefficient or a variable")),
        }
    }
    Ok((terms, constant, k))
}

fn signed_number(tokens: &[Token], at: usize) -> Option<(f64, usize)> {
    let mut k = at;
    let mut sign = 1.0;
    while let Some(Tok::Sign(s)) = tokens.get(k).map(|t| &t.tok) {
        sign *= s;
        k += 1;
    }
    match tokens.get(k).map(|t| &t.tok) {
        Some(Tok::Num(v)) => Some((sign * v, k + 1)),
        Some(Tok::Name(n)) if matches!(n.to_ascii_lowercase().as_str(), "inf" | "infinity") => {
            Some((sign * f64::INFINITY, k + 1))
        }
        _ => None,
    }
}

fn flush_objective(draft: &mut Draft, tokens: &mut Vec<Token>) -> Result<()> {
    let mut body: &[Token] = tokens;
    if let [Token { tok: Tok::Name(_), .. }, Token { tok: Tok::Colon, .. }, rest @ ..] = body {
        body = rest;
    }
    if !body.is_empty() {
        let (terms, constant, _) = parse_expr(body, false)?;
        draft.constant += constant;
        for (n, c) in terms {
            draft.touch(&n);
            *draft.objective.entry(n).or_insert(0.0) += c;
        }
    }
    tokens.clear();
    Ok(())
}

/// Consumes as many complete rows as `tokens` holds; leftovers stay.
fn take_rows(draft: &mut Draft, tokens: &mut Vec<Token>) -> Result<()> {
    loop {
        let mut body: &[Token] = tokens;
        let mut name = None;
        if let [Token { tok: Tok::Name(n), .. }, Token { tok: Tok::Colon, .. }, rest @ ..] = body {
            name = Some(n.clone());
            body = rest;
        }
        let Some(rel_at) = body.iter().position(|t| matches!(t.tok, Tok::Rel(_))) else {
            return Ok(());
        };
        let Some((rhs, after)) = signed_number(body, rel_at + 1) else {
            return Ok(());
        };
        let Tok::Rel(relation) = body[rel_at].tok else { unreachable!() };
        let (terms, constant, _) = if rel_at == 0 { (Vec::new(), 0.0, 0) } else { parse_expr(&body[..rel_at], true)? };
        for (n, _) in &terms {
            draft.touch(n);
        }
        let name = name.unwrap_or_else(|| format!("R{}", draft.rows.len() + 1));
        draft.rows.push(RowDraft {
            name,
            terms,
            relation,
            rhs: rhs - constant,
        });
        let consumed = tokens.len() - body.len() + after;
        tokens.drain(..consumed);
    }
}

fn parse_bound(draft: &mut Draft, toks: &[Token]) -> Result<()> {
    let err = |t: &Token, m: &str| Error::parse(WHAT, t.line, t.col, m.to_owned());
    let first = &toks[0];
    // `x free`
    if let [Token { tok: Tok::Name(n), .. }, Token { tok: Tok::Name(f), .. }] = toks {
        if f.eq_ignore_ascii_case("free") {
            draft.touch(n);
            draft.bounds.insert(n.clone(), (f64::NEG_INFINITY, f64::INFINITY));
            return Ok(());
        }
    }
    // `l <= x <= u`
    if let Some((lo, k)) = signed_number(toks, 0) {
        let (Some(Tok::Rel(Relation::Le)), Some(Tok::Name(n))) = (toks.get(k).map(|t| &t.tok), toks.get(k + 1).map(|t| &t.tok)) else {
            return Err(err(first, "expected `lower <= name`"));
        };
        let mut hi = draft.bounds.get(n).map_or(f64::INFINITY, |b| b.1);
        if k + 2 < toks.len() {
            if toks[k + 2].tok != Tok::Rel(Relation::Le) {
                return Err(err(&toks[k + 2], "expected `<=`"));
            }
            let (u, end) = signed_number(toks, k + 3).ok_or_else(|| err(&toks[k + 2], "expected an upper bound"))?;
            if end != toks.len() {
                return Err(err(&toks[end], "trailing tokens"));
            }
            hi = u;
        }
        draft.touch(n);
        draft.bounds.insert(n.clone(), (lo, hi));
        return Ok(());
    }
    // `x >= l`, `x <= u`, `x = v`
    if let [Token { tok: Tok::Name(n), .. }, Token { tok: Tok::Rel(rel), .. }, ..] = toks {
        let (v, end) = signed_number(toks, 2).ok_or_else(|| err(first, "expected a bound value"))?;
        if end != toks.len() {
            return Err(err(&toks[end], "trailing tokens"));
        }
        let cur = draft.bounds.get(n).copied().unwrap_or((0.0, f64::INFINITY));
        let b = match rel {
            Relation::Ge => (v, cur.1),
            Relation::Le => (cur.0, v),
            Relation::Eq => (v, v),
        };
        draft.touch(n);
        draft.bounds.insert(n.clone(), b);
        return Ok(());
    }
    Err(err(first, "unrecognized bound"))
}

/// Reference reader for the subset of LP the writer produces (plus common
/// spelling variants). Only minimization is accepted.
pub fn read_lp(text: &str) -> Result<MilpModel> {
    let mut draft = Draft::default();
    let mut section = Section::None;
    let mut pending: Vec<Token> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if let Some(c) = trimmed.strip_prefix('\\') {
            if let Some(v) = c.trim().strip_prefix(CONSTANT_TAG) {
                draft.constant += v
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(WHAT, line, 1, "bad objective constant"))?;
            }
            continue;
        }
        let lower = trimmed.to_ascii_lowercase();
        let lower = lower.split_whitespace().collect::<Vec<_>>().join(" ");
        if matches!(lower.as_str(), "maximize" | "maximum" | "max") {
            return Err(Error::parse(WHAT, line, 1, "only minimization models are supported"));
        }
        if matches!(lower.as_str(), "general" | "generals" | "gen" | "semi-continuous" | "sos") {
            return Err(Error::parse(WHAT, line, 1, format!("section `{trimmed}` is not supported")));
        }
        if let Some(next) = section_of(&lower) {
            match section {
                Section::Objective => flush_objective(&mut draft, &mut pending)?,
                Section::Constraints => {
                    take_rows(&mut draft, &mut pending)?;
                    if let Some(t) = pending.first() {
                        return Err(Error::parse(WHAT, t.line, t.col, "incomplete constraint"));
                    }
                }
                _ => {}
            }
            section = next;
            continue;
        }
        let mut toks = Vec::new();
        tokenize_line(raw, line, &mut toks)?;
        if toks.is_empty() {
            continue;
        }
        match section {
            Section::None => return Err(Error::parse(WHAT, line, 1, "content before the objective section")),
            Section::End => return Err(Error::parse(WHAT, line, 1, "content after `End`")),
            Section::Objective => pending.extend(toks),
            Section::Constraints => {
                pending.extend(toks);
                take_rows(&mut draft, &mut pending)?;
            }
            Section::Bounds => parse_bound(&mut draft, &toks)?,
            Section::Binaries => {
                for t in toks {
                    let Tok::Name(n) = t.tok else {
                        return Err(Error::parse(WHAT, t.line, t.col, "expected a variable name"));
                    };
                    draft.touch(&n);
                    draft.binaries.insert(n);
                }
            }
        }
    }
    if section != Section::End {
        return Err(Error::parse(WHAT, text.lines().count(), 1, "missing `End`"));
    }

    let mut model = MilpModel::new();
    let mut ids = BTreeMap::new();
    for name in &draft.order {
        let id = if draft.binaries.contains(name) {
            model.add_binary(name.clone())?
        } else {
            let (lo, hi) = draft.bounds.get(name).copied().unwrap_or((0.0, f64::INFINITY));
            model.add_continuous(name.clone(), lo, hi)?
        };
        ids.insert(name.clone(), id);
    }
    for (name, &c) in &draft.objective {
        model.set_objective(ids[name], c);
    }
    model.set_objective_constant(draft.constant);
    for row in draft.rows {
        let terms: Vec<(VarId, f64)> = row.terms.iter().map(|(n, c)| (ids[n], *c)).collect();
        model.add_constraint(row.name, terms, row.relation, row.rhs)?;
    }
    Ok(model)
}

/// Column-wise structural comparison used by round-trip checks. Returns a
/// description of the first difference.
pub fn first_difference(a: &MilpModel, b: &MilpModel) -> Option<String> {
    if a.variables() != b.variables() {
        let k = a.variables().iter().zip(b.variables()).position(|(x, y)| x != y);
        return Some(format!("variables differ (first at {k:?}, counts {} vs {})", a.num_variables(), b.num_variables()));
    }
    if a.objective() != b.objective() {
        return Some("objective coefficients differ".into());
    }
    if a.objective_constant() != b.objective_constant() {
        return Some(format!("objective constants {} vs {}", a.objective_constant(), b.objective_constant()));
    }
    if a.constraints().len() != b.constraints().len() {
        return Some(format!("{} vs {} rows", a.constraints().len(), b.constraints().len()));
    }
    for (x, y) in a.constraints().iter().zip(b.constraints()) {
        let same = |p: &Constraint, q: &Constraint| p.name == q.name && p.terms == q.terms && p.relation == q.relation && p.rhs == q.rhs;
        if !same(x, y) {
            return Some(format!("row {} differs", x.name));
        }
    }
    None
}
