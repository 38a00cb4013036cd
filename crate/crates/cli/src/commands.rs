//! Subcommand implementations. Each returns the full stdout text and an exit
//! code so that output stays byte-deterministic and testable.

use std::fmt::Write as _;
use std::io::Read as _;
use std::time::Duration;

use serde_json::{json, Value};
use thiserror::Error;

use sepsys_core::bits::fmt_set;
use sepsys_core::bounds::{self, BoundsError};
use sepsys_core::construct::{self, ConstructError};
use sepsys_core::family::FamilyError;
use sepsys_core::search::{self, Existence, SearchError, SearchOptions, MAX_NICE_GROUND};
use sepsys_core::verify::{self, VerifyError, Witness};
use sepsys_core::{Family, Outcome, Property, SymmetryGroup};

use crate::format::{
    emit_document, parse_family, FamilyDocument, Format, FormatError, Parsed, Role,
};
use crate::{GroupArg, InputArgs, KindArg, ProblemArg, PropertyArg, SearchArgs};

pub const EXIT_FAIL: u8 = 1;
const TABLE_MAX_N: u64 = 200;
const TABLE_MAX_CHECK: u64 = 12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Input { path: String, source: FormatError },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("self-verification failed: {0}")]
    SelfCheck(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::SelfCheck(_) => 3,
            _ => 2,
        }
    }
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Usage(e.to_string())
            }
        }
    )*};
}
usage_from!(
    ConstructError,
    SearchError,
    BoundsError,
    VerifyError,
    FamilyError
);

pub struct Report {
    pub text: String,
    pub code: u8,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, code: 0 }
    }
}

fn read_input(input: &InputArgs) -> Result<Parsed, CliError> {
    let (path, text) = match input.input.as_deref() {
        Some(p) if p.as_os_str() != "-" => {
            let path = p.display().to_string();
            match std::fs::read_to_string(p) {
                Ok(t) => (path, t),
                Err(source) => return Err(CliError::Io { path, source }),
            }
        }
        _ => {
            let mut t = String::new();
            std::io::stdin()
                .read_to_string(&mut t)
                .map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
            ("<stdin>".into(), t)
        }
    };
    parse_family(&text).map_err(|source| CliError::Input { path, source })
}

fn to_json(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values serialize")
}

fn doc_value(doc: &FamilyDocument) -> Value {
    serde_json::to_value(doc).expect("documents serialize")
}

fn describe_witness(f: &Family, property: Property, index: usize, w: &Witness) -> String {
    match (property, w) {
        (Property::Nice(_), Witness::Separator(s)) => {
            format!("member {index} {}: {s}", fmt_set(f.member(index)))
        }
        (_, Witness::Separator(s)) => format!(
            "element {index}: witness sets {}, containing it {}",
            fmt_set(s.separator),
            fmt_set(s.key)
        ),
        (_, Witness::Signature(s)) => format!("element {index}: signature {}", fmt_set(*s)),
        (_, Witness::Subfamily(sets)) => {
            let set = sets.iter().fold(0u64, |a, &i| a | 1 << i);
            format!("element {index}: intersection of sets {}", fmt_set(set))
        }
    }
}

fn run_property(
    f: &Family,
    property: PropertyArg,
    k: usize,
) -> Result<(Property, Outcome), CliError> {
    Ok(match property {
        PropertyArg::Separating => (Property::Separating, verify::is_separating(f)),
        PropertyArg::Completely => (
            Property::CompletelySeparating,
            verify::is_completely_separating(f),
        ),
        PropertyArg::Hcs => (
            Property::HyperCompletely(k),
            verify::is_k_hypercompletely_separating(f, k)?,
        ),
        PropertyArg::Hs => (
            Property::HyperSeparating(k),
            verify::is_k_hyperseparating(f, k)?,
        ),
        PropertyArg::Nice => (Property::Nice(k), verify::is_nice(f, k)?),
    })
}

/// Runs a property check whose certificate must also pass the independent recheck.
fn checked(f: &Family, property: PropertyArg, k: usize) -> Result<(Property, Outcome), CliError> {
    let (p, outcome) = run_property(f, property, k)?;
    if let Outcome::Holds(cert) = &outcome {
        if !verify::recheck_certificate(f, cert) {
            return Err(CliError::SelfCheck(format!(
                "certificate for {p} did not recheck"
            )));
        }
    }
    Ok((p, outcome))
}

pub fn verify(
    property: PropertyArg,
    k: usize,
    input: &InputArgs,
    format: Format,
) -> Result<Report, CliError> {
    let parsed = read_input(input)?;
    let f = &parsed.family;
    let (p, outcome) = checked(f, property, k)?;

    let mut lines = Vec::new();
    let mut supplied_ok = true;
    if property == PropertyArg::Nice {
        for (i, w) in &parsed.witnesses {
            let ok = verify::recheck_separator(f, *i, w, k);
            supplied_ok &= ok;
            lines.push(format!(
                "supplied witness for member {i}: {w}: {}",
                if ok { "ok" } else { "rejected" }
            ));
        }
    }
    let (holds, detail) = match &outcome {
        Outcome::Holds(cert) => (
            true,
            cert.witnesses
                .iter()
                .enumerate()
                .map(|(i, w)| describe_witness(f, p, i, w))
                .collect::<Vec<_>>(),
        ),
        Outcome::Fails(c) => (false, vec![c.to_string()]),
    };
    let code = if holds && supplied_ok { 0 } else { EXIT_FAIL };
    let text = match format {
        Format::Json => to_json(&json!({
            "property": p.to_string(),
            "holds": holds,
            "certificate": if holds { json!(detail) } else { Value::Null },
            "counterexample": if holds { Value::Null } else { json!(detail[0]) },
            "supplied_witnesses": lines,
        })),
        Format::Text => {
            let mut out = if holds {
                format!("PASS {p}")
            } else {
                format!("FAIL {p}: {}", detail[0])
            };
            let shown = if holds { &detail[..] } else { &[] };
            for l in shown.iter().chain(&lines) {
                let _ = write!(out, "\n  {l}");
            }
            out
        }
    };
    Ok(Report { text, code })
}

fn require(v: Option<usize>, flag: &str, kind: &str) -> Result<usize, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for {kind}")))
}

pub fn construct(
    kind: KindArg,
    n: Option<usize>,
    m: Option<usize>,
    k: usize,
    format: Format,
) -> Result<Report, CliError> {
    let (family, property, k, expected, role) = match kind {
        KindArg::Binary => {
            let n = require(n, "n", "binary")?;
            let f = construct::binary_separating(n)?;
            (
                f,
                PropertyArg::Separating,
                k,
                bounds::separating_min(n as u64)?,
                Role::Primal,
            )
        }
        KindArg::Spencer => {
            let n = require(n, "n", "spencer")?;
            let f = construct::spencer_completely_separating(n)?;
            (
                f,
                PropertyArg::Completely,
                k,
                bounds::spencer_min(n as u64)?,
                Role::Primal,
            )
        }
        KindArg::Hcs => {
            let n = require(n, "n", "hcs")?;
            let f = construct::k_hcs_minimal(n, k)?;
            (
                f,
                PropertyArg::Hcs,
                k,
                bounds::min_m_hcs(n as u64, k as u64)?,
                Role::Primal,
            )
        }
        KindArg::Hs2 => {
            if k != 2 {
                return Err(CliError::Usage(format!(
                    "hs2 is only defined for k = 2, got {k}"
                )));
            }
            let n = require(n, "n", "hs2")?;
            let f = construct::hyperseparating_minimal_2(n)?;
            (
                f,
                PropertyArg::Hs,
                2,
                bounds::f2_exact(n as u64)?,
                Role::Primal,
            )
        }
        KindArg::NiceSmall => {
            let m = require(m, "m", "nice-small")?;
            let f = construct::nice_small_m(m)?;
            (f, PropertyArg::Nice, 2, 2 * m as u64, Role::Dual)
        }
    };
    if family.len() as u64 != expected {
        return Err(CliError::SelfCheck(format!(
            "construction has {} members, expected {expected}",
            family.len()
        )));
    }
    let (p, outcome) = checked(&family, property, k)?;
    if let Outcome::Fails(c) = outcome {
        return Err(CliError::SelfCheck(format!("construction is not {p}: {c}")));
    }
    log::info!("constructed {p} family of size {expected}");

    let mut doc = FamilyDocument::from_family(&family).with_role(role);
    if role == Role::Dual {
        let mut ws = Vec::with_capacity(family.len());
        for i in 0..family.len() {
            let w = verify::find_separator(&family, i, k)?
                .ok_or_else(|| CliError::SelfCheck(format!("member {i} lost its separator")))?;
            ws.push((i, w));
        }
        doc = doc.with_witnesses(&ws);
    }
    Ok(Report::ok(emit_document(&doc, format)))
}

pub fn bounds(n: u64, k: u64, format: Format) -> Result<Report, CliError> {
    let b = bounds::f_bounds(n, k)?;
    let text = match format {
        Format::Json => to_json(&json!({
            "n": n,
            "k": k,
            "lower": b.lower,
            "upper": b.upper,
            "lower_source": b.lower_source.to_string(),
            "lower_clamped": b.lower_clamped,
        })),
        Format::Text => {
            let clamp = if b.lower_clamped { ", clamped" } else { "" };
            format!(
                "{} ≤ f({n},{k}) ≤ {} [{}{clamp}]",
                b.lower, b.upper, b.lower_source
            )
        }
    };
    Ok(Report::ok(text))
}

fn options(s: &SearchArgs) -> Result<SearchOptions, CliError> {
    if s.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    Ok(SearchOptions {
        budget: s.budget_ms.map(Duration::from_millis),
        threads: s.threads,
        symmetry: !s.no_symmetry,
        ..SearchOptions::default()
    })
}

fn status(exhausted: bool) -> &'static str {
    if exhausted {
        "exhausted"
    } else {
        "budget expired"
    }
}

/// Assembles a search report: a headline, detail lines and an optional family.
fn search_output(
    format: Format,
    headline: String,
    mut fields: serde_json::Map<String, Value>,
    details: Vec<String>,
    example: Option<FamilyDocument>,
) -> String {
    match format {
        Format::Json => {
            fields.insert("summary".into(), json!(headline));
            if !details.is_empty() {
                fields.insert("details".into(), json!(details));
            }
            if let Some(doc) = &example {
                fields.insert("example".into(), doc_value(doc));
            }
            to_json(&Value::Object(fields))
        }
        Format::Text => {
            let mut out = headline;
            for d in details {
                let _ = write!(out, "\n  {d}");
            }
            if let Some(doc) = &example {
                let _ = write!(out, "\n{}", emit_document(doc, Format::Text));
            }
            out
        }
    }
}

fn fields(pairs: &[(&str, Value)]) -> serde_json::Map<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

pub fn search(
    problem: ProblemArg,
    m: Option<usize>,
    n: Option<usize>,
    k: usize,
    s: &SearchArgs,
    format: Format,
) -> Result<Report, CliError> {
    let opts = options(s)?;
    let text = match problem {
        ProblemArg::G => {
            let m = require(m, "m", "g")?;
            let r = search::max_nice_size(m, k, &opts)?;
            let mut details = vec![format!("nodes: {}", r.nodes_visited)];
            if k >= 3 {
                details.push("no published reference value for k >= 3".into());
            }
            search_output(
                format,
                format!("g({m},{k}) = {} ({})", r.best, status(r.exhausted)),
                fields(&[
                    ("problem", json!("g")),
                    ("m", json!(m)),
                    ("k", json!(k)),
                    ("value", json!(r.best)),
                    ("exhausted", json!(r.exhausted)),
                    ("nodes", json!(r.nodes_visited)),
                ]),
                details,
                Some(FamilyDocument::from_family(&r.example).with_role(Role::Dual)),
            )
        }
        ProblemArg::Exists => {
            let m = require(m, "m", "exists")?;
            let n = require(n, "n", "exists")?;
            let r = search::exists_nice_of_size(m, k, n, &opts)?;
            let (word, example) = match r.outcome {
                Existence::Found(f) => (
                    "found",
                    Some(FamilyDocument::from_family(&f).with_role(Role::Dual)),
                ),
                Existence::Absent => ("absent (exhausted)", None),
                Existence::BudgetExhausted => ("unknown (budget expired)", None),
            };
            search_output(
                format,
                format!("exists(m={m},k={k},n={n}) = {word}"),
                fields(&[
                    ("problem", json!("exists")),
                    ("m", json!(m)),
                    ("n", json!(n)),
                    ("k", json!(k)),
                    ("outcome", json!(word)),
                    ("nodes", json!(r.nodes_visited)),
                ]),
                vec![format!("nodes: {}", r.nodes_visited)],
                example,
            )
        }
        ProblemArg::MinM => {
            let n = require(n, "n", "min-m")?;
            let m_max = m.unwrap_or(MAX_NICE_GROUND);
            let r = search::min_m_hyperseparating(n, k, m_max, &opts)?;
            let headline = match r.best {
                Some(b) if r.exhausted() => format!("f({n},{k}) = {b} (exhausted)"),
                Some(b) => format!("f({n},{k}) ≤ {b} (budget expired)"),
                None => format!("f({n},{k}) unresolved for m ≤ {m_max}"),
            };
            let mut details: Vec<String> = r
                .levels
                .iter()
                .map(|(m, o)| format!("m={m}: {o}"))
                .collect();
            details.push(format!("nodes: {}", r.nodes_visited));
            search_output(
                format,
                headline,
                fields(&[
                    ("problem", json!("min-m")),
                    ("n", json!(n)),
                    ("k", json!(k)),
                    ("value", json!(r.best)),
                    ("exhausted", json!(r.exhausted())),
                    ("nodes", json!(r.nodes_visited)),
                ]),
                details,
                r.example
                    .as_ref()
                    .map(|f| FamilyDocument::from_family(f).with_role(Role::Primal)),
            )
        }
        ProblemArg::UniqueSubset => {
            let m = require(m, "m", "unique-subset")?;
            let r = search::max_unique_subset_family(m, k, &opts)?;
            search_output(
                format,
                format!("u({m},{k}) = {} ({})", r.best, status(r.exhausted)),
                fields(&[
                    ("problem", json!("unique-subset")),
                    ("m", json!(m)),
                    ("k", json!(k)),
                    ("value", json!(r.best)),
                    ("exhausted", json!(r.exhausted)),
                    ("nodes", json!(r.nodes_visited)),
                ]),
                vec![format!("nodes: {}", r.nodes_visited)],
                Some(FamilyDocument::from_family(&r.example)),
            )
        }
        ProblemArg::PairFamily => {
            let m = require(m, "m", "pair-family")?;
            let r = search::max_pair_family(m, k)?;
            let mut details: Vec<String> = r.pairs.iter().map(|w| w.to_string()).collect();
            details.push(format!("nodes: {}", r.nodes_visited));
            search_output(
                format,
                format!("pairs({m},{k}) = {} ({})", r.best, status(r.exhausted)),
                fields(&[
                    ("problem", json!("pair-family")),
                    ("m", json!(m)),
                    ("k", json!(k)),
                    ("value", json!(r.best)),
                    ("exhausted", json!(r.exhausted)),
                    ("nodes", json!(r.nodes_visited)),
                ]),
                details,
                None,
            )
        }
    };
    Ok(Report::ok(text))
}

pub fn table(
    n_max: u64,
    check_up_to: u64,
    s: &SearchArgs,
    format: Format,
) -> Result<Report, CliError> {
    let opts = options(s)?;
    if !(2..=TABLE_MAX_N).contains(&n_max) {
        return Err(CliError::Usage(format!(
            "--n-max must lie in 2..={TABLE_MAX_N}"
        )));
    }
    if check_up_to > TABLE_MAX_CHECK {
        return Err(CliError::Usage(format!(
            "--check-up-to must be at most {TABLE_MAX_CHECK}"
        )));
    }
    let mut code = 0;
    let mut rows = Vec::new();
    let mut text = String::from("  n   f  bounds  search");
    for n in 2..=n_max {
        let f = bounds::f2_exact(n)?;
        let b = bounds::f_bounds(n, 2)?;
        let mut ok = b.lower <= f && f <= b.upper;
        let mut found = None;
        let mut mark = "";
        if n <= check_up_to {
            let r = search::min_m_hyperseparating(n as usize, 2, MAX_NICE_GROUND, &opts)?;
            if r.exhausted() {
                found = r.best;
                ok &= r.best == Some(f as usize);
            } else {
                mark = " (budget expired)";
            }
        }
        if !ok {
            code = EXIT_FAIL;
        }
        let _ = write!(text, "\n{n:>3}  {f:>2}  [{} ≤ {f} ≤ {}]", b.lower, b.upper);
        if n <= check_up_to {
            match found {
                Some(v) => {
                    let _ = write!(text, "  search:{v} {}", if ok { "✓" } else { "✗" });
                }
                None => {
                    let _ = write!(text, "  search:?{mark}");
                }
            }
        } else if !ok {
            text.push_str("  ✗");
        }
        rows.push(json!({
            "n": n,
            "f": f,
            "lower": b.lower,
            "upper": b.upper,
            "search": found,
            "ok": ok,
        }));
    }
    let text = match format {
        Format::Json => to_json(&json!(rows)),
        Format::Text => text,
    };
    Ok(Report { text, code })
}

fn flipped(role: Option<Role>) -> Option<Role> {
    role.map(|r| match r {
        Role::Primal => Role::Dual,
        Role::Dual => Role::Primal,
    })
}

fn emit_with_role(f: &Family, role: Option<Role>, format: Format) -> String {
    let mut doc = FamilyDocument::from_family(f);
    doc.role = role;
    emit_document(&doc, format)
}

pub fn dual(input: &InputArgs, format: Format) -> Result<Report, CliError> {
    let p = read_input(input)?;
    let d = p.family.dual()?;
    Ok(Report::ok(emit_with_role(&d, flipped(p.role), format)))
}

pub fn switch(element: usize, input: &InputArgs, format: Format) -> Result<Report, CliError> {
    let p = read_input(input)?;
    let s = p.family.switch(element)?;
    Ok(Report::ok(emit_with_role(&s, p.role, format)))
}

pub fn canon(group: GroupArg, input: &InputArgs, format: Format) -> Result<Report, CliError> {
    let p = read_input(input)?;
    let group = match group {
        GroupArg::Permutations => SymmetryGroup::PermutationsOnly,
        GroupArg::Switching => SymmetryGroup::PermutationsAndSwitching,
    };
    let c = p.family.canonical_form(group)?;
    Ok(Report::ok(emit_with_role(&c, p.role, format)))
}
