//! Family documents: a JSON object and a terse 0/1 matrix text form.
//!
//! JSON: `{"ground_size":2,"sets":[[0,1],[1]]}` with optional `role`
//! (`"primal"` or `"dual"`) and `witnesses`
//! (`[{"member_index":0,"separator":[0,1],"key":[0]}]`).
//!
//! Text: first line `m n`, then `n` rows of `m` characters `0`/`1`; column `j`
//! is ground element `j`, row `i` is member `i`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use sepsys_core::bits;
use sepsys_core::family::FamilyError;
use sepsys_core::{Family, SeparatorWitness};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Text { line: usize, message: String },
    #[error("{0}")]
    Family(#[from] FamilyError),
    #[error("witness {index}: {message}")]
    Witness { index: usize, message: String },
    #[error("empty input")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Primal,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub member_index: usize,
    pub separator: Vec<usize>,
    pub key: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub ground_size: usize,
    pub sets: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<WitnessDoc>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// A parsed document: the family plus whatever metadata came with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub family: Family,
    pub role: Option<Role>,
    pub witnesses: Vec<(usize, SeparatorWitness)>,
}

impl FamilyDocument {
    pub fn from_family(f: &Family) -> Self {
        FamilyDocument {
            ground_size: f.ground_size(),
            sets: (0..f.len()).map(|i| f.member_indices(i)).collect(),
            role: None,
            witnesses: None,
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = Some(role);
        self
    }

    pub fn with_witnesses(mut self, ws: &[(usize, SeparatorWitness)]) -> Self {
        self.witnesses = Some(
            ws.iter()
                .map(|(i, w)| WitnessDoc {
                    member_index: *i,
                    separator: bits::to_indices(w.separator),
                    key: bits::to_indices(w.key),
                })
                .collect(),
        );
        self
    }

    fn into_parsed(self) -> Result<Parsed, FormatError> {
        let family = Family::new(self.ground_size, &self.sets)?;
        let mut witnesses = Vec::new();
        for (index, w) in self.witnesses.unwrap_or_default().into_iter().enumerate() {
            let bad = |message: &str| FormatError::Witness {
                index,
                message: message.to_string(),
            };
            if w.member_index >= family.len() {
                return Err(bad("member_index out of range"));
            }
            if w.separator
                .iter()
                .chain(&w.key)
                .any(|&i| i >= family.ground_size())
            {
                return Err(bad("element index out of range"));
            }
            let sw =
                SeparatorWitness::new(bits::from_indices(w.separator), bits::from_indices(w.key))
                    .ok_or_else(|| bad("key is not a subset of the separator"))?;
            witnesses.push((w.member_index, sw));
        }
        Ok(Parsed {
            family,
            role: self.role,
            witnesses,
        })
    }
}

/// Parses either format, chosen by the first non-blank character.
pub fn parse_family(text: &str) -> Result<Parsed, FormatError> {
    let trimmed = text.trim_start();
    if trimmed.is_empty() {
        return Err(FormatError::Empty);
    }
    if trimmed.starts_with('{') {
        let doc: FamilyDocument = serde_json::from_str(text).map_err(|e| FormatError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.into_parsed()
    } else {
        parse_text(text).map(|family| Parsed {
            family,
            role: None,
            witnesses: Vec::new(),
        })
    }
}

fn parse_text(text: &str) -> Result<Family, FormatError> {
    // Blank lines are skipped before the header and after the rows; rows
    // themselves are taken verbatim, since a ground of size 0 gives empty rows.
    let mut lines = text
        .lines()
        .enumerate()
        .skip_while(|(_, l)| l.trim().is_empty());
    let (hl, header) = lines.next().ok_or(FormatError::Empty)?;
    let err = |line: usize, message: String| FormatError::Text {
        line: line + 1,
        message,
    };
    let nums: Vec<&str> = header.split_whitespace().collect();
    let [m, n] = nums.as_slice() else {
        return Err(err(hl, format!("expected header \"m n\", got {header:?}")));
    };
    let m: usize = m
        .parse()
        .map_err(|_| err(hl, format!("bad ground size {m:?}")))?;
    let n: usize = n
        .parse()
        .map_err(|_| err(hl, format!("bad member count {n:?}")))?;
    if m > bits::MAX_GROUND {
        return Err(FamilyError::Capacity(m).into());
    }
    let mut members = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, row) = lines
            .next()
            .ok_or_else(|| err(hl, format!("expected {n} rows, got {}", members.len())))?;
        let row = row.trim();
        if row.len() != m {
            return Err(err(ln, format!("expected {m} columns, got {}", row.len())));
        }
        let mut w = 0u64;
        for (j, ch) in row.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => w |= 1 << j,
                other => {
                    return Err(err(
                        ln,
                        format!("unexpected character {other:?} in column {j}"),
                    ))
                }
            }
        }
        members.push(w);
    }
    if let Some((ln, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(err(
            ln,
            "trailing rows after the declared member count".into(),
        ));
    }
    Ok(Family::from_words(m, members)?)
}

/// Serializes a document. JSON output is a single line without a newline; the
/// text form ends every row with one and drops role and witnesses.
pub fn emit_document(doc: &FamilyDocument, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(doc).expect("document serializes"),
        Format::Text => {
            let mut out = format!("{} {}\n", doc.ground_size, doc.sets.len());
            for set in &doc.sets {
                let row: String = (0..doc.ground_size)
                    .map(|j| if set.contains(&j) { '1' } else { '0' })
                    .collect();
                let _ = writeln!(out, "{row}");
            }
            out
        }
    }
}

#[cfg(test)]
pub fn emit_family(f: &Family, format: Format) -> String {
    emit_document(&FamilyDocument::from_family(f), format)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_json_example() {
        let p = parse_family(r#"{"ground_size":2,"sets":[[0,1],[1]]}"#).unwrap();
        assert_eq!(p.family, Family::new(2, &[vec![0, 1], vec![1]]).unwrap());
        assert_eq!(p.role, None);
    }

    #[test]
    fn parse_rejects_out_of_range_index() {
        let e = parse_family(r#"{"ground_size":1,"sets":[[1]]}"#).unwrap_err();
        assert!(e.to_string().contains("index 1"), "{e}");
        let e = parse_family(r#"{"ground_size":65,"sets":[]}"#).unwrap_err();
        assert!(matches!(e, FormatError::Family(FamilyError::Capacity(65))));
    }

    #[test]
    fn json_errors_carry_positions() {
        let e = parse_family("{\"ground_size\":2,\n\"sets\":[[0,]]}").unwrap_err();
        match e {
            FormatError::Json { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_family(r#"{"ground_size":2,"sets":[],"extra":1}"#).is_err());
    }

    #[test]
    fn unsorted_sets_are_normalized() {
        let p = parse_family(r#"{"ground_size":3,"sets":[[2,0,2]]}"#).unwrap();
        assert_eq!(
            emit_family(&p.family, Format::Json),
            r#"{"ground_size":3,"sets":[[0,2]]}"#
        );
    }

    #[test]
    fn text_format() {
        let f = Family::new(3, &[vec![0, 2], vec![], vec![1]]).unwrap();
        let t = emit_family(&f, Format::Text);
        assert_eq!(t, "3 3\n101\n000\n010\n");
        assert_eq!(parse_family(&t).unwrap().family, f);
        let e = parse_family("2 1\n1x").unwrap_err();
        assert!(e.to_string().starts_with("line 2"), "{e}");
        assert!(parse_family("2 2\n10").is_err());
        assert!(parse_family("2 1\n10\n01").is_err());
        assert_eq!(
            parse_family("0 2\n\n").unwrap_err().to_string(),
            "line 1: expected 2 rows, got 1"
        );
        assert_eq!(parse_family("\n0 1\n\n\n").unwrap().family.len(), 1);
    }

    #[test]
    fn witnesses_round_trip() {
        let text = r#"{"ground_size":2,"sets":[[],[0]],"role":"dual","witnesses":[{"member_index":0,"separator":[0],"key":[]}]}"#;
        let p = parse_family(text).unwrap();
        assert_eq!(p.role, Some(Role::Dual));
        assert_eq!(
            p.witnesses,
            vec![(
                0,
                SeparatorWitness {
                    separator: 1,
                    key: 0
                }
            )]
        );
        let doc = FamilyDocument::from_family(&p.family)
            .with_role(Role::Dual)
            .with_witnesses(&p.witnesses);
        assert_eq!(emit_document(&doc, Format::Json), text);
        let bad = r#"{"ground_size":2,"sets":[[]],"witnesses":[{"member_index":0,"separator":[0],"key":[1]}]}"#;
        assert!(parse_family(bad).is_err());
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(m in 0usize..10, words in prop::collection::vec(any::<u64>(), 0..8), json in any::<bool>()) {
            let words: Vec<u64> = words.into_iter().map(|w| w & bits::full_mask(m)).collect();
            let f = Family::from_words(m, words).unwrap();
            let format = if json { Format::Json } else { Format::Text };
            let text = emit_family(&f, format);
            prop_assert_eq!(&parse_family(&text).unwrap().family, &f);
            prop_assert_eq!(emit_family(&parse_family(&text).unwrap().family, format), text);
        }
    }
}
