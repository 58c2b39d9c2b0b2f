//! Tagged plain-text export parsing and cited-reference normalization.
//!
//! The export grammar is line oriented: a two-character field tag at column 0,
//! one space, then the value. Lines starting with whitespace continue the
//! previous tag. `ER` closes a record and `EF` closes the file.
//!
//! ```text
//! FN Thomson Reuters Web of Science
//! VR 1.0
//! PT J
//! AU FRANCIS L
//! TI INTRASPECIFIC AGGRESSION AND ITS EFFECT ON THE DISTRIBUTION OF
//!    ANTHOPLEURA-ELEGANTISSIMA
//! SO BIOLOGICAL BULLETIN
//! PY 1973
//! VL 144
//! BP 73
//! TC 111
//! CR FORD CE, 1964, BIOL BULL, V126, P233
//! ER
//!
//! EF
//! ```

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tags that may appear before the first record.
const HEADER_TAGS: &[&str] = &["FN", "VR"];

/// Earliest and latest year accepted inside a cited reference.
pub const MIN_REF_YEAR: i32 = 1500;
pub const MAX_REF_YEAR: i32 = 2099;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("line {line}: value line before any field tag")]
    ValueBeforeTag { line: usize },
    #[error("line {line}: record opened at line {opened} is not closed by ER")]
    MissingEndOfRecord { line: usize, opened: usize },
    #[error("line {line}: ER without an open record")]
    UnexpectedEndOfRecord { line: usize },
    #[error("line {line}: expected a two-character field tag, found {text:?}")]
    MalformedLine { line: usize, text: String },
}

/// Non-fatal problem found while parsing; rendered as `WARN <line>: <message>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WARN {}: {}", self.line, self.message)
    }
}

/// One parsed source record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct BibRecord {
    pub record_id: String,
    /// Author names as printed (surname + initials).
    pub authors: Vec<String>,
    pub title: String,
    pub source_title: String,
    pub doc_type: String,
    pub pub_year: i32,
    pub volume: Option<String>,
    pub issue: Option<String>,
    pub begin_page: Option<String>,
    pub end_page: Option<String>,
    pub addresses: Vec<String>,
    pub global_cites: u32,
    /// Raw cited-reference strings, source order, duplicates collapsed.
    pub cited_refs: Vec<String>,
    /// Unrecognized tags, kept verbatim so records survive a write/parse cycle.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<(String, Vec<String>)>,
}

impl BibRecord {
    pub fn first_author(&self) -> Option<&str> {
        self.authors.first().map(String::as_str)
    }

    /// Looks up a preserved unrecognized tag.
    pub fn extra_field(&self, tag: &str) -> Option<&[String]> {
        self.extra
            .iter()
            .find(|(t, _)| t == tag)
            .map(|(_, v)| v.as_slice())
    }
}

/// Records plus the warnings produced while reading them.
#[derive(Debug, Clone, Default)]
pub struct ParsedExport {
    pub records: Vec<BibRecord>,
    pub warnings: Vec<ParseWarning>,
}

#[derive(Default)]
struct RecordBuilder {
    opened: usize,
    fields: Vec<(String, Vec<String>)>,
}

impl RecordBuilder {
    fn push(&mut self, tag: &str, value: &str) {
        match self.fields.iter_mut().find(|(t, _)| t == tag) {
            Some((_, values)) => values.push(value.to_string()),
            None => self.fields.push((tag.to_string(), vec![value.to_string()])),
        }
    }

    fn extend_last(&mut self, value: &str) {
        if let Some((_, values)) = self.fields.last_mut() {
            values.push(value.to_string());
        }
    }

    fn finish(self, warnings: &mut Vec<ParseWarning>) -> Option<BibRecord> {
        let line = self.opened;
        let mut record = BibRecord::default();
        let mut year = None;

        for (tag, values) in self.fields {
            let joined = || join_wrapped(&values);
            match tag.as_str() {
                "AU" => record.authors = non_empty(values),
                "TI" => record.title = joined(),
                "SO" => record.source_title = joined(),
                "DT" => record.doc_type = joined(),
                "PY" => {
                    let text = joined();
                    if is_four_digit_year(&text) {
                        year = text.parse().ok();
                    } else {
                        warnings.push(ParseWarning {
                            line,
                            message: format!("invalid PY value {text:?}; record skipped"),
                        });
                        return None;
                    }
                }
                "VL" => record.volume = optional(joined()),
                "IS" => record.issue = optional(joined()),
                "BP" => record.begin_page = optional(joined()),
                "EP" => record.end_page = optional(joined()),
                "C1" => record.addresses = non_empty(values),
                "TC" => {
                    let text = joined();
                    match text.parse::<u32>() {
                        Ok(n) => record.global_cites = n,
                        Err(_) => warnings.push(ParseWarning {
                            line,
                            message: format!("invalid TC value {text:?}; using 0"),
                        }),
                    }
                }
                "CR" => {
                    let mut seen = HashSet::new();
                    record.cited_refs = values
                        .into_iter()
                        .map(|v| v.trim().to_string())
                        .filter(|v| !v.is_empty() && seen.insert(v.clone()))
                        .collect();
                }
                "UT" => record.record_id = joined(),
                _ => record.extra.push((tag, values)),
            }
        }

        match year {
            Some(y) => {
                record.pub_year = y;
                Some(record)
            }
            None => {
                warnings.push(ParseWarning {
                    line,
                    message: "record has no PY field; skipped".to_string(),
                });
                None
            }
        }
    }
}

fn join_wrapped(values: &[String]) -> String {
    values
        .iter()
        .map(|v| v.trim())
        .filter(|v| !v.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

fn non_empty(values: Vec<String>) -> Vec<String> {
    values
        .into_iter()
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect()
}

fn optional(value: String) -> Option<String> {
    if value.is_empty() {
        None
    } else {
        Some(value)
    }
}

fn is_four_digit_year(s: &str) -> bool {
    s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit())
}

fn split_tag(line: &str) -> Option<(&str, &str)> {
    let bytes = line.as_bytes();
    if bytes.len() < 2 {
        return None;
    }
    let tag_ok = bytes[..2]
        .iter()
        .all(|b| b.is_ascii_uppercase() || b.is_ascii_digit());
    if !tag_ok {
        return None;
    }
    match bytes.get(2) {
        None => Some((&line[..2], "")),
        Some(b' ') => Some((&line[..2], line[3..].trim())),
        Some(_) => None,
    }
}

/// Parses raw bytes, replacing invalid UTF-8 sequences.
pub fn parse_export_bytes(bytes: &[u8]) -> Result<ParsedExport, IngestError> {
    parse_export(&String::from_utf8_lossy(bytes))
}

/// Parses a tagged export into records, in file order.
pub fn parse_export(text: &str) -> Result<ParsedExport, IngestError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut out = ParsedExport::default();
    let mut current: Option<RecordBuilder> = None;
    // Whether continuation lines currently have a tag to attach to.
    let mut has_tag = false;
    let mut saw_end_of_file = false;
    let mut last_line = 0;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }

        if line.starts_with(char::is_whitespace) {
            if !has_tag {
                return Err(IngestError::ValueBeforeTag { line: line_no });
            }
            if let Some(builder) = current.as_mut() {
                builder.extend_last(line.trim());
            }
            continue;
        }

        let (tag, value) = split_tag(line).ok_or_else(|| IngestError::MalformedLine {
            line: line_no,
            text: line.chars().take(40).collect(),
        })?;

        match tag {
            "EF" => {
                if let Some(builder) = current {
                    return Err(IngestError::MissingEndOfRecord {
                        line: line_no,
                        opened: builder.opened,
                    });
                }
                saw_end_of_file = true;
                break;
            }
            "ER" => {
                let builder = current
                    .take()
                    .ok_or(IngestError::UnexpectedEndOfRecord { line: line_no })?;
                if let Some(record) = builder.finish(&mut out.warnings) {
                    out.records.push(record);
                }
                has_tag = false;
            }
            _ if current.is_none() && HEADER_TAGS.contains(&tag) => {
                // File header; its continuation lines are dropped.
                has_tag = true;
            }
            _ => {
                let builder = current.get_or_insert_with(|| RecordBuilder {
                    opened: line_no,
                    ..Default::default()
                });
                builder.push(tag, value);
                has_tag = true;
            }
        }
    }

    if let Some(builder) = current {
        return Err(IngestError::MissingEndOfRecord {
            line: last_line,
            opened: builder.opened,
        });
    }
    if !saw_end_of_file {
        out.warnings.push(ParseWarning {
            line: last_line,
            message: "missing EF terminator".to_string(),
        });
    }
    Ok(out)
}

fn write_field(out: &mut String, tag: &str, values: &[String]) {
    for (i, value) in values.iter().enumerate() {
        if i == 0 {
            out.push_str(tag);
            out.push(' ');
        } else {
            out.push_str("   ");
        }
        out.push_str(value);
        out.push('\n');
    }
}

/// Serializes records back into the tagged export format.
pub fn write_export(records: &[BibRecord]) -> String {
    let mut out = String::from("FN Thomson Reuters Web of Science\nVR 1.0\n");
    for r in records {
        let single = |s: &str| -> Vec<String> {
            if s.is_empty() {
                Vec::new()
            } else {
                vec![s.to_string()]
            }
        };
        let opt = |s: &Option<String>| s.iter().cloned().collect::<Vec<_>>();
        write_field(&mut out, "AU", &r.authors);
        write_field(&mut out, "TI", &single(&r.title));
        write_field(&mut out, "SO", &single(&r.source_title));
        write_field(&mut out, "DT", &single(&r.doc_type));
        write_field(&mut out, "C1", &r.addresses);
        write_field(&mut out, "CR", &r.cited_refs);
        write_field(&mut out, "TC", &[r.global_cites.to_string()]);
        write_field(&mut out, "PY", &[format!("{:04}", r.pub_year)]);
        write_field(&mut out, "VL", &opt(&r.volume));
        write_field(&mut out, "IS", &opt(&r.issue));
        write_field(&mut out, "BP", &opt(&r.begin_page));
        write_field(&mut out, "EP", &opt(&r.end_page));
        for (tag, values) in &r.extra {
            write_field(&mut out, tag, values);
        }
        write_field(&mut out, "UT", &single(&r.record_id));
        out.push_str("ER\n\n");
    }
    out.push_str("EF\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RefFlag {
    Unpublished,
    InPress,
    NoPage,
    NoVolume,
    NoYear,
}

/// One cited-reference string broken into its components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitedRef {
    pub raw: String,
    /// Printed first author, upper-cased, `SURNAME INITIALS`.
    pub author: String,
    /// `author` reduced to `[A-Z0-9]`.
    pub author_key: String,
    pub year: Option<i32>,
    pub source_abbrev: String,
    pub volume: Option<String>,
    pub page: Option<String>,
    pub flags: BTreeSet<RefFlag>,
}

impl CitedRef {
    pub fn has(&self, flag: RefFlag) -> bool {
        self.flags.contains(&flag)
    }

    /// `AUTHOR, YEAR, SOURCE, Vvol, Ppage` rebuilt from the parsed parts.
    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        if !self.author.is_empty() {
            parts.push(self.author.clone());
        }
        if let Some(y) = self.year {
            parts.push(y.to_string());
        }
        if !self.source_abbrev.is_empty() {
            parts.push(self.source_abbrev.clone());
        }
        if let Some(v) = &self.volume {
            parts.push(format!("V{v}"));
        }
        if let Some(p) = &self.page {
            parts.push(format!("P{p}"));
        }
        parts.join(", ")
    }
}

/// Reduces a name to upper-case ASCII letters and digits.
pub fn normalize_key(s: &str) -> String {
    s.chars()
        .flat_map(char::to_uppercase)
        .filter(|c| c.is_ascii_alphanumeric())
        .collect()
}

/// Normalizes a printed author name to `SURNAME INITIALS`.
///
/// Handles both `FRANCIS L` and `Francis, L.` forms. Hyphens inside the
/// surname are kept so hyphenation variants stay visible.
pub fn normalize_author(s: &str) -> String {
    let upper: String = s
        .chars()
        .flat_map(char::to_uppercase)
        .filter(|c| *c != '.')
        .collect();
    let (surname, initials) = match upper.split_once(',') {
        Some((surname, given)) => (
            surname.split_whitespace().collect::<Vec<_>>().join(" "),
            given.split_whitespace().collect::<String>(),
        ),
        None => {
            let tokens: Vec<&str> = upper.split_whitespace().collect();
            match tokens.split_last() {
                Some((last, rest)) if !rest.is_empty() => (rest.join(" "), last.to_string()),
                _ => (tokens.join(" "), String::new()),
            }
        }
    };
    if initials.is_empty() {
        surname
    } else {
        format!("{surname} {initials}")
    }
}

/// Splits a normalized author into `(surname_key, initials_key)`.
pub fn author_parts(author: &str) -> (String, String) {
    match author.rsplit_once(' ') {
        Some((surname, initials)) => (normalize_key(surname), normalize_key(initials)),
        None => (normalize_key(author), String::new()),
    }
}

/// Canonical form of a volume or page token: digits lose leading zeros,
/// anything else is upper-cased.
pub fn normalize_number(s: &str) -> Option<String> {
    let t = s.trim();
    if t.is_empty() {
        return None;
    }
    if t.bytes().all(|b| b.is_ascii_digit()) {
        let stripped = t.trim_start_matches('0');
        Some(if stripped.is_empty() { "0" } else { stripped }.to_string())
    } else {
        Some(t.to_uppercase())
    }
}

fn prefixed_number(segment: &str, prefix: char) -> Option<String> {
    let rest = segment.strip_prefix(prefix)?;
    if rest.is_empty()
        || rest.contains(char::is_whitespace)
        || !rest.chars().any(|c| c.is_ascii_digit())
    {
        return None;
    }
    normalize_number(rest)
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses a cited-reference string. Never fails: missing parts are flagged.
pub fn parse_cited_ref(raw: &str) -> CitedRef {
    let raw = raw.trim();
    let mut segments = raw.split(',').map(|s| collapse_ws(s).to_uppercase());

    let author = segments
        .next()
        .map(|s| normalize_author(&s))
        .unwrap_or_default();
    let author_key = normalize_key(&author);

    let mut year = None;
    let mut volume = None;
    let mut page = None;
    let mut source = Vec::new();
    for seg in segments {
        if seg.is_empty() || seg.starts_with("DOI ") {
            continue;
        }
        if is_four_digit_year(&seg) {
            let y: i32 = seg.parse().unwrap_or(0);
            if year.is_none() && (MIN_REF_YEAR..=MAX_REF_YEAR).contains(&y) {
                year = Some(y);
            }
            continue;
        }
        if volume.is_none() {
            if let Some(v) = prefixed_number(&seg, 'V') {
                volume = Some(v);
                continue;
            }
        }
        if page.is_none() {
            if let Some(p) = prefixed_number(&seg, 'P') {
                page = Some(p);
                continue;
            }
        }
        source.push(seg);
    }
    let source_abbrev = source.join(", ");

    let mut flags = BTreeSet::new();
    if source_abbrev
        .split_whitespace()
        .any(|t| t.starts_with("UNPUB"))
    {
        flags.insert(RefFlag::Unpublished);
    }
    if source_abbrev.contains("IN PRESS") || source_abbrev.contains("INPRESS") {
        flags.insert(RefFlag::InPress);
    }
    if year.is_none() {
        flags.insert(RefFlag::NoYear);
    }
    if volume.is_none() {
        flags.insert(RefFlag::NoVolume);
    }
    if page.is_none() {
        flags.insert(RefFlag::NoPage);
    }

    CitedRef {
        raw: raw.to_string(),
        author,
        author_key,
        year,
        source_abbrev,
        volume,
        page,
        flags,
    }
}

/// Canonical match key, e.g. `MILLER-MA-1946-V90-P122`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RefKey(String);

impl RefKey {
    pub fn from_parts(
        author: &str,
        year: Option<i32>,
        volume: Option<&str>,
        page: Option<&str>,
    ) -> Self {
        let (surname, initials) = author_parts(author);
        let mut parts = Vec::with_capacity(5);
        if !surname.is_empty() {
            parts.push(surname);
        }
        if !initials.is_empty() {
            parts.push(initials);
        }
        if let Some(y) = year {
            parts.push(y.to_string());
        }
        if let Some(v) = volume {
            parts.push(format!("V{v}"));
        }
        if let Some(p) = page {
            parts.push(format!("P{p}"));
        }
        RefKey(parts.join("-"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RefKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn ref_key(r: &CitedRef) -> RefKey {
    RefKey::from_parts(&r.author, r.year, r.volume.as_deref(), r.page.as_deref())
}

/// Key of a source record as other records would cite it.
pub fn record_key(r: &BibRecord) -> RefKey {
    let author = r.first_author().map(normalize_author).unwrap_or_default();
    let volume = r.volume.as_deref().and_then(normalize_number);
    let page = r.begin_page.as_deref().and_then(normalize_number);
    RefKey::from_parts(
        &author,
        Some(r.pub_year),
        volume.as_deref(),
        page.as_deref(),
    )
}
