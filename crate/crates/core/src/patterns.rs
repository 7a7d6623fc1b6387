//! Definitional search patterns and candidate-context extraction.
//!
//! A template such as `la ⟨T⟩ es un` is instantiated with each term of a list
//! and the resulting literal strings are searched in local text. Every hit is
//! a *candidate*: the pattern is present, but nothing says the fragment
//! actually defines the term.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::{DefType, Document};
use crate::error::{Error, Result};

/// Term placeholder inside a template surface.
pub const PLACEHOLDER: &str = "⟨T⟩";
/// ASCII spelling accepted in pattern files.
pub const ASCII_PLACEHOLDER: &str = "<T>";

/// Default Spanish templates, `surface<TAB>def_type` per line.
pub const DEFAULT_PATTERNS: &str = include_str!("../data/patterns_es.tsv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternTemplate {
    surface: String,
    def_type: DefType,
}

impl PatternTemplate {
    pub fn new(surface: &str, def_type: DefType) -> Result<Self> {
        let surface = surface.trim().replace(ASCII_PLACEHOLDER, PLACEHOLDER);
        let invalid = |reason: &str| Error::InvalidTemplate {
            surface: surface.clone(),
            reason: reason.to_string(),
        };
        match surface.matches(PLACEHOLDER).count() {
            1 => {}
            0 => return Err(invalid("missing term placeholder")),
            _ => return Err(invalid("more than one term placeholder")),
        }
        if surface.replace(PLACEHOLDER, "").trim().is_empty() {
            return Err(invalid("nothing besides the placeholder"));
        }
        Ok(PatternTemplate { surface, def_type })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn def_type(&self) -> DefType {
        self.def_type
    }

    pub fn instantiate(&self, term: &str) -> String {
        self.surface.replace(PLACEHOLDER, term.trim())
    }
}

/// Parses a pattern file: one `surface<TAB>def_type` per line, blank lines
/// and lines starting with `#` ignored.
pub fn parse_templates(src: &str) -> Result<Vec<PatternTemplate>> {
    let mut out = Vec::new();
    for (idx, line) in src.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (surface, def_type) = line.split_once('\t').ok_or_else(|| Error::MalformedRecord {
            line: idx + 1,
            reason: "expected `surface<TAB>def_type`".into(),
        })?;
        out.push(PatternTemplate::new(surface, DefType::from_str(def_type)?)?);
    }
    Ok(out)
}

pub fn default_templates() -> Vec<PatternTemplate> {
    parse_templates(DEFAULT_PATTERNS).expect("bundled pattern file is valid")
}

/// A template instantiated with one term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchPattern {
    pub text: String,
    pub term: String,
    pub template: PatternTemplate,
    /// Lowercased, whitespace-collapsed chars used for matching.
    needle: Vec<char>,
}

impl SearchPattern {
    fn new(template: &PatternTemplate, term: &str) -> Self {
        let text = template.instantiate(term);
        let needle = normalize(&text).into_iter().map(|(c, _)| c).collect();
        SearchPattern {
            text,
            term: term.trim().to_string(),
            template: template.clone(),
            needle,
        }
    }
}

/// Instantiates every template with every term, templates-major. Patterns
/// that normalize to an already produced one are dropped.
pub fn expand_patterns(templates: &[PatternTemplate], terms: &[&str]) -> Result<Vec<SearchPattern>> {
    if templates.is_empty() {
        return Err(Error::EmptyCollection("no pattern templates"));
    }
    if terms.iter().all(|t| t.trim().is_empty()) {
        return Err(Error::EmptyCollection("no terms"));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in templates {
        for term in terms.iter().filter(|t| !t.trim().is_empty()) {
            let p = SearchPattern::new(t, term);
            if seen.insert(p.needle.clone()) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Lowercases and collapses whitespace runs to one space, remembering for
/// every output char the char offset it came from in the input.
fn normalize(text: &str) -> Vec<(char, usize)> {
    let mut out = Vec::with_capacity(text.len());
    let mut in_space = false;
    for (pos, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            if !in_space && !out.is_empty() {
                out.push((' ', pos));
            }
            in_space = true;
            continue;
        }
        in_space = false;
        for l in c.to_lowercase() {
            out.push((l, pos));
        }
    }
    if out.last().is_some_and(|&(c, _)| c == ' ') {
        out.pop();
    }
    out
}

fn is_sentence_end(c: char) -> bool {
    matches!(c, '.' | ';' | '\n')
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateContext {
    pub source_id: String,
    /// Char offsets `[start, end)` of the matched pattern in the source text.
    pub span: (usize, usize),
    pub term: String,
    pub pattern: String,
    pub def_type: DefType,
    /// Text after the pattern up to the next `.`, `;` or newline, trimmed.
    pub tail: String,
    pub verified: bool,
}

/// Finds every occurrence of every pattern in `text`, case-insensitively and
/// with whitespace runs treated as a single space. Overlapping hits are all
/// reported, ordered by span start, then by pattern order.
pub fn scan_text(text: &str, source_id: &str, patterns: &[SearchPattern]) -> Vec<CandidateContext> {
    let norm = normalize(text);
    let hay: Vec<char> = norm.iter().map(|&(c, _)| c).collect();
    let chars: Vec<char> = text.chars().collect();
    let mut hits: Vec<(usize, usize, CandidateContext)> = Vec::new();

    for (pi, p) in patterns.iter().enumerate() {
        let k = p.needle.len();
        if k == 0 || k > hay.len() {
            continue;
        }
        for start in 0..=(hay.len() - k) {
            if hay[start..start + k] != p.needle[..] {
                continue;
            }
            let begin = norm[start].1;
            let end = norm[start + k - 1].1 + 1;
            let tail: String = chars[end..]
                .iter()
                .take_while(|&&c| !is_sentence_end(c))
                .collect();
            hits.push((
                begin,
                pi,
                CandidateContext {
                    source_id: source_id.to_string(),
                    span: (begin, end),
                    term: p.term.clone(),
                    pattern: p.text.clone(),
                    def_type: p.template.def_type(),
                    tail: tail.trim().to_string(),
                    verified: false,
                },
            ));
        }
    }
    hits.sort_by_key(|&(begin, pi, _)| (begin, pi));
    hits.into_iter().map(|(_, _, c)| c).collect()
}

/// Turns candidates into documents `source_id#k`, `k` counting the
/// candidates of each source from 1. Candidates with an empty tail are
/// skipped; the second value is how many were.
pub fn candidates_to_corpus(cands: &[CandidateContext]) -> (Vec<Document>, usize) {
    let mut ordinal: BTreeMap<&str, usize> = BTreeMap::new();
    let mut docs = Vec::new();
    let mut skipped = 0;
    for c in cands {
        let k = ordinal.entry(c.source_id.as_str()).or_default();
        *k += 1;
        if c.tail.trim().is_empty() {
            skipped += 1;
            continue;
        }
        docs.push(Document {
            id: format!("{}#{}", c.source_id, k),
            text: c.tail.clone(),
            term: Some(c.term.clone()),
            def_type: Some(c.def_type),
            gold_sense: None,
        });
    }
    (docs, skipped)
}

#[derive(Serialize)]
struct CandidateRecord<'a> {
    source_id: &'a str,
    span: [usize; 2],
    term: &'a str,
    pattern: &'a str,
    def_type: DefType,
    tail: &'a str,
}

/// One JSON object per candidate.
pub fn write_candidates_jsonl<W: Write>(cands: &[CandidateContext], mut out: W) -> std::io::Result<()> {
    for c in cands {
        let rec = CandidateRecord {
            source_id: &c.source_id,
            span: [c.span.0, c.span.1],
            term: &c.term,
            pattern: &c.pattern,
            def_type: c.def_type,
            tail: &c.tail,
        };
        serde_json::to_writer(&mut out, &rec)?;
        writeln!(out)?;
    }
    Ok(())
}
