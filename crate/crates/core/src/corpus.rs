//! Short-text collections and their binary document × lexical-entity matrix.
//!
//! A document is reduced to the *set* of lexical entities it contains: cell
//! `(j, i)` of the matrix is 1 when entity `i` occurs anywhere in document
//! `j` and 0 otherwise. Repetitions are discarded.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three definition types handled by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefType {
    Analytic,
    Extensional,
    Functional,
}

impl DefType {
    pub fn as_str(self) -> &'static str {
        match self {
            DefType::Analytic => "analytic",
            DefType::Extensional => "extensional",
            DefType::Functional => "functional",
        }
    }
}

impl fmt::Display for DefType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DefType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(DefType::Analytic),
            "extensional" => Ok(DefType::Extensional),
            "functional" => Ok(DefType::Functional),
            other => Err(Error::UnknownDefType(other.to_string())),
        }
    }
}

/// One short text of a collection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub def_type: Option<DefType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_sense: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            term: None,
            def_type: None,
            gold_sense: None,
        }
    }
}

/// On-disk layout of a corpus file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    /// One JSON object per line with at least `id` and `text`.
    #[default]
    Jsonl,
    /// One document per line; the id is the 1-based line number.
    PlainLines,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "plain_lines" => Ok(CorpusFormat::PlainLines),
            other => Err(format!("unknown corpus format `{other}`")),
        }
    }
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(std::io::BufReader::new(file), format).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parses a corpus from any buffered reader. Documents keep their file order.
/// Blank lines are skipped in both formats.
pub fn read_corpus(reader: impl BufRead, format: CorpusFormat) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io("<corpus>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = match format {
            CorpusFormat::PlainLines => Document::new(line_no.to_string(), line),
            CorpusFormat::Jsonl => {
                serde_json::from_str::<Document>(&line).map_err(|e| Error::MalformedRecord {
                    line: line_no,
                    reason: e.to_string(),
                })?
            }
        };
        if doc.text.trim().is_empty() {
            return Err(Error::EmptyText(doc.id));
        }
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId(doc.id));
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Splits `text` into lowercased lexical entities on every character that is
/// neither a letter nor a digit. No stopwords, no phrases.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Tokenization settings shared by every document of a collection.
#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    stopwords: HashSet<String>,
    /// Multi-word entities, each stored as its unigram sequence.
    phrases: Vec<Vec<String>>,
    drop_defined_term: bool,
}

impl Tokenizer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stopwords are normalized through [`tokenize`]; lines that split into
    /// several tokens contribute each of them.
    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for w in words {
            self.stopwords.extend(tokenize(w.as_ref()));
        }
        self
    }

    /// Registers multi-word lexical entities. Matching is greedy, longest
    /// phrase first, left to right; a merged entity is its unigrams joined by
    /// a single space.
    pub fn with_phrases<I, S>(mut self, phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for p in phrases {
            let toks = tokenize(p.as_ref());
            if toks.len() >= 2 && !self.phrases.contains(&toks) {
                self.phrases.push(toks);
            }
        }
        self.phrases.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        self
    }

    /// Removes the document's own `term` from its entities.
    pub fn drop_defined_term(mut self, yes: bool) -> Self {
        self.drop_defined_term = yes;
        self
    }

    pub fn from_files(stopwords: Option<&Path>, phrases: Option<&Path>) -> Result<Self> {
        let mut tok = Tokenizer::new();
        if let Some(p) = stopwords {
            tok = tok.with_stopwords(read_lines(p)?);
        }
        if let Some(p) = phrases {
            tok = tok.with_phrases(read_lines(p)?);
        }
        Ok(tok)
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let merged = self.merge_phrases(tokenize(text));
        merged
            .into_iter()
            .filter(|t| !self.stopwords.contains(t))
            .collect()
    }

    /// Entities of `doc`, honoring the defined-term setting.
    pub fn document_entities(&self, doc: &Document) -> Vec<String> {
        let mut toks = self.tokenize(&doc.text);
        if self.drop_defined_term {
            if let Some(term) = &doc.term {
                let term_entities: HashSet<String> =
                    self.merge_phrases(tokenize(term)).into_iter().collect();
                toks.retain(|t| !term_entities.contains(t));
            }
        }
        toks
    }

    fn merge_phrases(&self, toks: Vec<String>) -> Vec<String> {
        if self.phrases.is_empty() {
            return toks;
        }
        let mut out = Vec::with_capacity(toks.len());
        let mut i = 0;
        while i < toks.len() {
            let hit = self
                .phrases
                .iter()
                .find(|p| toks.len() - i >= p.len() && toks[i..i + p.len()] == p[..]);
            match hit {
                Some(p) => {
                    out.push(p.join(" "));
                    i += p.len();
                }
                None => {
                    out.push(toks[i].clone());
                    i += 1;
                }
            }
        }
        out
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(raw
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

/// Sorted list of the unique lexical entities of a collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDictionary {
    entries: Vec<String>,
}

impl TermDictionary {
    pub fn build(docs: &[Document], tokenizer: &Tokenizer) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::EmptyCollection("no documents"));
        }
        let lists: Vec<Vec<String>> = docs
            .par_iter()
            .map(|d| tokenizer.document_entities(d))
            .collect();
        Self::from_token_lists(&lists)
    }

    pub fn from_token_lists(lists: &[Vec<String>]) -> Result<Self> {
        let set: BTreeSet<&str> = lists.iter().flatten().map(String::as_str).collect();
        if set.is_empty() {
            return Err(Error::EmptyCollection("every document tokenizes to nothing"));
        }
        Ok(TermDictionary {
            entries: set.into_iter().map(String::from).collect(),
        })
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    /// Column of `entity`, if present.
    pub fn position(&self, entity: &str) -> Option<usize> {
        self.entries
            .binary_search_by(|e| e.as_str().cmp(entity))
            .ok()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Document × entity presence matrix, one packed bit row per document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDocTermMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    doc_ids: Vec<String>,
}

impl BinaryDocTermMatrix {
    /// Builds a matrix from explicit 0/1 rows. Every row must have the same
    /// length and contain at least one 1.
    pub fn from_rows(doc_ids: Vec<String>, rows: &[Vec<u8>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyCollection("matrix has no rows"));
        }
        if doc_ids.len() != rows.len() {
            return Err(Error::EmptyCollection("doc_ids and rows differ in length"));
        }
        let cols = rows[0].len();
        let mut m = Self::zeroed(doc_ids, cols);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::MalformedRecord {
                    line: j + 1,
                    reason: format!("row has {} cells, expected {cols}", row.len()),
                });
            }
            for (i, &cell) in row.iter().enumerate() {
                match cell {
                    0 => {}
                    1 => m.set(j, i),
                    v => {
                        return Err(Error::MalformedRecord {
                            line: j + 1,
                            reason: format!("cell {i} is {v}, expected 0 or 1"),
                        })
                    }
                }
            }
            if m.row_weight(j) == 0 {
                return Err(Error::EmptyDocument(m.doc_ids[j].clone()));
            }
        }
        Ok(m)
    }

    /// Same as [`from_rows`](Self::from_rows) with ids `"0"`, `"1"`, ...
    pub fn from_unlabeled_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let ids = (0..rows.len()).map(|j| j.to_string()).collect();
        Self::from_rows(ids, rows)
    }

    pub fn from_token_lists(
        doc_ids: Vec<String>,
        lists: &[Vec<String>],
        dict: &TermDictionary,
    ) -> Result<Self> {
        let mut m = Self::zeroed(doc_ids, dict.len());
        for (j, toks) in lists.iter().enumerate() {
            for t in toks {
                let i = dict.position(t).ok_or_else(|| Error::UnknownToken {
                    token: t.clone(),
                    doc_id: m.doc_ids[j].clone(),
                })?;
                m.set(j, i);
            }
            if m.row_weight(j) == 0 {
                return Err(Error::EmptyDocument(m.doc_ids[j].clone()));
            }
        }
        Ok(m)
    }

    fn zeroed(doc_ids: Vec<String>, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64).max(1);
        BinaryDocTermMatrix {
            rows: doc_ids.len(),
            cols,
            words_per_row,
            bits: vec![0; doc_ids.len() * words_per_row],
            doc_ids,
        }
    }

    fn set(&mut self, row: usize, col: usize) {
        self.bits[row * self.words_per_row + col / 64] |= 1u64 << (col % 64);
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        ((self.row_bits(row)[col / 64] >> (col % 64)) & 1) as u8
    }

    pub fn row_bits(&self, row: usize) -> &[u64] {
        &self.bits[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    pub fn row(&self, row: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(row, c)).collect()
    }

    /// Number of entities present in `row`.
    pub fn row_weight(&self, row: usize) -> u32 {
        self.row_bits(row).iter().map(|w| w.count_ones()).sum()
    }

    /// Number of entities shared by rows `a` and `b`: `(X·Xᵀ)[a][b]`.
    pub fn shared(&self, a: usize, b: usize) -> u32 {
        self.row_bits(a)
            .iter()
            .zip(self.row_bits(b))
            .map(|(x, y)| (x & y).count_ones())
            .sum()
    }

    /// Number of columns where rows `a` and `b` differ.
    pub fn differing(&self, a: usize, b: usize) -> u32 {
        self.row_bits(a)
            .iter()
            .zip(self.row_bits(b))
            .map(|(x, y)| (x ^ y).count_ones())
            .sum()
    }
}

/// Tokenizes every document once, builds the dictionary and the matrix.
/// Documents that yield no entity are rejected.
pub fn ingest(
    docs: &[Document],
    tokenizer: &Tokenizer,
) -> Result<(TermDictionary, BinaryDocTermMatrix)> {
    if docs.is_empty() {
        return Err(Error::EmptyCollection("no documents"));
    }
    let lists: Vec<Vec<String>> = docs
        .par_iter()
        .map(|d| tokenizer.document_entities(d))
        .collect();
    if let Some(pos) = lists.iter().position(Vec::is_empty) {
        return Err(Error::EmptyDocument(docs[pos].id.clone()));
    }
    let dict = TermDictionary::from_token_lists(&lists)?;
    let ids = docs.iter().map(|d| d.id.clone()).collect();
    let matrix = BinaryDocTermMatrix::from_token_lists(ids, &lists, &dict)?;
    Ok((dict, matrix))
}

/// Presence/absence matrix of `docs` over an existing dictionary.
pub fn vectorize(
    docs: &[Document],
    dict: &TermDictionary,
    tokenizer: &Tokenizer,
) -> Result<BinaryDocTermMatrix> {
    if docs.is_empty() {
        return Err(Error::EmptyCollection("no documents"));
    }
    let lists: Vec<Vec<String>> = docs
        .par_iter()
        .map(|d| tokenizer.document_entities(d))
        .collect();
    let ids = docs.iter().map(|d| d.id.clone()).collect();
    BinaryDocTermMatrix::from_token_lists(ids, &lists, dict)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(texts: &[&str]) -> Vec<Document> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::new(format!("d{}", i + 1), *t))
            .collect()
    }

    #[test]
    fn tokenize_rules() {
        assert_eq!(tokenize("La célula, es un"), ["la", "célula", "es", "un"]);
        assert_eq!(tokenize("B4 Viv"), ["b4", "viv"]);
        assert!(tokenize("¡¡¡").is_empty());
        assert_eq!(tokenize("Niño/AÑO-3"), ["niño", "año", "3"]);
    }

    #[test]
    fn jsonl_record_maps_fields() {
        let src = r#"{"id":"d1","text":"la célula es la unidad de vida","def_type":"analytic"}"#;
        let docs = read_corpus(src.as_bytes(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].id, "d1");
        assert_eq!(docs[0].text, "la célula es la unidad de vida");
        assert_eq!(docs[0].def_type, Some(DefType::Analytic));
        assert_eq!(docs[0].term, None);
    }

    #[test]
    fn plain_lines_ids_are_line_numbers() {
        let docs = read_corpus("uno\ndos\ntres\n".as_bytes(), CorpusFormat::PlainLines).unwrap();
        let ids: Vec<_> = docs.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["1", "2", "3"]);
        let gappy = read_corpus("uno\n\ntres\n".as_bytes(), CorpusFormat::PlainLines).unwrap();
        assert_eq!(gappy[1].id, "3");
    }

    #[test]
    fn ingestion_errors() {
        let dup = "{\"id\":\"d1\",\"text\":\"a\"}\n{\"id\":\"d1\",\"text\":\"b\"}\n";
        assert!(matches!(
            read_corpus(dup.as_bytes(), CorpusFormat::Jsonl),
            Err(Error::DuplicateId(id)) if id == "d1"
        ));
        let bad = "{\"id\":\"d1\",\"text\":\"a\"}\n{\"id\":\"d2\"}\n";
        assert!(matches!(
            read_corpus(bad.as_bytes(), CorpusFormat::Jsonl),
            Err(Error::MalformedRecord { line: 2, .. })
        ));
        let empty = "{\"id\":\"d7\",\"text\":\"   \"}\n";
        assert!(matches!(
            read_corpus(empty.as_bytes(), CorpusFormat::Jsonl),
            Err(Error::EmptyText(id)) if id == "d7"
        ));
        let bad_type = "{\"id\":\"d1\",\"text\":\"a\",\"def_type\":\"synonymic\"}\n";
        assert!(read_corpus(bad_type.as_bytes(), CorpusFormat::Jsonl).is_err());
    }

    #[test]
    fn dictionary_is_sorted_union() {
        let tok = Tokenizer::new();
        let d = TermDictionary::build(&docs(&["b a", "c b"]), &tok).unwrap();
        assert_eq!(d.entries(), ["a", "b", "c"]);
        let d = TermDictionary::build(&docs(&["x x x"]), &tok).unwrap();
        assert_eq!(d.entries(), ["x"]);
        assert!(TermDictionary::build(&[], &tok).is_err());
        assert!(TermDictionary::build(&docs(&["¡!", "..."]), &tok).is_err());
        for (i, e) in d.entries().iter().enumerate() {
            assert_eq!(d.position(e), Some(i));
        }
    }

    #[test]
    fn vectorize_presence_absence() {
        let tok = Tokenizer::new();
        let dict = TermDictionary::build(&docs(&["a b c"]), &tok).unwrap();
        let m = vectorize(&docs(&["a a c", "a a c"]), &dict, &tok).unwrap();
        assert_eq!(m.row(0), [1, 0, 1]);
        assert_eq!(m.row(0), m.row(1));
        assert!(matches!(
            vectorize(&docs(&["a z"]), &dict, &tok),
            Err(Error::UnknownToken { token, doc_id }) if token == "z" && doc_id == "d1"
        ));
    }

    #[test]
    fn ingest_rejects_empty_documents() {
        let tok = Tokenizer::new().with_stopwords(["la"]);
        assert!(matches!(
            ingest(&docs(&["la célula", "la la"]), &tok),
            Err(Error::EmptyDocument(id)) if id == "d2"
        ));
    }

    #[test]
    fn stopwords_and_phrases() {
        let tok = Tokenizer::new()
            .with_stopwords(["la", "es"])
            .with_phrases(["República Francesa", "célula madre"]);
        assert_eq!(
            tok.tokenize("La República Francesa es la célula madre del estado"),
            ["república francesa", "célula madre", "del", "estado"]
        );
    }

    #[test]
    fn defined_term_can_be_dropped() {
        let mut d = Document::new("d1", "La célula es la unidad");
        d.term = Some("Célula".into());
        assert!(Tokenizer::new().document_entities(&d).contains(&"célula".to_string()));
        let toks = Tokenizer::new().drop_defined_term(true).document_entities(&d);
        assert_eq!(toks, ["la", "es", "la", "unidad"]);
    }

    #[test]
    fn matrix_rejects_non_binary_cells() {
        assert!(BinaryDocTermMatrix::from_unlabeled_rows(&[vec![1, 2]]).is_err());
        assert!(BinaryDocTermMatrix::from_unlabeled_rows(&[vec![0, 0]]).is_err());
        let m = BinaryDocTermMatrix::from_unlabeled_rows(&[vec![1, 0, 1, 0], vec![1, 1, 0, 0]])
            .unwrap();
        assert_eq!(m.shared(0, 1), 1);
        assert_eq!(m.differing(0, 1), 2);
    }
}
