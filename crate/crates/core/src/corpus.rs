//! Offline substring-count backend.
//!
//! A [`SubstringIndex`] is a suffix array over every document body joined
//! with `0xFF` separators. `0xFF` never occurs in UTF-8, so no match of a
//! `&str` pattern can straddle two documents.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus has no documents")]
    EmptyCorpus,
    #[error("empty search pattern")]
    EmptyPattern,
    #[error("duplicate document id {0:?}")]
    DuplicateDocId(String),
    #[error("cannot read corpus at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CorpusError {
    pub fn code(&self) -> &'static str {
        match self {
            CorpusError::EmptyCorpus => "EmptyCorpus",
            CorpusError::EmptyPattern => "EmptyPattern",
            CorpusError::DuplicateDocId(_) => "DuplicateDocId",
            CorpusError::Io { .. } => "CorpusIo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub body: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new<I, S, T>(documents: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut docs = Vec::new();
        for (id, body) in documents {
            let id = id.into();
            if !seen.insert(id.clone()) {
                return Err(CorpusError::DuplicateDocId(id));
            }
            docs.push(Document {
                id,
                body: body.into(),
            });
        }
        Ok(Corpus { documents: docs })
    }

    /// Documents named by their 1-based position, e.g. `["abc", "bcd"]`
    /// becomes `{"1": "abc", "2": "bcd"}`.
    pub fn from_bodies<I, T>(bodies: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        Corpus {
            documents: bodies
                .into_iter()
                .enumerate()
                .map(|(i, body)| Document {
                    id: (i + 1).to_string(),
                    body: body.into(),
                })
                .collect(),
        }
    }

    /// A directory loads one document per regular file (id = file name,
    /// sorted); a file loads one document per line (id = 1-based line number).
    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let io = |source| CorpusError::Io {
            path: path.to_owned(),
            source,
        };
        if path.is_dir() {
            let mut files = Vec::new();
            for entry in fs::read_dir(path).map_err(io)? {
                let entry = entry.map_err(io)?;
                if entry.file_type().map_err(io)?.is_file() {
                    files.push(entry.path());
                }
            }
            files.sort();
            let mut docs = Vec::with_capacity(files.len());
            for file in files {
                let body = fs::read_to_string(&file).map_err(|source| CorpusError::Io {
                    path: file.clone(),
                    source,
                })?;
                let id = file
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                docs.push((id, body));
            }
            Corpus::new(docs)
        } else {
            let text = fs::read_to_string(path).map_err(io)?;
            Ok(Corpus::from_bodies(text.lines()))
        }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

/// Number of documents whose body contains `pattern`, by linear scan.
pub fn naive_count(corpus: &Corpus, pattern: &str) -> Result<usize, CorpusError> {
    if pattern.is_empty() {
        return Err(CorpusError::EmptyPattern);
    }
    Ok(corpus
        .documents
        .iter()
        .filter(|d| d.body.contains(pattern))
        .count())
}

/// Suffix array with per-suffix document attribution.
#[derive(Debug, Clone)]
pub struct SubstringIndex {
    text: Vec<u8>,
    suffixes: Vec<u32>,
    /// Document index of each entry of `suffixes`.
    owners: Vec<u32>,
    ids: Vec<String>,
}

impl SubstringIndex {
    pub fn build(corpus: &Corpus) -> Result<Self, CorpusError> {
        if corpus.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let total: usize = corpus.documents.iter().map(|d| d.body.len() + 1).sum();
        let mut text = Vec::with_capacity(total);
        let mut owner_of_byte = Vec::with_capacity(total);
        for (i, doc) in corpus.documents.iter().enumerate() {
            text.extend_from_slice(doc.body.as_bytes());
            text.push(0xFF);
            owner_of_byte.resize(text.len(), i as u32);
        }
        let suffixes = suffix_array(&text);
        let owners = suffixes
            .iter()
            .map(|&p| owner_of_byte[p as usize])
            .collect();
        Ok(SubstringIndex {
            text,
            suffixes,
            owners,
            ids: corpus.documents.iter().map(|d| d.id.clone()).collect(),
        })
    }

    pub fn document_count(&self) -> usize {
        self.ids.len()
    }

    /// Range of suffix-array entries whose suffix starts with `pattern`.
    fn occurrences(&self, pattern: &[u8]) -> std::ops::Range<usize> {
        let prefix = |i: usize| {
            let p = self.suffixes[i] as usize;
            &self.text[p..(p + pattern.len()).min(self.text.len())]
        };
        let lo = partition_point(self.suffixes.len(), |i| prefix(i) < pattern);
        let hi = lo + partition_point(self.suffixes.len() - lo, |i| prefix(lo + i) == pattern);
        lo..hi
    }

    fn matching_indices(&self, pattern: &str) -> Result<Vec<u32>, CorpusError> {
        if pattern.is_empty() {
            return Err(CorpusError::EmptyPattern);
        }
        let owners = &self.owners[self.occurrences(pattern.as_bytes())];
        if owners.len() * 8 < self.ids.len() {
            let mut docs = owners.to_vec();
            docs.sort_unstable();
            docs.dedup();
            return Ok(docs);
        }
        let mut seen = vec![false; self.ids.len()];
        for &d in owners {
            seen[d as usize] = true;
        }
        Ok((0..self.ids.len() as u32)
            .filter(|&d| seen[d as usize])
            .collect())
    }

    /// Distinct documents containing `pattern` at least once.
    pub fn count_documents(&self, pattern: &str) -> Result<usize, CorpusError> {
        Ok(self.matching_indices(pattern)?.len())
    }

    /// Ids of matching documents in corpus order.
    pub fn matching_documents(&self, pattern: &str) -> Result<Vec<&str>, CorpusError> {
        Ok(self
            .matching_indices(pattern)?
            .into_iter()
            .map(|i| self.ids[i as usize].as_str())
            .collect())
    }

    /// Total occurrences, counting repeats within a document.
    pub fn count_occurrences(&self, pattern: &str) -> Result<usize, CorpusError> {
        if pattern.is_empty() {
            return Err(CorpusError::EmptyPattern);
        }
        Ok(self.occurrences(pattern.as_bytes()).len())
    }
}

fn partition_point(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Prefix doubling over cyclic shifts of `text` plus a unique smallest
/// sentinel, with counting sorts at every round: O(n log n).
fn suffix_array(text: &[u8]) -> Vec<u32> {
    let n = text.len() + 1;
    let symbol = |i: usize| {
        if i < text.len() {
            text[i] as usize + 1
        } else {
            0
        }
    };

    let mut order = vec![0u32; n];
    let mut class = vec![0u32; n];
    let mut count = vec![0usize; 257.max(n)];
    for i in 0..n {
        count[symbol(i)] += 1;
    }
    for c in 1..257 {
        count[c] += count[c - 1];
    }
    for i in (0..n).rev() {
        count[symbol(i)] -= 1;
        order[count[symbol(i)]] = i as u32;
    }
    let mut classes = 1;
    for i in 1..n {
        if symbol(order[i] as usize) != symbol(order[i - 1] as usize) {
            classes += 1;
        }
        class[order[i] as usize] = classes as u32 - 1;
    }

    let mut shifted = vec![0u32; n];
    let mut next_class = vec![0u32; n];
    let mut half = 1;
    while half < n && classes < n {
        for i in 0..n {
            shifted[i] = ((order[i] as usize + n - half) % n) as u32;
        }
        count[..classes].fill(0);
        for &s in &shifted {
            count[class[s as usize] as usize] += 1;
        }
        for c in 1..classes {
            count[c] += count[c - 1];
        }
        for &s in shifted.iter().rev() {
            let c = class[s as usize] as usize;
            count[c] -= 1;
            order[count[c]] = s;
        }
        let key = |i: u32| {
            let i = i as usize;
            (class[i], class[(i + half) % n])
        };
        next_class[order[0] as usize] = 0;
        classes = 1;
        for i in 1..n {
            if key(order[i]) != key(order[i - 1]) {
                classes += 1;
            }
            next_class[order[i] as usize] = classes as u32 - 1;
        }
        std::mem::swap(&mut class, &mut next_class);
        half *= 2;
    }
    // order[0] is the sentinel
    order.remove(0);
    order
}
