//! RNA sequence parsing, validation, and dataset handling.
//!
//! Sequences are strings over `{A, C, G, U}`. `T` is transliterated to `U`
//! at parse time since public datasets mix DNA and RNA alphabets, and
//! lowercase is normalized to uppercase. Sequences longer than
//! [`crate::MAX_SEQ_LEN`] (the encoder width) are rejected.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, MAX_SEQ_LEN};

/// One of the four RNA nucleotides. Row order of the one-hot encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    A = 0,
    C = 1,
    G = 2,
    U = 3,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::G, Base::U];

    pub fn from_char(c: char) -> Option<Base> {
        match c {
            'A' => Some(Base::A),
            'C' => Some(Base::C),
            'G' => Some(Base::G),
            'U' => Some(Base::U),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::U => 'U',
        }
    }

    /// Watson-Crick complement (A↔U, C↔G).
    pub fn complement(self) -> Base {
        match self {
            Base::A => Base::U,
            Base::U => Base::A,
            Base::C => Base::G,
            Base::G => Base::C,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A validated RNA sequence with identifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RnaSequence {
    id: String,
    bases: Vec<u8>, // indices 0..4 in Base order
}

impl RnaSequence {
    /// Validates and normalizes `bases` (case folding, T→U).
    pub fn new(id: impl Into<String>, bases: &str) -> Result<RnaSequence> {
        let id = id.into();
        let mut out = Vec::with_capacity(bases.len());
        for c in bases.chars() {
            let c = match c.to_ascii_uppercase() {
                'T' => 'U',
                other => other,
            };
            match Base::from_char(c) {
                Some(b) => out.push(b.index() as u8),
                None => {
                    return Err(Error::InvalidSequence {
                        id,
                        reason: format!("invalid character '{c}' (alphabet is A, C, G, U, T)"),
                    })
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidSequence {
                id,
                reason: "empty sequence".into(),
            });
        }
        if out.len() > MAX_SEQ_LEN {
            return Err(Error::SequenceTooLong {
                id,
                len: out.len(),
                max: MAX_SEQ_LEN,
            });
        }
        Ok(RnaSequence { id, bases: out })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn base(&self, i: usize) -> Base {
        Base::ALL[self.bases[i] as usize]
    }

    pub fn bases(&self) -> impl Iterator<Item = Base> + '_ {
        self.bases.iter().map(|&b| Base::ALL[b as usize])
    }

    /// Base indices 0..4 in (A, C, G, U) order.
    pub fn indices(&self) -> &[u8] {
        &self.bases
    }

    pub fn to_string_bases(&self) -> String {
        self.bases().map(Base::to_char).collect()
    }
}

impl fmt::Display for RnaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ">{}\n{}", self.id, self.to_string_bases())
    }
}

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// Class index used by classifiers: positive = 1.
    pub fn class_index(self) -> usize {
        match self {
            Label::Positive => 1,
            Label::Negative => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        }
    }
}

/// A labeled collection of sequences with unique ids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub examples: Vec<(RnaSequence, Label)>,
    pub provenance: String,
}

impl LabeledDataset {
    pub fn new(examples: Vec<(RnaSequence, Label)>, provenance: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (seq, _) in &examples {
            if !seen.insert(seq.id().to_string()) {
                return Err(Error::DuplicateId(seq.id().to_string()));
            }
        }
        Ok(LabeledDataset {
            examples,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.examples.iter().filter(|(_, l)| *l == label).count()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.examples.iter().map(|(_, l)| *l).collect()
    }

    /// Two-column `id,label` manifest (canonical dataset description).
    pub fn manifest_csv(&self) -> String {
        let mut out = String::from("id,label\n");
        for (seq, label) in &self.examples {
            out.push_str(seq.id());
            out.push(',');
            out.push_str(label.as_str());
            out.push('\n');
        }
        out
    }
}

/// Parses FASTA text into validated sequences.
///
/// Records start with a `>` header line; the id is the first whitespace
/// delimited token. Sequence lines are concatenated. Order is preserved.
pub fn parse_fasta(text: &str) -> Result<Vec<RnaSequence>> {
    let mut records: Vec<(String, String)> = Vec::new();
    let mut current: Option<(String, String)> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            if let Some(rec) = current.take() {
                records.push(rec);
            }
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            if id.is_empty() {
                return Err(Error::Fasta(format!("line {}: empty record id", lineno + 1)));
            }
            current = Some((id, String::new()));
        } else {
            match current.as_mut() {
                Some((_, body)) => body.push_str(line.trim()),
                None => {
                    return Err(Error::Fasta(format!(
                        "line {}: sequence data before any '>' header",
                        lineno + 1
                    )))
                }
            }
        }
    }
    if let Some(rec) = current.take() {
        records.push(rec);
    }

    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(records.len());
    for (id, body) in records {
        if body.is_empty() {
            return Err(Error::Fasta(format!("record '{id}' has an empty body")));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        out.push(RnaSequence::new(id, &body)?);
    }
    Ok(out)
}

/// Writes sequences back to FASTA text. Inverse of [`parse_fasta`].
pub fn serialize_fasta(seqs: &[RnaSequence]) -> String {
    let mut out = String::new();
    for seq in seqs {
        out.push('>');
        out.push_str(seq.id());
        out.push('\n');
        out.push_str(&seq.to_string_bases());
        out.push('\n');
    }
    out
}

fn read_fasta_file(path: &Path) -> Result<Vec<RnaSequence>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_fasta(&text).map_err(|e| Error::Fasta(format!("{}: {e}", path.display())))
}

/// Loads a labeled dataset from a positive and a negative FASTA file.
///
/// Ids must be unique across the two files. An empty class is allowed (a
/// warning is printed) so prediction-mode datasets can pass through.
pub fn load_dataset(positive_path: &Path, negative_path: &Path) -> Result<LabeledDataset> {
    let positives = read_fasta_file(positive_path)?;
    let negatives = read_fasta_file(negative_path)?;
    if positives.is_empty() {
        eprintln!("warning: {} contains no records", positive_path.display());
    }
    if negatives.is_empty() {
        eprintln!("warning: {} contains no records", negative_path.display());
    }
    let mut examples = Vec::with_capacity(positives.len() + negatives.len());
    examples.extend(positives.into_iter().map(|s| (s, Label::Positive)));
    examples.extend(negatives.into_iter().map(|s| (s, Label::Negative)));
    LabeledDataset::new(
        examples,
        format!(
            "positives: {}; negatives: {}",
            positive_path.display(),
            negative_path.display()
        ),
    )
}

/// Drops every sequence whose predicted structure has more than one hairpin
/// loop. Optional dataset filter; requires folding, hence lives behind an
/// explicit call rather than inside parsing.
pub fn filter_multi_loop(dataset: &LabeledDataset) -> LabeledDataset {
    let examples = dataset
        .examples
        .iter()
        .filter(|(seq, _)| crate::fold::fold(seq).hairpin_loop_count() <= 1)
        .cloned()
        .collect();
    LabeledDataset {
        examples,
        provenance: format!("{} (multi-loop filtered)", dataset.provenance),
    }
}
