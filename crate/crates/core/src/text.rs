//! Tokenization and the bundled stopword list.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// A word of a headline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Text as written (NFC-normalized, case preserved).
    pub surface: String,
    /// Lowercase form used for lexicon and embedding lookups.
    pub lower: String,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        let surface = surface.into();
        let lower = surface.to_lowercase();
        Token { surface, lower }
    }

    /// Length of the surface form in characters.
    pub fn char_len(&self) -> usize {
        self.surface.chars().count()
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_apostrophe(c)
}

/// Splits `text` into tokens.
///
/// The text is NFC-normalized and split on whitespace. Each fragment loses
/// any leading and trailing characters that are not letters, digits or
/// apostrophes, and fragments left empty are dropped. Inner punctuation such
/// as hyphens and apostrophes is kept.
pub fn tokenize(text: &str) -> Vec<Token> {
    let normalized: String = text.nfc().collect();
    normalized
        .split_whitespace()
        .map(|fragment| fragment.trim_matches(|c: char| !is_word_char(c)))
        .filter(|fragment| !fragment.is_empty())
        .map(Token::new)
        .collect()
}

/// Parses a one-word-per-line list. Blank lines and `#` comments are
/// skipped; entries are lowercased.
pub(crate) fn parse_word_list(source: &str) -> Result<HashSet<String>> {
    let mut words = HashSet::new();
    for (i, line) in source.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.chars().any(char::is_whitespace) {
            return Err(Error::Validation(format!(
                "word list line {}: entry {line:?} contains whitespace",
                i + 1
            )));
        }
        words.insert(line.to_lowercase());
    }
    Ok(words)
}

#[derive(Debug, Clone)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// The 174-word English list shipped in `data/stopwords_en.txt`.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_STOPWORDS).expect("bundled stopword list is well-formed")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&source)
    }

    pub fn parse(source: &str) -> Result<Self> {
        let words = parse_word_list(source)?;
        if words.is_empty() {
            return Err(Error::Empty("stopword list has no entries".into()));
        }
        Ok(StopwordList { words })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub(crate) fn source_text() -> &'static str {
        BUNDLED_STOPWORDS
    }
}

pub fn count_stopwords(tokens: &[Token], stops: &StopwordList) -> usize {
    tokens.iter().filter(|t| stops.contains(&t.lower)).count()
}
