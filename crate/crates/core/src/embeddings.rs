//! Word vectors in GloVe text format and mean pooling over a headline.
//!
//! Each line of the file is a token followed by `D` space-separated decimal
//! components. There is no header; `D` is taken from the first line.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use log::{info, warn};

use crate::error::{Error, Result};
use crate::text::Token;

/// Token to vector map. Components are stored in single precision.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dimension: usize,
    index: HashMap<String, usize>,
    data: Vec<f32>,
}

impl EmbeddingTable {
    /// Builds a table from `(token, vector)` pairs. Keys are lowercased;
    /// the first occurrence of a key wins.
    pub fn from_entries<I, S>(dimension: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: AsRef<str>,
    {
        if dimension == 0 {
            return Err(Error::Validation("embedding dimension must be positive".into()));
        }
        let mut table = EmbeddingTable {
            dimension,
            index: HashMap::new(),
            data: Vec::new(),
        };
        for (word, vector) in entries {
            if vector.len() != dimension {
                return Err(Error::Dimension {
                    expected: dimension,
                    found: vector.len(),
                });
            }
            if vector.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite(format!("vector for {:?}", word.as_ref())));
            }
            table.insert(word.as_ref().to_lowercase(), &vector);
        }
        Ok(table)
    }

    fn insert(&mut self, key: String, vector: &[f32]) -> bool {
        if self.index.contains_key(&key) {
            return false;
        }
        self.index.insert(key, self.index.len());
        self.data.extend_from_slice(vector);
        true
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Case-insensitive lookup.
    pub fn get(&self, word: &str) -> Option<&[f32]> {
        match self.index.get(word) {
            Some(&row) => Some(self.row(row)),
            None => self.index.get(&word.to_lowercase()).map(|&row| self.row(row)),
        }
    }

    fn row(&self, row: usize) -> &[f32] {
        &self.data[row * self.dimension..(row + 1) * self.dimension]
    }
}

/// Loads a GloVe text file.
///
/// When `expected_dim` is given the inferred dimension must match it.
/// Duplicate tokens keep their first vector.
pub fn load_embeddings(path: impl AsRef<Path>, expected_dim: Option<usize>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 20, file);

    let mut table: Option<EmbeddingTable> = None;
    let mut components: Vec<f32> = Vec::new();
    let mut duplicates = 0usize;
    let mut line = String::new();
    let mut line_no = 0usize;
    loop {
        line.clear();
        let read = reader.read_line(&mut line).map_err(|e| Error::io(path, e))?;
        if read == 0 {
            break;
        }
        line_no += 1;
        let content = line.trim_end_matches(['\n', '\r']);
        if content.trim().is_empty() {
            continue;
        }
        let mut fields = content.split(' ').filter(|f| !f.is_empty());
        let word = fields.next().expect("line has content");
        components.clear();
        for field in fields {
            let value: f32 = field.parse().map_err(|_| {
                Error::parse(path, line_no, format!("component {field:?} is not a number"))
            })?;
            if !value.is_finite() {
                return Err(Error::parse(path, line_no, format!("component {field:?} is not finite")));
            }
            components.push(value);
        }

        let table = match table.as_mut() {
            Some(t) => t,
            None => {
                let dimension = components.len();
                if dimension == 0 {
                    return Err(Error::parse(path, line_no, "token has no vector components"));
                }
                if let Some(expected) = expected_dim {
                    if expected != dimension {
                        return Err(Error::Dimension {
                            expected,
                            found: dimension,
                        });
                    }
                }
                table.insert(EmbeddingTable {
                    dimension,
                    index: HashMap::new(),
                    data: Vec::new(),
                })
            }
        };
        if components.len() != table.dimension {
            return Err(Error::parse(
                path,
                line_no,
                format!(
                    "expected {} components, found {}",
                    table.dimension,
                    components.len()
                ),
            ));
        }
        if !table.insert(word.to_lowercase(), &components) {
            duplicates += 1;
        }
    }

    let table = table.ok_or_else(|| Error::Empty(format!("embedding file {} has no vectors", path.display())))?;
    if duplicates > 0 {
        warn!(
            "{}: {duplicates} duplicate tokens ignored (first occurrence kept)",
            path.display()
        );
    }
    info!(
        "loaded {} vectors of dimension {} from {}",
        table.len(),
        table.dimension,
        path.display()
    );
    Ok(table)
}

/// Mean of the vectors of the in-vocabulary tokens.
///
/// Tokens missing from the table are skipped and do not count toward the
/// denominator. With no known token the result is the zero vector. Rows are
/// summed in ascending table order, so the result does not depend on the
/// order of `tokens`.
pub fn average_embedding(tokens: &[Token], table: &EmbeddingTable) -> Vec<f64> {
    let mut rows: Vec<usize> = tokens
        .iter()
        .filter_map(|t| table.index.get(&t.lower).copied())
        .collect();
    let mut mean = vec![0.0f64; table.dimension];
    if rows.is_empty() {
        return mean;
    }
    rows.sort_unstable();
    for &row in &rows {
        for (acc, &c) in mean.iter_mut().zip(table.row(row)) {
            *acc += f64::from(c);
        }
    }
    let n = rows.len() as f64;
    for v in &mut mean {
        *v /= n;
    }
    mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;
    use proptest::prelude::*;
    use std::io::Write;

    fn file_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn toy() -> EmbeddingTable {
        EmbeddingTable::from_entries(2, [("a", vec![1.0, 2.0]), ("b", vec![3.0, 4.0])]).unwrap()
    }

    #[test]
    fn loads_minimal_file() {
        let f = file_with("a 1.0 2.0\nb 3.0 4.0\n");
        let t = load_embeddings(f.path(), None).unwrap();
        assert_eq!(t.dimension(), 2);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("B"), Some(&[3.0f32, 4.0][..]));
    }

    #[test]
    fn expected_dimension_mismatch() {
        let f = file_with("a 1.0 2.0\nb 3.0 4.0\n");
        assert!(matches!(
            load_embeddings(f.path(), Some(3)),
            Err(Error::Dimension { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn ragged_line_names_line() {
        let f = file_with("a 1.0 2.0\nb 3.0\n");
        assert!(matches!(load_embeddings(f.path(), None), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn non_numeric_component() {
        let f = file_with("a 1.0 x\n");
        assert!(matches!(load_embeddings(f.path(), None), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_file_is_error() {
        let f = file_with("");
        assert!(matches!(load_embeddings(f.path(), None), Err(Error::Empty(_))));
    }

    #[test]
    fn duplicates_keep_first() {
        let f = file_with("a 1 1\nA 2 2\r\n");
        let t = load_embeddings(f.path(), None).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get("a"), Some(&[1.0f32, 1.0][..]));
    }

    #[test]
    fn toy_means() {
        let t = toy();
        assert_eq!(average_embedding(&tokenize("a b"), &t), vec![2.0, 3.0]);
        assert_eq!(average_embedding(&[], &t), vec![0.0, 0.0]);
        assert_eq!(average_embedding(&tokenize("a zzz-unknown"), &t), vec![1.0, 2.0]);
        assert_eq!(average_embedding(&tokenize("zzz qqq"), &t), vec![0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn pooling_is_order_free(
            vectors in prop::collection::vec(prop::collection::vec(-5.0f32..5.0, 4), 1..12),
            picks in prop::collection::vec(0usize..16, 0..20),
            seed in any::<u64>(),
        ) {
            let entries: Vec<(String, Vec<f32>)> = vectors.iter().enumerate()
                .map(|(i, v)| (format!("w{i}"), v.clone())).collect();
            let table = EmbeddingTable::from_entries(4, entries).unwrap();
            let tokens: Vec<Token> = picks.iter().map(|i| Token::new(format!("w{i}"))).collect();
            let mut shuffled = tokens.clone();
            crate::rng::XorShift64Star::new(seed).shuffle(&mut shuffled);
            let a = average_embedding(&tokens, &table);
            let b = average_embedding(&shuffled, &table);
            prop_assert_eq!(a.len(), 4);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn repeated_vector_is_returned_exactly(
            v in prop::collection::vec(-100.0f32..100.0, 3),
            n in 1usize..30,
        ) {
            let table = EmbeddingTable::from_entries(3, [("x", v.clone()), ("y", v.clone())]).unwrap();
            let tokens: Vec<Token> = (0..n).map(|i| Token::new(if i % 2 == 0 { "x" } else { "y" })).collect();
            let expected: Vec<f64> = v.iter().map(|&c| f64::from(c)).collect();
            // f32 components widen exactly and n copies sum without rounding in f64.
            prop_assert_eq!(average_embedding(&tokens, &table), expected);
        }
    }
}
