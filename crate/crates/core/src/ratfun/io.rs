//! Loading and saving model files (text and JSON forms).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::RationalMatrix;
use super::parser::parse_rational_matrix;
use super::poly::Polynomial;
use super::rational::RationalFunction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonEntry {
    num: Vec<f64>,
    den: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonModel {
    m: usize,
    entries: Vec<Vec<JsonEntry>>,
}

/// Parses the JSON form `{"m": .., "entries": [[{"num": [..], "den": [..]}, ..], ..]}`.
pub fn parse_json_model(text: &str) -> Result<RationalMatrix> {
    let doc: JsonModel = serde_json::from_str(text)?;
    if doc.entries.len() != doc.m {
        return Err(Error::Dimension(format!("`m` is {} but {} rows given", doc.m, doc.entries.len())));
    }
    let mut entries = Vec::with_capacity(doc.m * doc.m);
    for (r, row) in doc.entries.into_iter().enumerate() {
        if row.len() != doc.m {
            return Err(Error::RowLength {
                row: r,
                found: row.len(),
                expected: doc.m,
            });
        }
        for e in row {
            if e.num.is_empty() || e.den.is_empty() {
                return Err(Error::InvalidArgument("coefficient arrays must be nonempty".into()));
            }
            let f = RationalFunction {
                num: Polynomial::new(e.num),
                den: Polynomial::new(e.den),
            };
            entries.push(f);
        }
    }
    RationalMatrix::new(doc.m, entries)
}

pub fn to_json_model(h: &RationalMatrix) -> String {
    let m = h.dim();
    let doc = JsonModel {
        m,
        entries: (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| JsonEntry {
                        num: h.entry(i, j).num().coeffs().to_vec(),
                        den: h.entry(i, j).den().coeffs().to_vec(),
                    })
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model serializes")
}

/// Loads either format; a document starting with `{` is read as JSON.
pub fn parse_model(text: &str) -> Result<RationalMatrix> {
    if text.trim_start().starts_with('{') {
        parse_json_model(text)
    } else {
        parse_rational_matrix(text)
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<RationalMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_model(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_text_agree() {
        let text = "dim 2\n[ (50*s+2500)/(s^2+100*s+2501) , 50/(s^2+100*s+2501) ; 30/(s^2+100*s+2501) , (30*s+2501)/(s^2+100*s+2501) ]";
        let json = r#"{"m":2,"entries":[
            [{"num":[2500,50],"den":[2501,100,1]},{"num":[50],"den":[2501,100,1]}],
            [{"num":[30],"den":[2501,100,1]},{"num":[2501,30],"den":[2501,100,1]}]]}"#;
        assert_eq!(parse_model(text).unwrap(), parse_model(json).unwrap());
        let h = parse_model(text).unwrap();
        assert_eq!(parse_model(&to_json_model(&h)).unwrap(), h);
    }

    #[test]
    fn json_improper_rejected() {
        let json = r#"{"m":1,"entries":[[{"num":[0,0,1],"den":[1,1]}]]}"#;
        assert!(matches!(parse_model(json), Err(Error::Improper { .. })));
    }

    #[test]
    fn json_ragged_rejected() {
        let json = r#"{"m":2,"entries":[[{"num":[1],"den":[1]}],[{"num":[1],"den":[1]},{"num":[1],"den":[1]}]]}"#;
        assert!(matches!(parse_model(json), Err(Error::RowLength { .. })));
    }
}
