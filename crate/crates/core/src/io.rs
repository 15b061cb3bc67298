//! JSON exchange formats.
//!
//! ```json
//! {"vertices": ["a", "b", "c"], "maximal_simplices": [["a", "b"], ["b", "c"]]}
//! {"type": "word"}
//! {"type": "explicit", "order": ["a", "b", "c"], "matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]], "A": 1, "B": 0}
//! {"a": 0.25, "b": 0.75}
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{BarycentricPoint, SimplicialComplex};
use crate::error::{Error, Result};
use crate::path_metric::PathWitness;
use crate::vertex_metrics::{validate_vertex_metric, VertexMetric, WordMetricTable};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub vertices: Vec<String>,
    pub maximal_simplices: Vec<Vec<String>>,
}

impl ComplexFile {
    pub fn from_complex(complex: &SimplicialComplex) -> Self {
        ComplexFile {
            vertices: complex.labels().to_vec(),
            maximal_simplices: complex.maximal_simplices().iter().map(|s| complex.simplex_labels(s)).collect(),
        }
    }

    pub fn build(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::build(&self.vertices, self.maximal_simplices.iter())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MetricFile {
    /// The word metric, with `C = 1` and `(A, B) = (1, 0)`.
    Word,
    Explicit {
        /// Labels indexing the rows and columns of `matrix`.
        order: Vec<String>,
        matrix: Vec<Vec<f64>>,
        #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
        #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
    },
}

impl MetricFile {
    /// Validates the metric against `complex` and attaches its constants.
    pub fn build(&self, complex: &SimplicialComplex, word: &WordMetricTable) -> Result<VertexMetric> {
        match self {
            MetricFile::Word => Ok(VertexMetric::from_word(word)),
            MetricFile::Explicit { order, matrix, c, a, b } => {
                let n = complex.vertex_count();
                if order.len() != n || matrix.len() != n {
                    return Err(Error::MetricShape { rows: matrix.len(), cols: order.len(), expected: n });
                }
                let mut pos = vec![usize::MAX; n];
                for (i, label) in order.iter().enumerate() {
                    let v = complex.vertex_id(label)?;
                    if pos[v] != usize::MAX {
                        return Err(Error::DuplicateVertex(label.clone()));
                    }
                    pos[v] = i;
                }
                let mut reordered = vec![vec![0.0; n]; n];
                for u in 0..n {
                    let row = &matrix[pos[u]];
                    if row.len() != n {
                        return Err(Error::MetricShape { rows: n, cols: row.len(), expected: n });
                    }
                    for v in 0..n {
                        reordered[u][v] = row[pos[v]];
                    }
                }
                let mut metric = validate_vertex_metric(complex, word, &reordered)?;
                if let Some(c) = c {
                    metric = metric.with_linear_bound(word, Some(*c))?;
                }
                match (a, b) {
                    (Some(a), Some(b)) => metric.with_qi(word, *a, *b),
                    (None, None) => Ok(metric),
                    _ => Err(Error::Parse("quasi-isometry constants need both A and B".into())),
                }
            }
        }
    }

    pub fn from_metric(complex: &SimplicialComplex, metric: &VertexMetric) -> Self {
        let qi = metric.qi();
        MetricFile::Explicit {
            order: complex.labels().to_vec(),
            matrix: metric.matrix(),
            c: Some(metric.linear_bound()),
            a: qi.map(|q| q.a),
            b: qi.map(|q| q.b),
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn complex_from_json(text: &str) -> Result<SimplicialComplex> {
    parse::<ComplexFile>(text)?.build()
}

pub fn complex_to_json(complex: &SimplicialComplex) -> String {
    serde_json::to_string_pretty(&ComplexFile::from_complex(complex)).expect("complex serializes")
}

pub fn read_complex(path: &Path) -> Result<SimplicialComplex> {
    complex_from_json(&read(path)?)
}

pub fn metric_from_json(text: &str) -> Result<MetricFile> {
    parse(text)
}

/// Reads a metric file, or the literal `word` for the word metric.
pub fn read_metric(spec: &str) -> Result<MetricFile> {
    if spec == "word" {
        return Ok(MetricFile::Word);
    }
    metric_from_json(&read(Path::new(spec))?)
}

/// Parses an inline point such as `{"u": 0.5, "v": 0.5}`.
pub fn point_from_json(complex: &SimplicialComplex, text: &str) -> Result<BarycentricPoint> {
    let weights: BTreeMap<String, f64> = parse(text)?;
    BarycentricPoint::from_labels(complex, weights.iter().map(|(k, &w)| (k.as_str(), w)))
}

pub fn point_to_json(complex: &SimplicialComplex, p: &BarycentricPoint) -> serde_json::Value {
    serde_json::to_value(p.to_labels(complex)).expect("weights serialize")
}

pub fn witness_to_json(complex: &SimplicialComplex, w: &PathWitness) -> serde_json::Value {
    serde_json::json!({
        "length": w.length,
        "points": w.points.iter().map(|p| point_to_json(complex, p)).collect::<Vec<_>>(),
        "carriers": w.carriers.iter().map(|s| complex.simplex_labels(s)).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::vertex_metrics::word_metric;

    #[test]
    fn complex_round_trip() {
        for k in [generators::tree(2, 3).unwrap(), generators::random(10, 0.3, 4, 3).unwrap()] {
            assert_eq!(complex_from_json(&complex_to_json(&k)).unwrap(), k);
        }
    }

    #[test]
    fn metric_files() {
        let k = generators::path(3).unwrap();
        let word = word_metric(&k).unwrap();
        let text = r#"{"type":"explicit","order":["v2","v1","v0"],
            "matrix":[[0,1,2],[1,0,1],[2,1,0]],"A":1,"B":0}"#;
        let m = metric_from_json(text).unwrap().build(&k, &word).unwrap();
        assert_eq!(m.matrix(), VertexMetric::from_word(&word).matrix());
        assert_eq!(m.linear_bound(), 1.0);

        let bad = r#"{"type":"explicit","order":["v0","v1","v2"],"matrix":[[0,1,5],[1,0,1],[5,1,0]]}"#;
        assert!(matches!(metric_from_json(bad).unwrap().build(&k, &word), Err(Error::InvalidMetric(_))));
        assert_eq!(read_metric("word").unwrap(), MetricFile::Word);
    }

    #[test]
    fn points_parse() {
        let k = generators::path(3).unwrap();
        let p = point_from_json(&k, r#"{"v0": 1, "v1": 3}"#).unwrap();
        assert_eq!(p.weight(1), 0.75);
        assert!(point_from_json(&k, r#"{"v0": 1, "v2": 1}"#).is_err());
        assert!(point_from_json(&k, "not json").is_err());
    }
}
