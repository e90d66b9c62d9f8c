//! Symbolic flow models and homology-lattice conventions.
//!
//! A [`MarkovFlowModel`] is a finite directed graph whose edges carry a
//! strictly positive traversal time ("length", in seconds) and an integer
//! weight vector recording how much each edge winds around the k independent
//! homology directions. Closed walks in the graph stand in for periodic
//! orbits of a flow; the walk's length and the sum of its edge weights are
//! the orbit's period and homology class.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::error::Error;
use crate::Result;

/// An element of the homology lattice Z^k.
///
/// Values are plain integer coordinates; addition, negation and lexicographic
/// order are the componentwise operations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomologyClass(Vec<i64>);

impl HomologyClass {
    pub fn new(coords: Vec<i64>) -> Self {
        HomologyClass(coords)
    }

    pub fn zero(k: usize) -> Self {
        HomologyClass(vec![0; k])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "homology dimension mismatch");
        HomologyClass(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "homology dimension mismatch");
        HomologyClass(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        HomologyClass(self.0.iter().map(|a| -a).collect())
    }

    /// Coordinates as floats, for rescaled-class statistics.
    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&a| a as f64).collect()
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Componentwise integer part of a real homology vector.
///
/// The fundamental domain for the lattice is fixed as [0,1)^k, so the integer
/// part is the componentwise floor: `rho - integer_part(rho)` always lies in
/// [0,1)^k.
pub fn integer_part(rho: &[f64]) -> Result<HomologyClass> {
    let mut coords = Vec::with_capacity(rho.len());
    for &x in rho {
        if !x.is_finite() {
            return Err(Error::Domain(format!(
                "integer part of non-finite entry {x}"
            )));
        }
        coords.push(x.floor() as i64);
    }
    Ok(HomologyClass(coords))
}

/// One directed edge of a flow model.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Index of the source vertex.
    pub source: usize,
    /// Index of the target vertex.
    pub target: usize,
    /// Traversal time, strictly positive (seconds).
    pub length: f64,
    /// Homology winding of the edge.
    pub weight: HomologyClass,
}

/// A finite symbolic model of a flow: a directed graph with positive edge
/// lengths and integer homology weights.
#[derive(Debug, Clone)]
pub struct MarkovFlowModel {
    k: usize,
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

/// Raw model file schema. Unknown fields are rejected so that typos in model
/// files fail loudly instead of being ignored.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    k: usize,
    vertices: Vec<String>,
    edges: Vec<EdgeFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    from: String,
    to: String,
    length: f64,
    weight: Vec<i64>,
}

impl MarkovFlowModel {
    /// Build a model from parts, checking structural invariants: k >= 1,
    /// nonempty vertex set, at least two edges, resolvable endpoints,
    /// strictly positive finite lengths, and weight dimension k throughout.
    pub fn new(k: usize, vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Structure("Betti number k must be >= 1".into()));
        }
        if vertices.is_empty() {
            return Err(Error::Structure("vertex set is empty".into()));
        }
        if edges.len() < 2 {
            return Err(Error::Structure(
                "model needs at least two edges to carry infinitely many orbits".into(),
            ));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.source >= vertices.len() || e.target >= vertices.len() {
                return Err(Error::Structure(format!(
                    "edge {i} references a vertex outside the vertex set"
                )));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::Domain(format!(
                    "edge {i} has non-positive length {}",
                    e.length
                )));
            }
            if e.weight.dim() != k {
                return Err(Error::Structure(format!(
                    "edge {i} weight has dimension {}, expected k={k}",
                    e.weight.dim()
                )));
            }
        }
        Ok(MarkovFlowModel { k, vertices, edges })
    }

    /// Parse a model from its on-disk TOML form.
    ///
    /// The grammar is: top-level integer `k`, array `vertices` of names, and
    /// array of `[[edges]]` tables with fields `from`, `to`, `length`,
    /// `weight` (array of k integers). Unknown fields anywhere are an error.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: ModelFile = toml::from_str(text)
            .map_err(|e| Error::Structure(format!("model file parse error: {e}")))?;
        let index_of = |name: &str| raw.vertices.iter().position(|v| v == name);
        let mut edges = Vec::with_capacity(raw.edges.len());
        for (i, e) in raw.edges.iter().enumerate() {
            let source = index_of(&e.from).ok_or_else(|| {
                Error::Structure(format!("edge {i}: unknown source vertex {:?}", e.from))
            })?;
            let target = index_of(&e.to).ok_or_else(|| {
                Error::Structure(format!("edge {i}: unknown target vertex {:?}", e.to))
            })?;
            edges.push(Edge {
                source,
                target,
                length: e.length,
                weight: HomologyClass::new(e.weight.clone()),
            });
        }
        MarkovFlowModel::new(raw.k, raw.vertices, edges)
    }

    /// Load a model file from disk.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn betti_number(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-edge indices grouped by source vertex, in edge-index order.
    pub(crate) fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.source].push(i);
        }
        out
    }

    /// True when every vertex reaches every other along directed edges.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.vertices.len();
        let out = self.out_edges();
        let reaches_all = |start: usize, forward: bool| -> bool {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            let mut count = 1;
            while let Some(v) = queue.pop_front() {
                let next: Vec<usize> = if forward {
                    out[v].iter().map(|&e| self.edges[e].target).collect()
                } else {
                    self.edges
                        .iter()
                        .filter(|e| e.target == v)
                        .map(|e| e.source)
                        .collect()
                };
                for w in next {
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        queue.push_back(w);
                    }
                }
            }
            count == n
        };
        reaches_all(0, true) && reaches_all(0, false)
    }

    /// Fail unless the model passed validation (strong connectivity).
    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.is_strongly_connected() {
            Ok(())
        } else {
            Err(Error::Domain(
                "model is not strongly connected; run validation first".into(),
            ))
        }
    }

    /// A 64-bit content hash of the model (FNV-1a over a canonical encoding),
    /// used to tag reports with the model they came from.
    pub fn content_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(&(self.k as u64).to_le_bytes());
        for v in &self.vertices {
            eat(v.as_bytes());
            eat(&[0]);
        }
        for e in &self.edges {
            eat(&(e.source as u64).to_le_bytes());
            eat(&(e.target as u64).to_le_bytes());
            eat(&e.length.to_bits().to_le_bytes());
            for &w in e.weight.coords() {
                eat(&w.to_le_bytes());
            }
        }
        h
    }
}

/// Result of validating a model against the hypotheses the asymptotic
/// predictions require.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// Whether the directed graph is strongly connected. Models failing this
    /// are rejected by every downstream operation.
    pub strongly_connected: bool,
    /// Set when all edge-length ratios look rational (within 1e-9), which
    /// signals the suspension may fail weak-mixing. Heuristic only: the
    /// counting identities hold regardless, but the Gaussian asymptotics
    /// need non-arithmetic lengths.
    pub lattice_warning: bool,
    /// Betti number of the model.
    pub k: usize,
    /// Number of edges.
    pub edge_count: usize,
}

/// Validate a model: strong connectivity (graph search both ways) and the
/// rational-length-ratio heuristic. Pure: identical inputs give identical
/// reports.
pub fn validate_model(model: &MarkovFlowModel) -> ValidationReport {
    ValidationReport {
        strongly_connected: model.is_strongly_connected(),
        lattice_warning: all_ratios_rational(model),
        k: model.betti_number(),
        edge_count: model.edges().len(),
    }
}

/// True when every edge length is, within tolerance 1e-9, an integer multiple
/// of a common unit (checked against the shortest edge via continued-fraction
/// rational reconstruction of each ratio).
fn all_ratios_rational(model: &MarkovFlowModel) -> bool {
    let base = model
        .edges()
        .iter()
        .map(|e| e.length)
        .fold(f64::INFINITY, f64::min);
    model
        .edges()
        .iter()
        .all(|e| is_nearly_rational(e.length / base, 1e-9))
}

/// Does `x` lie within `tol` of a rational p/q with a small denominator?
/// Continued-fraction convergents with denominators up to 1000; beyond that
/// every real admits approximants at this tolerance, so a larger cap would
/// flag genuinely irrational ratios too.
fn is_nearly_rational(x: f64, tol: f64) -> bool {
    let mut a = x;
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, a.floor() as i64, 1i64);
    for _ in 0..40 {
        let approx = p1 as f64 / q1 as f64;
        if (x - approx).abs() <= tol * x.abs().max(1.0) {
            return true;
        }
        let frac = a - a.floor();
        if frac.abs() < 1e-15 {
            break;
        }
        a = 1.0 / frac;
        let ai = a.floor() as i64;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if q1 > 1_000 {
            break;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const GOLDEN_RATIO: f64 = 1.618033988749895;

    /// One vertex, two loops: lengths 1 and the golden ratio, weights +1/-1.
    pub(crate) fn golden_model() -> MarkovFlowModel {
        MarkovFlowModel::new(
            1,
            vec!["v".into()],
            vec![
                Edge {
                    source: 0,
                    target: 0,
                    length: 1.0,
                    weight: HomologyClass::new(vec![1]),
                },
                Edge {
                    source: 0,
                    target: 0,
                    length: GOLDEN_RATIO,
                    weight: HomologyClass::new(vec![-1]),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn golden_model_validates_without_lattice_warning() {
        let report = validate_model(&golden_model());
        assert!(report.strongly_connected);
        assert!(!report.lattice_warning, "golden ratio is irrational");
        assert_eq!(report.k, 1);
        assert_eq!(report.edge_count, 2);
    }

    #[test]
    fn rational_lengths_raise_lattice_warning() {
        let m = MarkovFlowModel::new(
            1,
            vec!["v".into()],
            vec![
                Edge {
                    source: 0,
                    target: 0,
                    length: 1.0,
                    weight: HomologyClass::new(vec![1]),
                },
                Edge {
                    source: 0,
                    target: 0,
                    length: 2.0,
                    weight: HomologyClass::new(vec![-1]),
                },
            ],
        )
        .unwrap();
        assert!(validate_model(&m).lattice_warning);
    }

    #[test]
    fn one_way_graph_is_not_strongly_connected() {
        let m = MarkovFlowModel::new(
            1,
            vec!["a".into(), "b".into()],
            vec![
                Edge {
                    source: 0,
                    target: 1,
                    length: 1.0,
                    weight: HomologyClass::new(vec![0]),
                },
                Edge {
                    source: 0,
                    target: 1,
                    length: 1.5,
                    weight: HomologyClass::new(vec![1]),
                },
            ],
        )
        .unwrap();
        let report = validate_model(&m);
        assert!(!report.strongly_connected);
    }

    #[test]
    fn structural_errors_are_rejected() {
        // dangling vertex reference
        let err = MarkovFlowModel::new(
            1,
            vec!["a".into()],
            vec![
                Edge {
                    source: 0,
                    target: 5,
                    length: 1.0,
                    weight: HomologyClass::new(vec![0]),
                },
                Edge {
                    source: 0,
                    target: 0,
                    length: 1.0,
                    weight: HomologyClass::new(vec![0]),
                },
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Structure(_)));

        // zero length
        let err = MarkovFlowModel::new(
            1,
            vec!["a".into()],
            vec![
                Edge {
                    source: 0,
                    target: 0,
                    length: 0.0,
                    weight: HomologyClass::new(vec![0]),
                },
                Edge {
                    source: 0,
                    target: 0,
                    length: 1.0,
                    weight: HomologyClass::new(vec![0]),
                },
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn integer_part_matches_floor() {
        assert_eq!(integer_part(&[0.0]).unwrap(), HomologyClass::new(vec![0]));
        assert_eq!(
            integer_part(&[1.9, -0.3]).unwrap(),
            HomologyClass::new(vec![1, -1])
        );
        assert!(integer_part(&[f64::NAN]).is_err());
        assert!(integer_part(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn toml_roundtrip_and_unknown_field_rejection() {
        let text = r#"
            k = 1
            vertices = ["v"]

            [[edges]]
            from = "v"
            to = "v"
            length = 1.0
            weight = [1]

            [[edges]]
            from = "v"
            to = "v"
            length = 1.618033988749895
            weight = [-1]
        "#;
        let m = MarkovFlowModel::from_toml_str(text).unwrap();
        assert_eq!(m.betti_number(), 1);
        assert_eq!(m.edges().len(), 2);
        assert_eq!(m.edges()[1].length, GOLDEN_RATIO);

        let bad = text.replace("length = 1.0", "length = 1.0\nlabel = \"x\"");
        assert!(MarkovFlowModel::from_toml_str(&bad).is_err());

        let dangling = text.replace("to = \"v\"", "to = \"w\"");
        assert!(MarkovFlowModel::from_toml_str(&dangling).is_err());
    }

    #[test]
    fn content_hash_distinguishes_models() {
        let a = golden_model();
        let mut edges: Vec<Edge> = a.edges().to_vec();
        edges[0].length = 1.25;
        let b = MarkovFlowModel::new(1, a.vertex_names().to_vec(), edges).unwrap();
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash(), golden_model().content_hash());
    }
}
