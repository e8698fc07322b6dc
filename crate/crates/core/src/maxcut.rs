//! Weighted Max-Cut instances, their ZZ Hamiltonian and the approximation ratio.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{check_num_qubits, DiagonalObservable};

/// At most this many minimizing bitstrings are kept; the count is always exact.
pub const MAX_LISTED_MINIMIZERS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected weighted graph with edges stored as `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    num_nodes: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Validates and normalizes `(i, j)` so that `i < j`. Edge order is kept.
    pub fn new(num_nodes: usize, edges: Vec<Edge>) -> Result<Self> {
        if num_nodes < 2 {
            return Err(Error::Instance(format!(
                "graph needs at least 2 nodes, got {num_nodes}"
            )));
        }
        if edges.is_empty() {
            return Err(Error::Instance("graph has no edges".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for e in edges {
            let (i, j) = (e.i.min(e.j), e.i.max(e.j));
            if i == j {
                return Err(Error::Instance(format!("self-loop on node {i}")));
            }
            if j >= num_nodes {
                return Err(Error::Instance(format!(
                    "node index {j} out of range for {num_nodes} nodes"
                )));
            }
            if !e.weight.is_finite() {
                return Err(Error::Instance(format!(
                    "edge ({i}, {j}) has non-finite weight"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Instance(format!("duplicate edge ({i}, {j})")));
            }
            normalized.push(Edge {
                i,
                j,
                weight: e.weight,
            });
        }
        Ok(Self {
            num_nodes,
            edges: normalized,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// E(z) for a single bitstring, summed in edge order.
    pub fn energy(&self, z: usize) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                if (z >> e.i) & 1 == (z >> e.j) & 1 {
                    e.weight
                } else {
                    -e.weight
                }
            })
            .sum()
    }

    /// Random graph for tests: each pair kept with probability `edge_prob`,
    /// weights uniform in `[0.1, 1.0)`. Always has at least one edge.
    pub fn random(num_nodes: usize, edge_prob: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..num_nodes {
            for j in i + 1..num_nodes {
                if rng.gen_bool(edge_prob.clamp(0.0, 1.0)) {
                    edges.push(Edge {
                        i,
                        j,
                        weight: rng.gen_range(0.1..1.0),
                    });
                }
            }
        }
        if edges.is_empty() && num_nodes >= 2 {
            edges.push(Edge {
                i: 0,
                j: 1,
                weight: rng.gen_range(0.1..1.0),
            });
        }
        Self::new(num_nodes, edges)
    }
}

impl fmt::Display for WeightedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes {}", self.num_nodes)?;
        for e in &self.edges {
            writeln!(f, "edge {} {} {}", e.i, e.j, e.weight)?;
        }
        Ok(())
    }
}

/// Diagonal of H_o = sum_{(i,j)} w_ij Z_i Z_j.
pub fn diagonal_energies(graph: &WeightedGraph) -> Result<DiagonalObservable> {
    check_num_qubits(graph.num_nodes)?;
    let energies = (0..1usize << graph.num_nodes)
        .map(|z| graph.energy(z))
        .collect();
    DiagonalObservable::new(graph.num_nodes, energies)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub c_min: f64,
    pub c_max: f64,
    /// First minimizers in index order, capped at [`MAX_LISTED_MINIMIZERS`].
    pub minimizers: Vec<usize>,
    pub minimizer_count: usize,
}

impl SpectrumSummary {
    /// `1 - (f - c_min) / (c_max - c_min)`, clamped to `[0, 1]`.
    pub fn approximation_ratio(&self, f_value: f64) -> Result<f64> {
        approximation_ratio(f_value, self)
    }
}

/// Exhaustive scan of the diagonal.
pub fn brute_force_extrema(obs: &DiagonalObservable) -> Result<SpectrumSummary> {
    check_num_qubits(obs.num_qubits())?;
    let (c_min, c_max) = obs.bounds();
    let mut minimizers = Vec::new();
    let mut minimizer_count = 0;
    for (z, &e) in obs.energies().iter().enumerate() {
        if e == c_min {
            minimizer_count += 1;
            if minimizers.len() < MAX_LISTED_MINIMIZERS {
                minimizers.push(z);
            }
        }
    }
    Ok(SpectrumSummary {
        c_min,
        c_max,
        minimizers,
        minimizer_count,
    })
}

pub fn approximation_ratio(f_value: f64, spectrum: &SpectrumSummary) -> Result<f64> {
    let span = spectrum.c_max - spectrum.c_min;
    if span <= 0.0 {
        return Err(Error::MetricUndefined(spectrum.c_min));
    }
    Ok((1.0 - (f_value - spectrum.c_min) / span).clamp(0.0, 1.0))
}

/// Formats bitstring `z` with qubit 0 leftmost.
pub fn bitstring(z: usize, num_qubits: usize) -> String {
    (0..num_qubits)
        .map(|n| if (z >> n) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses the `nodes N` / `edge i j w` text format; `#` starts a comment.
pub fn parse_instance(text: &str, path: &Path) -> Result<WeightedGraph> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut num_nodes: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match (num_nodes, fields.as_slice()) {
            (None, ["nodes", n]) => {
                let n: usize = n
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad node count '{n}'")))?;
                if n < 2 {
                    return Err(parse_err(
                        line_no,
                        format!("need at least 2 nodes, got {n}"),
                    ));
                }
                num_nodes = Some(n);
            }
            (None, _) => {
                return Err(parse_err(
                    line_no,
                    "expected 'nodes <N>' before any edge".into(),
                ))
            }
            (Some(_), ["nodes", ..]) => {
                return Err(parse_err(line_no, "repeated 'nodes' line".into()))
            }
            (Some(n), ["edge", i, j, w]) => {
                let i: usize = i
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad node index '{i}'")))?;
                let j: usize = j
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad node index '{j}'")))?;
                let weight: f64 = w
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad weight '{w}'")))?;
                if !weight.is_finite() {
                    return Err(parse_err(line_no, format!("non-finite weight '{w}'")));
                }
                if i >= n || j >= n {
                    return Err(parse_err(
                        line_no,
                        format!("node index out of range for {n} nodes"),
                    ));
                }
                if i == j {
                    return Err(parse_err(line_no, format!("self-loop on node {i}")));
                }
                if !seen.insert((i.min(j), i.max(j))) {
                    return Err(parse_err(line_no, format!("duplicate edge ({i}, {j})")));
                }
                edges.push(Edge { i, j, weight });
            }
            (Some(_), _) => {
                return Err(parse_err(
                    line_no,
                    format!("expected 'edge <i> <j> <weight>', got '{content}'"),
                ))
            }
        }
    }
    let Some(n) = num_nodes else {
        return Err(parse_err(
            last_line.max(1),
            "missing 'nodes <N>' line".into(),
        ));
    };
    if edges.is_empty() {
        return Err(parse_err(last_line.max(1), "instance has no edges".into()));
    }
    WeightedGraph::new(n, edges)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Instance(format!("{}: {e}", path.display())))?;
    parse_instance(&text, path)
}

const SEVEN_NODE: &str = include_str!("../data/maxcut7.txt");
const TEN_NODE: &str = include_str!("../data/maxcut10.txt");

/// The bundled 7-node, 9-edge instance.
pub fn seven_node_instance() -> WeightedGraph {
    parse_instance(SEVEN_NODE, &PathBuf::from("data/maxcut7.txt")).expect("bundled instance")
}

/// The bundled 10-node, 14-edge instance.
pub fn ten_node_instance() -> WeightedGraph {
    parse_instance(TEN_NODE, &PathBuf::from("data/maxcut10.txt")).expect("bundled instance")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> WeightedGraph {
        WeightedGraph::new(
            2,
            vec![Edge {
                i: 0,
                j: 1,
                weight: 1.0,
            }],
        )
        .unwrap()
    }

    // Independent per-bitstring oracle: spins from bits, product per edge.
    fn oracle_energy(graph: &WeightedGraph, z: usize) -> f64 {
        let spin = |n: usize| if z & (1 << n) == 0 { 1.0 } else { -1.0 };
        let mut total = 0.0;
        for e in graph.edges() {
            total += e.weight * spin(e.i) * spin(e.j);
        }
        total
    }

    #[test]
    fn single_edge_energies() {
        let obs = diagonal_energies(&single_edge()).unwrap();
        assert_eq!(obs.energies(), &[1.0, -1.0, -1.0, 1.0]);
        let s = brute_force_extrema(&obs).unwrap();
        assert_eq!((s.c_min, s.c_max), (-1.0, 1.0));
        assert_eq!(s.minimizers, vec![1, 2]);
    }

    #[test]
    fn seven_node_energies_and_extrema() {
        let g = seven_node_instance();
        assert_eq!(g.edges().len(), 9);
        assert_eq!(
            g.edges()[0],
            Edge {
                i: 0,
                j: 4,
                weight: 0.73
            }
        );
        let obs = diagonal_energies(&g).unwrap();
        let total = g.total_weight();
        assert!((total - 5.17).abs() < 1e-12);
        assert_eq!(obs.energy(0), total);
        // {0,1,2,3} | {4,5,6}: bits 4,5,6 set.
        assert_eq!(obs.energy(0b111_0000), -total);
        let s = brute_force_extrema(&obs).unwrap();
        assert_eq!(s.c_max, total);
        assert_eq!(s.c_min, -total);
        assert_eq!(s.minimizers, vec![0b000_1111, 0b111_0000]);
        for z in 0..128 {
            assert!((obs.energy(z) - oracle_energy(&g, z)).abs() < 1e-12);
        }
    }

    #[test]
    fn ten_node_extrema_above_total_weight() {
        let g = ten_node_instance();
        assert_eq!(g.edges().len(), 14);
        assert_eq!(
            g.edges()[13],
            Edge {
                i: 8,
                j: 9,
                weight: 0.15
            }
        );
        let obs = diagonal_energies(&g).unwrap();
        let s = brute_force_extrema(&obs).unwrap();
        let oracle_min = (0..1024)
            .map(|z| oracle_energy(&g, z))
            .fold(f64::INFINITY, f64::min);
        assert!((s.c_min - oracle_min).abs() < 1e-12);
        assert!(s.c_min > -g.total_weight() + 1e-9);
        assert!(s.minimizer_count >= 2 && s.minimizer_count.is_multiple_of(2));
    }

    #[test]
    fn bit_flip_symmetry() {
        for g in [seven_node_instance(), ten_node_instance()] {
            let obs = diagonal_energies(&g).unwrap();
            let mask = (1usize << g.num_nodes()) - 1;
            for z in 0..=mask {
                assert_eq!(obs.energy(z), obs.energy(z ^ mask));
            }
        }
    }

    #[test]
    fn ratio_endpoints() {
        let obs = diagonal_energies(&seven_node_instance()).unwrap();
        let s = brute_force_extrema(&obs).unwrap();
        assert_eq!(approximation_ratio(s.c_min, &s).unwrap(), 1.0);
        assert_eq!(approximation_ratio(s.c_max, &s).unwrap(), 0.0);
        assert_eq!(approximation_ratio(0.0, &s).unwrap(), 0.5);
    }

    #[test]
    fn ratio_degenerate_spectrum() {
        let s = SpectrumSummary {
            c_min: 1.0,
            c_max: 1.0,
            minimizers: vec![0],
            minimizer_count: 1,
        };
        assert!(matches!(
            approximation_ratio(1.0, &s),
            Err(Error::MetricUndefined(_))
        ));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let p = Path::new("x.txt");
        let cases = [
            ("nodes 3\n", 1),
            ("nodes 3\nedge 0 1 0.5\nedge 1 0 0.2\n", 3),
            ("# header\nnodes 3\nedge 0 3 0.5\n", 3),
            ("nodes 3\nedge 0 1 abc\n", 2),
            ("edge 0 1 0.5\n", 1),
            ("nodes 3\nvertex 0\n", 2),
        ];
        for (text, line) in cases {
            match parse_instance(text, p) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn parse_accepts_comments_and_negative_weights() {
        let g = parse_instance(
            "nodes 3 # three\n\n# c\nedge 2 0 -0.5\nedge 0 1 1e-1\n",
            Path::new("y"),
        )
        .unwrap();
        assert_eq!(
            g.edges()[0],
            Edge {
                i: 0,
                j: 2,
                weight: -0.5
            }
        );
        assert_eq!(g.edges()[1].weight, 0.1);
    }

    #[test]
    fn display_round_trips() {
        let g = ten_node_instance();
        let back = parse_instance(&g.to_string(), Path::new("z")).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn random_graph_is_valid_and_seeded() {
        let a = WeightedGraph::random(6, 0.5, 9).unwrap();
        let b = WeightedGraph::random(6, 0.5, 9).unwrap();
        assert_eq!(a, b);
        assert!(!a.edges().is_empty());
    }
}
