//! Finite graphs with loops and multiple edges, metric structure with exact
//! rational edge lengths, orientation, degeneration, and the JSON file format.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected edge; loops are stored with both endpoints equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// A finite graph: vertex labels plus an endpoint map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(Error::Parse(format!("repeated vertex label {v:?}")));
            }
        }
        let mut ids = std::collections::HashSet::new();
        for e in &edges {
            if e.u >= vertices.len() || e.v >= vertices.len() {
                return Err(Error::Parse(format!("edge {:?} has out-of-range endpoint", e.id)));
            }
            if !ids.insert(e.id.clone()) {
                return Err(Error::Parse(format!("repeated edge id {:?}", e.id)));
            }
        }
        Ok(Graph { vertices, edges })
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// A directed copy of an edge. Every edge — loops included — has two distinct
/// orientations, with [`opposite`] swapping them; this is what lets a loop be
/// traversed repeatedly in one direction without backtracking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrientedEdge {
    pub edge: usize,
    pub src: usize,
    pub dst: usize,
}

/// Index of the opposite orientation: `2i ↔ 2i+1`.
pub fn opposite(k: usize) -> usize {
    k ^ 1
}

/// The two oriented copies of every edge, `2i` forward and `2i+1` backward.
pub fn orient(graph: &Graph) -> Vec<OrientedEdge> {
    let mut out = Vec::with_capacity(2 * graph.edges.len());
    for (i, e) in graph.edges.iter().enumerate() {
        out.push(OrientedEdge { edge: i, src: e.u, dst: e.v });
        out.push(OrientedEdge { edge: i, src: e.v, dst: e.u });
    }
    out
}

/// A graph together with positive rational edge lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    pub graph: Graph,
    pub lengths: Vec<BigRational>,
}

impl MetricGraph {
    pub fn new(graph: Graph, lengths: Vec<BigRational>) -> Result<Self> {
        if lengths.len() != graph.edges.len() {
            return Err(Error::Parse(format!(
                "{} lengths for {} edges",
                lengths.len(),
                graph.edges.len()
            )));
        }
        for (e, l) in graph.edges.iter().zip(&lengths) {
            if !l.is_positive() {
                return Err(Error::Precondition(format!(
                    "edge {:?} has non-positive length {l}",
                    e.id
                )));
            }
        }
        Ok(MetricGraph { graph, lengths })
    }

    pub fn length_f64(&self, edge: usize) -> f64 {
        use num_traits::ToPrimitive;
        self.lengths[edge].to_f64().unwrap_or(f64::NAN)
    }
}

/// What to do with each edge when passing to a moduli-space boundary point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Directive {
    /// Length → 0: identify the endpoints and remove the edge.
    Contract,
    /// Length → ∞: remove the edge.
    Delete,
    Keep,
}

/// Result of a degeneration, with connectivity reported rather than enforced.
#[derive(Clone, Debug)]
pub struct Degeneration {
    pub metric_graph: MetricGraph,
    pub connected: bool,
}

/// Applies contract/delete/keep directives edge by edge.
pub fn degenerate(mg: &MetricGraph, directives: &[Directive]) -> Result<Degeneration> {
    if directives.len() != mg.graph.edges.len() {
        return Err(Error::Precondition(format!(
            "{} directives for {} edges",
            directives.len(),
            mg.graph.edges.len()
        )));
    }
    for (e, d) in mg.graph.edges.iter().zip(directives) {
        if *d == Directive::Contract && e.is_loop() {
            return Err(Error::Precondition(format!(
                "cannot contract loop {:?}: its length class has no zero limit",
                e.id
            )));
        }
    }
    // union-find over vertices for the contracted edges
    let mut parent: Vec<usize> = (0..mg.graph.vertices.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (e, d) in mg.graph.edges.iter().zip(directives) {
        if *d == Directive::Contract {
            let (ru, rv) = (find(&mut parent, e.u), find(&mut parent, e.v));
            parent[ru.max(rv)] = ru.min(rv);
        }
    }
    let mut label_of: HashMap<usize, usize> = HashMap::new();
    let mut vertices = Vec::new();
    for v in 0..mg.graph.vertices.len() {
        let r = find(&mut parent, v);
        if r == v {
            label_of.insert(v, vertices.len());
            vertices.push(mg.graph.vertices[v].clone());
        }
    }
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    for ((e, d), l) in mg.graph.edges.iter().zip(directives).zip(&mg.lengths) {
        if *d != Directive::Keep {
            continue;
        }
        let u = label_of[&find(&mut parent, e.u)];
        let v = label_of[&find(&mut parent, e.v)];
        edges.push(Edge { id: e.id.clone(), u, v });
        lengths.push(l.clone());
    }
    let graph = Graph::new(vertices, edges)?;
    let connected = graph.is_connected();
    Ok(Degeneration { metric_graph: MetricGraph::new(graph, lengths)?, connected })
}

/// Exact decimal-to-rational parsing, e.g. `"1.25"` → `5/4`.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match t.split_once('.') {
        Some((i, f)) => (i, f),
        None => (t, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("empty decimal literal {s:?}")));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("malformed decimal literal {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| {
        Error::Parse(format!("malformed decimal literal {s:?}"))
    })?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = BigRational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Rational to plain decimal string when the denominator is 10-smooth,
/// otherwise `p/q`.
pub fn decimal_string(r: &BigRational) -> String {
    let mut q = r.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&q % &two).is_zero() {
        q /= &two;
        twos += 1;
    }
    while (&q % &five).is_zero() {
        q /= &five;
        fives += 1;
    }
    if !q.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    let scaled = r.numer() * BigInt::from(10u32).pow(places) / r.denom();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits = format!("{:0>width$}", digits, width = places as usize + 1);
    let split = digits.len() - places as usize;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&digits[..split]);
    if places > 0 {
        out.push('.');
        out.push_str(&digits[split..]);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct FileEdge {
    id: String,
    ends: Vec<String>,
    length: String,
}

#[derive(Serialize, Deserialize)]
struct FileGraph {
    vertices: Vec<String>,
    edges: Vec<FileEdge>,
}

/// Loads a metric graph from the JSON format
/// `{"vertices":[…],"edges":[{"id":…,"ends":[v]|[v,w],"length":"…"}]}`.
pub fn from_json(text: &str) -> Result<MetricGraph> {
    let file: FileGraph =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")))?;
    let index: HashMap<&str, usize> = file
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    for fe in &file.edges {
        let look = |label: &str| {
            index
                .get(label)
                .copied()
                .ok_or_else(|| Error::Parse(format!("edge {:?} references unknown vertex {label:?}", fe.id)))
        };
        let (u, v) = match fe.ends.as_slice() {
            [a] => (look(a)?, look(a)?),
            [a, b] => (look(a)?, look(b)?),
            other => {
                return Err(Error::Parse(format!(
                    "edge {:?} has {} endpoints; expected 1 or 2",
                    fe.id,
                    other.len()
                )))
            }
        };
        edges.push(Edge { id: fe.id.clone(), u, v });
        lengths.push(parse_decimal(&fe.length)?);
    }
    MetricGraph::new(Graph::new(file.vertices, edges)?, lengths)
}

/// Serializes a metric graph back to the JSON file format.
pub fn to_json(mg: &MetricGraph) -> String {
    let file = FileGraph {
        vertices: mg.graph.vertices.clone(),
        edges: mg
            .graph
            .edges
            .iter()
            .zip(&mg.lengths)
            .map(|(e, l)| FileEdge {
                id: e.id.clone(),
                ends: if e.is_loop() {
                    vec![mg.graph.vertices[e.u].clone()]
                } else {
                    vec![mg.graph.vertices[e.u].clone(), mg.graph.vertices[e.v].clone()]
                },
                length: decimal_string(l),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("graph serialization")
}

fn rat_int(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// Bouquet of loops at one vertex with the given lengths.
pub fn bouquet(lengths: &[BigRational]) -> MetricGraph {
    let edges = (0..lengths.len())
        .map(|i| Edge { id: format!("loop{}", i + 1), u: 0, v: 0 })
        .collect();
    let graph = Graph::new(vec!["v".into()], edges).expect("bouquet");
    MetricGraph::new(graph, lengths.to_vec()).expect("bouquet lengths")
}

/// Theta graph: two vertices joined by three parallel unit edges.
pub fn theta_graph() -> MetricGraph {
    let edges = (0..3)
        .map(|i| Edge { id: format!("e{}", i + 1), u: 0, v: 1 })
        .collect();
    let graph = Graph::new(vec!["u".into(), "v".into()], edges).expect("theta");
    MetricGraph::new(graph, vec![rat_int(1), rat_int(1), rat_int(1)]).expect("theta lengths")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_counts() {
        let loop1 = bouquet(&[rat_int(1)]);
        let o = orient(&loop1.graph);
        assert_eq!(o.len(), 2);
        assert_eq!(opposite(0), 1);
        assert_eq!(opposite(1), 0);
        assert_ne!(0, opposite(0)); // fixed-point free, loops included

        assert_eq!(orient(&theta_graph().graph).len(), 6);

        let empty = Graph::new(vec!["v".into()], vec![]).unwrap();
        assert!(orient(&empty).is_empty());
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("1.25").unwrap(), BigRational::new(5.into(), 4.into()));
        assert_eq!(parse_decimal("0.3").unwrap(), BigRational::new(3.into(), 10.into()));
        assert_eq!(parse_decimal("7").unwrap(), rat_int(7));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("").is_err());
        assert_eq!(decimal_string(&parse_decimal("1.25").unwrap()), "1.25");
        assert_eq!(decimal_string(&rat_int(7)), "7");
        assert_eq!(
            decimal_string(&BigRational::new(1.into(), 3.into())),
            "1/3"
        );
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{
            "vertices": ["u", "v"],
            "edges": [
                {"id": "a", "ends": ["u", "v"], "length": "1.5"},
                {"id": "b", "ends": ["v"], "length": "2"}
            ]
        }"#;
        let mg = from_json(text).unwrap();
        assert_eq!(mg.graph.edges.len(), 2);
        assert!(mg.graph.edges[1].is_loop());
        assert_eq!(mg.lengths[0], BigRational::new(3.into(), 2.into()));
        let back = from_json(&to_json(&mg)).unwrap();
        assert_eq!(back, mg);
    }

    #[test]
    fn json_rejections() {
        assert!(from_json("{").is_err());
        assert!(from_json(r#"{"vertices":["u"],"edges":[{"id":"a","ends":["x"],"length":"1"}]}"#).is_err());
        assert!(from_json(r#"{"vertices":["u"],"edges":[{"id":"a","ends":["u"],"length":"0"}]}"#).is_err());
        assert!(from_json(r#"{"vertices":["u"],"edges":[{"id":"a","ends":[],"length":"1"}]}"#).is_err());
    }

    #[test]
    fn degeneration_examples() {
        // path u —(a)— v —(b)— w, contract a: loopless 2-vertex graph remains
        let g = Graph::new(
            vec!["u".into(), "v".into(), "w".into()],
            vec![
                Edge { id: "a".into(), u: 0, v: 1 },
                Edge { id: "b".into(), u: 1, v: 2 },
            ],
        )
        .unwrap();
        let mg = MetricGraph::new(g, vec![rat_int(1), rat_int(2)]).unwrap();
        let d = degenerate(&mg, &[Directive::Contract, Directive::Keep]).unwrap();
        assert_eq!(d.metric_graph.graph.vertices.len(), 2);
        assert_eq!(d.metric_graph.graph.edges.len(), 1);
        assert!(d.connected);

        let d = degenerate(&mg, &[Directive::Delete, Directive::Keep]).unwrap();
        assert_eq!(d.metric_graph.graph.vertices.len(), 3);
        assert!(!d.connected); // u is cut off — allowed, reported

        let all_keep = degenerate(&mg, &[Directive::Keep, Directive::Keep]).unwrap();
        assert_eq!(all_keep.metric_graph, mg);

        let loop1 = bouquet(&[rat_int(1)]);
        assert!(degenerate(&loop1, &[Directive::Contract]).is_err());
    }

    #[test]
    fn contraction_makes_loops() {
        // contracting one side of a 2-cycle turns the other into a loop
        let g = Graph::new(
            vec!["u".into(), "v".into()],
            vec![
                Edge { id: "a".into(), u: 0, v: 1 },
                Edge { id: "b".into(), u: 0, v: 1 },
            ],
        )
        .unwrap();
        let mg = MetricGraph::new(g, vec![rat_int(1), rat_int(3)]).unwrap();
        let d = degenerate(&mg, &[Directive::Contract, Directive::Keep]).unwrap();
        assert_eq!(d.metric_graph.graph.vertices.len(), 1);
        assert!(d.metric_graph.graph.edges[0].is_loop());
        assert_eq!(d.metric_graph.lengths[0], rat_int(3));
    }
}
