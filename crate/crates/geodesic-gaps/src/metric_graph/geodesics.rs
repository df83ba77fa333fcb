//! Non-backtracking closed geodesics of a finite metric graph: enumeration up
//! to a combinatorial length bound, cyclic canonicalization, primitive
//! periods, and the rational-graph gap-divergence check.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::precision::{certify_sign, working_bits, Interval};

use super::graph::{opposite, orient, MetricGraph, OrientedEdge};

/// A cyclic equivalence class of non-backtracking closed oriented-edge paths.
/// The stored word is the lexicographically minimal rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedGeodesic {
    /// Oriented-edge indices, canonical rotation.
    pub word: Vec<usize>,
    /// Primitive period: the word is `L(c)/L(c₀)` repeats of its first
    /// `period` entries.
    pub period: usize,
    /// Exact metric length `l(c)`.
    pub length: BigRational,
}

impl ClosedGeodesic {
    pub fn combinatorial_length(&self) -> usize {
        self.word.len()
    }

    pub fn is_primitive(&self) -> bool {
        self.period == self.word.len()
    }

    /// Human-readable word like `e1+·e2−`.
    pub fn display_word(&self, mg: &MetricGraph) -> String {
        self.word
            .iter()
            .map(|&k| {
                let sign = if k % 2 == 0 { '+' } else { '-' };
                format!("{}{}", mg.graph.edges[k / 2].id, sign)
            })
            .collect::<Vec<_>>()
            .join("·")
    }
}

fn minimal_rotation(word: &[usize]) -> Vec<usize> {
    let n = word.len();
    let mut best = 0usize;
    for cand in 1..n {
        for i in 0..n {
            match word[(cand + i) % n].cmp(&word[(best + i) % n]) {
                Ordering::Less => {
                    best = cand;
                    break;
                }
                Ordering::Greater => break,
                Ordering::Equal => {}
            }
        }
    }
    (0..n).map(|i| word[(best + i) % n]).collect()
}

fn primitive_period(word: &[usize]) -> usize {
    let n = word.len();
    'outer: for p in 1..=n {
        if n % p != 0 {
            continue;
        }
        for i in p..n {
            if word[i] != word[i - p] {
                continue 'outer;
            }
        }
        return p;
    }
    n
}

/// Successor lists of the non-backtracking walk: `succ[k]` holds every `k'`
/// with `src(k') = dst(k)` and `k' ≠ opposite(k)`.
pub fn successors(oriented: &[OrientedEdge]) -> Vec<Vec<usize>> {
    (0..oriented.len())
        .map(|k| {
            (0..oriented.len())
                .filter(|&k2| oriented[k2].src == oriented[k].dst && k2 != opposite(k))
                .collect()
        })
        .collect()
}

/// All closed geodesics with combinatorial length `≤ n_max`, powers included,
/// one entry per cyclic class.
pub fn enumerate_geodesics(mg: &MetricGraph, n_max: usize) -> Result<Vec<ClosedGeodesic>> {
    if n_max < 1 {
        return Err(Error::Precondition("n_max must be ≥ 1".into()));
    }
    let oriented = orient(&mg.graph);
    let succ = successors(&oriented);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    let mut word: Vec<usize> = Vec::with_capacity(n_max);

    // DFS over marked paths whose minimal oriented edge is the start edge;
    // each cyclic class is discovered at least once, the set deduplicates.
    fn dfs(
        word: &mut Vec<usize>,
        start: usize,
        n_max: usize,
        oriented: &[OrientedEdge],
        succ: &[Vec<usize>],
        seen: &mut HashSet<Vec<usize>>,
        out: &mut Vec<ClosedGeodesic>,
        mg: &MetricGraph,
    ) {
        let last = *word.last().unwrap();
        // closed and non-backtracking around the wrap?
        if oriented[last].dst == oriented[start].src && start != opposite(last) {
            let canon = minimal_rotation(word);
            if seen.insert(canon.clone()) {
                let period = primitive_period(&canon);
                let length = canon
                    .iter()
                    .fold(BigRational::zero(), |acc, &k| acc + &mg.lengths[k / 2]);
                out.push(ClosedGeodesic { word: canon, period, length });
            }
        }
        if word.len() == n_max {
            return;
        }
        for &k in &succ[last] {
            if k < start {
                continue; // start edge must stay minimal in the word
            }
            word.push(k);
            dfs(word, start, n_max, oriented, succ, seen, out, mg);
            word.pop();
        }
    }

    for start in 0..oriented.len() {
        word.push(start);
        dfs(&mut word, start, n_max, &oriented, &succ, &mut seen, &mut out, mg);
        word.pop();
    }
    out.sort_by(|a, b| {
        a.word
            .len()
            .cmp(&b.word.len())
            .then_with(|| a.word.cmp(&b.word))
    });
    Ok(out)
}

/// All geodesics with metric length `≤ cutoff` (exact comparison).
pub fn enumerate_geodesics_by_length(
    mg: &MetricGraph,
    cutoff: &BigRational,
) -> Result<Vec<ClosedGeodesic>> {
    let min_len = mg
        .lengths
        .iter()
        .min()
        .ok_or_else(|| Error::Precondition("graph has no edges".into()))?;
    let n_max = (cutoff / min_len)
        .floor()
        .to_integer()
        .try_into()
        .map_err(|_| Error::Precondition("cutoff too large".into()))?;
    if n_max < 1usize {
        return Ok(Vec::new());
    }
    let mut all = enumerate_geodesics(mg, n_max)?;
    all.retain(|c| &c.length <= cutoff);
    Ok(all)
}

/// One row of the rational-gap witness table: consecutive distinct lengths
/// `l < l'` with the certified check `e^{l'} − e^l ≥ θ·e^l`.
#[derive(Clone, Debug)]
pub struct RationalGapRow {
    pub l: BigRational,
    pub l_next: BigRational,
    /// Certified lower bound of `N(c') − N(c)`.
    pub norm_gap_lower: f64,
    /// Certified upper bound of `θ·e^l`.
    pub threshold_upper: f64,
    pub holds: bool,
}

/// Outcome of [`rational_gap_check`]; `violation` carries the first failing
/// row, which the proposition says can never exist.
#[derive(Clone, Debug)]
pub struct RationalGapOutcome {
    pub rows: Vec<RationalGapRow>,
    pub holds: bool,
    pub violation: Option<usize>,
}

/// Checks `N(c') − N(c) ≥ θ·e^{l(c)}` over consecutive distinct geodesic
/// lengths of a θ-rational graph, up to the metric-length cutoff.
pub fn rational_gap_check(
    mg: &MetricGraph,
    theta: &BigRational,
    cutoff: &BigRational,
) -> Result<RationalGapOutcome> {
    use num_traits::Signed;
    if !theta.is_positive() {
        return Err(Error::Precondition("θ must be positive".into()));
    }
    for (e, l) in mg.graph.edges.iter().zip(&mg.lengths) {
        if !(l / theta).is_integer() {
            return Err(Error::Precondition(format!(
                "edge {:?} has length {l} ∉ θ·ℕ for θ = {theta}",
                e.id
            )));
        }
    }
    let mut lengths: Vec<BigRational> = enumerate_geodesics_by_length(mg, cutoff)?
        .into_iter()
        .map(|c| c.length)
        .collect();
    lengths.sort();
    lengths.dedup();
    let mut rows = Vec::new();
    let mut violation = None;
    let bits = working_bits();
    for w in lengths.windows(2) {
        let (l, l_next) = (&w[0], &w[1]);
        // N(c') − N(c) ≥ θe^l  ⇔  e^{l'−l} − 1 − θ ≥ 0
        let diff = l_next - l;
        let sign = certify_sign(
            |b| {
                Interval::from_ratio(&diff, b)
                    .exp()
                    .sub(&Interval::from_i64(1, b))
                    .sub(&Interval::from_ratio(theta, b))
            },
            bits,
        )?;
        let holds = sign != Ordering::Less;
        let gap = Interval::from_ratio(l_next, bits)
            .exp()
            .sub(&Interval::from_ratio(l, bits).exp());
        let threshold = Interval::from_ratio(theta, bits)
            .mul(&Interval::from_ratio(l, bits).exp());
        if !holds && violation.is_none() {
            violation = Some(rows.len());
        }
        rows.push(RationalGapRow {
            l: l.clone(),
            l_next: l_next.clone(),
            norm_gap_lower: crate::precision::bf_to_f64(gap.lo()),
            threshold_upper: crate::precision::bf_to_f64(threshold.hi()),
            holds,
        });
    }
    Ok(RationalGapOutcome { holds: violation.is_none(), violation, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::graph::{bouquet, theta_graph, Edge, Graph};
    use num_bigint::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn single_loop_enumeration() {
        let mg = bouquet(&[rat(1)]);
        let gs = enumerate_geodesics(&mg, 2).unwrap();
        // loop⁺, loop⁻ at L=1; loop⁺², loop⁻² at L=2
        assert_eq!(gs.len(), 4);
        let by_len: Vec<usize> = gs.iter().map(|c| c.word.len()).collect();
        assert_eq!(by_len, vec![1, 1, 2, 2]);
        assert!(gs[0].is_primitive() && gs[1].is_primitive());
        assert_eq!(gs[2].period, 1);
        assert_eq!(gs[3].period, 1);
        assert_eq!(gs[2].length, rat(2));
    }

    #[test]
    fn bouquet_two_loops() {
        let mg = bouquet(&[rat(1), rat(1)]);
        let gs = enumerate_geodesics(&mg, 1).unwrap();
        assert_eq!(gs.len(), 4);
        assert!(gs.iter().all(|c| c.is_primitive()));
    }

    #[test]
    fn tree_has_no_geodesics() {
        let g = Graph::new(
            vec!["u".into(), "v".into(), "w".into()],
            vec![
                Edge { id: "a".into(), u: 0, v: 1 },
                Edge { id: "b".into(), u: 1, v: 2 },
            ],
        )
        .unwrap();
        let mg = MetricGraph::new(g, vec![rat(1), rat(1)]).unwrap();
        assert!(enumerate_geodesics(&mg, 8).unwrap().is_empty());
        assert!(enumerate_geodesics(&mg, 0).is_err());
    }

    #[test]
    fn marked_path_count_identity() {
        // Σ_{L(c)=n} L(c₀) = tr(Bⁿ), B the 0/1 non-backtracking matrix
        for mg in [theta_graph(), bouquet(&[rat(1), rat(2)])] {
            let oriented = orient(&mg.graph);
            let succ = successors(&oriented);
            let dim = oriented.len();
            let mut b = vec![vec![0u64; dim]; dim];
            for (k, row) in succ.iter().enumerate() {
                for &k2 in row {
                    b[k2][k] = 1;
                }
            }
            let gs = enumerate_geodesics(&mg, 8).unwrap();
            let mut pw = vec![vec![0u64; dim]; dim];
            for (i, row) in pw.iter_mut().enumerate() {
                row[i] = 1;
            }
            for n in 1..=8usize {
                let mut next = vec![vec![0u64; dim]; dim];
                for i in 0..dim {
                    for k in 0..dim {
                        if pw[i][k] == 0 {
                            continue;
                        }
                        for j in 0..dim {
                            next[i][j] += pw[i][k] * b[k][j];
                        }
                    }
                }
                pw = next;
                let trace: u64 = (0..dim).map(|i| pw[i][i]).sum();
                let weighted: u64 = gs
                    .iter()
                    .filter(|c| c.word.len() == n)
                    .map(|c| c.period as u64)
                    .sum();
                assert_eq!(trace, weighted, "n={n}");
            }
        }
    }

    #[test]
    fn rotation_canonicalization() {
        let w = vec![3usize, 1, 2];
        assert_eq!(minimal_rotation(&w), vec![1, 2, 3]);
        assert_eq!(primitive_period(&[1, 2, 1, 2]), 2);
        assert_eq!(primitive_period(&[1, 2, 2]), 3);
    }

    #[test]
    fn length_cutoff_filtering() {
        let mg = bouquet(&[rat(2)]);
        let gs = enumerate_geodesics_by_length(&mg, &rat(5)).unwrap();
        // lengths 2 and 4, two orientations each
        assert_eq!(gs.len(), 4);
        assert!(gs.iter().all(|c| c.length <= rat(5)));
    }

    #[test]
    fn rational_gap_theta() {
        let out = rational_gap_check(&theta_graph(), &rat(1), &rat(12)).unwrap();
        assert!(out.holds);
        assert!(out.violation.is_none());
        assert!(!out.rows.is_empty());
        for r in &out.rows {
            assert!(r.holds);
            assert!(r.norm_gap_lower >= r.threshold_upper * 0.999);
        }
    }

    #[test]
    fn rational_gap_bouquet() {
        let mg = bouquet(&[rat(1), rat(2)]);
        let out = rational_gap_check(&mg, &rat(1), &rat(10)).unwrap();
        assert!(out.holds);
    }

    #[test]
    fn rational_gap_rejects_incommensurable() {
        let mg = bouquet(&[rat(1), BigRational::new(1.into(), 3.into())]);
        assert!(rational_gap_check(&mg, &rat(1), &rat(10)).is_err());
        assert!(rational_gap_check(&mg, &rat(0), &rat(10)).is_err());
    }
}
