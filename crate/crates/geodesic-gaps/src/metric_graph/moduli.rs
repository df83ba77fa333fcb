//! Moduli-space boundary behavior: the X_a example family, its two
//! degenerations, and numerical probes of locally uniform convergence of the
//! Ihara zeta functions along a degeneration.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};

use super::graph::{degenerate, Degeneration, Directive, Edge, Graph, MetricGraph};
use super::zeta::zeta_det;

/// The example graph X_a: vertices L, M, R; an `a`-edge and a unit edge
/// between L and M, and two unit edges between M and R.
pub fn x_a(a: &BigRational) -> Result<MetricGraph> {
    if !a.is_positive() {
        return Err(Error::Precondition(format!("a = {a} must be positive")));
    }
    let one = BigRational::from_integer(1.into());
    let graph = Graph::new(
        vec!["L".into(), "M".into(), "R".into()],
        vec![
            Edge { id: "a".into(), u: 0, v: 1 },
            Edge { id: "e".into(), u: 0, v: 1 },
            Edge { id: "f1".into(), u: 1, v: 2 },
            Edge { id: "f2".into(), u: 1, v: 2 },
        ],
    )?;
    MetricGraph::new(graph, vec![a.clone(), one.clone(), one.clone(), one])
}

/// Degeneration of X_a as `a → 0`: the unit L–M edge becomes a loop at the
/// merged vertex, next to the right double edge.
pub fn x_a_contraction_limit() -> Result<Degeneration> {
    let a = BigRational::from_integer(1.into());
    degenerate(
        &x_a(&a)?,
        &[Directive::Contract, Directive::Keep, Directive::Keep, Directive::Keep],
    )
}

/// Degeneration of X_a as `a → ∞`: the a-edge is deleted, leaving the left
/// single edge and the right double edge.
pub fn x_a_deletion_limit() -> Result<Degeneration> {
    let a = BigRational::from_integer(1.into());
    degenerate(
        &x_a(&a)?,
        &[Directive::Delete, Directive::Keep, Directive::Keep, Directive::Keep],
    )
}

/// Residuals `|Z_{X_a}(s) − Z_limit(s)|` over a family and a sample grid.
#[derive(Clone, Debug)]
pub struct ResidualTable {
    pub a_values: Vec<f64>,
    pub s_samples: Vec<Complex64>,
    /// `residuals[i][j]` for family member `i` at sample `j`.
    pub residuals: Vec<Vec<f64>>,
    pub max_per_member: Vec<f64>,
    /// Maxima strictly decrease along the family order.
    pub strictly_decreasing: bool,
}

impl ResidualTable {
    /// Smallest `K` with `max residual(a) ≤ K·e^{−rate·a}` over the family.
    pub fn envelope_constant(&self, rate: f64) -> f64 {
        self.a_values
            .iter()
            .zip(&self.max_per_member)
            .map(|(a, r)| r * (rate * a).exp())
            .fold(0.0f64, f64::max)
    }
}

/// Evaluates both zetas over the grid for each family member.
pub fn convergence_probe(
    family: &[(f64, MetricGraph)],
    limit: &MetricGraph,
    s_samples: &[Complex64],
) -> Result<ResidualTable> {
    if family.is_empty() || s_samples.is_empty() {
        return Err(Error::Precondition("family and sample grid must be nonempty".into()));
    }
    let limit_values: Vec<Complex64> = s_samples.iter().map(|&s| zeta_det(limit, s)).collect();
    let mut residuals = Vec::with_capacity(family.len());
    let mut max_per_member = Vec::with_capacity(family.len());
    for (_, mg) in family {
        let row: Vec<f64> = s_samples
            .iter()
            .zip(&limit_values)
            .map(|(&s, &zl)| (zeta_det(mg, s) - zl).norm())
            .collect();
        let max = row.iter().copied().fold(0.0f64, f64::max);
        residuals.push(row);
        max_per_member.push(max);
    }
    let strictly_decreasing = max_per_member.windows(2).all(|w| w[1] < w[0]);
    Ok(ResidualTable {
        a_values: family.iter().map(|(a, _)| *a).collect(),
        s_samples: s_samples.to_vec(),
        residuals,
        max_per_member,
        strictly_decreasing,
    })
}

/// 5×5 grid covering the disk `|s| ≤ 2` (points at `(±1.4, ±0.7, 0)²`).
pub fn disk_grid() -> Vec<Complex64> {
    let axis = [-1.4, -0.7, 0.0, 0.7, 1.4];
    axis.iter()
        .flat_map(|&re| axis.iter().map(move |&im| Complex64::new(re, im)))
        .collect()
}

/// 5×5 grid with `Re s ∈ [1, 3]`, `Im s ∈ [−1, 1]`.
pub fn right_grid() -> Vec<Complex64> {
    let res = [1.0, 1.5, 2.0, 2.5, 3.0];
    let ims = [-1.0, -0.5, 0.0, 0.5, 1.0];
    res.iter()
        .flat_map(|&re| ims.iter().map(move |&im| Complex64::new(re, im)))
        .collect()
}
