//! The non-backtracking transfer operator `T_s`, the Ihara zeta determinant
//! `det(1 − T_s)`, its Euler-product form over primitive geodesics, and the
//! trace identity `tr(T_sⁿ) = Σ_{L(c)=n} e^{−s·l(c)}·L(c₀)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::geodesics::{enumerate_geodesics, successors};
use super::graph::{orient, MetricGraph};

/// Dense complex matrix indexed by oriented edges.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    pub dim: usize,
    /// Row-major entries; `(k', k)` is `entries[k'*dim + k]`.
    pub entries: Vec<Complex64>,
    pub s: Complex64,
}

impl TransferMatrix {
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn mul(&self, rhs: &TransferMatrix) -> TransferMatrix {
        let dim = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..dim {
                    entries[i * dim + j] += a * rhs.get(k, j);
                }
            }
        }
        TransferMatrix { dim, entries, s: self.s }
    }

    pub fn pow_trace(&self, n: usize) -> Complex64 {
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self);
        }
        acc.trace()
    }
}

/// Builds `T_s`: entry `(k', k) = e^{−s·l(k')}` when `src(k') = dst(k)` and
/// `k' ≠ opposite(k)`, else 0.
pub fn transfer_matrix(mg: &MetricGraph, s: Complex64) -> TransferMatrix {
    let oriented = orient(&mg.graph);
    let succ = successors(&oriented);
    let dim = oriented.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (k, row) in succ.iter().enumerate() {
        for &k2 in row {
            let weight = (-s * mg.length_f64(k2 / 2)).exp();
            entries[k2 * dim + k] = weight;
        }
    }
    TransferMatrix { dim, entries, s }
}

/// `det(1 − T_s)` by LU with partial pivoting; entire in `s`.
pub fn zeta_det(mg: &MetricGraph, s: Complex64) -> Complex64 {
    let t = transfer_matrix(mg, s);
    let dim = t.dim;
    let mut m: Vec<Complex64> = (0..dim * dim)
        .map(|idx| {
            let (i, j) = (idx / dim, idx % dim);
            let delta = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            delta - t.entries[idx]
        })
        .collect();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&a, &b| {
                m[a * dim + col]
                    .norm()
                    .partial_cmp(&m[b * dim + col].norm())
                    .unwrap()
            })
            .unwrap();
        let pivot = m[pivot_row * dim + col];
        if pivot.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != col {
            for j in 0..dim {
                m.swap(col * dim + j, pivot_row * dim + j);
            }
            det = -det;
        }
        det *= pivot;
        for row in col + 1..dim {
            let factor = m[row * dim + col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..dim {
                let sub = factor * m[col * dim + j];
                m[row * dim + j] -= sub;
            }
        }
    }
    det
}

/// Truncated Euler product `Π_{c₀ primitive, L(c₀) ≤ cutoff} (1 − e^{−s·l(c₀)})`.
pub fn zeta_product(mg: &MetricGraph, s: Complex64, cutoff: usize) -> Result<Complex64> {
    if cutoff < 1 {
        return Err(Error::Precondition("cutoff must be ≥ 1".into()));
    }
    if mg.graph.edges.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let geodesics = enumerate_geodesics(mg, cutoff)?;
    let mut prod = Complex64::new(1.0, 0.0);
    for c in geodesics.iter().filter(|c| c.is_primitive()) {
        use num_traits::ToPrimitive;
        let l = c.length.to_f64().unwrap_or(f64::NAN);
        prod *= Complex64::new(1.0, 0.0) - (-s * l).exp();
    }
    Ok(prod)
}

/// `|tr(T_sⁿ) − Σ_{L(c)=n} e^{−s·l(c)}·L(c₀)|`.
pub fn trace_identity_residual(mg: &MetricGraph, s: Complex64, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Precondition("n must be ≥ 1".into()));
    }
    let lhs = if mg.graph.edges.is_empty() {
        Complex64::new(0.0, 0.0)
    } else {
        transfer_matrix(mg, s).pow_trace(n)
    };
    let mut rhs = Complex64::new(0.0, 0.0);
    for c in enumerate_geodesics(mg, n)
        .unwrap_or_default()
        .iter()
        .filter(|c| c.word.len() == n)
    {
        use num_traits::ToPrimitive;
        let l = c.length.to_f64().unwrap_or(f64::NAN);
        rhs += (-s * l).exp() * (c.period as f64);
    }
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::graph::{bouquet, theta_graph, Edge, Graph, MetricGraph};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_loop_transfer_matrix() {
        let mg = bouquet(&[rat(1)]);
        let s = c(0.7, 0.3);
        let t = transfer_matrix(&mg, s);
        assert_eq!(t.dim, 2);
        let u = (-s).exp();
        // only the self-successor survives non-backtracking: e^{−s}·I
        assert!((t.get(0, 0) - u).norm() < 1e-15);
        assert!((t.get(1, 1) - u).norm() < 1e-15);
        assert!(t.get(0, 1).norm() < 1e-15);
        assert!(t.get(1, 0).norm() < 1e-15);
    }

    #[test]
    fn bouquet_two_transfer_matrix() {
        let mg = bouquet(&[rat(1), rat(1)]);
        let s = c(1.1, -0.4);
        let t = transfer_matrix(&mg, s);
        let u = (-s).exp();
        // e^{−s}(J − S): all-ones minus the opposite swap
        for k in 0..4 {
            for k2 in 0..4 {
                let expect = if k2 == k ^ 1 { c(0.0, 0.0) } else { u };
                assert!((t.get(k2, k) - expect).norm() < 1e-14, "({k2},{k})");
            }
        }
    }

    #[test]
    fn zeta_det_closed_forms() {
        let s = c(0.9, 0.2);
        let u = (-s).exp();

        let loop1 = bouquet(&[rat(1)]);
        let expect = (c(1.0, 0.0) - u) * (c(1.0, 0.0) - u);
        assert!((zeta_det(&loop1, s) - expect).norm() < 1e-13);

        let bq = bouquet(&[rat(1), rat(1)]);
        let one = c(1.0, 0.0);
        let expect = (one - 3.0 * u) * (one + u) * (one - u) * (one - u);
        assert!((zeta_det(&bq, s) - expect).norm() < 1e-12);
    }

    #[test]
    fn zeta_det_tends_to_one() {
        let loop1 = bouquet(&[rat(1)]);
        let d = zeta_det(&loop1, c(40.0, 0.0));
        assert!((d - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn euler_product_matches_det() {
        let s = c(4.0, 0.0);
        for mg in [theta_graph(), bouquet(&[rat(1), rat(1)]), bouquet(&[rat(1), rat(2)])] {
            let det = zeta_det(&mg, s);
            let prod = zeta_product(&mg, s, 14).unwrap();
            assert!((det - prod).norm() < 1e-8, "residual {}", (det - prod).norm());
        }
        // single loop: exactly two primitives, closed form at any cutoff
        let loop1 = bouquet(&[rat(1)]);
        let p = zeta_product(&loop1, s, 3).unwrap();
        let expect = (c(1.0, 0.0) - (-s).exp()) * (c(1.0, 0.0) - (-s).exp());
        assert!((p - expect).norm() < 1e-15);
    }

    #[test]
    fn tree_zeta_is_one() {
        let g = Graph::new(
            vec!["u".into(), "v".into()],
            vec![Edge { id: "a".into(), u: 0, v: 1 }],
        )
        .unwrap();
        let mg = MetricGraph::new(g, vec![rat(1)]).unwrap();
        let s = c(2.0, 1.0);
        assert!((zeta_det(&mg, s) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((zeta_product(&mg, s, 6).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_identity_examples() {
        let loop1 = bouquet(&[rat(1)]);
        let r = trace_identity_residual(&loop1, c(1.0, 0.0), 3).unwrap();
        assert!(r < 1e-15, "residual {r}");

        let bq = bouquet(&[rat(1), rat(1)]);
        let r = trace_identity_residual(&bq, c(0.0, 0.0), 1).unwrap();
        assert!(r < 1e-15);
        // tr(J − S) = 4 directly
        let t = transfer_matrix(&bq, c(0.0, 0.0));
        assert!((t.trace() - c(4.0, 0.0)).norm() < 1e-15);

        for mg in [theta_graph(), bouquet(&[rat(1), rat(2)])] {
            for n in 1..=10usize {
                let r = trace_identity_residual(&mg, c(1.3, -0.7), n).unwrap();
                assert!(r < 1e-10, "n={n}, residual {r}");
            }
        }
        assert!(trace_identity_residual(&loop1, c(1.0, 0.0), 0).is_err());
    }

    #[test]
    fn det_equals_exp_trace_log() {
        // det(1 − T) = exp(−Σ tr(Tⁿ)/n) within the convergence radius
        let s = c(2.0, 0.5);
        for mg in [theta_graph(), bouquet(&[rat(1), rat(1)])] {
            let t = transfer_matrix(&mg, s);
            let mut sum = Complex64::new(0.0, 0.0);
            for n in 1..=40usize {
                sum += t.pow_trace(n) / (n as f64);
            }
            let det = zeta_det(&mg, s);
            assert!((det - (-sum).exp()).norm() < 1e-10);
        }
    }
}
