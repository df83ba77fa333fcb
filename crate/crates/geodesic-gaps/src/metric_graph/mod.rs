//! Finite metric graphs and their closed-geodesic length spectra: structure
//! and file format, non-backtracking geodesic enumeration, the Ihara zeta
//! function in determinant and Euler-product form, and moduli degenerations.

pub mod geodesics;
pub mod graph;
pub mod moduli;
pub mod zeta;

pub use geodesics::{
    enumerate_geodesics, enumerate_geodesics_by_length, rational_gap_check, ClosedGeodesic,
    RationalGapOutcome, RationalGapRow,
};
pub use graph::{
    bouquet, degenerate, from_json, opposite, orient, parse_decimal, theta_graph, to_json,
    Degeneration, Directive, Edge, Graph, MetricGraph, OrientedEdge,
};
pub use moduli::{
    convergence_probe, disk_grid, right_grid, x_a, x_a_contraction_limit, x_a_deletion_limit,
    ResidualTable,
};
pub use zeta::{trace_identity_residual, transfer_matrix, zeta_det, zeta_product, TransferMatrix};
