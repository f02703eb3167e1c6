//! Adjacency spectra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// All adjacency eigenvalues, sorted by decreasing absolute value.
pub fn adjacency_eigenvalues(graph: &Graph) -> Vec<f64> {
    let n = graph.n();
    if n == 0 {
        return Vec::new();
    }
    let matrix = DMatrix::from_row_slice(n, n, &graph.adjacency_dense());
    let mut values: Vec<f64> = SymmetricEigen::new(matrix).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
    values
}

/// The two eigenvalues of largest absolute value, `|λ₁| ≥ |λ₂|`.
pub fn spectral_top2(graph: &Graph) -> Result<(f64, f64)> {
    if graph.n() < 2 {
        return Err(Error::input("spectrum needs at least 2 vertices"));
    }
    let values = adjacency_eigenvalues(graph);
    Ok((values[0], values[1]))
}

/// `Σ λᵢ⁴`, the number of closed 4-walks, i.e. `hom(C₄, G)`.
pub fn fourth_moment(graph: &Graph) -> f64 {
    adjacency_eigenvalues(graph).iter().map(|l| l.powi(4)).sum()
}
