//! Grid-sampled tensor fields: one-forms, symmetric and antisymmetric rank-2
//! tensors, and full (unsymmetrized) rank-2 tensors.
//!
//! Symmetric tensors store the n(n+1)/2 upper-triangle components,
//! two-forms the n(n-1)/2 strictly-upper components; both expose index
//! helpers so contraction code can walk independent entries with the right
//! multiplicity.

use crate::grid::{GridSpec, ScalarField};

/// Flat index of the (a, b) entry, a <= b, in upper-triangle storage.
pub fn sym_index(dimension: usize, a: usize, b: usize) -> usize {
    debug_assert!(a <= b && b < dimension);
    a * dimension - a * (a + 1) / 2 + b
}

/// Flat index of the (a, b) entry, a < b, in strictly-upper storage.
pub fn skew_index(dimension: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < dimension);
    a * dimension - a * (a + 1) / 2 + (b - a - 1)
}

/// Independent entries (a, b) with a <= b, paired with the weight each
/// carries in a full double contraction (1 on the diagonal, 2 off it).
pub fn sym_pairs(dimension: usize) -> impl Iterator<Item = (usize, usize, f64)> {
    (0..dimension).flat_map(move |a| {
        (a..dimension).map(move |b| (a, b, if a == b { 1.0 } else { 2.0 }))
    })
}

/// Strictly-upper entries (a, b) with a < b.
pub fn skew_pairs(dimension: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..dimension).flat_map(move |a| ((a + 1)..dimension).map(move |b| (a, b)))
}

/// Covector field with one scalar component per axis.
#[derive(Debug, Clone)]
pub struct OneForm {
    grid: GridSpec,
    components: Vec<ScalarField>,
}

impl OneForm {
    pub fn zeros(grid: &GridSpec) -> Self {
        OneForm {
            grid: grid.clone(),
            components: (0..grid.dimension())
                .map(|_| ScalarField::zeros(grid))
                .collect(),
        }
    }

    pub fn constant(grid: &GridSpec, coeffs: &[f64]) -> Self {
        assert_eq!(coeffs.len(), grid.dimension(), "component count mismatch");
        OneForm {
            grid: grid.clone(),
            components: coeffs
                .iter()
                .map(|&c| ScalarField::constant(grid, c))
                .collect(),
        }
    }

    pub fn from_components(components: Vec<ScalarField>) -> Self {
        assert!(!components.is_empty());
        let grid = components[0].grid().clone();
        assert_eq!(components.len(), grid.dimension(), "component count mismatch");
        assert!(components.iter().all(|c| c.grid() == &grid), "grid mismatch");
        OneForm { grid, components }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn component(&self, a: usize) -> &ScalarField {
        &self.components[a]
    }

    pub fn component_mut(&mut self, a: usize) -> &mut ScalarField {
        &mut self.components[a]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn map_components<F: FnMut(&ScalarField) -> ScalarField>(&self, f: F) -> Self {
        OneForm {
            grid: self.grid.clone(),
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map_components(|c| c.scale(factor))
    }

    pub fn add_scaled(&mut self, factor: f64, other: &OneForm) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.add_scaled(factor, b);
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.components
            .iter()
            .fold(0.0, |acc, c| acc.max(c.sup_norm()))
    }
}

impl std::ops::Add for &OneForm {
    type Output = OneForm;
    fn add(self, rhs: &OneForm) -> OneForm {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        OneForm {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &OneForm {
    type Output = OneForm;
    fn sub(self, rhs: &OneForm) -> OneForm {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        OneForm {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Symmetric rank-2 tensor field in upper-triangle storage.
#[derive(Debug, Clone)]
pub struct SymTensor2 {
    grid: GridSpec,
    dimension: usize,
    components: Vec<ScalarField>,
}

impl SymTensor2 {
    pub fn zeros(grid: &GridSpec) -> Self {
        let n = grid.dimension();
        SymTensor2 {
            grid: grid.clone(),
            dimension: n,
            components: (0..n * (n + 1) / 2)
                .map(|_| ScalarField::zeros(grid))
                .collect(),
        }
    }

    /// Constant tensor from upper-triangle coefficients in the
    /// [`sym_index`] order.
    pub fn constant(grid: &GridSpec, coeffs: &[f64]) -> Self {
        let n = grid.dimension();
        assert_eq!(coeffs.len(), n * (n + 1) / 2, "component count mismatch");
        SymTensor2 {
            grid: grid.clone(),
            dimension: n,
            components: coeffs
                .iter()
                .map(|&c| ScalarField::constant(grid, c))
                .collect(),
        }
    }

    /// The identity matrix at every point.
    pub fn kronecker(grid: &GridSpec) -> Self {
        let n = grid.dimension();
        let mut t = SymTensor2::zeros(grid);
        for a in 0..n {
            *t.get_mut(a, a) = ScalarField::constant(grid, 1.0);
        }
        t
    }

    pub fn from_components(grid: &GridSpec, components: Vec<ScalarField>) -> Self {
        let n = grid.dimension();
        assert_eq!(components.len(), n * (n + 1) / 2, "component count mismatch");
        assert!(components.iter().all(|c| c.grid() == grid), "grid mismatch");
        SymTensor2 {
            grid: grid.clone(),
            dimension: n,
            components,
        }
    }

    /// Samples each independent component from `f(a, b, coords)`.
    pub fn from_fn<F: FnMut(usize, usize, &[f64]) -> f64>(grid: &GridSpec, mut f: F) -> Self {
        let n = grid.dimension();
        let mut components = Vec::with_capacity(n * (n + 1) / 2);
        for a in 0..n {
            for b in a..n {
                components.push(ScalarField::from_fn(grid, |x| f(a, b, x)));
            }
        }
        SymTensor2 {
            grid: grid.clone(),
            dimension: n,
            components,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Component (a, b) in either index order.
    pub fn get(&self, a: usize, b: usize) -> &ScalarField {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        &self.components[sym_index(self.dimension, lo, hi)]
    }

    pub fn get_mut(&mut self, a: usize, b: usize) -> &mut ScalarField {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        &mut self.components[sym_index(self.dimension, lo, hi)]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    /// Full n x n matrix at one grid point, row-major.
    pub fn matrix_at(&self, index: usize) -> Vec<f64> {
        let n = self.dimension;
        let mut m = vec![0.0; n * n];
        for (a, b, _) in sym_pairs(n) {
            let v = self.get(a, b).values()[index];
            m[a * n + b] = v;
            m[b * n + a] = v;
        }
        m
    }

    pub fn map_components<F: FnMut(&ScalarField) -> ScalarField>(&self, f: F) -> Self {
        SymTensor2 {
            grid: self.grid.clone(),
            dimension: self.dimension,
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map_components(|c| c.scale(factor))
    }

    pub fn add_scaled(&mut self, factor: f64, other: &SymTensor2) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.add_scaled(factor, b);
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.components
            .iter()
            .fold(0.0, |acc, c| acc.max(c.sup_norm()))
    }
}

impl std::ops::Add for &SymTensor2 {
    type Output = SymTensor2;
    fn add(self, rhs: &SymTensor2) -> SymTensor2 {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        SymTensor2 {
            grid: self.grid.clone(),
            dimension: self.dimension,
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &SymTensor2 {
    type Output = SymTensor2;
    fn sub(self, rhs: &SymTensor2) -> SymTensor2 {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        SymTensor2 {
            grid: self.grid.clone(),
            dimension: self.dimension,
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Antisymmetric rank-2 tensor field; stores the a < b components.
#[derive(Debug, Clone)]
pub struct TwoForm {
    grid: GridSpec,
    dimension: usize,
    components: Vec<ScalarField>,
}

impl TwoForm {
    pub fn zeros(grid: &GridSpec) -> Self {
        let n = grid.dimension();
        TwoForm {
            grid: grid.clone(),
            dimension: n,
            components: (0..n * (n - 1) / 2)
                .map(|_| ScalarField::zeros(grid))
                .collect(),
        }
    }

    pub fn from_components(grid: &GridSpec, components: Vec<ScalarField>) -> Self {
        let n = grid.dimension();
        assert_eq!(components.len(), n * (n - 1) / 2, "component count mismatch");
        assert!(components.iter().all(|c| c.grid() == grid), "grid mismatch");
        TwoForm {
            grid: grid.clone(),
            dimension: n,
            components,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Stored component (a, b); requires a < b. Use the antisymmetry
    /// explicitly for the flipped order.
    pub fn component(&self, a: usize, b: usize) -> &ScalarField {
        assert!(a < b && b < self.dimension, "two-form index out of order");
        &self.components[skew_index(self.dimension, a, b)]
    }

    pub fn component_mut(&mut self, a: usize, b: usize) -> &mut ScalarField {
        assert!(a < b && b < self.dimension, "two-form index out of order");
        &mut self.components[skew_index(self.dimension, a, b)]
    }

    /// Value of the (a, b) entry as a field, for any a != b.
    pub fn entry(&self, a: usize, b: usize) -> ScalarField {
        if a < b {
            self.component(a, b).clone()
        } else {
            -self.component(b, a)
        }
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn scale(&self, factor: f64) -> Self {
        TwoForm {
            grid: self.grid.clone(),
            dimension: self.dimension,
            components: self.components.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.components
            .iter()
            .fold(0.0, |acc, c| acc.max(c.sup_norm()))
    }
}

impl std::ops::Sub for &TwoForm {
    type Output = TwoForm;
    fn sub(self, rhs: &TwoForm) -> TwoForm {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        TwoForm {
            grid: self.grid.clone(),
            dimension: self.dimension,
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// General rank-2 tensor field with all n^2 components, row-major in (a, b).
#[derive(Debug, Clone)]
pub struct Tensor2Field {
    grid: GridSpec,
    dimension: usize,
    components: Vec<ScalarField>,
}

impl Tensor2Field {
    pub fn zeros(grid: &GridSpec) -> Self {
        let n = grid.dimension();
        Tensor2Field {
            grid: grid.clone(),
            dimension: n,
            components: (0..n * n).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn get(&self, a: usize, b: usize) -> &ScalarField {
        &self.components[a * self.dimension + b]
    }

    pub fn get_mut(&mut self, a: usize, b: usize) -> &mut ScalarField {
        &mut self.components[a * self.dimension + b]
    }

    /// Symmetric part, (t_{ab} + t_{ba}) / 2.
    pub fn symmetric_part(&self) -> SymTensor2 {
        let mut out = SymTensor2::zeros(&self.grid);
        for (a, b, _) in sym_pairs(self.dimension) {
            *out.get_mut(a, b) = self.get(a, b).zip(self.get(b, a), |p, q| 0.5 * (p + q));
        }
        out
    }

    /// Antisymmetric part as a two-form, (t_{ab} - t_{ba}) / 2 for a < b.
    pub fn antisymmetric_part(&self) -> TwoForm {
        let mut out = TwoForm::zeros(&self.grid);
        for (a, b) in skew_pairs(self.dimension) {
            *out.component_mut(a, b) = self.get(a, b).zip(self.get(b, a), |p, q| 0.5 * (p - q));
        }
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.components
            .iter()
            .fold(0.0, |acc, c| acc.max(c.sup_norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_maps_are_consistent() {
        let n = 4;
        let mut seen = vec![false; n * (n + 1) / 2];
        for (a, b, _) in sym_pairs(n) {
            let idx = sym_index(n, a, b);
            assert!(!seen[idx]);
            seen[idx] = true;
        }
        assert!(seen.iter().all(|&s| s));

        let mut seen = vec![false; n * (n - 1) / 2];
        for (a, b) in skew_pairs(n) {
            let idx = skew_index(n, a, b);
            assert!(!seen[idx]);
            seen[idx] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn symmetric_access_ignores_index_order() {
        let grid = GridSpec::square(3, 8).unwrap();
        let mut t = SymTensor2::zeros(&grid);
        *t.get_mut(0, 2) = ScalarField::constant(&grid, 5.0);
        assert_eq!(t.get(2, 0).values()[0], 5.0);
        let m = t.matrix_at(0);
        assert_eq!(m[2], 5.0);
        assert_eq!(m[6], 5.0);
        assert_eq!(m[4], 0.0);
    }

    #[test]
    fn two_form_entry_is_antisymmetric() {
        let grid = GridSpec::square(2, 8).unwrap();
        let mut w = TwoForm::zeros(&grid);
        *w.component_mut(0, 1) = ScalarField::constant(&grid, 3.0);
        assert_eq!(w.entry(0, 1).values()[0], 3.0);
        assert_eq!(w.entry(1, 0).values()[0], -3.0);
    }

    #[test]
    fn tensor_splits_into_parts() {
        let grid = GridSpec::square(2, 8).unwrap();
        let mut t = Tensor2Field::zeros(&grid);
        *t.get_mut(0, 1) = ScalarField::constant(&grid, 2.0);
        *t.get_mut(1, 0) = ScalarField::constant(&grid, 4.0);
        let sym = t.symmetric_part();
        let skew = t.antisymmetric_part();
        assert_eq!(sym.get(0, 1).values()[0], 3.0);
        assert_eq!(skew.component(0, 1).values()[0], -1.0);
    }
}
