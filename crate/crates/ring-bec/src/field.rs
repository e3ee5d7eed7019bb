//! Two-component fields sampled on a radial grid.

/// Samples of the pair `(u, v)` at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FieldPair {
    pub fn zeros(n: usize) -> Self {
        FieldPair {
            u: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        debug_assert_eq!(self.u.len(), self.v.len());
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn all_finite(&self) -> bool {
        self.u.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.u
            .iter()
            .chain(self.v.iter())
            .fold(0.0f64, |a, x| a.max(x.abs()))
    }

    /// Plain (unweighted) Euclidean norm over both components.
    pub fn norm2(&self) -> f64 {
        self.u
            .iter()
            .chain(self.v.iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// self += a * other
    pub fn axpy(&mut self, a: f64, other: &FieldPair) {
        for (x, y) in self.u.iter_mut().zip(other.u.iter()) {
            *x += a * y;
        }
        for (x, y) in self.v.iter_mut().zip(other.v.iter()) {
            *x += a * y;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for x in self.u.iter_mut().chain(self.v.iter_mut()) {
            *x *= a;
        }
    }

    pub fn scale_components(&mut self, au: f64, av: f64) {
        for x in self.u.iter_mut() {
            *x *= au;
        }
        for x in self.v.iter_mut() {
            *x *= av;
        }
    }

    /// Difference `self - other` as a new pair.
    pub fn minus(&self, other: &FieldPair) -> FieldPair {
        let mut d = self.clone();
        d.axpy(-1.0, other);
        d
    }

    /// Swap the two components.
    pub fn swapped(&self) -> FieldPair {
        FieldPair {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }

    /// Interleave into `(u_0, v_0, u_1, v_1, ...)` for banded linear algebra.
    pub fn interleaved(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            out.push(self.u[i]);
            out.push(self.v[i]);
        }
        out
    }

    pub fn from_interleaved(data: &[f64]) -> FieldPair {
        let n = data.len() / 2;
        let mut u = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            u.push(data[2 * i]);
            v.push(data[2 * i + 1]);
        }
        FieldPair { u, v }
    }
}
