//! The weighted energy inner product
//!
//! ```text
//!   <(u,v),(p,s)> = int r [ u'p' + v's' + (lambda+P) u p + (lambda+Q) v s ] dr
//! ```
//!
//! discretized so that it is exactly the quadratic form of the linear part
//! of the finite-difference operator: gradients live on cell faces with the
//! face radius as weight, zero-order terms on nodes. This makes the
//! discrete operator self-adjoint in the discrete metric by construction,
//! which the reduction engine relies on.

use crate::banded::{BandedLu, BandedMatrix};
use crate::field::FieldPair;
use crate::grid::RadialGrid;
use crate::potential::PotentialPair;
use crate::solver::Geometry;

#[derive(Debug, Clone)]
pub struct WeightedMetric {
    pub grid: RadialGrid,
    pub lambda: f64,
    pub geometry: Geometry,
    /// potentials sampled at the nodes
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    /// node quadrature weights `r_i h` (radial) or `h` (line)
    pub node_w: Vec<f64>,
    mp: Tridiag,
    mq: Tridiag,
    mp_lu: BandedLu,
    mq_lu: BandedLu,
}

#[derive(Debug, Clone)]
struct Tridiag {
    diag: Vec<f64>,
    off: Vec<f64>, // off[i] couples nodes i and i+1
}

impl Tridiag {
    fn quad(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.diag.len();
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.diag[i] * a[i] * b[i];
        }
        for i in 0..n - 1 {
            acc += self.off[i] * (a[i] * b[i + 1] + a[i + 1] * b[i]);
        }
        acc
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i < n - 1 {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    fn to_banded(&self) -> BandedMatrix {
        let n = self.diag.len();
        let mut m = BandedMatrix::new(n, 1, 1);
        for i in 0..n {
            m.set(i, i, self.diag[i]);
            if i < n - 1 {
                m.set(i, i + 1, self.off[i]);
                m.set(i + 1, i, self.off[i]);
            }
        }
        m
    }
}

/// Face-weighted Gram tridiagonal for one component: the quadratic form of
/// the linear operator with reflection at the origin and a Dirichlet ghost
/// at `r_max`, scaled by the node quadrature weights.
fn gram(grid: &RadialGrid, lambda: f64, pot: &[f64], geometry: Geometry) -> Tridiag {
    let n = grid.n;
    let h = grid.h;
    let face_w = |f: usize| -> f64 {
        match geometry {
            Geometry::Radial => f as f64 * h,
            Geometry::Line => 1.0,
        }
    };
    let node_w = |i: usize| -> f64 {
        match geometry {
            Geometry::Radial => grid.r(i) * h,
            Geometry::Line => h,
        }
    };
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for i in 0..n {
        // the left closure contributes nothing: the face radius vanishes in
        // radial geometry and the reflected gradient vanishes on the line
        let left = if i == 0 { 0.0 } else { face_w(i) / h };
        let right = face_w(i + 1) / h;
        // the Dirichlet ghost doubles the last face term
        let dirichlet = if i == n - 1 { face_w(n) / h } else { 0.0 };
        diag[i] = left + right + dirichlet + node_w(i) * (lambda + pot[i]);
        if i < n - 1 {
            off[i] = -face_w(i + 1) / h;
        }
    }
    Tridiag { diag, off }
}

impl WeightedMetric {
    pub fn new(
        grid: &RadialGrid,
        lambda: f64,
        potentials: &PotentialPair,
        geometry: Geometry,
    ) -> Self {
        let p: Vec<f64> = grid.nodes().map(|r| potentials.p.value(r)).collect();
        let q: Vec<f64> = grid.nodes().map(|r| potentials.q.value(r)).collect();
        let node_w: Vec<f64> = match geometry {
            Geometry::Radial => grid.nodes().map(|r| r * grid.h).collect(),
            Geometry::Line => vec![grid.h; grid.n],
        };
        let mp = gram(grid, lambda, &p, geometry);
        let mq = gram(grid, lambda, &q, geometry);
        let mp_lu = mp
            .to_banded()
            .factor(1e-30)
            .expect("metric Gram matrix must be positive definite (lambda > sup |P|)");
        let mq_lu = mq
            .to_banded()
            .factor(1e-30)
            .expect("metric Gram matrix must be positive definite (lambda > sup |Q|)");
        WeightedMetric {
            grid: grid.clone(),
            lambda,
            geometry,
            p,
            q,
            node_w,
            mp,
            mq,
            mp_lu,
            mq_lu,
        }
    }

    /// The weighted inner product of two field pairs.
    pub fn inner(&self, a: &FieldPair, b: &FieldPair) -> f64 {
        self.mp.quad(&a.u, &b.u) + self.mq.quad(&a.v, &b.v)
    }

    pub fn norm(&self, a: &FieldPair) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    /// Gram matrix action `x -> M x` (per component), producing a load pair.
    pub fn gram_apply(&self, x: &FieldPair) -> FieldPair {
        let mut out = FieldPair::zeros(x.len());
        self.mp.matvec(&x.u, &mut out.u);
        self.mq.matvec(&x.v, &mut out.v);
        out
    }

    /// Riesz representer of a load functional: solves `M x = load`.
    ///
    /// Pairing the result against any field in the metric reproduces the
    /// plain dot product of the load with that field, so dual norms of
    /// functionals are `sqrt(load . representer)`.
    pub fn representer(&self, load: &FieldPair) -> FieldPair {
        FieldPair {
            u: self.mp_lu.solve_vec(&load.u),
            v: self.mq_lu.solve_vec(&load.v),
        }
    }

    /// Dual norm of a load functional.
    pub fn dual_norm(&self, load: &FieldPair) -> f64 {
        let rep = self.representer(load);
        let mut acc = 0.0;
        for i in 0..load.len() {
            acc += load.u[i] * rep.u[i] + load.v[i] * rep.v[i];
        }
        acc.max(0.0).sqrt()
    }

    /// Gram diagonals of the first component, used to assemble the weak-form
    /// operator of the reduction engine.
    pub(crate) fn gram_p(&self) -> (&[f64], &[f64]) {
        (&self.mp.diag, &self.mp.off)
    }

    pub(crate) fn gram_q(&self) -> (&[f64], &[f64]) {
        (&self.mq.diag, &self.mq.off)
    }
}
