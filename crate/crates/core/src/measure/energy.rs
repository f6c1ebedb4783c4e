//! Discrete p-Dirichlet energy on a uniform node grid.
//!
//! Each square cell is split into two right triangles along either diagonal
//! and the two piecewise-linear energies are averaged. On these triangles the
//! gradient components are plain edge differences, so a cell contributes four
//! gradient samples of weight `h²/4`. At `p = 2` the energy reproduces the
//! five-point Laplacian.

use super::multigrid::{Shape, Stencil, CENTER};

/// Regularization added to `|∇u|²` inside the p-th power.
pub const EPS_REG: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Energy {
    pub shape: Shape,
    pub h: f64,
    pub p: f64,
    pub eps: f64,
}

/// For a cell with corners `[00, 10, 01, 11]`, the four gradient samples as
/// `(x-difference nodes, y-difference nodes)`, each `(plus, minus)`.
const SAMPLES: [((usize, usize), (usize, usize)); 4] = [
    ((1, 0), (2, 0)),
    ((3, 2), (3, 1)),
    ((1, 0), (3, 1)),
    ((3, 2), (2, 0)),
];

impl Energy {
    #[inline]
    fn corners(&self, i: usize, j: usize) -> [usize; 4] {
        let s = self.shape;
        [s.idx(i, j), s.idx(i + 1, j), s.idx(i, j + 1), s.idx(i + 1, j + 1)]
    }

    #[inline]
    fn sample(&self, u: &[f64], c: &[usize; 4], k: usize) -> (f64, f64) {
        let ((ap, am), (bp, bm)) = SAMPLES[k];
        ((u[c[ap]] - u[c[am]]) / self.h, (u[c[bp]] - u[c[bm]]) / self.h)
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        let weight = 0.25 * self.h * self.h / self.p;
        let mut total = 0.0;
        for j in 0..self.shape.ny {
            for i in 0..self.shape.nx {
                let c = self.corners(i, j);
                for k in 0..4 {
                    let (a, b) = self.sample(u, &c, k);
                    total += (a * a + b * b + self.eps).powf(0.5 * self.p);
                }
            }
        }
        weight * total
    }

    /// Derivative of the energy along `du` at `u`.
    pub fn slope(&self, u: &[f64], du: &[f64]) -> f64 {
        let mut total = 0.0;
        for j in 0..self.shape.ny {
            for i in 0..self.shape.nx {
                let c = self.corners(i, j);
                for k in 0..4 {
                    let (a, b) = self.sample(u, &c, k);
                    let (da, db) = self.sample(du, &c, k);
                    let w = (a * a + b * b + self.eps).powf(0.5 * self.p - 1.0);
                    total += w * (a * da + b * db);
                }
            }
        }
        0.25 * self.h * self.h * total
    }

    /// Gradient (interior entries) and Hessian stencil at `u`.
    pub fn linearize(&self, u: &[f64]) -> (Vec<f64>, Stencil) {
        let s = self.shape;
        let mut grad = vec![0.0; s.len()];
        let mut hess = Stencil::zeros(s);
        let interior = |n: usize| {
            let (i, j) = (n % (s.nx + 1), n / (s.nx + 1));
            i > 0 && j > 0 && i < s.nx && j < s.ny
        };
        let gscale = 0.25 * self.h;
        for j in 0..s.ny {
            for i in 0..s.nx {
                let c = self.corners(i, j);
                for k in 0..4 {
                    let ((ap, am), (bp, bm)) = SAMPLES[k];
                    let (a, b) = self.sample(u, &c, k);
                    let q = a * a + b * b + self.eps;
                    let w = q.powf(0.5 * self.p - 1.0);
                    let t = (self.p - 2.0) / q;
                    let kaa = 0.25 * w * (1.0 + t * a * a);
                    let kab = 0.25 * w * t * a * b;
                    let kbb = 0.25 * w * (1.0 + t * b * b);

                    // each sample touches three corners; coefficients of the
                    // x- and y-differences on each
                    let mut nodes = [(0usize, 0.0f64, 0.0f64); 3];
                    let mut m = 0;
                    for (corner, ca, cb) in [(ap, 1.0, 0.0), (am, -1.0, 0.0), (bp, 0.0, 1.0), (bm, 0.0, -1.0)] {
                        match nodes[..m].iter_mut().find(|e| e.0 == corner) {
                            Some(e) => {
                                e.1 += ca;
                                e.2 += cb;
                            }
                            None => {
                                nodes[m] = (corner, ca, cb);
                                m += 1;
                            }
                        }
                    }
                    for &(rc, ra, rb) in &nodes[..m] {
                        let row = c[rc];
                        if !interior(row) {
                            continue;
                        }
                        grad[row] += gscale * w * (ra * a + rb * b);
                        for &(cc, ca, cb) in &nodes[..m] {
                            let v = ra * (kaa * ca + kab * cb) + rb * (kab * ca + kbb * cb);
                            hess.a[row][slot(cc, rc)] += v;
                        }
                    }
                }
            }
        }
        (grad, hess)
    }
}

/// Stencil slot of corner `to` seen from corner `from` within one cell.
#[inline]
fn slot(to: usize, from: usize) -> usize {
    let (ti, tj) = ((to & 1) as isize, (to >> 1) as isize);
    let (fi, fj) = ((from & 1) as isize, (from >> 1) as isize);
    (CENTER as isize + (ti - fi) + 3 * (tj - fj)) as usize
}
