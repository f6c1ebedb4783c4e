//! Nine-point stencil operators on a node grid, a Galerkin multigrid V-cycle
//! and preconditioned conjugate gradients.
//!
//! Arrays cover every node `(i, j)`, `0 ≤ i ≤ nx`, `0 ≤ j ≤ ny`, stored row
//! by row. Only interior nodes are unknowns; boundary entries of correction
//! vectors are kept at zero.

use crate::error::{Error, Result};

/// Neighbour offset `(di, dj)` for stencil slot `k = (di + 1) + 3 (dj + 1)`.
pub(crate) const OFFSETS: [(isize, isize); 9] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (0, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];
pub(crate) const CENTER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Shape {
    pub nx: usize,
    pub ny: usize,
}

impl Shape {
    pub fn len(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn coarsen(&self) -> Option<Shape> {
        if self.nx % 2 == 0 && self.ny % 2 == 0 && self.ny >= 8 && self.nx >= 8 {
            Some(Shape { nx: self.nx / 2, ny: self.ny / 2 })
        } else {
            None
        }
    }

    fn interior(&self) -> usize {
        (self.nx - 1) * (self.ny - 1)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Stencil {
    pub shape: Shape,
    pub a: Vec<[f64; 9]>,
}

impl Stencil {
    pub fn zeros(shape: Shape) -> Self {
        Self { shape, a: vec![[0.0; 9]; shape.len()] }
    }

    /// `y = A x` on interior nodes; boundary entries of `y` are zero.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let s = self.shape;
        let w = s.nx + 1;
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 1..s.ny {
            for i in 1..s.nx {
                let c = s.idx(i, j);
                let a = &self.a[c];
                y[c] = a[0] * x[c - w - 1]
                    + a[1] * x[c - w]
                    + a[2] * x[c - w + 1]
                    + a[3] * x[c - 1]
                    + a[4] * x[c]
                    + a[5] * x[c + 1]
                    + a[6] * x[c + w - 1]
                    + a[7] * x[c + w]
                    + a[8] * x[c + w + 1];
            }
        }
    }

    #[inline]
    fn relax(&self, x: &mut [f64], b: &[f64], i: usize, j: usize) {
        let w = self.shape.nx + 1;
        let c = self.shape.idx(i, j);
        let a = &self.a[c];
        let off = a[0] * x[c - w - 1]
            + a[1] * x[c - w]
            + a[2] * x[c - w + 1]
            + a[3] * x[c - 1]
            + a[5] * x[c + 1]
            + a[6] * x[c + w - 1]
            + a[7] * x[c + w]
            + a[8] * x[c + w + 1];
        x[c] = (b[c] - off) / a[CENTER];
    }

    pub fn gauss_seidel_forward(&self, x: &mut [f64], b: &[f64]) {
        for j in 1..self.shape.ny {
            for i in 1..self.shape.nx {
                self.relax(x, b, i, j);
            }
        }
    }

    pub fn gauss_seidel_backward(&self, x: &mut [f64], b: &[f64]) {
        for j in (1..self.shape.ny).rev() {
            for i in (1..self.shape.nx).rev() {
                self.relax(x, b, i, j);
            }
        }
    }
}

/// Interpolation weights from fine index `i` to coarse indices.
#[inline]
fn parents(i: usize) -> [(usize, f64); 2] {
    if i % 2 == 0 {
        [(i / 2, 1.0), (i / 2, 0.0)]
    } else {
        [(i / 2, 0.5), (i / 2 + 1, 0.5)]
    }
}

/// Bilinear interpolation of a coarse vector, added into `fine`.
fn prolong_add(coarse: &[f64], cs: Shape, fine: &mut [f64], fs: Shape) {
    for j in 1..fs.ny {
        let pj = parents(j);
        for i in 1..fs.nx {
            let pi = parents(i);
            let mut v = 0.0;
            for &(cj, wj) in &pj {
                for &(ci, wi) in &pi {
                    v += wi * wj * coarse[cs.idx(ci, cj)];
                }
            }
            fine[fs.idx(i, j)] += v;
        }
    }
}

/// Transpose of [`prolong_add`], restricted to coarse interior nodes.
fn restrict(fine: &[f64], fs: Shape, coarse: &mut [f64], cs: Shape) {
    coarse.iter_mut().for_each(|v| *v = 0.0);
    for j in 1..fs.ny {
        let pj = parents(j);
        for i in 1..fs.nx {
            let pi = parents(i);
            let f = fine[fs.idx(i, j)];
            for &(cj, wj) in &pj {
                for &(ci, wi) in &pi {
                    coarse[cs.idx(ci, cj)] += wi * wj * f;
                }
            }
        }
    }
    for j in 0..=cs.ny {
        for i in 0..=cs.nx {
            if i == 0 || j == 0 || i == cs.nx || j == cs.ny {
                coarse[cs.idx(i, j)] = 0.0;
            }
        }
    }
}

/// Galerkin coarse operator `R A P`, read off by probing with vectors that
/// are one on every third coarse node in each direction. A coarse node couples
/// only to its eight neighbours, so each probe fills one stencil slot per node.
fn galerkin(fine: &Stencil, cs: Shape) -> Stencil {
    let fs = fine.shape;
    let mut coarse = Stencil::zeros(cs);
    let mut e = vec![0.0; cs.len()];
    let mut pe = vec![0.0; fs.len()];
    let mut ape = vec![0.0; fs.len()];
    let mut rape = vec![0.0; cs.len()];
    for cj in 0..3 {
        for ci in 0..3 {
            e.iter_mut().for_each(|v| *v = 0.0);
            for j in 1..cs.ny {
                for i in 1..cs.nx {
                    if i % 3 == ci && j % 3 == cj {
                        e[cs.idx(i, j)] = 1.0;
                    }
                }
            }
            pe.iter_mut().for_each(|v| *v = 0.0);
            prolong_add(&e, cs, &mut pe, fs);
            fine.apply(&pe, &mut ape);
            restrict(&ape, fs, &mut rape, cs);
            for j in 1..cs.ny {
                for i in 1..cs.nx {
                    for (k, &(di, dj)) in OFFSETS.iter().enumerate() {
                        let (ni, nj) = (i as isize + di, j as isize + dj);
                        if ni.rem_euclid(3) as usize == ci && nj.rem_euclid(3) as usize == cj {
                            let inside = ni > 0 && nj > 0 && (ni as usize) < cs.nx && (nj as usize) < cs.ny;
                            coarse.a[cs.idx(i, j)][k] = if inside { rape[cs.idx(i, j)] } else { 0.0 };
                        }
                    }
                }
            }
        }
    }
    coarse
}

/// Dense Cholesky factor of the coarsest operator.
struct DenseSolver {
    shape: Shape,
    n: usize,
    l: Vec<f64>,
}

impl DenseSolver {
    fn new(op: &Stencil) -> Result<Self> {
        let s = op.shape;
        let n = s.interior();
        let unknown = |i: usize, j: usize| (j - 1) * (s.nx - 1) + (i - 1);
        let mut m = vec![0.0; n * n];
        for j in 1..s.ny {
            for i in 1..s.nx {
                let r = unknown(i, j);
                for (k, &(di, dj)) in OFFSETS.iter().enumerate() {
                    let (ni, nj) = ((i as isize + di) as usize, (j as isize + dj) as usize);
                    if ni >= 1 && nj >= 1 && ni < s.nx && nj < s.ny {
                        m[r * n + unknown(ni, nj)] += op.a[s.idx(i, j)][k];
                    }
                }
            }
        }
        // symmetrize against round-off before factoring
        for r in 0..n {
            for c in 0..r {
                let v = 0.5 * (m[r * n + c] + m[c * n + r]);
                m[r * n + c] = v;
                m[c * n + r] = v;
            }
        }
        for c in 0..n {
            let mut d = m[c * n + c];
            for k in 0..c {
                d -= m[c * n + k] * m[c * n + k];
            }
            if !(d > 0.0) {
                return Err(Error::NonConvergence { iterations: 0, residual: d });
            }
            let d = d.sqrt();
            m[c * n + c] = d;
            for r in c + 1..n {
                let mut v = m[r * n + c];
                for k in 0..c {
                    v -= m[r * n + k] * m[c * n + k];
                }
                m[r * n + c] = v / d;
            }
        }
        Ok(Self { shape: s, n, l: m })
    }

    fn solve(&self, b: &[f64], x: &mut [f64]) {
        let s = self.shape;
        let n = self.n;
        let mut z = vec![0.0; n];
        for j in 1..s.ny {
            for i in 1..s.nx {
                z[(j - 1) * (s.nx - 1) + (i - 1)] = b[s.idx(i, j)];
            }
        }
        for r in 0..n {
            let mut v = z[r];
            for k in 0..r {
                v -= self.l[r * n + k] * z[k];
            }
            z[r] = v / self.l[r * n + r];
        }
        for r in (0..n).rev() {
            let mut v = z[r];
            for k in r + 1..n {
                v -= self.l[k * n + r] * z[k];
            }
            z[r] = v / self.l[r * n + r];
        }
        x.iter_mut().for_each(|v| *v = 0.0);
        for j in 1..s.ny {
            for i in 1..s.nx {
                x[s.idx(i, j)] = z[(j - 1) * (s.nx - 1) + (i - 1)];
            }
        }
    }
}

const SWEEPS: usize = 2;

/// Symmetric V-cycle: forward Gauss-Seidel before the coarse correction,
/// backward after it, exact solve on the coarsest level.
pub(crate) struct Multigrid {
    levels: Vec<Stencil>,
    coarsest: DenseSolver,
    scratch: Vec<[Vec<f64>; 3]>,
}

impl Multigrid {
    pub fn new(fine: Stencil) -> Result<Self> {
        let mut levels = vec![fine];
        while let Some(cs) = levels.last().unwrap().shape.coarsen() {
            let next = galerkin(levels.last().unwrap(), cs);
            levels.push(next);
        }
        let coarsest = DenseSolver::new(levels.last().unwrap())?;
        let scratch = levels
            .windows(2)
            .map(|w| {
                let (f, c) = (w[0].shape.len(), w[1].shape.len());
                [vec![0.0; f], vec![0.0; c], vec![0.0; c]]
            })
            .collect();
        Ok(Self { levels, coarsest, scratch })
    }

    pub fn operator(&self) -> &Stencil {
        &self.levels[0]
    }

    /// `x ≈ A⁻¹ b` by one V-cycle from a zero guess.
    pub fn precondition(&mut self, b: &[f64], x: &mut [f64]) {
        self.cycle(0, b, x);
    }

    fn cycle(&mut self, level: usize, b: &[f64], x: &mut [f64]) {
        if level + 1 == self.levels.len() {
            self.coarsest.solve(b, x);
            return;
        }
        let [mut r, mut bc, mut xc] = std::mem::take(&mut self.scratch[level]);
        let op = &self.levels[level];
        let fs = op.shape;
        let cs = self.levels[level + 1].shape;
        x.iter_mut().for_each(|v| *v = 0.0);
        for _ in 0..SWEEPS {
            op.gauss_seidel_forward(x, b);
        }
        op.apply(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        restrict(&r, fs, &mut bc, cs);
        self.cycle(level + 1, &bc, &mut xc);
        prolong_add(&xc, cs, x, fs);
        let op = &self.levels[level];
        for _ in 0..SWEEPS {
            op.gauss_seidel_backward(x, b);
        }
        self.scratch[level] = [r, bc, xc];
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Multigrid-preconditioned CG for `A x = b`, starting from `x = 0`. Returns
/// the iteration count once `‖r‖ ≤ rtol ‖b‖`.
pub(crate) fn pcg(mg: &mut Multigrid, b: &[f64], x: &mut [f64], rtol: f64, max_iter: usize) -> Result<usize> {
    let n = b.len();
    x.iter_mut().for_each(|v| *v = 0.0);
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok(0);
    }
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let mut q = vec![0.0; n];
    mg.precondition(&r, &mut z);
    let mut d = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        mg.operator().apply(&d, &mut q);
        let dq = dot(&d, &q);
        if !(dq > 0.0) {
            return Err(Error::NonConvergence { iterations: it, residual: dot(&r, &r).sqrt() / bnorm });
        }
        let alpha = rz / dq;
        for k in 0..n {
            x[k] += alpha * d[k];
            r[k] -= alpha * q[k];
        }
        let rn = dot(&r, &r).sqrt();
        if rn <= rtol * bnorm {
            return Ok(it);
        }
        mg.precondition(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            d[k] = z[k] + beta * d[k];
        }
    }
    Err(Error::NonConvergence { iterations: max_iter, residual: dot(&r, &r).sqrt() / bnorm })
}
