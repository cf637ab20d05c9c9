use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{Pair, SparseColMat, SymbolicSparseColMat};
use faer::Mat;

use super::layout::{Layout, Link, E, N, NONE, S, W};
use crate::error::{Error, Result};
use crate::geometry::MacGrid;

/// Coordinate-format matrix with a fixed entry order. Duplicates are summed.
#[derive(Debug, Clone, Default)]
pub(crate) struct Coo {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Coo {
    #[inline]
    pub fn push(&mut self, r: usize, c: usize, v: f64) {
        self.rows.push(r);
        self.cols.push(c);
        self.vals.push(v);
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    /// `y += A x`
    pub fn mul_add(&self, x: &[f64], y: &mut [f64]) {
        for k in 0..self.vals.len() {
            y[self.rows[k]] += self.vals[k] * x[self.cols[k]];
        }
    }
}

/// Viscous, pressure-gradient and continuity blocks. The continuity row of
/// `pinned` (a pressure dof) is replaced by `p = 0`.
pub(crate) fn stokes_block(layout: &Layout, g: &MacGrid, mu: f64, pinned: usize) -> Coo {
    let nx = g.nx;
    let h = g.h;
    let c = mu / (h * h);
    let mut m = Coo::default();
    for (k, &(i, j)) in layout.u_at.iter().enumerate() {
        let links = &layout.u_links[k];
        m.push(k, k, c * links.iter().map(|l| l.weight()).sum::<f64>());
        for l in links {
            if let Link::Dof(b) = *l {
                m.push(k, b, -c);
            }
        }
        let im = if i == 0 { nx - 1 } else { i - 1 };
        m.push(k, layout.gp(layout.p_dof[j * nx + i]), 1.0 / h);
        m.push(k, layout.gp(layout.p_dof[j * nx + im]), -1.0 / h);
    }
    for (k, &(i, j)) in layout.v_at.iter().enumerate() {
        let row = layout.gv(k);
        let links = &layout.v_links[k];
        m.push(row, row, c * links.iter().map(|l| l.weight()).sum::<f64>());
        for l in links {
            if let Link::Dof(b) = *l {
                m.push(row, layout.gv(b), -c);
            }
        }
        m.push(row, layout.gp(layout.p_dof[j * nx + i]), 1.0 / h);
        m.push(row, layout.gp(layout.p_dof[(j - 1) * nx + i]), -1.0 / h);
    }
    for (q, &(i, j)) in layout.p_at.iter().enumerate() {
        let row = layout.gp(q);
        if q == pinned {
            m.push(row, row, 1.0);
            continue;
        }
        let ip = (i + 1) % nx;
        for (d, s) in [
            (layout.u_dof[j * nx + ip], -1.0),
            (layout.u_dof[j * nx + i], 1.0),
        ] {
            if d != NONE {
                m.push(row, d, s / h);
            }
        }
        for (d, s) in [
            (layout.v_dof[(j + 1) * nx + i], -1.0),
            (layout.v_dof[j * nx + i], 1.0),
        ] {
            if d != NONE {
                m.push(row, layout.gv(d), s / h);
            }
        }
    }
    m
}

/// Linearized divergence-form convection `N(a)·` with transport velocity
/// `a` given as full staggered arrays. Every structurally possible entry is
/// emitted, including zeros, so the pattern does not depend on `a`.
pub(crate) fn convection_block(layout: &Layout, g: &MacGrid, au: &[f64], av: &[f64]) -> Coo {
    let nx = g.nx;
    let h = g.h;
    let wrap = |i: usize, d: isize| (i as isize + d).rem_euclid(nx as isize) as usize;
    let mut m = Coo::default();
    // face flux times transported value; `side` is +1 for E/N, -1 for W/S
    let emit = |m: &mut Coo, row: usize, own: usize, link: Link, flux: f64, side: f64, offset: usize| {
        let f = side * flux / h;
        let (self_w, nb_w) = match link {
            Link::Dof(_) => (0.5, 0.5),
            Link::Node => (0.5, 0.0),
            Link::Reflect => (0.0, 0.0),
            Link::Free => (1.0, 0.0),
        };
        m.push(row, own, f * self_w);
        if let Link::Dof(b) = link {
            m.push(row, offset + b, f * nb_w);
        }
    };
    for (k, &(i, j)) in layout.u_at.iter().enumerate() {
        let l = &layout.u_links[k];
        let fe = 0.5 * (au[j * nx + i] + au[j * nx + wrap(i, 1)]);
        let fw = 0.5 * (au[j * nx + wrap(i, -1)] + au[j * nx + i]);
        let im = wrap(i, -1);
        let fn_ = 0.5 * (av[(j + 1) * nx + im] + av[(j + 1) * nx + i]);
        let fs = 0.5 * (av[j * nx + im] + av[j * nx + i]);
        emit(&mut m, k, k, l[E], fe, 1.0, 0);
        emit(&mut m, k, k, l[W], fw, -1.0, 0);
        emit(&mut m, k, k, l[N], fn_, 1.0, 0);
        emit(&mut m, k, k, l[S], fs, -1.0, 0);
    }
    let off = layout.n_u();
    for (k, &(i, j)) in layout.v_at.iter().enumerate() {
        let l = &layout.v_links[k];
        let row = off + k;
        let fn_ = 0.5 * (av[j * nx + i] + av[(j + 1) * nx + i]);
        let fs = 0.5 * (av[(j - 1) * nx + i] + av[j * nx + i]);
        let ip = wrap(i, 1);
        let fe = 0.5 * (au[(j - 1) * nx + ip] + au[j * nx + ip]);
        let fw = 0.5 * (au[(j - 1) * nx + i] + au[j * nx + i]);
        emit(&mut m, row, row, l[N], fn_, 1.0, off);
        emit(&mut m, row, row, l[S], fs, -1.0, off);
        emit(&mut m, row, row, l[E], fe, 1.0, off);
        emit(&mut m, row, row, l[W], fw, -1.0, off);
    }
    m
}

/// Sparse LU wrapper that keeps the symbolic analysis of a fixed pattern.
pub(crate) struct Factorizer {
    symbolic: SymbolicSparseColMat<usize>,
    argsort: faer::sparse::Argsort<usize>,
    lu_symbolic: SymbolicLu<usize>,
}

impl Factorizer {
    pub fn new(n: usize, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let idx: Vec<Pair<usize, usize>> = rows
            .iter()
            .zip(cols)
            .map(|(&r, &c)| Pair::new(r, c))
            .collect();
        let (symbolic, argsort) = SymbolicSparseColMat::try_new_from_indices(n, n, &idx)
            .map_err(|e| Error::SingularSystem(format!("pattern: {e:?}")))?;
        let lu_symbolic = SymbolicLu::try_new(symbolic.as_ref())
            .map_err(|e| Error::SingularSystem(format!("symbolic LU: {e:?}")))?;
        Ok(Self {
            symbolic,
            argsort,
            lu_symbolic,
        })
    }

    pub fn factor(&self, vals: &[f64]) -> Result<Lu<usize, f64>> {
        let a = SparseColMat::new_from_argsort(self.symbolic.clone(), &self.argsort, vals)
            .map_err(|e| Error::SingularSystem(format!("assembly: {e:?}")))?;
        Lu::try_new_with_symbolic(self.lu_symbolic.clone(), a.as_ref())
            .map_err(|e| Error::SingularSystem(format!("numeric LU: {e:?}")))
    }
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Solves `A x = b` with up to three steps of iterative refinement; returns
/// the solution and the final relative residual.
pub(crate) fn solve_refined(
    lu: &Lu<usize, f64>,
    a: &Coo,
    b: &[f64],
    target: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = b.len();
    let bn = norm2(b);
    if bn == 0.0 {
        return Ok((vec![0.0; n], 0.0));
    }
    let rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    let sol = lu.solve(&rhs);
    let mut x: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
    let mut rel = f64::INFINITY;
    for step in 0..4 {
        let mut r = b.to_vec();
        let mut ax = vec![0.0; n];
        a.mul_add(&x, &mut ax);
        for i in 0..n {
            r[i] -= ax[i];
        }
        rel = norm2(&r) / bn;
        if !rel.is_finite() {
            return Err(Error::SingularSystem("non-finite solution".into()));
        }
        if rel <= target || step == 3 {
            break;
        }
        let rm = Mat::<f64>::from_fn(n, 1, |i, _| r[i]);
        let dx = lu.solve(&rm);
        for i in 0..n {
            x[i] += dx[(i, 0)];
        }
    }
    Ok((x, rel))
}
