use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

use super::arith::{Arithmetic, Instrumented};
use super::lipschitz::dual_lipschitz;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Step-size constant; computed from the data when `None`.
    pub lipschitz: Option<f64>,
    pub eps_v: f64,
    pub eps_g: f64,
    pub max_iters: usize,
    /// Scale each constraint row to unit dual curvature before computing the
    /// step size.
    pub equilibrate: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { lipschitz: None, eps_v: 1e-6, eps_g: 1e-6, max_iters: 2000, equilibrate: true }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(l) = self.lipschitz {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Parameter(format!("Lipschitz constant must be positive, got {l}")));
            }
        }
        if !(self.eps_v >= 0.0 && self.eps_g >= 0.0) {
            return Err(Error::Parameter("tolerances must be nonnegative".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::Parameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    /// Iteration cap reached; the result holds the best iterate seen.
    MaxIters,
    /// Fixed-point overflow in the given iteration; the result holds the best
    /// iterate before it.
    Overflow { iteration: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub z: DVector<f64>,
    pub y: DVector<f64>,
    pub iters: usize,
    /// `||[Dz - d]_+||_inf`.
    pub infeasibility: f64,
    /// `max(0, -y'(Dz - d))`, an upper bound on `V(z) - V*`.
    pub dual_gap_bound: f64,
    /// Additions and multiply-accumulates spent in the iterations.
    pub ops: u64,
    pub overflow: bool,
    pub status: SolveStatus,
}

impl SolverResult {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// Turns a non-converged result into an error.
    pub fn into_result(self) -> Result<Self> {
        match self.status {
            SolveStatus::Converged => Ok(self),
            SolveStatus::MaxIters => Err(Error::MaxItersExceeded { best: Box::new(self) }),
            SolveStatus::Overflow { iteration } => Err(Error::SolverOverflow { iteration }),
        }
    }
}

/// Real-valued view of one iterate, handed to observers.
#[derive(Debug)]
pub struct Iterate<'a> {
    pub index: usize,
    pub z: &'a DVector<f64>,
    /// Dual vector for the original (unscaled) constraints.
    pub y: &'a DVector<f64>,
    /// `Dz - d` for the original constraints.
    pub g: &'a DVector<f64>,
}

/// Dual gradient projection for `min 1/2 z'Hz + h'z s.t. Dz <= d`:
///
/// ```text
/// z = -H^-1 (D'y + h)
/// y <- [y + (Dz - d) / L]_+
/// ```
///
/// All inversions happen at construction. The iteration itself uses the
/// precomputed `M1 = -H^-1 D'` and `D / L` stored in the arithmetic `A`, so
/// one iteration costs `2nm + n + m` additions and multiply-accumulates.
///
/// Two diagonal transformations are applied in double precision before
/// quantization. A row scaling `S` of the constraints changes the dual metric
/// and so the convergence speed. A power-of-two change of dual variables
/// `Sigma = 2^round(log2(S / L))` makes one unit of the stored dual iterate
/// worth one unit of constraint residual, so a fixed-point run resolves the
/// residual (and hence the applied input) at the word's own resolution. The
/// second one is exact in binary and changes nothing in double precision.
#[derive(Debug)]
pub struct GpdSolver<A: Arithmetic> {
    arith: Instrumented<A>,
    cfg: SolverConfig,
    n: usize,
    m: usize,
    lipschitz: f64,
    chol: Cholesky<f64, Dyn>,
    /// Original constraint matrix, for monitoring in double precision.
    constraints: DMatrix<f64>,
    row_scale: DVector<f64>,
    dual_scale: DVector<f64>,
    /// `M1 Sigma`, n x m, row-major.
    primal_map: Vec<A::Scalar>,
    /// `Sigma^-1 S D / L`, m x n, row-major.
    dual_map: Vec<A::Scalar>,
}

impl<A: Arithmetic> GpdSolver<A> {
    pub fn new(hessian: &DMatrix<f64>, constraints: &DMatrix<f64>, cfg: SolverConfig, arith: A) -> Result<Self> {
        cfg.validate()?;
        let n = hessian.nrows();
        let m = constraints.nrows();
        if hessian.ncols() != n || constraints.ncols() != n {
            return Err(Error::Dimension(format!(
                "H is {}x{}, D is {}x{}",
                hessian.nrows(),
                hessian.ncols(),
                constraints.nrows(),
                constraints.ncols()
            )));
        }
        let chol = hessian
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Parameter("Hessian must be positive definite".into()))?;

        let hinv_dt = chol.solve(&constraints.transpose());
        let w = constraints * &hinv_dt;
        let row_scale = DVector::from_fn(m, |i, _| {
            let c = w[(i, i)];
            if cfg.equilibrate && c > 1e-300 {
                1.0 / c.sqrt()
            } else {
                1.0
            }
        });
        let scaled_d = DMatrix::from_fn(m, n, |i, j| row_scale[i] * constraints[(i, j)]);
        let lipschitz = match cfg.lipschitz {
            Some(l) => l,
            None => {
                let ws = DMatrix::from_fn(m, m, |i, j| row_scale[i] * w[(i, j)] * row_scale[j]);
                dual_lipschitz(&ws)?
            }
        };

        // M1 = -H^-1 (S D)'  and  S D / L
        let m1 = DMatrix::from_fn(n, m, |j, i| -hinv_dt[(j, i)] * row_scale[i]);
        let dl = &scaled_d / lipschitz;
        let dual_scale = DVector::from_fn(m, |i, _| (row_scale[i] / lipschitz).log2().round().exp2());

        let primal_map = (0..n)
            .flat_map(|j| (0..m).map(move |i| (j, i)))
            .map(|(j, i)| arith.encode(m1[(j, i)] * dual_scale[i]))
            .collect::<Result<Vec<_>>>()?;
        let dual_map = (0..m)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| arith.encode(dl[(i, j)] / dual_scale[i]))
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            arith: Instrumented::new(arith),
            cfg,
            n,
            m,
            lipschitz,
            chol,
            constraints: constraints.clone(),
            row_scale,
            dual_scale,
            primal_map,
            dual_map,
        })
    }

    pub fn num_primal(&self) -> usize {
        self.n
    }

    pub fn num_dual(&self) -> usize {
        self.m
    }

    /// Step-size constant in use (for the row-scaled constraints).
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// Scalars stored for the iteration matrices.
    pub fn stored_matrix_entries(&self) -> usize {
        self.primal_map.len() + self.dual_map.len()
    }

    pub fn solve(&self, h: &DVector<f64>, d: &DVector<f64>, warm_y: Option<&DVector<f64>>) -> Result<SolverResult> {
        self.solve_observed(h, d, warm_y, |_| {})
    }

    /// Like [`solve`](Self::solve), calling `observer` on every iterate
    /// `(z_k, y_k)` before the termination test.
    pub fn solve_observed<F>(
        &self,
        h: &DVector<f64>,
        d: &DVector<f64>,
        warm_y: Option<&DVector<f64>>,
        mut observer: F,
    ) -> Result<SolverResult>
    where
        F: FnMut(&Iterate<'_>),
    {
        let (n, m) = (self.n, self.m);
        if h.len() != n || d.len() != m || warm_y.is_some_and(|y| y.len() != m) {
            return Err(Error::Dimension("h, d or warm start has the wrong length".into()));
        }
        let ar = &self.arith;
        ar.reset();

        // parameter-dependent offsets: -H^-1 h and Sigma^-1 S d / L
        let m2 = -self.chol.solve(h);
        let l = self.lipschitz;
        let mut best = Best::new(n, m);

        let setup = || -> Result<(Vec<A::Scalar>, Vec<A::Scalar>, Vec<A::Scalar>)> {
            let primal_offset = (0..n)
                .map(|j| ar.encode(m2[j]))
                .collect::<Result<Vec<_>>>()?;
            let neg_dual_offset = (0..m)
                .map(|i| ar.encode(-self.row_scale[i] * d[i] / l / self.dual_scale[i]))
                .collect::<Result<Vec<_>>>()?;
            let y0 = (0..m)
                .map(|i| {
                    let y = warm_y.map_or(0.0, |w| w[i].max(0.0));
                    ar.encode(y / self.row_scale[i] / self.dual_scale[i])
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((primal_offset, neg_dual_offset, y0))
        };
        let (primal_offset, neg_dual_offset, mut y) = match setup() {
            Ok(v) => v,
            Err(_) => return Ok(best.finish(SolveStatus::Overflow { iteration: 0 }, 0, 0)),
        };

        let mut z = vec![ar.zero(); n];
        let mut w = vec![ar.zero(); m];
        let mut z_real = DVector::zeros(n);
        let mut y_real = DVector::zeros(m);
        let mut g_real = DVector::zeros(m);
        let mut ops = 0;

        for iter in 0..self.cfg.max_iters {
            let step = (|| -> Result<()> {
                // z = M1 y + m2
                for (j, zj) in z.iter_mut().enumerate() {
                    let row = &self.primal_map[j * m..(j + 1) * m];
                    let acc = row.iter().zip(&y).try_fold(ar.zero(), |acc, (&a, &b)| ar.mac(acc, a, b))?;
                    *zj = ar.add(acc, primal_offset[j])?;
                }
                // w = (y - d/L) + (D/L) z
                for (i, wi) in w.iter_mut().enumerate() {
                    let row = &self.dual_map[i * n..(i + 1) * n];
                    let start = ar.add(y[i], neg_dual_offset[i])?;
                    *wi = row.iter().zip(&z).try_fold(start, |acc, (&a, &b)| ar.mac(acc, a, b))?;
                }
                Ok(())
            })();
            ops = ar.ops();
            if step.is_err() {
                return Ok(best.finish(SolveStatus::Overflow { iteration: iter }, iter, ops));
            }

            // monitoring, in double precision on the dequantized iterate
            for j in 0..n {
                z_real[j] = ar.decode(z[j]);
            }
            for i in 0..m {
                y_real[i] = ar.decode(y[i]) * self.row_scale[i] * self.dual_scale[i];
            }
            self.constraints.mul_to(&z_real, &mut g_real);
            g_real -= d;
            observer(&Iterate { index: iter, z: &z_real, y: &y_real, g: &g_real });

            let infeasibility = g_real.iter().fold(0.0f64, |acc, &g| acc.max(g));
            let gap = (-y_real.dot(&g_real)).max(0.0);
            best.offer(&z_real, &y_real, infeasibility, gap, &self.cfg);
            if infeasibility <= self.cfg.eps_g && gap <= self.cfg.eps_v {
                return Ok(SolverResult {
                    z: z_real,
                    y: y_real,
                    iters: iter + 1,
                    infeasibility,
                    dual_gap_bound: gap,
                    ops,
                    overflow: false,
                    status: SolveStatus::Converged,
                });
            }

            for (yi, &wi) in y.iter_mut().zip(&w) {
                *yi = ar.positive_part(wi);
            }
        }
        Ok(best.finish(SolveStatus::MaxIters, self.cfg.max_iters, ops))
    }
}

/// Best iterate seen so far, scored by the worse of the two tolerance ratios.
struct Best {
    z: DVector<f64>,
    y: DVector<f64>,
    infeasibility: f64,
    gap: f64,
    score: f64,
}

impl Best {
    fn new(n: usize, m: usize) -> Self {
        Self {
            z: DVector::zeros(n),
            y: DVector::zeros(m),
            infeasibility: f64::INFINITY,
            gap: f64::INFINITY,
            score: f64::INFINITY,
        }
    }

    fn offer(&mut self, z: &DVector<f64>, y: &DVector<f64>, infeasibility: f64, gap: f64, cfg: &SolverConfig) {
        let ratio = |v: f64, eps: f64| if eps > 0.0 { v / eps } else { v };
        let score = ratio(infeasibility, cfg.eps_g).max(ratio(gap, cfg.eps_v));
        if score < self.score {
            self.z.copy_from(z);
            self.y.copy_from(y);
            self.infeasibility = infeasibility;
            self.gap = gap;
            self.score = score;
        }
    }

    fn finish(self, status: SolveStatus, iters: usize, ops: u64) -> SolverResult {
        SolverResult {
            z: self.z,
            y: self.y,
            iters,
            infeasibility: self.infeasibility,
            dual_gap_bound: self.gap,
            ops,
            overflow: matches!(status, SolveStatus::Overflow { .. }),
            status,
        }
    }
}
