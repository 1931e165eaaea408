//! V-cycle preconditioner over a Galerkin hierarchy.

use serde::{Deserialize, Serialize};

use super::krylov::{inverse_diagonal, residual, JacobiGmres, Preconditioner};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::SparseMatrix;

/// Largest coarsest level factored densely.
pub const MAX_DIRECT_UNKNOWNS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmootherKind {
    /// GMRES restarted after `inner_iterations`, left-preconditioned by the
    /// inverse diagonal.
    JacobiGmres,
    /// Damped Jacobi sweeps; linear in the right-hand side.
    Jacobi { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmootherConfig {
    pub kind: SmootherKind,
    /// GMRES iterations (or Jacobi sweeps) per application.
    pub inner_iterations: usize,
    /// Applications per pre- and per post-smooth.
    pub applications: usize,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        SmootherConfig { kind: SmootherKind::JacobiGmres, inner_iterations: 3, applications: 3 }
    }
}

impl SmootherConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inner_iterations == 0 || self.applications == 0 {
            return Err(Error::Config("smoother iterations and applications must be at least 1".into()));
        }
        if let SmootherKind::Jacobi { omega } = self.kind {
            if !(omega > 0.0 && omega <= 1.0) {
                return Err(Error::Config(format!("Jacobi damping {omega} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

/// Dense LU factorisation with partial pivoting.
#[derive(Debug, Clone)]
pub struct DenseLu<T> {
    n: usize,
    lu: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Real> DenseLu<T> {
    pub fn factor(a: &SparseMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!("LU of {}x{}", n, a.ncols())));
        }
        let mut lu = vec![T::zero(); n * n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                lu[i * n + j] = v;
            }
        }
        let mut pivots = vec![0; n];
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| lu[x * n + k].abs().partial_cmp(&lu[y * n + k].abs()).unwrap_or(std::cmp::Ordering::Equal))
                .expect("nonempty column");
            if lu[p * n + k] == T::zero() || !lu[p * n + k].is_finite() {
                return Err(Error::Singular(k));
            }
            pivots[k] = p;
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            let inv = T::one() / lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] * inv;
                if f == T::zero() {
                    continue;
                }
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= f * u;
                }
            }
        }
        Ok(DenseLu { n, lu, pivots })
    }

    pub fn solve(&self, b: &[T], x: &mut [T]) {
        let n = self.n;
        x.copy_from_slice(b);
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
    }
}

#[derive(Debug, Clone)]
enum Smoother<T> {
    Gmres(JacobiGmres<T>),
    Jacobi { inv_diag: Vec<T>, omega: T, sweeps: usize },
}

impl<T: Real> Smoother<T> {
    fn new(a: &SparseMatrix<T>, config: &SmootherConfig) -> Result<Self> {
        Ok(match config.kind {
            SmootherKind::JacobiGmres => Smoother::Gmres(JacobiGmres::new(a, config.inner_iterations)?),
            SmootherKind::Jacobi { omega } => Smoother::Jacobi {
                inv_diag: inverse_diagonal(a)?,
                omega: T::of(omega),
                sweeps: config.inner_iterations,
            },
        })
    }

    fn apply(&self, a: &SparseMatrix<T>, b: &[T], x: &mut [T], r: &mut [T]) {
        match self {
            Smoother::Gmres(g) => {
                g.smooth(a, b, x);
            }
            Smoother::Jacobi { inv_diag, omega, sweeps } => {
                for _ in 0..*sweeps {
                    residual(a, b, x, r);
                    for ((xi, &ri), &d) in x.iter_mut().zip(r.iter()).zip(inv_diag) {
                        *xi += *omega * d * ri;
                    }
                }
            }
        }
    }
}

/// Operators, transfers, smoothers and the coarsest factorisation.
#[derive(Debug, Clone)]
pub struct Multigrid<T> {
    operators: Vec<SparseMatrix<T>>,
    prolongations: Vec<SparseMatrix<T>>,
    restrictions: Vec<SparseMatrix<T>>,
    smoothers: Vec<Smoother<T>>,
    coarsest: DenseLu<T>,
    config: SmootherConfig,
}

impl<T: Real> Multigrid<T> {
    /// `operators[0]` is the finest; `prolongations[l]` maps level `l + 1`
    /// to level `l`.
    pub fn new(
        operators: Vec<SparseMatrix<T>>,
        prolongations: Vec<SparseMatrix<T>>,
        config: SmootherConfig,
    ) -> Result<Self> {
        config.validate()?;
        if operators.is_empty() || prolongations.len() + 1 != operators.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} operators with {} prolongations",
                operators.len(),
                prolongations.len()
            )));
        }
        for (l, p) in prolongations.iter().enumerate() {
            if p.nrows() != operators[l].nrows() || p.ncols() != operators[l + 1].nrows() {
                return Err(Error::DimensionMismatch(format!("prolongation {l} does not match its operators")));
            }
        }
        let last = operators.last().expect("nonempty");
        if last.nrows() > MAX_DIRECT_UNKNOWNS {
            return Err(Error::Config(format!(
                "coarsest level has {} unknowns, more than the {MAX_DIRECT_UNKNOWNS} allowed for the direct solve",
                last.nrows()
            )));
        }
        let coarsest = DenseLu::factor(last)?;
        let smoothers =
            operators[..operators.len() - 1].iter().map(|a| Smoother::new(a, &config)).collect::<Result<_>>()?;
        let restrictions = prolongations.iter().map(SparseMatrix::transpose).collect();
        Ok(Multigrid { operators, prolongations, restrictions, smoothers, coarsest, config })
    }

    pub fn num_levels(&self) -> usize {
        self.operators.len()
    }

    pub fn operators(&self) -> &[SparseMatrix<T>] {
        &self.operators
    }

    /// One V-cycle for `A z = r` from a zero initial guess.
    pub fn vcycle(&self, r: &[T], z: &mut [T]) {
        self.cycle(0, r, z);
    }

    fn cycle(&self, l: usize, b: &[T], x: &mut [T]) {
        if l + 1 == self.operators.len() {
            self.coarsest.solve(b, x);
            return;
        }
        let a = &self.operators[l];
        let smoother = &self.smoothers[l];
        let mut r = vec![T::zero(); b.len()];
        x.iter_mut().for_each(|v| *v = T::zero());
        for _ in 0..self.config.applications {
            smoother.apply(a, b, x, &mut r);
        }
        residual(a, b, x, &mut r);
        let rc = self.restrictions[l].mul_vec(&r);
        let mut xc = vec![T::zero(); rc.len()];
        self.cycle(l + 1, &rc, &mut xc);
        let correction = self.prolongations[l].mul_vec(&xc);
        for (xi, ci) in x.iter_mut().zip(correction) {
            *xi += ci;
        }
        for _ in 0..self.config.applications {
            smoother.apply(a, b, x, &mut r);
        }
    }
}

impl<T: Real> Preconditioner<T> for Multigrid<T> {
    fn apply(&self, r: &[T], z: &mut [T]) -> Result<()> {
        self.vcycle(r, z);
        Ok(())
    }
}
