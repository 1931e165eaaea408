//! Restarted flexible GMRES and the Jacobi-preconditioned GMRES smoother.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::SparseMatrix;

/// Right preconditioner `z ≈ A⁻¹ r`. It may change between applications.
pub trait Preconditioner<T> {
    fn apply(&self, r: &[T], z: &mut [T]) -> Result<()>;
}

/// `z = r`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl<T: Copy> Preconditioner<T> for IdentityPreconditioner {
    fn apply(&self, r: &[T], z: &mut [T]) -> Result<()> {
        z.copy_from_slice(r);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrylovConfig {
    pub restart: usize,
    /// Stop when `‖r‖ ≤ tol·‖b‖`.
    pub tol: f64,
    /// Stop when `‖r‖ ≤ abs_tol`; the default only catches (near) zero
    /// right-hand sides.
    pub abs_tol: f64,
    pub max_iterations: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        KrylovConfig { restart: 30, tol: 1e-10, abs_tol: 1e-15, max_iterations: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrylovOutcome {
    pub iterations: usize,
    /// Residual estimates relative to `‖b‖`, starting with the initial residual.
    pub residual_history: Vec<f64>,
    /// True relative residual of the returned iterate.
    pub final_residual: f64,
    pub converged: bool,
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn residual<T: Real>(a: &SparseMatrix<T>, b: &[T], x: &[T], r: &mut [T]) {
    a.mul_vec_into(x, r);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

/// Givens rotation zeroing `b` in `(a, b)`.
fn givens<T: Real>(a: T, b: T) -> (T, T) {
    if b == T::zero() {
        (T::one(), T::zero())
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}

/// Largest `j <= k` whose leading `j`x`j` triangle has no zero pivot. A zero
/// pivot only appears once the basis is pure round-off; those directions are
/// dropped.
fn nonsingular<T: Real>(h: &[Vec<T>], k: usize) -> usize {
    (0..k).find(|&i| h[i][i] == T::zero()).unwrap_or(k)
}

/// Back substitution on the leading `k`x`k` block of the rotated Hessenberg matrix.
fn solve_upper<T: Real>(h: &[Vec<T>], g: &[T], k: usize) -> Vec<T> {
    let mut y = vec![T::zero(); k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h[j][i] * y[j];
        }
        y[i] = s / h[i][i];
    }
    y
}

/// Restarted FGMRES with right preconditioning, improving `x` in place.
///
/// The preconditioner is applied to every new basis vector and the
/// preconditioned vectors are kept, so it may vary between iterations.
pub fn fgmres<T: Real, P: Preconditioner<T> + ?Sized>(
    a: &SparseMatrix<T>,
    b: &[T],
    x: &mut [T],
    precond: &P,
    config: &KrylovConfig,
) -> Result<KrylovOutcome> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n || x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "fgmres on {}x{} with rhs {} and iterate {}",
            a.nrows(),
            a.ncols(),
            b.len(),
            x.len()
        )));
    }
    if config.restart == 0 {
        return Err(Error::Config("restart length must be at least 1".into()));
    }
    let m = config.restart;
    let bnorm = norm(b).to_f64().unwrap();
    let mut r = vec![T::zero(); n];
    residual(a, b, x, &mut r);
    let mut beta = norm(&r).to_f64().unwrap();
    let scale = if bnorm > 0.0 { bnorm } else { beta.max(f64::MIN_POSITIVE) };
    let done = |res: f64| res <= config.tol * scale || res <= config.abs_tol;
    let mut history = vec![beta / scale];
    let mut iterations = 0;

    let mut v: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    let mut z: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut h: Vec<Vec<T>> = vec![vec![T::zero(); m + 1]; m];
    let mut cs = vec![T::zero(); m];
    let mut sn = vec![T::zero(); m];
    let mut g = vec![T::zero(); m + 1];
    let mut w = vec![T::zero(); n];

    while !done(beta) && iterations < config.max_iterations {
        v.clear();
        z.clear();
        let inv = T::of(1.0 / beta);
        v.push(r.iter().map(|&ri| ri * inv).collect());
        g.iter_mut().for_each(|gi| *gi = T::zero());
        g[0] = T::of(beta);
        let mut k = 0;
        while k < m && iterations < config.max_iterations {
            let mut zk = vec![T::zero(); n];
            precond.apply(&v[k], &mut zk)?;
            a.mul_vec_into(&zk, &mut w);
            z.push(zk);
            let wnorm = norm(&w);
            // Modified Gram-Schmidt.
            let col = &mut h[k];
            for (i, vi) in v.iter().enumerate() {
                col[i] = dot(&w, vi);
                axpy(-col[i], vi, &mut w);
            }
            let hnext = norm(&w);
            col[k + 1] = hnext;
            for i in 0..k {
                let (c, s) = (cs[i], sn[i]);
                let (p, q) = (col[i], col[i + 1]);
                col[i] = c * p + s * q;
                col[i + 1] = c * q - s * p;
            }
            let (c, s) = givens(col[k], col[k + 1]);
            cs[k] = c;
            sn[k] = s;
            col[k] = c * col[k] + s * col[k + 1];
            col[k + 1] = T::zero();
            g[k + 1] = -s * g[k];
            g[k] = c * g[k];
            k += 1;
            iterations += 1;
            let res = g[k].abs().to_f64().unwrap();
            if !res.is_finite() {
                return Err(Error::Divergence(format!("residual is {res} after {iterations} iterations")));
            }
            history.push(res / scale);
            if done(res) || hnext <= wnorm * T::epsilon() {
                break;
            }
            let inv = T::one() / hnext;
            v.push(w.iter().map(|&wi| wi * inv).collect());
        }
        let y = solve_upper(&h, &g, nonsingular(&h, k));
        for (yi, zi) in y.iter().zip(&z) {
            axpy(*yi, zi, x);
        }
        residual(a, b, x, &mut r);
        beta = norm(&r).to_f64().unwrap();
        if !beta.is_finite() {
            return Err(Error::Divergence(format!("residual is {beta} after {iterations} iterations")));
        }
    }
    Ok(KrylovOutcome { iterations, residual_history: history, final_residual: beta / scale, converged: done(beta) })
}

/// GMRES(k) left-preconditioned by the inverse diagonal: the smoother.
#[derive(Debug, Clone)]
pub struct JacobiGmres<T> {
    inv_diag: Vec<T>,
    pub iterations: usize,
}

impl<T: Real> JacobiGmres<T> {
    pub fn new(a: &SparseMatrix<T>, iterations: usize) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::Config("smoother needs at least one inner iteration".into()));
        }
        let inv_diag = inverse_diagonal(a)?;
        Ok(JacobiGmres { inv_diag, iterations })
    }

    /// One restart cycle from the given `x`. Returns the Jacobi-scaled
    /// residual norm before and after.
    pub fn smooth(&self, a: &SparseMatrix<T>, b: &[T], x: &mut [T]) -> (T, T) {
        let n = b.len();
        let m = self.iterations;
        let mut r = vec![T::zero(); n];
        residual(a, b, x, &mut r);
        self.scale(&mut r);
        let beta = norm(&r);
        if beta == T::zero() || !beta.is_finite() {
            return (beta, beta);
        }
        let mut v: Vec<Vec<T>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|&ri| ri / beta).collect());
        let mut h: Vec<Vec<T>> = vec![vec![T::zero(); m + 1]; m];
        let mut cs = vec![T::zero(); m];
        let mut sn = vec![T::zero(); m];
        let mut g = vec![T::zero(); m + 1];
        g[0] = beta;
        let mut w = vec![T::zero(); n];
        let mut k = 0;
        while k < m {
            a.mul_vec_into(&v[k], &mut w);
            self.scale(&mut w);
            let wnorm = norm(&w);
            let col = &mut h[k];
            for (i, vi) in v.iter().enumerate() {
                col[i] = dot(&w, vi);
                axpy(-col[i], vi, &mut w);
            }
            let hnext = norm(&w);
            col[k + 1] = hnext;
            for i in 0..k {
                let (c, s) = (cs[i], sn[i]);
                let (p, q) = (col[i], col[i + 1]);
                col[i] = c * p + s * q;
                col[i + 1] = c * q - s * p;
            }
            let (c, s) = givens(col[k], col[k + 1]);
            cs[k] = c;
            sn[k] = s;
            col[k] = c * col[k] + s * col[k + 1];
            col[k + 1] = T::zero();
            g[k + 1] = -s * g[k];
            g[k] = c * g[k];
            k += 1;
            if hnext <= wnorm * T::epsilon() {
                break;
            }
            v.push(w.iter().map(|&wi| wi / hnext).collect());
        }
        let used = nonsingular(&h, k);
        let y = solve_upper(&h, &g, used);
        for (yi, vi) in y.iter().zip(&v) {
            axpy(*yi, vi, x);
        }
        (beta, g[used..=k].iter().map(|&gi| gi * gi).sum::<T>().sqrt())
    }

    fn scale(&self, r: &mut [T]) {
        for (ri, &d) in r.iter_mut().zip(&self.inv_diag) {
            *ri *= d;
        }
    }
}

pub(crate) fn inverse_diagonal<T: Real>(a: &SparseMatrix<T>) -> Result<Vec<T>> {
    a.diagonal()
        .into_iter()
        .enumerate()
        .map(|(i, d)| if d == T::zero() { Err(Error::ZeroDiagonal(i)) } else { Ok(T::one() / d) })
        .collect()
}

/// Jacobi-scaled residual norm `‖D⁻¹(b − A x)‖`.
pub fn scaled_residual<T: Real>(a: &SparseMatrix<T>, b: &[T], x: &[T]) -> Result<T> {
    let d = inverse_diagonal(a)?;
    let mut r = vec![T::zero(); b.len()];
    residual(a, b, x, &mut r);
    Ok(r.iter().zip(&d).map(|(&ri, &di)| (ri * di) * (ri * di)).sum::<T>().sqrt())
}
