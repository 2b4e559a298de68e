//! Finite-difference reference solver for `(−d²/dk² + |k|^α) φ = E φ`.
//!
//! Second-order central differences on `[−k_max, k_max]` with Dirichlet ends
//! give a symmetric tridiagonal matrix. Eigenvalues come from Sturm-sequence
//! bisection, eigenvectors from inverse iteration. Reported values are
//! Richardson-extrapolated over three nested grids.

use crate::error::{Error, Result};
use crate::genpoly::MomentumState;
use crate::levy::LevyIndex;

pub const MIN_POINTS: usize = 512;
pub const DEFAULT_EIGENPAIRS: usize = 20;
/// Cells used by [`eigen_residual`] when no grid is given.
pub const DEFAULT_RESIDUAL_CELLS: usize = 1 << 13;

/// Symmetric tridiagonal matrix.
#[derive(Clone, Debug)]
struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    /// Interior nodes `k_i = −k_max + i·h`, `i = 1..intervals`.
    fn operator(alpha: f64, k_max: f64, intervals: usize) -> (Self, Vec<f64>) {
        let h = 2.0 * k_max / intervals as f64;
        let nodes: Vec<f64> = (1..intervals).map(|i| -k_max + i as f64 * h).collect();
        let diag = nodes.iter().map(|k| 2.0 / (h * h) + k.abs().powf(alpha)).collect();
        (Self { diag, off: -1.0 / (h * h) }, nodes)
    }

    /// Number of eigenvalues below `x`.
    fn count_below(&self, x: f64) -> usize {
        let e2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `index`-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, index: usize) -> f64 {
        let r = 2.0 * self.off.abs();
        let mut lo = self.diag.iter().copied().fold(f64::INFINITY, f64::min) - r;
        let mut hi = self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + r;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T − shift) x = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let e = self.off;
        // rows hold (sub, diag, sup, sup2) after pivoting
        let mut dl = vec![e; n];
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        let mut du = vec![e; n];
        let mut du2 = vec![0.0; n];
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = f64::EPSILON * e.abs();
                }
                let f = dl[i] / d[i];
                d[i + 1] -= f * du[i];
                x[i + 1] -= f * x[i];
                dl[i] = 0.0;
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - f * tmp;
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                du[i] = tmp;
                x.swap(i, i + 1);
                x[i + 1] -= f * x[i];
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = f64::EPSILON * e.abs();
        }
        x[n - 1] /= d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        x
    }

    fn eigenvector(&self, lambda: f64, h: f64) -> Vec<f64> {
        let n = self.diag.len();
        // deterministic, non-symmetric start so every parity is represented
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64 * 0.618_033_988_75).fract())).collect();
        let shift = lambda - 1e-10 * lambda.abs().max(1.0);
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            let norm = (v.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        fix_sign(&mut v);
        v
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off * v[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Rightmost significant lobe positive.
fn fix_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(last) = v.iter().rev().find(|x| x.abs() > 1e-3 * peak) {
        if *last < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Richardson step for errors `c₂h² + c₄h⁴` from values at `h`, `h/2`, `h/4`.
fn richardson3(e0: f64, e1: f64, e2: f64) -> f64 {
    (64.0 * e2 - 20.0 * e1 + e0) / 45.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub alpha: f64,
    pub k_max: f64,
    /// Intervals of the coarsest grid.
    pub points: usize,
    pub eigenvalues: Vec<f64>,
    /// Interior nodes of the coarsest grid.
    pub nodes: Vec<f64>,
    /// Unit norm in `Σ v² h`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖(T − E)v‖/‖v‖` on the coarsest grid.
    pub residuals: Vec<f64>,
    /// Largest change of an extrapolated eigenvalue when every grid is halved.
    pub refinement_change: f64,
    /// `k_max^α` divided by the largest returned eigenvalue.
    pub boundary_margin: f64,
}

impl EigenResult {
    pub fn grid_step(&self) -> f64 {
        2.0 * self.k_max / self.points as f64
    }
}

/// Lowest [`DEFAULT_EIGENPAIRS`] eigenpairs on `points` intervals, refined on
/// two and four times as many.
pub fn diagonalize(alpha: f64, k_max: f64, points: usize) -> Result<EigenResult> {
    diagonalize_n(alpha, k_max, points, DEFAULT_EIGENPAIRS)
}

pub fn diagonalize_n(alpha: f64, k_max: f64, points: usize, count: usize) -> Result<EigenResult> {
    let a = LevyIndex::new(alpha)?.value();
    if points < MIN_POINTS || points % 2 != 0 {
        return Err(Error::InvalidGrid(format!("need an even point count ≥ {MIN_POINTS}, got {points}")));
    }
    if !(k_max > 0.0 && k_max.is_finite()) {
        return Err(Error::InvalidGrid(format!("k_max must be positive, got {k_max}")));
    }
    let count = count.min(points - 1).max(1);
    let grids: Vec<(Tridiagonal, Vec<f64>)> =
        (0..4).map(|l| Tridiagonal::operator(a, k_max, points << l)).collect();
    let values: Vec<Vec<f64>> = grids
        .iter()
        .map(|(t, _)| (0..count).map(|j| t.eigenvalue(j)).collect())
        .collect();

    let extrapolate = |lo: usize, j: usize| richardson3(values[lo][j], values[lo + 1][j], values[lo + 2][j]);
    let eigenvalues: Vec<f64> = (0..count).map(|j| extrapolate(0, j)).collect();
    let refinement_change = (0..count)
        .map(|j| (extrapolate(1, j) - eigenvalues[j]).abs())
        .fold(0.0, f64::max);
    let top = *eigenvalues.last().expect("count ≥ 1");
    let boundary_margin = k_max.powf(a) / top;
    if boundary_margin <= 1.0 {
        return Err(Error::Eigen(format!(
            "k_max^α = {} does not exceed the largest eigenvalue {top}",
            k_max.powf(a)
        )));
    }

    let h = 2.0 * k_max / points as f64;
    let (t0, nodes) = &grids[0];
    let mut eigenvectors = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for j in 0..count {
        let vecs: Vec<Vec<f64>> = (0..3)
            .map(|l| grids[l].0.eigenvector(values[l][j], h / (1u32 << l) as f64))
            .collect();
        // coarse node i sits at fine index (i+1)·2^l − 1
        let mut v: Vec<f64> = (0..nodes.len())
            .map(|i| {
                let at = |l: usize| vecs[l][((i + 1) << l) - 1];
                richardson3(at(0), at(1), at(2))
            })
            .collect();
        let norm = (v.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        fix_sign(&mut v);

        let coarse = &vecs[0];
        let tv = t0.apply(coarse);
        let res: f64 = tv.iter().zip(coarse).map(|(a, b)| (a - values[0][j] * b).powi(2)).sum();
        let nrm: f64 = coarse.iter().map(|x| x * x).sum();
        residuals.push((res / nrm).sqrt());
        eigenvectors.push(v);
    }

    Ok(EigenResult {
        alpha: a,
        k_max,
        points,
        eigenvalues,
        nodes: nodes.clone(),
        eigenvectors,
        residuals,
        refinement_change,
        boundary_margin,
    })
}

/// Cell-centred grid for applying the operator to a sampled state; it never
/// touches `k = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualGrid {
    pub k_max: f64,
    pub cells: usize,
}

impl ResidualGrid {
    pub fn for_state(state: &MomentumState) -> Self {
        // the polynomial factor grows fast, so the envelope is taken far down
        Self { k_max: state.envelope_cutoff(1e-30), cells: DEFAULT_RESIDUAL_CELLS }
    }
}

/// Samples on the cell centres of `[−k_max, k_max]` and `Lφ` with zero
/// Dirichlet data outside. The second difference is the Richardson
/// combination `(4δ²_h − δ²_{2h})/3` of the stencils at `h` and `2h`.
fn apply_operator(state: &MomentumState, alpha: f64, k_max: f64, cells: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = 2.0 * k_max / cells as f64;
    let phi: Vec<f64> = (0..cells)
        .map(|i| state.amplitude(-k_max + (i as f64 + 0.5) * h))
        .collect::<Result<_>>()?;
    let at = |i: isize| if i < 0 || i >= cells as isize { 0.0 } else { phi[i as usize] };
    let lphi = (0..cells)
        .map(|i| {
            let k = -k_max + (i as f64 + 0.5) * h;
            let j = i as isize;
            let d1 = (at(j - 1) - 2.0 * phi[i] + at(j + 1)) / (h * h);
            let d2 = (at(j - 2) - 2.0 * phi[i] + at(j + 2)) / (4.0 * h * h);
            -(4.0 * d1 - d2) / 3.0 + k.abs().powf(alpha) * phi[i]
        })
        .collect();
    Ok((phi, lphi))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rayleigh quotient of a sampled state under the discretized operator and
/// the relative residual `‖(L − R)φ‖/‖φ‖`.
pub fn eigen_residual(state: &MomentumState, alpha: f64, grid: &ResidualGrid) -> Result<(f64, f64)> {
    let a = LevyIndex::new(alpha)?.value();
    state.require_normalizable()?;
    if grid.cells < MIN_POINTS || !(grid.k_max > 0.0) {
        return Err(Error::InvalidGrid(format!("{grid:?}")));
    }
    let (phi, lphi) = apply_operator(state, a, grid.k_max, grid.cells)?;
    let den = dot(&phi, &phi);
    let rayleigh = dot(&phi, &lphi) / den;
    let res: f64 = lphi.iter().zip(&phi).map(|(l, p)| (l - rayleigh * p).powi(2)).sum();
    Ok((rayleigh, (res / den).sqrt()))
}

/// `|⟨φₙ, v_m⟩|` between normalized factorization states `n ≤ n_max` and the
/// solver's eigenvectors `m ≤ n_max`, on the solver's coarse grid.
pub fn overlaps(result: &EigenResult, n_max: u32) -> Result<Vec<Vec<f64>>> {
    let alpha = LevyIndex::new(result.alpha)?;
    let h = result.grid_step();
    let m_max = (n_max as usize).min(result.eigenvectors.len() - 1);
    (0..=n_max)
        .map(|n| {
            let state = MomentumState::new(n, alpha);
            if !state.is_normalizable() {
                return Ok(vec![f64::NAN; m_max + 1]);
            }
            // an integrable singularity at the k = 0 node is dropped
            let phi: Vec<f64> = result.nodes.iter().map(|&k| state.amplitude(k).unwrap_or(0.0)).collect();
            let norm = (phi.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
            Ok((0..=m_max)
                .map(|m| {
                    let dot: f64 = phi.iter().zip(&result.eigenvectors[m]).map(|(a, b)| a * b).sum();
                    (dot * h / norm).abs()
                })
                .collect())
        })
        .collect()
}
