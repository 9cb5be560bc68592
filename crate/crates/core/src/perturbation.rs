//! Discretized Schrödinger perturbation series p̃ = Σₙ p⁽ⁿ⁾ of a symmetric
//! transition density, built by the space-time convolution recursion
//!
//! p⁽⁰⁾ = p,   p⁽ⁿ⁾_t(x,y) = ∫₀^t ∫ p_s(x,z) q(z) p⁽ⁿ⁻¹⁾_{t−s}(z,y) dz ds,
//!
//! together with the non-explosion margin check ∫ p̃_t(x,y) h(y) dy ≤ h(x).
//!
//! Two grid configurations are supported: the full line in d = 1, and radial
//! grids in d = 3 where every term is replaced by its angular average
//! p̄(r,ρ) over directions. The recursion closes exactly on angular
//! averages when q is radial: averaging the composition over the outgoing
//! direction factors through the z-integral, so
//! p̄⁽ⁿ⁾(r_x,r_y) = ∫₀^∞ 4πρ² p̄_s(r_x,ρ) q(ρ) p̄⁽ⁿ⁻¹⁾(ρ,r_y) dρ.
//!
//! The time integral uses the composite midpoint rule on the time grid: the
//! s-nodes (i−½)Δt stay Δt/2 away from the near-δ endpoints s → 0 and
//! s → t, and since t − (i−½)Δt is again a midpoint, each recursion level
//! needs the previous term only at midpoint times — evaluated exactly for
//! term 0 (the kernel itself) and by linear interpolation between stored
//! grid times for deeper terms. Both the midpoint rule and the spatial cell
//! rule are first order in (Δt, Δx) at the kernel's singular scale, which
//! is what [`SpaceTimeGrid::grid_tol`] reflects.
//!
//! Term extension is sequential in n; within a term, rows of the matrix
//! depend only on the (read-only) previous term and could be computed
//! concurrently. The grids used here are small enough that a sequential
//! sweep is already instantaneous.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::kernel_ring;
use crate::kernels::Kernel;
use crate::quadrature::QuadratureConfig;
use crate::Real;

/// Maximal number of series terms (indices 0..=8) kept by [`PerturbationSeries::extend`].
pub const N_MAX: usize = 8;

/// A product grid of spatial cells and uniform positive times.
///
/// In d = 1 the nodes are signed cell centers on `[-L, L]`; in d = 3 they
/// are radii with spherical shell weights 4πr²Δr. `grid_tol` is the
/// first-order accuracy scale Δx + Δt of the discretization; consumers use
/// it to set comparison tolerances.
#[derive(Debug, Clone)]
pub struct SpaceTimeGrid<T> {
    d: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
    times: Vec<T>,
    dt: T,
    /// First-order discretization scale Δx + Δt; adjustable by the caller.
    pub grid_tol: T,
}

impl<T: Real> SpaceTimeGrid<T> {
    /// Uniform line grid on `[-half_width, half_width]` with `n` cell
    /// centers, and `m` uniform times up to `t_max`. Odd `n` places a node
    /// at the origin.
    pub fn line(half_width: T, n: usize, t_max: T, m: usize) -> Result<Self> {
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::domain("half_width must be positive and finite"));
        }
        let h = T::of(2.0) * half_width / T::of(n as f64);
        let nodes: Vec<T> = (0..n)
            .map(|i| -half_width + (T::of(i as f64) + T::of(0.5)) * h)
            .collect();
        let weights = vec![h; n];
        Self::assemble(1, nodes, weights, h, t_max, m)
    }

    /// Uniform radial grid on `[r_min, r_max]` with `n` shell centers and
    /// weights 4πr²Δr, and `m` uniform times up to `t_max`.
    pub fn radial(r_min: T, r_max: T, n: usize, t_max: T, m: usize) -> Result<Self> {
        if !(r_min >= T::zero() && r_max > r_min && r_max.is_finite()) {
            return Err(Error::domain("need 0 <= r_min < r_max < inf"));
        }
        let dr = (r_max - r_min) / T::of(n as f64);
        let four_pi = T::of(4.0 * std::f64::consts::PI);
        let nodes: Vec<T> = (0..n)
            .map(|j| r_min + (T::of(j as f64) + T::of(0.5)) * dr)
            .collect();
        let weights: Vec<T> = nodes.iter().map(|&r| four_pi * r * r * dr).collect();
        Self::assemble(3, nodes, weights, dr, t_max, m)
    }

    fn assemble(
        d: usize,
        nodes: Vec<T>,
        weights: Vec<T>,
        dx: T,
        t_max: T,
        m: usize,
    ) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::domain("need at least 2 spatial nodes"));
        }
        if m < 2 {
            return Err(Error::domain("need at least 2 time nodes"));
        }
        if !(t_max > T::zero()) || !t_max.is_finite() {
            return Err(Error::domain("t_max must be positive and finite"));
        }
        let dt = t_max / T::of(m as f64);
        let times: Vec<T> = (1..=m).map(|i| T::of(i as f64) * dt).collect();
        for w in nodes.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::domain("spatial nodes must be strictly increasing"));
            }
        }
        if weights.iter().any(|w| !(*w > T::zero()) || !w.is_finite()) {
            return Err(Error::domain("cell weights must be positive and finite"));
        }
        Ok(SpaceTimeGrid {
            d,
            nodes,
            weights,
            times,
            dt,
            grid_tol: dx + dt,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Spatial nodes: signed coordinates in d = 1, radii in d = 3.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Grid times t_1 < … < t_M (uniform, t_i = i·Δt).
    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// The kernel matrix at time `s`: p_s(|x_a − x_b|) in d = 1, the
    /// angular average p̄_s(r_a, r_b) in d = 3.
    fn kernel_matrix(&self, k: &Kernel<T>, s: T, cfg: &QuadratureConfig<T>) -> Result<Vec<T>> {
        let n = self.nodes.len();
        let mut mat = vec![T::zero(); n * n];
        match self.d {
            1 => {
                for a in 0..n {
                    for b in a..n {
                        let v = k.eval_radial(s, (self.nodes[a] - self.nodes[b]).abs())?;
                        mat[a * n + b] = v;
                        mat[b * n + a] = v;
                    }
                }
            }
            3 => {
                // p̄_s(r,ρ) = (1/2rρ) ∫_{|r−ρ|}^{r+ρ} v p_s(v) dv
                let ring = kernel_ring(k, s);
                let half = T::of(0.5);
                for a in 0..n {
                    for b in a..n {
                        let (r, rho) = (self.nodes[a], self.nodes[b]);
                        let v = half * ring.eval(r, rho, cfg) / (r * rho);
                        if !v.is_finite() {
                            return Err(Error::NonFinite { at: s.as_f64() });
                        }
                        mat[a * n + b] = v;
                        mat[b * n + a] = v;
                    }
                }
            }
            d => return Err(Error::UnsupportedDimension(d)),
        }
        Ok(mat)
    }
}

/// The discretized series: term n holds one matrix over node pairs per grid
/// time, `partial` the running sum over terms.
pub struct PerturbationSeries<T: Real> {
    kernel: Arc<Kernel<T>>,
    grid: SpaceTimeGrid<T>,
    q_values: Vec<T>,
    /// terms[n][t_index][a·N + b] = discretized p⁽ⁿ⁾_{t}(x_a, x_b).
    terms: Vec<Vec<Vec<T>>>,
    /// Running sum Σ_{k≤n} terms[k], same shape as one term.
    partial: Vec<Vec<T>>,
    /// Kernel matrices at the midpoint times (i−½)Δt, i = 1..M.
    midpoint_kernels: Vec<Vec<T>>,
    /// Set when [`extend`](Self::extend) stopped because the newest term's
    /// largest entry fell below `grid_tol`.
    truncation_index: Option<usize>,
}

impl<T: Real> PerturbationSeries<T> {
    /// Fills term 0 with kernel evaluations at the grid times and samples
    /// the weight q at the spatial nodes (signed coordinate in d = 1,
    /// radius in d = 3). q must be finite and nonnegative at every node.
    pub fn discretize(
        kernel: Arc<Kernel<T>>,
        q: impl Fn(T) -> T,
        grid: SpaceTimeGrid<T>,
        cfg: &QuadratureConfig<T>,
    ) -> Result<Self> {
        if kernel.dim() != grid.d {
            return Err(Error::domain("kernel and grid dimension mismatch"));
        }
        let mut q_values = Vec::with_capacity(grid.nodes.len());
        for (index, &x) in grid.nodes.iter().enumerate() {
            let v = q(x);
            if !v.is_finite() {
                return Err(Error::SingularNode {
                    index,
                    at: x.abs().as_f64(),
                });
            }
            if v < T::zero() {
                return Err(Error::domain(format!(
                    "q must be nonnegative; q({x}) = {v}"
                )));
            }
            q_values.push(v);
        }
        let mut term0 = Vec::with_capacity(grid.times.len());
        for &t in &grid.times {
            term0.push(grid.kernel_matrix(&kernel, t, cfg)?);
        }
        let mut midpoint_kernels = Vec::with_capacity(grid.times.len());
        for i in 1..=grid.times.len() {
            let s = (T::of(i as f64) - T::of(0.5)) * grid.dt;
            midpoint_kernels.push(grid.kernel_matrix(&kernel, s, cfg)?);
        }
        let partial = term0.clone();
        Ok(PerturbationSeries {
            kernel,
            grid,
            q_values,
            terms: vec![term0],
            partial,
            midpoint_kernels,
            truncation_index: None,
        })
    }

    pub fn grid(&self) -> &SpaceTimeGrid<T> {
        &self.grid
    }

    pub fn kernel(&self) -> &Kernel<T> {
        &self.kernel
    }

    pub fn q_values(&self) -> &[T] {
        &self.q_values
    }

    /// Number of terms currently held (term indices 0..n_terms).
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Matrices of term `n`, one per grid time.
    pub fn term(&self, n: usize) -> &[Vec<T>] {
        &self.terms[n]
    }

    /// Running partial sum Σ_{k<n_terms} p⁽ᵏ⁾, one matrix per grid time.
    pub fn partial_sum(&self) -> &[Vec<T>] {
        &self.partial
    }

    /// Index at which extension stopped early (newest term below `grid_tol`).
    pub fn truncation_index(&self) -> Option<usize> {
        self.truncation_index
    }

    /// The previous term at the midpoint time (j−½)Δt: exact for term 0,
    /// linearly interpolated between stored grid times otherwise
    /// (p⁽ⁿ⁾_0 = 0 for n ≥ 1).
    fn prev_at_midpoint(&self, j: usize) -> Vec<T> {
        let prev = self.terms.last().expect("terms nonempty");
        if self.terms.len() == 1 {
            return self.midpoint_kernels[j - 1].clone();
        }
        let half = T::of(0.5);
        let upper = &prev[j - 1];
        if j == 1 {
            return upper.iter().map(|&v| half * v).collect();
        }
        let lower = &prev[j - 2];
        lower
            .iter()
            .zip(upper.iter())
            .map(|(&lo, &up)| half * (lo + up))
            .collect()
    }

    /// Appends up to `n_additional` terms via the midpoint-in-time,
    /// cell-rule-in-space convolution quadrature. Stops early when the
    /// newest term's largest entry drops below the grid tolerance or the
    /// term index reaches [`N_MAX`].
    pub fn extend(&mut self, n_additional: usize) -> Result<()> {
        let n = self.grid.nodes.len();
        let m = self.grid.times.len();
        let qw: Vec<T> = self
            .q_values
            .iter()
            .zip(self.grid.weights.iter())
            .map(|(&q, &w)| q * w)
            .collect();
        for _ in 0..n_additional {
            if self.truncation_index.is_some() || self.terms.len() > N_MAX {
                break;
            }
            // previous term at every midpoint time, shared across targets
            let prev_mid: Vec<Vec<T>> = (1..=m).map(|j| self.prev_at_midpoint(j)).collect();
            let mut term = Vec::with_capacity(m);
            let mut max_entry = T::zero();
            for mi in 1..=m {
                let mut mat = vec![T::zero(); n * n];
                for i in 1..=mi {
                    let ks = &self.midpoint_kernels[i - 1];
                    let pv = &prev_mid[mi - i];
                    for a in 0..n {
                        for z in 0..n {
                            let f = self.grid.dt * ks[a * n + z] * qw[z];
                            if f == T::zero() {
                                continue;
                            }
                            let row = &pv[z * n..(z + 1) * n];
                            let out = &mut mat[a * n..(a + 1) * n];
                            for (o, &p) in out.iter_mut().zip(row.iter()) {
                                *o += f * p;
                            }
                        }
                    }
                }
                for &v in &mat {
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            at: self.grid.times[mi - 1].as_f64(),
                        });
                    }
                    max_entry = max_entry.max(v);
                }
                term.push(mat);
            }
            for (acc, t) in self.partial.iter_mut().zip(term.iter()) {
                for (a, &v) in acc.iter_mut().zip(t.iter()) {
                    *a += v;
                }
            }
            self.terms.push(term);
            if max_entry < self.grid.grid_tol {
                self.truncation_index = Some(self.terms.len() - 1);
            }
        }
        Ok(())
    }

    /// Writes term `n` as CSV rows `(t_index, x_index, y_index, value)`.
    pub fn write_csv<W: Write>(&self, n: usize, out: &mut W) -> Result<()> {
        if n >= self.terms.len() {
            return Err(Error::domain(format!("term {n} not computed")));
        }
        let nn = self.grid.nodes.len();
        writeln!(out, "t_index,x_index,y_index,value")?;
        for (ti, mat) in self.terms[n].iter().enumerate() {
            for a in 0..nn {
                for b in 0..nn {
                    writeln!(out, "{},{},{},{:e}", ti, a, b, mat[a * nn + b].as_f64())?;
                }
            }
        }
        Ok(())
    }
}

/// Outcome of the non-explosion check at one grid time: per-node margins
/// h(x) − Σₙ (p⁽ⁿ⁾h)(x) and how the minimum margin evolved as terms were
/// added.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NonexplosionReport {
    pub t_index: usize,
    pub n_terms: usize,
    /// min over nodes of h(x) − lhs(x).
    pub min_margin: f64,
    /// Spatial coordinate of the minimizing node.
    pub argmin_node: f64,
    pub lhs_at_argmin: f64,
    pub h_at_argmin: f64,
    /// Minimum margin after 1, 2, …, n_terms terms.
    pub margin_history: Vec<f64>,
    /// Per-term decrements of the minimum margin (all ≥ 0).
    pub decrements: Vec<f64>,
    /// True when the final decrement is no smaller than the previous one:
    /// the series is not settling and the partial sums look supercritical.
    /// Diagnostic only — nothing is proved about explosion.
    pub diverging: bool,
}

/// Evaluates ∫ p̃_t(x,y) h(y) m(dy) ≤ h(x) at the grid time `t_index`
/// using the cell rule, with p̃ the current partial sum of `series`.
pub fn nonexplosion_check<T: Real>(
    series: &PerturbationSeries<T>,
    h_values: &[T],
    t_index: usize,
) -> Result<NonexplosionReport> {
    let grid = series.grid();
    let n = grid.nodes.len();
    if h_values.len() != n {
        return Err(Error::domain("h_values length must match node count"));
    }
    if h_values.iter().any(|h| !h.is_finite()) {
        return Err(Error::domain("h must be finite at every node"));
    }
    if t_index >= grid.times.len() {
        return Err(Error::domain("t_index out of range"));
    }
    // per-term action (p⁽ᵏ⁾h)(x_a), accumulated into the margin history
    let mut lhs = vec![T::zero(); n];
    let mut margin_history = Vec::with_capacity(series.n_terms());
    for k in 0..series.n_terms() {
        let mat = &series.term(k)[t_index];
        for a in 0..n {
            let mut acc = T::zero();
            for z in 0..n {
                acc += grid.weights[z] * mat[a * n + z] * h_values[z];
            }
            lhs[a] += acc;
        }
        let min = (0..n)
            .map(|a| (h_values[a] - lhs[a]).as_f64())
            .fold(f64::INFINITY, f64::min);
        margin_history.push(min);
    }
    let decrements: Vec<f64> = margin_history
        .windows(2)
        .map(|w| w[0] - w[1])
        .collect();
    let diverging = decrements.len() >= 2
        && decrements[decrements.len() - 1] >= decrements[decrements.len() - 2];
    let (argmin, min_margin) = (0..n)
        .map(|a| (a, (h_values[a] - lhs[a]).as_f64()))
        .min_by(|x, y| x.1.partial_cmp(&y.1).expect("finite margins"))
        .expect("at least one node");
    Ok(NonexplosionReport {
        t_index,
        n_terms: series.n_terms(),
        min_margin,
        argmin_node: grid.nodes[argmin].as_f64(),
        lhs_at_argmin: lhs[argmin].as_f64(),
        h_at_argmin: h_values[argmin].as_f64(),
        margin_history,
        decrements,
        diverging,
    })
}
