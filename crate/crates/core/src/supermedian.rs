//! Supermedian functions h(x) = ∫₀^∞ f(s) p_sμ(x) ds and the associated
//! Hardy weights q(x) = (1/h(x)) ∫₀^∞ f′(s) p_sμ(x) ds, for time weights
//! f(t) = t₊^β and finite atomic measures μ.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernels::{distance, Kernel};
use crate::quadrature::{integrate_improper, two_center_integral, QuadratureConfig};
use crate::special::{
    gaussian_h_prefactor, hardy_constant_laplacian, hardy_constant_stable, stable_h_prefactor,
    StableParams,
};
use crate::Real;

/// Time weight f(t) = t₊^β, β ≥ 0, with the derivative convention
/// f′(t) = β t₊^{β−1} for t > 0 and f′(t) = 0 for t ≤ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWeight<T> {
    pub beta: T,
}

impl<T: Real> TimeWeight<T> {
    pub fn new(beta: T) -> Result<Self> {
        if !(beta >= T::zero() && beta.is_finite()) {
            return Err(Error::domain(format!("need beta >= 0, got {beta}")));
        }
        Ok(TimeWeight { beta })
    }

    pub fn eval(&self, t: T) -> T {
        if t <= T::zero() {
            T::zero()
        } else if self.beta == T::zero() {
            T::one()
        } else {
            t.powf(self.beta)
        }
    }

    pub fn eval_prime(&self, t: T) -> T {
        if t <= T::zero() || self.beta == T::zero() {
            T::zero()
        } else {
            self.beta * t.powf(self.beta - T::one())
        }
    }

    /// f(a) + ∫_a^b f′(s) ds − f(b); zero for this family (f is absolutely
    /// continuous), up to quadrature error.
    pub fn absolute_continuity_residual(
        &self,
        a: T,
        b: T,
        cfg: &QuadratureConfig<T>,
    ) -> Result<T> {
        if !(T::zero() < a && a < b) {
            return Err(Error::domain("need 0 < a < b"));
        }
        let int = crate::quadrature::integrate_finite(|s| self.eval_prime(s), a, b, cfg)?
            .require_converged()?;
        Ok(self.eval(a) + int.value - self.eval(b))
    }

    /// A constant c for which [f(s) − f(s−t)]/t ≤ c f′(s) holds for all
    /// s > 0 and t > 0: max(1, 1/β). `None` for β = 0, where no finite c
    /// works (the increment at s ≤ t is 1/t while f′ ≡ 0).
    pub fn ratio_constant(&self) -> Option<T> {
        if self.beta == T::zero() {
            None
        } else {
            Some(T::one().max(T::one() / self.beta))
        }
    }

    /// Worst value of [f(s) − f(s−t)]/t − c f′(s) over a sample grid
    /// s ∈ `s_grid`, t ∈ (0, δ] (log-spaced). Nonpositive means the
    /// difference-quotient condition holds with constant `c` on the grid.
    pub fn ratio_condition_worst(&self, c: T, delta: T, s_grid: &[T]) -> T {
        let mut worst = T::neg_infinity();
        let n_t = 24usize;
        for &s in s_grid {
            if !(s > T::zero()) {
                continue;
            }
            for j in 0..n_t {
                // t = δ·10^{-3j/(n_t-1)}: three decades below δ
                let e = -3.0 * j as f64 / (n_t - 1) as f64;
                let t = delta * T::of(10f64.powf(e));
                let viol = (self.eval(s) - self.eval(s - t)) / t - c * self.eval_prime(s);
                if viol > worst {
                    worst = viol;
                }
            }
        }
        worst
    }
}

/// A finite nonnegative atomic measure μ = Σ mᵢ δ_{yᵢ}.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure<T> {
    atoms: Vec<(Vec<T>, T)>,
    d: usize,
}

impl<T: Real> AtomicMeasure<T> {
    pub fn new(atoms: Vec<(Vec<T>, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("measure needs at least one atom"));
        }
        let d = atoms[0].0.len();
        for (p, m) in &atoms {
            if p.len() != d {
                return Err(Error::domain("atoms have inconsistent dimensions"));
            }
            if !(*m > T::zero() && m.is_finite()) {
                return Err(Error::domain(format!("need positive finite mass, got {m}")));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::domain("atom coordinates must be finite"));
            }
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].0 == atoms[j].0 {
                    return Err(Error::domain("atom points must be distinct"));
                }
            }
        }
        Ok(AtomicMeasure { atoms, d })
    }

    /// The Dirac measure at the origin of ℝ^d.
    pub fn delta_origin(d: usize) -> Self {
        AtomicMeasure {
            atoms: vec![(vec![T::zero(); d], T::one())],
            d,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[(Vec<T>, T)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> T {
        self.atoms
            .iter()
            .fold(T::zero(), |acc, (_, m)| acc + *m)
    }

    /// Distances |x − yᵢ| with the atom masses.
    fn radii_from(&self, x: &[T]) -> Result<Vec<(T, T)>> {
        if x.len() != self.d {
            return Err(Error::domain("point dimension mismatch"));
        }
        Ok(self
            .atoms
            .iter()
            .map(|(y, m)| (distance(x, y), *m))
            .collect())
    }
}

/// A value of h: finite, or +∞ (legitimate divergence of the time integral).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HValue<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> HValue<T> {
    pub fn as_real(self) -> T {
        match self {
            HValue::Finite(v) => v,
            HValue::Infinite => T::infinity(),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, HValue::Finite(_))
    }
}

/// Least-squares slope of ln f(s) against ln s over log-spaced samples of
/// `(lo, hi)`. `None` when any sample is nonpositive or non-finite (then no
/// power law is identifiable; for underflowed tails the integral is benign).
fn log_log_slope<T: Real>(f: &dyn Fn(T) -> T, lo: T, hi: T) -> Option<f64> {
    const N: usize = 9;
    let (l0, l1) = (lo.as_f64().ln(), hi.as_f64().ln());
    let mut xs = [0.0f64; N];
    let mut ys = [0.0f64; N];
    for i in 0..N {
        let ls = l0 + (l1 - l0) * i as f64 / (N - 1) as f64;
        let v = f(T::of(ls.exp())).as_f64();
        if !(v > 0.0 && v.is_finite()) {
            return None;
        }
        xs[i] = ls;
        ys[i] = v.ln();
    }
    let mx = xs.iter().sum::<f64>() / N as f64;
    let my = ys.iter().sum::<f64>() / N as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..N {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    Some(num / den)
}

/// Tail exponents at/below which the time integral is declared divergent.
/// The fitted slope carries a little noise, so the thresholds sit slightly
/// off −1; the t₊^β family never produces exponents inside the gap.
const TAIL_DIVERGENCE_SLOPE: f64 = -1.02;
const ORIGIN_DIVERGENCE_SLOPE: f64 = -0.98;

/// Classifies the integrand s ↦ w(s)·p_sμ(x) as divergent (+∞) or not, by
/// fitting power laws at both ends of (0, ∞).
fn integral_diverges<T: Real>(integrand: &dyn Fn(T) -> T, scale: T) -> bool {
    if let Some(slope) = log_log_slope(integrand, scale * T::of(1e5), scale * T::of(1e9)) {
        if slope >= TAIL_DIVERGENCE_SLOPE {
            return true;
        }
    }
    if let Some(slope) = log_log_slope(integrand, scale * T::of(1e-9), scale * T::of(1e-5)) {
        if slope <= ORIGIN_DIVERGENCE_SLOPE {
            return true;
        }
    }
    false
}

/// The (0,∞) integrals run in the variable τ with s = τ⁴·scale. The
/// quartic substitution steepens slowly decaying power tails (exponent e
/// maps to 4e+3) and stretches the reachable range to s ≈ 1e64, so tails
/// like s^{−1.25} lose no representable mass.
fn substituted<T: Real>(integrand: &dyn Fn(T) -> T, scale: T, tau: T) -> T {
    let t3 = tau * tau * tau;
    let sigma = t3 * tau;
    integrand(sigma * scale) * scale * T::of(4.0) * t3
}

/// Forced τ-splits at the kernel time scale of each atom distance.
fn time_splits<T: Real>(k: &Kernel<T>, radii: &[(T, T)], scale: T) -> Vec<T> {
    let quarter = T::of(0.25);
    let mut splits: Vec<T> = radii
        .iter()
        .filter_map(|&(r, _)| k.time_scale(r))
        .map(|ts| (ts / scale).powf(quarter))
        .collect();
    splits.push(T::one());
    splits
}

/// Slowly decaying power tails (exponents just below −1) need a deeper
/// panel budget than the default; harmless for fast-decaying integrands.
fn deep_cfg<T: Real>(cfg: &QuadratureConfig<T>) -> QuadratureConfig<T> {
    let mut c = cfg.clone();
    c.max_subdivisions = c.max_subdivisions.max(2000);
    c
}

/// p_sμ(x) = Σ mᵢ p_s(x, yᵢ).
fn p_s_mu<T: Real>(k: &Kernel<T>, radii: &[(T, T)], s: T) -> T {
    let mut acc = T::zero();
    for &(r, m) in radii {
        acc += m * k.eval_radial(s, r).unwrap_or(T::nan());
    }
    acc
}

/// Characteristic time scale for the configuration: the largest kernel time
/// scale among the atom distances, clamped to [1e−6, 1e6].
fn config_scale<T: Real>(k: &Kernel<T>, radii: &[(T, T)]) -> T {
    let mut scale = T::zero();
    for &(r, _) in radii {
        if let Some(ts) = k.time_scale(r) {
            if ts.is_finite() && ts > scale {
                scale = ts;
            }
        }
    }
    scale.max(T::of(1e-6)).min(T::of(1e6))
}

/// h(x) = ∫₀^∞ f(s) p_sμ(x) ds by improper quadrature, with the time
/// variable rescaled by the kernel time scale of the atom distances and
/// forced panel splits at each of them. Divergent integrals (tail exponent
/// ≥ −1, or a non-integrable singularity when x sits on an atom) are
/// reported as `HValue::Infinite` rather than `NonConvergent`.
pub fn build_h<T: Real>(
    k: &Kernel<T>,
    w: &TimeWeight<T>,
    mu: &AtomicMeasure<T>,
    x: &[T],
    cfg: &QuadratureConfig<T>,
) -> Result<HValue<T>> {
    if mu.dim() != k.dim() {
        return Err(Error::domain("measure dimension does not match kernel"));
    }
    let radii = mu.radii_from(x)?;
    let integrand = |s: T| w.eval(s) * p_s_mu(k, &radii, s);
    let scale = config_scale(k, &radii);
    if integral_diverges(&integrand, scale) {
        return Ok(HValue::Infinite);
    }
    let cfg = deep_cfg(cfg).with_splits(&time_splits(k, &radii, scale));
    let res = integrate_improper(|tau: T| substituted(&integrand, scale, tau), &cfg)?
        .require_converged()?;
    Ok(HValue::Finite(res.value))
}

/// q(x) = (1/h(x)) ∫₀^∞ f′(s) p_sμ(x) ds, with q(x) = 0 whenever
/// h(x) ∈ {0, ∞}.
pub fn build_q<T: Real>(
    k: &Kernel<T>,
    w: &TimeWeight<T>,
    mu: &AtomicMeasure<T>,
    x: &[T],
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    let h = build_h(k, w, mu, x, cfg)?;
    let hv = match h {
        HValue::Infinite => return Ok(T::zero()),
        HValue::Finite(v) if v == T::zero() => return Ok(T::zero()),
        HValue::Finite(v) => v,
    };
    if w.beta == T::zero() {
        return Ok(T::zero());
    }
    let radii = mu.radii_from(x)?;
    let integrand = |s: T| w.eval_prime(s) * p_s_mu(k, &radii, s);
    let scale = config_scale(k, &radii);
    let cfg = deep_cfg(cfg).with_splits(&time_splits(k, &radii, scale));
    let num = integrate_improper(|tau: T| substituted(&integrand, scale, tau), &cfg)?
        .require_converged()?;
    Ok(num.value / hv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    Numeric,
    ClosedForm,
}

/// A kernel together with a time weight and measure, evaluating the pair
/// (h, q). Closed-form instances carry the power-law constants and skip
/// quadrature; numeric instances run [`build_h`]/[`build_q`] per point.
#[derive(Clone)]
pub struct SupermedianPair<T: Real> {
    pub kernel: Arc<Kernel<T>>,
    pub weight: TimeWeight<T>,
    pub mu: AtomicMeasure<T>,
    pub mode: PairMode,
    /// Human-readable origin: kernel id, β, measure.
    pub provenance: String,
    // (prefactor, exponent) of c·|x|^e; None means evaluate numerically
    h_closed: Option<(T, T)>,
    q_closed: Option<(T, T)>,
}

impl<T: Real> SupermedianPair<T> {
    /// Numeric pair for an arbitrary kernel/weight/measure triple.
    pub fn numeric(kernel: Arc<Kernel<T>>, weight: TimeWeight<T>, mu: AtomicMeasure<T>) -> Result<Self> {
        if mu.dim() != kernel.dim() {
            return Err(Error::domain("measure dimension does not match kernel"));
        }
        let provenance = format!(
            "numeric: {:?} kernel d={}, beta={}, {} atom(s)",
            kernel.kind(),
            kernel.dim(),
            weight.beta,
            mu.atoms().len()
        );
        Ok(SupermedianPair {
            kernel,
            weight,
            mu,
            mode: PairMode::Numeric,
            provenance,
            h_closed: None,
            q_closed: None,
        })
    }

    /// Closed-form stable pair, μ = δ₀:
    /// h(x) = c_h |x|^{α(β+1)−d}, q(x) = C |x|^{−α}.
    pub fn stable_closed(p: StableParams<T>, cfg: QuadratureConfig<T>) -> Result<Self> {
        p.validate()?;
        let kernel = Arc::new(Kernel::stable(p.alpha, p.d, cfg)?);
        let weight = TimeWeight::new(p.beta)?;
        let mu = AtomicMeasure::delta_origin(p.d);
        let d = T::of(p.d as f64);
        let h_exp = p.alpha * (p.beta + T::one()) - d;
        let provenance = format!(
            "closed-form stable: d={}, alpha={}, beta={}, mu=delta_0",
            p.d, p.alpha, p.beta
        );
        Ok(SupermedianPair {
            kernel,
            weight,
            mu,
            mode: PairMode::ClosedForm,
            provenance,
            h_closed: Some((stable_h_prefactor(p)?, h_exp)),
            q_closed: Some((hardy_constant_stable(p)?, -p.alpha)),
        })
    }

    /// Closed-form Gaussian pair with f(t) = t^{γ/2}, μ = δ₀:
    /// h(x) = c_h |x|^{γ+2−d}, q(x) = γ(d−2−γ)|x|^{−2}.
    pub fn gaussian_closed(d: usize, gamma_exp: T) -> Result<Self> {
        let kernel = Arc::new(Kernel::gaussian(d));
        let weight = TimeWeight::new(gamma_exp / T::of(2.0))?;
        let mu = AtomicMeasure::delta_origin(d);
        let h_exp = gamma_exp + T::of(2.0) - T::of(d as f64);
        let provenance = format!("closed-form gaussian: d={d}, gamma={gamma_exp}, mu=delta_0");
        Ok(SupermedianPair {
            kernel,
            weight,
            mu,
            mode: PairMode::ClosedForm,
            provenance,
            h_closed: Some((gaussian_h_prefactor(d, gamma_exp)?, h_exp)),
            q_closed: Some((hardy_constant_laplacian(d, gamma_exp)?, T::of(-2.0))),
        })
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn h_at(&self, x: &[T], cfg: &QuadratureConfig<T>) -> Result<HValue<T>> {
        match self.h_closed {
            Some((c, e)) => {
                let r = distance(x, &vec![T::zero(); x.len()]);
                Ok(self.h_power(c, e, r))
            }
            None => build_h(&self.kernel, &self.weight, &self.mu, x, cfg),
        }
    }

    pub fn q_at(&self, x: &[T], cfg: &QuadratureConfig<T>) -> Result<T> {
        match self.q_closed {
            Some((c, e)) => {
                let r = distance(x, &vec![T::zero(); x.len()]);
                if r == T::zero() {
                    // h(0) = ∞ for the closed-form powers, so q(0) = 0
                    Ok(T::zero())
                } else {
                    Ok(c * r.powf(e))
                }
            }
            None => build_q(&self.kernel, &self.weight, &self.mu, x, cfg),
        }
    }

    /// Radial evaluation (closed-form pairs and μ = δ₀ numeric pairs).
    pub fn h_radial(&self, r: T, cfg: &QuadratureConfig<T>) -> Result<HValue<T>> {
        let mut x = vec![T::zero(); self.dim()];
        x[0] = r;
        self.h_at(&x, cfg)
    }

    pub fn q_radial(&self, r: T, cfg: &QuadratureConfig<T>) -> Result<T> {
        let mut x = vec![T::zero(); self.dim()];
        x[0] = r;
        self.q_at(&x, cfg)
    }

    fn h_power(&self, c: T, e: T, r: T) -> HValue<T> {
        if r == T::zero() {
            if e < T::zero() {
                HValue::Infinite
            } else if e == T::zero() {
                HValue::Finite(c)
            } else {
                HValue::Finite(T::zero())
            }
        } else {
            HValue::Finite(c * r.powf(e))
        }
    }

    /// Writes rows (|x|, h, q) for the given radii.
    pub fn write_csv<W: std::io::Write>(
        &self,
        radii: &[T],
        cfg: &QuadratureConfig<T>,
        w: W,
    ) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["r", "h", "q"])?;
        for &r in radii {
            let h = self.h_radial(r, cfg)?;
            let q = self.q_radial(r, cfg)?;
            wtr.write_record([
                format!("{:.17e}", r.as_f64()),
                format!("{:.17e}", h.as_real().as_f64()),
                format!("{:.17e}", q.as_f64()),
            ])?;
        }
        wtr.flush().map_err(|e| Error::Io(e))?;
        Ok(())
    }
}

/// Result of the supermedian inequality check at one (t, x).
#[derive(Debug, Clone, Copy)]
pub struct SupermedianCheck<T> {
    /// h(x).
    pub h_x: T,
    /// p_t h(x) = ∫ p_t(x,y) h(y) dy.
    pub p_t_h: T,
    /// h(x) − p_t h(x); nonnegative (up to tolerance) for a supermedian h.
    pub margin: T,
    /// |p_t h(x) − ∫_t^∞ f(s−t) p_sμ(x) ds|, a consistency check of the
    /// time-shift identity for p_t h.
    pub identity_residual: T,
}

/// Checks p_t h ≤ h at |x| = `r` for a radial pair, and cross-validates
/// p_t h against ∫₀^∞ f(σ) p_{t+σ}μ(x) dσ.
pub fn supermedian_residual<T: Real>(
    pair: &SupermedianPair<T>,
    t: T,
    r: T,
    cfg: &QuadratureConfig<T>,
) -> Result<SupermedianCheck<T>> {
    if !(t > T::zero() && r > T::zero()) {
        return Err(Error::domain("need t > 0 and r > 0"));
    }
    let h_x = match pair.h_radial(r, cfg)? {
        HValue::Finite(v) => v,
        HValue::Infinite => return Err(Error::domain("h infinite at the requested point")),
    };
    let d = pair.dim();
    let kernel = pair.kernel.clone();
    let inner_cfg = cfg.inner(10.0);
    // closed-form pairs evaluate h instantly; numeric pairs re-integrate at
    // each quadrature node (h=∞ on the atom set maps to NaN, which the
    // adaptive rule never lands on exactly for r > 0)
    let pair_h = pair.clone();
    let h_of = move |v: T| match pair_h.h_radial(v, &inner_cfg) {
        Ok(HValue::Finite(x)) => x,
        Ok(HValue::Infinite) => T::nan(),
        Err(_) => T::nan(),
    };
    let kf = kernel.clone();
    let p_t_h = two_center_integral(
        &(|u: T| kf.eval_radial(t, u).unwrap_or(T::nan())),
        &h_of,
        r,
        d,
        cfg,
    )?
    .require_converged()?
    .value;

    // time-shift identity: p_t h(x) = ∫₀^∞ f(σ) p_{t+σ}μ(x) dσ
    let mut x = vec![T::zero(); d];
    x[0] = r;
    let radii = pair.mu.radii_from(&x)?;
    let scale = config_scale(&kernel, &radii).max(t);
    let w = pair.weight;
    let shift_integrand = |s: T| w.eval(s) * p_s_mu(&kernel, &radii, t + s);
    let shifted = integrate_improper(
        |tau: T| substituted(&shift_integrand, scale, tau),
        &deep_cfg(cfg).with_splits(&[T::one()]),
    )?
    .require_converged()?
    .value;

    Ok(SupermedianCheck {
        h_x,
        p_t_h,
        margin: h_x - p_t_h,
        identity_residual: (p_t_h - shifted).abs(),
    })
}

/// |x|^{−r} − ∫ p_t(y−x) |y|^{−r} dy for a translation-invariant kernel:
/// nonnegative when |y|^{−r} is supermedian (0 ≤ r ≤ d − α for the stable
/// kernel, 0 ≤ r ≤ d − 2 for the Gaussian).
pub fn power_supermedian_margin<T: Real>(
    k: &Kernel<T>,
    rexp: T,
    t: T,
    x: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    if !(t > T::zero() && x > T::zero() && rexp >= T::zero()) {
        return Err(Error::domain("need t > 0, |x| > 0, r >= 0"));
    }
    let smoothed = two_center_integral(
        &(|u: T| k.eval_radial(t, u).unwrap_or(T::nan())),
        &(|v: T| v.powf(-rexp)),
        x,
        k.dim(),
        cfg,
    )?
    .require_converged()?
    .value;
    Ok(x.powf(-rexp) - smoothed)
}
