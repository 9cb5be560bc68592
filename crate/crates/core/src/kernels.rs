//! Symmetric sub-Markovian transition densities on ℝ^d: the Gaussian kernel,
//! isotropic α-stable kernels by subordination, unimodal Lévy kernels by
//! Fourier inversion of e^{−tψ}, and tabulated kernels with CSV round-trip.
//!
//! The Gaussian follows the (4πt) normalization
//! g_t(x) = (4πt)^{−d/2} e^{−|x|²/(4t)}; all Fourier pairs are reconciled to
//! that convention (e^{−t|ξ|²} inverts to g with 4t in the exponent).

use std::sync::Arc;

use crate::quadrature::{
    integrate_finite, integrate_fourier_radial, integrate_improper, integrate_radial,
    two_center_integral, IntegralResult, QuadratureConfig,
};
use crate::{Error, Real, Result};

/// Gaussian transition density at radial offset `r = |x−y|`.
pub fn gaussian_eval_radial<T: Real>(t: T, r: T, d: usize) -> T {
    let pi = T::of(std::f64::consts::PI);
    let four = T::of(4.0);
    let half_d = T::of(d as f64 / 2.0);
    (four * pi * t).powf(-half_d) * (-(r * r) / (four * t)).exp()
}

/// Gaussian transition density between two points.
pub fn gaussian_eval<T: Real>(t: T, x: &[T], y: &[T], d: usize) -> T {
    gaussian_eval_radial(t, distance(x, y), d)
}

/// Closed-form α=1 stable (Cauchy) density:
/// p_t(x) = Γ((d+1)/2) π^{−(d+1)/2} t (t²+|x|²)^{−(d+1)/2}.
pub fn cauchy_eval_radial<T: Real>(t: T, r: T, d: usize) -> T {
    let pi = T::of(std::f64::consts::PI);
    let half = T::of(0.5);
    let exponent = (T::of(d as f64) + T::one()) * half;
    let c = crate::special::lgamma(exponent).expect("d >= 1").exp() * pi.powf(-exponent);
    c * t * (t * t + r * r).powf(-exponent)
}

pub(crate) fn distance<T: Real>(x: &[T], y: &[T]) -> T {
    assert_eq!(x.len(), y.len(), "dimension mismatch");
    let mut acc = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        acc += (a - b) * (a - b);
    }
    acc.sqrt()
}

/// ln of the Zolotarev integrand factor V(θ) for the standard one-sided
/// stable density of index `a` ∈ (0,1):
/// V(θ) = sin(aθ)^{a/(1−a)} sin((1−a)θ) / sin(θ)^{1/(1−a)}.
fn zolotarev_ln_v<T: Real>(a: T, theta: T) -> T {
    let one = T::one();
    let e = a / (one - a);
    e * (a * theta).sin().ln() + ((one - a) * theta).sin().ln() - (e + one) * theta.sin().ln()
}

/// Density of the standard one-sided `a`-stable law (Laplace transform
/// e^{−u^a}), by the Zolotarev integral representation. Valid for all
/// a ∈ (0,1) and x > 0.
pub fn one_sided_stable_density<T: Real>(a: T, x: T, cfg: &QuadratureConfig<T>) -> Result<T> {
    let one = T::one();
    if !(a > T::zero() && a < one) {
        return Err(Error::Unsupported(format!(
            "one-sided stable index must be in (0,1), got {a}"
        )));
    }
    if !(x > T::zero()) {
        return Ok(T::zero());
    }
    let pi = T::of(std::f64::consts::PI);
    let e = a / (one - a);
    let xpow = x.powf(-e);
    let cap = T::of(700.0);
    let integral = integrate_finite(
        |theta: T| {
            let ln_v = zolotarev_ln_v(a, theta);
            let arg = ln_v - xpow * ln_v.exp();
            if arg < -cap {
                T::zero()
            } else {
                arg.exp()
            }
        },
        T::zero(),
        pi,
        cfg,
    )?;
    let pref = e / pi * x.powf(-(e + one));
    Ok(pref * integral.value)
}

/// Density η_t(s) of the α/2-stable subordinator at time t.
///
/// α = 1 uses the explicit inverse-Gaussian-type form
/// η_t(s) = t (4π)^{−1/2} s^{−3/2} e^{−t²/(4s)}; every other α ∈ (0,2) goes
/// through the Zolotarev integral for the one-sided stable density, using the
/// scaling η_t(s) = t^{−2/α} g_{α/2}(s t^{−2/α}).
pub fn subordinator_density<T: Real>(alpha: T, t: T, s: T, cfg: &QuadratureConfig<T>) -> Result<T> {
    let two = T::of(2.0);
    if !(alpha > T::zero() && alpha < two) {
        return Err(Error::Unsupported(format!(
            "subordinator index alpha must be in (0,2), got {alpha}"
        )));
    }
    if !(t > T::zero()) {
        return Err(Error::domain("need t > 0"));
    }
    if !(s > T::zero()) {
        return Ok(T::zero());
    }
    if alpha == T::one() {
        let pi = T::of(std::f64::consts::PI);
        let four = T::of(4.0);
        return Ok(t * (four * pi).sqrt().recip() * s.powf(T::of(-1.5)) * (-(t * t) / (four * s)).exp());
    }
    let a = alpha / two;
    let scale = t.powf(-(two / alpha));
    Ok(scale * one_sided_stable_density(a, s * scale, cfg)?)
}

/// α-stable density at radial offset `r` by subordination quadrature,
/// p_t(r) = ∫₀^∞ g_s(r) η_t(s) ds, with forced splits near s ≈ r² and the
/// subordinator scale t^{2/α}.
pub fn stable_eval_radial<T: Real>(
    alpha: T,
    t: T,
    r: T,
    d: usize,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    let two = T::of(2.0);
    if !(alpha > T::zero() && alpha < two) {
        return Err(Error::Unsupported(format!("alpha must be in (0,2), got {alpha}")));
    }
    let eta_cfg = cfg.inner(10.0);
    // rescale s by the dominant time scale so the integrand peaks at O(1);
    // without this the tail transform squeezes the s ~ r² peak into an
    // unresolvable sliver near u = 1 for large r
    let t_scale = t.powf(two / alpha);
    let scale = (r * r).max(t_scale).max(T::of(1e-300));
    let splits = [r * r / scale, t_scale / scale, T::of(0.25)];
    let cfg_s = cfg.clone().with_splits(&splits);
    let res = integrate_improper(
        |sigma: T| {
            let s = sigma * scale;
            scale
                * gaussian_eval_radial(s, r, d)
                * subordinator_density(alpha, t, s, &eta_cfg).unwrap_or(T::nan())
        },
        &cfg_s,
    )?;
    Ok(res.value)
}

/// Point version of [`stable_eval_radial`].
pub fn stable_eval<T: Real>(
    alpha: T,
    t: T,
    x: &[T],
    y: &[T],
    d: usize,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    stable_eval_radial(alpha, t, distance(x, y), d, cfg)
}

/// Radial Lévy symbol ψ with a tag for reports.
#[derive(Clone)]
pub struct LevySymbol<T> {
    psi: Arc<dyn Fn(T) -> T + Send + Sync>,
    pub tag: String,
}

impl<T: Real> LevySymbol<T> {
    pub fn new(tag: impl Into<String>, psi: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        LevySymbol { psi: Arc::new(psi), tag: tag.into() }
    }

    pub fn eval(&self, r: T) -> T {
        (self.psi)(r)
    }

    /// ψ(0)=0, ψ ≥ 0 and the almost-increasing bound π²ψ(r) ≥ sup_{p≤r} ψ(p)
    /// on a sample grid.
    pub fn validate_on_grid(&self, grid: &[T]) -> Result<()> {
        if self.eval(T::zero()) != T::zero() {
            return Err(Error::domain(format!("psi(0) != 0 for `{}`", self.tag)));
        }
        let pi2 = T::of(std::f64::consts::PI * std::f64::consts::PI);
        let mut running_sup = T::zero();
        let mut pts: Vec<T> = grid.to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for &r in &pts {
            let v = self.eval(r);
            if !(v >= T::zero()) {
                return Err(Error::domain(format!("psi({r}) < 0 for `{}`", self.tag)));
            }
            running_sup = running_sup.max(v);
            if pi2 * v < running_sup {
                return Err(Error::domain(format!(
                    "psi fails the almost-increasing bound at r = {r} for `{}`",
                    self.tag
                )));
            }
        }
        Ok(())
    }
}

/// Lévy density at radial offset by Fourier inversion of e^{−tψ}.
pub fn levy_eval_radial<T: Real>(
    symbol: &LevySymbol<T>,
    t: T,
    r: T,
    d: usize,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    let res: IntegralResult<T> =
        integrate_fourier_radial(|rho: T| (-t * symbol.eval(rho)).exp(), d, r, cfg)?;
    if res.value < -cfg.abs_tol {
        return Err(Error::NegativeDensity {
            value: res.value.as_f64(),
            at: r.as_f64(),
        });
    }
    Ok(res.value)
}

/// Tabulated radial kernel on a (t, r) grid with bilinear interpolation in
/// (log t, log r). Clamped in t outside the grid; zero for r beyond the grid
/// (truncation shows up as Markov mass defect, intentionally).
#[derive(Debug, Clone)]
pub struct TabulatedKernel<T> {
    pub ts: Vec<T>,
    pub rs: Vec<T>,
    /// row-major: values[i * rs.len() + j] = p_{ts[i]}(rs[j])
    pub values: Vec<T>,
}

impl<T: Real> TabulatedKernel<T> {
    pub fn new(ts: Vec<T>, rs: Vec<T>, values: Vec<T>) -> Result<Self> {
        if ts.len() < 2 || rs.len() < 2 {
            return Err(Error::domain("tabulated kernel needs at least a 2x2 grid"));
        }
        if values.len() != ts.len() * rs.len() {
            return Err(Error::domain("tabulated kernel value count mismatch"));
        }
        for w in ts.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::domain("tabulated ts must be strictly increasing"));
            }
        }
        for w in rs.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::domain("tabulated rs must be strictly increasing"));
            }
        }
        if ts[0] <= T::zero() || rs[0] <= T::zero() {
            return Err(Error::domain("tabulated grid must be strictly positive"));
        }
        Ok(TabulatedKernel { ts, rs, values })
    }

    /// Sample a radial kernel function onto a log-spaced grid.
    pub fn sample(
        f: impl Fn(T, T) -> T,
        ts: Vec<T>,
        rs: Vec<T>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(ts.len() * rs.len());
        for &t in &ts {
            for &r in &rs {
                values.push(f(t, r));
            }
        }
        TabulatedKernel::new(ts, rs, values)
    }

    fn bracket(grid: &[T], x: T) -> (usize, T) {
        // index i and weight w for interpolation between grid[i], grid[i+1]
        // in log coordinates, clamped to the grid range
        if x <= grid[0] {
            return (0, T::zero());
        }
        if x >= grid[grid.len() - 1] {
            return (grid.len() - 2, T::one());
        }
        let mut i = 0;
        while grid[i + 1] < x {
            i += 1;
        }
        let (a, b) = (grid[i].ln(), grid[i + 1].ln());
        (i, (x.ln() - a) / (b - a))
    }

    pub fn eval(&self, t: T, r: T) -> T {
        if r > self.rs[self.rs.len() - 1] {
            return T::zero();
        }
        let (i, wt) = Self::bracket(&self.ts, t);
        let (j, wr) = Self::bracket(&self.rs, r);
        let n = self.rs.len();
        let one = T::one();
        let v00 = self.values[i * n + j];
        let v01 = self.values[i * n + j + 1];
        let v10 = self.values[(i + 1) * n + j];
        let v11 = self.values[(i + 1) * n + j + 1];
        (one - wt) * ((one - wr) * v00 + wr * v01) + wt * ((one - wr) * v10 + wr * v11)
    }

    /// CSV with header `t,r,value`, time-sorted then radius-sorted.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "r", "value"])?;
        let n = self.rs.len();
        for (i, &t) in self.ts.iter().enumerate() {
            for (j, &r) in self.rs.iter().enumerate() {
                wtr.write_record(&[
                    format!("{:?}", t.as_f64()),
                    format!("{:?}", r.as_f64()),
                    format!("{:?}", self.values[i * n + j].as_f64()),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut rows: Vec<(T, T, T)> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != 3 {
                return Err(Error::domain("tabulated CSV rows must be t,r,value"));
            }
            let parse = |s: &str| -> Result<T> {
                s.trim()
                    .parse::<f64>()
                    .map(T::of)
                    .map_err(|e| Error::domain(format!("bad number `{s}`: {e}")))
            };
            rows.push((parse(&rec[0])?, parse(&rec[1])?, parse(&rec[2])?));
        }
        let mut ts: Vec<T> = Vec::new();
        let mut rs: Vec<T> = Vec::new();
        for &(t, r, _) in &rows {
            if ts.last() != Some(&t) {
                ts.push(t);
            }
            if ts.len() == 1 {
                rs.push(r);
            }
        }
        let values: Vec<T> = rows.iter().map(|&(_, _, v)| v).collect();
        TabulatedKernel::new(ts, rs, values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind<T> {
    Gaussian,
    Stable { alpha: T },
    LevySymbol { tag: String },
    Tabulated,
}

#[derive(Clone)]
enum KernelImpl<T: Real> {
    Gaussian,
    Stable { alpha: T, cfg: QuadratureConfig<T> },
    Levy { symbol: LevySymbol<T>, cfg: QuadratureConfig<T> },
    Tabulated(TabulatedKernel<T>),
}

/// A symmetric (sub-Markovian) translation-invariant transition density on
/// ℝ^d, evaluated radially. Immutable after construction.
#[derive(Clone)]
pub struct Kernel<T: Real> {
    d: usize,
    imp: KernelImpl<T>,
}

impl<T: Real> Kernel<T> {
    pub fn gaussian(d: usize) -> Self {
        Kernel { d, imp: KernelImpl::Gaussian }
    }

    /// α-stable kernel. α = 1 evaluates through the closed Cauchy form; other
    /// α go through subordination quadrature on every call.
    pub fn stable(alpha: T, d: usize, cfg: QuadratureConfig<T>) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::of(2.0)) {
            return Err(Error::domain("stable kernel needs alpha in (0,2)"));
        }
        Ok(Kernel { d, imp: KernelImpl::Stable { alpha, cfg } })
    }

    pub fn levy(symbol: LevySymbol<T>, d: usize, cfg: QuadratureConfig<T>) -> Self {
        Kernel { d, imp: KernelImpl::Levy { symbol, cfg } }
    }

    pub fn tabulated(table: TabulatedKernel<T>, d: usize) -> Self {
        Kernel { d, imp: KernelImpl::Tabulated(table) }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> KernelKind<T> {
        match &self.imp {
            KernelImpl::Gaussian => KernelKind::Gaussian,
            KernelImpl::Stable { alpha, .. } => KernelKind::Stable { alpha: *alpha },
            KernelImpl::Levy { symbol, .. } => KernelKind::LevySymbol { tag: symbol.tag.clone() },
            KernelImpl::Tabulated(_) => KernelKind::Tabulated,
        }
    }

    pub fn is_translation_invariant(&self) -> bool {
        true
    }

    /// Whether eval_radial is a cheap closed form (Gaussian, Cauchy, table).
    pub fn has_closed_form(&self) -> bool {
        match &self.imp {
            KernelImpl::Gaussian | KernelImpl::Tabulated(_) => true,
            KernelImpl::Stable { alpha, .. } => *alpha == T::one(),
            KernelImpl::Levy { .. } => false,
        }
    }

    pub fn eval_radial(&self, t: T, r: T) -> Result<T> {
        if !(t > T::zero()) {
            return Err(Error::domain("need t > 0"));
        }
        match &self.imp {
            KernelImpl::Gaussian => Ok(gaussian_eval_radial(t, r, self.d)),
            KernelImpl::Stable { alpha, cfg } => {
                if *alpha == T::one() {
                    Ok(cauchy_eval_radial(t, r, self.d))
                } else {
                    stable_eval_radial(*alpha, t, r, self.d, cfg)
                }
            }
            KernelImpl::Levy { symbol, cfg } => levy_eval_radial(symbol, t, r, self.d, cfg),
            KernelImpl::Tabulated(tab) => Ok(tab.eval(t, r)),
        }
    }

    pub fn eval(&self, t: T, x: &[T], y: &[T]) -> Result<T> {
        self.eval_radial(t, distance(x, y))
    }

    /// The natural time scale φ(r) at which `t^β p_t(r)` kinks: r² for the
    /// Gaussian, r^α for the stable kernel. Used as a forced quadrature split.
    pub fn time_scale(&self, r: T) -> Option<T> {
        match &self.imp {
            KernelImpl::Gaussian => Some(r * r),
            KernelImpl::Stable { alpha, .. } => Some(r.powf(*alpha)),
            _ => None,
        }
    }
}

/// Chapman–Kolmogorov residual |∫ p_s(x,y) p_t(y,z) dy − p_{s+t}(x,z)| at
/// separation `sep = |x−z|`, by two-center radial quadrature (d = 1 or 3).
pub fn ck_residual<T: Real>(
    k: &Kernel<T>,
    s: T,
    t: T,
    sep: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    let d = k.dim();
    let f = |u: T| k.eval_radial(s, u).unwrap_or(T::nan());
    let g = |v: T| k.eval_radial(t, v).unwrap_or(T::nan());
    let conv = two_center_integral(&f, &g, sep, d, cfg)?;
    Ok((conv.value - k.eval_radial(s + t, sep)?).abs())
}

/// Markov defect 1 − ∫ p_t(x,y) dy; ≥ 0 (within tolerance) for
/// sub-Markovian kernels.
pub fn markov_defect<T: Real>(k: &Kernel<T>, t: T, cfg: &QuadratureConfig<T>) -> Result<T> {
    let mass = integrate_radial(|r: T| k.eval_radial(t, r).unwrap_or(T::nan()), k.dim(), cfg)?;
    Ok(T::one() - mass.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::with_tols(1e-9, 1e-12)
    }

    fn close(a: f64, b: f64, rel: f64) {
        assert!(
            (a - b).abs() <= rel * b.abs().max(1e-300),
            "got {a:e}, want {b:e}"
        );
    }

    #[test]
    fn gaussian_values() {
        close(gaussian_eval_radial(1.0, 0.0, 3), (4.0 * PI).powf(-1.5), 1e-14);
        close(
            gaussian_eval_radial(1.0, 2.0, 1),
            (4.0 * PI).powf(-0.5) * (-1.0_f64).exp(),
            1e-14,
        );
        let x = [1.0, 2.0, 2.0];
        let y = [1.0, 2.0, 0.0];
        close(
            gaussian_eval(1.0, &x, &y, 3),
            gaussian_eval_radial(1.0, 2.0, 3),
            1e-15,
        );
    }

    #[test]
    fn subordinator_alpha_one_laplace_identity() {
        // ∫ e^{-us} η_t(s) ds = e^{-t√u} at (t,u)=(1,1)
        let c = cfg();
        let lhs = integrate_improper(
            |s: f64| (-s).exp() * subordinator_density(1.0, 1.0, s, &c).unwrap(),
            &c,
        )
        .unwrap();
        close(lhs.value().unwrap(), (-1.0_f64).exp(), 1e-8);
    }

    #[test]
    fn subordinator_alpha_one_unit_mass() {
        let c = cfg();
        let mass = integrate_improper(|s: f64| subordinator_density(1.0, 1.0, s, &c).unwrap(), &c)
            .unwrap();
        close(mass.value().unwrap(), 1.0, 1e-8);
    }

    #[test]
    fn subordinator_general_alpha_laplace_identity() {
        // ∫ e^{-us} η_t(s) ds = e^{-t u^{α/2}} at α=1.5, (t,u)=(1,2)
        let c = cfg().inner(100.0);
        let eta_cfg = cfg().inner(10.0);
        let lhs = integrate_improper(
            |s: f64| (-2.0 * s).exp() * subordinator_density(1.5, 1.0, s, &eta_cfg).unwrap(),
            &c,
        )
        .unwrap();
        close(lhs.value, (-(2.0_f64.powf(0.75))).exp(), 1e-6);
    }

    #[test]
    fn one_sided_half_stable_matches_closed_form() {
        let c = cfg();
        for &x in &[0.05_f64, 0.3, 1.0, 4.0, 20.0] {
            let got = one_sided_stable_density(0.5, x, &c).unwrap();
            let want = x.powf(-1.5) * (-1.0 / (4.0 * x)).exp() / (2.0 * PI.sqrt());
            close(got, want, 1e-7);
        }
    }

    #[test]
    fn subordinator_rejects_bad_alpha() {
        let c = cfg();
        assert!(subordinator_density(2.0, 1.0, 1.0, &c).is_err());
        assert!(subordinator_density(0.0, 1.0, 1.0, &c).is_err());
    }

    #[test]
    fn stable_subordination_matches_cauchy_closed_form() {
        let c = cfg().inner(10.0);
        for &(t, r) in &[(1.0_f64, 0.0_f64), (2.0, 1.0), (0.5, 3.0), (1.0, 0.3)] {
            for d in [1usize, 3] {
                let got = stable_eval_radial(1.0, t, r, d, &c).unwrap();
                close(got, cauchy_eval_radial(t, r, d), 1e-6);
            }
        }
        close(cauchy_eval_radial(1.0, 0.0, 1), 1.0 / PI, 1e-14);
        close(cauchy_eval_radial(2.0, 1.0, 3), 2.0 / (25.0 * PI * PI), 1e-14);
    }

    #[test]
    fn stable_mass_is_one() {
        let c = cfg().inner(100.0);
        let inner = cfg().inner(10.0);
        let mass = integrate_radial(
            |r: f64| stable_eval_radial(1.2, 1.0, r, 1, &inner).unwrap(),
            1,
            &c,
        )
        .unwrap();
        close(mass.value, 1.0, 1e-5);
    }

    #[test]
    fn levy_gaussian_pair() {
        // ψ(r) = r² inverts to the (4t)-normalized Gaussian
        let sym = LevySymbol::new("quadratic", |r: f64| r * r);
        let c = cfg();
        for &(t, x) in &[(0.5_f64, 0.0_f64), (1.0, 1.0), (2.0, 0.7)] {
            let got = levy_eval_radial(&sym, t, x, 1, &c).unwrap();
            close(got, gaussian_eval_radial(t, x, 1), 1e-8);
        }
    }

    #[test]
    fn levy_cauchy_pair() {
        let sym = LevySymbol::new("linear", |r: f64| r);
        let got = levy_eval_radial(&sym, 1.0, 0.0, 1, &cfg()).unwrap();
        close(got, 1.0 / PI, 1e-8);
    }

    #[test]
    fn levy_log_symbol_positive_finite() {
        let sym = LevySymbol::new("sqrt-log", |r: f64| r * (1.0 + r).ln().sqrt());
        let got = levy_eval_radial(&sym, 1.0, 0.0, 3, &cfg().inner(100.0)).unwrap();
        assert!(got.is_finite() && got > 0.0, "got {got}");
    }

    #[test]
    fn levy_symbol_validation() {
        let grid: Vec<f64> = (1..100).map(|i| i as f64 * 0.3).collect();
        let good = LevySymbol::new("sqrt-log", |r: f64| r * (1.0 + r).ln().sqrt());
        assert!(good.validate_on_grid(&grid).is_ok());
        let shifted = LevySymbol::new("bad-origin", |r: f64| r + 1.0);
        assert!(shifted.validate_on_grid(&grid).is_err());
        let decaying = LevySymbol::new("collapsing", |r: f64| (-r).exp() * r * 100.0 / (1.0 + r.powi(4)));
        assert!(decaying.validate_on_grid(&grid).is_err());
    }

    #[test]
    fn ck_residual_gaussian() {
        let k = Kernel::gaussian(1);
        let res = ck_residual(&k, 0.4, 0.6, 1.1, &cfg()).unwrap();
        assert!(res < 1e-10, "residual {res}");
        let k3 = Kernel::gaussian(3);
        let res3 = ck_residual(&k3, 0.5, 0.5, 0.8, &cfg().inner(100.0)).unwrap();
        assert!(res3 < 1e-8, "residual {res3}");
    }

    #[test]
    fn ck_residual_cauchy() {
        let k = Kernel::stable(1.0, 1, cfg()).unwrap();
        let res = ck_residual(&k, 1.0, 1.0, 0.0, &cfg()).unwrap();
        assert!(res < 1e-6, "residual {res}");
    }

    #[test]
    fn ck_residual_detects_fault_injection() {
        // tabulated Cauchy kernel with a 1% multiplicative error
        let ts: Vec<f64> = (0..40).map(|i| 0.05 * 1.2f64.powi(i)).collect();
        let rs: Vec<f64> = (0..80).map(|i| 1e-3 * 1.25f64.powi(i)).collect();
        let tab = TabulatedKernel::sample(
            |t: f64, r: f64| 1.01 * cauchy_eval_radial(t, r, 1),
            ts,
            rs,
        )
        .unwrap();
        let k = Kernel::tabulated(tab, 1);
        let res = ck_residual(&k, 1.0, 1.0, 0.0, &cfg().inner(1000.0)).unwrap();
        assert!(res > 1e-3, "fault not detected, residual {res}");
    }

    #[test]
    fn markov_defects() {
        let g = Kernel::gaussian(3);
        let d = markov_defect(&g, 1.0, &cfg()).unwrap();
        assert!(d.abs() < 1e-9, "defect {d}");

        let s = Kernel::stable(1.0, 3, cfg()).unwrap();
        let d = markov_defect(&s, 0.7, &cfg()).unwrap();
        assert!(d.abs() < 1e-6, "defect {d}");

        // truncated table loses mass
        let ts: Vec<f64> = (0..20).map(|i| 0.1 * 1.3f64.powi(i)).collect();
        let rs: Vec<f64> = (0..20).map(|i| 0.05 * 1.3f64.powi(i)).collect();
        let tab =
            TabulatedKernel::sample(|t: f64, r: f64| cauchy_eval_radial(t, r, 1), ts, rs).unwrap();
        let k = Kernel::tabulated(tab, 1);
        let d = markov_defect(&k, 1.0, &cfg().inner(1000.0)).unwrap();
        assert!(d > 0.05, "expected mass loss, defect {d}");
    }

    #[test]
    fn unimodality_on_sampled_grid() {
        for k in [
            Kernel::gaussian(3),
            Kernel::stable(1.0, 3, cfg()).unwrap(),
            Kernel::stable(1.5, 1, cfg().inner(10.0)).unwrap(),
        ] {
            let mut prev = f64::INFINITY;
            for i in 0..30 {
                let r = 0.05 * 1.3f64.powi(i);
                let v = k.eval_radial(1.0, r).unwrap();
                assert!(v <= prev * (1.0 + 1e-9), "not nonincreasing at r={r}");
                prev = v;
            }
        }
    }

    #[test]
    fn small_time_jump_asymptotics() {
        // p_t(x)/t → 𝒜_{d,−α}|x|^{−d−α}, α-stable; α=1, d=3, |x|=1
        let nu = crate::special::levy_normalizer(3, 1.0_f64).unwrap();
        let mut prev_dev = f64::INFINITY;
        for &t in &[1e-2, 1e-3, 1e-4] {
            let ratio = cauchy_eval_radial(t, 1.0, 3) / t / nu;
            let dev = (ratio - 1.0).abs();
            assert!(dev < prev_dev);
            prev_dev = dev;
        }
        assert!(prev_dev < 0.05, "deviation {prev_dev}");

        // same through the subordination route, α=1.5, d=1, at t=1e-2
        let nu = crate::special::levy_normalizer(1, 1.5_f64).unwrap();
        let p = stable_eval_radial(1.5, 1e-2, 1.0, 1, &cfg().inner(10.0)).unwrap();
        assert!((p / 1e-2 / nu - 1.0).abs() < 0.05);
    }

    #[test]
    fn tabulated_csv_round_trip() {
        let ts: Vec<f64> = vec![0.5, 1.0, 2.0];
        let rs: Vec<f64> = vec![0.1, 1.0, 10.0];
        let tab =
            TabulatedKernel::sample(|t: f64, r: f64| gaussian_eval_radial(t, r, 1), ts, rs).unwrap();
        let mut buf = Vec::new();
        tab.write_csv(&mut buf).unwrap();
        let back = TabulatedKernel::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.ts, tab.ts);
        assert_eq!(back.rs, tab.rs);
        assert_eq!(back.values, tab.values);
        // interpolation is exact at the nodes
        close(back.eval(1.0, 1.0), gaussian_eval_radial(1.0, 1.0, 1), 1e-12);
    }
}
