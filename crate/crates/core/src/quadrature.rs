//! Adaptive Gauss–Kronrod quadrature over finite intervals, `(0,∞)` and
//! radially reduced integrals on ℝ^d.
//!
//! Improper integrals are mapped to `(0,1)` by `t = u/(1-u)` and subdivided
//! adaptively; panels never straddle user split points, so integrands that
//! kink at a known scale (e.g. `t^β p_t` at `φ(r)`) stay smooth per panel.

use crate::special::surface_area;
use crate::{Error, Real, Result};

/// 15-point Kronrod abscissae on [0, 1] side of [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// 7-point Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_67,
    0.381_830_050_505_118_95,
    0.417_959_183_673_469_4,
];

/// Tolerances and forced panel boundaries for one integration.
#[derive(Debug, Clone)]
pub struct QuadratureConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
    /// Strictly increasing positive reals; panels never straddle them.
    pub split_points: Vec<T>,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: T::of(1e-9),
            abs_tol: T::of(1e-12),
            max_subdivisions: 400,
            split_points: Vec::new(),
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn new(rel_tol: T, abs_tol: T, max_subdivisions: usize) -> Result<Self> {
        let cfg = QuadratureConfig {
            rel_tol,
            abs_tol,
            max_subdivisions,
            split_points: Vec::new(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tols(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureConfig {
            rel_tol: T::of(rel_tol),
            abs_tol: T::of(abs_tol),
            ..Default::default()
        }
    }

    pub fn with_splits(mut self, splits: &[T]) -> Self {
        let mut s: Vec<T> = splits
            .iter()
            .copied()
            .filter(|v| *v > T::zero() && v.is_finite())
            .collect();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        s.dedup();
        self.split_points = s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) {
            return Err(Error::domain("rel_tol must be > 0"));
        }
        if !(self.abs_tol >= T::zero()) {
            return Err(Error::domain("abs_tol must be >= 0"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("max_subdivisions must be >= 1"));
        }
        for w in self.split_points.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::domain("split_points must be strictly increasing"));
            }
        }
        if self.split_points.iter().any(|s| !(*s > T::zero())) {
            return Err(Error::domain("split_points must be positive"));
        }
        Ok(())
    }

    /// Derived config for inner integrals of nested quadratures.
    pub fn inner(&self, relax: f64) -> Self {
        QuadratureConfig {
            rel_tol: self.rel_tol * T::of(relax),
            abs_tol: self.abs_tol * T::of(relax),
            max_subdivisions: self.max_subdivisions,
            split_points: Vec::new(),
        }
    }
}

/// Value, error bound and bookkeeping of one integration.
#[derive(Debug, Clone, Copy)]
pub struct IntegralResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub converged: bool,
    pub evaluations: usize,
}

impl<T: Real> IntegralResult<T> {
    /// The value, or `NonConvergent` if the tolerance was not reached.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergent {
                value: self.value.as_f64(),
                error: self.error_estimate.as_f64(),
                subdivisions: self.evaluations / 15,
            })
        }
    }

    pub fn value(self) -> Result<T> {
        Ok(self.require_converged()?.value)
    }
}

/// QUADPACK-style error rescaling for one Gauss–Kronrod panel.
fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut scaled = err.abs();
    if res_asc != T::zero() && scaled != T::zero() {
        let scale = (T::of(200.0) * scaled / res_asc).powf(T::of(1.5));
        scaled = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let tiny = T::of(f64::MIN_POSITIVE / (50.0 * f64::EPSILON));
    if res_abs > tiny {
        let min_err = T::of(50.0 * f64::EPSILON) * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn qk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Result<Panel<T>> {
    let half = T::of(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);

    let mut fv = [T::zero(); 15];
    for (i, &x) in XGK.iter().enumerate() {
        let dx = T::of(x) * half_len;
        let (lo, hi) = (center - dx, center + dx);
        let flo = f(lo);
        if !flo.is_finite() {
            return Err(Error::NonFinite { at: lo.as_f64() });
        }
        fv[i] = flo;
        if i < 7 {
            let fhi = f(hi);
            if !fhi.is_finite() {
                return Err(Error::NonFinite { at: hi.as_f64() });
            }
            fv[14 - i] = fhi;
        }
    }

    let mut res_k = T::zero();
    let mut res_abs = T::zero();
    for i in 0..8 {
        let w = T::of(WGK[i]);
        let pair = if i < 7 { fv[i] + fv[14 - i] } else { fv[7] };
        let pair_abs = if i < 7 { fv[i].abs() + fv[14 - i].abs() } else { fv[7].abs() };
        res_k += w * pair;
        res_abs += w * pair_abs;
    }
    let mut res_g = T::zero();
    for j in 0..4 {
        let i = 2 * j + 1;
        let w = T::of(WG[j]);
        let pair = if i < 7 { fv[i] + fv[14 - i] } else { fv[7] };
        res_g += w * pair;
    }
    let mean = res_k * half;
    let mut res_asc = T::zero();
    for i in 0..8 {
        let w = T::of(WGK[i]);
        let dev = if i < 7 {
            (fv[i] - mean).abs() + (fv[14 - i] - mean).abs()
        } else {
            (fv[7] - mean).abs()
        };
        res_asc += w * dev;
    }

    let value = res_k * half_len;
    let err = rescale_error(
        (res_k - res_g) * half_len,
        res_abs * half_len.abs(),
        res_asc * half_len.abs(),
    );
    Ok(Panel { a, b, value, error: err })
}

fn totals<T: Real>(panels: &[Panel<T>]) -> (T, T) {
    let mut v = T::zero();
    let mut e = T::zero();
    for p in panels {
        v += p.value;
        e += p.error;
    }
    (v, e)
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate_finite<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    cfg: &QuadratureConfig<T>,
) -> Result<IntegralResult<T>> {
    cfg.validate()?;
    if a == b {
        return Ok(IntegralResult {
            value: T::zero(),
            error_estimate: T::zero(),
            converged: true,
            evaluations: 0,
        });
    }
    let mut bounds = vec![a];
    for &s in &cfg.split_points {
        if s > a && s < b {
            bounds.push(s);
        }
    }
    bounds.push(b);

    let mut evaluations = 0usize;
    let mut panels = Vec::with_capacity(cfg.max_subdivisions + bounds.len());
    for w in bounds.windows(2) {
        panels.push(qk15(&f, w[0], w[1])?);
        evaluations += 15;
    }

    let mut subdivisions = 0usize;
    loop {
        let (value, error) = totals(&panels);
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= tol {
            return Ok(IntegralResult {
                value,
                error_estimate: error,
                converged: true,
                evaluations,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Ok(IntegralResult {
                value,
                error_estimate: error,
                converged: false,
                evaluations,
            });
        }
        // bisect the worst panel
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = T::of(0.5) * (pa + pb);
        if mid <= pa || mid >= pb {
            // interval at machine resolution; accept what we have
            let (value, error) = totals(&panels);
            return Ok(IntegralResult {
                value,
                error_estimate: error,
                converged: error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()),
                evaluations,
            });
        }
        let left = qk15(&f, pa, mid)?;
        let right = qk15(&f, mid, pb)?;
        evaluations += 30;
        panels[worst] = left;
        panels.push(right);
        subdivisions += 1;
    }
}

/// Integral of `f` over `(0, ∞)` via the tail transform `t = u/(1-u)`.
pub fn integrate_improper<T: Real, F: Fn(T) -> T>(
    f: F,
    cfg: &QuadratureConfig<T>,
) -> Result<IntegralResult<T>> {
    let one = T::one();
    // map split points t -> u = t/(1+t); distinct t can collapse to the
    // same u near the boundary, so re-dedup after mapping
    let mut mapped: Vec<T> = cfg.split_points.iter().map(|&t| t / (one + t)).collect();
    mapped.dedup();
    let inner_cfg = QuadratureConfig {
        split_points: mapped,
        ..cfg.clone()
    };
    integrate_finite(
        |u: T| {
            let omu = one - u;
            let t = u / omu;
            if !t.is_finite() {
                // node rounded onto the u=1 boundary; measure-zero point
                return T::zero();
            }
            f(t) / (omu * omu)
        },
        T::zero(),
        one,
        &inner_cfg,
    )
}

/// ∫_{ℝ^d} G(|x|) dx = ω_{d−1} ∫₀^∞ g(r) r^{d−1} dr for radial integrands.
pub fn integrate_radial<T: Real, F: Fn(T) -> T>(
    g: F,
    d: usize,
    cfg: &QuadratureConfig<T>,
) -> Result<IntegralResult<T>> {
    if d < 1 {
        return Err(Error::domain("need d >= 1"));
    }
    let omega: T = surface_area(d);
    let dm1 = T::of((d - 1) as f64);
    let mut res = integrate_improper(|r: T| g(r) * r.powf(dm1), cfg)?;
    res.value *= omega;
    res.error_estimate *= omega;
    Ok(res)
}

/// d-dimensional inverse Fourier transform of a radial profile at radius `x`:
/// (2π)^{−d} ∫ e^{i⟨ξ,x⟩} F(|ξ|) dξ. Elementary sine/cosine reductions are
/// implemented for d = 1 and d = 3.
pub fn integrate_fourier_radial<T: Real, F: Fn(T) -> T>(
    f_hat: F,
    d: usize,
    x: T,
    cfg: &QuadratureConfig<T>,
) -> Result<IntegralResult<T>> {
    let pi = T::of(std::f64::consts::PI);
    let r = x.abs();
    // force panel boundaries at half-periods of the oscillation
    let mut cfg = cfg.clone();
    if r > T::zero() {
        let mut splits = cfg.split_points.clone();
        let step = pi / r;
        let mut s = step;
        for _ in 0..64 {
            splits.push(s);
            s += step;
        }
        cfg = cfg.with_splits(&splits);
    }
    match d {
        1 => {
            let mut res = integrate_improper(|rho: T| f_hat(rho) * (rho * r).cos(), &cfg)?;
            res.value = res.value / pi;
            res.error_estimate = res.error_estimate / pi;
            Ok(res)
        }
        3 => {
            let two_pi2 = T::of(2.0) * pi * pi;
            let mut res = if r == T::zero() {
                integrate_improper(|rho: T| f_hat(rho) * rho * rho, &cfg)?
            } else {
                integrate_improper(|rho: T| f_hat(rho) * rho * (rho * r).sin() / r, &cfg)?
            };
            res.value = res.value / two_pi2;
            res.error_estimate = res.error_estimate / two_pi2;
            Ok(res)
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// Two-center radial integral ∫_{ℝ^d} f(|y−x|) g(|y|) dy with |x| = `sep`,
/// for d = 1 and d = 3. The d = 3 case uses the bipolar reduction
/// (2π/R) ∫₀^∞ v g(v) ∫_{|v−R|}^{v+R} u f(u) du dv.
pub fn two_center_integral<T: Real>(
    f: &dyn Fn(T) -> T,
    g: &dyn Fn(T) -> T,
    sep: T,
    d: usize,
    cfg: &QuadratureConfig<T>,
) -> Result<IntegralResult<T>> {
    let r = sep.abs();
    match d {
        1 => {
            let cfg = cfg.clone().with_splits(
                &[cfg.split_points.clone(), vec![r]].concat(),
            );
            integrate_improper(|v: T| g(v) * (f((v - r).abs()) + f(v + r)), &cfg)
        }
        3 => {
            let pi = T::of(std::f64::consts::PI);
            if r == T::zero() {
                let mut res = integrate_improper(|v: T| v * v * f(v) * g(v), cfg)?;
                let four_pi = T::of(4.0) * pi;
                res.value *= four_pi;
                res.error_estimate *= four_pi;
                return Ok(res);
            }
            let inner_cfg = cfg.inner(10.0);
            let outer_cfg = cfg.clone().with_splits(
                &[cfg.split_points.clone(), vec![r]].concat(),
            );
            let mut res = integrate_improper(
                |v: T| {
                    let gv = g(v);
                    if gv == T::zero() {
                        return T::zero();
                    }
                    let lo = (v - r).abs();
                    let hi = v + r;
                    let inner = integrate_finite(|u: T| u * f(u), lo, hi, &inner_cfg)
                        .map(|ir| ir.value)
                        .unwrap_or(T::nan());
                    v * gv * inner
                },
                &outer_cfg,
            )?;
            let factor = T::of(2.0) * pi / r;
            res.value *= factor;
            res.error_estimate *= factor;
            Ok(res)
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}
