//! Gamma-function machinery and the closed-form constants of the stable and
//! Gaussian Hardy identities.
//!
//! Every constant is assembled in log-space from [`lgamma`] and exponentiated
//! once; gamma ratios overflow quickly for moderate dimension otherwise.

use crate::{Error, Real, Result};

/// Lanczos coefficients, g = 7, n = 9 (Godfrey). Relative error of the
/// resulting gamma is a few ulps in f64.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lgamma_core<T: Real>(x: T) -> T {
    // valid for x >= 0.5
    let g = T::of(LANCZOS_G);
    let half = T::of(0.5);
    let z = x - T::one();
    let mut acc = T::of(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::of(c) / (z + T::of(i as f64));
    }
    let t = z + g + half;
    let sqrt_two_pi = T::of((2.0 * std::f64::consts::PI).sqrt());
    (z + half) * t.ln() - t + (sqrt_two_pi * acc).ln()
}

/// Natural log of Γ(s) for s > 0.
pub fn lgamma<T: Real>(s: T) -> Result<T> {
    if !(s > T::zero()) || !s.is_finite() {
        return Err(Error::domain(format!("lgamma requires s > 0, got {s}")));
    }
    let half = T::of(0.5);
    if s < half {
        // reflection: Γ(s)Γ(1-s) = π / sin(πs)
        let pi = T::of(std::f64::consts::PI);
        Ok((pi / (pi * s).sin()).ln() - lgamma_core(T::one() - s))
    } else {
        Ok(lgamma_core(s))
    }
}

/// Γ(s) for s > 0.
pub fn gamma<T: Real>(s: T) -> Result<T> {
    Ok(lgamma(s)?.exp())
}

/// Surface measure of the unit sphere in ℝ^d: ω_{d−1} = 2π^{d/2}/Γ(d/2).
pub fn surface_area<T: Real>(d: usize) -> T {
    let pi = T::of(std::f64::consts::PI);
    let half_d = T::of(d as f64 / 2.0);
    let ln = T::of(2.0).ln() + half_d * pi.ln() - lgamma(half_d).expect("d >= 1");
    ln.exp()
}

/// Parameters of the isotropic α-stable setting with time weight t₊^β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams<T> {
    pub d: usize,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> StableParams<T> {
    pub fn new(d: usize, alpha: T, beta: T) -> Result<Self> {
        let p = StableParams { d, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    /// 0 < α < d∧2 and 0 ≤ β ≤ d/α − 1.
    pub fn validate(&self) -> Result<()> {
        let d = T::of(self.d as f64);
        let two = T::of(2.0);
        if !(self.alpha > T::zero() && self.alpha < two && self.alpha < d) {
            return Err(Error::domain(format!(
                "need 0 < alpha < min(d, 2), got alpha = {}, d = {}",
                self.alpha, self.d
            )));
        }
        let beta_max = d / self.alpha - T::one();
        if !(self.beta >= T::zero() && self.beta <= beta_max) {
            return Err(Error::domain(format!(
                "need 0 <= beta <= d/alpha - 1 = {beta_max}, got beta = {}",
                self.beta
            )));
        }
        Ok(())
    }

    /// The maximizing exponent β = (d − α)/(2α).
    pub fn beta_optimal(d: usize, alpha: T) -> T {
        (T::of(d as f64) - alpha) / (T::of(2.0) * alpha)
    }
}

/// 𝒜_{d,−α} = 2^α Γ((d+α)/2) π^{−d/2} / |Γ(−α/2)|, the normalizer of the
/// α-stable Lévy measure ν(x,y) = 𝒜_{d,−α}|y−x|^{−d−α}.
pub fn levy_normalizer<T: Real>(d: usize, alpha: T) -> Result<T> {
    let two = T::of(2.0);
    if !(alpha > T::zero() && alpha < two) {
        return Err(Error::domain(format!("need 0 < alpha < 2, got {alpha}")));
    }
    if d == 0 {
        return Err(Error::domain("need d >= 1"));
    }
    let dd = T::of(d as f64);
    let half = T::of(0.5);
    let pi = T::of(std::f64::consts::PI);
    // |Γ(-α/2)| = Γ(1 - α/2) · 2/α by the reflection of the recurrence
    let ln_abs_gamma_neg = lgamma(T::one() - alpha * half)? + (two / alpha).ln();
    let ln = alpha * two.ln() + lgamma((dd + alpha) * half)? - dd * half * pi.ln() - ln_abs_gamma_neg;
    Ok(ln.exp())
}

/// The constant C of the stable Hardy equality:
/// C = 2^α Γ(d/2 − αβ/2) Γ(α(β+1)/2) / [Γ(d/2 − α(β+1)/2) Γ(αβ/2)].
///
/// Zero when β = 0, and zero at the boundary β = d/α − 1 where the
/// denominator gamma has a pole.
pub fn hardy_constant_stable<T: Real>(p: StableParams<T>) -> Result<T> {
    p.validate()?;
    if p.beta == T::zero() {
        return Ok(T::zero());
    }
    let d = T::of(p.d as f64);
    let half = T::of(0.5);
    let two = T::of(2.0);
    let a_num1 = d * half - p.alpha * p.beta * half;
    let a_num2 = p.alpha * (p.beta + T::one()) * half;
    let a_den1 = d * half - p.alpha * (p.beta + T::one()) * half;
    let a_den2 = p.alpha * p.beta * half;
    if a_num1 <= T::zero() || a_num2 <= T::zero() || a_den2 <= T::zero() {
        return Err(Error::domain("gamma argument at a pole in hardy_constant_stable"));
    }
    if a_den1 == T::zero() {
        // boundary beta = d/alpha - 1: 1/Γ(0) = 0
        return Ok(T::zero());
    }
    if a_den1 < T::zero() {
        return Err(Error::domain("gamma argument at a pole in hardy_constant_stable"));
    }
    let ln = p.alpha * two.ln() + lgamma(a_num1)? + lgamma(a_num2)? - lgamma(a_den1)? - lgamma(a_den2)?;
    Ok(ln.exp())
}

/// The maximal stable constant 2^α Γ((d+α)/4)² / Γ((d−α)/4)², attained at
/// β = (d − α)/(2α).
pub fn hardy_constant_stable_max<T: Real>(d: usize, alpha: T) -> Result<T> {
    let dd = T::of(d as f64);
    let two = T::of(2.0);
    let quarter = T::of(0.25);
    if !(alpha > T::zero() && alpha < two && alpha < dd) {
        return Err(Error::domain("need 0 < alpha < min(d, 2)"));
    }
    let ln = alpha * two.ln() + two * lgamma((dd + alpha) * quarter)? - two * lgamma((dd - alpha) * quarter)?;
    Ok(ln.exp())
}

/// γ(d − 2 − γ), the weight constant of the classical Hardy equality
/// with h(x) = |x|^{γ+2−d}; maximal (d−2)²/4 at γ = (d−2)/2.
pub fn hardy_constant_laplacian<T: Real>(d: usize, gamma_exp: T) -> Result<T> {
    if d < 3 {
        return Err(Error::domain("need d >= 3"));
    }
    let dm2 = T::of((d - 2) as f64);
    if !(gamma_exp >= T::zero() && gamma_exp <= dm2) {
        return Err(Error::domain(format!(
            "need 0 <= gamma <= d - 2 = {dm2}, got {gamma_exp}"
        )));
    }
    Ok(gamma_exp * (dm2 - gamma_exp))
}

/// Prefactor of the closed-form stable supermedian function:
/// h(x) = [Γ(β+1)/Γ(α(β+1)/2)] · Γ(d/2 − α(β+1)/2) / (4^{α(β+1)/2} π^{d/2})
///        · |x|^{α(β+1)−d}.
pub fn stable_h_prefactor<T: Real>(p: StableParams<T>) -> Result<T> {
    let two = T::of(2.0);
    let d = T::of(p.d as f64);
    if !(p.alpha > T::zero() && p.alpha < two) {
        return Err(Error::domain("need 0 < alpha < 2"));
    }
    if !(p.beta >= T::zero()) {
        return Err(Error::domain("need beta >= 0"));
    }
    let s = p.alpha * (p.beta + T::one()) / two; // α(β+1)/2
    if !(s < d / two) {
        return Err(Error::domain("need alpha(beta+1) < d"));
    }
    let pi = T::of(std::f64::consts::PI);
    let ln = lgamma(p.beta + T::one())? - lgamma(s)? + lgamma(d / two - s)?
        - s * T::of(4.0).ln()
        - d / two * pi.ln();
    Ok(ln.exp())
}

/// Prefactor of k(x) = ∫₀^∞ f′(s) p_sμ(x) ds for the stable kernel, μ = δ₀:
/// β Γ(β)/Γ(αβ/2) · Γ(d/2 − αβ/2) 4^{−αβ/2} π^{−d/2}, with |x|^{αβ−d}.
/// Zero when β = 0.
pub fn stable_k_prefactor<T: Real>(p: StableParams<T>) -> Result<T> {
    if p.beta == T::zero() {
        return Ok(T::zero());
    }
    let two = T::of(2.0);
    let d = T::of(p.d as f64);
    let s = p.alpha * p.beta / two;
    if !(s > T::zero() && s < d / two) {
        return Err(Error::domain("need 0 < alpha*beta < d"));
    }
    let pi = T::of(std::f64::consts::PI);
    let ln = p.beta.ln() + lgamma(p.beta)? - lgamma(s)? + lgamma(d / two - s)?
        - s * T::of(4.0).ln()
        - d / two * pi.ln();
    Ok(ln.exp())
}

/// Prefactor of the Gaussian supermedian function with f(t) = t^{γ/2}, μ = δ₀:
/// h(x) = 4^{−γ/2−1} π^{−d/2} Γ(d/2 − γ/2 − 1) |x|^{γ+2−d}.
pub fn gaussian_h_prefactor<T: Real>(d: usize, gamma_exp: T) -> Result<T> {
    let two = T::of(2.0);
    let dd = T::of(d as f64);
    let arg = dd / two - gamma_exp / two - T::one();
    if !(arg > T::zero()) {
        return Err(Error::domain("need gamma < d - 2"));
    }
    let pi = T::of(std::f64::consts::PI);
    let ln = -(gamma_exp / two + T::one()) * T::of(4.0).ln() - dd / two * pi.ln() + lgamma(arg)?;
    Ok(ln.exp())
}

/// Prefactor of ∫₀^∞ f′(s) g_sμ(x) ds for the Gaussian, f(t) = t^{γ/2}, μ = δ₀:
/// (γ/2) 4^{−γ/2} π^{−d/2} Γ(d/2 − γ/2), with |x|^{γ−d}. Zero when γ = 0.
pub fn gaussian_k_prefactor<T: Real>(d: usize, gamma_exp: T) -> Result<T> {
    if gamma_exp == T::zero() {
        return Ok(T::zero());
    }
    let two = T::of(2.0);
    let dd = T::of(d as f64);
    let arg = dd / two - gamma_exp / two;
    if !(gamma_exp > T::zero() && arg > T::zero()) {
        return Err(Error::domain("need 0 < gamma < d"));
    }
    let pi = T::of(std::f64::consts::PI);
    let ln = (gamma_exp / two).ln() - gamma_exp / two * T::of(4.0).ln() - dd / two * pi.ln()
        + lgamma(arg)?;
    Ok(ln.exp())
}

/// The closed-form constants of one stable configuration, bundled.
#[derive(Debug, Clone, Copy)]
pub struct ConstantBundle<T> {
    /// Lévy-measure normalizer 𝒜_{d,−α}.
    pub levy: T,
    /// Hardy constant C (zero when β = 0).
    pub c_hardy: T,
    /// Prefactor of the closed-form h.
    pub h_norm: T,
    /// Prefactor of ∫ f′(s) p_sμ ds.
    pub k_norm: T,
}

impl<T: Real> ConstantBundle<T> {
    pub fn stable(p: StableParams<T>) -> Result<Self> {
        Ok(ConstantBundle {
            levy: levy_normalizer(p.d, p.alpha)?,
            c_hardy: hardy_constant_stable(p)?,
            h_norm: stable_h_prefactor(p)?,
            k_norm: stable_k_prefactor(p)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, rel: f64) {
        let scale = b.abs().max(1e-300);
        assert!(
            (a - b).abs() <= rel * scale,
            "expected {b:e}, got {a:e} (rel {:e})",
            (a - b).abs() / scale
        );
    }

    #[test]
    fn lgamma_trivial_values() {
        close(lgamma(1.0_f64).unwrap(), 0.0, 1e-14);
        close(lgamma(0.5_f64).unwrap(), PI.sqrt().ln(), 1e-14);
        close(lgamma(4.0_f64).unwrap(), 6.0_f64.ln(), 1e-14);
    }

    #[test]
    fn lgamma_against_recurrence() {
        // Γ(s+1) = sΓ(s) over a log-spaced sweep
        let mut s = 1e-3_f64;
        while s < 50.0 {
            let lhs = lgamma(s + 1.0).unwrap();
            let rhs = lgamma(s).unwrap() + s.ln();
            assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0), "s = {s}");
            s *= 1.7;
        }
    }

    #[test]
    fn lgamma_rejects_nonpositive() {
        assert!(lgamma(0.0_f64).is_err());
        assert!(lgamma(-1.5_f64).is_err());
    }

    #[test]
    fn levy_normalizer_cauchy() {
        // d=1, alpha=1 is the Cauchy jump kernel |x|^{-2}/π
        close(levy_normalizer(1, 1.0_f64).unwrap(), 1.0 / PI, 1e-13);
    }

    #[test]
    fn levy_normalizer_matches_direct_gamma_expression() {
        // brute-force the defining expression with the reflection formula
        // Γ(-α/2) = π / (sin(-πα/2) Γ(1+α/2))
        for &(d, alpha) in &[(1usize, 0.5_f64), (2, 1.0), (3, 1.5), (3, 0.7), (5, 1.9)] {
            let g = |s: f64| lgamma(s).unwrap().exp();
            let abs_gamma_neg = (PI / ((-PI * alpha / 2.0).sin() * g(1.0 + alpha / 2.0))).abs();
            let direct = 2f64.powf(alpha) * g((d as f64 + alpha) / 2.0)
                * PI.powf(-(d as f64) / 2.0)
                / abs_gamma_neg;
            close(levy_normalizer(d, alpha).unwrap(), direct, 1e-12);
        }
    }

    #[test]
    fn levy_normalizer_vanishes_near_two() {
        // |Γ(-α/2)| has a pole at α=2, so the normalizer tends to 0 there;
        // this is what makes (-Δ)^{α/2} converge to the Laplacian.
        let a = levy_normalizer(3, 1.99_f64).unwrap();
        let b = levy_normalizer(3, 1.9999_f64).unwrap();
        assert!(b < a && b < 0.01 * levy_normalizer(3, 1.0_f64).unwrap());
    }

    #[test]
    fn hardy_constant_stable_values() {
        let p = StableParams::new(3, 1.0_f64, 1.0).unwrap();
        close(hardy_constant_stable(p).unwrap(), 2.0 / PI, 1e-13);

        let p0 = StableParams::new(3, 1.0_f64, 0.0).unwrap();
        assert_eq!(hardy_constant_stable(p0).unwrap(), 0.0);

        // d=2, alpha=1, beta=1/2 is the maximizing case there
        let p2 = StableParams::new(2, 1.0_f64, 0.5).unwrap();
        let g = |s: f64| lgamma(s).unwrap().exp();
        let expected = 2.0 * g(0.75).powi(2) / g(0.25).powi(2);
        close(hardy_constant_stable(p2).unwrap(), expected, 1e-13);
        close(expected, 0.228473, 3e-6);
    }

    #[test]
    fn hardy_constant_stable_max_agrees_with_general_formula() {
        for &(d, alpha) in &[(3usize, 1.0_f64), (3, 0.5), (4, 1.2), (2, 0.9)] {
            let beta = StableParams::beta_optimal(d, alpha);
            let p = StableParams::new(d, alpha, beta).unwrap();
            close(
                hardy_constant_stable(p).unwrap(),
                hardy_constant_stable_max(d, alpha).unwrap(),
                1e-12,
            );
        }
    }

    #[test]
    fn beta_scan_confirms_maximum() {
        let d = 3;
        let alpha = 1.0_f64;
        let beta_opt = StableParams::beta_optimal(d, alpha);
        let c_opt = hardy_constant_stable(StableParams::new(d, alpha, beta_opt).unwrap()).unwrap();
        let beta_max = d as f64 / alpha - 1.0;
        let n = 200;
        let mut best = (0.0, 0.0);
        for i in 1..n {
            let beta = beta_max * i as f64 / n as f64;
            let c = hardy_constant_stable(StableParams::new(d, alpha, beta).unwrap()).unwrap();
            assert!(c <= c_opt + 1e-12);
            if c > best.1 {
                best = (beta, c);
            }
        }
        assert!((best.0 - beta_opt).abs() <= beta_max / n as f64 + 1e-12);
    }

    #[test]
    fn laplacian_constant_symmetry_and_peak() {
        for d in [3usize, 4, 7] {
            let dm2 = (d - 2) as f64;
            // exact symmetry on exactly representable complementary pairs
            for i in 0..=16 {
                let g = dm2 * i as f64 / 16.0;
                let a = hardy_constant_laplacian(d, g).unwrap();
                let b = hardy_constant_laplacian(d, dm2 - g).unwrap();
                assert_eq!(a, b);
                assert!(a <= dm2 * dm2 / 4.0 + 1e-15);
            }
            close(
                hardy_constant_laplacian(d, dm2 / 2.0).unwrap(),
                dm2 * dm2 / 4.0,
                1e-15,
            );
        }
        close(hardy_constant_laplacian(4, 1.0_f64).unwrap(), 1.0, 1e-15);
        close(hardy_constant_laplacian(3, 0.5_f64).unwrap(), 0.25, 1e-15);
        assert_eq!(hardy_constant_laplacian(5, 0.0_f64).unwrap(), 0.0);
        assert!(hardy_constant_laplacian(2, 0.0_f64).is_err());
    }

    #[test]
    fn stable_h_prefactor_values() {
        // d=3, alpha=1, beta=0: Riesz kernel of order 1 in d=3 is 1/(2π²|x|²)
        let p = StableParams { d: 3, alpha: 1.0_f64, beta: 0.0 };
        close(stable_h_prefactor(p).unwrap(), 1.0 / (2.0 * PI * PI), 1e-13);

        // d=1, alpha=1/2, beta=0: Γ(1)/Γ(1/4) · Γ(1/4) 4^{-1/4} π^{-1/2}
        let p = StableParams { d: 1, alpha: 0.5_f64, beta: 0.0 };
        close(
            stable_h_prefactor(p).unwrap(),
            4f64.powf(-0.25) / PI.sqrt(),
            1e-13,
        );

        // alpha = 2 disallowed
        let p = StableParams { d: 3, alpha: 2.0_f64, beta: 0.0 };
        assert!(stable_h_prefactor(p).is_err());
    }

    #[test]
    fn q_constant_is_ratio_of_prefactors() {
        // q(x) = k(x)/h(x) = C |x|^{-α} with C = hardy_constant_stable
        for &(d, alpha, beta) in &[(3usize, 1.0_f64, 1.0), (3, 1.0, 0.5), (5, 1.5, 0.8)] {
            let p = StableParams::new(d, alpha, beta).unwrap();
            let ratio = stable_k_prefactor(p).unwrap() / stable_h_prefactor(p).unwrap();
            close(ratio, hardy_constant_stable(p).unwrap(), 1e-12);
        }
    }

    #[test]
    fn gaussian_prefactor_ratio_is_laplacian_constant() {
        // k/h must equal γ(d-2-γ) with exponent difference |x|^{-2}
        for &(d, g) in &[(3usize, 0.5_f64), (4, 1.0), (5, 2.2)] {
            let ratio = gaussian_k_prefactor(d, g).unwrap() / gaussian_h_prefactor(d, g).unwrap();
            close(ratio, hardy_constant_laplacian(d, g).unwrap(), 1e-12);
        }
    }

    #[test]
    fn alpha_to_two_continuity_of_max_constant() {
        // at β=(d-α)/(2α) the stable constant tends to the Laplacian optimum
        let d = 3usize;
        let target = hardy_constant_laplacian(d, 0.5_f64).unwrap(); // (d-2)²/4
        let mut prev_dev = f64::INFINITY;
        for &alpha in &[1.9_f64, 1.99, 1.999] {
            let c = hardy_constant_stable_max(d, alpha).unwrap();
            let dev = (c - target).abs() / target;
            assert!(dev < prev_dev, "deviation not decreasing at alpha = {alpha}");
            prev_dev = dev;
        }
        assert!(prev_dev < 2e-3);
    }

    #[test]
    fn surface_area_values() {
        close(surface_area::<f64>(1), 2.0, 1e-14);
        close(surface_area::<f64>(2), 2.0 * PI, 1e-14);
        close(surface_area::<f64>(3), 4.0 * PI, 1e-14);
    }

    #[test]
    fn f32_instantiation_smoke() {
        let v: f32 = lgamma(4.0_f32).unwrap();
        assert!((v - 6.0_f32.ln()).abs() < 1e-5);
        let c: f32 = hardy_constant_laplacian(4, 1.0_f32).unwrap();
        assert_eq!(c, 1.0);
    }
}
