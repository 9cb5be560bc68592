//! Weak-scaling toolkit: verification of weak lower/upper scaling
//! conditions (WLSC/WUSC), the generalized inverse of a nondecreasing
//! function, two-regime envelopes for the supermedian function of
//! metric-measure kernels, and the local-scaling Hardy weight
//! 1/(φ(|x|) ∨ |x|²).
//!
//! A function φ satisfies WLSC(α̲, c̲) when φ(λθ) ≥ c̲ λ^{α̲} φ(θ) for all
//! λ ≥ 1 and θ > 0, and WUSC(ᾱ, c̄) when φ(λθ) ≤ c̄ λ^{ᾱ} φ(θ). Profiles
//! carry *declared* indices which the module verifies on a sample grid;
//! the optional log-log regression estimator is a clearly-labeled
//! heuristic, never a proof.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::Real;

type RadialFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// The (λ, θ) sample grid on which scaling conditions are tested:
/// dilation factors λ ≥ 1 and base points θ log-spaced over several
/// decades.
#[derive(Debug, Clone)]
pub struct SampleGrid<T> {
    pub lambdas: Vec<T>,
    pub thetas: Vec<T>,
}

impl<T: Real> SampleGrid<T> {
    /// λ ∈ {1, 1.5, 2, 5, 10, 100}, θ log-spaced over [1e−3, 1e3]
    /// (25 points across 6 decades).
    pub fn standard() -> Self {
        let lambdas = [1.0, 1.5, 2.0, 5.0, 10.0, 100.0]
            .iter()
            .map(|&l| T::of(l))
            .collect();
        let thetas = (0..25)
            .map(|i| T::of(10f64.powf(-3.0 + 6.0 * i as f64 / 24.0)))
            .collect();
        SampleGrid { lambdas, thetas }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.iter().any(|l| !(*l >= T::one())) {
            return Err(Error::domain("lambdas must be >= 1"));
        }
        if self.thetas.iter().any(|t| !(*t > T::zero()) || !t.is_finite()) {
            return Err(Error::domain("thetas must be positive and finite"));
        }
        Ok(())
    }
}

/// Outcome of one scaling check, JSON-serializable. `worst_ratio` is the
/// smallest margin ratio over the grid (≥ 1 means the declared inequality
/// holds everywhere).
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub function_tag: String,
    pub condition: String,
    pub claimed_index: f64,
    pub claimed_constant: f64,
    pub worst_ratio: f64,
    pub worst_lambda: f64,
    pub worst_theta: f64,
    pub pass: bool,
}

const SCALING_SLACK: f64 = 1e-12;

fn scaling_check<T: Real>(
    f: &dyn Fn(T) -> T,
    tag: &str,
    condition: &str,
    index: T,
    constant: T,
    grid: &SampleGrid<T>,
    lower: bool,
) -> Result<ScalingReport> {
    grid.validate()?;
    if !(constant > T::zero()) {
        return Err(Error::domain("scaling constant must be positive"));
    }
    let mut worst = f64::INFINITY;
    let (mut wl, mut wt) = (f64::NAN, f64::NAN);
    for &lam in &grid.lambdas {
        for &th in &grid.thetas {
            let lhs = f(lam * th);
            let rhs = constant * lam.powf(index) * f(th);
            let ratio = if lower { lhs / rhs } else { rhs / lhs };
            let ratio = ratio.as_f64();
            if !ratio.is_finite() {
                return Err(Error::NonFinite {
                    at: (lam * th).as_f64(),
                });
            }
            if ratio < worst {
                worst = ratio;
                wl = lam.as_f64();
                wt = th.as_f64();
            }
        }
    }
    Ok(ScalingReport {
        function_tag: tag.to_string(),
        condition: condition.to_string(),
        claimed_index: index.as_f64(),
        claimed_constant: constant.as_f64(),
        worst_ratio: worst,
        worst_lambda: wl,
        worst_theta: wt,
        pass: worst >= 1.0 - SCALING_SLACK,
    })
}

/// Verifies f(λθ) ≥ c·λ^α·f(θ) on the grid (weak lower scaling).
pub fn check_wlsc<T: Real>(
    f: &dyn Fn(T) -> T,
    tag: &str,
    alpha_low: T,
    c_low: T,
    grid: &SampleGrid<T>,
) -> Result<ScalingReport> {
    scaling_check(f, tag, "WLSC", alpha_low, c_low, grid, true)
}

/// Verifies f(λθ) ≤ c·λ^α·f(θ) on the grid (weak upper scaling).
pub fn check_wusc<T: Real>(
    f: &dyn Fn(T) -> T,
    tag: &str,
    alpha_up: T,
    c_up: T,
    grid: &SampleGrid<T>,
) -> Result<ScalingReport> {
    scaling_check(f, tag, "WUSC", alpha_up, c_up, grid, false)
}

/// Heuristic index estimate: least-squares slope of log f against log θ
/// over the grid's θ samples. A regression, not a verification — use
/// [`check_wlsc`]/[`check_wusc`] to validate a declared index.
pub fn estimate_index<T: Real>(f: &dyn Fn(T) -> T, grid: &SampleGrid<T>) -> Result<T> {
    grid.validate()?;
    let n = T::of(grid.thetas.len() as f64);
    let (mut sx, mut sy, mut sxx, mut sxy) = (T::zero(), T::zero(), T::zero(), T::zero());
    for &th in &grid.thetas {
        let y = f(th);
        if !(y > T::zero()) || !y.is_finite() {
            return Err(Error::NonFinite { at: th.as_f64() });
        }
        let (lx, ly) = (th.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// φ⁻¹(u) = inf{s > 0 : φ(s) > u} for nondecreasing φ with φ(0) = 0 and
/// φ(s) → ∞: bracketed by geometric growth/shrink from s = 1, then
/// bisected on the predicate φ(s) > u. Flat stretches of φ at level u
/// resolve to their right endpoint, matching the strict-inequality
/// convention.
pub fn generalized_inverse<T: Real>(phi: &dyn Fn(T) -> T, u: T) -> Result<T> {
    if !(u >= T::zero()) || !u.is_finite() {
        return Err(Error::domain("need finite u >= 0"));
    }
    let two = T::of(2.0);
    // grow b until φ(b) > u
    let mut b = T::one();
    let mut grew = 0;
    while !(phi(b) > u) {
        b = b * two;
        grew += 1;
        if grew > 2000 {
            return Err(Error::BracketFailure(u.as_f64()));
        }
    }
    // shrink a until φ(a) <= u; if φ stays above u down to 0, the inf is 0
    let mut a = b / two;
    let mut shrunk = 0;
    while phi(a) > u {
        a = a / two;
        shrunk += 1;
        if shrunk > 2000 {
            return Ok(T::zero());
        }
    }
    for _ in 0..200 {
        let mid = T::of(0.5) * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if phi(mid) > u {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(b)
}

/// A scaling profile: φ and the volume function V as callables, plus the
/// *declared* scaling indices — WLSC(α̲, c̲) and WUSC(ᾱ, c̄) for φ,
/// WLSC(A̲, C̲) for V — verified on the standard grid at construction.
/// The envelope machinery additionally needs A̲ > ᾱ > 0.
#[derive(Clone)]
pub struct ScalingProfile<T> {
    pub tag: String,
    phi: RadialFn<T>,
    vol: RadialFn<T>,
    pub alpha_low: T,
    pub c_low: T,
    pub alpha_up: T,
    pub c_up: T,
    pub a_low: T,
    pub cc_low: T,
}

impl<T: Real> ScalingProfile<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tag: impl Into<String>,
        phi: RadialFn<T>,
        vol: RadialFn<T>,
        phi_lower: (T, T),
        phi_upper: (T, T),
        vol_lower: (T, T),
    ) -> Result<Self> {
        let tag = tag.into();
        let (alpha_low, c_low) = phi_lower;
        let (alpha_up, c_up) = phi_upper;
        let (a_low, cc_low) = vol_lower;
        if !(alpha_up > T::zero() && a_low > alpha_up) {
            return Err(Error::domain("need A_low > alpha_up > 0"));
        }
        if !(alpha_low > T::zero()) {
            return Err(Error::domain("need alpha_low > 0"));
        }
        let grid = SampleGrid::standard();
        for f in [&phi, &vol] {
            // sanity of the profile itself: 0 at 0⁺, positive, nondecreasing
            let mut prev = T::zero();
            for &th in &grid.thetas {
                let v = f(th);
                if !(v > T::zero()) || !v.is_finite() {
                    return Err(Error::domain(format!(
                        "{tag}: profile must be positive and finite on (0, inf)"
                    )));
                }
                if v < prev {
                    return Err(Error::domain(format!("{tag}: profile must be nondecreasing")));
                }
                prev = v;
            }
            if !(f(T::of(1e-9)) < T::of(1e-3) * f(T::one())) {
                return Err(Error::domain(format!("{tag}: profile must vanish at 0")));
            }
        }
        let checks = [
            check_wlsc(phi.as_ref(), &tag, alpha_low, c_low, &grid)?,
            check_wusc(phi.as_ref(), &tag, alpha_up, c_up, &grid)?,
            check_wlsc(vol.as_ref(), &tag, a_low, cc_low, &grid)?,
        ];
        for rep in checks {
            if !rep.pass {
                return Err(Error::domain(format!(
                    "{tag}: declared {} ({}, {}) fails at lambda={}, theta={} (ratio {:.3e})",
                    rep.condition,
                    rep.claimed_index,
                    rep.claimed_constant,
                    rep.worst_lambda,
                    rep.worst_theta,
                    rep.worst_ratio
                )));
            }
        }
        Ok(ScalingProfile {
            tag,
            phi,
            vol,
            alpha_low,
            c_low,
            alpha_up,
            c_up,
            a_low,
            cc_low,
        })
    }

    /// Pure-power profile φ = r^α, V = v0·r^d with exact scaling indices.
    pub fn pure_power(alpha: T, d: usize, v0: T) -> Result<Self> {
        let dd = T::of(d as f64);
        let phi: RadialFn<T> = Arc::new(move |r: T| r.powf(alpha));
        let vol: RadialFn<T> = Arc::new(move |r: T| v0 * r.powf(dd));
        Self::new(
            format!("power(alpha={alpha},d={d})"),
            phi,
            vol,
            (alpha, T::one()),
            (alpha, T::one()),
            (dd, T::one()),
        )
    }

    pub fn phi(&self, r: T) -> T {
        (self.phi)(r)
    }

    pub fn vol(&self, r: T) -> T {
        (self.vol)(r)
    }

    pub fn phi_fn(&self) -> &(dyn Fn(T) -> T + Send + Sync) {
        self.phi.as_ref()
    }
}

/// Two-sided envelope for the supermedian function of a kernel comparable
/// to the metric-measure estimate: lower·φ(r)^{β+1}/V(r) ≤ h ≤
/// upper·φ(r)^{β+1}/V(r) on the sampled range.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeEstimate {
    pub beta: f64,
    pub lower_const: f64,
    pub upper_const: f64,
    /// h scales like φ^{β+1}/V; for pure powers φ = r^α, V = r^d this is
    /// the exponent α(β+1) − d.
    pub growth_note: String,
    /// r-range over which the profile's declared scalings were verified.
    pub r_range: (f64, f64),
}

/// Envelope constants for h(x) = ∫₀^∞ t^β p_t(x) dt under the two-sided
/// kernel bound c_low·Ψ_t ≤ p_t ≤ c_up·Ψ_t with
/// Ψ_t(r) = 1/V(φ⁻¹(t)) ∧ t/(V(r)φ(r)).
///
/// The near regime t ≤ φ(r) integrates t^{β+1}/(V(r)φ(r)) to
/// φ^{β+1}/V · 1/(β+2) and yields the lower constant c_low/(β+2); the far
/// regime t > φ(r) is bounded through the composed lower scaling of
/// V∘φ⁻¹ (index A̲/ᾱ), adding c̄^{A̲/ᾱ}/(C̲·(A̲/ᾱ − 1 − β)) to the upper
/// constant. Requires −1 < β < A̲/ᾱ − 1 (the near-regime integral needs
/// β > −1; negative β appears when the Hardy-weight bracket recalculates
/// the envelope at β − 1).
pub fn envelope_h<T: Real>(
    profile: &ScalingProfile<T>,
    beta: T,
    kernel_consts: (T, T),
) -> Result<EnvelopeEstimate> {
    let (ck_low, ck_up) = kernel_consts;
    if !(ck_low > T::zero() && ck_up >= ck_low) {
        return Err(Error::domain("need 0 < c_low <= c_up"));
    }
    let ratio = profile.a_low / profile.alpha_up;
    if !(beta > -T::one() && beta < ratio - T::one()) {
        return Err(Error::domain(format!(
            "need -1 < beta < A_low/alpha_up - 1 = {}",
            ratio - T::one()
        )));
    }
    let two = T::of(2.0);
    let lower = ck_low / (beta + two);
    let tail = profile.c_up.powf(ratio) / (profile.cc_low * (ratio - T::one() - beta));
    let upper = ck_up * (T::one() / (beta + two) + tail);
    let grid = SampleGrid::<T>::standard();
    Ok(EnvelopeEstimate {
        beta: beta.as_f64(),
        lower_const: lower.as_f64(),
        upper_const: upper.as_f64(),
        growth_note: "h comparable to phi(r)^(beta+1)/V(r)".to_string(),
        r_range: (
            grid.thetas[0].as_f64(),
            grid.thetas[grid.thetas.len() - 1].as_f64(),
        ),
    })
}

impl EnvelopeEstimate {
    /// Lower envelope value at distance r for the given profile.
    pub fn lower<T: Real>(&self, profile: &ScalingProfile<T>, r: T) -> T {
        T::of(self.lower_const) * profile.phi(r).powf(T::of(self.beta + 1.0)) / profile.vol(r)
    }

    /// Upper envelope value at distance r for the given profile.
    pub fn upper<T: Real>(&self, profile: &ScalingProfile<T>, r: T) -> T {
        T::of(self.upper_const) * profile.phi(r).powf(T::of(self.beta + 1.0)) / profile.vol(r)
    }
}

/// Two-sided bracket [C₁, C₂]/φ(r) for the Hardy weight q at distance
/// r = ρ(x,y) from the center: q = β·k/h with k the (β−1)-envelope and h
/// the β-envelope, so C₁ = β·lower_{β−1}/upper_β and
/// C₂ = β·upper_{β−1}/lower_β. At r = 0 (φ = 0) both endpoints are +∞.
pub fn hardy_weight_metric<T: Real>(
    profile: &ScalingProfile<T>,
    beta: T,
    r: T,
    kernel_consts: (T, T),
) -> Result<(T, T)> {
    if !(beta > T::zero()) {
        return Err(Error::domain("need beta > 0"));
    }
    let env_h = envelope_h(profile, beta, kernel_consts)?;
    let env_k = envelope_h(profile, beta - T::one(), kernel_consts)?;
    let c1 = beta * T::of(env_k.lower_const / env_h.upper_const);
    let c2 = beta * T::of(env_k.upper_const / env_h.lower_const);
    let ph = profile.phi(r);
    if !(ph > T::zero()) {
        return Ok((T::infinity(), T::infinity()));
    }
    Ok((c1 / ph, c2 / ph))
}

/// The local-scaling Hardy weight 1/(φ(|x|) ∨ |x|²).
pub fn local_scaling_weight<T: Real>(phi: &dyn Fn(T) -> T, x: T) -> T {
    let r = x.abs();
    T::one() / phi(r).max(r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{stable_h_prefactor, StableParams};

    fn assert_rel(got: f64, want: f64, tol: f64) {
        let denom = want.abs().max(1e-300);
        assert!(
            ((got - want) / denom).abs() < tol,
            "got {got}, want {want} (rel err {:.3e})",
            ((got - want) / denom).abs()
        );
    }

    #[test]
    fn wlsc_pure_power_exact() {
        let g = SampleGrid::<f64>::standard();
        let rep = check_wlsc(&|r: f64| r.powf(1.3), "r^1.3", 1.3, 1.0, &g).unwrap();
        assert!(rep.pass);
        assert_rel(rep.worst_ratio, 1.0, 1e-10);
    }

    #[test]
    fn wlsc_log_factor_passes_at_index_one() {
        // r√log(1+r) grows faster than linearly: the log factor increases
        let g = SampleGrid::<f64>::standard();
        let f = |r: f64| r * (1.0 + r).ln().sqrt();
        let rep = check_wlsc(&f, "r*sqrt(log(1+r))", 1.0, 1.0, &g).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn wlsc_overdeclared_index_fails() {
        let g = SampleGrid::<f64>::standard();
        let rep = check_wlsc(&|r: f64| r * r, "r^2", 3.0, 1.0, &g).unwrap();
        assert!(!rep.pass);
        assert!(rep.worst_ratio < 1.0);
    }

    #[test]
    fn wusc_pure_power_and_log_factor() {
        let g = SampleGrid::<f64>::standard();
        let rep = check_wusc(&|r: f64| r.powf(0.7), "r^0.7", 0.7, 1.0, &g).unwrap();
        assert!(rep.pass);
        let f = |r: f64| r * (1.0 + r).ln().sqrt();
        let rep = check_wusc(&f, "r*sqrt(log(1+r))", 1.1, 10.0, &g).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn estimate_index_recovers_power() {
        let g = SampleGrid::<f64>::standard();
        let got = estimate_index(&|r: f64| 3.0 * r.powf(1.7), &g).unwrap();
        assert_rel(got, 1.7, 1e-10);
    }

    #[test]
    fn generalized_inverse_strict_monotone() {
        let got = generalized_inverse(&|r: f64| r * r, 4.0).unwrap();
        assert_rel(got, 2.0, 1e-12);
        let at_zero = generalized_inverse(&|r: f64| r * r, 0.0).unwrap();
        assert!(at_zero >= 0.0 && at_zero < 1e-12, "phi_inv(0) = {at_zero:e}");
    }

    fn flat_phi(r: f64) -> f64 {
        // strictly increasing to 5 at r=1, flat at 5 on [1,2], increasing after
        if r <= 1.0 {
            5.0 * r
        } else if r <= 2.0 {
            5.0
        } else {
            5.0 + (r - 2.0)
        }
    }

    #[test]
    fn generalized_inverse_flat_takes_right_endpoint() {
        let got = generalized_inverse(&flat_phi, 5.0).unwrap();
        assert_rel(got, 2.0, 1e-12);
    }

    #[test]
    fn generalized_inverse_bracket_failure_on_bounded_phi() {
        let err = generalized_inverse(&|r: f64| r / (1.0 + r), 2.0);
        assert!(matches!(err, Err(Error::BracketFailure(_))));
    }

    #[test]
    fn inverse_biconditional_sampled() {
        // t >= phi(r) if and only if phi_inv(t) >= r
        let phis: [&dyn Fn(f64) -> f64; 2] = [&|r: f64| r.powf(1.4), &flat_phi];
        for phi in phis {
            for i in 0..12 {
                for j in 0..12 {
                    let t = 10f64.powf(-2.0 + 4.0 * i as f64 / 11.0);
                    let r = 10f64.powf(-2.0 + 4.0 * j as f64 / 11.0);
                    // skip knife-edge samples where t == phi(r) to rounding
                    if (t - phi(r)).abs() < 1e-9 * t {
                        continue;
                    }
                    let inv = generalized_inverse(phi, t).unwrap();
                    assert_eq!(
                        t >= phi(r),
                        inv >= r * (1.0 - 1e-12),
                        "t={t}, r={r}, phi(r)={}, inv={inv}",
                        phi(r)
                    );
                }
            }
        }
    }

    #[test]
    fn wusc_implies_wlsc_of_inverse() {
        // declared WUSC(ᾱ, c̄) for φ gives WLSC(1/ᾱ, c̄^{−1/ᾱ}) for φ⁻¹
        let g = SampleGrid::<f64>::standard();
        let phi = |r: f64| r * (1.0 + r).ln().sqrt();
        let (au, cu) = (1.6, 1.1);
        assert!(check_wusc(&phi, "phi", au, cu, &g).unwrap().pass);
        let inv = |u: f64| generalized_inverse(&phi, u).unwrap();
        let rep = check_wlsc(&inv, "phi_inv", 1.0 / au, cu.powf(-1.0 / au), &g).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn profile_rejects_non_monotone() {
        let phi: RadialFn<f64> = Arc::new(|r: f64| r * (1.0 + 0.9 * (3.0 * r).sin()));
        let vol: RadialFn<f64> = Arc::new(|r: f64| r * r * r);
        let err = ScalingProfile::new("wobble", phi, vol, (0.5, 0.1), (1.5, 10.0), (3.0, 1.0));
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn profile_rejects_false_declaration() {
        let phi: RadialFn<f64> = Arc::new(|r: f64| r * r);
        let vol: RadialFn<f64> = Arc::new(|r: f64| r * r * r);
        let err = ScalingProfile::new("r^2", phi, vol, (3.0, 1.0), (3.5, 1.0), (3.0, 1.0));
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    /// Cauchy kernel comparability constants against
    /// Ψ_t(r) = 1/V(φ⁻¹(t)) ∧ t/(V(r)φ(r)) with φ = r, V = (4π/3)r³,
    /// measured on a (t, r) grid.
    fn cauchy_consts() -> (f64, f64) {
        let vol = |r: f64| 4.0 * std::f64::consts::PI / 3.0 * r * r * r;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..21 {
            for j in 0..21 {
                let t = 10f64.powf(-2.0 + 4.0 * i as f64 / 20.0);
                let r = 10f64.powf(-2.0 + 4.0 * j as f64 / 20.0);
                let p = t / (std::f64::consts::PI.powi(2) * (t * t + r * r).powi(2));
                let psi = (1.0 / vol(t)).min(t / (vol(r) * r));
                let ratio = p / psi;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
        (lo, hi)
    }

    #[test]
    fn envelope_sandwiches_exact_stable_h() {
        // d=3, α=1, β=1: exact h = pref·r^{−1} must sit inside the
        // two-regime envelope at every sampled r over 4 decades
        let profile =
            ScalingProfile::pure_power(1.0, 3, 4.0 * std::f64::consts::PI / 3.0).unwrap();
        let consts = cauchy_consts();
        let env = envelope_h(&profile, 1.0, consts).unwrap();
        assert!(env.lower_const <= env.upper_const);
        let pref = stable_h_prefactor(StableParams::new(3, 1.0, 1.0).unwrap()).unwrap();
        for i in 0..17 {
            let r = 10f64.powf(-2.0 + 4.0 * i as f64 / 16.0);
            let exact = pref / r;
            let lo = env.lower(&profile, r);
            let hi = env.upper(&profile, r);
            assert!(
                lo <= exact && exact <= hi,
                "r={r}: {lo:.4e} <= {exact:.4e} <= {hi:.4e} violated"
            );
        }
    }

    #[test]
    fn envelope_blows_up_at_beta_limit() {
        // A_low/alpha_up − 1 = 2 here: the far-regime constant diverges
        let profile = ScalingProfile::pure_power(1.0, 3, 1.0).unwrap();
        let near = envelope_h(&profile, 1.999, (1.0, 1.0)).unwrap();
        let far = envelope_h(&profile, 1.9, (1.0, 1.0)).unwrap();
        assert!(near.upper_const > 50.0 * far.upper_const / 10.0);
        assert!(envelope_h(&profile, 2.0, (1.0, 1.0)).is_err());
        // β = 0 is allowed whenever A_low/alpha_up > 1
        let b0 = envelope_h(&profile, 0.0, (1.0, 1.0)).unwrap();
        assert!(b0.upper_const.is_finite() && b0.lower_const > 0.0);
    }

    #[test]
    fn hardy_weight_bracket_contains_stable_constant() {
        // exact q = (2/π)/r for d=3, α=1, β=1
        let profile =
            ScalingProfile::pure_power(1.0, 3, 4.0 * std::f64::consts::PI / 3.0).unwrap();
        let consts = cauchy_consts();
        let r = 0.7;
        let (c1, c2) = hardy_weight_metric(&profile, 1.0, r, consts).unwrap();
        let exact = (2.0 / std::f64::consts::PI) / r;
        assert!(
            c1 <= exact && exact <= c2,
            "bracket [{c1:.4e}, {c2:.4e}] misses {exact:.4e}"
        );
        assert!(c1 > 0.0 && c2.is_finite());
    }

    #[test]
    fn hardy_weight_infinite_at_center() {
        let profile = ScalingProfile::pure_power(1.0, 3, 1.0).unwrap();
        let (c1, c2): (f64, f64) =
            hardy_weight_metric(&profile, 1.0, 0.0, (1.0, 1.0)).unwrap();
        assert!(c1.is_infinite() && c2.is_infinite());
    }

    #[test]
    fn hardy_weight_psi_profile_finite() {
        // φ = 1/ψ(1/r) for ψ(r) = r√log(1+r): positive finite bracket at r=1
        let phi: RadialFn<f64> = Arc::new(|r: f64| {
            let s = 1.0 / r;
            1.0 / (s * (1.0 + s).ln().sqrt())
        });
        let vol: RadialFn<f64> = Arc::new(|r: f64| r * r * r);
        let profile = ScalingProfile::new(
            "1/psi(1/r)",
            phi,
            vol,
            (1.0, 0.05),
            (1.6, 2.0),
            (3.0, 1.0),
        )
        .unwrap();
        // A_low/alpha_up − 1 = 0.875 caps beta strictly below 1 here
        let (c1, c2) = hardy_weight_metric(&profile, 0.5, 1.0, (1.0, 1.0)).unwrap();
        assert!(c1 > 0.0 && c2 > c1 && c2.is_finite(), "[{c1}, {c2}]");
    }

    #[test]
    fn local_weight_matches_stable_exponent_inside_unit_ball() {
        let phi = |r: f64| r.powf(1.5);
        for &x in &[0.05, 0.3, 0.9] {
            // φ(r) = r^1.5 ≥ r² inside the unit ball (α < 2)
            assert_rel(local_scaling_weight(&phi, x), x.powf(-1.5), 1e-12);
        }
        // far field: |x|² dominates when φ(10) < 100
        let phi10 = phi(10.0);
        assert!(phi10 < 100.0);
        assert_rel(local_scaling_weight(&phi, 10.0), 1.0 / 100.0, 1e-12);
        // continuity at the crossover φ(r*) = r*²: r* = 1 here
        let below = local_scaling_weight(&phi, 1.0 - 1e-9);
        let above = local_scaling_weight(&phi, 1.0 + 1e-9);
        assert_rel(below, above, 1e-6);
    }

    #[test]
    fn report_serializes() {
        let g = SampleGrid::<f64>::standard();
        let rep = check_wlsc(&|r: f64| r, "id", 1.0, 1.0, &g).unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"function_tag\":\"id\""));
        assert!(json.contains("\"pass\":true"));
    }
}
