//! Samplers and densities for the limit laws of the normalized estimation
//! errors.
//!
//! The occupation time `Λ` of `ℝ⁺` by an OBM on `[0, 1]` follows the
//! modified arcsine law
//!
//! ```text
//! p_Λ(u) = (1/π) (u(1−u))^{-1/2} · r / (1 − (1 − r²) u),   r = σ₊/σ₋
//! ```
//!
//! and is sampled by inversion, `Λ = σ₋²V / (σ₋²V + σ₊²(1−V))` with
//! `V = sin²(Uπ/2)`. The SBM local time and the occupation time factor as
//! `L₁(X) = 2Z / √((1+θ)²/Λ + (1−θ)²/(1−Λ))`, with `Z` standard Rayleigh
//! independent of `Λ`. Every limit pair below is driven by one shared
//! `(Λ, ξ)` couple, where `ξ ~ Exp(1)` and `Z = √(2ξ)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::process::{check_theta, ObmParams};
use crate::rng::RngStream;

/// An occupation draw together with its complement, both computed without
/// cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupation {
    pub lambda: f64,
    pub complement: f64,
}

/// Maps a uniform `u ∈ [0, 1)` to the occupation law of `params`.
pub fn occupation_from_uniform(u: f64, params: &ObmParams) -> Occupation {
    let (s, c) = (0.5 * PI * u).sin_cos();
    let a = params.sigma_minus().powi(2) * s * s;
    let b = params.sigma_plus().powi(2) * c * c;
    let total = a + b;
    let open = |v: f64| v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
    Occupation {
        lambda: open(a / total),
        complement: open(b / total),
    }
}

pub fn sample_occupation_pair(params: &ObmParams, rng: &mut RngStream) -> Occupation {
    occupation_from_uniform(rng.uniform_open(), params)
}

/// One draw of `Λ`, strictly inside `(0, 1)`.
pub fn sample_occupation(params: &ObmParams, rng: &mut RngStream) -> f64 {
    sample_occupation_pair(params, rng).lambda
}

/// Density of the occupation law at `u ∈ (0, 1)`.
pub fn occupation_density(u: f64, params: &ObmParams) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("occupation density needs 0 < u < 1, got {u}")));
    }
    let r = params.ratio();
    Ok(r / (PI * (u * (1.0 - u)).sqrt() * (1.0 - (1.0 - r * r) * u)))
}

fn skew_local_time(theta: f64, occ: Occupation, rayleigh: f64) -> f64 {
    let a = (1.0 + theta).powi(2) / occ.lambda;
    let b = (1.0 - theta).powi(2) / occ.complement;
    2.0 * rayleigh / (a + b).sqrt()
}

/// `L₁(X)` for the SBM of skewness `theta` started at 0.
pub fn sample_local_time_sbm(theta: f64, rng: &mut RngStream) -> Result<f64> {
    check_theta(theta)?;
    let params = ObmParams::from_theta(theta)?;
    let occ = sample_occupation_pair(&params, rng);
    Ok(skew_local_time(theta, occ, rng.rayleigh()))
}

/// `L₁(Y) = (2σ₊σ₋/(σ₊+σ₋)) L₁(X)` for the OBM started at 0.
pub fn sample_local_time_obm(params: &ObmParams, rng: &mut RngStream) -> f64 {
    sample_occupation_local_time(params, rng).1
}

/// Joint draw of `(Λ, L₁(Y))`.
pub fn sample_occupation_local_time(params: &ObmParams, rng: &mut RngStream) -> (Occupation, f64) {
    let occ = sample_occupation_pair(params, rng);
    let lx = skew_local_time(params.theta(), occ, rng.rayleigh());
    (occ, params.local_time_factor() * lx)
}

/// All the randomness behind one draw of the limit pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSample {
    /// Unbiased pair `√2σ±² 𝒩ᵢ / √Λ±`.
    pub m_plus: f64,
    pub m_minus: f64,
    /// Biased pair (unbiased pair minus the local-time shift).
    pub s_plus: f64,
    pub s_minus: f64,
    pub lambda_occ: f64,
    pub xi: f64,
    pub n1: f64,
    pub n2: f64,
}

impl LimitSample {
    /// Assembles the pairs from primitive draws; `u` feeds the occupation
    /// inversion and `xi` is the Exp(1) draw.
    pub fn from_draws(params: &ObmParams, u: f64, xi: f64, n1: f64, n2: f64) -> Self {
        let occ = occupation_from_uniform(u, params);
        let (lam, lam_c) = (occ.lambda, occ.complement);
        let r = params.ratio();
        let sp2 = params.sigma_plus().powi(2);
        let sm2 = params.sigma_minus().powi(2);
        let scale_plus = 2f64.sqrt() * sp2 / lam.sqrt();
        let scale_minus = 2f64.sqrt() * sm2 / lam_c.sqrt();
        let z = (2.0 * xi).sqrt();
        let c = 4.0 / (3.0 * PI.sqrt());
        let shift_plus = c / (r + 1.0) * z * lam_c.sqrt() / (lam_c + lam * r * r).sqrt();
        let shift_minus = c / (1.0 / r + 1.0) * z * lam.sqrt() / (lam + lam_c / (r * r)).sqrt();
        LimitSample {
            m_plus: scale_plus * n1,
            m_minus: scale_minus * n2,
            s_plus: scale_plus * (n1 - shift_plus),
            s_minus: scale_minus * (n2 - shift_minus),
            lambda_occ: lam,
            xi,
            n1,
            n2,
        }
    }

    /// Rayleigh variable driving the local time, `√(2ξ)`.
    pub fn rayleigh(&self) -> f64 {
        (2.0 * self.xi).sqrt()
    }
}

/// Draw order is fixed: occupation uniform, `ξ`, `𝒩₁`, `𝒩₂`.
pub fn sample_limit(params: &ObmParams, rng: &mut RngStream) -> LimitSample {
    let u = rng.uniform_open();
    let xi = rng.exponential();
    let n1 = rng.normal();
    let n2 = rng.normal();
    LimitSample::from_draws(params, u, xi, n1, n2)
}

/// Limit of `√n(m±² − σ±²)`.
pub fn sample_limit_unbiased(params: &ObmParams, rng: &mut RngStream) -> (f64, f64) {
    let s = sample_limit(params, rng);
    (s.m_plus, s.m_minus)
}

/// Limit of `√n(σ̂±² − σ±²)`.
pub fn sample_limit_biased(params: &ObmParams, rng: &mut RngStream) -> (f64, f64) {
    let s = sample_limit(params, rng);
    (s.s_plus, s.s_minus)
}

/// Limit of `√n(q̂ − q)` for the oscillating random walk with move
/// probabilities `q` above and `p` below 0: `𝒩 √(q(1−q)/Λ)` with `Λ` the
/// occupation law for `σ₊² = q`, `σ₋² = p`.
pub fn sample_orw_limit(q: f64, p: f64, rng: &mut RngStream) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) || !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("orw limit needs p, q in (0, 1], got p={p}, q={q}")));
    }
    let params = ObmParams::new(q.sqrt(), p.sqrt())?;
    let lam = sample_occupation(&params, rng);
    let g = rng.normal();
    Ok(g * (q * (1.0 - q) / lam).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn paper_params() -> ObmParams {
        ObmParams::new(2.0, 0.5).unwrap()
    }

    #[test]
    fn density_values() {
        let bm = ObmParams::new(1.0, 1.0).unwrap();
        assert_relative_eq!(occupation_density(0.5, &bm).unwrap(), 2.0 / PI, epsilon = 1e-14);
        assert!(occupation_density(0.0, &bm).is_err());
        assert!(occupation_density(1.0, &bm).is_err());
        assert!(occupation_density(f64::NAN, &bm).is_err());
    }

    #[test]
    fn density_swaps_under_reflection() {
        let p = paper_params();
        let q = ObmParams::new(0.5, 2.0).unwrap();
        for &u in &[0.01, 0.2, 0.5, 0.77, 0.999] {
            // density of 1 − Λ under p is the density of Λ under swapped sigmas
            assert_relative_eq!(
                occupation_density(1.0 - u, &p).unwrap(),
                occupation_density(u, &q).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn uniform_half_plumbing() {
        let p = paper_params();
        let occ = occupation_from_uniform(0.5, &p);
        assert_relative_eq!(occ.lambda, 0.25 / 4.25, epsilon = 1e-15);
        assert_relative_eq!(occ.lambda + occ.complement, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_occupation_mean() {
        let bm = ObmParams::new(1.0, 1.0).unwrap();
        let mut rng = RngStream::new(1, 0);
        let n = 100_000;
        let m = (0..n).map(|_| sample_occupation(&bm, &mut rng)).sum::<f64>() / n as f64;
        assert!((m - 0.5).abs() < 0.005, "{m}");
    }

    #[test]
    fn local_time_scale_factor() {
        assert_relative_eq!(paper_params().local_time_factor(), 0.8);
        let a = ObmParams::new(0.3, 1.7).unwrap().local_time_factor();
        let b = ObmParams::new(1.7, 0.3).unwrap().local_time_factor();
        assert_eq!(a, b);
    }

    #[test]
    fn local_time_zero_rayleigh() {
        let occ = occupation_from_uniform(0.3, &paper_params());
        assert_eq!(skew_local_time(-0.6, occ, 0.0), 0.0);
    }

    #[test]
    fn unit_sigmas_obm_equals_sbm() {
        let bm = ObmParams::new(1.0, 1.0).unwrap();
        for i in 0..100 {
            let a = sample_local_time_obm(&bm, &mut RngStream::new(5, i));
            let b = sample_local_time_sbm(0.0, &mut RngStream::new(5, i)).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-15);
        }
    }

    #[test]
    fn sbm_local_time_rejects_bad_theta() {
        assert!(sample_local_time_sbm(1.0, &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn biased_reduces_to_unbiased_at_zero_xi() {
        let s = LimitSample::from_draws(&paper_params(), 0.4, 0.0, 0.3, -1.2);
        assert_eq!(s.s_plus, s.m_plus);
        assert_eq!(s.s_minus, s.m_minus);
    }

    #[test]
    fn biased_means_negative() {
        let p = paper_params();
        let mut rng = RngStream::new(31, 0);
        let n = 100_000;
        let (mut a, mut b) = (0.0, 0.0);
        for _ in 0..n {
            let s = sample_limit(&p, &mut rng);
            a += s.s_plus - s.m_plus;
            b += s.s_minus - s.m_minus;
        }
        assert!(a < 0.0 && b < 0.0);
    }

    #[test]
    fn conditional_std_of_unbiased() {
        let p = paper_params();
        let mut rng = RngStream::new(8, 0);
        let mut bin = Vec::new();
        while bin.len() < 20_000 {
            let s = sample_limit(&p, &mut rng);
            if s.lambda_occ > 0.45 && s.lambda_occ < 0.55 {
                bin.push(s.m_plus);
            }
        }
        let var = bin.iter().map(|x| x * x).sum::<f64>() / bin.len() as f64;
        let expected = 2f64.sqrt() * 4.0 / 0.5f64.sqrt();
        assert!((var.sqrt() / expected - 1.0).abs() < 0.05, "{}", var.sqrt());
    }

    #[test]
    fn orw_limit_degenerate_at_one() {
        let mut rng = RngStream::new(2, 2);
        for _ in 0..100 {
            assert_eq!(sample_orw_limit(1.0, 0.4, &mut rng).unwrap(), 0.0);
        }
        assert!(sample_orw_limit(0.0, 0.4, &mut rng).is_err());
        assert!(sample_orw_limit(0.5, 1.5, &mut rng).is_err());
    }

    #[test]
    fn medians_zero() {
        let p = paper_params();
        let mut rng = RngStream::new(44, 0);
        let n = 40_000;
        let mut pos = [0usize; 3];
        for _ in 0..n {
            let s = sample_limit(&p, &mut rng);
            pos[0] += (s.m_plus > 0.0) as usize;
            pos[1] += (s.m_minus > 0.0) as usize;
            pos[2] += (sample_orw_limit(0.7, 0.7, &mut rng).unwrap() > 0.0) as usize;
        }
        for c in pos {
            let f = c as f64 / n as f64;
            assert!((f - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt(), "{f}");
        }
    }

    proptest! {
        #[test]
        fn draws_in_range_and_reproducible(seed in any::<u64>(), idx in any::<u32>(), sp in 0.05f64..20.0, sm in 0.05f64..20.0) {
            let p = ObmParams::new(sp, sm).unwrap();
            let a = sample_limit(&p, &mut RngStream::new(seed, idx as u64));
            let b = sample_limit(&p, &mut RngStream::new(seed, idx as u64));
            prop_assert_eq!(a, b);
            prop_assert!(a.lambda_occ > 0.0 && a.lambda_occ < 1.0);
            prop_assert!(a.xi >= 0.0);
            prop_assert!(a.s_plus <= a.m_plus && a.s_minus <= a.m_minus);
        }
    }
}
