use crate::error::{Error, Result};
use crate::special::{bessel_k, gamma, gamma_ratio, ln_gamma};

fn check(n: u32, sigma: f64, q: f64) -> Result<()> {
    if n == 0 || !(sigma > 0.0) || !sigma.is_finite() || !(q > n as f64) || !q.is_finite() {
        return Err(Error::Domain(format!("need n ≥ 1, σ > 0, q > n; got n = {n}, σ = {sigma}, q = {q}")));
    }
    Ok(())
}

/// `(−Δ)^σ⟨·⟩^{−q}(0) = 4^σ Γ(σ+n/2)/Γ(n/2) · Γ(σ+q/2)/Γ(q/2)`.
pub fn value_at_origin(n: u32, sigma: f64, q: f64) -> Result<f64> {
    check(n, sigma, q)?;
    Ok(4f64.powf(sigma) * gamma_ratio(n as f64 / 2.0, sigma)? * gamma_ratio(q / 2.0, sigma)?)
}

/// Unitary Fourier transform of `⟨x⟩^{−q}` in ℝⁿ at `|ξ| = xi_norm`:
/// `|ξ|^{(q−n)/2} 2^{1−q/2} K_{(n−q)/2}(|ξ|) / Γ(q/2)`.
pub fn fourier_transform_polydecay(n: u32, q: f64, xi_norm: f64) -> Result<f64> {
    if n == 0 || !(q > n as f64) || !(xi_norm > 0.0) || !xi_norm.is_finite() {
        return Err(Error::Domain(format!("need q > n ≥ 1 and |ξ| > 0; got n = {n}, q = {q}, |ξ| = {xi_norm}")));
    }
    let nu = (n as f64 - q) / 2.0;
    Ok(xi_norm.powf(-nu) * 2f64.powf(1.0 - q / 2.0) * bessel_k(nu, xi_norm)? / gamma(q / 2.0)?)
}

/// The `θ ∈ (0,1)` with `(−Δ)^σ(⟨·⟩^{−q} − θ⟨·⟩^{−q−ε})(0) = 0`.
pub fn vanishing_theta(n: u32, sigma: f64, q: f64, eps: f64) -> Result<f64> {
    check(n, sigma, q)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("ε must be positive, got {eps}")));
    }
    let qe = q + eps;
    let log_theta =
        ln_gamma(sigma + q / 2.0)? + ln_gamma(qe / 2.0)? - ln_gamma(q / 2.0)? - ln_gamma(sigma + qe / 2.0)?;
    let theta = log_theta.exp();
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("θ = {theta} fell outside (0,1) in floating point")));
    }
    Ok(theta)
}
