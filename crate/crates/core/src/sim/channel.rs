//! Channel and imperfect-CSIT draws.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::profile::CsitProfile;

/// Complex vector in C^2.
pub type C2 = [Complex64; 2];

/// `c^H w`.
pub fn inner(c: &C2, w: &C2) -> Complex64 {
    c[0].conj() * w[0] + c[1].conj() * w[1]
}

pub fn norm(v: &C2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Unit vector orthogonal to `v`: `[-conj(v2), conj(v1)] / |v|`.
pub fn ortho(v: &C2) -> Result<C2> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok([-v[1].conj() / n, v[0].conj() / n])
}

/// Power gain `|c^H w|^2`.
pub fn gain(c: &C2, w: &C2) -> f64 {
    inner(c, w).norm_sqr()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Isotropic unit vector on the complex sphere in C^2.
pub fn isotropic_unit<R: Rng + ?Sized>(rng: &mut R) -> C2 {
    loop {
        let v = [complex_gaussian(rng, 1.0), complex_gaussian(rng, 1.0)];
        let n = norm(&v);
        if n > 1e-300 {
            return [v[0] / n, v[1] / n];
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubbandChannel {
    /// User 1's channel.
    pub h: C2,
    /// User 2's channel.
    pub g: C2,
    pub h_hat: C2,
    pub g_hat: C2,
    /// Per-entry error variance of `h_hat`, `P^-a_j`.
    pub sigma1_sq: f64,
    /// Per-entry error variance of `g_hat`, `P^-b_j`.
    pub sigma2_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub subbands: Vec<SubbandChannel>,
}

/// Draws unit-norm channels and their estimates at transmit SNR `p`.
///
/// The estimate is the true channel minus an independent
/// `CN(0, sigma^2 I)` error, so the receive channel stays unit norm and the
/// leakage `|h^H h_hat^perp|^2` has mean `sigma^2`.
pub fn draw_channels<R: Rng + ?Sized>(rng: &mut R, profile: &CsitProfile, p: f64) -> ChannelDraw {
    let subbands = profile
        .a()
        .iter()
        .zip(profile.b())
        .map(|(&a, &b)| {
            let sigma1_sq = p.powf(-a);
            let sigma2_sq = p.powf(-b);
            let h = isotropic_unit(rng);
            let g = isotropic_unit(rng);
            let eh = [complex_gaussian(rng, sigma1_sq), complex_gaussian(rng, sigma1_sq)];
            let eg = [complex_gaussian(rng, sigma2_sq), complex_gaussian(rng, sigma2_sq)];
            SubbandChannel {
                h,
                g,
                h_hat: [h[0] - eh[0], h[1] - eh[1]],
                g_hat: [g[0] - eg[0], g[1] - eg[1]],
                sigma1_sq,
                sigma2_sq,
            }
        })
        .collect();
    ChannelDraw { subbands }
}
