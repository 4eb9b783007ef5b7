//! The per-coefficient decryption noise `psi` and the probability bounds
//! that guard the independence assumptions behind it.
//!
//! One coefficient of the decryption residual
//! `e^T s' + e'' - s^T (e' + c_u) + c_v` is modelled as a sum of
//! independent parts:
//!
//! * `l n` products of two `chi_k` draws (law `xi`) for `e^T s'`,
//! * `l n` products of a `chi_k` draw with a `chi_k * rho_u` draw (law
//!   `zeta`, summed into `eta`) for `s^T (e' + c_u)`,
//! * one `chi_k` draw for `e''` and one `rho_v` draw for `c_v`.
//!
//! Differences are treated as sums because `chi_k` is symmetric; the slight
//! asymmetry of the rounding noise is kept as computed.

use rug::Float;

use crate::compression::compression_noise_pmf;
use crate::params::{ParamSet, PrecisionConfig};
use crate::pmf::{convolve, pmf_cbd, product_pmf, self_convolve, Pmf};
use crate::{Error, Result};

/// All intermediate laws of one noise construction, on a common backend.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    pub param: ParamSet,
    pub chi: Pmf,
    /// Product of two independent `chi_k` draws.
    pub xi: Pmf,
    pub rho_u: Pmf,
    pub rho_v: Pmf,
    /// Product of a `chi_k` draw and a `chi_k * rho_u` draw.
    pub zeta: Pmf,
    /// `l n`-fold sum of `zeta`.
    pub eta: Pmf,
    pub psi: Pmf,
}

fn components(param: &ParamSet, precision: &PrecisionConfig) -> Result<(Pmf, Pmf, Pmf, Pmf)> {
    param.validate()?;
    precision.validate()?;
    let backend = precision.backend();
    let chi = pmf_cbd(param.k, param.q, backend)?;
    let xi = product_pmf(&chi, &chi)?;
    let rho_u = compression_noise_pmf(param.d_u, param.q)?.into_backend(backend);
    let rho_v = compression_noise_pmf(param.d_v, param.q)?.into_backend(backend);
    Ok((chi, xi, rho_u, rho_v))
}

/// `psi = xi^{*n} * xi^{*n} * chi_k * rho_v` for an RLWE scheme whose first
/// ciphertext component is sent uncompressed.
pub fn build_psi_rlwe(param: &ParamSet, precision: &PrecisionConfig) -> Result<NoiseModel> {
    if param.l != 1 || param.d_u != 0 {
        return Err(Error::Domain(format!(
            "{}: the RLWE construction needs l = 1 and d_u = 0",
            param.name
        )));
    }
    let (chi, xi, rho_u, rho_v) = components(param, precision)?;
    let sum = self_convolve(&xi, param.n as u64)?;
    let psi = convolve(&convolve(&convolve(&sum, &sum)?, &chi)?, &rho_v)?;
    Ok(NoiseModel {
        param: param.clone(),
        chi,
        zeta: xi.clone(),
        xi,
        rho_u,
        rho_v,
        eta: sum,
        psi,
    })
}

/// `psi = xi^{*ln} * eta * chi_k * rho_v` with `eta = zeta^{*ln}` and
/// `zeta` the law of `chi_k * (chi_k + rho_u)` products.
pub fn build_psi_mlwe(param: &ParamSet, precision: &PrecisionConfig) -> Result<NoiseModel> {
    let (chi, xi, rho_u, rho_v) = components(param, precision)?;
    let terms = (param.l * param.n) as u64;
    let zeta = product_pmf(&chi, &convolve(&chi, &rho_u)?)?;
    let eta = self_convolve(&zeta, terms)?;
    let sum = self_convolve(&xi, terms)?;
    let psi = convolve(&convolve(&convolve(&sum, &eta)?, &chi)?, &rho_v)?;
    Ok(NoiseModel {
        param: param.clone(),
        chi,
        xi,
        rho_u,
        rho_v,
        zeta,
        eta,
        psi,
    })
}

/// Picks the RLWE construction when it applies and the MLWE one otherwise;
/// both agree bit for bit on the RLWE case.
pub fn build_psi(param: &ParamSet, precision: &PrecisionConfig) -> Result<NoiseModel> {
    if param.l == 1 && param.d_u == 0 {
        build_psi_rlwe(param, precision)
    } else {
        build_psi_mlwe(param, precision)
    }
}

impl NoiseModel {
    /// Named components in export order.
    pub fn named_components(&self) -> [(&'static str, &Pmf); 7] {
        [
            ("chi", &self.chi),
            ("xi", &self.xi),
            ("zeta", &self.zeta),
            ("eta", &self.eta),
            ("rho_u", &self.rho_u),
            ("rho_v", &self.rho_v),
            ("psi", &self.psi),
        ]
    }
}

/// `log2(polys * chi_k(0)^n)`: a union bound on one of `polys` independent
/// `chi_k`-distributed polynomials being zero.
pub fn zero_poly_log2(k: u32, n: usize, polys: u32, prec: u32) -> Result<Float> {
    if polys == 0 {
        return Err(Error::Domain("polys must be >= 1".into()));
    }
    let p0 = Float::with_val(prec, rug::Integer::from(2 * k).binomial(k)) >> (2 * k);
    let l = Float::with_val(prec, p0.log2_ref()) * n as u32;
    Ok(l + Float::with_val(prec, polys).log2())
}

pub fn zero_poly_event_prob(param: &ParamSet, polys: u32, prec: u32) -> Result<Float> {
    param.validate()?;
    zero_poly_log2(param.k, param.n, polys, prec)
}

/// `log2((2/q)^n)`.
pub fn independence_bound_rlwe_log2(n: usize, q: u32, prec: u32) -> Float {
    let two_over_q = Float::with_val(prec, 2) / q;
    Float::with_val(prec, two_over_q.log2()) * n as u32
}

pub fn independence_bound_rlwe(param: &ParamSet, prec: u32) -> Result<Float> {
    param.validate()?;
    if param.l != 1 {
        return Err(Error::Domain(format!("{}: RLWE bound needs l = 1", param.name)));
    }
    Ok(independence_bound_rlwe_log2(param.n, param.q, prec))
}

/// `log2(2^(n/2 + 1) / q^n)`.
pub fn independence_bound_mlwe_log2(n: usize, q: u32, prec: u32) -> Result<Float> {
    if !n.is_multiple_of(2) {
        return Err(Error::Domain(format!("n = {n} must be even")));
    }
    let lq = Float::with_val(prec, q).log2() * n as u32;
    Ok(Float::with_val(prec, (n / 2 + 1) as u32) - lq)
}

pub fn independence_bound_mlwe(param: &ParamSet, prec: u32) -> Result<Float> {
    param.validate()?;
    independence_bound_mlwe_log2(param.n, param.q, prec)
}

/// Splits `2^log2` into `(m, e)` with `2^log2 = m * 10^e` and `1 <= m < 10`.
pub fn log2_to_scientific(log2: &Float) -> (f64, i64) {
    let prec = log2.prec().max(128);
    let log10 = Float::with_val(prec, log2 * Float::with_val(prec, 2).log10());
    let e = Float::with_val(prec, log10.floor_ref());
    let frac = Float::with_val(prec, &log10 - &e);
    let m = Float::with_val(prec, frac * Float::with_val(prec, 10).ln()).exp();
    (m.to_f64(), e.to_f64() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::builtin;
    use crate::pmf::Backend;

    #[test]
    fn zero_poly_values() {
        let half = zero_poly_log2(1, 1, 1, 128).unwrap();
        assert_eq!(half, -1);
        let nh = zero_poly_event_prob(&builtin("newhope1024").unwrap(), 2, 256).unwrap();
        let (m, e) = log2_to_scientific(&nh);
        assert_eq!(e, -724);
        assert!((m - 2.72).abs() / 2.72 < 0.01, "{m}e{e}");
        let ky = zero_poly_event_prob(&builtin("kyber1024").unwrap(), 3, 256).unwrap();
        let want = 256.0 * (6.0f64 / 16.0).log2() + 3.0f64.log2();
        assert!((ky.to_f64() - want).abs() < 1e-9, "{}", ky.to_f64());
        assert!(zero_poly_log2(2, 4, 0, 64).is_err());
    }

    #[test]
    fn independence_bounds() {
        assert_eq!(independence_bound_rlwe_log2(1, 2, 64), 0);
        assert_eq!(independence_bound_rlwe_log2(2, 4, 64), -2);
        assert_eq!(independence_bound_mlwe_log2(2, 2, 64).unwrap(), 0);
        let want = (8.0f64 / 81.0).log2();
        assert!((independence_bound_mlwe_log2(4, 3, 128).unwrap().to_f64() - want).abs() < 1e-12);
        assert!(independence_bound_mlwe_log2(3, 3, 64).is_err());

        let nh = independence_bound_rlwe(&builtin("newhope1024").unwrap(), 256).unwrap();
        let (m, e) = log2_to_scientific(&nh);
        assert_eq!(e, -3880);
        assert!((m - 3.9).abs() / 3.9 < 0.01, "{m}");
        let ky = independence_bound_mlwe(&builtin("kyber1024").unwrap(), 256).unwrap();
        let (m, e) = log2_to_scientific(&ky);
        assert_eq!(e, -863);
        assert!((m - 1.3).abs() / 1.3 < 0.02, "{m}");
    }

    #[test]
    fn rlwe_preconditions() {
        let p = builtin("toy_n2q17_l2").unwrap();
        assert!(build_psi_rlwe(&p, &PrecisionConfig::exact()).is_err());
    }

    #[test]
    fn mlwe_reduces_to_rlwe_bitwise() {
        for name in ["toy_n16q257", "toy_n8q97"] {
            let p = builtin(name).unwrap();
            for cfg in [PrecisionConfig::exact(), PrecisionConfig::float(256).unwrap()] {
                let a = build_psi_rlwe(&p, &cfg).unwrap();
                let b = build_psi_mlwe(&p, &cfg).unwrap();
                assert_eq!(a.psi, b.psi, "{name} {:?}", cfg.backend());
                assert_eq!(a.eta, b.eta);
            }
        }
    }

    #[test]
    fn variance_adds_up() {
        let p = builtin("toy_n16q257").unwrap();
        let m = build_psi(&p, &PrecisionConfig::exact()).unwrap();
        let (_, vx) = m.xi.moments(256);
        let (_, ve) = m.eta.moments(256);
        let want = Float::with_val(256, &vx * 16u32);
        assert!(Float::with_val(256, &ve - &want).abs() < 1e-60);
        let (mean, _) = m.psi.moments(256);
        assert!(mean.abs() <= 1);
    }

    #[test]
    fn psi_is_nearly_symmetric() {
        let p = builtin("toy_n16q257_l2").unwrap();
        let m = build_psi(&p, &PrecisionConfig::exact()).unwrap();
        let asym = |x: &Pmf| x.total_variation(&x.reflect(), 256).unwrap();
        // Total variation is subadditive over independent summands, and
        // only the rounding laws are asymmetric.
        let bound = asym(&m.rho_v) + asym(&m.zeta) * 32u32;
        let tv = asym(&m.psi);
        assert!(tv > 0 && tv <= bound, "{tv} > {bound}");
        assert_eq!(m.psi.backend(), Backend::Exact);
    }
}
