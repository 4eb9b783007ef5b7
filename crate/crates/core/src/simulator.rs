//! Executable model of key generation, encryption and decryption with a
//! Q-ary symbol mapping, used to check the noise model empirically.
//!
//! No error-correcting code runs here: the simulator measures the raw
//! symbol channel.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::Constellation;
use crate::compression::{compress, decompress};
use crate::params::ParamSet;
use crate::ring::{reduce, RingElement, RingMatrix, RingVector, Sampler, Seed};
use crate::{Error, Result};

/// Trials per work unit. Unit `i` draws from ChaCha stream `i + 1`, so
/// totals do not depend on the number of threads.
pub const TRIALS_PER_UNIT: u64 = 1 << 12;

/// Noise source for secrets and errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    Cbd,
    /// Every secret and error polynomial is zero; a test hook for exact
    /// round trips.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub a: RingMatrix,
    pub b: RingVector,
    pub s: RingVector,
    /// Retained so the decryption residual can be traced.
    pub e: RingVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    /// `l` components of `n` values: `d_u`-bit words, or raw residues when
    /// `d_u = 0`.
    pub u: Vec<Vec<u32>>,
    /// `d_v`-bit words, or raw residues when `d_v = 0`.
    pub v: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolMessage {
    pub symbols: Vec<u32>,
}

/// Transient encryption randomness, kept for noise tracing.
#[derive(Debug, Clone)]
pub struct EncryptionTrace {
    pub s1: RingVector,
    pub e1: RingVector,
    pub e2: RingElement,
    /// `u` and `v` before compression.
    pub u: RingVector,
    pub v: RingElement,
}

fn noise_vector(sampler: &mut Sampler, param: &ParamSet, mode: NoiseMode) -> RingVector {
    match mode {
        NoiseMode::Cbd => sampler.cbd_vector(param.k, param.l, param.n, param.q),
        NoiseMode::Zero => RingVector::zero(param.l, param.n, param.q),
    }
}

fn noise_poly(sampler: &mut Sampler, param: &ParamSet, mode: NoiseMode) -> RingElement {
    match mode {
        NoiseMode::Cbd => sampler.cbd(param.k, param.n, param.q),
        NoiseMode::Zero => RingElement::zero(param.n, param.q),
    }
}

/// `b = A s + e` with uniform `A` and `s, e ~ chi_k`.
pub fn keygen_with(param: &ParamSet, sampler: &mut Sampler, mode: NoiseMode) -> Result<KeyPair> {
    let a = sampler.uniform_matrix(param.l, param.n, param.q);
    let s = noise_vector(sampler, param, mode);
    let e = noise_vector(sampler, param, mode);
    let b = a.mul_vec(&s)?.try_add(&e)?;
    Ok(KeyPair { a, b, s, e })
}

pub fn keygen(param: &ParamSet, seed: Seed) -> Result<KeyPair> {
    param.validate()?;
    keygen_with(param, &mut Sampler::new(seed), NoiseMode::Cbd)
}

fn compress_poly(p: &RingElement, d: u32) -> Result<Vec<u32>> {
    if d == 0 {
        return Ok(p.coeffs().to_vec());
    }
    p.coeffs().iter().map(|&z| compress(z, d, p.q())).collect()
}

fn decompress_poly(words: &[u32], d: u32, q: u32) -> Result<RingElement> {
    if d == 0 {
        return RingElement::from_coeffs(words.to_vec(), q);
    }
    let coeffs = words.iter().map(|&w| decompress(w, d, q)).collect::<Result<_>>()?;
    RingElement::from_coeffs(coeffs, q)
}

fn map_message(msg: &SymbolMessage, c: &Constellation, n: usize) -> Result<RingElement> {
    if msg.symbols.len() != n {
        return Err(Error::Mismatch(format!(
            "message has {} symbols, n = {n}",
            msg.symbols.len()
        )));
    }
    let coeffs = msg.symbols.iter().map(|&j| c.map_symbol(j)).collect::<Result<_>>()?;
    RingElement::from_coeffs(coeffs, c.q())
}

/// `u = A^T s' + e'`, `v = b^T s' + e'' + Map(m)`, then compression.
pub fn encrypt_with(
    param: &ParamSet,
    pk: &KeyPair,
    msg: &SymbolMessage,
    c: &Constellation,
    sampler: &mut Sampler,
    mode: NoiseMode,
) -> Result<(Ciphertext, EncryptionTrace)> {
    let m = map_message(msg, c, param.n)?;
    let s1 = noise_vector(sampler, param, mode);
    let e1 = noise_vector(sampler, param, mode);
    let e2 = noise_poly(sampler, param, mode);
    let u = pk.a.transpose_mul_vec(&s1)?.try_add(&e1)?;
    let v = pk.b.dot(&s1)?.try_add(&e2)?.try_add(&m)?;
    let ct = Ciphertext {
        u: u.elems
            .iter()
            .map(|p| compress_poly(p, param.d_u))
            .collect::<Result<_>>()?,
        v: compress_poly(&v, param.d_v)?,
    };
    Ok((ct, EncryptionTrace { s1, e1, e2, u, v }))
}

pub fn encrypt(param: &ParamSet, pk: &KeyPair, msg: &SymbolMessage, alphabet: u32, seed: Seed) -> Result<Ciphertext> {
    let c = Constellation::new(param.q, alphabet)?;
    Ok(encrypt_with(param, pk, msg, &c, &mut Sampler::new(seed), NoiseMode::Cbd)?.0)
}

/// `u''` and `v''`.
fn decompressed(param: &ParamSet, ct: &Ciphertext) -> Result<(RingVector, RingElement)> {
    if ct.u.len() != param.l || ct.v.len() != param.n {
        return Err(Error::Mismatch(
            "ciphertext shape does not match the parameter set".into(),
        ));
    }
    let u = RingVector {
        elems: ct
            .u
            .iter()
            .map(|w| decompress_poly(w, param.d_u, param.q))
            .collect::<Result<_>>()?,
    };
    Ok((u, decompress_poly(&ct.v, param.d_v, param.q)?))
}

/// `v'' - s^T u''`.
pub fn decryption_residual(param: &ParamSet, ct: &Ciphertext, s: &RingVector) -> Result<RingElement> {
    let (u, v) = decompressed(param, ct)?;
    v.try_sub(&s.dot(&u)?)
}

pub fn decrypt_with(param: &ParamSet, ct: &Ciphertext, s: &RingVector, c: &Constellation) -> Result<SymbolMessage> {
    let r = decryption_residual(param, ct, s)?;
    Ok(SymbolMessage {
        symbols: r.coeffs().iter().map(|&y| c.demap(y)).collect(),
    })
}

pub fn decrypt(param: &ParamSet, ct: &Ciphertext, s: &RingVector, alphabet: u32) -> Result<SymbolMessage> {
    decrypt_with(param, ct, s, &Constellation::new(param.q, alphabet)?)
}

/// Checks `v'' - s^T u'' - Map(m) = e^T s' + e'' - s^T (e' + c_u) + c_v`
/// with `c_u = u'' - u` and `c_v = v'' - v`.
pub fn noise_identity_holds(
    param: &ParamSet,
    kp: &KeyPair,
    trace: &EncryptionTrace,
    ct: &Ciphertext,
    msg: &SymbolMessage,
    c: &Constellation,
) -> Result<bool> {
    let (u2, v2) = decompressed(param, ct)?;
    let m = map_message(msg, c, param.n)?;
    let lhs = v2.try_sub(&kp.s.dot(&u2)?)?.try_sub(&m)?;
    let c_v = v2.try_sub(&trace.v)?;
    let mut e1c = trace.e1.clone();
    for (slot, (hat, raw)) in e1c.elems.iter_mut().zip(u2.elems.iter().zip(&trace.u.elems)) {
        *slot = slot.try_add(&hat.try_sub(raw)?)?;
    }
    let rhs =
        kp.e.dot(&trace.s1)?
            .try_add(&trace.e2)?
            .try_sub(&kp.s.dot(&e1c)?)?
            .try_add(&c_v)?;
    Ok(lhs == rhs)
}

/// Options for [`measure_coeff_failures`].
#[derive(Debug, Clone, Copy)]
pub struct SimulationConfig {
    pub alphabet: u32,
    pub trials: u64,
    pub seed: Seed,
    pub mode: NoiseMode,
    /// Verify the decryption-noise identity on every trial.
    pub check_identity: bool,
}

/// Aggregated Monte Carlo counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureStats {
    pub n: usize,
    pub q: u32,
    pub alphabet: u32,
    pub trials: u64,
    /// Symbol errors per coefficient index.
    pub errors: Vec<u64>,
    /// Joint errors for coefficient pairs `i < j`, row-major upper triangle.
    pub pair_errors: Vec<u64>,
    /// Histogram over `Z_q` of `(v'' - s^T u'' - Map(m))_0`.
    pub noise_hist: Vec<u64>,
    pub identity_failures: u64,
}

impl FailureStats {
    fn empty(n: usize, q: u32, alphabet: u32) -> Self {
        FailureStats {
            n,
            q,
            alphabet,
            trials: 0,
            errors: vec![0; n],
            pair_errors: vec![0; n * (n - 1) / 2],
            noise_hist: vec![0; q as usize],
            identity_failures: 0,
        }
    }

    fn merge(mut self, other: FailureStats) -> FailureStats {
        self.trials += other.trials;
        for (a, b) in self.errors.iter_mut().zip(&other.errors) {
            *a += b;
        }
        for (a, b) in self.pair_errors.iter_mut().zip(&other.pair_errors) {
            *a += b;
        }
        for (a, b) in self.noise_hist.iter_mut().zip(&other.noise_hist) {
            *a += b;
        }
        self.identity_failures += other.identity_failures;
        self
    }

    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn total_errors(&self) -> u64 {
        self.errors.iter().sum()
    }

    /// Fraction of demapped symbols that were wrong.
    pub fn empirical_rate(&self) -> f64 {
        self.total_errors() as f64 / (self.trials as f64 * self.n as f64)
    }

    /// Per-pair dependence diagnostic: joint error frequency against the
    /// product of the marginals, as a z-score under independence.
    pub fn pair_diagnostics(&self) -> Vec<PairStat> {
        let t = self.trials as f64;
        let mut out = Vec::with_capacity(self.pair_errors.len());
        for i in 0..self.n {
            for j in i + 1..self.n {
                let joint = self.pair_errors[self.pair_index(i, j)];
                let expected = self.errors[i] as f64 / t * self.errors[j] as f64 / t;
                let sigma = (expected * (1.0 - expected) / t).sqrt();
                let observed = joint as f64 / t;
                let z = if sigma > 0.0 {
                    (observed - expected) / sigma
                } else {
                    0.0
                };
                out.push(PairStat {
                    i,
                    j,
                    joint,
                    observed,
                    expected,
                    z,
                });
            }
        }
        out
    }

    /// CSV with one row per coefficient: `coefficient,errors,trials`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["coefficient", "errors", "trials"])?;
        for (i, e) in self.errors.iter().enumerate() {
            w.write_record([i.to_string(), e.to_string(), self.trials.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairStat {
    pub i: usize,
    pub j: usize,
    pub joint: u64,
    pub observed: f64,
    pub expected: f64,
    pub z: f64,
}

fn run_unit(
    param: &ParamSet,
    cfg: &SimulationConfig,
    c: &Constellation,
    unit: u64,
    trials: u64,
) -> Result<FailureStats> {
    let mut sampler = Sampler::with_stream(cfg.seed, unit + 1);
    let mut stats = FailureStats::empty(param.n, param.q, cfg.alphabet);
    let mut wrong = Vec::with_capacity(param.n);
    for _ in 0..trials {
        let kp = keygen_with(param, &mut sampler, cfg.mode)?;
        let msg = SymbolMessage {
            symbols: (0..param.n).map(|_| sampler.rng().gen_range(0..cfg.alphabet)).collect(),
        };
        let (ct, trace) = encrypt_with(param, &kp, &msg, c, &mut sampler, cfg.mode)?;
        let residual = decryption_residual(param, &ct, &kp.s)?;
        let x0 = c.map_symbol(msg.symbols[0])?;
        let noise0 = reduce(i64::from(residual.coeffs()[0]) - i64::from(x0), param.q);
        stats.noise_hist[noise0 as usize] += 1;
        wrong.clear();
        for (i, (&y, &m)) in residual.coeffs().iter().zip(&msg.symbols).enumerate() {
            if c.demap(y) != m {
                wrong.push(i);
                stats.errors[i] += 1;
            }
        }
        for (a, &i) in wrong.iter().enumerate() {
            for &j in &wrong[a + 1..] {
                let idx = stats.pair_index(i, j);
                stats.pair_errors[idx] += 1;
            }
        }
        if cfg.check_identity && !noise_identity_holds(param, &kp, &trace, &ct, &msg, c)? {
            stats.identity_failures += 1;
        }
        stats.trials += 1;
    }
    Ok(stats)
}

/// Runs `trials` independent key generation / encryption / decryption
/// rounds with uniformly random messages and counts symbol errors.
pub fn measure_coeff_failures(param: &ParamSet, cfg: &SimulationConfig) -> Result<FailureStats> {
    param.validate()?;
    if cfg.trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    let c = Constellation::new(param.q, cfg.alphabet)?;
    let units = cfg.trials.div_ceil(TRIALS_PER_UNIT);
    let parts = (0..units)
        .into_par_iter()
        .map(|u| {
            let count = TRIALS_PER_UNIT.min(cfg.trials - u * TRIALS_PER_UNIT);
            run_unit(param, cfg, &c, u, count)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts
        .into_iter()
        .fold(FailureStats::empty(param.n, param.q, cfg.alphabet), FailureStats::merge))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::builtin;

    fn cfg(alphabet: u32, trials: u64, mode: NoiseMode) -> SimulationConfig {
        SimulationConfig {
            alphabet,
            trials,
            seed: Seed::from_u64(7),
            mode,
            check_identity: true,
        }
    }

    #[test]
    fn keygen_is_reproducible() {
        let p = builtin("toy_n16q257_l2").unwrap();
        assert_eq!(
            keygen(&p, Seed::from_u64(1)).unwrap(),
            keygen(&p, Seed::from_u64(1)).unwrap()
        );
        assert_ne!(
            keygen(&p, Seed::from_u64(1)).unwrap(),
            keygen(&p, Seed::from_u64(2)).unwrap()
        );
        let r = builtin("toy_n8q97").unwrap();
        let kp = keygen(&r, Seed::from_u64(3)).unwrap();
        assert_eq!((kp.a.rows.len(), kp.b.len()), (1, 1));
    }

    #[test]
    fn noiseless_round_trip() {
        let p = ParamSet::new("plain", 16, 257, 2, 2, 0, 0).unwrap();
        let c = Constellation::new(257, 5).unwrap();
        let mut s = Sampler::new(Seed::from_u64(9));
        for _ in 0..50 {
            let kp = keygen_with(&p, &mut s, NoiseMode::Zero).unwrap();
            let msg = SymbolMessage {
                symbols: (0..16).map(|_| s.rng().gen_range(0..5)).collect(),
            };
            let (ct, _) = encrypt_with(&p, &kp, &msg, &c, &mut s, NoiseMode::Zero).unwrap();
            assert_eq!(decrypt_with(&p, &ct, &kp.s, &c).unwrap(), msg);
        }
    }

    #[test]
    fn map_contributions() {
        let p = ParamSet::new("nh", 8, 12289, 8, 1, 0, 0).unwrap();
        let c = Constellation::new(12289, 2).unwrap();
        let mut s = Sampler::new(Seed::from_u64(4));
        let kp = keygen_with(&p, &mut s, NoiseMode::Zero).unwrap();
        let ones = SymbolMessage { symbols: vec![1; 8] };
        let (ct, _) = encrypt_with(&p, &kp, &ones, &c, &mut s, NoiseMode::Zero).unwrap();
        assert_eq!(ct.v, vec![6144; 8]);
        let zeros = SymbolMessage { symbols: vec![0; 8] };
        let (ct, _) = encrypt_with(&p, &kp, &zeros, &c, &mut s, NoiseMode::Zero).unwrap();
        assert_eq!(ct.v, vec![0; 8]);
    }

    #[test]
    fn identity_holds_with_compression() {
        for name in ["toy_n2q17_l2", "toy_n16q257_l2", "kyber1024"] {
            let p = builtin(name).unwrap();
            let stats = measure_coeff_failures(&p, &cfg(4, 20, NoiseMode::Cbd)).unwrap();
            assert_eq!(stats.identity_failures, 0, "{name}");
            assert_eq!(stats.trials, 20);
        }
    }

    #[test]
    fn noiseless_hook_has_no_failures() {
        let p = builtin("toy_n16q257").unwrap();
        let p = ParamSet { d_v: 0, ..p };
        let stats = measure_coeff_failures(&p, &cfg(7, 500, NoiseMode::Zero)).unwrap();
        assert_eq!(stats.total_errors(), 0);
        assert_eq!(stats.noise_hist[0], 500);
    }

    #[test]
    fn zero_trials_rejected() {
        let p = builtin("toy_n2q17").unwrap();
        assert!(measure_coeff_failures(&p, &cfg(2, 0, NoiseMode::Cbd)).is_err());
    }

    #[test]
    fn totals_are_deterministic_and_thread_independent() {
        let p = builtin("toy_n8q97").unwrap();
        let c = cfg(3, 3 * TRIALS_PER_UNIT + 17, NoiseMode::Cbd);
        let a = measure_coeff_failures(&p, &c).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| measure_coeff_failures(&p, &c).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.noise_hist.iter().sum::<u64>(), a.trials);
    }

    #[test]
    fn public_matrix_looks_uniform() {
        // Chi-square over the coefficients of A at q = 17.
        let p = builtin("toy_n2q17").unwrap();
        let mut s = Sampler::new(Seed::from_u64(11));
        let mut counts = [0u64; 17];
        let keys = 100_000;
        for _ in 0..keys {
            let kp = keygen_with(&p, &mut s, NoiseMode::Cbd).unwrap();
            for &c in kp.a.rows[0].elems[0].coeffs() {
                counts[c as usize] += 1;
            }
        }
        let expected = (2 * keys) as f64 / 17.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 0.999 quantile of chi-square with 16 degrees of freedom.
        assert!(chi2 < 39.252, "{chi2}");
    }

    #[test]
    fn csv_layout() {
        let p = builtin("toy_n2q17").unwrap();
        let stats = measure_coeff_failures(&p, &cfg(2, 100, NoiseMode::Cbd)).unwrap();
        let mut buf = Vec::new();
        stats.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "coefficient,errors,trials");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].ends_with(",100"));
        assert_eq!(stats.pair_diagnostics().len(), 1);
    }
}
