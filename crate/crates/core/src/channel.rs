//! The Q-ary channel induced by one ciphertext coefficient.
//!
//! Symbol `j` is sent as `x_j = floor(j q / Q)`, received as `x_j + e` with
//! `e ~ psi`, and demapped to the nearest constellation point in the Lee
//! metric.

use rug::{Float, Integer};

use crate::params::ParamSet;
use crate::pmf::{log2_of, pow_float, shift_mixture, Pmf};
use crate::ring::lee_distance;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constellation {
    q: u32,
    points: Vec<u32>,
}

impl Constellation {
    pub fn new(q: u32, alphabet: u32) -> Result<Self> {
        if alphabet < 2 || alphabet > q {
            return Err(Error::Domain(format!(
                "alphabet size Q = {alphabet} must satisfy 2 <= Q <= q = {q}"
            )));
        }
        let points = (0..u64::from(alphabet))
            .map(|j| (j * u64::from(q) / u64::from(alphabet)) as u32)
            .collect();
        Ok(Constellation { q, points })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn alphabet(&self) -> u32 {
        self.points.len() as u32
    }

    pub fn points(&self) -> &[u32] {
        &self.points
    }

    /// `x_j = floor(j q / Q)`.
    pub fn map_symbol(&self, j: u32) -> Result<u32> {
        self.points
            .get(j as usize)
            .copied()
            .ok_or_else(|| Error::Domain(format!("symbol {j} outside [0, {})", self.points.len())))
    }

    /// Nearest point in Lee distance; ties go to the smaller index.
    pub fn demap(&self, y: u32) -> u32 {
        let y = y % self.q;
        let mut best = 0;
        let mut best_dist = u32::MAX;
        for (j, &x) in self.points.iter().enumerate() {
            let d = lee_distance(y, x, self.q);
            if d < best_dist {
                best = j as u32;
                best_dist = d;
            }
        }
        best
    }

    /// Decision for every residue.
    pub fn demap_table(&self) -> Vec<u32> {
        (0..self.q).map(|y| self.demap(y)).collect()
    }

    /// Smallest gap between consecutive points (cyclically).
    pub fn min_spacing(&self) -> u32 {
        let n = self.points.len();
        (0..n)
            .map(|j| lee_distance(self.points[j], self.points[(j + 1) % n], self.q))
            .min()
            .unwrap_or(0)
    }
}

/// Tail mass `Pr(|e| > floor(q / 2Q))`, evaluated as a tail sum to avoid
/// cancellation.
///
/// This bounds the demapping failure only when every decision region
/// reaches `floor(q / 2Q)` on both sides of its point. If two neighbouring
/// points are exactly `2 floor(q / 2Q)` apart the midpoint tie goes to one
/// of them and the other fails at that offset; [`symbol_error_probability`]
/// accounts for it.
pub fn coeff_failure_bound(psi: &Pmf, alphabet: u32) -> Result<Float> {
    let q = psi.q();
    if alphabet < 2 || alphabet > q {
        return Err(Error::Domain(format!(
            "alphabet size Q = {alphabet} must satisfy 2 <= Q <= q = {q}"
        )));
    }
    let prec = psi.eval_prec();
    let radius = i64::from(q / (2 * alphabet));
    let mut tail = Float::new(prec);
    for i in 0..q as usize {
        if crate::ring::center(i as u32, q).abs() > radius {
            tail += psi.weight_float(i, prec);
        }
    }
    Ok(tail / psi.total(prec))
}

/// `log2` of [`coeff_failure_bound`].
pub fn coeff_failure_log2(psi: &Pmf, alphabet: u32) -> Result<Float> {
    let p = coeff_failure_bound(psi, alphabet)?;
    Ok(Float::with_val(p.prec(), p.log2_ref()))
}

/// Per-symbol failure `1 - T[j][j]` of the hard-decision demapper for every
/// constellation point, summed over off-diagonal entries.
pub fn symbol_failures(psi: &Pmf, alphabet: u32) -> Result<Vec<Float>> {
    let t = transition_matrix(psi, alphabet)?;
    let total = psi.total(psi.eval_prec());
    Ok(t.iter()
        .enumerate()
        .map(|(j, row)| {
            let mut off = Float::new(total.prec());
            for (jj, w) in row.iter().enumerate() {
                if jj != j {
                    off += w;
                }
            }
            off / &total
        })
        .collect())
}

/// Failure probability of one demapped symbol under uniform inputs.
pub fn symbol_error_probability(psi: &Pmf, alphabet: u32) -> Result<Float> {
    let per = symbol_failures(psi, alphabet)?;
    let mut acc = Float::new(per[0].prec());
    for p in &per {
        acc += p;
    }
    Ok(acc / alphabet)
}

/// Binomial tails `T[t] = sum_{j > t} C(n, j) p^j (1 - p)^(n - j)` for every
/// `t` in `0..=n`, assuming independent coefficient failures.
pub fn dfr_tails(pr_e: &Float, n: usize) -> Result<Vec<Float>> {
    if *pr_e < 0 || *pr_e > 1 {
        return Err(Error::Domain(format!("failure probability {pr_e} outside [0, 1]")));
    }
    let prec = pr_e.prec();
    let comp = Float::with_val(prec, 1 - pr_e);
    let nn = n as u32;
    let mut tails = vec![Float::new(prec); n + 1];
    let mut acc = Float::new(prec);
    for j in (1..=nn).rev() {
        let mut term = Float::with_val(prec, Integer::from(nn).binomial(j));
        term *= pow_float(pr_e, j);
        term *= pow_float(&comp, nn - j);
        acc += term;
        tails[(j - 1) as usize] = acc.clone();
    }
    Ok(tails)
}

/// Failure rate of a block of `n` coefficients protected by a code that
/// corrects `t` symbol errors.
pub fn dfr_bound(pr_e: &Float, n: usize, t: usize) -> Result<Float> {
    if t > n {
        return Err(Error::Domain(format!("t = {t} exceeds n = {n}")));
    }
    Ok(dfr_tails(pr_e, n)?.swap_remove(t))
}

#[derive(Debug, Clone)]
pub struct MinDistance {
    /// Required minimum distance `2t + 1`.
    pub d: usize,
    pub t: usize,
    pub pr_e: Float,
    pub dfr_log2: Float,
}

/// Smallest odd `d = 2t + 1 <= n` whose block failure bound is below
/// `2^target_log2`.
pub fn find_min_distance(psi: &Pmf, alphabet: u32, n: usize, target_log2: f64) -> Result<MinDistance> {
    let pr_e = coeff_failure_bound(psi, alphabet)?;
    let tails = dfr_tails(&pr_e, n)?;
    let prec = pr_e.prec();
    let target = Float::with_val(prec, Float::i_exp(1, 0)) << target_log2 as i32;
    let target = if target_log2.fract() == 0.0 {
        target
    } else {
        Float::with_val(prec, Float::with_val(prec, target_log2).exp2())
    };
    for (t, tail) in tails.iter().enumerate().take(n.saturating_sub(1) / 2 + 1) {
        if *tail < target {
            let dfr_log2 = Float::with_val(prec, tail.log2_ref());
            return Ok(MinDistance {
                d: 2 * t + 1,
                t,
                pr_e,
                dfr_log2,
            });
        }
    }
    Err(Error::Unreachable { target_log2 })
}

/// A capacity bound per coefficient and per block of `n` coefficients.
#[derive(Debug, Clone)]
pub struct CapacityBound {
    pub per_coeff: Float,
    pub per_block: Float,
}

impl CapacityBound {
    fn new(per_coeff: Float, n: usize) -> Self {
        let per_coeff = if per_coeff < 0 {
            Float::new(per_coeff.prec())
        } else {
            per_coeff
        };
        let per_block = Float::with_val(per_coeff.prec(), &per_coeff * n as u32);
        CapacityBound { per_coeff, per_block }
    }
}

/// `n (H(P_Y) - H(psi))` with `P_Y = (1/Q) sum_j psi(. - x_j)` the output law
/// under uniform inputs.
///
/// `P_Y` is formed from the reflected `psi`, which gives the mixture at `-y`
/// and so the same entropy as the output law of the constellation itself.
pub fn capacity_lower_bound(psi: &Pmf, alphabet: u32, n: usize) -> Result<CapacityBound> {
    let mix = shift_mixture(&psi.reflect(), alphabet)?;
    let prec = psi.eval_prec();
    let diff = Float::with_val(prec, mix.entropy_prec(prec) - psi.entropy_prec(prec));
    Ok(CapacityBound::new(diff, n))
}

/// Row-stochastic `Q x Q` matrix `T[j][j'] = Pr(demap(x_j + e) = j')`.
pub fn transition_matrix(psi: &Pmf, alphabet: u32) -> Result<Vec<Vec<Float>>> {
    let c = Constellation::new(psi.q(), alphabet)?;
    let q = psi.q() as usize;
    let prec = psi.eval_prec();
    let table = c.demap_table();
    let weights: Vec<Float> = (0..q).map(|i| psi.weight_float(i, prec)).collect();
    let rows = c
        .points()
        .iter()
        .map(|&x| {
            let mut row = vec![Float::new(prec); alphabet as usize];
            for (e, w) in weights.iter().enumerate() {
                if !w.is_zero() {
                    let y = (x as usize + e) % q;
                    row[table[y] as usize] += w;
                }
            }
            row
        })
        .collect();
    Ok(rows)
}

/// `I(X; Y)` in bits for uniform `X` over the rows of `t`.
pub fn uniform_mutual_information(t: &[Vec<Float>]) -> Float {
    let prec = t[0][0].prec();
    let rows = t.len() as u32;
    let cols = t[0].len();
    let mut out = vec![Float::new(prec); cols];
    for row in t {
        for (o, w) in out.iter_mut().zip(row) {
            *o += w;
        }
    }
    for o in &mut out {
        *o /= rows;
    }
    let mut info = Float::new(prec);
    for row in t {
        for (w, o) in row.iter().zip(&out) {
            if !w.is_zero() {
                let ratio = Float::with_val(prec, w / o);
                info += Float::with_val(prec, w * Float::with_val(prec, ratio.log2_ref()));
            }
        }
    }
    info / rows
}

/// `n I(X; Y)` for the hard-decision (quantized) channel with uniform input.
pub fn quantized_capacity_lower_bound(psi: &Pmf, alphabet: u32, n: usize) -> Result<CapacityBound> {
    let t = transition_matrix(psi, alphabet)?;
    Ok(CapacityBound::new(uniform_mutual_information(&t), n))
}

/// Output of [`optimize_input`].
#[derive(Debug, Clone)]
pub struct OptimizedInput {
    pub distribution: Vec<f64>,
    /// Mutual information of `distribution`, in bits.
    pub mutual_info: f64,
    /// Mutual information of the uniform input, in bits.
    pub uniform_info: f64,
    /// Final gap between the upper and lower capacity estimates.
    pub gap: f64,
    pub iterations: usize,
}

/// Blahut–Arimoto on the unquantized component channel `x_j -> x_j + e`,
/// started from the uniform input. Runs in `f64`: weights below the
/// subnormal range contribute nothing at that resolution.
pub fn optimize_input(psi: &Pmf, alphabet: u32, iterations: usize, tolerance: f64) -> Result<OptimizedInput> {
    if iterations == 0 {
        return Err(Error::Domain("iterations must be >= 1".into()));
    }
    let c = Constellation::new(psi.q(), alphabet)?;
    let q = psi.q() as usize;
    let w: Vec<f64> = (0..q).map(|i| psi.weight_f64(i)).collect();
    let support: Vec<usize> = (0..q).filter(|&i| w[i] > 0.0).collect();
    let nx = alphabet as usize;
    let mut p = vec![1.0 / nx as f64; nx];
    let mut out = vec![0.0; q];
    let mut divergences = vec![0.0; nx];

    let step = |p: &[f64], out: &mut [f64], dv: &mut [f64]| -> (f64, f64) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &x) in c.points().iter().enumerate() {
            for &e in &support {
                out[(x as usize + e) % q] += p[j] * w[e];
            }
        }
        for (j, &x) in c.points().iter().enumerate() {
            dv[j] = support
                .iter()
                .map(|&e| w[e] * (w[e] / out[(x as usize + e) % q]).log2())
                .sum();
        }
        let lower: f64 = p.iter().zip(dv.iter()).map(|(a, b)| a * b).sum();
        let upper = dv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lower, upper)
    };

    let (uniform_info, mut upper) = step(&p, &mut out, &mut divergences);
    let mut lower = uniform_info;
    let mut best = (lower, p.clone());
    for it in 1..=iterations {
        if upper - lower < tolerance {
            return Ok(OptimizedInput {
                distribution: best.1,
                mutual_info: best.0,
                uniform_info,
                gap: upper - lower,
                iterations: it - 1,
            });
        }
        let mut z = 0.0;
        for (pj, dj) in p.iter_mut().zip(&divergences) {
            *pj *= dj.exp2();
            z += *pj;
        }
        p.iter_mut().for_each(|pj| *pj /= z);
        (lower, upper) = step(&p, &mut out, &mut divergences);
        if lower > best.0 {
            best = (lower, p.clone());
        }
    }
    if upper - lower < tolerance {
        return Ok(OptimizedInput {
            distribution: best.1,
            mutual_info: best.0,
            uniform_info,
            gap: upper - lower,
            iterations,
        });
    }
    Err(Error::NotConverged {
        iterations,
        best_bits: best.0,
        gap: upper - lower,
    })
}

/// Plaintext bits per ciphertext bit at `rate` bits per coefficient.
pub fn plaintext_per_ciphertext(rate: f64, param: &ParamSet) -> Result<f64> {
    if rate.is_nan() || rate < 0.0 {
        return Err(Error::Domain(format!("rate {rate} must be >= 0")));
    }
    let bits = param.ciphertext_bits_per_coeff();
    if bits == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(rate / f64::from(bits))
}

/// Channel analysis of one parameter set at one alphabet size.
#[derive(Debug, Clone)]
pub struct ChannelReport {
    pub scheme: String,
    pub alphabet: u32,
    pub pr_e_log2: Float,
    pub cap_full: CapacityBound,
    pub cap_quant: CapacityBound,
    pub plain_per_cipher_full: f64,
    pub plain_per_cipher_quant: f64,
}

impl ChannelReport {
    pub fn bits_per_coeff(&self) -> f64 {
        self.cap_full.per_coeff.to_f64()
    }
}

pub fn analyze_channel(param: &ParamSet, psi: &Pmf, alphabet: u32) -> Result<ChannelReport> {
    if psi.q() != param.q {
        return Err(Error::Mismatch(format!(
            "psi is over Z_{} but q = {}",
            psi.q(),
            param.q
        )));
    }
    let cap_full = capacity_lower_bound(psi, alphabet, param.n)?;
    let cap_quant = quantized_capacity_lower_bound(psi, alphabet, param.n)?;
    Ok(ChannelReport {
        scheme: param.name.clone(),
        alphabet,
        pr_e_log2: coeff_failure_log2(psi, alphabet)?,
        plain_per_cipher_full: plaintext_per_ciphertext(cap_full.per_coeff.to_f64(), param)?,
        plain_per_cipher_quant: plaintext_per_ciphertext(cap_quant.per_coeff.to_f64(), param)?,
        cap_full,
        cap_quant,
    })
}

/// `log2` of a probability as `f64`, `-inf` for zero.
pub fn prob_log2(p: &Float) -> f64 {
    log2_of(p)
}
