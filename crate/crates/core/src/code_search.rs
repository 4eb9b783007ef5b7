//! Gilbert–Varshamov and BCH parameter search under failure-rate
//! constraints.
//!
//! BCH dimensions come from cyclotomic cosets: a code of length `n_b` over
//! `GF(Q)` whose generator has the `d - 1` consecutive roots
//! `beta^b, ..., beta^(b+d-2)` has dimension `n_b - |union of the cosets of
//! b..b+d-2 under multiplication by Q mod n_b|`.

use rug::{Float, Integer};
use serde::Serialize;

use crate::channel::{coeff_failure_bound, dfr_tails, find_min_distance, plaintext_per_ciphertext};
use crate::params::ParamSet;
use crate::pmf::Pmf;
use crate::{Error, Result};

/// Largest `k` with `Q^(n-k) > sum_{i=0}^{d-2} C(n-1, i) (Q-1)^i`.
pub fn gv_max_dimension(n: usize, d: usize, q_alphabet: u32) -> Result<usize> {
    if d == 0 || d > n || q_alphabet < 2 {
        return Err(Error::Domain(format!(
            "GV search needs 1 <= d <= n and Q >= 2 (n = {n}, d = {d}, Q = {q_alphabet})"
        )));
    }
    let mut sum = Integer::new();
    let mut power = Integer::from(1);
    for i in 0..d.saturating_sub(1) {
        sum += Integer::from(n as u32 - 1).binomial(i as u32) * &power;
        power *= q_alphabet - 1;
    }
    let mut redundancy = 0usize;
    let mut qr = Integer::from(1);
    while qr <= sum {
        qr *= q_alphabet;
        redundancy += 1;
    }
    if redundancy >= n {
        return Err(Error::NoGvDimension { n, d, q_alphabet });
    }
    Ok(n - redundancy)
}

/// `(p, m)` with `Q = p^m`.
pub fn prime_power(q_alphabet: u32) -> Result<(u32, u32)> {
    if q_alphabet < 2 {
        return Err(Error::NotPrimePower(q_alphabet));
    }
    let p = (2..=q_alphabet)
        .find(|p| q_alphabet.is_multiple_of(*p))
        .expect("q >= 2");
    let mut rest = q_alphabet;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q_alphabet));
    }
    Ok((p, m))
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Coset index of every residue mod `n_b` and the size of every coset.
pub fn cyclotomic_cosets(n_b: usize, q_alphabet: u32) -> (Vec<usize>, Vec<usize>) {
    let mut id = vec![usize::MAX; n_b];
    let mut sizes = Vec::new();
    let q = q_alphabet as usize % n_b.max(1);
    for start in 0..n_b {
        if id[start] != usize::MAX {
            continue;
        }
        let c = sizes.len();
        let mut x = start;
        let mut size = 0;
        while id[x] == usize::MAX {
            id[x] = c;
            size += 1;
            x = x * q % n_b;
        }
        sizes.push(size);
    }
    (id, sizes)
}

/// Dimension of the length-`n_b` BCH code over `GF(Q)` with the roots
/// `beta^b .. beta^(b + d - 2)`.
pub fn bch_dimension(n_b: usize, q_alphabet: u32, d: usize, b: usize) -> usize {
    let (id, sizes) = cyclotomic_cosets(n_b, q_alphabet);
    let mut seen = vec![false; sizes.len()];
    let mut used = 0;
    for i in b..b + d.saturating_sub(1) {
        let c = id[i % n_b];
        if !seen[c] {
            seen[c] = true;
            used += sizes[c];
        }
    }
    n_b - used
}

/// Which consecutive root windows are considered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BchConvention {
    /// Roots start at `beta^1`.
    NarrowSense,
    /// Any starting exponent `b`; the best one is taken.
    BestOffset,
}

impl BchConvention {
    pub fn label(self) -> &'static str {
        match self {
            BchConvention::NarrowSense => "narrow-sense",
            BchConvention::BestOffset => "best-offset",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BchCode {
    pub n: usize,
    pub k: usize,
    /// First root exponent `b`.
    pub offset: usize,
}

/// Sliding window over all `n_b` offsets: the largest dimension for a window
/// of `w` consecutive exponents and the smallest offset reaching it.
fn best_window(id: &[usize], sizes: &[usize], w: usize) -> (usize, usize) {
    let n_b = id.len();
    if w == 0 {
        return (n_b, 0);
    }
    let mut count = vec![0usize; sizes.len()];
    let mut used = 0;
    for i in 0..w {
        let c = id[i % n_b];
        if count[c] == 0 {
            used += sizes[c];
        }
        count[c] += 1;
    }
    let mut best = (used, 0);
    for b in 1..n_b {
        let out = id[(b - 1) % n_b];
        count[out] -= 1;
        if count[out] == 0 {
            used -= sizes[out];
        }
        let inc = id[(b + w - 1) % n_b];
        if count[inc] == 0 {
            used += sizes[inc];
        }
        count[inc] += 1;
        if used < best.0 {
            best = (used, b);
        }
    }
    (n_b - best.0, best.1)
}

/// Best code of length `n_b` with designed distance `d` under `conv`.
pub fn bch_code_for_length(n_b: usize, q_alphabet: u32, d: usize, conv: BchConvention) -> BchCode {
    match conv {
        BchConvention::NarrowSense => BchCode {
            n: n_b,
            k: bch_dimension(n_b, q_alphabet, d, 1),
            offset: 1,
        },
        BchConvention::BestOffset => {
            let (id, sizes) = cyclotomic_cosets(n_b, q_alphabet);
            let (k, offset) = best_window(&id, &sizes, d.saturating_sub(1));
            BchCode { n: n_b, k, offset }
        }
    }
}

fn admissible_lengths(n_max: usize, min_len: usize, q_alphabet: u32) -> Result<impl Iterator<Item = usize>> {
    let (p, _) = prime_power(q_alphabet)?;
    Ok((min_len.max(2)..=n_max)
        .rev()
        .filter(move |&nb| gcd(nb, p as usize) == 1))
}

/// The BCH code of length at most `n_max` and designed distance `d` with the
/// largest dimension (ties: the longer code).
pub fn bch_search(n_max: usize, d: usize, q_alphabet: u32, conv: BchConvention) -> Result<BchCode> {
    if d == 0 {
        return Err(Error::Domain("designed distance must be >= 1".into()));
    }
    let mut best: Option<BchCode> = None;
    for nb in admissible_lengths(n_max, d, q_alphabet)? {
        let code = bch_code_for_length(nb, q_alphabet, d, conv);
        if best.is_none_or(|b| code.k > b.k) {
            best = Some(code);
        }
    }
    best.ok_or(Error::NoAdmissibleLength { n_max, q_alphabet, d })
}

/// Longest window of consecutive root exponents keeping the dimension at
/// least `k_min`; returns `(designed distance, offset)`.
pub fn max_designed_distance(n_b: usize, q_alphabet: u32, k_min: usize, conv: BchConvention) -> Option<(usize, usize)> {
    if k_min > n_b {
        return None;
    }
    let budget = n_b - k_min;
    let (id, sizes) = cyclotomic_cosets(n_b, q_alphabet);
    let mut count = vec![0usize; sizes.len()];
    let starts: Vec<usize> = match conv {
        BchConvention::NarrowSense => vec![1],
        BchConvention::BestOffset => (0..n_b).collect(),
    };
    // Two pointers over the window [b, e) of absolute exponents.
    let mut used = 0;
    let mut e = starts[0];
    let mut best = (0usize, starts[0]);
    for &b in &starts {
        if e < b {
            e = b;
        }
        while e - b < n_b {
            let c = id[e % n_b];
            let add = if count[c] == 0 { sizes[c] } else { 0 };
            if used + add > budget {
                break;
            }
            count[c] += 1;
            used += add;
            e += 1;
        }
        if e - b > best.0 {
            best = (e - b, b);
        }
        if e > b {
            let c = id[b % n_b];
            count[c] -= 1;
            if count[c] == 0 {
                used -= sizes[c];
            }
        }
    }
    Some((best.0 + 1, best.1))
}

/// One row of a rate-maximisation table.
#[derive(Debug, Clone)]
pub struct CodeSearchResult {
    pub scheme: String,
    pub alphabet: u32,
    /// Required minimum distance.
    pub d: usize,
    pub k_gv: usize,
    pub r_gv: f64,
    /// `None` when no code is needed (`d = 1`).
    pub bch: Option<BchCode>,
    pub r_bch: Option<f64>,
    /// The same search under the other root convention, for comparison.
    pub bch_alternative: Option<BchCode>,
    pub pr_e_log2: Float,
    /// Block failure bound at `t = (d - 1) / 2`.
    pub dfr_log2: Float,
    /// Plaintext per ciphertext bit at the BCH rate, or the GV rate when no
    /// code is used.
    pub plain_per_cipher: f64,
    pub convention: BchConvention,
}

fn rate(k: usize, n: usize, q_alphabet: u32) -> f64 {
    k as f64 / n as f64 * f64::from(q_alphabet).log2()
}

fn other(conv: BchConvention) -> BchConvention {
    match conv {
        BchConvention::NarrowSense => BchConvention::BestOffset,
        BchConvention::BestOffset => BchConvention::NarrowSense,
    }
}

/// For each `Q`: the smallest `d` meeting the failure target, the GV
/// dimension at that `d`, and the best BCH code reaching it.
pub fn maximize_rate_for_dfr(
    param: &ParamSet,
    psi: &Pmf,
    alphabets: &[u32],
    target_log2: f64,
    conv: BchConvention,
) -> Result<Vec<CodeSearchResult>> {
    let n = param.n;
    alphabets
        .iter()
        .map(|&qa| {
            let md = find_min_distance(psi, qa, n, target_log2)?;
            let k_gv = gv_max_dimension(n, md.d, qa)?;
            let r_gv = rate(k_gv, n, qa);
            let (bch, alt) = if md.d > 1 {
                (
                    Some(bch_search(n, md.d, qa, conv)?),
                    Some(bch_search(n, md.d, qa, other(conv))?),
                )
            } else {
                (None, None)
            };
            let r_bch = bch.map(|c| rate(c.k, n, qa));
            let plain_per_cipher = plaintext_per_ciphertext(r_bch.unwrap_or(r_gv), param)?;
            let prec = md.pr_e.prec();
            Ok(CodeSearchResult {
                scheme: param.name.clone(),
                alphabet: qa,
                d: md.d,
                k_gv,
                r_gv,
                bch,
                r_bch,
                bch_alternative: alt,
                pr_e_log2: Float::with_val(prec, md.pr_e.log2_ref()),
                dfr_log2: md.dfr_log2,
                plain_per_cipher,
                convention: conv,
            })
        })
        .collect()
}

/// One row of the failure-minimisation table.
#[derive(Debug, Clone)]
pub struct MinDfrResult {
    pub scheme: String,
    pub alphabet: u32,
    /// Smallest dimension meeting the rate over `n` coefficients.
    pub k_min: usize,
    /// Largest designed distance reachable at that rate.
    pub d: usize,
    /// `None` when the uncoded channel already meets the rate.
    pub code: Option<BchCode>,
    /// `d` under the other root convention.
    pub d_alternative: usize,
    pub dfr_log2: Float,
    pub convention: BchConvention,
}

/// Smallest `k` with `k log2(Q) / n >= rate`.
fn min_dimension(n: usize, q_alphabet: u32, min_rate: f64) -> usize {
    let lq = f64::from(q_alphabet).log2();
    let mut k = ((min_rate * n as f64 / lq) - 1e-9).ceil().max(0.0) as usize;
    while rate(k, n, q_alphabet) < min_rate - 1e-12 {
        k += 1;
    }
    k
}

/// Largest designed distance over all admissible lengths at rate
/// `min_rate`; `d = 1` means the uncoded channel suffices.
fn largest_distance(
    n: usize,
    q_alphabet: u32,
    min_rate: f64,
    conv: BchConvention,
) -> Result<(usize, usize, Option<BchCode>)> {
    let k_min = min_dimension(n, q_alphabet, min_rate);
    let mut best: Option<(usize, BchCode)> = None;
    for nb in admissible_lengths(n, k_min, q_alphabet)? {
        if let Some((d, b)) = max_designed_distance(nb, q_alphabet, k_min, conv) {
            if d > 1 && best.is_none_or(|(bd, _)| d > bd) {
                let k = bch_dimension(nb, q_alphabet, d, b);
                best = Some((d, BchCode { n: nb, k, offset: b }));
            }
        }
    }
    let uncoded = k_min <= n;
    match best {
        Some((d, code)) => Ok((k_min, d, Some(code))),
        None if uncoded => Ok((k_min, 1, None)),
        None => Err(Error::RateUnreachable {
            n_max: n,
            rate: min_rate,
        }),
    }
}

/// For each `Q`: the largest BCH designed distance that still carries
/// `min_rate` bits per coefficient, and the resulting failure bound.
pub fn minimize_dfr_for_rate(
    param: &ParamSet,
    psi: &Pmf,
    alphabets: &[u32],
    min_rate: f64,
    conv: BchConvention,
) -> Result<Vec<MinDfrResult>> {
    let n = param.n;
    alphabets
        .iter()
        .map(|&qa| {
            let (k_min, d, code) = largest_distance(n, qa, min_rate, conv)?;
            let (_, d_alternative, _) = largest_distance(n, qa, min_rate, other(conv))?;
            let pr_e = coeff_failure_bound(psi, qa)?;
            let tails = dfr_tails(&pr_e, n)?;
            let tail = &tails[(d - 1) / 2];
            Ok(MinDfrResult {
                scheme: param.name.clone(),
                alphabet: qa,
                k_min,
                d,
                code,
                d_alternative,
                dfr_log2: Float::with_val(pr_e.prec(), tail.log2_ref()),
                convention: conv,
            })
        })
        .collect()
}
