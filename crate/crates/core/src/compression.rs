//! Coefficient compression `comp_q(z, d)` / `decomp_q(z', d)` and the law of
//! the rounding error it introduces.

use std::collections::BTreeMap;

use crate::pmf::Pmf;
use crate::{Error, Result};

/// `floor((2 num + den) / (2 den))`, i.e. `num/den` rounded half up.
fn round_half_up(num: u64, den: u64) -> u64 {
    (2 * num + den) / (2 * den)
}

fn check(d: u32, q: u32) -> Result<()> {
    if d == 0 || d >= 32 || (1u64 << d) >= u64::from(q) {
        return Err(Error::Domain(format!(
            "compression needs 1 <= d and 2^d < q (d = {d}, q = {q})"
        )));
    }
    Ok(())
}

/// `round(z * 2^d / q) mod 2^d`.
pub fn compress(z: u32, d: u32, q: u32) -> Result<u32> {
    check(d, q)?;
    if z >= q {
        return Err(Error::Domain(format!("z = {z} outside [0, {q})")));
    }
    let r = round_half_up(u64::from(z) << d, u64::from(q));
    Ok((r & ((1u64 << d) - 1)) as u32)
}

/// `round(z' * q / 2^d)`.
pub fn decompress(z: u32, d: u32, q: u32) -> Result<u32> {
    check(d, q)?;
    if u64::from(z) >= 1u64 << d {
        return Err(Error::Domain(format!("z' = {z} outside [0, 2^{d})")));
    }
    Ok(round_half_up(u64::from(z) * u64::from(q), 1u64 << d) as u32)
}

/// `decomp(comp(z))`, or `z` itself when `d = 0`.
pub fn round_trip(z: u32, d: u32, q: u32) -> Result<u32> {
    if d == 0 {
        return Ok(z);
    }
    decompress(compress(z, d, q)?, d, q)
}

/// The classes `Z_j = { z : decomp(comp(z)) = j }`, keyed by reproduction
/// value `j`.
pub fn preimage_partition(d: u32, q: u32) -> Result<BTreeMap<u32, Vec<u32>>> {
    check(d, q)?;
    let mut parts: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for z in 0..q {
        parts.entry(round_trip(z, d, q)?).or_default().push(z);
    }
    Ok(parts)
}

/// Exact law of the compression error `decomp(comp(z)) - z mod q` for `z`
/// uniform on `Z_q`. `d = 0` gives the point mass at 0.
pub fn compression_noise_pmf(d: u32, q: u32) -> Result<Pmf> {
    if q < 3 {
        return Err(Error::Domain(format!("q = {q} must be >= 3")));
    }
    if d == 0 {
        return Ok(Pmf::point(q, 0, crate::pmf::Backend::Exact));
    }
    check(d, q)?;
    let mut counts = vec![0u64; q as usize];
    for z in 0..q {
        let c = (round_trip(z, d, q)? + q - z) % q;
        counts[c as usize] += 1;
    }
    Pmf::from_counts(q, &counts)
}
