//! Arithmetic in `Z_q` and `R_q = Z_q[x]/(x^n + 1)` plus seeded samplers.

use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::params::ParamSet;
use crate::{Error, Result};

/// Centered representative of `z mod q` in `[-floor(q/2), floor(q/2)]`
/// (for even `q`, `q/2` maps to `+q/2`).
pub fn center(z: u32, q: u32) -> i64 {
    let z = i64::from(z % q);
    let q = i64::from(q);
    if z > q / 2 {
        z - q
    } else {
        z
    }
}

/// Reduces a signed integer into `[0, q-1]`.
pub fn reduce(z: i64, q: u32) -> u32 {
    z.rem_euclid(i64::from(q)) as u32
}

/// Lee distance `min(|x-y|, q-|x-y|)` on `Z_q`.
pub fn lee_distance(x: u32, y: u32, q: u32) -> u32 {
    let d = x.abs_diff(y) % q;
    d.min(q - d)
}

/// A polynomial in `R_q`, coefficients reduced into `[0, q-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    q: u32,
    coeffs: Vec<u32>,
}

impl RingElement {
    pub fn zero(n: usize, q: u32) -> Self {
        RingElement { q, coeffs: vec![0; n] }
    }

    pub fn one(n: usize, q: u32) -> Self {
        let mut e = Self::zero(n, q);
        e.coeffs[0] = 1;
        e
    }

    /// Builds an element from arbitrary integers, reducing each mod `q`.
    pub fn from_signed(coeffs: &[i64], q: u32) -> Self {
        RingElement {
            q,
            coeffs: coeffs.iter().map(|&c| reduce(c, q)).collect(),
        }
    }

    pub fn from_coeffs(coeffs: Vec<u32>, q: u32) -> Result<Self> {
        if let Some(&c) = coeffs.iter().find(|&&c| c >= q) {
            return Err(Error::Domain(format!("coefficient {c} not reduced mod {q}")));
        }
        Ok(RingElement { q, coeffs })
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.q != other.q || self.n() != other.n() {
            return Err(Error::Mismatch(format!(
                "ring elements over (n={}, q={}) and (n={}, q={})",
                self.n(),
                self.q,
                other.n(),
                other.q
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let q = self.q;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((u64::from(a) + u64::from(b)) % u64::from(q)) as u32)
            .collect();
        Ok(RingElement { q, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// Schoolbook negacyclic product:
    /// `c_k = sum_{i<=k} a_i b_{k-i} - sum_{i>k} a_i b_{n+k-i}`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.n();
        let q = u64::from(self.q);
        // Raw products fit when n (q-1)^2 does; otherwise reduce each one.
        let lazy = (q - 1)
            .checked_mul(q - 1)
            .and_then(|m| m.checked_mul(n as u64))
            .is_some();
        let mut pos = vec![0u64; n];
        let mut neg = vec![0u64; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = u64::from(a);
            let (low, high) = other.coeffs.split_at(n - i);
            if lazy {
                for (slot, &b) in pos[i..].iter_mut().zip(low) {
                    *slot += a * u64::from(b);
                }
                for (slot, &b) in neg.iter_mut().zip(high) {
                    *slot += a * u64::from(b);
                }
            } else {
                for (slot, &b) in pos[i..].iter_mut().zip(low) {
                    *slot += a * u64::from(b) % q;
                }
                for (slot, &b) in neg.iter_mut().zip(high) {
                    *slot += a * u64::from(b) % q;
                }
            }
        }
        let coeffs = pos
            .iter()
            .zip(&neg)
            .map(|(&p, &m)| ((p % q + q - m % q) % q) as u32)
            .collect();
        Ok(RingElement { q: self.q, coeffs })
    }

    /// Multiplies every coefficient by a scalar.
    pub fn scale(&self, c: u32) -> Self {
        let q = u64::from(self.q);
        RingElement {
            q: self.q,
            coeffs: self
                .coeffs
                .iter()
                .map(|&a| (u64::from(a) * u64::from(c) % q) as u32)
                .collect(),
        }
    }

    /// Applies `f` coefficientwise.
    pub fn map(&self, f: impl Fn(u32) -> u32) -> Self {
        RingElement {
            q: self.q,
            coeffs: self.coeffs.iter().map(|&c| f(c) % self.q).collect(),
        }
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.map(|c| if c == 0 { 0 } else { self.q - c })
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    /// Panics on mismatched rings; use [`RingElement::try_add`] for a `Result`.
    fn add(self, rhs: &RingElement) -> RingElement {
        self.try_add(rhs).expect("ring elements over the same ring")
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self.try_sub(rhs).expect("ring elements over the same ring")
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        self.try_mul(rhs).expect("ring elements over the same ring")
    }
}

/// An element of `R_q^l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingVector {
    pub elems: Vec<RingElement>,
}

impl RingVector {
    pub fn zero(l: usize, n: usize, q: u32) -> Self {
        RingVector {
            elems: vec![RingElement::zero(n, q); l],
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// `a^T b`, summed in `R_q`.
    pub fn dot(&self, other: &RingVector) -> Result<RingElement> {
        if self.len() != other.len() || self.is_empty() {
            return Err(Error::Mismatch(format!(
                "vector lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        let mut acc = self.elems[0].try_mul(&other.elems[0])?;
        for (a, b) in self.elems.iter().zip(&other.elems).skip(1) {
            acc = acc.try_add(&a.try_mul(b)?)?;
        }
        Ok(acc)
    }

    pub fn try_add(&self, other: &RingVector) -> Result<RingVector> {
        if self.len() != other.len() {
            return Err(Error::Mismatch(format!(
                "vector lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        let elems = self
            .elems
            .iter()
            .zip(&other.elems)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Ok(RingVector { elems })
    }
}

/// A square `l x l` matrix over `R_q`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMatrix {
    pub rows: Vec<RingVector>,
}

impl RingMatrix {
    /// `A v`.
    pub fn mul_vec(&self, v: &RingVector) -> Result<RingVector> {
        let elems = self.rows.iter().map(|row| row.dot(v)).collect::<Result<_>>()?;
        Ok(RingVector { elems })
    }

    /// `A^T v`.
    pub fn transpose_mul_vec(&self, v: &RingVector) -> Result<RingVector> {
        let l = self.rows.len();
        let cols = (0..l)
            .map(|j| RingVector {
                elems: self.rows.iter().map(|row| row.elems[j].clone()).collect(),
            })
            .collect::<Vec<_>>();
        let elems = cols.iter().map(|c| c.dot(v)).collect::<Result<_>>()?;
        Ok(RingVector { elems })
    }
}

/// Seed for the deterministic sampling stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub [u8; 32]);

impl Seed {
    pub fn from_u64(x: u64) -> Self {
        let mut bytes = [0u8; 32];
        bytes[..8].copy_from_slice(&x.to_le_bytes());
        Seed(bytes)
    }

    /// Parses up to 64 hex digits (optionally `0x`-prefixed); shorter seeds
    /// are right-aligned into the 32-byte seed.
    pub fn from_hex(text: &str) -> Result<Self> {
        let digits = text.trim().trim_start_matches("0x");
        if digits.is_empty() || digits.len() > 64 {
            return Err(Error::Parse(format!("seed `{text}` must have 1..=64 hex digits")));
        }
        let padded = format!("{digits:0>64}");
        let mut bytes = [0u8; 32];
        hex::decode_to_slice(&padded, &mut bytes).map_err(|e| Error::Parse(format!("seed `{text}`: {e}")))?;
        Ok(Seed(bytes))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

/// Seeded sampler over ChaCha20.
///
/// Stream layout: every sampled polynomial consumes its coefficients in
/// index order (coefficient-major). A centered binomial coefficient consumes
/// one `u64` word: bits `0..k` are the positive bits, bits `k..2k` the
/// negative ones. A uniform coefficient is drawn with `gen_range(0..q)`.
/// Independent workers use the same key on distinct ChaCha streams.
pub struct Sampler {
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn new(seed: Seed) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: Seed, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::from_seed(seed.0);
        rng.set_stream(stream);
        Sampler { rng }
    }

    /// One draw from `chi_k`: `sum_{i<k} (a_i - b_i)` with fair bits.
    pub fn cbd_value(&mut self, k: u32) -> i64 {
        debug_assert!(k <= 32);
        let word = self.rng.next_u64();
        let mask = if k == 32 { u32::MAX as u64 } else { (1u64 << k) - 1 };
        let pos = (word & mask).count_ones() as i64;
        let neg = ((word >> k) & mask).count_ones() as i64;
        pos - neg
    }

    pub fn cbd(&mut self, k: u32, n: usize, q: u32) -> RingElement {
        let coeffs = (0..n).map(|_| reduce(self.cbd_value(k), q)).collect();
        RingElement { q, coeffs }
    }

    pub fn uniform(&mut self, n: usize, q: u32) -> RingElement {
        let coeffs = (0..n).map(|_| self.rng.gen_range(0..q)).collect();
        RingElement { q, coeffs }
    }

    pub fn cbd_vector(&mut self, k: u32, l: usize, n: usize, q: u32) -> RingVector {
        RingVector {
            elems: (0..l).map(|_| self.cbd(k, n, q)).collect(),
        }
    }

    pub fn uniform_matrix(&mut self, l: usize, n: usize, q: u32) -> RingMatrix {
        RingMatrix {
            rows: (0..l)
                .map(|_| RingVector {
                    elems: (0..l).map(|_| self.uniform(n, q)).collect(),
                })
                .collect(),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }
}

/// Samples one polynomial from `chi_k(R_q)`.
pub fn sample_cbd(param: &ParamSet, seed: Seed) -> RingElement {
    Sampler::new(seed).cbd(param.k, param.n, param.q)
}

/// Samples one polynomial uniformly from `R_q`.
pub fn sample_uniform(param: &ParamSet, seed: Seed) -> RingElement {
    Sampler::new(seed).uniform(param.n, param.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn el(c: &[i64], q: u32) -> RingElement {
        RingElement::from_signed(c, q)
    }

    #[test]
    fn addition_examples() {
        let q = 5;
        let a = el(&[1, 2], q);
        assert_eq!(&a + &RingElement::zero(2, q), a);
        assert_eq!(&el(&[4, 4], q) + &el(&[1, 1], q), RingElement::zero(2, q));
        assert_eq!(&a + &el(&[4, 4], q), el(&[0, 1], q));
    }

    #[test]
    fn multiplication_examples() {
        let a = el(&[3, 1, 4, 1], 17);
        assert_eq!(&a * &RingElement::one(4, 17), a);
        let x = el(&[0, 1], 17);
        assert_eq!(&x * &x, el(&[16, 0], 17));
        // (1 + x^3)(1 + x) = 1 + x + x^3 + x^4 = x + x^3 mod x^4 + 1
        let lhs = el(&[1, 0, 0, 1], 17);
        let rhs = el(&[1, 1, 0, 0], 17);
        assert_eq!(&lhs * &rhs, el(&[0, 1, 0, 1], 17));
    }

    #[test]
    fn mismatched_rings_rejected() {
        let a = RingElement::zero(4, 17);
        let b = RingElement::zero(4, 13);
        assert!(matches!(a.try_mul(&b), Err(Error::Mismatch(_))));
        assert!(matches!(a.try_add(&RingElement::zero(2, 17)), Err(Error::Mismatch(_))));
    }

    #[test]
    fn centering() {
        assert_eq!(center(0, 17), 0);
        assert_eq!(center(8, 17), 8);
        assert_eq!(center(9, 17), -8);
        assert_eq!(center(16, 17), -1);
        assert_eq!(lee_distance(1, 16, 17), 2);
        assert_eq!(lee_distance(3072, 0, 12289), 3072);
    }

    /// Evaluates at the four roots of x^4 + 1 over Z_17 (the elements of
    /// order 8: 2, 8, 9, 15) and compares pointwise products.
    fn eval(a: &RingElement, x: u64) -> u64 {
        a.coeffs()
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * x + u64::from(c)) % 17)
    }

    proptest! {
        #[test]
        fn mul_matches_root_evaluation(a in prop::collection::vec(0i64..17, 4), b in prop::collection::vec(0i64..17, 4)) {
            let (a, b) = (el(&a, 17), el(&b, 17));
            let c = &a * &b;
            for root in [2u64, 8, 9, 15] {
                prop_assert_eq!(eval(&c, root), eval(&a, root) * eval(&b, root) % 17);
            }
        }

        #[test]
        fn ring_laws(a in prop::collection::vec(0i64..97, 8), b in prop::collection::vec(0i64..97, 8), c in prop::collection::vec(0i64..97, 8)) {
            let (a, b, c) = (el(&a, 97), el(&b, 97), el(&c, 97));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
        }
    }

    #[test]
    fn cbd_values_in_range_and_deterministic() {
        let p = crate::params::builtin("newhope1024").unwrap();
        let a = sample_cbd(&p, Seed::from_u64(7));
        assert_eq!(a, sample_cbd(&p, Seed::from_u64(7)));
        assert!(a.coeffs().iter().all(|&c| center(c, p.q).abs() <= 8));
        let u = sample_uniform(&p, Seed::from_u64(7));
        assert_eq!(u, sample_uniform(&p, Seed::from_u64(7)));
        assert_ne!(u, sample_uniform(&p, Seed::from_u64(8)));
    }

    #[test]
    fn cbd_zero_frequency_k1() {
        // chi_1 = {-1: 1/4, 0: 1/2, 1: 1/4}; 10^6 draws, 3 sigma = 0.0015.
        let mut s = Sampler::new(Seed::from_u64(1));
        let draws = 1_000_000;
        let zeros = (0..draws).filter(|_| s.cbd_value(1) == 0).count();
        let frac = zeros as f64 / draws as f64;
        let sigma = (0.25f64 / draws as f64).sqrt();
        assert!((frac - 0.5).abs() < 3.0 * sigma, "{frac}");
    }

    #[test]
    fn uniform_mean_and_chi_square() {
        let q = 17u32;
        let draws = 1_000_000usize;
        let mut s = Sampler::new(Seed::from_u64(2));
        let mut counts = vec![0u64; q as usize];
        let mut sum = 0f64;
        for _ in 0..draws {
            let v = s.rng().gen_range(0..q);
            counts[v as usize] += 1;
            sum += f64::from(v);
        }
        let mean = sum / draws as f64;
        let var = (f64::from(q * q) - 1.0) / 12.0;
        assert!((mean - 8.0).abs() < 3.0 * (var / draws as f64).sqrt(), "{mean}");
        let expected = draws as f64 / f64::from(q);
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // Upper 10^-3 quantile of chi-square with 16 degrees of freedom.
        assert!(chi2 < 39.252, "{chi2}");
    }

    #[test]
    fn seed_hex() {
        let s = Seed::from_hex("0x01ff").unwrap();
        assert_eq!(s.0[31], 0xff);
        assert_eq!(s.0[30], 0x01);
        assert_eq!(Seed::from_hex(&s.to_hex()).unwrap(), s);
        assert!(Seed::from_hex("zz").is_err());
    }
}
