//! Backend-generic cyclic kernels over weight slices.

use rayon::prelude::*;
use rug::{Float, Rational};

pub(crate) trait Weight: Clone + Send + Sync {
    fn is_zero(&self) -> bool;
    /// A zero carrying the same precision as `self`.
    fn zero_like(&self) -> Self;
    fn add_mul(&mut self, a: &Self, b: &Self);
    fn add_assign(&mut self, a: &Self);
    fn mul_u32(&mut self, k: u32);
    fn div_u32(&mut self, k: u32);
}

impl Weight for Rational {
    fn is_zero(&self) -> bool {
        *self.numer() == 0
    }
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += Rational::from(a * b);
    }
    fn add_assign(&mut self, a: &Self) {
        *self += a;
    }
    fn mul_u32(&mut self, k: u32) {
        *self *= k;
    }
    fn div_u32(&mut self, k: u32) {
        *self /= k;
    }
}

impl Weight for Float {
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        // Fused multiply-add, one rounding.
        *self += a * b;
    }
    fn add_assign(&mut self, a: &Self) {
        *self += a;
    }
    fn mul_u32(&mut self, k: u32) {
        *self *= k;
    }
    fn div_u32(&mut self, k: u32) {
        *self /= k;
    }
}

fn support<W: Weight>(w: &[W]) -> Vec<usize> {
    w.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, _)| i)
        .collect()
}

pub(crate) fn support_size<W: Weight>(w: &[W]) -> usize {
    w.iter().filter(|x| !x.is_zero()).count()
}

/// `c(t) = sum_s a(s) b(t - s mod q)`, gathering per output index.
///
/// The outer sum runs over the support of the sparser operand in ascending
/// order, so every output is summed in a fixed order whatever the thread
/// count.
pub(crate) fn convolve<W: Weight>(a: &[W], b: &[W]) -> Vec<W> {
    let q = a.len();
    let (small, big) = if support_size(a) <= support_size(b) {
        (a, b)
    } else {
        (b, a)
    };
    let idx = support(small);
    let zero = a[0].zero_like();
    (0..q)
        .into_par_iter()
        .map(|t| {
            let mut acc = zero.clone();
            for &s in &idx {
                let other = &big[(t + q - s) % q];
                if !other.is_zero() {
                    acc.add_mul(&small[s], other);
                }
            }
            acc
        })
        .collect()
}

/// `a * a`, using the symmetry of the summand pairs to halve the work.
pub(crate) fn square<W: Weight>(a: &[W]) -> Vec<W> {
    let q = a.len();
    let idx = support(a);
    let zero = a[0].zero_like();
    (0..q)
        .into_par_iter()
        .map(|t| {
            let mut pairs = zero.clone();
            let mut diag = zero.clone();
            for &s in &idx {
                let s2 = (t + q - s) % q;
                if s < s2 {
                    if !a[s2].is_zero() {
                        pairs.add_mul(&a[s], &a[s2]);
                    }
                } else if s == s2 {
                    diag.add_mul(&a[s], &a[s]);
                }
            }
            pairs.mul_u32(2);
            pairs.add_assign(&diag);
            pairs
        })
        .collect()
}

/// Law of the product `u * v mod q` of independent draws.
pub(crate) fn product<W: Weight>(a: &[W], b: &[W]) -> Vec<W> {
    let q = a.len() as u64;
    let zero = a[0].zero_like();
    let mut out = vec![zero; a.len()];
    let ib = support(b);
    for u in support(a) {
        for &v in &ib {
            let t = (u as u64 * v as u64 % q) as usize;
            out[t].add_mul(&a[u], &b[v]);
        }
    }
    out
}

/// `(1/Q) sum_j w(x + shifts[j])`.
pub(crate) fn shift_mixture<W: Weight>(w: &[W], shifts: &[usize]) -> Vec<W> {
    let q = w.len();
    let count = shifts.len() as u32;
    (0..q)
        .into_par_iter()
        .map(|x| {
            let mut acc = w[0].zero_like();
            for &s in shifts {
                acc.add_assign(&w[(x + s) % q]);
            }
            acc.div_u32(count);
            acc
        })
        .collect()
}

pub(crate) fn sum<W: Weight>(w: &[W]) -> W {
    let mut acc = w[0].zero_like();
    for x in w {
        acc.add_assign(x);
    }
    acc
}
