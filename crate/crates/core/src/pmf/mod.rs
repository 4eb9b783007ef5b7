//! Probability mass functions over `Z_q`.
//!
//! Weights are held either as exact rationals or as MPFR floats with a fixed
//! mantissa width; MPFR's exponent range is wide enough that masses around
//! `2^-40000` are represented without underflow, so nothing is truncated.

mod io;
mod kernels;

use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::ring::center;
use crate::{Error, Result};
use kernels::Weight;

pub use io::{parse_pmf, read_pmf, render_pmf, write_pmf};

/// Largest support allowed for the smaller operand of [`product_pmf`].
pub const DEFAULT_PRODUCT_SUPPORT_LIMIT: usize = 4096;

/// Precision used when an exact PMF has to be evaluated in floating point
/// (entropy, logarithms).
pub const EXACT_EVAL_PREC: u32 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    /// MPFR floats with the given mantissa width in bits.
    Float(u32),
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Float(p) => write!(f, "float({p})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Weights {
    Exact(Vec<Rational>),
    Float { prec: u32, w: Vec<Float> },
}

/// A distribution on `Z_q`, indexed by residues `0..q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    q: u32,
    weights: Weights,
}

impl Pmf {
    /// Point mass at `x` (any integer, reduced mod `q`).
    pub fn point(q: u32, x: i64, backend: Backend) -> Pmf {
        let idx = x.rem_euclid(i64::from(q)) as usize;
        let mut w = vec![Rational::new(); q as usize];
        w[idx] = Rational::from(1);
        Pmf::from_exact_unchecked(q, w).into_backend(backend)
    }

    pub fn uniform(q: u32, backend: Backend) -> Pmf {
        let w = vec![Rational::from((1, q)); q as usize];
        Pmf::from_exact_unchecked(q, w).into_backend(backend)
    }

    /// Exact PMF from rational weights; they must be nonnegative and sum to 1.
    pub fn from_rationals(q: u32, weights: Vec<Rational>) -> Result<Pmf> {
        check_len(q, weights.len())?;
        if weights.iter().any(|w| *w < 0) {
            return Err(Error::Domain("negative probability weight".into()));
        }
        let total = kernels::sum(&weights);
        if total != 1 {
            return Err(Error::Normalization {
                deviation: (total - 1u32).to_f64().abs(),
            });
        }
        Ok(Pmf::from_exact_unchecked(q, weights))
    }

    /// Exact PMF proportional to integer counts.
    pub fn from_counts(q: u32, counts: &[u64]) -> Result<Pmf> {
        check_len(q, counts.len())?;
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::ZeroDenominator);
        }
        let w = counts
            .iter()
            .map(|&c| Rational::from((Integer::from(c), Integer::from(total))))
            .collect();
        Ok(Pmf::from_exact_unchecked(q, w))
    }

    /// Float PMF from weights of a common precision; renormalised after the
    /// tolerance check.
    pub fn from_floats(q: u32, weights: Vec<Float>) -> Result<Pmf> {
        check_len(q, weights.len())?;
        let prec = weights[0].prec();
        if weights.iter().any(|w| w.prec() != prec) {
            return Err(Error::Mismatch("weights carry mixed precisions".into()));
        }
        if weights
            .iter()
            .any(|w| !w.is_finite() || w.is_sign_negative() && !w.is_zero())
        {
            return Err(Error::Domain("weights must be finite and nonnegative".into()));
        }
        normalized_float(q, prec, weights)
    }

    fn from_exact_unchecked(q: u32, w: Vec<Rational>) -> Pmf {
        Pmf {
            q,
            weights: Weights::Exact(w),
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn backend(&self) -> Backend {
        match &self.weights {
            Weights::Exact(_) => Backend::Exact,
            Weights::Float { prec, .. } => Backend::Float(*prec),
        }
    }

    pub fn exact_weights(&self) -> Option<&[Rational]> {
        match &self.weights {
            Weights::Exact(w) => Some(w),
            Weights::Float { .. } => None,
        }
    }

    pub fn float_weights(&self) -> Option<&[Float]> {
        match &self.weights {
            Weights::Float { w, .. } => Some(w),
            Weights::Exact(_) => None,
        }
    }

    /// Weight of residue `i` rounded to `prec` bits.
    pub fn weight_float(&self, i: usize, prec: u32) -> Float {
        match &self.weights {
            Weights::Exact(w) => Float::with_val(prec, &w[i]),
            Weights::Float { w, .. } => Float::with_val(prec, &w[i]),
        }
    }

    pub fn weight_f64(&self, i: usize) -> f64 {
        match &self.weights {
            Weights::Exact(w) => w[i].to_f64(),
            Weights::Float { w, .. } => w[i].to_f64(),
        }
    }

    /// Index of the centered value `x`.
    pub fn index_of(&self, x: i64) -> usize {
        x.rem_euclid(i64::from(self.q)) as usize
    }

    /// `Pr(X = x)` for a centered (or any) integer `x`, as `f64`.
    pub fn centered_f64(&self, x: i64) -> f64 {
        self.weight_f64(self.index_of(x))
    }

    /// Working precision of this PMF when evaluated in floating point.
    pub fn eval_prec(&self) -> u32 {
        match self.backend() {
            Backend::Exact => EXACT_EVAL_PREC,
            Backend::Float(p) => p,
        }
    }

    pub fn support_size(&self) -> usize {
        match &self.weights {
            Weights::Exact(w) => kernels::support_size(w),
            Weights::Float { w, .. } => kernels::support_size(w),
        }
    }

    fn is_zero_at(&self, i: usize) -> bool {
        match &self.weights {
            Weights::Exact(w) => Weight::is_zero(&w[i]),
            Weights::Float { w, .. } => w[i].is_zero(),
        }
    }

    /// Largest `|center(i)|` over the support.
    pub fn max_magnitude(&self) -> u32 {
        (0..self.q as usize)
            .filter(|&i| !self.is_zero_at(i))
            .map(|i| center(i as u32, self.q).unsigned_abs() as u32)
            .max()
            .unwrap_or(0)
    }

    /// Converts to another backend. Float to exact is exact (every MPFR value
    /// is a dyadic rational) followed by an exact renormalisation.
    pub fn to_backend(&self, backend: Backend) -> Pmf {
        self.clone().into_backend(backend)
    }

    pub fn into_backend(self, backend: Backend) -> Pmf {
        let q = self.q;
        match (self.weights, backend) {
            (Weights::Exact(w), Backend::Exact) => Pmf::from_exact_unchecked(q, w),
            (Weights::Exact(w), Backend::Float(prec)) => {
                let w = w.iter().map(|x| Float::with_val(prec, x)).collect();
                normalized_float(q, prec, w).expect("exact input is normalised")
            }
            (Weights::Float { w, .. }, Backend::Float(prec)) => {
                let w = w.iter().map(|x| Float::with_val(prec, x)).collect();
                normalized_float(q, prec, w).expect("input is normalised")
            }
            (Weights::Float { w, .. }, Backend::Exact) => {
                let mut w: Vec<Rational> = w.iter().map(|x| x.to_rational().expect("finite")).collect();
                let total = kernels::sum(&w);
                for x in &mut w {
                    *x /= &total;
                }
                Pmf::from_exact_unchecked(q, w)
            }
        }
    }

    /// Law of `-X`.
    pub fn reflect(&self) -> Pmf {
        let q = self.q as usize;
        let perm = |i: usize| (q - i) % q;
        let weights = match &self.weights {
            Weights::Exact(w) => Weights::Exact((0..q).map(|i| w[perm(i)].clone()).collect()),
            Weights::Float { prec, w } => Weights::Float {
                prec: *prec,
                w: (0..q).map(|i| w[perm(i)].clone()).collect(),
            },
        };
        Pmf { q: self.q, weights }
    }

    /// Sum of the weights at `prec` bits.
    pub fn total(&self, prec: u32) -> Float {
        let mut acc = Float::new(prec);
        for i in 0..self.q as usize {
            acc += self.weight_float(i, prec);
        }
        acc
    }

    /// Mean and variance over centered representatives, at `prec` bits.
    pub fn moments(&self, prec: u32) -> (Float, Float) {
        let mut m1 = Float::new(prec);
        let mut m2 = Float::new(prec);
        for i in 0..self.q as usize {
            if self.is_zero_at(i) {
                continue;
            }
            let x = center(i as u32, self.q);
            let w = self.weight_float(i, prec);
            m1 += Float::with_val(prec, &w * x);
            m2 += Float::with_val(prec, &w * (x * x));
        }
        let var = Float::with_val(prec, &m2 - Float::with_val(prec, m1.square_ref()));
        (m1, var)
    }

    /// Shannon entropy in bits at the PMF's working precision.
    pub fn entropy(&self) -> Float {
        self.entropy_prec(self.eval_prec())
    }

    pub fn entropy_prec(&self, prec: u32) -> Float {
        let mut h = Float::new(prec);
        for i in 0..self.q as usize {
            if self.is_zero_at(i) {
                continue;
            }
            let w = self.weight_float(i, prec);
            let lw = Float::with_val(prec, w.log2_ref());
            h -= Float::with_val(prec, &w * &lw);
        }
        h
    }

    /// Total variation distance `(1/2) sum |a - b|`.
    pub fn total_variation(&self, other: &Pmf, prec: u32) -> Result<Float> {
        same_q(self, other)?;
        let mut acc = Float::new(prec);
        for i in 0..self.q as usize {
            let d = self.weight_float(i, prec) - other.weight_float(i, prec);
            acc += Float::with_val(prec, d.abs());
        }
        Ok(acc / 2u32)
    }
}

fn check_len(q: u32, len: usize) -> Result<()> {
    if q < 2 || len != q as usize {
        return Err(Error::Mismatch(format!("expected {q} weights, got {len}")));
    }
    Ok(())
}

fn same_q(a: &Pmf, b: &Pmf) -> Result<()> {
    if a.q != b.q {
        return Err(Error::Mismatch(format!("moduli differ: {} vs {}", a.q, b.q)));
    }
    Ok(())
}

fn normalized_float(q: u32, prec: u32, mut w: Vec<Float>) -> Result<Pmf> {
    let total = kernels::sum(&w);
    let dev = Float::with_val(prec, &total - 1u32).abs();
    let tol = Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)));
    if dev > tol {
        return Err(Error::Normalization {
            deviation: dev.to_f64(),
        });
    }
    if total != 1u32 {
        for x in &mut w {
            *x /= &total;
        }
    }
    Ok(Pmf {
        q,
        weights: Weights::Float { prec, w },
    })
}

/// Runs a kernel on two PMFs with matching modulus and backend.
fn binary_op(
    a: &Pmf,
    b: &Pmf,
    exact: impl Fn(&[Rational], &[Rational]) -> Vec<Rational>,
    float: impl Fn(&[Float], &[Float]) -> Vec<Float>,
) -> Result<Pmf> {
    same_q(a, b)?;
    match (&a.weights, &b.weights) {
        (Weights::Exact(x), Weights::Exact(y)) => Ok(Pmf::from_exact_unchecked(a.q, exact(x, y))),
        (Weights::Float { prec: p, w: x }, Weights::Float { prec: r, w: y }) if p == r => {
            normalized_float(a.q, *p, float(x, y))
        }
        _ => Err(Error::Mismatch(format!(
            "backends differ: {} vs {}",
            a.backend(),
            b.backend()
        ))),
    }
}

/// Centered binomial law `chi_k(x) = C(2k, x + k) / 2^(2k)` on `[-k, k]`,
/// the law of a sum of `k` differences of fair bits (variance `k/2`).
pub fn pmf_cbd(k: u32, q: u32, backend: Backend) -> Result<Pmf> {
    if k == 0 || 2 * u64::from(k) >= u64::from(q) {
        return Err(Error::Domain(format!(
            "chi_k needs 1 <= k and 2k < q (k = {k}, q = {q})"
        )));
    }
    let denom = Integer::from(1) << (2 * k);
    let mut w = vec![Rational::new(); q as usize];
    for x in -(k as i64)..=k as i64 {
        let c = Integer::from(2 * k).binomial((x + k as i64) as u32);
        w[x.rem_euclid(i64::from(q)) as usize] = Rational::from((c, denom.clone()));
    }
    Ok(Pmf::from_exact_unchecked(q, w).into_backend(backend))
}

/// Cyclic convolution: the law of `X + Y mod q`. Identical operands are
/// routed to the squaring kernel.
pub fn convolve(a: &Pmf, b: &Pmf) -> Result<Pmf> {
    if std::ptr::eq(a, b) || a == b {
        return binary_op(a, a, |x, _| kernels::square(x), |x, _| kernels::square(x));
    }
    binary_op(a, b, kernels::convolve, kernels::convolve)
}

/// Law of the sum of `copies` independent draws of `a`, by square and
/// multiply.
pub fn self_convolve(a: &Pmf, copies: u64) -> Result<Pmf> {
    if copies == 0 {
        return Err(Error::Domain("self_convolve needs copies >= 1".into()));
    }
    let mut result: Option<Pmf> = None;
    let mut base = a.clone();
    let mut rest = copies;
    loop {
        if rest & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => convolve(&r, &base)?,
            });
        }
        rest >>= 1;
        if rest == 0 {
            break;
        }
        base = convolve(&base, &base)?;
    }
    Ok(result.expect("copies >= 1"))
}

/// Law of `X * Y mod q` for independent `X ~ a`, `Y ~ b`.
pub fn product_pmf(a: &Pmf, b: &Pmf) -> Result<Pmf> {
    product_pmf_bounded(a, b, DEFAULT_PRODUCT_SUPPORT_LIMIT)
}

pub fn product_pmf_bounded(a: &Pmf, b: &Pmf, limit: usize) -> Result<Pmf> {
    let size = a.support_size().min(b.support_size());
    if size > limit {
        return Err(Error::SupportBound { size, limit });
    }
    binary_op(a, b, kernels::product, kernels::product)
}

/// `(1/Q) sum_j psi(x + floor(j q / Q))`: the output law of the channel under
/// uniform inputs, up to reflection.
pub fn shift_mixture(psi: &Pmf, alphabet: u32) -> Result<Pmf> {
    let q = psi.q;
    if alphabet < 2 || alphabet > q {
        return Err(Error::Domain(format!(
            "alphabet size Q = {alphabet} must satisfy 2 <= Q <= q = {q}"
        )));
    }
    let shifts: Vec<usize> = (0..alphabet)
        .map(|j| (u64::from(j) * u64::from(q) / u64::from(alphabet)) as usize)
        .collect();
    match &psi.weights {
        Weights::Exact(w) => Ok(Pmf::from_exact_unchecked(q, kernels::shift_mixture(w, &shifts))),
        Weights::Float { prec, w } => normalized_float(q, *prec, kernels::shift_mixture(w, &shifts)),
    }
}

pub fn entropy(a: &Pmf) -> Float {
    a.entropy()
}

/// `log2` of a nonnegative float; `-inf` for zero.
pub fn log2_of(x: &Float) -> f64 {
    Float::with_val(x.prec(), x.log2_ref()).to_f64()
}

/// `base^exp` at `prec` bits, for exponents beyond `f64` range.
pub fn pow_float(base: &Float, exp: u32) -> Float {
    Float::with_val(base.prec(), base.pow(exp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn exact(q: u32, pairs: &[(i64, Rational)]) -> Pmf {
        let mut w = vec![Rational::new(); q as usize];
        for (x, p) in pairs {
            w[x.rem_euclid(i64::from(q)) as usize] = p.clone();
        }
        Pmf::from_rationals(q, w).unwrap()
    }

    #[test]
    fn cbd_weights() {
        let chi1 = pmf_cbd(1, 17, Backend::Exact).unwrap();
        assert_eq!(chi1, exact(17, &[(-1, r(1, 4)), (0, r(1, 2)), (1, r(1, 4))]));
        let chi8 = pmf_cbd(8, 12289, Backend::Exact).unwrap();
        assert_eq!(chi8.exact_weights().unwrap()[0], r(12870, 65536));
        assert!(pmf_cbd(9, 17, Backend::Exact).is_err());
    }

    #[test]
    fn cbd_mean_and_variance_are_exact() {
        for k in [1u32, 2, 3, 8] {
            let p = pmf_cbd(k, 97, Backend::Exact).unwrap();
            let w = p.exact_weights().unwrap();
            let mut m1 = Rational::new();
            let mut m2 = Rational::new();
            for (i, x) in w.iter().enumerate() {
                let c = center(i as u32, 97);
                m1 += Rational::from(x * c);
                m2 += Rational::from(x * (c * c));
            }
            assert_eq!(m1, 0);
            assert_eq!(m2, r(i64::from(k), 2));
        }
    }

    #[test]
    fn convolve_examples() {
        let a = exact(5, &[(0, r(1, 2)), (1, r(1, 2))]);
        let b = exact(5, &[(0, r(1, 2)), (4, r(1, 2))]);
        let c = convolve(&a, &b).unwrap();
        assert_eq!(c, exact(5, &[(4, r(1, 4)), (0, r(1, 2)), (1, r(1, 4))]));

        let d = convolve(&Pmf::point(7, 3, Backend::Exact), &Pmf::point(7, 6, Backend::Exact)).unwrap();
        assert_eq!(d, Pmf::point(7, 2, Backend::Exact));

        let u = Pmf::uniform(11, Backend::Exact);
        assert_eq!(convolve(&u, &a_random(11)).unwrap(), u);
    }

    fn a_random(q: u32) -> Pmf {
        let counts: Vec<u64> = (0..q as u64).map(|i| (i * 7 + 3) % 5).collect();
        Pmf::from_counts(q, &counts).unwrap()
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let a = Pmf::point(5, 0, Backend::Exact);
        let b = Pmf::point(7, 0, Backend::Exact);
        assert!(matches!(convolve(&a, &b), Err(Error::Mismatch(_))));
        let c = Pmf::point(5, 0, Backend::Float(128));
        assert!(matches!(convolve(&a, &c), Err(Error::Mismatch(_))));
    }

    #[test]
    fn self_convolve_of_chi1() {
        let chi1 = pmf_cbd(1, 17, Backend::Exact).unwrap();
        assert_eq!(self_convolve(&chi1, 1).unwrap(), chi1);
        let two = self_convolve(&chi1, 2).unwrap();
        let want = exact(
            17,
            &[
                (-2, r(1, 16)),
                (-1, r(4, 16)),
                (0, r(6, 16)),
                (1, r(4, 16)),
                (2, r(1, 16)),
            ],
        );
        assert_eq!(two, want);
        // chi_1 summed k times is chi_k.
        assert_eq!(
            self_convolve(&chi1, 5).unwrap(),
            pmf_cbd(5, 17, Backend::Exact).unwrap()
        );
        assert!(self_convolve(&chi1, 0).is_err());
    }

    #[test]
    fn product_examples() {
        let chi1 = pmf_cbd(1, 17, Backend::Exact).unwrap();
        let xi = product_pmf(&chi1, &chi1).unwrap();
        assert_eq!(xi, exact(17, &[(0, r(3, 4)), (1, r(1, 8)), (-1, r(1, 8))]));
        let b = a_random(17);
        assert_eq!(product_pmf(&Pmf::point(17, 1, Backend::Exact), &b).unwrap(), b);
        assert_eq!(
            product_pmf(&Pmf::point(17, 0, Backend::Exact), &b).unwrap(),
            Pmf::point(17, 0, Backend::Exact)
        );
        let u = Pmf::uniform(17, Backend::Exact);
        assert!(matches!(
            product_pmf_bounded(&u, &u, 16),
            Err(Error::SupportBound { size: 17, limit: 16 })
        ));
    }

    #[test]
    fn shift_mixture_examples() {
        let d0 = Pmf::point(17, 0, Backend::Exact);
        assert!(shift_mixture(&d0, 1).is_err());
        assert!(shift_mixture(&d0, 18).is_err());
        assert_eq!(
            shift_mixture(&a_random(17), 17).unwrap(),
            Pmf::uniform(17, Backend::Exact)
        );
        // Shifting by +x_j relocates mass to -x_j.
        let m = shift_mixture(&d0, 2).unwrap();
        assert_eq!(m, exact(17, &[(0, r(1, 2)), (-8, r(1, 2))]));
        assert_eq!(m.reflect(), exact(17, &[(0, r(1, 2)), (8, r(1, 2))]));
    }

    #[test]
    fn entropy_examples() {
        assert!(Pmf::point(17, 3, Backend::Exact).entropy().is_zero());
        let u = Pmf::uniform(17, Backend::Float(256));
        let want = Float::with_val(256, 17).log2();
        let diff = Float::with_val(256, u.entropy() - &want).abs();
        assert!(diff < Float::i_exp(1, -240));
        let h = exact(17, &[(-1, r(1, 4)), (0, r(1, 2)), (1, r(1, 4))]).entropy();
        assert_eq!(h, 1.5);
    }

    #[test]
    fn backend_round_trip() {
        // Dyadic weights survive the trip unchanged.
        let chi = pmf_cbd(3, 13, Backend::Exact).unwrap();
        assert_eq!(chi.to_backend(Backend::Float(64)).to_backend(Backend::Exact), chi);
        let p = a_random(13);
        let f = p.to_backend(Backend::Float(512));
        let tv = f.to_backend(Backend::Exact).total_variation(&p, 1024).unwrap();
        assert!(tv < Float::i_exp(1, -500));
        let g = f.to_backend(Backend::Float(128));
        assert_eq!(g.backend(), Backend::Float(128));
    }

    #[test]
    fn float_normalisation_is_checked() {
        let w = vec![Float::with_val(128, 0.25); 3];
        assert!(matches!(Pmf::from_floats(3, w), Err(Error::Normalization { .. })));
    }

    fn random_pmf(q: u32) -> impl Strategy<Value = Pmf> {
        proptest::collection::vec(0u64..6, q as usize)
            .prop_filter("nonzero", |c| c.iter().any(|&x| x > 0))
            .prop_map(move |c| Pmf::from_counts(q, &c).unwrap())
    }

    fn naive_fold(a: &Pmf, copies: u64) -> Pmf {
        let mut acc = a.clone();
        for _ in 1..copies {
            acc = binary_op(&acc, a, kernels::convolve, kernels::convolve).unwrap();
        }
        acc
    }

    proptest! {
        #[test]
        fn convolve_commutes_and_associates(a in random_pmf(11), b in random_pmf(11), c in random_pmf(11)) {
            prop_assert_eq!(convolve(&a, &b).unwrap(), convolve(&b, &a).unwrap());
            let l = convolve(&convolve(&a, &b).unwrap(), &c).unwrap();
            let r = convolve(&a, &convolve(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn square_and_multiply_matches_fold(a in random_pmf(13), copies in prop::sample::select(vec![2u64, 3, 5, 8])) {
            prop_assert_eq!(self_convolve(&a, copies).unwrap(), naive_fold(&a, copies));
        }

        #[test]
        fn squaring_kernel_matches_general_kernel(a in random_pmf(19)) {
            let w = a.exact_weights().unwrap();
            prop_assert_eq!(kernels::square(w), kernels::convolve(w, w));
        }

        #[test]
        fn float_tracks_exact(a in random_pmf(17), b in random_pmf(17)) {
            let exact = convolve(&a, &b).unwrap();
            let fa = a.to_backend(Backend::Float(200));
            let fb = b.to_backend(Backend::Float(200));
            let float = convolve(&fa, &fb).unwrap();
            for i in 0..17 {
                let e = exact.weight_float(i, 200);
                let d = Float::with_val(200, float.float_weights().unwrap()[i].clone() - &e).abs();
                prop_assert!(d <= Float::with_val(200, &e >> 180u32));
            }
        }

        #[test]
        fn averaging_never_decreases_entropy(a in random_pmf(16), mask in proptest::collection::vec(any::<bool>(), 16)) {
            let w = a.exact_weights().unwrap();
            let picked: Vec<usize> = (0..16).filter(|&i| mask[i]).collect();
            prop_assume!(!picked.is_empty());
            let mut avg = Rational::new();
            for &i in &picked {
                avg += &w[i];
            }
            avg /= picked.len() as u32;
            let mut v = w.to_vec();
            for &i in &picked {
                v[i] = avg.clone();
            }
            let b = Pmf::from_rationals(16, v).unwrap();
            let (ha, hb) = (a.entropy_prec(256), b.entropy_prec(256));
            prop_assert!(hb >= ha - Float::with_val(256, Float::i_exp(1, -200)));
        }
    }
}
