//! Small finite-field toolkit: BCH dimensions from actual minimal
//! polynomials in GF(p^N), independent of coset bookkeeping.

use rug::Integer;

type Poly = Vec<u32>;

fn trim(mut a: Poly) -> Poly {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (u64::from(a), p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % u64::from(p);
        }
        b = b * b % u64::from(p);
        e >>= 1;
    }
    r as u32
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Poly {
    let mut a = trim(a.to_vec());
    let m = trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while a.len() > dm && !(a.len() == 1 && a[0] == 0) {
        let shift = a.len() - 1 - dm;
        let f = a[a.len() - 1] * lead_inv % p;
        for (i, &c) in m.iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - f * c % p) % p;
        }
        a = trim(a);
        if a.len() - 1 < dm {
            break;
        }
    }
    a
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Poly {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + u64::from(x) * u64::from(y)) % u64::from(p);
        }
    }
    poly_rem(&out.into_iter().map(|v| v as u32).collect::<Vec<_>>(), m, p)
}

fn pow_mod(base: &[u32], e: &Integer, m: &[u32], p: u32) -> Poly {
    let mut r: Poly = vec![1];
    for i in (0..e.significant_bits()).rev() {
        r = mul_mod(&r, &r, m, p);
        if e.get_bit(i) {
            r = mul_mod(&r, base, m, p);
        }
    }
    r
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test for a monic `f` of degree `N` over GF(p).
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    let x: Poly = vec![0, 1];
    let frob = |i: usize| {
        let e = Integer::from(Integer::u_pow_u(p, i as u32));
        let mut h = pow_mod(&x, &e, f, p);
        h.resize(2.max(h.len()), 0);
        h[1] = (h[1] + p - 1) % p;
        trim(h)
    };
    let full = frob(n);
    if !(full.len() == 1 && full[0] == 0) {
        return false;
    }
    prime_factors(n as u64).into_iter().all(|r| {
        let g = poly_gcd(f, &frob(n / r as usize), p);
        g.len() == 1
    })
}

/// GF(p^N) as GF(p)[x] / (f).
#[derive(Debug, Clone)]
pub struct Field {
    pub p: u32,
    pub n: usize,
    modulus: Poly,
}

pub type Elem = Poly;

impl Field {
    pub fn new(p: u32, n: usize) -> Field {
        if n == 1 {
            return Field {
                p,
                n,
                modulus: vec![0, 1],
            };
        }
        let mut counter: u64 = 1;
        loop {
            let mut f = vec![0u32; n + 1];
            f[n] = 1;
            let mut c = counter;
            for slot in f.iter_mut().take(n) {
                *slot = (c % u64::from(p)) as u32;
                c /= u64::from(p);
            }
            if f[0] != 0 && is_irreducible(&f, p) {
                return Field { p, n, modulus: f };
            }
            counter += 1;
        }
    }

    pub fn order(&self) -> Integer {
        Integer::from(Integer::u_pow_u(self.p, self.n as u32))
    }

    pub fn one(&self) -> Elem {
        vec![1]
    }

    pub fn zero(&self) -> Elem {
        vec![0]
    }

    fn reduce(&self, a: Elem) -> Elem {
        if self.n == 1 {
            return vec![a.iter().fold(0, |s, &c| (s + c) % self.p)];
        }
        poly_rem(&a, &self.modulus, self.p)
    }

    pub fn from_index(&self, mut i: u64) -> Elem {
        let mut e = vec![0u32; self.n];
        for slot in e.iter_mut() {
            *slot = (i % u64::from(self.p)) as u32;
            i /= u64::from(self.p);
        }
        trim(e)
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = vec![0u32; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % self.p;
        }
        trim(out)
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        trim(a.iter().map(|&c| (self.p - c) % self.p).collect())
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        if self.n == 1 {
            return vec![(u64::from(a[0]) * u64::from(b[0]) % u64::from(self.p)) as u32];
        }
        mul_mod(a, b, &self.modulus, self.p)
    }

    pub fn pow(&self, a: &Elem, e: &Integer) -> Elem {
        let mut r = self.one();
        for i in (0..e.significant_bits()).rev() {
            r = self.mul(&r, &r);
            if e.get_bit(i) {
                r = self.mul(&r, a);
            }
        }
        self.reduce(r)
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        a.len() == 1 && a[0] == 1
    }

    /// An element of multiplicative order exactly `order`.
    pub fn root_of_unity(&self, order: u64) -> Elem {
        let group = self.order() - 1u32;
        assert!(group.is_divisible_u(order as u32), "no {order}-th roots of unity");
        let e = group / order;
        let primes = prime_factors(order);
        for i in 2u64.. {
            let beta = self.pow(&self.from_index(i), &e);
            if primes
                .iter()
                .all(|&r| !self.is_one(&self.pow(&beta, &Integer::from(order / r))))
            {
                return beta;
            }
        }
        unreachable!()
    }
}

/// Polynomial over the field, lowest degree first.
fn times_linear(field: &Field, a: &[Elem], root: &Elem) -> Vec<Elem> {
    // a(x) * (x - root)
    let mut out = vec![field.zero(); a.len() + 1];
    let minus = field.neg(root);
    for (i, c) in a.iter().enumerate() {
        out[i + 1] = field.add(&out[i + 1], c);
        out[i] = field.add(&out[i], &field.mul(c, &minus));
    }
    out
}

fn poly_mul(field: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = field.add(&out[i + j], &field.mul(x, y));
        }
    }
    out
}

fn multiplicative_order(q: u64, n: u64) -> usize {
    let mut x = q % n;
    let mut m = 1;
    while x != 1 {
        x = x * q % n;
        m += 1;
    }
    m
}

/// Minimal polynomials over GF(Q) of the powers of a primitive `n_b`-th
/// root of unity.
#[derive(Debug, Clone)]
pub struct MinimalPolynomials {
    pub n_b: usize,
    /// Class of `beta^i` for each exponent `i`.
    pub class_of: Vec<usize>,
    /// Degree of each class's minimal polynomial.
    pub degree: Vec<usize>,
}

impl MinimalPolynomials {
    /// Panics if a minimal polynomial has a coefficient outside GF(Q) or the
    /// product of all of them is not `x^n_b - 1`.
    pub fn new(n_b: usize, p: u32, e: u32) -> Self {
        let q = u64::from(p).pow(e);
        assert!(n_b >= 2 && !(n_b as u64).is_multiple_of(u64::from(p)));
        let m = multiplicative_order(q, n_b as u64);
        let field = Field::new(p, m * e as usize);
        let beta = field.root_of_unity(n_b as u64);
        let qi = Integer::from(q);
        let powers: Vec<Elem> = (0..n_b)
            .scan(field.one(), |acc, _| {
                let cur = acc.clone();
                *acc = field.mul(acc, &beta);
                Some(cur)
            })
            .collect();
        let mut class_of = vec![usize::MAX; n_b];
        let mut degree = Vec::new();
        let mut product = vec![field.one()];
        for i in 0..n_b {
            if class_of[i] != usize::MAX {
                continue;
            }
            let c = degree.len();
            let mut conj = vec![powers[i].clone()];
            loop {
                let next = field.pow(conj.last().unwrap(), &qi);
                if next == conj[0] {
                    break;
                }
                conj.push(next);
            }
            let mut minpoly = vec![field.one()];
            for r in &conj {
                minpoly = times_linear(&field, &minpoly, r);
                let j = powers
                    .iter()
                    .position(|x| x == r)
                    .expect("conjugate is a power of beta");
                class_of[j] = c;
            }
            for coeff in &minpoly {
                assert_eq!(&field.pow(coeff, &qi), coeff, "coefficient outside GF({q})");
            }
            degree.push(conj.len());
            product = poly_mul(&field, &product, &minpoly);
        }
        let mut expected = vec![field.zero(); n_b + 1];
        expected[0] = field.neg(&field.one());
        expected[n_b] = field.one();
        assert_eq!(product, expected, "product of minimal polynomials is not x^n - 1");
        MinimalPolynomials { n_b, class_of, degree }
    }

    /// `n_b - deg lcm` of the minimal polynomials of `beta^b .. beta^(b+d-2)`.
    pub fn dimension(&self, d: usize, b: usize) -> usize {
        let mut seen = vec![false; self.degree.len()];
        let mut deg = 0;
        for i in b..b + d.saturating_sub(1) {
            let c = self.class_of[i % self.n_b];
            if !seen[c] {
                seen[c] = true;
                deg += self.degree[c];
            }
        }
        self.n_b - deg
    }
}
