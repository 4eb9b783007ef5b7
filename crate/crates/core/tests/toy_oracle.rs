//! Exhaustive enumeration of the decryption residual at n = 2, q = 17.

use rlwe_channel::noise::build_psi;
use rlwe_channel::pmf::render_pmf;
use rlwe_channel::pmf::Pmf;
use rlwe_channel::{ParamSet, PrecisionConfig};
use rug::{Integer, Rational};

const Q: i64 = 17;

fn div_round(a: i64, b: i64) -> i64 {
    (2 * a + b).div_euclid(2 * b)
}

/// Counts of `decomp(comp(z)) - z` over all `z`, indexed by residue.
fn rounding_counts(d: u32) -> Vec<u128> {
    let mut c = vec![0u128; Q as usize];
    if d == 0 {
        c[0] = Q as u128;
        return c;
    }
    let m = 1i64 << d;
    for z in 0..Q {
        let w = div_round(m * z, Q).rem_euclid(m);
        let back = div_round(Q * w, m);
        c[(back - z).rem_euclid(Q) as usize] += 1;
    }
    c
}

/// Law of `(e s' + e'' - s (e' + c_u) + c_v)_0` in `Z_17[x]/(x^2 + 1)` with
/// every coefficient drawn from `C(4, x + 2) / 16`.
fn enumerate(d_u: u32, d_v: u32) -> Vec<Rational> {
    let chi: Vec<(i64, u128)> = (-2..=2).map(|x| (x, [1, 4, 6, 4, 1][(x + 2) as usize])).collect();
    let cu: Vec<(i64, u128)> = rounding_counts(d_u)
        .into_iter()
        .enumerate()
        .filter(|&(_, w)| w > 0)
        .map(|(i, w)| (i as i64, w))
        .collect();
    let cv = rounding_counts(d_v);
    let mut counts = vec![0u128; Q as usize];
    // Partial sums over the key-side products first.
    let mut es = vec![0u128; Q as usize];
    for &(e0, w0) in &chi {
        for &(e1, w1) in &chi {
            for &(t0, w2) in &chi {
                for &(t1, w3) in &chi {
                    es[(e0 * t0 - e1 * t1).rem_euclid(Q) as usize] += w0 * w1 * w2 * w3;
                }
            }
        }
    }
    let mut se = vec![0u128; Q as usize];
    for &(s0, w0) in &chi {
        for &(s1, w1) in &chi {
            for &(f0, w2) in &chi {
                for &(f1, w3) in &chi {
                    for &(c0, w4) in &cu {
                        for &(c1, w5) in &cu {
                            let v = s0 * (f0 + c0) - s1 * (f1 + c1);
                            se[v.rem_euclid(Q) as usize] += w0 * w1 * w2 * w3 * w4 * w5;
                        }
                    }
                }
            }
        }
    }
    for a in 0..Q {
        for b in 0..Q {
            for &(e2, w) in &chi {
                for c in 0..Q {
                    let weight = es[a as usize] * se[b as usize] * w * cv[c as usize];
                    counts[(a - b + e2 + c).rem_euclid(Q) as usize] += weight;
                }
            }
        }
    }
    let total: u128 = counts.iter().sum();
    counts
        .into_iter()
        .map(|c| Rational::from((Integer::from(c), Integer::from(total))))
        .collect()
}

fn check(param: &ParamSet) -> Vec<Rational> {
    let oracle = enumerate(param.d_u, param.d_v);
    let model = build_psi(param, &PrecisionConfig::exact()).unwrap();
    assert_eq!(model.psi.exact_weights().unwrap(), &oracle[..], "{}", param.name);
    oracle
}

#[test]
fn psi_matches_enumeration_without_compression() {
    let p = ParamSet::new("toy_n2q17", 2, 17, 2, 1, 0, 0).unwrap();
    let oracle = check(&p);
    let text = render_pmf(&Pmf::from_rationals(17, oracle).unwrap());
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/toy_n2q17_psi.pmf");
    if std::env::var_os("UPDATE_FIXTURES").is_some() {
        std::fs::write(path, &text).unwrap();
    }
    assert_eq!(std::fs::read_to_string(path).unwrap(), text);
}

#[test]
fn psi_matches_enumeration_with_v_compression() {
    check(&ParamSet::new("toy_n2q17_dv2", 2, 17, 2, 1, 0, 2).unwrap());
}

#[test]
fn psi_matches_enumeration_with_both_compressed() {
    check(&ParamSet::new("toy_n2q17_du2", 2, 17, 2, 1, 2, 2).unwrap());
}

#[test]
fn float_psi_tracks_enumeration() {
    let p = ParamSet::new("toy_n2q17_dv2", 2, 17, 2, 1, 0, 2).unwrap();
    let oracle = enumerate(0, 2);
    let model = build_psi(&p, &PrecisionConfig::float(256).unwrap()).unwrap();
    for (i, want) in oracle.iter().enumerate() {
        let got = model.psi.weight_float(i, 256);
        let want = rug::Float::with_val(256, want);
        let rel = rug::Float::with_val(256, &got - &want).abs() / &want;
        assert!(rel < rug::Float::with_val(64, rug::Float::i_exp(1, -200)), "bin {i}");
    }
}
