//! Scheme parameter sets, Q-ary channel configuration and numeric precision.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::pmf::Backend;
use crate::{Error, Result};

/// The scheme tuple `(n, q, k, l, d_u, d_v)`.
///
/// `k` parameterises the centered binomial law `chi_k` on `[-k, k]`
/// (variance `k/2`). A compression width of `0` means "not compressed".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSet {
    pub name: String,
    /// Ring degree; the ring is `Z_q[x]/(x^n + 1)`.
    pub n: usize,
    pub q: u32,
    pub k: u32,
    /// Module rank, `1` for RLWE.
    pub l: usize,
    pub d_u: u32,
    pub d_v: u32,
}

impl ParamSet {
    /// Builds and validates a parameter set.
    pub fn new(name: &str, n: usize, q: u32, k: u32, l: usize, d_u: u32, d_v: u32) -> Result<Self> {
        let p = ParamSet {
            name: name.to_owned(),
            n,
            q,
            k,
            l,
            d_u,
            d_v,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(format!("{}: {msg}", self.name)));
        if self.n < 2 || !self.n.is_power_of_two() {
            return fail(format!("n = {} must be a power of two >= 2", self.n));
        }
        if self.q < 3 {
            return fail(format!("q = {} must be >= 3", self.q));
        }
        if self.k == 0 || !self.k.is_multiple_of(2) {
            return fail(format!("k = {} must be a positive even integer", self.k));
        }
        if 2 * u64::from(self.k) >= u64::from(self.q) {
            return fail(format!("2k < q violated (k = {}, q = {})", self.k, self.q));
        }
        if self.l == 0 {
            return fail("l must be >= 1".into());
        }
        for (label, bits) in [("d_u", self.d_u), ("d_v", self.d_v)] {
            if bits > 0 && (bits >= 32 || (1u64 << bits) >= u64::from(self.q)) {
                return fail(format!("2^{{{label}}} < q violated ({label} = {bits}, q = {})", self.q));
            }
        }
        Ok(())
    }

    /// Ciphertext bits spent on one coefficient of a compressed component;
    /// an uncompressed component costs `ceil(log2 q)` bits.
    pub fn effective_bits(&self, d: u32) -> u32 {
        if d > 0 {
            d
        } else {
            ceil_log2(self.q)
        }
    }

    /// Ciphertext bits per message coefficient: `l * d_u_eff + d_v_eff`.
    pub fn ciphertext_bits_per_coeff(&self) -> u32 {
        self.l as u32 * self.effective_bits(self.d_u) + self.effective_bits(self.d_v)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("ParamSet serialises")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let p: ParamSet = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(n={}, q={}, k={}, l={}, d_u={}, d_v={})",
            self.name, self.n, self.q, self.k, self.l, self.d_u, self.d_v
        )
    }
}

pub(crate) fn ceil_log2(x: u32) -> u32 {
    32 - (x - 1).leading_zeros()
}

/// Reads a parameter file (TOML keys `name, n, q, k, l, d_u, d_v`).
pub fn load_param_set(path: impl AsRef<Path>) -> Result<ParamSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ParamSet::from_toml(&text)
}

/// Names accepted by [`builtin`].
pub const PRESETS: &[&str] = &[
    "newhope1024",
    "kyber1024",
    "toy_n2q17",
    "toy_n2q17_dv2",
    "toy_n2q17_l2",
    "toy_n8q97",
    "toy_n16q257",
    "toy_n16q257_l2",
];

/// Built-in presets: the two schemes plus small toy sets whose failure
/// probabilities are visible to Monte Carlo.
pub fn builtin(name: &str) -> Result<ParamSet> {
    let p = match name {
        "newhope1024" => ParamSet::new(name, 1024, 12289, 8, 1, 0, 3),
        "kyber1024" => ParamSet::new(name, 256, 3329, 2, 4, 11, 5),
        "toy_n2q17" => ParamSet::new(name, 2, 17, 2, 1, 0, 0),
        "toy_n2q17_dv2" => ParamSet::new(name, 2, 17, 2, 1, 0, 2),
        "toy_n2q17_l2" => ParamSet::new(name, 2, 17, 2, 2, 2, 2),
        "toy_n8q97" => ParamSet::new(name, 8, 97, 2, 1, 0, 3),
        "toy_n16q257" => ParamSet::new(name, 16, 257, 2, 1, 0, 3),
        "toy_n16q257_l2" => ParamSet::new(name, 16, 257, 2, 2, 3, 3),
        _ => return Err(Error::UnknownPreset(name.to_owned())),
    };
    Ok(p.expect("presets are valid"))
}

/// Resolves a preset name or a path to a parameter file.
pub fn resolve_scheme(name_or_path: &str) -> Result<ParamSet> {
    match builtin(name_or_path) {
        Ok(p) => Ok(p),
        Err(Error::UnknownPreset(_)) if Path::new(name_or_path).exists() => load_param_set(name_or_path),
        Err(e) => Err(e),
    }
}

/// Input alphabet size of the Q-ary channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QaryConfig {
    pub alphabet: u32,
}

impl QaryConfig {
    pub fn new(alphabet: u32, q: u32) -> Result<Self> {
        if alphabet < 2 || alphabet > q {
            return Err(Error::Domain(format!(
                "alphabet size Q = {alphabet} must satisfy 2 <= Q <= q = {q}"
            )));
        }
        Ok(QaryConfig { alphabet })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionConfig {
    pub mantissa_bits: u32,
    /// Exact rational arithmetic, intended for small-modulus oracle runs.
    pub exact_mode: bool,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            mantissa_bits: 1024,
            exact_mode: false,
        }
    }
}

impl PrecisionConfig {
    pub fn float(mantissa_bits: u32) -> Result<Self> {
        let cfg = PrecisionConfig {
            mantissa_bits,
            exact_mode: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn exact() -> Self {
        PrecisionConfig {
            exact_mode: true,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mantissa_bits < 64 {
            return Err(Error::Domain(format!(
                "mantissa_bits = {} must be >= 64",
                self.mantissa_bits
            )));
        }
        Ok(())
    }

    pub fn backend(&self) -> Backend {
        if self.exact_mode {
            Backend::Exact
        } else {
            Backend::Float(self.mantissa_bits)
        }
    }

    /// The same configuration at twice the mantissa width.
    pub fn doubled(&self) -> Self {
        PrecisionConfig {
            mantissa_bits: self.mantissa_bits * 2,
            ..*self
        }
    }
}
