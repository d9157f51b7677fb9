//! Radix-2 encodings of real unknowns as weighted sums of qubits.
//!
//! Layout of the flat qubit index space, per unknown `i` with `B = l_max - l_min + 1`:
//!
//! * two-sided: `[q+_{l_min} .. q+_{l_max}, q-_{l_min} .. q-_{l_max}]`, group size `2B`
//! * offset: `[q+_{l_min} .. q+_{l_max}, q-]`, group size `B + 1`
//!
//! The eigenvalue group (if any) follows all `x` groups, and auxiliary
//! variables introduced by quadratization follow the eigenvalue group.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsys::LinearSystemProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `x = sum 2^l q+_l - sum 2^l q-_l`
    TwoSided,
    /// `x = -2^(l_max+1) q- + sum 2^l q+_l`
    Offset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingConfig {
    pub l_min: i32,
    pub l_max: i32,
    pub scheme: Scheme,
    #[serde(default = "default_scale")]
    pub scale_c: u64,
}

fn default_scale() -> u64 {
    1
}

impl EncodingConfig {
    pub fn new(l_min: i32, l_max: i32, scheme: Scheme) -> Result<Self> {
        let c = Self {
            l_min,
            l_max,
            scheme,
            scale_c: 1,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn two_sided(l_min: i32, l_max: i32) -> Result<Self> {
        Self::new(l_min, l_max, Scheme::TwoSided)
    }

    pub fn offset(l_min: i32, l_max: i32) -> Result<Self> {
        Self::new(l_min, l_max, Scheme::Offset)
    }

    pub fn with_scale(mut self, scale_c: u64) -> Result<Self> {
        self.scale_c = scale_c;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_min > self.l_max {
            return Err(Error::Config(format!(
                "l_min ({}) exceeds l_max ({})",
                self.l_min, self.l_max
            )));
        }
        // keep every weight comfortably inside f64's exact integer range
        if self.l_min < -60 || self.l_max > 60 {
            return Err(Error::Config("exponents must lie in [-60, 60]".into()));
        }
        if self.scale_c == 0 {
            return Err(Error::Config("scale_c must be at least 1".into()));
        }
        Ok(())
    }

    /// Bits per sign group, `l_max - l_min + 1`.
    pub fn bits(&self) -> usize {
        (self.l_max - self.l_min + 1) as usize
    }

    pub fn group_size(&self) -> usize {
        match self.scheme {
            Scheme::TwoSided => 2 * self.bits(),
            Scheme::Offset => self.bits() + 1,
        }
    }

    pub fn exponents(&self) -> impl Iterator<Item = i32> + Clone {
        self.l_min..=self.l_max
    }

    /// Weight of the offset scheme's translation bit, `2^(l_max+1)`.
    pub fn translation(&self) -> f64 {
        pow2(self.l_max + 1)
    }

    /// Largest magnitude of the positive group, `sum_l 2^l`, unscaled.
    pub fn positive_span(&self) -> f64 {
        self.exponents().map(pow2).sum()
    }
}

pub(crate) fn pow2(l: i32) -> f64 {
    2f64.powi(l)
}

/// `(min, max)` representable value under `config`, divided by `scale_c`.
pub fn representable_range(config: &EncodingConfig) -> (f64, f64) {
    let s = config.positive_span();
    let c = config.scale_c as f64;
    match config.scheme {
        Scheme::TwoSided => (-s / c, s / c),
        Scheme::Offset => (-config.translation() / c, s / c),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSign {
    /// Only the positive bits of the eigenvalue encoding.
    Positive,
    /// Only the negative bits.
    Negative,
    /// The full encoding of the eigenvalue config's scheme.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    X(usize),
    Lambda,
}

/// Logical role of a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitRole {
    /// Power-of-two bit `2^exponent` with the given sign.
    Bit { group: Group, sign: Sign, exponent: i32 },
    /// The offset scheme's `-2^(l_max+1)` bit.
    Translation { group: Group },
    Aux(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LambdaEncoding {
    config: EncodingConfig,
    sign: LambdaSign,
}

impl LambdaEncoding {
    fn size(&self) -> usize {
        match self.sign {
            LambdaSign::Positive | LambdaSign::Negative => self.config.bits(),
            LambdaSign::Both => self.config.group_size(),
        }
    }
}

/// Bijection between qubit roles and flat indices; owns decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableRegistry {
    n: usize,
    config: EncodingConfig,
    lambda: Option<LambdaEncoding>,
    num_aux: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedSolution {
    pub x: Vec<f64>,
    pub lambda: Option<f64>,
    pub residual: Option<f64>,
}

impl DecodedSolution {
    pub fn is_trivial(&self) -> bool {
        self.x.iter().all(|&v| v == 0.0)
    }
}

impl VariableRegistry {
    pub fn new(n: usize, config: EncodingConfig) -> Result<Self> {
        config.validate()?;
        if n == 0 {
            return Err(Error::Dimension("at least one unknown is required".into()));
        }
        Ok(Self {
            n,
            config,
            lambda: None,
            num_aux: 0,
        })
    }

    pub fn with_lambda(mut self, config: EncodingConfig, sign: LambdaSign) -> Result<Self> {
        config.validate()?;
        self.lambda = Some(LambdaEncoding { config, sign });
        Ok(self)
    }

    pub fn with_aux(mut self, num_aux: usize) -> Self {
        self.num_aux = num_aux;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &EncodingConfig {
        &self.config
    }

    pub fn lambda_config(&self) -> Option<(&EncodingConfig, LambdaSign)> {
        self.lambda.as_ref().map(|l| (&l.config, l.sign))
    }

    pub fn num_aux(&self) -> usize {
        self.num_aux
    }

    fn lambda_base(&self) -> usize {
        self.n * self.config.group_size()
    }

    /// Qubits that carry encoded values (everything except auxiliaries).
    pub fn num_encoded(&self) -> usize {
        self.lambda_base() + self.lambda.map_or(0, |l| l.size())
    }

    pub fn total_qubits(&self) -> usize {
        self.num_encoded() + self.num_aux
    }

    pub fn flat_index(&self, role: QubitRole) -> Result<usize> {
        let bad = || Error::Index(format!("{role:?} is not valid for this registry"));
        match role {
            QubitRole::Aux(k) => {
                if k < self.num_aux {
                    Ok(self.num_encoded() + k)
                } else {
                    Err(bad())
                }
            }
            QubitRole::Bit {
                group,
                sign,
                exponent,
            } => {
                let (base, cfg, layout) = self.group_layout(group).ok_or_else(bad)?;
                if exponent < cfg.l_min || exponent > cfg.l_max {
                    return Err(bad());
                }
                let off = (exponent - cfg.l_min) as usize;
                match (layout, sign) {
                    (Layout::TwoSided, Sign::Plus) | (Layout::Offset, Sign::Plus) => Ok(base + off),
                    (Layout::TwoSided, Sign::Minus) => Ok(base + cfg.bits() + off),
                    (Layout::PlusOnly, Sign::Plus) | (Layout::MinusOnly, Sign::Minus) => {
                        Ok(base + off)
                    }
                    _ => Err(bad()),
                }
            }
            QubitRole::Translation { group } => {
                let (base, cfg, layout) = self.group_layout(group).ok_or_else(bad)?;
                match layout {
                    Layout::Offset => Ok(base + cfg.bits()),
                    _ => Err(bad()),
                }
            }
        }
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn role_of(&self, index: usize) -> Result<QubitRole> {
        if index >= self.total_qubits() {
            return Err(Error::Index(format!(
                "qubit {index} outside {} qubits",
                self.total_qubits()
            )));
        }
        if index >= self.num_encoded() {
            return Ok(QubitRole::Aux(index - self.num_encoded()));
        }
        let (group, local) = if index < self.lambda_base() {
            let g = self.config.group_size();
            (Group::X(index / g), index % g)
        } else {
            (Group::Lambda, index - self.lambda_base())
        };
        let (_, cfg, layout) = self.group_layout(group).expect("group in range");
        let b = cfg.bits();
        let bit = |sign, off: usize| QubitRole::Bit {
            group,
            sign,
            exponent: cfg.l_min + off as i32,
        };
        Ok(match layout {
            Layout::TwoSided if local < b => bit(Sign::Plus, local),
            Layout::TwoSided => bit(Sign::Minus, local - b),
            Layout::Offset if local < b => bit(Sign::Plus, local),
            Layout::Offset => QubitRole::Translation { group },
            Layout::PlusOnly => bit(Sign::Plus, local),
            Layout::MinusOnly => bit(Sign::Minus, local),
        })
    }

    fn group_layout(&self, group: Group) -> Option<(usize, EncodingConfig, Layout)> {
        match group {
            Group::X(i) if i < self.n => Some((
                i * self.config.group_size(),
                self.config,
                Layout::of_scheme(self.config.scheme),
            )),
            Group::X(_) => None,
            Group::Lambda => {
                let l = self.lambda?;
                let layout = match l.sign {
                    LambdaSign::Positive => Layout::PlusOnly,
                    LambdaSign::Negative => Layout::MinusOnly,
                    LambdaSign::Both => Layout::of_scheme(l.config.scheme),
                };
                Some((self.lambda_base(), l.config, layout))
            }
        }
    }

    /// `(flat index, weight)` pairs such that the unscaled value of the group
    /// is `sum weight * q[index]`.
    pub fn linear_form(&self, group: Group) -> Result<Vec<(usize, f64)>> {
        let (base, cfg, layout) = self
            .group_layout(group)
            .ok_or_else(|| Error::Index(format!("{group:?} is not valid for this registry")))?;
        let b = cfg.bits();
        let plus = cfg.exponents().enumerate().map(|(o, l)| (base + o, pow2(l)));
        let minus = cfg.exponents().enumerate().map(|(o, l)| (base + o, -pow2(l)));
        Ok(match layout {
            Layout::TwoSided => plus
                .chain(cfg.exponents().enumerate().map(|(o, l)| (base + b + o, -pow2(l))))
                .collect(),
            Layout::Offset => plus.chain([(base + b, -cfg.translation())]).collect(),
            Layout::PlusOnly => plus.collect(),
            Layout::MinusOnly => minus.collect(),
        })
    }

    fn decode_group(&self, group: Group, bits: &[u8]) -> f64 {
        let scale = match group {
            Group::X(_) => self.config.scale_c,
            Group::Lambda => self.lambda.map_or(1, |l| l.config.scale_c),
        } as f64;
        let raw: f64 = self
            .linear_form(group)
            .expect("group in range")
            .into_iter()
            .filter(|&(idx, _)| bits[idx] != 0)
            .map(|(_, w)| w)
            .sum();
        // adding 0.0 turns an empty negative sum (-0.0) into 0.0
        raw / scale + 0.0
    }

    /// Decodes `x` (and the eigenvalue, if registered). Auxiliary bits are ignored.
    ///
    /// Accepts either the full qubit vector or just the encoded prefix.
    pub fn decode(&self, bits: &[u8]) -> Result<DecodedSolution> {
        if bits.len() != self.total_qubits() && bits.len() != self.num_encoded() {
            return Err(Error::Dimension(format!(
                "bit vector has length {}, registry has {} qubits",
                bits.len(),
                self.total_qubits()
            )));
        }
        let x = (0..self.n).map(|i| self.decode_group(Group::X(i), bits)).collect();
        let lambda = self.lambda.map(|_| self.decode_group(Group::Lambda, bits));
        Ok(DecodedSolution {
            x,
            lambda,
            residual: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    TwoSided,
    Offset,
    PlusOnly,
    MinusOnly,
}

impl Layout {
    fn of_scheme(s: Scheme) -> Self {
        match s {
            Scheme::TwoSided => Layout::TwoSided,
            Scheme::Offset => Layout::Offset,
        }
    }
}

/// Rewrites `Ax = b` as `A y = c b` with `y = c x` on non-negative exponents.
///
/// The exponent range is widened to the smallest `[0, L]` whose representable
/// range covers `c` times the original one; decode divides by the recorded
/// scale, so solutions of the scaled system map back to the original.
pub fn apply_scaling(problem: &LinearSystemProblem, c: u64) -> Result<LinearSystemProblem> {
    if c == 0 {
        return Err(Error::Config("scaling factor must be at least 1".into()));
    }
    if c == 1 {
        return Ok(problem.clone());
    }
    let cfg = *problem.config();
    let (lo, hi) = representable_range(&cfg);
    let target_scale = cfg.scale_c.checked_mul(c).ok_or_else(|| {
        Error::Config("scale factor overflow".into())
    })?;
    let (lo, hi) = (lo * target_scale as f64, hi * target_scale as f64);
    let mut l_max = 0;
    loop {
        let trial = EncodingConfig {
            l_min: 0,
            l_max,
            scheme: cfg.scheme,
            scale_c: 1,
        };
        trial.validate()?;
        let (tlo, thi) = representable_range(&trial);
        if tlo <= lo && thi >= hi {
            break;
        }
        l_max += 1;
    }
    let config = EncodingConfig {
        l_min: 0,
        l_max,
        scheme: cfg.scheme,
        scale_c: target_scale,
    };
    let b = problem.b().iter().map(|v| v * c as f64).collect();
    LinearSystemProblem::new(problem.a().to_vec(), b, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits_of(s: u64, n: usize) -> Vec<u8> {
        (0..n).map(|i| ((s >> i) & 1) as u8).collect()
    }

    #[test]
    fn two_sided_indices() {
        let reg = VariableRegistry::new(2, EncodingConfig::two_sided(0, 1).unwrap()).unwrap();
        let minus0 = QubitRole::Bit {
            group: Group::X(0),
            sign: Sign::Minus,
            exponent: 0,
        };
        assert_eq!(reg.flat_index(minus0).unwrap(), 2);
        let plus1 = QubitRole::Bit {
            group: Group::X(1),
            sign: Sign::Plus,
            exponent: 0,
        };
        assert_eq!(reg.flat_index(plus1).unwrap(), 4);
        assert_eq!(reg.total_qubits(), 8);
    }

    #[test]
    fn offset_translation_index() {
        let reg = VariableRegistry::new(2, EncodingConfig::offset(0, 1).unwrap()).unwrap();
        let t = QubitRole::Translation { group: Group::X(0) };
        assert_eq!(reg.flat_index(t).unwrap(), 2);
        assert_eq!(reg.total_qubits(), 6);
    }

    #[test]
    fn invalid_roles_rejected() {
        let reg = VariableRegistry::new(2, EncodingConfig::two_sided(0, 1).unwrap()).unwrap();
        let cases = [
            QubitRole::Bit {
                group: Group::X(2),
                sign: Sign::Plus,
                exponent: 0,
            },
            QubitRole::Bit {
                group: Group::X(0),
                sign: Sign::Plus,
                exponent: 2,
            },
            QubitRole::Translation { group: Group::X(0) },
            QubitRole::Bit {
                group: Group::Lambda,
                sign: Sign::Plus,
                exponent: 0,
            },
            QubitRole::Aux(0),
        ];
        for role in cases {
            assert!(matches!(reg.flat_index(role), Err(Error::Index(_))), "{role:?}");
        }
    }

    #[test]
    fn flat_index_is_bijection() {
        let configs = [
            EncodingConfig::two_sided(0, 1).unwrap(),
            EncodingConfig::two_sided(-2, 1).unwrap(),
            EncodingConfig::offset(-1, 2).unwrap(),
        ];
        let signs = [LambdaSign::Positive, LambdaSign::Negative, LambdaSign::Both];
        for cfg in configs {
            for lcfg in configs {
                for sign in signs {
                    let reg = VariableRegistry::new(3, cfg)
                        .unwrap()
                        .with_lambda(lcfg, sign)
                        .unwrap()
                        .with_aux(4);
                    let mut seen = vec![false; reg.total_qubits()];
                    for idx in 0..reg.total_qubits() {
                        let role = reg.role_of(idx).unwrap();
                        let back = reg.flat_index(role).unwrap();
                        assert_eq!(back, idx);
                        assert!(!seen[back]);
                        seen[back] = true;
                    }
                    assert!(seen.iter().all(|&s| s));
                    assert!(reg.role_of(reg.total_qubits()).is_err());
                }
            }
        }
    }

    #[test]
    fn decode_two_sided_examples() {
        let reg = VariableRegistry::new(2, EncodingConfig::two_sided(0, 1).unwrap()).unwrap();
        let d = reg.decode(&[0, 0, 1, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(d.x, vec![-1.0, 0.0]);
        let d = reg.decode(&[0, 1, 1, 1, 0, 0, 0, 0]).unwrap();
        assert_eq!(d.x, vec![-1.0, 0.0]);
        let d = reg.decode(&[0; 8]).unwrap();
        assert_eq!(d.x, vec![0.0, 0.0]);
        assert_eq!(d.lambda, None);
        assert!(matches!(reg.decode(&[0; 7]), Err(Error::Dimension(_))));
    }

    #[test]
    fn decode_offset_example() {
        let reg = VariableRegistry::new(1, EncodingConfig::offset(0, 1).unwrap()).unwrap();
        assert_eq!(reg.decode(&[1, 1, 1]).unwrap().x, vec![-1.0]);
        assert_eq!(reg.decode(&[0, 0, 0]).unwrap().x, vec![0.0]);
    }

    #[test]
    fn decode_scaled_and_lambda() {
        let cfg = EncodingConfig::two_sided(0, 3).unwrap().with_scale(4).unwrap();
        let reg = VariableRegistry::new(1, cfg)
            .unwrap()
            .with_lambda(EncodingConfig::two_sided(0, 1).unwrap(), LambdaSign::Negative)
            .unwrap()
            .with_aux(2);
        // x bits: q+ = 0b0110 -> 6, lambda bits (negative only): [1, 1] -> -3
        let bits = [0, 1, 1, 0, 0, 0, 0, 0, 1, 1, 1, 0];
        let d = reg.decode(&bits).unwrap();
        assert_eq!(d.x, vec![1.5]);
        assert_eq!(d.lambda, Some(-3.0));
        // encoded prefix alone decodes identically
        assert_eq!(reg.decode(&bits[..10]).unwrap(), d);
    }

    #[test]
    fn ranges() {
        assert_eq!(representable_range(&EncodingConfig::two_sided(0, 1).unwrap()), (-3.0, 3.0));
        assert_eq!(representable_range(&EncodingConfig::offset(0, 1).unwrap()), (-4.0, 3.0));
        assert_eq!(representable_range(&EncodingConfig::two_sided(-1, 1).unwrap()), (-3.5, 3.5));
        let scaled = EncodingConfig::two_sided(0, 1).unwrap().with_scale(2).unwrap();
        assert_eq!(representable_range(&scaled), (-1.5, 1.5));
    }

    #[test]
    fn config_validation() {
        assert!(EncodingConfig::two_sided(2, 1).is_err());
        assert!(EncodingConfig::two_sided(0, 0).unwrap().with_scale(0).is_err());
        assert_eq!(EncodingConfig::offset(-1, 1).unwrap().group_size(), 4);
        assert!(VariableRegistry::new(0, EncodingConfig::offset(0, 0).unwrap()).is_err());
    }

    /// Preimage counts under the two-sided `l in {0, 1}` config.
    #[test]
    fn two_sided_preimage_counts() {
        let reg = VariableRegistry::new(1, EncodingConfig::two_sided(0, 1).unwrap()).unwrap();
        let count = |v: f64| {
            (0..16u64)
                .filter(|&s| reg.decode(&bits_of(s, 4)).unwrap().x[0] == v)
                .count()
        };
        assert_eq!(count(-1.0), 3);
        assert_eq!(count(2.0), 2);
        assert_eq!(count(3.0), 1);
        assert_eq!(count(-3.0), 1);
        for v in -3..=3 {
            assert!(count(f64::from(v)) >= 1);
        }
    }

    #[test]
    fn offset_preimages_unique() {
        for (lo, hi) in [(0, 1), (-1, 1), (0, 2)] {
            let cfg = EncodingConfig::offset(lo, hi).unwrap();
            let reg = VariableRegistry::new(1, cfg).unwrap();
            let n = cfg.group_size();
            let mut values: Vec<f64> = (0..1u64 << n)
                .map(|s| reg.decode(&bits_of(s, n)).unwrap().x[0])
                .collect();
            values.sort_by(f64::total_cmp);
            let len = values.len();
            values.dedup();
            assert_eq!(values.len(), len, "offset scheme must be injective");
            let (rlo, rhi) = representable_range(&cfg);
            assert_eq!(values[0], rlo);
            assert_eq!(*values.last().unwrap(), rhi);
        }
    }

    #[test]
    fn scaling_examples() {
        let a = vec![vec![3.0, 1.0], vec![-1.0, 2.0]];
        let p = LinearSystemProblem::new(a, vec![-1.0, 5.0], EncodingConfig::two_sided(0, 1).unwrap())
            .unwrap();
        assert_eq!(apply_scaling(&p, 1).unwrap(), p);
        let s = apply_scaling(&p, 100).unwrap();
        assert_eq!(s.b(), &[-100.0, 500.0]);
        assert_eq!(s.config().scale_c, 100);
        assert_eq!(s.config().l_min, 0);
        let (lo, hi) = representable_range(s.config());
        assert!(lo <= -3.0 && hi >= 3.0);
        assert!(apply_scaling(&p, 0).is_err());
    }

    #[test]
    fn scaling_fractional_exponents() {
        // [-6, 6] at scale 100 needs y up to 2^13 (14 positive bits)
        let p = LinearSystemProblem::new(
            vec![vec![1.0]],
            vec![0.5],
            EncodingConfig::two_sided(-6, 6).unwrap(),
        )
        .unwrap();
        let s = apply_scaling(&p, 100).unwrap();
        assert_eq!((s.config().l_min, s.config().l_max), (0, 13));
    }
}
