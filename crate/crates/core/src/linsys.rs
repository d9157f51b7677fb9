//! QUBO assembly for `min ||Ax - b||^2`.
//!
//! Both models are accumulated row by row: each row `k` of `(A, b)` yields a
//! partial coefficient map, and partial maps are folded into the result in
//! ascending `k`. The parallel builder computes the same partial maps on
//! worker threads and folds them in the same order, so its output is
//! bit-identical to the serial build.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::encoding::{pow2, EncodingConfig, Group, Scheme, VariableRegistry};
use crate::error::{Error, Result};
use crate::model::QuboProblem;

/// Square system `Ax = b` together with the encoding of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystemProblem {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    config: EncodingConfig,
}

impl LinearSystemProblem {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, config: EncodingConfig) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::Dimension("matrix A is empty".into()));
        }
        check_square(&a)?;
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "b has length {}, A is {n}x{n}",
                b.len()
            )));
        }
        if a.iter().flatten().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::Config("A and b must be finite".into()));
        }
        config.validate()?;
        Ok(Self { a, b, config })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    /// Right-hand side the QUBO is built against (already multiplied by `scale_c`).
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn config(&self) -> &EncodingConfig {
        &self.config
    }

    /// `||A x - b / scale_c||` for a decoded `x`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let c = self.config.scale_c as f64;
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bk)| {
                let r: f64 = row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - bk / c;
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `sum_k b_k^2`, the constant dropped from the QUBO body.
    pub fn b_norm_sq(&self) -> f64 {
        self.b.iter().map(|v| v * v).sum()
    }
}

pub(crate) fn check_square(a: &[Vec<f64>]) -> Result<()> {
    let n = a.len();
    for (k, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Dimension(format!(
                "row {k} of A has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    Ok(())
}

/// How the same-variable `q+ q-` coefficients of the two-sided model are set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossTermPolicy {
    /// Keep the natural negative coefficients `-sum_k a_ki^2 2^(l1+l2+1)`.
    Full,
    /// Drop them.
    Zeroed,
    /// Full coefficient plus a positive constant.
    Penalty(f64),
}

impl CrossTermPolicy {
    fn validate(&self) -> Result<()> {
        match *self {
            CrossTermPolicy::Penalty(v) if !(v.is_finite() && v > 0.0) => Err(Error::Config(
                format!("penalty must be positive and finite, got {v}"),
            )),
            _ => Ok(()),
        }
    }
}

type Partial = BTreeMap<(usize, usize), f64>;

fn bump(map: &mut Partial, p: usize, q: usize, v: f64) {
    let key = if p <= q { (p, q) } else { (q, p) };
    *map.entry(key).or_insert(0.0) += v;
}

/// Flat indices of `(+, -)` bits of unknown `i`, one entry per exponent.
fn two_sided_indices(reg: &VariableRegistry, i: usize) -> (Vec<usize>, Vec<usize>) {
    let form = reg.linear_form(Group::X(i)).expect("unknown in range");
    let b = reg.config().bits();
    (
        form[..b].iter().map(|&(idx, _)| idx).collect(),
        form[b..].iter().map(|&(idx, _)| idx).collect(),
    )
}

fn model1_row(p: &LinearSystemProblem, reg: &VariableRegistry, policy: CrossTermPolicy, k: usize) -> Partial {
    let cfg = p.config();
    let exps: Vec<i32> = cfg.exponents().collect();
    let n = p.n();
    let row = &p.a[k];
    let bk = p.b[k];
    let idx: Vec<_> = (0..n).map(|i| two_sided_indices(reg, i)).collect();
    let mut m = Partial::new();

    for i in 0..n {
        let a = row[i];
        let a2 = a * a;
        let (plus, minus) = &idx[i];
        for (o, &l) in exps.iter().enumerate() {
            let sq = a2 * pow2(2 * l);
            let lin = pow2(l + 1) * a * bk;
            bump(&mut m, plus[o], plus[o], sq - lin);
            bump(&mut m, minus[o], minus[o], sq + lin);
        }
        for o1 in 0..exps.len() {
            for o2 in o1 + 1..exps.len() {
                let c = a2 * pow2(exps[o1] + exps[o2] + 1);
                bump(&mut m, plus[o1], plus[o2], c);
                bump(&mut m, minus[o1], minus[o2], c);
            }
        }
        if policy != CrossTermPolicy::Zeroed {
            for (o1, &l1) in exps.iter().enumerate() {
                for (o2, &l2) in exps.iter().enumerate() {
                    bump(&mut m, plus[o1], minus[o2], -a2 * pow2(l1 + l2 + 1));
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let aa = row[i] * row[j];
            let (pi, mi) = &idx[i];
            let (pj, mj) = &idx[j];
            for (o1, &l1) in exps.iter().enumerate() {
                for (o2, &l2) in exps.iter().enumerate() {
                    let c = pow2(l1 + l2 + 1) * aa;
                    bump(&mut m, pi[o1], pj[o2], c);
                    bump(&mut m, mi[o1], mj[o2], c);
                    bump(&mut m, pi[o1], mj[o2], -c);
                    bump(&mut m, mi[o1], pj[o2], -c);
                }
            }
        }
    }
    m
}

fn model2_row(p: &LinearSystemProblem, reg: &VariableRegistry, k: usize) -> Partial {
    let cfg = p.config();
    let exps: Vec<i32> = cfg.exponents().collect();
    let b = cfg.bits();
    let t = cfg.translation();
    let n = p.n();
    let row = &p.a[k];
    let bk = p.b[k];
    let forms: Vec<_> = (0..n)
        .map(|i| reg.linear_form(Group::X(i)).expect("unknown in range"))
        .collect();
    let plus = |i: usize, o: usize| forms[i][o].0;
    let neg = |i: usize| forms[i][b].0;
    let mut m = Partial::new();

    for (i, &a) in row.iter().enumerate() {
        let a2 = a * a;
        bump(&mut m, neg(i), neg(i), a2 * t * t + 2.0 * t * a * bk);
        for (o, &l) in exps.iter().enumerate() {
            bump(&mut m, plus(i, o), plus(i, o), a2 * pow2(2 * l) - pow2(l + 1) * a * bk);
            bump(&mut m, neg(i), plus(i, o), -a2 * 2.0 * t * pow2(l));
        }
        for o1 in 0..exps.len() {
            for o2 in o1 + 1..exps.len() {
                bump(&mut m, plus(i, o1), plus(i, o2), a2 * pow2(exps[o1] + exps[o2] + 1));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let aa = row[i] * row[j];
            bump(&mut m, neg(i), neg(j), 2.0 * t * t * aa);
            for (o, &l) in exps.iter().enumerate() {
                let c = 2.0 * t * pow2(l) * aa;
                bump(&mut m, neg(i), plus(j, o), -c);
                bump(&mut m, plus(i, o), neg(j), -c);
            }
            for (o1, &l1) in exps.iter().enumerate() {
                for (o2, &l2) in exps.iter().enumerate() {
                    bump(&mut m, plus(i, o1), plus(j, o2), pow2(l1 + l2 + 1) * aa);
                }
            }
        }
    }
    m
}

fn fold(num_vars: usize, partials: impl IntoIterator<Item = Partial>) -> QuboProblem {
    let mut total = Partial::new();
    for part in partials {
        for (key, v) in part {
            *total.entry(key).or_insert(0.0) += v;
        }
    }
    let mut q = QuboProblem::new(num_vars);
    for ((i, j), v) in total {
        q.set(i, j, v).expect("indices come from the registry");
    }
    q
}

fn finish_model1(
    p: &LinearSystemProblem,
    reg: &VariableRegistry,
    policy: CrossTermPolicy,
    mut q: QuboProblem,
) -> QuboProblem {
    if let CrossTermPolicy::Penalty(v) = policy {
        for i in 0..p.n() {
            let (plus, minus) = two_sided_indices(reg, i);
            for &pi in &plus {
                for &mi in &minus {
                    q.add(pi, mi, v).expect("registry index");
                }
            }
        }
    }
    q.prune_zeros();
    q.set_offset(p.b_norm_sq()).expect("finite inputs");
    q
}

fn model1_setup(p: &LinearSystemProblem, policy: CrossTermPolicy) -> Result<VariableRegistry> {
    if p.config().scheme != Scheme::TwoSided {
        return Err(Error::Config("model 1 requires the two-sided encoding".into()));
    }
    policy.validate()?;
    VariableRegistry::new(p.n(), *p.config())
}

/// Two-sided QUBO for `||Ax - b||^2`.
///
/// The stored offset is `sum_k b_k^2`, so the full energy of a bitstring is the
/// squared residual of its decode (exactly so under [`CrossTermPolicy::Full`]).
pub fn build_model1(
    p: &LinearSystemProblem,
    policy: CrossTermPolicy,
) -> Result<(QuboProblem, VariableRegistry)> {
    let reg = model1_setup(p, policy)?;
    let q = fold(
        reg.total_qubits(),
        (0..p.n()).map(|k| model1_row(p, &reg, policy, k)),
    );
    Ok((finish_model1(p, &reg, policy, q), reg))
}

/// [`build_model1`] with the per-row partial maps computed on `workers` threads.
pub fn build_model1_parallel(
    p: &LinearSystemProblem,
    policy: CrossTermPolicy,
    workers: usize,
) -> Result<(QuboProblem, VariableRegistry)> {
    if workers == 0 {
        return Err(Error::Config("at least one worker is required".into()));
    }
    let reg = model1_setup(p, policy)?;
    let n = p.n();
    let chunk = n.div_ceil(workers);
    let rows: Vec<usize> = (0..n).collect();
    let partials: Vec<Partial> = std::thread::scope(|s| {
        let handles: Vec<_> = rows
            .chunks(chunk)
            .map(|ks| {
                let reg = &reg;
                s.spawn(move || {
                    ks.iter()
                        .map(|&k| model1_row(p, reg, policy, k))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let q = fold(reg.total_qubits(), partials);
    Ok((finish_model1(p, &reg, policy, q), reg))
}

/// Offset-encoding QUBO for `||Ax - b||^2`. Offset is `sum_k b_k^2`.
pub fn build_model2(p: &LinearSystemProblem) -> Result<(QuboProblem, VariableRegistry)> {
    if p.config().scheme != Scheme::Offset {
        return Err(Error::Config("model 2 requires the offset encoding".into()));
    }
    let reg = VariableRegistry::new(p.n(), *p.config())?;
    let mut q = fold(reg.total_qubits(), (0..p.n()).map(|k| model2_row(p, &reg, k)));
    q.prune_zeros();
    q.set_offset(p.b_norm_sq()).expect("finite inputs");
    Ok((q, reg))
}

/// Operation counts for assembling the cross-variable quadratic terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostEstimate {
    /// Off-diagonal `(i, j)` pairs, `n(n-1)/2`.
    pub pair_count: u128,
    /// `(4m + 1) + n(n-1)/2`.
    pub per_pair_total: u128,
    /// `(4m + 1) n + n^2 (n-1) / 2`.
    pub grand_total: u128,
}

pub fn estimate_cost(n: u64, m: u64) -> Result<CostEstimate> {
    if n == 0 {
        return Err(Error::Dimension("n must be at least 1".into()));
    }
    let (n, m) = (u128::from(n), u128::from(m));
    let overflow = || Error::Overflow(format!("cost for n = {n}, m = {m} exceeds 128 bits"));
    // n (n - 1) is even, so halve before multiplying by n
    let pairs = n * (n - 1) / 2;
    let spread = 4 * m + 1;
    let grand_total = spread
        .checked_mul(n)
        .zip(pairs.checked_mul(n))
        .and_then(|(a, b)| a.checked_add(b))
        .ok_or_else(overflow)?;
    Ok(CostEstimate {
        pair_count: pairs,
        per_pair_total: spread.checked_add(pairs).ok_or_else(overflow)?,
        grand_total,
    })
}
