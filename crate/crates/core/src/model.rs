//! QUBO, Ising and pseudo-Boolean polynomial representations.
//!
//! Every problem type here stores its coefficients sparsely: an absent key
//! means a zero coefficient. Energies are evaluated in `f64`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Absolute tolerance used for energy comparisons throughout the crate.
pub const ENERGY_TOL: f64 = 1e-9;

/// Quadratic unconstrained binary optimization problem.
///
/// Energy of a bit vector `x` is
/// `offset + sum_i Q[i,i] x_i + sum_{i<j} Q[i,j] x_i x_j`.
/// Keys are stored upper-triangular (`i <= j`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuboProblem {
    num_vars: usize,
    coefficients: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboProblem {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            coefficients: BTreeMap::new(),
            offset: 0.0,
        }
    }

    /// Builds a problem from the upper triangle of a dense square matrix.
    /// Entries below the diagonal are ignored and zero entries are not stored.
    pub fn from_upper_dense(matrix: &[Vec<f64>]) -> Result<Self> {
        let n = matrix.len();
        let mut q = Self::new(n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate().skip(i) {
                if v != 0.0 {
                    q.set(i, j, v)?;
                }
            }
        }
        Ok(q)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) -> Result<()> {
        if !offset.is_finite() {
            return Err(Error::Config(format!("offset must be finite, got {offset}")));
        }
        self.offset = offset;
        Ok(())
    }

    fn key(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if j >= self.num_vars {
            return Err(Error::Index(format!(
                "pair ({i}, {j}) outside {} variables",
                self.num_vars
            )));
        }
        Ok((i, j))
    }

    /// Adds `value` to the coefficient of `(i, j)`. The pair is normalized to `i <= j`.
    pub fn add(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let key = self.key(i, j)?;
        *self.coefficients.entry(key).or_insert(0.0) += value;
        Ok(())
    }

    /// Overwrites the coefficient of `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let key = self.key(i, j)?;
        self.coefficients.insert(key, value);
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.coefficients.get(&(i, j)).copied().unwrap_or(0.0)
    }

    /// Stored coefficients in `(i, j)` order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.coefficients.iter().map(|(&k, &v)| (k, v))
    }

    /// Number of stored (possibly zero) coefficients.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Drops stored coefficients that are exactly zero.
    pub fn prune_zeros(&mut self) {
        self.coefficients.retain(|_, v| *v != 0.0);
    }

    /// Dense upper-triangular matrix view (lower triangle zero).
    pub fn to_upper_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.num_vars]; self.num_vars];
        for (&(i, j), &v) in &self.coefficients {
            m[i][j] = v;
        }
        m
    }

    pub fn energy(&self, bits: &[u8]) -> Result<f64> {
        check_len(bits.len(), self.num_vars)?;
        Ok(self.offset + self.body_energy_unchecked(bits))
    }

    /// Energy without the constant offset.
    pub fn body_energy(&self, bits: &[u8]) -> Result<f64> {
        check_len(bits.len(), self.num_vars)?;
        Ok(self.body_energy_unchecked(bits))
    }

    pub(crate) fn body_energy_unchecked(&self, bits: &[u8]) -> f64 {
        let mut e = 0.0;
        for (&(i, j), &c) in &self.coefficients {
            if bits[i] != 0 && bits[j] != 0 {
                e += c;
            }
        }
        e
    }

    /// Sum of absolute coefficient values.
    pub fn abs_sum(&self) -> f64 {
        self.coefficients.values().map(|v| v.abs()).sum()
    }
}

/// Free-function form of [`QuboProblem::energy`].
pub fn qubo_energy(q: &QuboProblem, bits: &[u8]) -> Result<f64> {
    q.energy(bits)
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::Dimension(format!(
            "bit vector has length {got}, problem has {expected} variables"
        )));
    }
    Ok(())
}

/// Ising problem with the Hamiltonian
/// `H(s) = offset - sum_i h_i s_i - sum_{i<j} J_ij s_i s_j`, `s_i` in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingProblem {
    pub h: Vec<f64>,
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingProblem {
    pub fn new(num_vars: usize) -> Self {
        Self {
            h: vec![0.0; num_vars],
            j: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.h.len()
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        check_len(spins.len(), self.h.len())?;
        let mut e = self.offset;
        for (hi, &s) in self.h.iter().zip(spins) {
            e -= hi * f64::from(s);
        }
        for (&(a, b), &c) in &self.j {
            e -= c * f64::from(spins[a]) * f64::from(spins[b]);
        }
        Ok(e)
    }
}

/// Substitutes `x = (s + 1) / 2`.
pub fn qubo_to_ising(q: &QuboProblem) -> IsingProblem {
    let mut out = IsingProblem::new(q.num_vars());
    let mut offset = q.offset();
    for ((i, j), c) in q.iter() {
        if i == j {
            out.h[i] -= c / 2.0;
            offset += c / 2.0;
        } else {
            out.h[i] -= c / 4.0;
            out.h[j] -= c / 4.0;
            *out.j.entry((i, j)).or_insert(0.0) -= c / 4.0;
            offset += c / 4.0;
        }
    }
    out.offset = offset;
    out
}

/// Substitutes `s = 2x - 1`.
pub fn ising_to_qubo(is: &IsingProblem) -> QuboProblem {
    let n = is.num_vars();
    let mut q = QuboProblem::new(n);
    let mut offset = is.offset;
    for (i, &h) in is.h.iter().enumerate() {
        if h != 0.0 {
            q.coefficients.insert((i, i), -2.0 * h);
        }
        offset += h;
    }
    for (&(a, b), &c) in &is.j {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        *q.coefficients.entry((a, b)).or_insert(0.0) -= 4.0 * c;
        *q.coefficients.entry((a, a)).or_insert(0.0) += 2.0 * c;
        *q.coefficients.entry((b, b)).or_insert(0.0) += 2.0 * c;
        offset -= c;
    }
    q.offset = offset;
    q.prune_zeros();
    q
}

/// Multilinear polynomial over binary variables with degree at most 4.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PseudoBooleanPolynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<usize>, f64>,
}

pub const MAX_POLY_DEGREE: usize = 4;

impl PseudoBooleanPolynomial {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Adds `coefficient * prod(vars)`. Repeated variables collapse (`q^2 = q`).
    pub fn add_term(&mut self, vars: &[usize], coefficient: f64) -> Result<()> {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.len() > MAX_POLY_DEGREE {
            return Err(Error::UnsupportedDegree(key.len()));
        }
        if let Some(&v) = key.last() {
            if v >= self.num_vars {
                return Err(Error::Index(format!(
                    "variable {v} outside {} variables",
                    self.num_vars
                )));
            }
        }
        *self.terms.entry(key).or_insert(0.0) += coefficient;
        Ok(())
    }

    pub fn coefficient(&self, vars: &[usize]) -> f64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn prune_zeros(&mut self) {
        self.terms.retain(|_, v| *v != 0.0);
    }

    pub fn energy(&self, bits: &[u8]) -> Result<f64> {
        check_len(bits.len(), self.num_vars)?;
        Ok(self.energy_unchecked(bits))
    }

    pub(crate) fn energy_unchecked(&self, bits: &[u8]) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.iter().all(|&v| bits[v] != 0))
            .map(|(_, &c)| c)
            .sum()
    }

    pub(crate) fn into_terms(self) -> BTreeMap<Vec<usize>, f64> {
        self.terms
    }
}

pub fn poly_energy(p: &PseudoBooleanPolynomial, bits: &[u8]) -> Result<f64> {
    p.energy(bits)
}

/// One distinct bitstring seen by a sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub bits: Vec<u8>,
    pub energy: f64,
    pub occurrences: u64,
}

/// Aggregated sampler output.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSet {
    pub records: Vec<Sample>,
}

impl SampleSet {
    /// Aggregates raw reads into distinct records sorted by energy, then bitstring.
    pub fn from_reads(reads: impl IntoIterator<Item = (Vec<u8>, f64)>) -> Self {
        let mut agg: BTreeMap<Vec<u8>, (f64, u64)> = BTreeMap::new();
        for (bits, energy) in reads {
            agg.entry(bits).or_insert((energy, 0)).1 += 1;
        }
        let mut records: Vec<Sample> = agg
            .into_iter()
            .map(|(bits, (energy, occurrences))| Sample {
                bits,
                energy,
                occurrences,
            })
            .collect();
        records.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.bits.cmp(&b.bits)));
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn min_energy(&self) -> Option<f64> {
        self.records.iter().map(|r| r.energy).min_by(f64::total_cmp)
    }

    pub fn total_occurrences(&self) -> u64 {
        self.records.iter().map(|r| r.occurrences).sum()
    }

    /// Records within `tol` of the lowest energy, most frequent first.
    pub fn ground_states(&self, tol: f64) -> Result<SampleSet> {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be finite and non-negative, got {tol}"
            )));
        }
        let min = self.min_energy().ok_or(Error::EmptySampleSet)?;
        let mut records: Vec<Sample> = self
            .records
            .iter()
            .filter(|r| r.energy - min <= tol)
            .cloned()
            .collect();
        records.sort_by(|a, b| {
            b.occurrences
                .cmp(&a.occurrences)
                .then_with(|| a.bits.cmp(&b.bits))
        });
        Ok(SampleSet { records })
    }

    /// True when every record's energy matches a fresh evaluation against `q`.
    pub fn energies_consistent(&self, q: &QuboProblem) -> bool {
        self.records.iter().all(|r| {
            q.energy(&r.bits)
                .map(|e| (e - r.energy).abs() <= ENERGY_TOL)
                .unwrap_or(false)
        })
    }
}
