//! Classical samplers: exhaustive enumeration and simulated annealing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{QuboProblem, SampleSet, ENERGY_TOL};

/// Largest problem [`solve_exhaustive`] accepts.
pub const EXHAUSTIVE_CAP: usize = 25;

/// Coefficients arranged for O(1) flip deltas, neighbors stored row-compressed.
struct LocalFields {
    diag: Vec<f64>,
    start: Vec<usize>,
    adj: Vec<(usize, f64)>,
}

impl LocalFields {
    fn new(q: &QuboProblem) -> Self {
        let n = q.num_vars();
        let mut diag = vec![0.0; n];
        let mut rows = vec![Vec::new(); n];
        for ((i, j), c) in q.iter() {
            if i == j {
                diag[i] += c;
            } else {
                rows[i].push((j, c));
                rows[j].push((i, c));
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        let mut adj = Vec::new();
        for r in rows {
            adj.extend(r);
            start.push(adj.len());
        }
        Self { diag, start, adj }
    }

    fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[self.start[i]..self.start[i + 1]]
    }

    /// `field[i] = Q_ii + sum_j Q_ij x_j`; flipping `i` changes the energy by
    /// `(1 - 2 x_i) field[i]`.
    fn fields(&self, bits: &[u8]) -> Vec<f64> {
        (0..self.diag.len())
            .map(|i| {
                self.diag[i]
                    + self
                        .neighbors(i)
                        .iter()
                        .filter(|(j, _)| bits[*j] != 0)
                        .map(|(_, c)| c)
                        .sum::<f64>()
            })
            .collect()
    }

    fn flip(&self, bits: &mut [u8], field: &mut [f64], i: usize) -> f64 {
        let delta = if bits[i] == 0 { field[i] } else { -field[i] };
        let sign = if bits[i] == 0 { 1.0 } else { -1.0 };
        bits[i] ^= 1;
        for &(j, c) in self.neighbors(i) {
            field[j] += sign * c;
        }
        delta
    }
}

fn bits_of(s: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((s >> i) & 1) as u8).collect()
}

/// Every ground state of `q`, each with one occurrence.
pub fn solve_exhaustive(q: &QuboProblem) -> Result<SampleSet> {
    solve_exhaustive_within(q, 0.0)
}

/// Every bitstring whose energy is within `margin` of the minimum.
///
/// Enumeration runs a Gray-code walk per chunk of high bits; candidate
/// energies are then re-evaluated from scratch so the reported energies are
/// exact.
pub fn solve_exhaustive_within(q: &QuboProblem, margin: f64) -> Result<SampleSet> {
    let n = q.num_vars();
    if n > EXHAUSTIVE_CAP {
        return Err(Error::Capacity {
            num_vars: n,
            cap: EXHAUSTIVE_CAP,
        });
    }
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(Error::Config(format!("margin must be finite and non-negative, got {margin}")));
    }
    if n == 0 {
        return Ok(SampleSet::from_reads([(Vec::new(), q.offset())]));
    }
    let lf = LocalFields::new(q);
    let high = n.min(6);
    let low = n - high;
    let slack = 1e-8 * (1.0 + q.abs_sum());

    // walks every low assignment for a fixed high part, calling `visit(bits, approx)`
    let walk = |chunk: u64, visit: &mut dyn FnMut(&[u8], f64)| {
        let mut bits = bits_of(chunk << low, n);
        let mut field = lf.fields(&bits);
        let mut e = q.body_energy_unchecked(&bits);
        visit(&bits, e);
        for t in 1u64..1 << low {
            e += lf.flip(&mut bits, &mut field, t.trailing_zeros() as usize);
            visit(&bits, e);
        }
    };

    let approx_min = (0..1u64 << high)
        .into_par_iter()
        .map(|chunk| {
            let mut m = f64::INFINITY;
            walk(chunk, &mut |_, e| m = m.min(e));
            m
        })
        .reduce(|| f64::INFINITY, f64::min);

    let threshold = approx_min + margin + slack;
    let mut candidates: Vec<(Vec<u8>, f64)> = (0..1u64 << high)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut found = Vec::new();
            walk(chunk, &mut |bits, e| {
                if e <= threshold {
                    found.push((bits.to_vec(), q.offset() + q.body_energy_unchecked(bits)));
                }
            });
            found
        })
        .collect();
    let exact_min = candidates
        .iter()
        .map(|(_, e)| *e)
        .fold(f64::INFINITY, f64::min);
    candidates.retain(|(_, e)| *e - exact_min <= margin + ENERGY_TOL);
    Ok(SampleSet::from_reads(candidates))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub reads: usize,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            sweeps: 1000,
            beta_start: 0.1,
            beta_end: 10.0,
            reads: 1000,
            seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.reads == 0 {
            return Err(Error::Config("sweeps and reads must be at least 1".into()));
        }
        if !(self.beta_start > 0.0 && self.beta_start < self.beta_end && self.beta_end.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < beta_start < beta_end, got {} and {}",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }

    /// Geometric interpolation from `beta_start` to `beta_end`, one value per sweep.
    pub fn betas(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_start];
        }
        let ratio = (self.beta_end / self.beta_start).ln() / (self.sweeps - 1) as f64;
        (0..self.sweeps)
            .map(|s| self.beta_start * (ratio * s as f64).exp())
            .collect()
    }
}

/// Uphill moves with `beta * delta` above this are rejected without a draw:
/// `exp(-40)` is below the resolution of a uniform `f64` sample.
const REJECT_CUTOFF: f64 = 40.0;

/// One annealing run. Returns the final bits and the incrementally tracked energy.
fn anneal_once(q: &QuboProblem, lf: &LocalFields, betas: &[f64], seed: u64, read: u64) -> (Vec<u8>, f64) {
    let n = q.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(read);
    let mut bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
    let mut field = lf.fields(&bits);
    let mut energy = q.offset() + q.body_energy_unchecked(&bits);
    for &beta in betas {
        for i in 0..n {
            let delta = if bits[i] == 0 { field[i] } else { -field[i] };
            let x = beta * delta;
            if x <= 0.0 || (x < REJECT_CUTOFF && rng.gen::<f64>() < (-x).exp()) {
                energy += lf.flip(&mut bits, &mut field, i);
            }
        }
    }
    (bits, energy)
}

/// Single-flip Metropolis annealing, one independent run per read.
///
/// Read `r` draws from ChaCha8 stream `r` of `schedule.seed`, so the result
/// does not depend on how reads are scheduled across threads.
pub fn solve_sa(q: &QuboProblem, schedule: &AnnealSchedule) -> Result<SampleSet> {
    schedule.validate()?;
    if q.num_vars() == 0 {
        return Err(Error::Dimension("problem has no variables".into()));
    }
    let lf = LocalFields::new(q);
    let betas = schedule.betas();
    let reads: Vec<(Vec<u8>, f64)> = (0..schedule.reads as u64)
        .into_par_iter()
        .map(|r| {
            let (bits, _) = anneal_once(q, &lf, &betas, schedule.seed, r);
            let e = q.offset() + q.body_energy_unchecked(&bits);
            (bits, e)
        })
        .collect();
    Ok(SampleSet::from_reads(reads))
}

/// Records within `tol` of the minimum; see [`SampleSet::ground_states`].
pub fn ground_states(s: &SampleSet, tol: f64) -> Result<SampleSet> {
    s.ground_states(tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_qubo(n: usize, seed: u64) -> QuboProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q = QuboProblem::new(n);
        for i in 0..n {
            for j in i..n {
                if rng.gen_bool(0.6) {
                    q.set(i, j, rng.gen_range(-10..=10) as f64 * 0.5).unwrap();
                }
            }
        }
        q.set_offset(rng.gen_range(-3.0..3.0)).unwrap();
        q
    }

    fn brute_force_min(q: &QuboProblem) -> (f64, Vec<Vec<u8>>) {
        let n = q.num_vars();
        let all: Vec<_> = (0..1u64 << n)
            .map(|s| {
                let b = bits_of(s, n);
                (q.energy(&b).unwrap(), b)
            })
            .collect();
        let min = all.iter().map(|(e, _)| *e).fold(f64::INFINITY, f64::min);
        let mut g: Vec<_> = all
            .into_iter()
            .filter(|(e, _)| (e - min).abs() <= 1e-9)
            .map(|(_, b)| b)
            .collect();
        g.sort();
        (min, g)
    }

    #[test]
    fn exhaustive_matches_direct_enumeration() {
        for (n, seed) in [(1, 1), (3, 2), (7, 3), (9, 4), (12, 5)] {
            let q = random_qubo(n, seed);
            let (min, ground) = brute_force_min(&q);
            let s = solve_exhaustive(&q).unwrap();
            assert_eq!(s.min_energy().unwrap(), min);
            let mut got: Vec<_> = s.records.iter().map(|r| r.bits.clone()).collect();
            got.sort();
            assert_eq!(got, ground);
            assert!(s.records.iter().all(|r| r.occurrences == 1));
        }
    }

    #[test]
    fn exhaustive_margin_window() {
        let q = random_qubo(8, 11);
        let s = solve_exhaustive_within(&q, 2.0).unwrap();
        let min = s.min_energy().unwrap();
        let expected = (0..256u64)
            .filter(|&x| q.energy(&bits_of(x, 8)).unwrap() - min <= 2.0 + 1e-9)
            .count();
        assert_eq!(s.len(), expected);
        assert!(s.energies_consistent(&q));
    }

    #[test]
    fn empty_qubo_all_states_tie() {
        let s = solve_exhaustive(&QuboProblem::new(2)).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.records.iter().all(|r| r.energy == 0.0));
    }

    #[test]
    fn exhaustive_cap() {
        let q = QuboProblem::new(EXHAUSTIVE_CAP + 1);
        assert!(matches!(solve_exhaustive(&q), Err(Error::Capacity { .. })));
    }

    #[test]
    fn sa_single_variable() {
        let mut q = QuboProblem::new(1);
        q.set(0, 0, -5.0).unwrap();
        let s = solve_sa(&q, &AnnealSchedule { reads: 50, ..Default::default() }).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.records[0].bits, vec![1]);
        assert_eq!(s.records[0].energy, -5.0);
        assert_eq!(s.records[0].occurrences, 50);
    }

    #[test]
    fn sa_is_deterministic_and_consistent() {
        let q = random_qubo(10, 7);
        let sched = AnnealSchedule {
            sweeps: 200,
            reads: 64,
            seed: 42,
            ..Default::default()
        };
        let a = solve_sa(&q, &sched).unwrap();
        let b = solve_sa(&q, &sched).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total_occurrences(), 64);
        assert!(a.energies_consistent(&q));
        let other = solve_sa(&q, &AnnealSchedule { seed: 43, ..sched }).unwrap();
        assert_eq!(other.total_occurrences(), 64);
    }

    #[test]
    fn incremental_energy_tracks_full_evaluation() {
        for seed in 0..5 {
            let q = random_qubo(12, 100 + seed);
            let lf = LocalFields::new(&q);
            let sched = AnnealSchedule {
                sweeps: 300,
                ..Default::default()
            };
            for read in 0..10 {
                let (bits, tracked) = anneal_once(&q, &lf, &sched.betas(), seed, read);
                assert!((tracked - q.energy(&bits).unwrap()).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn sa_finds_exhaustive_minimum_on_small_problems() {
        for seed in 0..8 {
            let q = random_qubo(6 + seed as usize, seed);
            let exact = solve_exhaustive(&q).unwrap().min_energy().unwrap();
            let s = solve_sa(&q, &AnnealSchedule { seed, ..Default::default() }).unwrap();
            assert!((s.min_energy().unwrap() - exact).abs() <= 1e-9);
        }
    }

    #[test]
    fn schedule_validation() {
        let bad = [
            AnnealSchedule { sweeps: 0, ..Default::default() },
            AnnealSchedule { reads: 0, ..Default::default() },
            AnnealSchedule { beta_start: 5.0, beta_end: 1.0, ..Default::default() },
            AnnealSchedule { beta_start: 0.0, ..Default::default() },
        ];
        for s in bad {
            assert!(s.validate().is_err());
        }
        let betas = AnnealSchedule::default().betas();
        assert_eq!(betas.len(), 1000);
        assert!((betas[0] - 0.1).abs() < 1e-12);
        assert!((betas[999] - 10.0).abs() < 1e-9);
    }
}
