//! Reduction of degree-4 pseudo-Boolean polynomials to QUBO form.
//!
//! Quartic terms are removed first by substituting a variable pair `ab` with a
//! fresh auxiliary `w`, enforced by the penalty `M (ab - 2aw - 2bw + 3w)`,
//! which is zero iff `w = ab` and at least `M` otherwise. Remaining cubic terms
//! `c xyz` are rewritten with one fresh auxiliary each:
//!
//! * `c < 0`: `c w (x + y + z - 2)`
//! * `c > 0`: `c (w (x + y + z - 1) + xy + yz + zx - x - y - z + 1)`
//!
//! For every assignment of the original variables, the minimum of the result
//! over the auxiliaries equals the input polynomial.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{PseudoBooleanPolynomial, QuboProblem, MAX_POLY_DEGREE};

/// Pair substitution `w = a * b` introduced while eliminating quartic terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Substitution {
    pub pair: (usize, usize),
    pub aux: usize,
    pub penalty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicBranch {
    Negative,
    Positive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicRewrite {
    pub term: [usize; 3],
    pub coefficient: f64,
    pub branch: CubicBranch,
    pub aux: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReductionPlan {
    pub substitutions: Vec<Substitution>,
    pub cubic_rewrites: Vec<CubicRewrite>,
}

impl ReductionPlan {
    pub fn num_aux(&self) -> usize {
        self.substitutions.len() + self.cubic_rewrites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num_aux() == 0
    }
}

type Terms = BTreeMap<Vec<usize>, f64>;

fn add(terms: &mut Terms, mut key: Vec<usize>, c: f64) {
    key.sort_unstable();
    key.dedup();
    *terms.entry(key).or_insert(0.0) += c;
}

fn contains_pair(key: &[usize], (a, b): (usize, usize)) -> bool {
    key.binary_search(&a).is_ok() && key.binary_search(&b).is_ok()
}

/// Pair occurring in the most degree >= 3 terms among pairs of quartic terms;
/// ties go to the lexicographically smallest pair.
fn select_pair(terms: &Terms) -> Option<(usize, usize)> {
    let mut candidates = BTreeSet::new();
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for key in terms.keys().filter(|k| k.len() >= 3) {
        for (x, &a) in key.iter().enumerate() {
            for &b in &key[x + 1..] {
                *counts.entry((a, b)).or_insert(0) += 1;
                if key.len() == 4 {
                    candidates.insert((a, b));
                }
            }
        }
    }
    candidates
        .into_iter()
        .max_by(|p, q| counts[p].cmp(&counts[q]).then_with(|| q.cmp(p)))
}

/// Quadratizes `poly`, appending auxiliaries after its variables.
pub fn quadratize(poly: &PseudoBooleanPolynomial) -> Result<(QuboProblem, ReductionPlan)> {
    let degree = poly.degree();
    if degree > MAX_POLY_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    let mut terms: Terms = poly.clone().into_terms();
    terms.retain(|_, c| *c != 0.0);
    let mut next = poly.num_vars();
    let mut plan = ReductionPlan::default();

    while let Some(pair) = select_pair(&terms) {
        let (a, b) = pair;
        let w = next;
        next += 1;
        let touched: Vec<Vec<usize>> = terms
            .keys()
            .filter(|k| contains_pair(k, pair))
            .cloned()
            .collect();
        let penalty = 1.0 + 2.0 * touched.iter().map(|k| terms[k].abs()).sum::<f64>();
        for key in touched.into_iter().filter(|k| k.len() >= 3) {
            let c = terms.remove(&key).expect("key collected above");
            let mut reduced: Vec<usize> = key.into_iter().filter(|&v| v != a && v != b).collect();
            reduced.push(w);
            add(&mut terms, reduced, c);
        }
        add(&mut terms, vec![a, b], penalty);
        add(&mut terms, vec![a, w], -2.0 * penalty);
        add(&mut terms, vec![b, w], -2.0 * penalty);
        add(&mut terms, vec![w], 3.0 * penalty);
        terms.retain(|_, c| *c != 0.0);
        plan.substitutions.push(Substitution {
            pair,
            aux: w,
            penalty,
        });
    }

    let cubics: Vec<(Vec<usize>, f64)> = terms
        .iter()
        .filter(|(k, _)| k.len() == 3)
        .map(|(k, &c)| (k.clone(), c))
        .collect();
    for (key, c) in cubics {
        terms.remove(&key);
        let (x, y, z) = (key[0], key[1], key[2]);
        let w = next;
        next += 1;
        let branch = if c < 0.0 {
            for v in [x, y, z] {
                add(&mut terms, vec![w, v], c);
            }
            add(&mut terms, vec![w], -2.0 * c);
            CubicBranch::Negative
        } else {
            for v in [x, y, z] {
                add(&mut terms, vec![w, v], c);
                add(&mut terms, vec![v], -c);
            }
            add(&mut terms, vec![w], -c);
            for (u, v) in [(x, y), (y, z), (x, z)] {
                add(&mut terms, vec![u, v], c);
            }
            add(&mut terms, vec![], c);
            CubicBranch::Positive
        };
        plan.cubic_rewrites.push(CubicRewrite {
            term: [x, y, z],
            coefficient: c,
            branch,
            aux: w,
        });
    }

    let mut q = QuboProblem::new(next);
    let mut offset = 0.0;
    for (key, c) in terms {
        match key.as_slice() {
            [] => offset += c,
            [i] => q.add(*i, *i, c)?,
            [i, j] => q.add(*i, *j, c)?,
            _ => unreachable!("all terms of degree > 2 were rewritten"),
        }
    }
    q.prune_zeros();
    q.set_offset(offset)?;
    Ok((q, plan))
}
