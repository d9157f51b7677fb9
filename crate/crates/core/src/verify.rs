//! Exhaustive invariant checks for a compiled problem.

use std::collections::BTreeSet;

use crate::eigen::assemble_eigen_poly;
use crate::encoding::{Group, Scheme, VariableRegistry};
use crate::io::{CompiledModel, ProblemFile, Target};
use crate::linsys::{build_model1, build_model1_parallel, CrossTermPolicy, LinearSystemProblem};
use crate::model::{QuboProblem, ENERGY_TOL};
use crate::sampler::{solve_exhaustive, EXHAUSTIVE_CAP};
use crate::error::Result;

/// Largest encoded qubit count for which every bitstring is enumerated.
pub const ENUMERATION_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub model: String,
    pub name: &'static str,
    pub outcome: Outcome,
}

impl Check {
    pub fn failed(&self) -> bool {
        matches!(self.outcome, Outcome::Fail(_))
    }
}

fn bits_of(s: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((s >> i) & 1) as u8).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= ENERGY_TOL * (1.0 + a.abs().max(b.abs()))
}

/// True when some unknown has a positive and a negative bit set together.
fn has_mixed_bits(reg: &VariableRegistry, bits: &[u8]) -> bool {
    let b = reg.config().bits();
    (0..reg.n()).any(|i| {
        let form = reg.linear_form(Group::X(i)).expect("unknown in range");
        let on = |r: &[(usize, f64)]| r.iter().any(|&(idx, _)| bits[idx] != 0);
        on(&form[..b]) && on(&form[b..])
    })
}

fn linsys_checks(m: &CompiledModel, p: &LinearSystemProblem, policy: Option<CrossTermPolicy>) -> Vec<(&'static str, Outcome)> {
    let mut out = Vec::new();
    let q = &m.qubo;
    let reg = &m.registry;
    let n_q = reg.total_qubits();
    let c = p.config().scale_c as f64;
    let expected = |bits: &[u8]| -> f64 {
        let r = c * p.residual(&reg.decode(bits).expect("length matches").x);
        r * r
    };
    let two_sided = p.config().scheme == Scheme::TwoSided;

    if n_q > ENUMERATION_CAP {
        out.push(("residual identity", Outcome::Skipped(format!("{n_q} qubits"))));
    } else {
        let mut failure = None;
        for s in 0..1u64 << n_q {
            let bits = bits_of(s, n_q);
            let e = q.energy(&bits).expect("length matches");
            let want = expected(&bits);
            let exact = !two_sided || policy == Some(CrossTermPolicy::Full) || !has_mixed_bits(reg, &bits);
            let ok = if exact { close(e, want) } else { e >= want - ENERGY_TOL * (1.0 + want) };
            if !ok {
                failure = Some(format!("bits {bits:?}: energy {e}, squared residual {want}"));
                break;
            }
        }
        out.push(("residual identity", failure.map_or(Outcome::Pass, Outcome::Fail)));
    }

    if let Some(policy) = policy {
        let serial = build_model1(p, policy).map(|r| r.0);
        let mismatch = [1, 2, 3, 8].into_iter().find(|&w| {
            build_model1_parallel(p, policy, w).map(|r| r.0).ok() != serial.clone().ok()
        });
        out.push((
            "parallel build matches serial",
            mismatch.map_or(Outcome::Pass, |w| Outcome::Fail(format!("{w} workers differ"))),
        ));
    }

    if n_q > EXHAUSTIVE_CAP {
        out.push(("ground states solve the system", Outcome::Skipped(format!("{n_q} qubits"))));
        return out;
    }
    let ground = match solve_exhaustive(q) {
        Ok(g) => g,
        Err(e) => {
            out.push(("ground states solve the system", Outcome::Fail(e.to_string())));
            return out;
        }
    };
    let min = ground.min_energy().unwrap_or(f64::INFINITY);
    out.push((
        "energy bounded below by zero residual",
        if min >= -ENERGY_TOL * (1.0 + q.offset()) {
            Outcome::Pass
        } else {
            Outcome::Fail(format!("minimum energy {min} is negative"))
        },
    ));
    if close(min, 0.0) || min.abs() <= ENERGY_TOL {
        let bad = ground
            .records
            .iter()
            .find(|r| p.residual(&reg.decode(&r.bits).expect("length").x) > 1e-6);
        out.push((
            "ground states solve the system",
            bad.map_or(Outcome::Pass, |r| Outcome::Fail(format!("{:?} does not solve Ax = b", r.bits))),
        ));
    } else {
        out.push((
            "ground states solve the system",
            Outcome::Skipped(format!("no representable exact solution (min squared residual {})", min / (c * c))),
        ));
    }
    out
}

/// Set of distinct encoded prefixes among the ground states of `q`.
pub fn projected_ground_set(q: &QuboProblem, encoded: usize) -> Result<(f64, BTreeSet<Vec<u8>>)> {
    let g = solve_exhaustive(q)?;
    let min = g.min_energy().unwrap_or(f64::INFINITY);
    Ok((min, g.records.iter().map(|r| r.bits[..encoded].to_vec()).collect()))
}

fn eigen_checks(m: &CompiledModel, p: &crate::eigen::EigenProblem) -> Vec<(&'static str, Outcome)> {
    let mut out = Vec::new();
    let (poly, reg) = match assemble_eigen_poly(p) {
        Ok(r) => r,
        Err(e) => return vec![("polynomial assembly", Outcome::Fail(e.to_string()))],
    };
    let enc = reg.num_encoded();
    if enc > ENUMERATION_CAP {
        out.push(("polynomial equals squared residual", Outcome::Skipped(format!("{enc} qubits"))));
        return out;
    }
    let mut poly_min = f64::INFINITY;
    let mut values = Vec::with_capacity(1 << enc);
    let mut failure = None;
    for s in 0..1u64 << enc {
        let bits = bits_of(s, enc);
        let v = poly.energy(&bits).expect("length");
        let d = reg.decode(&bits).expect("length");
        let r = p.residual(&d.x, d.lambda.unwrap_or(0.0));
        if failure.is_none() && !close(v, r * r) {
            failure = Some(format!("bits {bits:?}: polynomial {v}, squared residual {}", r * r));
        }
        poly_min = poly_min.min(v);
        values.push((bits, v));
    }
    out.push(("polynomial equals squared residual", failure.map_or(Outcome::Pass, Outcome::Fail)));

    let total = m.qubo.num_vars();
    if total > EXHAUSTIVE_CAP {
        out.push(("reduction preserves ground states", Outcome::Skipped(format!("{total} qubits"))));
        return out;
    }
    let poly_ground: BTreeSet<Vec<u8>> = values
        .into_iter()
        .filter(|(_, v)| (v - poly_min).abs() <= ENERGY_TOL)
        .map(|(b, _)| b)
        .collect();
    match projected_ground_set(&m.qubo, enc) {
        Ok((qmin, qground)) => {
            let outcome = if !close(qmin, poly_min) {
                Outcome::Fail(format!("QUBO minimum {qmin}, polynomial minimum {poly_min}"))
            } else if qground != poly_ground {
                Outcome::Fail(format!(
                    "{} projected QUBO ground states vs {} polynomial ground states",
                    qground.len(),
                    poly_ground.len()
                ))
            } else {
                Outcome::Pass
            };
            out.push(("reduction preserves ground states", outcome));
        }
        Err(e) => out.push(("reduction preserves ground states", Outcome::Fail(e.to_string()))),
    }
    if let Some(plan) = &m.plan {
        let g = solve_exhaustive(&m.qubo).expect("checked above");
        let bad = g.records.iter().find(|r| {
            plan.substitutions
                .iter()
                .any(|s| r.bits[s.aux] != r.bits[s.pair.0] & r.bits[s.pair.1])
        });
        out.push((
            "substituted auxiliaries equal their pair products",
            bad.map_or(Outcome::Pass, |r| Outcome::Fail(format!("violated at {:?}", r.bits))),
        ));
    }
    out
}

/// Runs every check that applies to the problem described by `pf`.
pub fn verify_problem(pf: &ProblemFile) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let models = pf.compile()?;
    for m in &models {
        let results = match &m.target {
            Target::Linsys(p) => {
                let policy = (p.config().scheme == Scheme::TwoSided).then(|| pf.cross_policy());
                linsys_checks(m, p, policy)
            }
            Target::Eigen(p) => eigen_checks(m, p),
        };
        checks.extend(results.into_iter().map(|(name, outcome)| Check {
            model: m.label.clone(),
            name,
            outcome,
        }));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsolvable_system_skips_solution_check() {
        // 2x = 1 has no integer solution
        let pf = ProblemFile::from_json(
            r#"{"kind":"linsys","A":[[2]],"b":[1],"encoding":{"l_min":0,"l_max":1,"scheme":"two_sided"},"cross_policy":"full"}"#,
        )
        .unwrap();
        let checks = verify_problem(&pf).unwrap();
        assert!(checks.iter().all(|c| !c.failed()), "{checks:?}");
        assert!(checks
            .iter()
            .any(|c| c.name == "ground states solve the system" && matches!(c.outcome, Outcome::Skipped(_))));
    }

    #[test]
    fn model2_and_eigen_pass() {
        let pf = ProblemFile::from_json(
            r#"{"kind":"linsys","A":[[1,1],[0,2]],"b":[3,4],"encoding":{"l_min":0,"l_max":1,"scheme":"offset"},"model":2}"#,
        )
        .unwrap();
        assert!(verify_problem(&pf).unwrap().iter().all(|c| !c.failed()));

        let pf = ProblemFile::from_json(
            r#"{"kind":"eigen","A":[[2,1],[1,2]],
                "encoding":{"l_min":0,"l_max":0,"scheme":"two_sided"},
                "lambda_encoding":{"l_min":0,"l_max":1,"scheme":"two_sided"}}"#,
        )
        .unwrap();
        let checks = verify_problem(&pf).unwrap();
        assert!(checks.iter().all(|c| c.outcome == Outcome::Pass), "{checks:?}");
    }
}
