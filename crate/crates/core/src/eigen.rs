//! QUBO models for `Ax = lambda x`.
//!
//! The objective `||Ax - lambda x||^2` is expanded into three parts,
//! `x^T A^T A x` (quadratic), `-2 lambda x^T A x` (cubic) and
//! `lambda^2 x^T x` (quartic), over the qubits of the encodings of `x` and
//! `lambda`, and then quadratized. The expansion keeps every cross term,
//! including the same-unknown `q+ q-` products, so the polynomial equals the
//! squared residual of its decode at every bitstring.

use crate::encoding::{EncodingConfig, Group, LambdaSign, VariableRegistry, DecodedSolution};
use crate::error::{Error, Result};
use crate::linsys::check_square;
use crate::model::{PseudoBooleanPolynomial, QuboProblem};
use crate::quadratize::{quadratize, ReductionPlan};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenProblem {
    a: Vec<Vec<f64>>,
    x_config: EncodingConfig,
    lambda_config: EncodingConfig,
    lambda_sign: LambdaSign,
}

impl EigenProblem {
    pub fn new(
        a: Vec<Vec<f64>>,
        x_config: EncodingConfig,
        lambda_config: EncodingConfig,
        lambda_sign: LambdaSign,
    ) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Dimension("matrix A is empty".into()));
        }
        check_square(&a)?;
        if a.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config("A must be finite".into()));
        }
        x_config.validate()?;
        lambda_config.validate()?;
        Ok(Self {
            a,
            x_config,
            lambda_config,
            lambda_sign,
        })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn x_config(&self) -> &EncodingConfig {
        &self.x_config
    }

    pub fn lambda_config(&self) -> &EncodingConfig {
        &self.lambda_config
    }

    pub fn lambda_sign(&self) -> LambdaSign {
        self.lambda_sign
    }

    /// Same problem restricted to one eigenvalue sign.
    pub fn with_sign(&self, sign: LambdaSign) -> Self {
        Self {
            lambda_sign: sign,
            ..self.clone()
        }
    }

    pub fn registry(&self) -> Result<VariableRegistry> {
        VariableRegistry::new(self.n(), self.x_config)?.with_lambda(self.lambda_config, self.lambda_sign)
    }

    /// Qubits before quadratization.
    pub fn encoded_qubits(&self) -> Result<usize> {
        Ok(self.registry()?.num_encoded())
    }

    /// `||A x - lambda x||`.
    pub fn residual(&self, x: &[f64], lambda: f64) -> f64 {
        self.a
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let r: f64 = row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - lambda * x[k];
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Qubit weights of a group divided by the group's scale.
fn scaled_form(reg: &VariableRegistry, group: Group) -> Result<Vec<(usize, f64)>> {
    let scale = match group {
        Group::X(_) => reg.config().scale_c,
        Group::Lambda => reg.lambda_config().map_or(1, |(c, _)| c.scale_c),
    } as f64;
    Ok(reg
        .linear_form(group)?
        .into_iter()
        .map(|(i, w)| (i, w / scale))
        .collect())
}

/// Degree-4 polynomial equal to `||A x - lambda x||^2` on every bitstring.
pub fn assemble_eigen_poly(p: &EigenProblem) -> Result<(PseudoBooleanPolynomial, VariableRegistry)> {
    let reg = p.registry()?;
    let n = p.n();
    let xs: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| scaled_form(&reg, Group::X(i)))
        .collect::<Result<_>>()?;
    let lam = scaled_form(&reg, Group::Lambda)?;
    let mut poly = PseudoBooleanPolynomial::new(reg.num_encoded());

    // x^T A^T A x = sum_k (sum_i a_ki x_i)^2
    for row in &p.a {
        for i in 0..n {
            for j in 0..n {
                let aa = row[i] * row[j];
                if aa == 0.0 {
                    continue;
                }
                for &(t1, w1) in &xs[i] {
                    for &(t2, w2) in &xs[j] {
                        poly.add_term(&[t1, t2], aa * w1 * w2)?;
                    }
                }
            }
        }
    }

    // -2 lambda x^T A x = -2 lambda sum_{k2,k1} a_{k2,k1} x_{k1} x_{k2}
    for (k2, row) in p.a.iter().enumerate() {
        for (k1, &a) in row.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for &(s, v) in &lam {
                for &(t1, w1) in &xs[k1] {
                    for &(t2, w2) in &xs[k2] {
                        poly.add_term(&[s, t1, t2], -2.0 * a * v * w1 * w2)?;
                    }
                }
            }
        }
    }

    // lambda^2 x^T x = sum_k lambda^2 x_k^2
    for x in &xs {
        for &(s1, v1) in &lam {
            for &(s2, v2) in &lam {
                for &(t1, w1) in x {
                    for &(t2, w2) in x {
                        poly.add_term(&[s1, s2, t1, t2], v1 * v2 * w1 * w2)?;
                    }
                }
            }
        }
    }

    poly.prune_zeros();
    Ok((poly, reg))
}

/// Assembles and quadratizes the eigen objective.
///
/// The returned registry counts the quadratization auxiliaries, so
/// [`VariableRegistry::decode`] accepts full QUBO bitstrings.
pub fn build_eigen_qubo(p: &EigenProblem) -> Result<(QuboProblem, VariableRegistry, ReductionPlan)> {
    let (poly, reg) = assemble_eigen_poly(p)?;
    let (q, plan) = quadratize(&poly)?;
    let reg = reg.with_aux(plan.num_aux());
    debug_assert_eq!(reg.total_qubits(), q.num_vars());
    Ok((q, reg, plan))
}

/// Drops solutions whose `x` is the zero vector, preserving order.
pub fn filter_nontrivial(solutions: &[DecodedSolution]) -> Vec<DecodedSolution> {
    solutions.iter().filter(|s| !s.is_trivial()).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits_of(s: u64, n: usize) -> Vec<u8> {
        (0..n).map(|i| ((s >> i) & 1) as u8).collect()
    }

    fn diag23(sign: LambdaSign) -> EigenProblem {
        EigenProblem::new(
            vec![vec![2.0, 0.0], vec![0.0, 3.0]],
            EncodingConfig::two_sided(0, 0).unwrap(),
            EncodingConfig::two_sided(0, 1).unwrap(),
            sign,
        )
        .unwrap()
    }

    /// Bitstring for the given x bits (two-sided, l in {0}) and positive lambda bits.
    fn find_bits(reg: &VariableRegistry, x: &[f64], lambda: f64) -> Vec<u8> {
        (0..1u64 << reg.num_encoded())
            .map(|s| bits_of(s, reg.num_encoded()))
            .find(|b| {
                let d = reg.decode(b).unwrap();
                d.x == x && d.lambda == Some(lambda)
            })
            .unwrap()
    }

    #[test]
    fn one_by_one_eigenpair() {
        let p = EigenProblem::new(
            vec![vec![2.0]],
            EncodingConfig::two_sided(0, 0).unwrap(),
            EncodingConfig::two_sided(0, 1).unwrap(),
            LambdaSign::Positive,
        )
        .unwrap();
        let (poly, reg) = assemble_eigen_poly(&p).unwrap();
        assert_eq!(reg.num_encoded(), 4);
        let bits = find_bits(&reg, &[1.0], 2.0);
        assert_eq!(poly.energy(&bits).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_values() {
        let p = diag23(LambdaSign::Positive);
        let (poly, reg) = assemble_eigen_poly(&p).unwrap();
        let at = |x: &[f64], l| poly.energy(&find_bits(&reg, x, l)).unwrap();
        assert_eq!(at(&[1.0, 0.0], 2.0), 0.0);
        assert_eq!(at(&[0.0, 1.0], 2.0), 1.0);
        for l in [0.0, 1.0, 2.0, 3.0] {
            assert_eq!(at(&[0.0, 0.0], l), 0.0);
        }
    }

    #[test]
    fn poly_matches_direct_residual_everywhere() {
        let cases = [
            (vec![vec![1.0, 2.0], vec![2.0, -1.0]], EncodingConfig::two_sided(0, 1).unwrap(), LambdaSign::Both),
            (vec![vec![0.5, -1.0], vec![3.0, 1.0]], EncodingConfig::offset(-1, 0).unwrap(), LambdaSign::Negative),
        ];
        for (a, xcfg, sign) in cases {
            let p = EigenProblem::new(a, xcfg, EncodingConfig::two_sided(0, 1).unwrap(), sign).unwrap();
            let (poly, reg) = assemble_eigen_poly(&p).unwrap();
            assert!(poly.degree() <= 4);
            for s in 0..1u64 << reg.num_encoded() {
                let bits = bits_of(s, reg.num_encoded());
                let d = reg.decode(&bits).unwrap();
                let r = p.residual(&d.x, d.lambda.unwrap());
                assert!((poly.energy(&bits).unwrap() - r * r).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn quartic_structure() {
        let p = EigenProblem::new(
            vec![vec![1.0, 2.0, 0.0], vec![2.0, -1.0, 1.0], vec![0.0, 1.0, 1.0]],
            EncodingConfig::two_sided(0, 1).unwrap(),
            EncodingConfig::two_sided(0, 1).unwrap(),
            LambdaSign::Both,
        )
        .unwrap();
        let (poly, reg) = assemble_eigen_poly(&p).unwrap();
        let lambda_start = reg.num_encoded() - reg.lambda_config().unwrap().0.group_size();
        let g = p.x_config().group_size();
        for (key, _) in poly.terms().filter(|(k, _)| k.len() == 4) {
            let (lam, x): (Vec<usize>, Vec<usize>) = key.iter().partition(|&&v| v >= lambda_start);
            assert_eq!(lam.len(), 2, "{key:?}");
            assert_eq!(x.len(), 2, "{key:?}");
            assert_eq!(x[0] / g, x[1] / g, "{key:?}");
        }
    }

    #[test]
    fn filter_examples() {
        let sol = |x: Vec<f64>, l| DecodedSolution {
            x,
            lambda: Some(l),
            residual: None,
        };
        let input = vec![sol(vec![1.0, 0.0], 2.0), sol(vec![0.0, 0.0], 0.0)];
        assert_eq!(filter_nontrivial(&input), vec![sol(vec![1.0, 0.0], 2.0)]);
        assert!(filter_nontrivial(&[]).is_empty());
        assert!(filter_nontrivial(&[sol(vec![0.0], 1.0)]).is_empty());
    }

    #[test]
    fn rejects_non_square() {
        let r = EigenProblem::new(
            vec![vec![1.0, 2.0]],
            EncodingConfig::two_sided(0, 0).unwrap(),
            EncodingConfig::two_sided(0, 0).unwrap(),
            LambdaSign::Positive,
        );
        assert!(matches!(r, Err(Error::Dimension(_))));
    }
}
