//! Problem files and QUBO export formats.
//!
//! Problem files are JSON:
//!
//! ```json
//! {
//!   "kind": "linsys",
//!   "A": [[3, 1], [-1, 2]],
//!   "b": [-1, 5],
//!   "encoding": { "l_min": 0, "l_max": 1, "scheme": "two_sided", "scale_c": 1 },
//!   "cross_policy": "zeroed",
//!   "model": 1
//! }
//! ```
//!
//! Eigen problems use `"kind": "eigen"`, omit `b`, and add `lambda_encoding`
//! and optionally `lambda_sign` (`positive`, `negative` or `both`). Without a
//! sign the positive and negative models are both built.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eigen::{build_eigen_qubo, EigenProblem};
use crate::encoding::{EncodingConfig, LambdaSign, VariableRegistry};
use crate::error::{Error, Result};
use crate::linsys::{build_model1, build_model2, CrossTermPolicy, LinearSystemProblem};
use crate::model::QuboProblem;
use crate::quadratize::ReductionPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Linsys,
    Eigen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: ProblemKind,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    pub encoding: EncodingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_encoding: Option<EncodingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_sign: Option<LambdaSign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_policy: Option<CrossTermPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<u8>,
}

/// One compiled QUBO together with what is needed to interpret its samples.
#[derive(Debug, Clone)]
pub struct CompiledModel {
    pub label: String,
    pub qubo: QuboProblem,
    pub registry: VariableRegistry,
    pub plan: Option<ReductionPlan>,
    pub target: Target,
}

#[derive(Debug, Clone)]
pub enum Target {
    Linsys(LinearSystemProblem),
    Eigen(EigenProblem),
}

impl CompiledModel {
    /// Decodes `bits` and attaches the residual.
    pub fn decode(&self, bits: &[u8]) -> Result<crate::encoding::DecodedSolution> {
        let mut d = self.registry.decode(bits)?;
        d.residual = Some(match &self.target {
            Target::Linsys(p) => p.residual(&d.x),
            Target::Eigen(p) => p.residual(&d.x, d.lambda.unwrap_or(0.0)),
        });
        Ok(d)
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let pf: ProblemFile = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        pf.validate()?;
        Ok(pf)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        self.encoding.validate()?;
        match self.kind {
            ProblemKind::Linsys => {
                let b = self
                    .b
                    .as_ref()
                    .ok_or_else(|| Error::Parse("field `b` is required for linsys problems".into()))?;
                LinearSystemProblem::new(self.a.clone(), b.clone(), self.encoding)?;
                if self.lambda_encoding.is_some() || self.lambda_sign.is_some() {
                    return Err(Error::Parse("lambda fields are only valid for eigen problems".into()));
                }
                match self.model.unwrap_or(1) {
                    1 | 2 => {}
                    m => return Err(Error::Parse(format!("field `model` must be 1 or 2, got {m}"))),
                }
            }
            ProblemKind::Eigen => {
                if self.b.is_some() || self.cross_policy.is_some() || self.model.is_some() {
                    return Err(Error::Parse(
                        "fields `b`, `cross_policy` and `model` are only valid for linsys problems".into(),
                    ));
                }
                let lcfg = self.lambda_encoding.ok_or_else(|| {
                    Error::Parse("field `lambda_encoding` is required for eigen problems".into())
                })?;
                EigenProblem::new(self.a.clone(), self.encoding, lcfg, LambdaSign::Positive)?;
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn cross_policy(&self) -> CrossTermPolicy {
        self.cross_policy.unwrap_or(CrossTermPolicy::Zeroed)
    }

    pub fn linear_system(&self) -> Result<LinearSystemProblem> {
        let b = self
            .b
            .clone()
            .ok_or_else(|| Error::Config("not a linear system problem".into()))?;
        LinearSystemProblem::new(self.a.clone(), b, self.encoding)
    }

    /// Eigen problems for each requested eigenvalue sign.
    pub fn eigen_problems(&self) -> Result<Vec<EigenProblem>> {
        let lcfg = self
            .lambda_encoding
            .ok_or_else(|| Error::Config("not an eigen problem".into()))?;
        let signs = match self.lambda_sign {
            Some(s) => vec![s],
            None => vec![LambdaSign::Positive, LambdaSign::Negative],
        };
        signs
            .into_iter()
            .map(|s| EigenProblem::new(self.a.clone(), self.encoding, lcfg, s))
            .collect()
    }

    /// Builds the QUBO(s) this file describes.
    pub fn compile(&self) -> Result<Vec<CompiledModel>> {
        match self.kind {
            ProblemKind::Linsys => {
                let p = self.linear_system()?;
                let (qubo, registry, label) = if self.model.unwrap_or(1) == 2 {
                    let (q, r) = build_model2(&p)?;
                    (q, r, "model 2".to_string())
                } else {
                    let policy = self.cross_policy();
                    let (q, r) = build_model1(&p, policy)?;
                    (q, r, format!("model 1 ({})", policy_name(policy)))
                };
                Ok(vec![CompiledModel {
                    label,
                    qubo,
                    registry,
                    plan: None,
                    target: Target::Linsys(p),
                }])
            }
            ProblemKind::Eigen => self
                .eigen_problems()?
                .into_iter()
                .map(|p| {
                    let (qubo, registry, plan) = build_eigen_qubo(&p)?;
                    Ok(CompiledModel {
                        label: format!("eigen ({} lambda)", sign_name(p.lambda_sign())),
                        qubo,
                        registry,
                        plan: Some(plan),
                        target: Target::Eigen(p),
                    })
                })
                .collect(),
        }
    }
}

pub fn policy_name(p: CrossTermPolicy) -> String {
    match p {
        CrossTermPolicy::Full => "full".into(),
        CrossTermPolicy::Zeroed => "zeroed".into(),
        CrossTermPolicy::Penalty(v) => format!("penalty {v}"),
    }
}

fn sign_name(s: LambdaSign) -> &'static str {
    match s {
        LambdaSign::Positive => "positive",
        LambdaSign::Negative => "negative",
        LambdaSign::Both => "two-sided",
    }
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<ProblemFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ProblemFile::from_json(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Coordinate,
    VendorScript,
}

/// Pairs to emit, in `(i, j)` order.
fn export_entries(q: &QuboProblem, include_zero_entries: bool, diag_always: bool) -> Vec<((usize, usize), f64)> {
    if include_zero_entries {
        let n = q.num_vars();
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| ((i, j), q.get(i, j)))
            .collect()
    } else {
        let mut out: Vec<_> = q
            .iter()
            .filter(|&((i, j), c)| c != 0.0 || (diag_always && i == j))
            .collect();
        if diag_always {
            for i in 0..q.num_vars() {
                if q.get(i, i) == 0.0 && !out.iter().any(|&(k, _)| k == (i, i)) {
                    out.push(((i, i), 0.0));
                }
            }
            out.sort_by_key(|&(k, _)| k);
        }
        out
    }
}

/// `N <n> OFFSET <offset>` followed by `<i> <j> <coefficient>` lines, 0-based.
pub fn export_coordinate(q: &QuboProblem, include_zero_entries: bool) -> String {
    let mut s = format!("N {} OFFSET {}\n", q.num_vars(), q.offset());
    for ((i, j), c) in export_entries(q, include_zero_entries, false) {
        writeln!(s, "{i} {j} {c}").expect("writing to a String");
    }
    s
}

pub fn parse_coordinate(text: &str) -> Result<QuboProblem> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty coordinate file".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let (n, offset) = match h.as_slice() {
        ["N", n, "OFFSET", off] => (
            n.parse::<usize>()
                .map_err(|e| Error::Parse(format!("line 1: bad variable count: {e}")))?,
            off.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line 1: bad offset: {e}")))?,
        ),
        _ => return Err(Error::Parse("line 1: expected `N <n> OFFSET <offset>`".into())),
    };
    let mut q = QuboProblem::new(n);
    q.set_offset(offset)?;
    for (ln, line) in lines {
        let err = |what: &str| Error::Parse(format!("line {}: {what}", ln + 1));
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [i, j, c] = parts.as_slice() else {
            return Err(err("expected `<i> <j> <coefficient>`"));
        };
        let i: usize = i.parse().map_err(|_| err("bad row index"))?;
        let j: usize = j.parse().map_err(|_| err("bad column index"))?;
        let c: f64 = c.parse().map_err(|_| err("bad coefficient"))?;
        if i > j {
            return Err(err("entries must be upper triangular"));
        }
        q.set(i, j, c).map_err(|e| err(&e.to_string()))?;
    }
    Ok(q)
}

fn py_float(v: f64) -> String {
    format!("{v:?}")
}

/// Submission script for a D-Wave style `sample_qubo` call with 1-based
/// qubit names `q1..qN`. Diagonal entries are always emitted; zero
/// off-diagonal entries only when `include_zero_entries` is set.
pub fn export_vendor_script(q: &QuboProblem, include_zero_entries: bool, num_reads: u64) -> String {
    let entries = export_entries(q, include_zero_entries, true);
    let fmt = |&((i, j), c): &((usize, usize), f64)| {
        format!("('q{}','q{}'): {}", i + 1, j + 1, py_float(c))
    };
    let linear: Vec<String> = entries.iter().filter(|((i, j), _)| i == j).map(fmt).collect();
    let quadratic: Vec<String> = entries.iter().filter(|((i, j), _)| i != j).map(fmt).collect();

    let mut s = String::new();
    s.push_str("from dwave.system import DWaveSampler, EmbeddingComposite\n");
    s.push_str("sampler_auto = EmbeddingComposite(DWaveSampler(solver={'qpu': True}))\n\n");
    writeln!(s, "linear = {{{}}}", linear.join(", ")).unwrap();
    writeln!(s, "\nquadratic = {{{}}}", quadratic.join(", ")).unwrap();
    s.push_str("\nQ = dict(linear)\n");
    s.push_str("Q.update(quadratic)\n\n");
    writeln!(s, "sampleset = sampler_auto.sample_qubo(Q, num_reads={num_reads})").unwrap();
    s.push_str("print(sampleset)\n");
    s
}

pub fn export(q: &QuboProblem, format: ExportFormat, include_zero_entries: bool) -> String {
    match format {
        ExportFormat::Coordinate => export_coordinate(q, include_zero_entries),
        ExportFormat::VendorScript => export_vendor_script(q, include_zero_entries, 1000),
    }
}

/// 0-based coefficient maps read back from a vendor script.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VendorMaps {
    pub linear: BTreeMap<(usize, usize), f64>,
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub num_reads: Option<u64>,
}

/// Parses the `linear = {...}` and `quadratic = {...}` maps of a script
/// produced by [`export_vendor_script`].
pub fn parse_vendor_script(text: &str) -> Result<VendorMaps> {
    fn parse_map(body: &str) -> Result<BTreeMap<(usize, usize), f64>> {
        let mut out = BTreeMap::new();
        let mut rest = body.trim();
        while !rest.is_empty() {
            let close = rest
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unterminated key in `{rest}`")))?;
            let key = rest[..close].trim_start_matches('(');
            let names: Vec<&str> = key.split(',').map(|k| k.trim().trim_matches('\'')).collect();
            let idx = |name: &str| -> Result<usize> {
                name.strip_prefix('q')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&d| d >= 1)
                    .map(|d| d - 1)
                    .ok_or_else(|| Error::Parse(format!("bad qubit name `{name}`")))
            };
            let [a, b] = names.as_slice() else {
                return Err(Error::Parse(format!("bad key `{key}`")));
            };
            let after = rest[close + 1..].trim_start().trim_start_matches(':');
            let end = after.find(", (").unwrap_or(after.len());
            let value: f64 = after[..end]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad value `{}`", after[..end].trim())))?;
            out.insert((idx(a)?, idx(b)?), value);
            rest = after[end..].trim_start_matches(',').trim();
        }
        Ok(out)
    }
    let map_body = |name: &str| -> Result<&str> {
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("{name} = {{")))
            .ok_or_else(|| Error::Parse(format!("missing `{name}` map")))?;
        Ok(line
            .trim_start_matches(&format!("{name} = {{"))
            .trim_end()
            .trim_end_matches('}'))
    };
    let num_reads = text
        .split("num_reads=")
        .nth(1)
        .and_then(|r| r.split(')').next())
        .and_then(|r| r.trim().parse().ok());
    Ok(VendorMaps {
        linear: parse_map(map_body("linear")?)?,
        quadratic: parse_map(map_body("quadratic")?)?,
        num_reads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED_EXAMPLE: &str = r#"{
        "kind": "linsys",
        "A": [[3, 1], [-1, 2]],
        "b": [-1, 5],
        "encoding": {"l_min": 0, "l_max": 1, "scheme": "two_sided"},
        "cross_policy": "zeroed"
    }"#;

    #[test]
    fn parses_linsys_file() {
        let pf = ProblemFile::from_json(WORKED_EXAMPLE).unwrap();
        assert_eq!(pf.kind, ProblemKind::Linsys);
        assert_eq!(pf.encoding.scale_c, 1);
        assert_eq!(pf.cross_policy(), CrossTermPolicy::Zeroed);
        let back = ProblemFile::from_json(&pf.to_json()).unwrap();
        assert_eq!(back, pf);
    }

    #[test]
    fn penalty_policy_syntax() {
        let text = WORKED_EXAMPLE.replace(r#""zeroed""#, r#"{"penalty": 100}"#);
        let pf = ProblemFile::from_json(&text).unwrap();
        assert_eq!(pf.cross_policy(), CrossTermPolicy::Penalty(100.0));
    }

    #[test]
    fn one_by_one() {
        let pf = ProblemFile::from_json(
            r#"{"kind":"linsys","A":[[2]],"b":[4],"encoding":{"l_min":0,"l_max":2,"scheme":"offset"},"model":2}"#,
        )
        .unwrap();
        assert_eq!(pf.n(), 1);
        let models = pf.compile().unwrap();
        assert_eq!(models[0].qubo.num_vars(), 4);
    }

    #[test]
    fn dimension_and_parse_errors() {
        let bad_b = WORKED_EXAMPLE.replace("[-1, 5]", "[-1, 5, 2]");
        assert!(matches!(ProblemFile::from_json(&bad_b), Err(Error::Dimension(_))));
        let ragged = WORKED_EXAMPLE.replace("[-1, 2]]", "[-1]]");
        assert!(matches!(ProblemFile::from_json(&ragged), Err(Error::Dimension(_))));
        let missing = WORKED_EXAMPLE.replace(r#""b": [-1, 5],"#, "");
        assert!(matches!(ProblemFile::from_json(&missing), Err(Error::Parse(_))));
        match ProblemFile::from_json("{\n  \"kind\": \"linsys\",\n  \"A\": oops\n}") {
            Err(Error::Parse(m)) => assert!(m.contains("line 3"), "{m}"),
            other => panic!("{other:?}"),
        }
        let typo = WORKED_EXAMPLE.replace("cross_policy", "cross_polcy");
        assert!(matches!(ProblemFile::from_json(&typo), Err(Error::Parse(_))));
    }

    #[test]
    fn eigen_file_defaults_to_sign_split() {
        let pf = ProblemFile::from_json(
            r#"{"kind":"eigen","A":[[2,0],[0,3]],
                "encoding":{"l_min":0,"l_max":0,"scheme":"two_sided"},
                "lambda_encoding":{"l_min":0,"l_max":1,"scheme":"two_sided"}}"#,
        )
        .unwrap();
        let models = pf.compile().unwrap();
        assert_eq!(models.len(), 2);
        assert!(models[0].label.contains("positive"));
        assert!(models[1].label.contains("negative"));
    }

    #[test]
    fn coordinate_examples() {
        let q = QuboProblem::new(1);
        assert_eq!(export_coordinate(&q, true), "N 1 OFFSET 0\n0 0 0\n");
        assert_eq!(export_coordinate(&q, false), "N 1 OFFSET 0\n");
    }

    #[test]
    fn coordinate_parse_errors() {
        assert!(parse_coordinate("").is_err());
        assert!(parse_coordinate("N 2\n").is_err());
        assert!(parse_coordinate("N 2 OFFSET 0\n1 0 3\n").is_err());
        assert!(parse_coordinate("N 2 OFFSET 0\n0 2 3\n").is_err());
        assert!(parse_coordinate("N 2 OFFSET 0\n0 1 x\n").is_err());
    }

    #[test]
    fn vendor_single_variable() {
        let q = QuboProblem::new(1);
        let s = export_vendor_script(&q, false, 1000);
        assert!(s.contains("linear = {('q1','q1'): 0.0}\n"), "{s}");
        assert!(s.contains("quadratic = {}\n"));
        let maps = parse_vendor_script(&s).unwrap();
        assert_eq!(maps.linear.len(), 1);
        assert!(maps.quadratic.is_empty());
        assert_eq!(maps.num_reads, Some(1000));
    }
}
