//! Pair-file format, built-in fixtures, CSV emission, and the property
//! suites behind `qht check`.
//!
//! Pair files are JSON with complex entries spelled as `[re, im]` pairs so
//! the format is unambiguous across languages. A file carries either the
//! dense `rho`/`eta` matrices or a `classical` block with two probability
//! vectors, never both. The fixtures `equal_qubit`, `bern_half_quarter`
//! and `qubit_tilted` are compiled in, so every command and the acceptance
//! suites run without external data.

pub mod suites;

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::binning::{bin_density, binning_divergence_gap};
use crate::divergence::{
    cutoff_rate, hoeffding_anti_divergence, petz_renyi, q_star, sandwiched_renyi, ArgAlpha,
    DivergenceCurve,
};
use crate::error::{Error, Result};
use crate::exponents::{convergence_sweep, Caps, Engine, ProblemPair};
use crate::operator_core::{DensityOperator, StatePair};
use crate::types_pinch::ClassicalPair;

/// Names resolvable without a file on disk.
pub const BUILTIN_FIXTURES: [&str; 3] = ["equal_qubit", "bern_half_quarter", "qubit_tilted"];

const EQUAL_QUBIT_JSON: &str = include_str!("../../fixtures/equal_qubit.json");
const BERN_JSON: &str = include_str!("../../fixtures/bern_half_quarter.json");
const TILTED_JSON: &str = include_str!("../../fixtures/qubit_tilted.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalVectors {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// On-disk description of a state pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairFile {
    pub name: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalVectors>,
}

fn matrix_from_entries(
    entries: &[Vec<[f64; 2]>],
    dim: usize,
    what: &str,
    path: &str,
) -> Result<DMatrix<Complex64>> {
    if entries.len() != dim || entries.iter().any(|row| row.len() != dim) {
        return Err(Error::PairFile {
            path: path.to_string(),
            reason: format!("{what} is not a {dim}x{dim} matrix"),
        });
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(entries[i][j][0], entries[i][j][1])
    }))
}

impl PairFile {
    pub fn parse(text: &str, path: &str) -> Result<PairFile> {
        serde_json::from_str(text).map_err(|e| Error::PairFile {
            path: path.to_string(),
            reason: e.to_string(),
        })
    }

    /// Validates the exactly-one-representation rule and the state
    /// invariants, producing the discrimination instance.
    pub fn to_problem_pair(&self, path: &str) -> Result<ProblemPair> {
        match (&self.rho, &self.eta, &self.classical) {
            (Some(rho), Some(eta), None) => {
                let rho =
                    DensityOperator::from_matrix(matrix_from_entries(rho, self.dim, "rho", path)?)?;
                let eta =
                    DensityOperator::from_matrix(matrix_from_entries(eta, self.dim, "eta", path)?)?;
                Ok(ProblemPair::Quantum(StatePair::new(rho, eta)?))
            }
            (None, None, Some(cl)) => {
                if cl.p.len() != self.dim || cl.q.len() != self.dim {
                    return Err(Error::PairFile {
                        path: path.to_string(),
                        reason: format!("classical vectors must have length {}", self.dim),
                    });
                }
                let sum_p: f64 = cl.p.iter().sum();
                let sum_q: f64 = cl.q.iter().sum();
                if (sum_p - 1.0).abs() > 1e-10 || (sum_q - 1.0).abs() > 1e-10 {
                    return Err(Error::PairFile {
                        path: path.to_string(),
                        reason: format!(
                            "classical vectors must sum to 1 (got {sum_p} and {sum_q})"
                        ),
                    });
                }
                Ok(ProblemPair::Classical(ClassicalPair::from_probabilities(
                    &cl.p, &cl.q,
                )?))
            }
            _ => Err(Error::PairFile {
                path: path.to_string(),
                reason: "exactly one of (rho + eta) or classical must be present".to_string(),
            }),
        }
    }
}

/// Load a pair from a path, falling back to the built-in fixture names.
pub fn load_pair(spec: &str) -> Result<ProblemPair> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| Error::PairFile {
            path: spec.to_string(),
            reason: e.to_string(),
        })?;
        return PairFile::parse(&text, spec)?.to_problem_pair(spec);
    }
    let embedded = match spec {
        "equal_qubit" => EQUAL_QUBIT_JSON,
        "bern_half_quarter" => BERN_JSON,
        "qubit_tilted" => TILTED_JSON,
        _ => {
            return Err(Error::PairFile {
                path: spec.to_string(),
                reason: "no such file or built-in fixture".to_string(),
            })
        }
    };
    PairFile::parse(embedded, spec)?.to_problem_pair(spec)
}

/// 12 significant digits, scientific; the CSV number format.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// A CSV document with a fixed header; rows are emitted in the order given,
/// so callers sort by the sweep key first.
pub struct Csv {
    pub header: &'static str,
    pub rows: Vec<String>,
}

impl Csv {
    pub fn new(header: &'static str) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: &[String]) {
        self.rows.push(cells.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.header).unwrap();
        for row in &self.rows {
            writeln!(out, "{row}").unwrap();
        }
        out
    }

    /// Writes to the path, or stdout when no path is given.
    pub fn emit(&self, out: Option<&str>) -> Result<()> {
        let text = self.render();
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
                path: path.to_string(),
                reason: e.to_string(),
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// One row per α: sandwiched divergence, Petz (when α ≤ 2), and Q*_α.
pub fn cmd_divergence(pair_spec: &str, alphas: &[f64], out: Option<&str>) -> Result<()> {
    let pair = load_pair(pair_spec)?.to_state_pair()?;
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut csv = Csv::new("alpha,sandwiched,petz,q_star");
    let mut values = Vec::with_capacity(sorted.len());
    for &alpha in &sorted {
        let d = sandwiched_renyi(&pair, alpha)?;
        values.push(d);
        let petz = if alpha > 1.0 && alpha <= 2.0 {
            fmt_sig(petz_renyi(&pair, alpha)?)
        } else {
            String::new()
        };
        csv.push(&[
            fmt_sig(alpha),
            fmt_sig(d),
            petz,
            fmt_sig(q_star(&pair, alpha)?),
        ]);
    }
    // runtime audit: the sampled curve must be monotone in α
    DivergenceCurve::new(sorted, values, pair_spec.to_string())?;
    csv.emit(out)
}

/// One row per n: the finite-n exponent, its gap to H*_r and the engine.
pub fn cmd_exponent(
    pair_spec: &str,
    r: f64,
    schedule: &[usize],
    engine: Engine,
    tol: f64,
    caps: Caps,
    out: Option<&str>,
) -> Result<()> {
    if schedule.iter().any(|&n| n == 0) {
        return Err(Error::InvalidArgument(
            "n-schedule entries must be at least 1".to_string(),
        ));
    }
    let pair = load_pair(pair_spec)?;
    let mut sched = schedule.to_vec();
    sched.sort_unstable();
    sched.dedup();
    let report = convergence_sweep(&pair, r, &sched, engine, tol, caps)?;
    let mut csv = Csv::new("n,b_n,gap_to_h_star,engine");
    for rec in &report.records {
        csv.push(&[
            rec.n.to_string(),
            fmt_sig(rec.b_n),
            fmt_sig((rec.b_n - report.h_star).abs()),
            rec.engine.to_string(),
        ]);
    }
    csv.emit(out)
}

/// H*_r with its audit fields.
pub fn cmd_hoeffding(pair_spec: &str, r: f64, tol: f64, out: Option<&str>) -> Result<()> {
    let pair = load_pair(pair_spec)?.to_state_pair()?;
    let h = hoeffding_anti_divergence(&pair, r, tol)?;
    let arg = match h.arg_alpha {
        ArgAlpha::AtOne => "1".to_string(),
        ArgAlpha::At(a) => fmt_sig(a),
        ArgAlpha::Limit => "limit".to_string(),
    };
    let mut csv = Csv::new("r,value,arg_alpha,truncation_bound");
    csv.push(&[
        fmt_sig(r),
        fmt_sig(h.value),
        arg,
        fmt_sig(h.truncation_bound),
    ]);
    csv.emit(out)
}

/// The generalized cutoff rate at κ.
pub fn cmd_cutoff(pair_spec: &str, kappa: f64, tol: f64, out: Option<&str>) -> Result<()> {
    let pair = load_pair(pair_spec)?.to_state_pair()?;
    let c = cutoff_rate(&pair, kappa, tol)?;
    let mut csv = Csv::new("kappa,cutoff_rate,tol");
    csv.push(&[fmt_sig(kappa), fmt_sig(c), fmt_sig(tol)]);
    csv.emit(out)
}

/// Bin η on the k-ladder and report the per-α divergence perturbation.
pub fn cmd_bin(pair_spec: &str, k: usize, alphas: &[f64], out: Option<&str>) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".to_string()));
    }
    let pair = load_pair(pair_spec)?.to_state_pair()?;
    let binned = bin_density(pair.eta(), k)?;
    let gaps = binning_divergence_gap(&pair, k, alphas)?;
    let mut rows: Vec<(f64, f64)> = gaps;
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut csv = Csv::new("alpha,gap,gap_bound,bin_count,spectrum_cap");
    for (alpha, gap) in rows {
        csv.push(&[
            fmt_sig(alpha),
            fmt_sig(gap),
            fmt_sig(binned.a.ln()),
            binned.bin_count().to_string(),
            fmt_sig(binned.spectrum_cap()),
        ]);
    }
    csv.emit(out)
}

/// Runs the named property suite; returns the per-assertion report and
/// whether everything passed.
pub fn cmd_check(suite: &str, seed: u64) -> Result<(Vec<suites::CheckResult>, bool)> {
    let results = suites::run_suite(suite, seed)?;
    let ok = results.iter().all(|r| r.pass);
    Ok((results, ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_fixtures_load_and_validate() {
        for name in BUILTIN_FIXTURES {
            let pair = load_pair(name).unwrap();
            let sp = pair.to_state_pair().unwrap();
            assert_eq!(sp.dim(), 2);
        }
        // qubit_tilted is genuinely non-commuting with bounded order
        if let ProblemPair::Quantum(sp) = load_pair("qubit_tilted").unwrap() {
            assert!(!sp.is_commuting(1e-9));
            assert!(sp.order_log() <= 1.5);
        } else {
            panic!("qubit_tilted should be quantum");
        }
    }

    #[test]
    fn missing_file_is_a_pair_file_error() {
        let err = load_pair("/no/such/file.json").unwrap_err();
        match err {
            Error::PairFile { path, .. } => assert_eq!(path, "/no/such/file.json"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn corrupted_trace_rejected() {
        let text = r#"{
            "name": "bad", "dim": 2,
            "rho": [[[0.51, 0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]],
            "eta": [[[0.5, 0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]
        }"#;
        let pf = PairFile::parse(text, "inline").unwrap();
        assert!(matches!(
            pf.to_problem_pair("inline"),
            Err(Error::InvalidTrace(_))
        ));
    }

    #[test]
    fn both_representations_rejected() {
        let text = r#"{
            "name": "bad", "dim": 2,
            "rho": [[[0.5, 0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]],
            "eta": [[[0.5, 0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]],
            "classical": {"p": [0.5, 0.5], "q": [0.5, 0.5]}
        }"#;
        let pf = PairFile::parse(text, "inline").unwrap();
        assert!(matches!(
            pf.to_problem_pair("inline"),
            Err(Error::PairFile { .. })
        ));
    }

    #[test]
    fn pair_file_roundtrip_is_bit_identical() {
        let original = PairFile {
            name: "roundtrip".to_string(),
            dim: 2,
            rho: Some(vec![
                vec![[0.5, 0.0], [0.25, -0.1]],
                vec![[0.25, 0.1], [0.5, 0.0]],
            ]),
            eta: Some(vec![
                vec![[0.65, 0.0], [0.0, 0.0]],
                vec![[0.0, 0.0], [0.35, 0.0]],
            ]),
            classical: None,
        };
        let text = serde_json::to_string_pretty(&original).unwrap();
        let reparsed = PairFile::parse(&text, "mem").unwrap();
        assert_eq!(original.rho, reparsed.rho);
        assert_eq!(original.eta, reparsed.eta);
    }

    #[test]
    fn csv_format_is_deterministic() {
        let mut csv = Csv::new("alpha,value");
        csv.push(&[fmt_sig(2.0), fmt_sig((4.0f64 / 3.0).ln())]);
        let rendered = csv.render();
        assert_eq!(rendered, "alpha,value\n2.00000000000e0,2.87682072452e-1\n");
    }

    #[test]
    fn divergence_command_runs_on_fixture() {
        let dir = std::env::temp_dir().join("qht_cli_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let out = dir.join("div.csv");
        cmd_divergence(
            "bern_half_quarter",
            &[2.0, 1.5],
            Some(out.to_str().unwrap()),
        )
        .unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "alpha,sandwiched,petz,q_star");
        // rows ascending in alpha even though input was not sorted
        let first = lines.next().unwrap();
        assert!(first.starts_with("1.50000000000e0,"));
        let second = lines.next().unwrap();
        assert!(second.starts_with("2.00000000000e0,"));
        assert!(second.contains("2.87682072452e-1"));
    }
}
