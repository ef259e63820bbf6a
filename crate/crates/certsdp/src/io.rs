//! On-disk formats: a single-document JSON instance file (optionally
//! carrying the planted ground truth) and a JSON solution report. All
//! floating point numbers are serialized with shortest round-trip decimals,
//! so save/load is bit-exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::gen::GroundTruth;
use crate::qmp::{QmpData, QmpTerm};
use crate::sparse::SparseSymMatrix;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct SparseJson {
    rows: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    #[serde(rename = "A")]
    a: SparseJson,
    #[serde(rename = "B")]
    b: Vec<f64>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct GroundTruthJson {
    gamma_star: Vec<f64>,
    #[serde(rename = "X_star")]
    x_star: Vec<f64>,
    #[serde(rename = "T_star")]
    t_star: Vec<f64>,
    opt: f64,
    mu_star: f64,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    format_version: u32,
    n_minus_k: usize,
    k: usize,
    m: usize,
    objective: TermJson,
    constraints: Vec<TermJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_truth: Option<GroundTruthJson>,
}

fn term_to_json(t: &QmpTerm) -> TermJson {
    let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    for (r, c, v) in t.a.entries() {
        rows.push(r);
        cols.push(c);
        vals.push(v);
    }
    TermJson {
        a: SparseJson { rows, cols, vals },
        b: t.b.as_slice().to_vec(),
        c: t.c,
    }
}

fn term_from_json(t: &TermJson, n: usize, k: usize) -> Result<QmpTerm> {
    if t.a.rows.len() != t.a.cols.len() || t.a.rows.len() != t.a.vals.len() {
        return Err(Error::Parse(
            "sparse arrays rows/cols/vals have mismatched lengths".into(),
        ));
    }
    let entries: Vec<(u32, u32, f64)> = t
        .a
        .rows
        .iter()
        .zip(&t.a.cols)
        .zip(&t.a.vals)
        .map(|((r, c), v)| (*r, *c, *v))
        .collect();
    let a = SparseSymMatrix::new(n, entries)?;
    if t.b.len() != n * k {
        return Err(Error::Parse(format!(
            "dense block has {} entries, expected {}",
            t.b.len(),
            n * k
        )));
    }
    let b = DenseMatrix::from_vec(n, k, t.b.clone())?;
    Ok(QmpTerm { a, b, c: t.c })
}

pub fn save_instance(path: &Path, data: &QmpData, gt: Option<&GroundTruth>) -> Result<()> {
    let doc = InstanceJson {
        format_version: FORMAT_VERSION,
        n_minus_k: data.n_minus_k(),
        k: data.k(),
        m: data.num_constraints(),
        objective: term_to_json(&data.objective),
        constraints: data.constraints.iter().map(term_to_json).collect(),
        ground_truth: gt.map(|g| GroundTruthJson {
            gamma_star: g.gamma_star.clone(),
            x_star: g.x_star.as_slice().to_vec(),
            t_star: g.t_star.as_slice().to_vec(),
            opt: g.opt,
            mu_star: g.mu_star,
        }),
    };
    let text = serde_json::to_string(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_instance(path: &Path) -> Result<(QmpData, Option<GroundTruth>)> {
    let text = std::fs::read_to_string(path)?;
    let doc: InstanceJson = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::FormatVersion(doc.format_version));
    }
    let (n, k) = (doc.n_minus_k, doc.k);
    if doc.constraints.len() != doc.m {
        return Err(Error::Parse(format!(
            "file declares m = {} but carries {} constraints",
            doc.m,
            doc.constraints.len()
        )));
    }
    let objective = term_from_json(&doc.objective, n, k)?;
    let constraints = doc
        .constraints
        .iter()
        .map(|t| term_from_json(t, n, k))
        .collect::<Result<Vec<_>>>()?;
    let data = QmpData::new(objective, constraints)?;
    let gt = match doc.ground_truth {
        None => None,
        Some(g) => {
            if g.gamma_star.len() != doc.m {
                return Err(Error::Parse("ground truth gamma has wrong length".into()));
            }
            Some(GroundTruth {
                gamma_star: g.gamma_star,
                x_star: DenseMatrix::from_vec(n, k, g.x_star)?,
                t_star: DenseMatrix::from_vec(k, k, g.t_star)?,
                opt: g.opt,
                mu_star: g.mu_star,
            })
        }
    };
    Ok((data, gt))
}

/// Solution report written by the solver.
#[derive(Serialize, Deserialize)]
pub struct SolutionJson {
    #[serde(rename = "X")]
    pub x: Vec<f64>,
    pub gamma: Vec<f64>,
    pub metrics: SolutionMetrics,
    pub status: String,
}

#[derive(Serialize, Deserialize)]
pub struct SolutionMetrics {
    pub objective: f64,
    pub residual: f64,
    pub max_abs_q: f64,
    pub time_sec: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
}

pub fn save_solution(path: &Path, sol: &SolutionJson) -> Result<()> {
    let text = serde_json::to_string(sol).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_solution(path: &Path) -> Result<SolutionJson> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, GenSpec};

    #[test]
    fn round_trip_is_bit_exact() {
        let spec = GenSpec {
            n_minus_k: 12,
            k: 2,
            m: 3,
            mu_star: 0.1,
            nnz: 12,
            seed: 9,
        };
        let (data, gt) = generate(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        save_instance(&path, &data, Some(&gt)).unwrap();
        let (data2, gt2) = load_instance(&path).unwrap();
        let gt2 = gt2.unwrap();
        assert_eq!(data.objective.b.as_slice(), data2.objective.b.as_slice());
        for (a, b) in data.constraints.iter().zip(&data2.constraints) {
            assert_eq!(a.c.to_bits(), b.c.to_bits());
            assert_eq!(a.b.as_slice(), b.b.as_slice());
            let ea: Vec<_> = a.a.entries().collect();
            let eb: Vec<_> = b.a.entries().collect();
            assert_eq!(ea, eb);
        }
        assert_eq!(gt.gamma_star, gt2.gamma_star);
        assert_eq!(gt.x_star.as_slice(), gt2.x_star.as_slice());
        assert_eq!(gt.t_star.as_slice(), gt2.t_star.as_slice());
        assert_eq!(gt.opt.to_bits(), gt2.opt.to_bits());

        // second save of the reloaded data is byte-identical
        let path2 = dir.path().join("inst2.json");
        save_instance(&path2, &data2, Some(&gt2)).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn missing_ground_truth_is_allowed() {
        let spec = GenSpec {
            n_minus_k: 6,
            k: 2,
            m: 2,
            mu_star: 0.5,
            nnz: 6,
            seed: 2,
        };
        let (data, _) = generate(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        save_instance(&path, &data, None).unwrap();
        let (_, gt) = load_instance(&path).unwrap();
        assert!(gt.is_none());
        assert!(!std::fs::read_to_string(&path)
            .unwrap()
            .contains("ground_truth"));
    }

    #[test]
    fn hand_written_tiny_instance() {
        // 2x1 instance: objective A = I_2, B = 0, c = 0; one constraint
        // with A = [[0, 1], [1, 0]], B = (1; 0), c = -2.
        let text = r#"{
            "format_version": 1,
            "n_minus_k": 2, "k": 1, "m": 1,
            "objective": {"A": {"rows": [0, 1], "cols": [0, 1], "vals": [1.0, 1.0]},
                          "B": [0.0, 0.0], "c": 0.0},
            "constraints": [{"A": {"rows": [0], "cols": [1], "vals": [1.0]},
                             "B": [1.0, 0.0], "c": -2.0}]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hand.json");
        std::fs::write(&path, text).unwrap();
        let (data, gt) = load_instance(&path).unwrap();
        assert!(gt.is_none());
        assert_eq!(data.n_minus_k(), 2);
        assert_eq!(data.k(), 1);
        // q_1 at X = (1; 1): x'Ax/2 = 1, <B, X> = 1, c = -2 -> 0
        let x = DenseMatrix::from_vec(2, 1, vec![1.0, 1.0]).unwrap();
        let (q_obj, q_vec) = data.eval_all_q(&x).unwrap();
        assert_eq!(q_obj, 1.0); // ||X||^2/2
        assert_eq!(q_vec[0], 0.0);
    }

    #[test]
    fn malformed_and_version_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{ not json").unwrap();
        assert!(matches!(load_instance(&path), Err(Error::Parse(_))));

        let path = dir.path().join("v2.json");
        std::fs::write(
            &path,
            r#"{"format_version": 2, "n_minus_k": 1, "k": 1, "m": 0,
                "objective": {"A": {"rows": [], "cols": [], "vals": []},
                              "B": [0.0], "c": 0.0},
                "constraints": []}"#,
        )
        .unwrap();
        assert!(matches!(load_instance(&path), Err(Error::FormatVersion(2))));
    }

    #[test]
    fn solution_round_trip() {
        let sol = SolutionJson {
            x: vec![1.0, -0.5, 3.25e-13],
            gamma: vec![0.125],
            metrics: SolutionMetrics {
                objective: 1.5,
                residual: 1e-14,
                max_abs_q: 9e-15,
                time_sec: 0.25,
                outer_iters: 12,
                inner_iters: 345,
            },
            status: "solved".into(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.json");
        save_solution(&path, &sol).unwrap();
        let back = load_solution(&path).unwrap();
        assert_eq!(back.x, sol.x);
        assert_eq!(back.gamma, sol.gamma);
        assert_eq!(back.status, "solved");
        assert_eq!(back.metrics.residual.to_bits(), sol.metrics.residual.to_bits());
    }
}
