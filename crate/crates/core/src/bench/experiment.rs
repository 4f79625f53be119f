use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::{load_matrix_csv, load_vector_csv, write_table_csv, write_trace_csv, write_vector_csv};
use super::synth::{mix_seed, randn_from, randn_vector, rng, subsample_indices};
use super::BenchError;
use crate::diagnostics::{self, ProbeMode, GEOMETRY_TOL};
use crate::model::{Family, FeasibleSet, ProblemInstance, Shift};
use crate::selection::SelectionKind;
use crate::solvers::{self, Lipschitz, Method, SolverConfig};

pub const SUMMARY_HEADER: [&str; 13] = [
    "family",
    "method",
    "lambda",
    "s",
    "c",
    "theta",
    "k",
    "trial",
    "final_objective",
    "iters",
    "elapsed_s",
    "cws_probe",
    "exactness_flags",
];

/// A number or the word "auto".
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
enum NumOrAuto {
    Num(f64),
    Word(AutoWord),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
enum AutoWord {
    Auto,
}

impl Default for NumOrAuto {
    fn default() -> Self {
        NumOrAuto::Word(AutoWord::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSpec {
    /// A and (optionally) y read from CSV files.
    Csv { a: PathBuf, y: Option<PathBuf> },
    /// A ~ randn(m, n), then y ~ randn(m) from the same stream.
    Synthetic { m: usize, n: usize, seed: u64 },
    /// Uniform m×n submatrix of a CSV source. y is read from a file with the
    /// same rows, or defaults to the row means of the full source.
    Subsample { source: PathBuf, y: Option<PathBuf>, m: usize, n: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lambda: Vec<f64>,
    #[serde(default = "default_s")]
    pub s: Vec<usize>,
    #[serde(default = "default_c")]
    pub c: Vec<f64>,
    #[serde(default = "default_theta")]
    pub theta: Vec<f64>,
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
}

fn default_s() -> Vec<usize> {
    vec![1]
}
fn default_c() -> Vec<f64> {
    vec![0.0]
}
fn default_theta() -> Vec<f64> {
    vec![1e-4]
}
fn default_k() -> Vec<usize> {
    vec![2]
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub max_iters: usize,
    pub tol: f64,
    pub window: Option<usize>,
    pub selection: SelectionKind,
    pub mscr_outer: usize,
    pdca_l: NumOrAuto,
    /// NNSPCA diagonal shift γ.
    gamma: NumOrAuto,
    /// Write wall time into summary.csv (makes it run-dependent).
    pub record_wall_time: bool,
    /// "none", "exhaustive" or "sampled:COUNT".
    pub probe: String,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            tol: 1e-8,
            window: None,
            selection: SelectionKind::UniformRandom,
            mscr_outer: 10,
            pdca_l: NumOrAuto::default(),
            gamma: NumOrAuto::default(),
            record_wall_time: false,
            probe: "none".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeSetting {
    None,
    Mode(ProbeMode),
}

impl ProbeSetting {
    /// Parses "none", "exhaustive" or "sampled:COUNT"; sampled probes use
    /// `seed`.
    pub fn parse(s: &str, seed: u64) -> Result<Self, BenchError> {
        match s {
            "none" | "" => Ok(ProbeSetting::None),
            "exhaustive" => Ok(ProbeSetting::Mode(ProbeMode::Exhaustive)),
            other => other
                .strip_prefix("sampled:")
                .and_then(|c| c.parse().ok())
                .map(|count| ProbeSetting::Mode(ProbeMode::Sampled { count, seed }))
                .ok_or_else(|| BenchError::Spec(format!("unknown probe mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub family: Family,
    pub dataset: DatasetSpec,
    pub grid: GridSpec,
    pub methods: Vec<String>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverSection,
    /// Directory that relative dataset paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub lambda: f64,
    pub s: usize,
    pub c: f64,
    pub theta: f64,
    pub k: usize,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, BenchError> {
        let mut spec: ExperimentSpec = toml::from_str(text).map_err(|e| BenchError::Spec(e.to_string()))?;
        spec.base_dir = base_dir.to_path_buf();
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let g = &self.grid;
        if g.lambda.is_empty() || g.s.is_empty() || g.c.is_empty() || g.theta.is_empty() || g.k.is_empty() {
            return Err(BenchError::Spec("every grid axis needs at least one value".into()));
        }
        if self.trials < 1 {
            return Err(BenchError::Spec("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(BenchError::Spec("methods list is empty".into()));
        }
        for m in &self.methods {
            self.method_for(m, 2)?;
        }
        if let DatasetSpec::Synthetic { m, n, .. } = self.dataset {
            if m < 2 || n < 2 {
                return Err(BenchError::Spec(format!("synthetic data needs m, n >= 2, got {m}x{n}")));
            }
        }
        ProbeSetting::parse(&self.solver.probe, 0)?;
        Ok(())
    }

    /// Parses a method name; plain "bcd-l" takes k from the grid point.
    pub fn method_for(&self, name: &str, k: usize) -> Result<Method, BenchError> {
        if name.eq_ignore_ascii_case("bcd-l") {
            return Ok(Method::Bcdl(k));
        }
        name.parse().map_err(|e: crate::Error| BenchError::Spec(e.to_string()))
    }

    /// Grid points in canonical order (λ outermost, then s, c, θ, k).
    pub fn grid_points(&self) -> Vec<GridPoint> {
        let g = &self.grid;
        let mut out = Vec::new();
        for &lambda in &g.lambda {
            for &s in &g.s {
                for &c in &g.c {
                    for &theta in &g.theta {
                        for &k in &g.k {
                            out.push(GridPoint { index: out.len(), lambda, s, c, theta, k });
                        }
                    }
                }
            }
        }
        out
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn solver_config(&self, method: Method) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            method,
            max_iters: s.max_iters,
            tol: s.tol,
            window: s.window,
            selection: s.selection,
            seed: 0,
            mscr_outer: s.mscr_outer,
            pdca_l: match s.pdca_l {
                NumOrAuto::Num(l) => Lipschitz::Value(l),
                NumOrAuto::Word(_) => Lipschitz::Auto,
            },
        }
    }
}

/// Loads (A, y); y is empty when the dataset does not provide one.
pub fn load_data(spec: &ExperimentSpec) -> Result<(DMatrix<f64>, DVector<f64>), BenchError> {
    match &spec.dataset {
        DatasetSpec::Csv { a, y } => {
            let a_mat = load_matrix_csv(&spec.resolve(a))?;
            let y_vec = match y {
                Some(path) => load_vector_csv(&spec.resolve(path))?,
                None => DVector::zeros(0),
            };
            Ok((a_mat, y_vec))
        }
        DatasetSpec::Synthetic { m, n, seed } => {
            let mut r = rng(*seed);
            let a = randn_from(&mut r, *m, *n);
            let y = randn_vector(&mut r, *m);
            Ok((a, y))
        }
        DatasetSpec::Subsample { source, y, m, n, seed } => {
            let full = load_matrix_csv(&spec.resolve(source))?;
            let (ri, ci) = subsample_indices(full.nrows(), full.ncols(), *m, *n, *seed)?;
            let y_full = match y {
                Some(path) => load_vector_csv(&spec.resolve(path))?,
                None => DVector::from_fn(full.nrows(), |i, _| full.row(i).mean()),
            };
            if y_full.len() != full.nrows() {
                return Err(BenchError::Spec(format!(
                    "target has {} entries but the source has {} rows",
                    y_full.len(),
                    full.nrows()
                )));
            }
            let y_sub = DVector::from_iterator(ri.len(), ri.iter().map(|&i| y_full[i]));
            Ok((full.select_rows(&ri).select_columns(&ci), y_sub))
        }
    }
}

pub fn build_instance(
    spec: &ExperimentSpec,
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    gp: &GridPoint,
) -> Result<ProblemInstance, BenchError> {
    let needs_y = spec.family != Family::Nnspca;
    if needs_y && y.len() != a.nrows() {
        return Err(BenchError::Spec(format!(
            "{} needs a target with {} entries, got {}",
            spec.family,
            a.nrows(),
            y.len()
        )));
    }
    let (a, y) = (a.clone(), y.clone());
    let p = match spec.family {
        Family::Sit => ProblemInstance::sit(a, y, gp.lambda, gp.s, gp.theta),
        Family::Nnspca => {
            let gamma = match spec.solver.gamma {
                NumOrAuto::Num(g) => Shift::Value(g),
                NumOrAuto::Word(_) => Shift::Auto,
            };
            ProblemInstance::nnspca(a, gp.lambda, gp.s, gamma, gp.theta)
        }
        Family::Dcpb1 => ProblemInstance::dcpb1(a, y, gp.c, Shift::Value(gp.lambda), gp.theta),
        Family::Dcpb2 => ProblemInstance::dcpb2(a, y, gp.lambda, gp.c, gp.theta),
    };
    Ok(p?)
}

/// Seeded feasible start: |Gaussian| projected onto the simplex or the
/// nonnegative sphere, or a Gaussian projected onto the box-hyperplane set.
pub fn initial_point(set: &FeasibleSet, n: usize, seed: u64) -> Result<DVector<f64>, BenchError> {
    let g = randn_vector(&mut rng(seed), n);
    let x = match set {
        FeasibleSet::Simplex | FeasibleSet::NonnegSphere => set.project(&g.abs())?,
        FeasibleSet::BoxHyperplane { .. } => set.project(&g)?,
    };
    Ok(x)
}

/// Seed of the start point and selection stream of one (grid point, trial).
fn run_seed(base: u64, grid: usize, trial: usize) -> u64 {
    mix_seed(mix_seed(base) ^ ((grid as u64) << 32) ^ trial as u64)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub family: Family,
    pub method: String,
    pub grid: GridPoint,
    pub trial: usize,
    pub final_objective: f64,
    pub iters: usize,
    pub elapsed_s: Option<f64>,
    pub cws_probe: String,
    pub exactness_flags: String,
}

impl SummaryRow {
    fn fields(&self) -> Vec<String> {
        vec![
            self.family.to_string(),
            self.method.clone(),
            self.grid.lambda.to_string(),
            self.grid.s.to_string(),
            self.grid.c.to_string(),
            self.grid.theta.to_string(),
            self.grid.k.to_string(),
            self.trial.to_string(),
            self.final_objective.to_string(),
            self.iters.to_string(),
            self.elapsed_s.map(|e| e.to_string()).unwrap_or_default(),
            self.cws_probe.clone(),
            self.exactness_flags.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub out_dir: PathBuf,
    pub rows: Vec<SummaryRow>,
}

struct Job {
    grid: GridPoint,
    method: Method,
    trial: usize,
}

fn exactness_flags(p: &ProblemInstance, x: &DVector<f64>) -> Result<String, crate::Error> {
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    Ok(match p.family() {
        Family::Sit => {
            let r = diagnostics::check_sit_exactness(p, x, GEOMETRY_TOL)?;
            if r.active {
                format!("sparse_exact={}", verdict(r.passed))
            } else {
                "sparse_exact=inactive".into()
            }
        }
        Family::Nnspca => String::new(),
        Family::Dcpb1 => {
            let q = p.curvature();
            let n = p.n();
            let concave = (0..n).all(|i| (i + 1..n).all(|j| q.alpha(i, j) <= 0.0));
            if concave {
                format!("extreme_point={}", verdict(diagnostics::check_extreme_point(x, GEOMETRY_TOL)))
            } else {
                "extreme_point=inactive".into()
            }
        }
        Family::Dcpb2 => {
            let r = diagnostics::check_dcpb2_exactness(p, p.curvature().matrix(), x, GEOMETRY_TOL);
            match r.regime {
                diagnostics::Dcpb2Regime::Inactive => "binary=inactive".into(),
                diagnostics::Dcpb2Regime::NonzeroEntries => format!("nonzero={}", verdict(r.passed)),
                diagnostics::Dcpb2Regime::Binary => format!("binary={}", verdict(r.passed)),
            }
        }
    })
}

/// Runs every (grid point, method, trial) cell, writes per-run trace and
/// final-point files, then `summary.csv` in canonical order. Outputs of
/// successful runs are kept even when another run fails.
pub fn run_experiment(spec: &ExperimentSpec, opts: &RunOptions) -> Result<ExperimentOutcome, BenchError> {
    spec.validate()?;
    let base_seed = opts.seed.unwrap_or(spec.seed);
    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| spec.output_dir.as_ref().map(|p| spec.resolve(p)))
        .or_else(|| std::env::var_os("BENCH_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("bench_out"));
    fs::create_dir_all(&out_dir).map_err(|e| BenchError::io(&out_dir, e))?;

    let (a, y) = load_data(spec)?;
    let grid = spec.grid_points();
    let instances = grid
        .iter()
        .map(|gp| build_instance(spec, &a, &y, gp))
        .collect::<Result<Vec<_>, _>>()?;
    let probe = ProbeSetting::parse(&spec.solver.probe, base_seed)?;

    let mut jobs = Vec::new();
    for gp in &grid {
        for name in &spec.methods {
            for trial in 0..spec.trials {
                jobs.push(Job { grid: *gp, method: spec.method_for(name, gp.k)?, trial });
            }
        }
    }

    let run_one = |job: &Job| -> Result<SummaryRow, BenchError> {
        let p = &instances[job.grid.index];
        let seed = run_seed(base_seed, job.grid.index, job.trial);
        let x0 = initial_point(&p.feasible_set(), p.n(), seed)?;
        let mut cfg = spec.solver_config(job.method);
        cfg.seed = mix_seed(seed.wrapping_add(1));
        let wrap = |source: crate::Error| BenchError::Run {
            method: job.method.to_string(),
            grid: job.grid.index,
            trial: job.trial,
            source,
        };
        let trace = solvers::run(p, &cfg, &x0).map_err(wrap)?;
        let stem = format!("{}_{}_{}", job.method, job.grid.index, job.trial);
        write_trace_csv(&out_dir.join(format!("trace_{stem}.csv")), &trace)?;
        write_vector_csv(&out_dir.join(format!("final_{stem}.csv")), &trace.final_x)?;

        let cws_probe = match probe {
            ProbeSetting::None => String::new(),
            ProbeSetting::Mode(mode) => {
                let k = match job.method {
                    Method::Bcdl(k) => k,
                    _ => 2,
                };
                let r = diagnostics::probe_cws(p, &trace.final_x, k, mode).map_err(wrap)?;
                r.is_cws.to_string()
            }
        };
        Ok(SummaryRow {
            family: spec.family,
            method: job.method.to_string(),
            grid: job.grid,
            trial: job.trial,
            final_objective: trace.final_objective(),
            iters: trace.iterations(),
            elapsed_s: spec
                .solver
                .record_wall_time
                .then(|| trace.records.last().map_or(0.0, |r| r.elapsed_s)),
            cws_probe,
            exactness_flags: exactness_flags(p, &trace.final_x).map_err(wrap)?,
        })
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| BenchError::Spec(format!("thread pool: {e}")))?;
    let results: Vec<Result<SummaryRow, BenchError>> = pool.install(|| jobs.par_iter().map(run_one).collect());

    let mut rows = Vec::new();
    let mut first_error = None;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    let table: Vec<Vec<String>> = rows.iter().map(SummaryRow::fields).collect();
    write_table_csv(&out_dir.join("summary.csv"), &SUMMARY_HEADER, &table)?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(ExperimentOutcome { out_dir, rows }),
    }
}
