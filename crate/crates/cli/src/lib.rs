//! Command-line front end for `gmf-core`.
//!
//! [`run`] parses the arguments, loads the matrix files, dispatches to the
//! library and returns the exit code together with one JSON report for
//! standard output and diagnostics for standard error.

pub mod matfile;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gmf_core::extended::ExtendedReal;
use gmf_core::gaugefn::{eval_gauge, eval_polar_gauge, in_t_omega};
use gmf_core::gmf::{eval_support, in_domain, ConstraintPair};
use gmf_core::matcore::{Mat, ToleranceConfig};
use gmf_core::omega::{
    caratheodory_witness, in_aff_omega, in_horizon_omega, in_horizon_omega_polar, in_omega,
    in_omega_polar, in_rint_omega,
};
use gmf_core::points::{DualPoint, PrimalPoint};
use gmf_core::varcalc::{canonical_subgradient, in_normal_cone, in_subdifferential};
use gmf_core::verify::{run_criterion, CRITERIA};
use gmf_core::GmfError;
use serde_json::{json, Map, Value};

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code when `verify` finds a failing criterion.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for unreadable, malformed or inconsistent input.
pub const EXIT_BAD_INPUT: i32 = 2;
/// Exit code when the inputs are well formed but violate a precondition,
/// such as `rge B ⊄ rge A`.
pub const EXIT_PRECONDITION: i32 = 3;

/// Seed used by `verify` when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(
    name = "gmf",
    version,
    about = "Generalized matrix-fractional calculus"
)]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TolArgs {
    /// Relative singular-value cutoff for ranks and pseudoinverses.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Eigenvalue slack for semidefiniteness tests.
    #[arg(long, global = true)]
    psd_tol: Option<f64>,
    /// Relative residual bound for range inclusions.
    #[arg(long, global = true)]
    range_tol: Option<f64>,
    /// Relative bound for equalities.
    #[arg(long, global = true)]
    eq_tol: Option<f64>,
    /// Relative bound for `AY = B` residuals.
    #[arg(long, global = true)]
    feas_tol: Option<f64>,
}

impl TolArgs {
    fn config(&self) -> ToleranceConfig {
        let d = ToleranceConfig::default();
        ToleranceConfig {
            rank_tol: self.rank_tol.unwrap_or(d.rank_tol),
            psd_tol: self.psd_tol.unwrap_or(d.psd_tol),
            range_tol: self.range_tol.unwrap_or(d.range_tol),
            eq_tol: self.eq_tol.unwrap_or(d.eq_tol),
            feas_tol: self.feas_tol.unwrap_or(d.feas_tol),
        }
    }
}

/// Constraint files. Without `--a` there are no constraints; without `--b`
/// the right-hand side is zero.
#[derive(Debug, Args)]
struct ConstraintArgs {
    #[arg(long)]
    a: Option<PathBuf>,
    #[arg(long)]
    b: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DualArgs {
    #[arg(long)]
    x: PathBuf,
    /// Symmetric `n × n`.
    #[arg(long)]
    v: PathBuf,
}

#[derive(Debug, Args)]
struct PrimalArgs {
    #[arg(long)]
    y: PathBuf,
    /// Symmetric `n × n`.
    #[arg(long)]
    w: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Support function value with the maximizer Y* and multiplier Z*.
    Support {
        #[command(flatten)]
        dual: DualArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Whether (X, V) lies in the domain of the support function.
    Domain {
        #[command(flatten)]
        dual: DualArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Whether (Y, W) lies in Omega(A, B), or in t·Omega(A, 0) with --t.
    OmegaMember {
        #[command(flatten)]
        primal: PrimalArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Whether (Y, W) lies in the relative interior of Omega(A, B).
    OmegaRint {
        #[command(flatten)]
        primal: PrimalArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Whether (Y, W) lies in the affine hull of Omega(A, B).
    OmegaAff {
        #[command(flatten)]
        primal: PrimalArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Whether (X, V) lies in the polar of Omega(A, B).
    OmegaPolar {
        #[command(flatten)]
        dual: DualArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Whether (Y, W) lies in the horizon cone of Omega(A, B).
    Horizon {
        #[command(flatten)]
        primal: PrimalArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Whether (X, V) lies in the horizon cone of the polar.
    HorizonPolar {
        #[command(flatten)]
        dual: DualArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// The canonical subgradient at (X, V).
    Subgrad {
        #[command(flatten)]
        dual: DualArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Whether (Y, W) is a subgradient at (X, V).
    SubgradCheck {
        #[command(flatten)]
        primal: PrimalArgs,
        #[command(flatten)]
        dual: DualArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Whether (X, V) is normal to Omega(A, B) at the base point (Y, W).
    NconeCheck {
        #[command(flatten)]
        primal: PrimalArgs,
        #[command(flatten)]
        dual: DualArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Gauge of Omega(A, 0) at (Y, W).
    Gauge {
        #[command(flatten)]
        primal: PrimalArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Gauge of the polar of Omega(A, 0) at (X, V).
    GaugePolar {
        #[command(flatten)]
        dual: DualArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
    },
    /// Writes a convex combination of graph points approximating (Y, W).
    Witness {
        #[command(flatten)]
        primal: PrimalArgs,
        #[command(flatten)]
        cons: ConstraintArgs,
        #[arg(long)]
        epsilon: f64,
        /// Output file: a 1 × k weight row followed by the k points.
        #[arg(long)]
        out: PathBuf,
        /// Moves the base solutions Z_i by a seeded step inside {AZ = B}.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Runs the acceptance suite. Tolerance flags do not apply.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run a single criterion (1 to 8).
        #[arg(long)]
        criterion: Option<u8>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Support { .. } => "support",
            Command::Domain { .. } => "domain",
            Command::OmegaMember { .. } => "omega-member",
            Command::OmegaRint { .. } => "omega-rint",
            Command::OmegaAff { .. } => "omega-aff",
            Command::OmegaPolar { .. } => "omega-polar",
            Command::Horizon { .. } => "horizon",
            Command::HorizonPolar { .. } => "horizon-polar",
            Command::Subgrad { .. } => "subgrad",
            Command::SubgradCheck { .. } => "subgrad-check",
            Command::NconeCheck { .. } => "ncone-check",
            Command::Gauge { .. } => "gauge",
            Command::GaugePolar { .. } => "gauge-polar",
            Command::Witness { .. } => "witness",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Exit code, standard output and standard error of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn bad_input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_BAD_INPUT,
            kind: "bad-input",
            message: message.into(),
        }
    }
}

impl From<GmfError> for Failure {
    fn from(e: GmfError) -> Self {
        let (code, kind) = match e {
            GmfError::Dimension(_) | GmfError::Argument(_) | GmfError::Tolerance(_) => {
                (EXIT_BAD_INPUT, "bad-input")
            }
            GmfError::Infeasible { .. } | GmfError::Precondition(_) | GmfError::Config(_) => {
                (EXIT_PRECONDITION, "precondition")
            }
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(Map<String, Value>, i32), Failure>;

/// Loaded inputs with their digests.
struct Inputs {
    tol: ToleranceConfig,
    digests: Map<String, Value>,
}

impl Inputs {
    fn load(&mut self, name: &str, path: &Path) -> Result<Mat, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Failure::bad_input(format!("{name}: cannot read {}: {e}", path.display()))
        })?;
        let m = matfile::parse_matrix(&text)
            .map_err(|e| Failure::bad_input(format!("{name}: {}: {e}", path.display())))?;
        self.digests.insert(
            name.into(),
            json!({ "rows": m.nrows(), "cols": m.ncols(), "sha256": matfile::digest(&m) }),
        );
        Ok(m)
    }

    fn symmetric(&mut self, name: &str, path: &Path) -> Result<Mat, Failure> {
        let m = self.load(name, path)?;
        if m.nrows() == m.ncols()
            && (&m - m.transpose()).norm() > self.tol.eq_tol * m.norm().max(1.0)
        {
            return Err(Failure::bad_input(format!("{name} is not symmetric")));
        }
        Ok(m)
    }

    fn dual(&mut self, args: &DualArgs) -> Result<DualPoint, Failure> {
        let x = self.load("X", &args.x)?;
        let v = self.symmetric("V", &args.v)?;
        Ok(DualPoint::new(x, v)?)
    }

    fn primal(&mut self, args: &PrimalArgs) -> Result<PrimalPoint, Failure> {
        let y = self.load("Y", &args.y)?;
        let w = self.symmetric("W", &args.w)?;
        Ok(PrimalPoint::new(y, w)?)
    }

    fn constraint(
        &mut self,
        args: &ConstraintArgs,
        n: usize,
        m: usize,
    ) -> Result<ConstraintPair, Failure> {
        let (a, b) = match (&args.a, &args.b) {
            (None, None) => (Mat::zeros(0, n), Mat::zeros(0, m)),
            (None, Some(_)) => return Err(Failure::bad_input("--b requires --a")),
            (Some(pa), pb) => {
                let a = self.load("A", pa)?;
                let b = match pb {
                    Some(pb) => self.load("B", pb)?,
                    None => Mat::zeros(a.nrows(), m),
                };
                (a, b)
            }
        };
        if a.ncols() != n {
            return Err(Failure::bad_input(format!(
                "A has {} columns but n = {n}",
                a.ncols()
            )));
        }
        if b.ncols() != m || b.nrows() != a.nrows() {
            return Err(Failure::bad_input(format!(
                "B is {}x{} but must be {}x{m}",
                b.nrows(),
                b.ncols(),
                a.nrows()
            )));
        }
        Ok(ConstraintPair::new(a, b, self.tol)?)
    }
}

fn mat_json(m: &Mat) -> Value {
    let data: Vec<f64> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|ij| m[ij])
        .collect();
    json!({ "rows": m.nrows(), "cols": m.ncols(), "data": data })
}

fn ext_json(v: ExtendedReal) -> Value {
    match v {
        ExtendedReal::Finite(x) => json!(x),
        ExtendedReal::PosInfinity => json!("inf"),
    }
}

fn tol_json(t: &ToleranceConfig) -> Value {
    json!({
        "rank_tol": t.rank_tol,
        "psd_tol": t.psd_tol,
        "range_tol": t.range_tol,
        "eq_tol": t.eq_tol,
        "feas_tol": t.feas_tol,
    })
}

fn outputs(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn boolean(name: &str, value: bool) -> CmdResult {
    Ok((outputs(vec![(name, json!(value))]), EXIT_OK))
}

fn dispatch(cmd: &Command, inputs: &mut Inputs, diag: &mut String) -> CmdResult {
    match cmd {
        Command::Support { dual, cons } => {
            let d = inputs.dual(dual)?;
            let cp = inputs.constraint(cons, d.n(), d.m())?;
            let res = eval_support(&d, &cp);
            Ok((
                outputs(vec![
                    ("value", ext_json(res.value)),
                    (
                        "maximizer",
                        res.maximizer.as_ref().map_or(Value::Null, mat_json),
                    ),
                    (
                        "multiplier",
                        res.multiplier.as_ref().map_or(Value::Null, mat_json),
                    ),
                ]),
                EXIT_OK,
            ))
        }
        Command::Domain { dual, cons } => {
            let d = inputs.dual(dual)?;
            let cp = inputs.constraint(cons, d.n(), d.m())?;
            boolean("in_domain", in_domain(&d, &cp))
        }
        Command::OmegaMember { primal, cons, t } => {
            let p = inputs.primal(primal)?;
            let cp = inputs.constraint(cons, p.n(), p.m())?;
            cp.check_primal(&p)?;
            match t {
                Some(t) => boolean("member", in_t_omega(&p, *t, &cp)?),
                None => boolean("member", in_omega(&p, &cp)),
            }
        }
        Command::OmegaRint { primal, cons } => {
            let p = inputs.primal(primal)?;
            let cp = inputs.constraint(cons, p.n(), p.m())?;
            cp.check_primal(&p)?;
            boolean("member", in_rint_omega(&p, &cp))
        }
        Command::OmegaAff { primal, cons } => {
            let p = inputs.primal(primal)?;
            let cp = inputs.constraint(cons, p.n(), p.m())?;
            cp.check_primal(&p)?;
            boolean("member", in_aff_omega(&p, &cp))
        }
        Command::OmegaPolar { dual, cons } => {
            let d = inputs.dual(dual)?;
            let cp = inputs.constraint(cons, d.n(), d.m())?;
            boolean("member", in_omega_polar(&d, &cp))
        }
        Command::Horizon { primal, cons } => {
            let p = inputs.primal(primal)?;
            let cp = inputs.constraint(cons, p.n(), p.m())?;
            cp.check_primal(&p)?;
            boolean("member", in_horizon_omega(&p, &cp))
        }
        Command::HorizonPolar { dual, cons } => {
            let d = inputs.dual(dual)?;
            let cp = inputs.constraint(cons, d.n(), d.m())?;
            boolean("member", in_horizon_omega_polar(&d, &cp))
        }
        Command::Subgrad { dual, cons } => {
            let d = inputs.dual(dual)?;
            let cp = inputs.constraint(cons, d.n(), d.m())?;
            let sub = canonical_subgradient(&d, &cp)?;
            Ok((
                outputs(vec![
                    ("value", json!(sub.value)),
                    ("y", mat_json(&sub.point.y)),
                    ("w", mat_json(&sub.point.w)),
                    ("certificate_z", mat_json(&sub.certificate_z)),
                ]),
                EXIT_OK,
            ))
        }
        Command::SubgradCheck { primal, dual, cons } => {
            let p = inputs.primal(primal)?;
            let d = inputs.dual(dual)?;
            let cp = inputs.constraint(cons, d.n(), d.m())?;
            boolean("member", in_subdifferential(&p, &d, &cp)?)
        }
        Command::NconeCheck { primal, dual, cons } => {
            let p = inputs.primal(primal)?;
            let d = inputs.dual(dual)?;
            let cp = inputs.constraint(cons, d.n(), d.m())?;
            boolean("member", in_normal_cone(&d, &p, &cp)?)
        }
        Command::Gauge { primal, cons } => {
            let p = inputs.primal(primal)?;
            let cp = inputs.constraint(cons, p.n(), p.m())?;
            let g = eval_gauge(&p, &cp)?;
            Ok((
                outputs(vec![
                    ("value", ext_json(g.value)),
                    ("sigma_min", ext_json(g.sigma_min)),
                    (
                        "critical_matrix",
                        g.critical_matrix.as_ref().map_or(Value::Null, mat_json),
                    ),
                ]),
                EXIT_OK,
            ))
        }
        Command::GaugePolar { dual, cons } => {
            let d = inputs.dual(dual)?;
            let cp = inputs.constraint(cons, d.n(), d.m())?;
            Ok((
                outputs(vec![("value", ext_json(eval_polar_gauge(&d, &cp)?))]),
                EXIT_OK,
            ))
        }
        Command::Witness {
            primal,
            cons,
            epsilon,
            out,
            seed,
        } => {
            let p = inputs.primal(primal)?;
            let cp = inputs.constraint(cons, p.n(), p.m())?;
            let witness = caratheodory_witness(&p, &cp, *epsilon, *seed)?;
            let mut text = String::new();
            let weights = Mat::from_row_slice(1, witness.weights.len(), &witness.weights);
            matfile::write_matrix(&mut text, &weights, Some("weights"));
            for (i, y) in witness.points.iter().enumerate() {
                matfile::write_matrix(&mut text, y, Some(&format!("point {i}")));
            }
            std::fs::write(out, text)
                .map_err(|e| Failure::bad_input(format!("cannot write {}: {e}", out.display())))?;
            let induced = witness.induced_point();
            Ok((
                outputs(vec![
                    ("epsilon", json!(epsilon)),
                    ("points", json!(witness.points.len())),
                    ("distance", json!(induced.distance(&p))),
                    ("induced_y", mat_json(&induced.y)),
                    ("induced_w", mat_json(&induced.w)),
                ]),
                EXIT_OK,
            ))
        }
        Command::Verify { seed, criterion } => {
            let ids: Vec<u8> = match criterion {
                Some(id) => vec![*id],
                None => CRITERIA.iter().map(|&(id, _)| id).collect(),
            };
            let mut rows = Vec::new();
            let mut all = true;
            for id in ids {
                let outcome = run_criterion(id, *seed)?;
                diag.push_str(&format!("{outcome}\n"));
                all &= outcome.passed;
                rows.push(json!({
                    "id": outcome.id,
                    "name": outcome.name,
                    "passed": outcome.passed,
                    "detail": outcome.detail,
                }));
            }
            let code = if all { EXIT_OK } else { EXIT_CHECK_FAILED };
            Ok((
                outputs(vec![
                    ("criteria", Value::Array(rows)),
                    ("passed", json!(all)),
                ]),
                code,
            ))
        }
    }
}

/// Runs one command line (including the program name) and returns its
/// outcome without touching the process streams.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let start = Instant::now();
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let echo: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                    stderr: String::new(),
                };
            }
            let failure = Failure::bad_input(e.kind().to_string());
            let report = report(
                None,
                &echo,
                Map::new(),
                None,
                None,
                EXIT_BAD_INPUT,
                Some(&failure),
                start,
            );
            return Outcome {
                code: EXIT_BAD_INPUT,
                stdout: report,
                stderr: e.to_string(),
            };
        }
    };

    let tol = if matches!(cli.command, Command::Verify { .. }) {
        ToleranceConfig::default()
    } else {
        cli.tol.config()
    };
    let mut inputs = Inputs {
        tol,
        digests: Map::new(),
    };
    let mut diag = String::new();
    let result = tol
        .validate()
        .map_err(Failure::from)
        .and_then(|_| dispatch(&cli.command, &mut inputs, &mut diag));
    let seed = match &cli.command {
        Command::Verify { seed, .. } => Some(*seed),
        Command::Witness { seed, .. } => *seed,
        _ => None,
    };
    let name = Some(cli.command.name());
    match result {
        Ok((out, code)) => Outcome {
            code,
            stdout: report(
                name,
                &echo,
                inputs.digests,
                Some(out),
                Some((&tol, seed)),
                code,
                None,
                start,
            ),
            stderr: diag,
        },
        Err(failure) => {
            diag.push_str(&format!("gmf: {}\n", failure.message));
            Outcome {
                code: failure.code,
                stdout: report(
                    name,
                    &echo,
                    inputs.digests,
                    None,
                    Some((&tol, seed)),
                    failure.code,
                    Some(&failure),
                    start,
                ),
                stderr: diag,
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn report(
    command: Option<&str>,
    argv: &[String],
    inputs: Map<String, Value>,
    outputs: Option<Map<String, Value>>,
    config: Option<(&ToleranceConfig, Option<u64>)>,
    code: i32,
    failure: Option<&Failure>,
    start: Instant,
) -> String {
    let mut doc = Map::new();
    doc.insert("command".into(), json!(command));
    doc.insert("argv".into(), json!(argv));
    doc.insert("inputs".into(), Value::Object(inputs));
    doc.insert("outputs".into(), outputs.map_or(Value::Null, Value::Object));
    if let Some((tol, seed)) = config {
        doc.insert("tolerances".into(), tol_json(tol));
        doc.insert("seed".into(), json!(seed));
    }
    doc.insert(
        "error".into(),
        failure.map_or(
            Value::Null,
            |f| json!({ "kind": f.kind, "message": f.message }),
        ),
    );
    doc.insert("exit_code".into(), json!(code));
    doc.insert("wall_time_s".into(), json!(start.elapsed().as_secs_f64()));
    let mut text =
        serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
    text.push('\n');
    text
}
