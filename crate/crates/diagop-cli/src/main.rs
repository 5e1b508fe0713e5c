//! `diagop` — spectral calculus for diagonal self-adjoint operators from the
//! command line.
//!
//! Every subcommand is a thin shell over one library operation; the output
//! artifact is a single JSON object carrying the resolved configuration, the
//! result, and a provenance block echoing every horizon and tolerance so the
//! numbers are self-describing. Identical configurations produce
//! byte-identical artifacts.

mod matrix_io;
mod spec_input;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use diagop::domains::{band_profile, domains_equal_codiag, fw_decide, BandDim};
use diagop::epsnet::eps_net_diagonalize;
use diagop::equivalence::{b_t_obstruction, relatively_compact_check, ucres_equivalent, wvn_construct};
use diagop::matching::bottleneck_match;
use diagop::metrics::{nrt_distance, srt_distance, MetricParams, TailBoundMode};
use diagop::reproduce;
use diagop::spectra::{sigma_bar, spectrum_report, weyl_witnesses};
use diagop::turbulence::{orbit_walk_compact_at_zero, orbit_walk_unbounded, verify_walk};
use diagop::{DiagopError, OperatorSpec};

#[derive(Debug)]
pub enum CliError {
    /// Domain-level failure (exit 1).
    Domain(DiagopError),
    /// I/O or input parsing failure (exit 2).
    Input(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Input(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<DiagopError> for CliError {
    fn from(e: DiagopError) -> Self {
        match e {
            DiagopError::Syntax { .. } | DiagopError::UnknownSymbol { .. } => {
                CliError::Input(e.to_string())
            }
            other => CliError::Domain(other),
        }
    }
}

#[derive(Parser)]
#[command(name = "diagop", version, about = "Spectral calculus for diagonal self-adjoint operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// Operator input: a spec file / descriptor, or a family name with flags.
#[derive(Args)]
struct OpInput {
    /// Operator: JSON spec path or descriptor like `B_t(t=0.5)`.
    #[arg(long, conflicts_with = "family")]
    op: Option<String>,
    /// Built-in family name (example41_A | example41_B | A_t | B_t | A_F | rationals).
    #[arg(long)]
    family: Option<String>,
    /// Family parameter `t` (for A_t, B_t).
    #[arg(long, requires = "family")]
    t: Option<f64>,
    /// Indicator predicate for A_F (even | odd | upto:N | set:a;b;c).
    #[arg(long, requires = "family")]
    pred: Option<String>,
    /// Window bound M for `rationals`.
    #[arg(long, requires = "family")]
    m: Option<u32>,
    /// Enumeration variant for `rationals` (a | b | c).
    #[arg(long, requires = "family")]
    variant: Option<String>,
}

impl OpInput {
    fn descriptor(&self) -> Result<String, CliError> {
        match (&self.op, &self.family) {
            (Some(op), None) => Ok(op.clone()),
            (None, Some(fam)) => {
                let mut args = Vec::new();
                if let Some(t) = self.t {
                    args.push(format!("t={t}"));
                }
                if let Some(p) = &self.pred {
                    args.push(format!("pred={p}"));
                }
                if let Some(m) = self.m {
                    args.push(format!("m={m}"));
                }
                if let Some(v) = &self.variant {
                    args.push(format!("variant={v}"));
                }
                if args.is_empty() {
                    Ok(fam.clone())
                } else {
                    Ok(format!("{fam}({})", args.join(",")))
                }
            }
            _ => Err(CliError::Input("give exactly one of --op or --family".into())),
        }
    }
}

#[derive(Args)]
struct WindowArgs {
    /// Window as two reals, e.g. `--window 0 6`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true,
          default_values_t = [-diagop::DEFAULT_WINDOW, diagop::DEFAULT_WINDOW])]
    window: Vec<f64>,
    #[arg(long, default_value_t = diagop::DEFAULT_HORIZON)]
    horizon: u64,
    #[arg(long, default_value_t = diagop::DEFAULT_RESOLUTION)]
    resolution: f64,
}

impl WindowArgs {
    fn window(&self) -> (f64, f64) {
        (self.window[0], self.window[1])
    }
}

#[derive(Subcommand)]
enum Command {
    /// Essential spectrum of an operator within a window.
    Ess {
        #[command(flatten)]
        input: OpInput,
        #[command(flatten)]
        win: WindowArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Full spectrum report: spectrum, essential part, discrete eigenvalues.
    Spectrum {
        #[command(flatten)]
        input: OpInput,
        #[command(flatten)]
        win: WindowArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Essential spectrum plus boundedness bit.
    SigmaBar {
        #[command(flatten)]
        input: OpInput,
        #[command(flatten)]
        win: WindowArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Basis-vector witnesses for a point of the essential spectrum.
    Witnesses {
        #[command(flatten)]
        input: OpInput,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = diagop::DEFAULT_HORIZON)]
        horizon: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Resolvent distance between co-diagonal operators.
    Dist {
        #[arg(long, value_parser = ["srt", "nrt"])]
        kind: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Basis cutoff of the SRT double sum.
        #[arg(long, default_value_t = 20)]
        n_max: u32,
        /// Time cutoff of the SRT double sum.
        #[arg(long, default_value_t = 20)]
        m_max: u32,
        /// Use generator tail equality to tighten the SRT truncation bound.
        #[arg(long)]
        metadata_tail: bool,
        #[arg(long, default_value_t = diagop::DEFAULT_HORIZON)]
        horizon: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal bottleneck matching of the first N eigenvalues.
    Match {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 256)]
        n: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bottleneck matching plus the per-block compactness certificate.
    Wvn {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 2048)]
        n: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Resolvent-modulo-compact equivalence via the sigma-bar invariant.
    Ucres {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        win: WindowArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Relative compactness of a co-diagonal perturbation.
    Relcompact {
        /// The perturbation, as an operator spec.
        #[arg(long)]
        k: String,
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = diagop::DEFAULT_HORIZON)]
        horizon: u64,
        #[arg(long, default_value_t = diagop::DEFAULT_RESOLUTION)]
        resolution: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dyadic band profile of the operator domain.
    Bands {
        #[command(flatten)]
        input: OpInput,
        #[arg(long, default_value_t = 256)]
        n_max: u32,
        #[arg(long, default_value_t = diagop::DEFAULT_HORIZON)]
        horizon: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Unitary equivalence of domains via the band-shift criterion.
    Fw {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 5)]
        k_max: u32,
        #[arg(long, default_value_t = 256)]
        n_max: u32,
        #[arg(long, default_value_t = 64)]
        l_max: u32,
        /// Sampling horizon for the band profiles.
        #[arg(long, default_value_t = 1_930_000)]
        horizon: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Equality of domains of co-diagonal operators via weight ratios.
    DomEq {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = diagop::DEFAULT_HORIZON)]
        horizon: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Grid minimum of |k - l + t/3 - s/(m+2)| (the B_t obstruction).
    Obstruction {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        /// Common bound for k, l, m.
        #[arg(long, default_value_t = 100)]
        grid: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Orbit walk between unbounded operators with empty essential spectrum.
    Walk {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        r: f64,
        #[arg(long, default_value_t = 512)]
        horizon: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Orbit walk from the zero operator toward a finite-rank diagonal.
    Walk0 {
        /// Entries as `idx:value,...`, e.g. `1:1.0,2:-0.6,3:0.3`.
        #[arg(long)]
        entries: String,
        #[arg(long, default_value_t = 8)]
        probes: u64,
        #[arg(long, default_value_t = 0.9)]
        eps: f64,
        #[arg(long, default_value_t = 0.2)]
        r: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Round the spectrum of a Hermitian matrix onto an epsilon-net.
    Epsnet {
        /// Matrix file: CSV (row-major reals) or JSON {"re": [[..]], "im": [[..]]}.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the built-in reproduction suite.
    Reproduce {
        /// Run every criterion.
        #[arg(long, default_value_t = true)]
        all: bool,
        /// Comma-separated criterion ids to run instead.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(desc: &str, win: Option<&WindowArgs>) -> Result<OperatorSpec, CliError> {
    // Built-ins declare accumulation points out to the window edge, so a
    // query never outruns the declaration.
    let bound = win
        .map(|w| {
            let (lo, hi) = w.window();
            lo.abs().max(hi.abs()).ceil().max(64.0) as u32
        })
        .unwrap_or(64);
    spec_input::load_operator(desc, bound)
}

struct Artifact {
    command: &'static str,
    config: serde_json::Value,
    result: serde_json::Value,
    provenance: serde_json::Value,
    csv: Option<String>,
}

impl Artifact {
    fn emit(self, output: &OutputArgs) -> Result<(), CliError> {
        let body = match output.format {
            Format::Json => {
                let value = json!({
                    "command": self.command,
                    "config": self.config,
                    "result": self.result,
                    "provenance": self.provenance,
                });
                let mut s = serde_json::to_string_pretty(&value)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                s.push('\n');
                s
            }
            Format::Csv => self.csv.ok_or_else(|| {
                CliError::Input("this command has no CSV form; use --format json".into())
            })?,
        };
        match &output.out {
            Some(path) => std::fs::write(path, body)
                .map_err(|e| CliError::Input(format!("writing {}: {e}", path.display()))),
            None => {
                std::io::stdout()
                    .write_all(body.as_bytes())
                    .map_err(|e| CliError::Input(e.to_string()))
            }
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn set_csv(set: &diagop::ClosedSetApprox) -> String {
    let mut s = String::from("kind,lo,hi\n");
    for p in &set.points {
        s.push_str(&format!("point,{p},{p}\n"));
    }
    for (a, b) in &set.intervals {
        s.push_str(&format!("interval,{a},{b}\n"));
    }
    s
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Ess { input, win, output } => {
            let a = load(&input.descriptor()?, Some(&win))?;
            let ess = diagop::spectra::essential_spectrum(
                &a,
                win.window(),
                win.horizon,
                win.resolution,
            )?;
            Artifact {
                command: "ess",
                config: json!({"op": a.label(), "basis": a.basis}),
                result: to_value(&ess),
                provenance: json!({
                    "window": win.window(),
                    "horizon": win.horizon,
                    "resolution": win.resolution,
                }),
                csv: Some(set_csv(&ess)),
            }
            .emit(&output)?;
        }
        Command::Spectrum { input, win, output } => {
            let a = load(&input.descriptor()?, Some(&win))?;
            let report =
                spectrum_report(&a, win.window(), win.horizon, win.resolution)?;
            Artifact {
                command: "spectrum",
                config: json!({"op": a.label(), "basis": a.basis}),
                result: to_value(&report),
                provenance: json!({
                    "window": win.window(),
                    "horizon": win.horizon,
                    "resolution": win.resolution,
                }),
                csv: Some(set_csv(&report.spectrum)),
            }
            .emit(&output)?;
        }
        Command::SigmaBar { input, win, output } => {
            let a = load(&input.descriptor()?, Some(&win))?;
            let sb = sigma_bar(&a, win.window(), win.horizon, win.resolution)?;
            let csv = format!("unbounded_bit,{}\n{}", sb.unbounded_bit, set_csv(&sb.ess));
            Artifact {
                command: "sigma-bar",
                config: json!({"op": a.label(), "basis": a.basis}),
                result: to_value(&sb),
                provenance: json!({
                    "window": win.window(),
                    "horizon": win.horizon,
                    "resolution": win.resolution,
                }),
                csv: Some(csv),
            }
            .emit(&output)?;
        }
        Command::Witnesses { input, lambda, eps, count, horizon, output } => {
            let a = load(&input.descriptor()?, None)?;
            let idx = weyl_witnesses(&a, lambda, eps, count, horizon);
            let mut csv = String::from("index,eigenvalue\n");
            for &n in &idx {
                csv.push_str(&format!("{n},{}\n", a.eval(n)));
            }
            Artifact {
                command: "witnesses",
                config: json!({"op": a.label(), "lambda": lambda, "eps": eps, "count": count}),
                result: to_value(&idx),
                provenance: json!({"horizon": horizon}),
                csv: Some(csv),
            }
            .emit(&output)?;
        }
        Command::Dist { kind, a, b, n_max, m_max, metadata_tail, horizon, output } => {
            let oa = load(&a, None)?;
            let ob = load(&b, None)?;
            let (result, provenance) = if kind == "srt" {
                let params = MetricParams {
                    n_max,
                    m_max,
                    tail_bound_mode: if metadata_tail {
                        TailBoundMode::MetadataBound
                    } else {
                        TailBoundMode::Ignore
                    },
                };
                let d = srt_distance(&oa, &ob, &params)?;
                (to_value(&d), json!({"n_max": n_max, "m_max": m_max}))
            } else {
                let d = nrt_distance(&oa, &ob, horizon)?;
                (to_value(&d), json!({"horizon": horizon}))
            };
            let csv = format!("kind,value\n{kind},{}\n", result["value"]);
            Artifact {
                command: "dist",
                config: json!({"kind": kind, "a": oa.label(), "b": ob.label()}),
                result,
                provenance,
                csv: Some(csv),
            }
            .emit(&output)?;
        }
        Command::Match { a, b, n, output } => {
            let oa = load(&a, None)?;
            let ob = load(&b, None)?;
            oa.check_codiagonal(&ob)?;
            let av: Vec<f64> = (1..=n).map(|i| oa.eval(i)).collect();
            let bv: Vec<f64> = (1..=n).map(|i| ob.eval(i)).collect();
            let plan = bottleneck_match(&av, &bv)?;
            let mut csv = String::from("n,pi_n,a_pi_n,b_n\n");
            for (pos, &j) in plan.mapping.iter().enumerate() {
                csv.push_str(&format!("{},{},{},{}\n", pos + 1, j + 1, av[j], bv[pos]));
            }
            Artifact {
                command: "match",
                config: json!({"a": oa.label(), "b": ob.label(), "n": n}),
                result: to_value(&plan),
                provenance: json!({"n": n}),
                csv: Some(csv),
            }
            .emit(&output)?;
        }
        Command::Wvn { a, b, n, output } => {
            let oa = load(&a, None)?;
            let ob = load(&b, None)?;
            let (plan, cert) = wvn_construct(&oa, &ob, n)?;
            let mut csv = String::from("block,sup\n");
            for (j, s) in cert.tail_sup_by_block.iter().enumerate() {
                csv.push_str(&format!("{j},{s}\n"));
            }
            Artifact {
                command: "wvn",
                config: json!({"a": oa.label(), "b": ob.label(), "n": n}),
                result: json!({"plan": to_value(&plan), "certificate": to_value(&cert)}),
                provenance: json!({"n": n}),
                csv: Some(csv),
            }
            .emit(&output)?;
        }
        Command::Ucres { a, b, win, output } => {
            let oa = load(&a, Some(&win))?;
            let ob = load(&b, Some(&win))?;
            let eq = ucres_equivalent(&oa, &ob, win.window(), win.horizon, win.resolution)?;
            Artifact {
                command: "ucres",
                config: json!({"a": oa.label(), "b": ob.label()}),
                result: json!({"equivalent": eq}),
                provenance: json!({
                    "window": win.window(),
                    "horizon": win.horizon,
                    "resolution": win.resolution,
                }),
                csv: Some(format!("equivalent\n{eq}\n")),
            }
            .emit(&output)?;
        }
        Command::Relcompact { k, a, horizon, resolution, output } => {
            let ok = load(&k, None)?;
            let oa = load(&a, None)?;
            let report = relatively_compact_check(&ok, &oa, horizon, resolution)?;
            let mut csv = String::from("block,sup_gamma\n");
            for (j, s) in report.block_sups.iter().enumerate() {
                csv.push_str(&format!("{j},{s}\n"));
            }
            Artifact {
                command: "relcompact",
                config: json!({"k": ok.label(), "a": oa.label()}),
                result: to_value(&report),
                provenance: json!({"horizon": horizon, "resolution": resolution}),
                csv: Some(csv),
            }
            .emit(&output)?;
        }
        Command::Bands { input, n_max, horizon, output } => {
            let a = load(&input.descriptor()?, None)?;
            let profile = band_profile(&a, n_max, horizon)?;
            let mut csv = String::from("n,d_n,capped\n");
            for (n, d) in profile.dims.iter().enumerate() {
                let capped = matches!(d, BandDim::AtLeast(_));
                csv.push_str(&format!("{n},{},{capped}\n", d.floor()));
            }
            Artifact {
                command: "bands",
                config: json!({"op": a.label()}),
                result: to_value(&profile),
                provenance: json!({"n_max": n_max, "horizon": horizon}),
                csv: Some(csv),
            }
            .emit(&output)?;
        }
        Command::Fw { a, b, k_max, n_max, l_max, horizon, output } => {
            let oa = load(&a, None)?;
            let ob = load(&b, None)?;
            let bands = k_max + n_max + l_max;
            let pa = band_profile(&oa, bands, horizon)?;
            let pb = band_profile(&ob, bands, horizon)?;
            let verdict = fw_decide(&pa, &pb, k_max, n_max, l_max)?;
            Artifact {
                command: "fw",
                config: json!({"a": oa.label(), "b": ob.label()}),
                result: to_value(&verdict),
                provenance: json!({
                    "k_max": k_max, "n_max": n_max, "l_max": l_max, "horizon": horizon,
                }),
                csv: None,
            }
            .emit(&output)?;
        }
        Command::DomEq { a, b, horizon, output } => {
            let oa = load(&a, None)?;
            let ob = load(&b, None)?;
            let report = domains_equal_codiag(&oa, &ob, horizon)?;
            Artifact {
                command: "dom-eq",
                config: json!({"a": oa.label(), "b": ob.label()}),
                result: to_value(&report),
                provenance: json!({"horizon": horizon}),
                csv: Some(format!(
                    "equal,sup_ratio,inf_ratio\n{},{},{}\n",
                    report.equal, report.sup_ratio, report.inf_ratio
                )),
            }
            .emit(&output)?;
        }
        Command::Obstruction { s, t, grid, output } => {
            let min = b_t_obstruction(s, t, grid, grid, grid)?;
            let bound = (t - s) / 3.0;
            Artifact {
                command: "obstruction",
                config: json!({"s": s, "t": t, "grid": grid}),
                result: json!({"min": min, "bound": bound, "holds": min >= bound - 1e-12}),
                provenance: json!({"k_max": grid, "l_max": grid, "m_max": grid}),
                csv: Some(format!("min,bound\n{min},{bound}\n")),
            }
            .emit(&output)?;
        }
        Command::Walk { a, b, delta, r, horizon, output } => {
            let oa = load(&a, None)?;
            let ob = load(&b, None)?;
            let walk = orbit_walk_unbounded(&oa, &ob, delta, r, horizon)?;
            verify_walk(&walk, &oa)?;
            let mut csv = String::from("step,distance\n");
            for (j, d) in walk.per_step_distance.iter().enumerate() {
                csv.push_str(&format!("{},{d}\n", j + 1));
            }
            Artifact {
                command: "walk",
                config: json!({"a": oa.label(), "b": ob.label(), "delta": delta, "r": r}),
                result: to_value(&walk),
                provenance: json!({"horizon": horizon, "verified": true}),
                csv: Some(csv),
            }
            .emit(&output)?;
        }
        Command::Walk0 { entries, probes, eps, r, output } => {
            let parsed: Result<Vec<(u64, f64)>, CliError> = entries
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|kv| {
                    let (i, v) = kv
                        .split_once(':')
                        .ok_or_else(|| CliError::Input(format!("expected idx:value in `{kv}`")))?;
                    Ok((
                        i.trim()
                            .parse()
                            .map_err(|e| CliError::Input(format!("bad index: {e}")))?,
                        v.trim()
                            .parse()
                            .map_err(|e| CliError::Input(format!("bad value: {e}")))?,
                    ))
                })
                .collect();
            let walk = orbit_walk_compact_at_zero(&parsed?, probes, eps, r)?;
            let mut csv = String::from("step,distance\n");
            for (j, d) in walk.per_step_distance.iter().enumerate() {
                csv.push_str(&format!("{},{d}\n", j + 1));
            }
            Artifact {
                command: "walk0",
                config: json!({"entries": entries, "probes": probes, "eps": eps, "r": r}),
                result: to_value(&walk),
                provenance: json!({"steps": walk.steps.len()}),
                csv: Some(csv),
            }
            .emit(&output)?;
        }
        Command::Epsnet { matrix, eps, output } => {
            let m = matrix_io::read_matrix(&matrix)?;
            let r = eps_net_diagonalize(&m, eps)?;
            let mut csv = String::from("i,original,rounded\n");
            for (i, (o, m)) in r.original.iter().zip(&r.rounded).enumerate() {
                csv.push_str(&format!("{i},{o},{m}\n"));
            }
            Artifact {
                command: "epsnet",
                config: json!({"matrix": matrix.display().to_string(), "eps": eps}),
                result: json!({
                    "summary": to_value(&r.summary()),
                    "k": matrix_io::matrix_json(&r.k),
                    "basis": matrix_io::matrix_json(&r.basis),
                }),
                provenance: json!({"hermitian_tol": diagop::epsnet::HERMITIAN_TOL}),
                csv: Some(csv),
            }
            .emit(&output)?;
        }
        Command::Reproduce { all: _, only, output } => {
            let results = if only.is_empty() {
                reproduce::run_all()
            } else {
                reproduce::run_selected(&only)
            };
            let mut csv = String::from("id,pass,name\n");
            for c in &results {
                println!(
                    "{} #{:02} {} - {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.name,
                    c.details
                );
                csv.push_str(&format!("{},{},{}\n", c.id, c.pass, c.name));
            }
            let failed: Vec<u32> = results.iter().filter(|c| !c.pass).map(|c| c.id).collect();
            // Deterministic report body; wall-clock timings live in their own block.
            let report: Vec<_> = results
                .iter()
                .map(|c| {
                    json!({"id": c.id, "name": c.name, "pass": c.pass, "details": c.details})
                })
                .collect();
            let timings: Vec<_> = results
                .iter()
                .map(|c| json!({"id": c.id, "runtime_ms": c.runtime_ms}))
                .collect();
            if output.out.is_some() {
                Artifact {
                    command: "reproduce",
                    config: json!({"only": only}),
                    result: json!({"criteria": report, "failed": failed}),
                    provenance: json!({"timings_ms": timings}),
                    csv: Some(csv),
                }
                .emit(&output)?;
            }
            if !failed.is_empty() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
