use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qho_lg::bohm::{bohm_trajectories, equal_fractions, quantile_seeds, BohmOptions};
use qho_lg::currents::{chopped_current, classical_chopped_current, coherent_derivatives, qp_current_combination, smalltime_qp, smalltime_three_term};
use qho_lg::lg::{lg_report_mode, quasiprob, Mode};
use qho_lg::scan::{quadrant_scan, refine_optimum, reproduce_table1, AxisRange, ScanGrid};
use qho_lg::variants::{coherent_projector_optimize, squeeze_map, superposition_max_check, thermal_violation_curve};
use qho_lg::wigner::{chopped_field, qp_via_wigner, qp_via_wigner_gaussian, wigner_lg2};
use qho_lg::currents::sequential_prob;
use qho_lg::{
    BohmSource, ChoppedState, CoherentState, Error, GaussianState, GridSpec, LgReport, Order, Phase, ProjectorBranch, Result,
    SignChoice, SqueezeParams, Truncation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{num, sink};
use crate::parse;

#[derive(Parser, Debug)]
#[command(name = "lg", version, about = "Leggett-Garg datasets for the harmonic oscillator")]
#[command(after_help = "Options may also come from --config FILE (key=value per line); flags on the command line win.\nLG_THREADS sets the worker count.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output path; stdout when absent or `-`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Series tolerance.
    #[arg(long, value_parser = parse::positive, default_value = "1e-8")]
    pub tol: f64,
    /// Series term cap.
    #[arg(long, default_value_t = 1_000_000)]
    pub n_max: usize,
}

impl Common {
    fn trunc(&self) -> Truncation<f64> {
        Truncation::new(self.tol, self.n_max)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// LG values against the spacing Δθ.
    #[command(args_override_self = true)]
    Sweep {
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true)]
        state: (f64, f64),
        #[arg(long, value_parser = parse::order, default_value = "2")]
        order: Order,
        /// start:stop:step; Δθ = 0 is skipped.
        #[arg(long, value_parser = parse::axis, default_value = "0:3.14:0.01")]
        dtheta: AxisRange<f64>,
        #[arg(long, value_parser = parse::finite, default_value = "0", allow_hyphen_values = true)]
        theta1: f64,
        /// Fail on truncation residuals above --tol instead of reporting them.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Per-cell most violating Δθ over a positive-quadrant grid (heatmap).
    #[command(args_override_self = true)]
    Scan {
        #[arg(long, value_parser = parse::order, default_value = "2")]
        order: Order,
        #[arg(long, value_parser = parse::axis, default_value = "0:4:0.05")]
        x0: AxisRange<f64>,
        #[arg(long, value_parser = parse::axis, default_value = "0:4:0.05")]
        p0: AxisRange<f64>,
        /// Coarse Δθ samples over (0, 2π].
        #[arg(long, default_value_t = 720)]
        samples: usize,
        /// Also write the simplex-refined optimum as JSON here.
        #[arg(long)]
        optimum: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Scan and refine all three orders and compare with the reference optima.
    #[command(args_override_self = true)]
    Table1 {
        #[arg(long, value_parser = parse::axis, default_value = "0:4:0.05")]
        x0: AxisRange<f64>,
        #[arg(long, value_parser = parse::axis, default_value = "0:4:0.05")]
        p0: AxisRange<f64>,
        #[arg(long, default_value_t = 720)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Quantum and classical chopped currents through the origin, in units of ω.
    #[command(args_override_self = true)]
    Currents {
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true)]
        state: (f64, f64),
        /// θ start:stop.
        #[arg(long, value_parser = parse::span, default_value = "0:1.6")]
        range: (f64, f64),
        #[arg(long, value_parser = parse::positive, default_value = "0.01")]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Bohm trajectories for a chopped coherent state or the Moshinsky shutter.
    #[command(args_override_self = true)]
    Bohm {
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true, required_unless_present = "moshinsky")]
        state: Option<(f64, f64)>,
        /// Kept half-line of the initial chop.
        #[arg(long, value_parser = parse::sign, default_value = "+", allow_hyphen_values = true)]
        chop: SignChoice,
        /// Free shutter with momentum p instead of the oscillator.
        #[arg(long, value_parser = parse::finite, allow_hyphen_values = true, conflicts_with = "state")]
        moshinsky: Option<f64>,
        /// Number of equal-probability quantile seeds (chopped source).
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        /// Explicit seed positions x1,x2,...
        #[arg(long, value_parser = parse::finite, value_delimiter = ',', allow_hyphen_values = true)]
        seed_list: Option<Vec<f64>>,
        #[arg(long, value_parser = parse::axis, default_value = "0.01:1.6:0.01")]
        times: AxisRange<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Chopped Wigner function on a grid, optionally with the q integral.
    #[command(args_override_self = true)]
    Wigner {
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true)]
        state: (f64, f64),
        #[arg(long, value_parser = parse::sign, allow_hyphen_values = true)]
        s1: SignChoice,
        #[arg(long, value_parser = parse::sign, allow_hyphen_values = true)]
        s2: Option<SignChoice>,
        #[arg(long, value_parser = parse::finite, default_value = "0.5703", allow_hyphen_values = true)]
        theta2: f64,
        #[arg(long, default_value_t = 801)]
        points: usize,
        #[arg(long, value_parser = parse::positive, default_value = "6")]
        half_width: f64,
        /// JSON summary of the integral.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Wigner-function LG2 quantity against θ2 with its sequential part.
    #[command(name = "wigner-lg2", args_override_self = true)]
    WignerLg2 {
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true, default_value = "0.55,-1.925")]
        state: (f64, f64),
        #[arg(long, value_parser = parse::sign, allow_hyphen_values = true, default_value = "-")]
        s1: SignChoice,
        #[arg(long, value_parser = parse::sign, allow_hyphen_values = true, default_value = "+")]
        s2: SignChoice,
        #[arg(long, value_parser = parse::axis, default_value = "0.01:1.6:0.01")]
        theta2: AxisRange<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Optimize a coherent-projector quasi-probability branch.
    #[command(name = "coh-proj", args_override_self = true)]
    CohProj {
        /// ++, +-, -+ or --.
        #[arg(long, allow_hyphen_values = true, default_value = "+-")]
        branch: String,
        /// Also build the superposition that reaches −1/8.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Thermal violation ratio against temperature.
    #[command(args_override_self = true)]
    Thermal {
        #[arg(long, value_parser = parse::order, default_value = "2")]
        order: Order,
        #[arg(long, value_parser = parse::finite, default_value = "2")]
        t_max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Small-phase series for q(−,+) against the full value.
    #[command(args_override_self = true)]
    Smalltime {
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true, default_value = "0.55,-1.925")]
        state: (f64, f64),
        #[arg(long, value_parser = parse::axis, default_value = "0.01:0.2:0.01")]
        theta: AxisRange<f64>,
        /// Series order N.
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Squeezed-state q against the equivalent coherent state.
    #[command(name = "squeeze-check", args_override_self = true)]
    SqueezeCheck {
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        alpha: Option<Complex64>,
        #[arg(long, value_parser = parse::finite, default_value = "0.5")]
        r: f64,
        #[arg(long, value_parser = parse::finite, default_value = "0", allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, value_parser = parse::finite, default_value = "0", allow_hyphen_values = true)]
        theta1: f64,
        #[arg(long, value_parser = parse::finite, default_value = "1", allow_hyphen_values = true)]
        theta2: f64,
        /// Draw this many random points instead of the given one.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn state(p: (f64, f64)) -> Result<CoherentState<f64>> {
    CoherentState::new(p.0, p.1)
}

#[derive(Serialize)]
struct ReportRecord {
    dtheta: f64,
    entries: BTreeMap<String, f64>,
    extremal: (String, f64),
    residual: f64,
}

impl ReportRecord {
    fn new(dtheta: f64, r: &LgReport<f64>) -> Self {
        Self {
            dtheta,
            entries: r.entries.iter().cloned().collect(),
            extremal: r.extremal.clone(),
            residual: r.residual,
        }
    }
}

/// Fails early, before any long computation, when the output directory is missing.
fn check_output(path: &Option<PathBuf>) -> Result<()> {
    let Some(p) = path else { return Ok(()) };
    if p.as_os_str() == "-" {
        return Ok(());
    }
    let parent = p.parent().filter(|d| !d.as_os_str().is_empty());
    if let Some(d) = parent {
        if !d.is_dir() {
            return Err(Error::Io {
                path: p.display().to_string(),
                message: "parent directory does not exist".into(),
            });
        }
    }
    Ok(())
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Sweep { common, .. }
            | Command::Scan { common, .. }
            | Command::Table1 { common, .. }
            | Command::Currents { common, .. }
            | Command::Bohm { common, .. }
            | Command::Wigner { common, .. }
            | Command::WignerLg2 { common, .. }
            | Command::CohProj { common, .. }
            | Command::Thermal { common, .. }
            | Command::Smalltime { common, .. }
            | Command::SqueezeCheck { common, .. } => common,
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    check_output(&cli.command.common().output)?;
    match &cli.command {
        Command::Scan { optimum, .. } => check_output(optimum)?,
        Command::Wigner { summary, .. } => check_output(summary)?,
        _ => {}
    }
    match cli.command {
        Command::Sweep {
            state: st,
            order,
            dtheta,
            theta1,
            strict,
            common,
        } => {
            let s = state(st)?;
            let tr = common.trunc();
            let mode = if strict { Mode::Strict } else { Mode::Relaxed };
            let mut records = Vec::new();
            for d in parse::values(&dtheta).into_iter().filter(|&d| d > 0.0) {
                let r = lg_report_mode(s, order, d, Phase(theta1), &tr, mode)?;
                records.push(ReportRecord::new(d, &r));
            }
            let loose = records.iter().filter(|r| r.residual > common.tol).count();
            if loose > 0 {
                eprintln!("warning: {loose} rows have residual above tol {:e}; see the residual column", common.tol);
            }
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => out.json(&records),
                Format::Csv => {
                    let labels: Vec<String> = records
                        .first()
                        .map(|r| r.entries.keys().cloned().collect())
                        .unwrap_or_default();
                    let mut header = vec!["dtheta"];
                    header.extend(labels.iter().map(String::as_str));
                    header.push("residual");
                    let rows = records.iter().map(|r| {
                        let mut row = vec![num(r.dtheta)];
                        row.extend(labels.iter().map(|l| num(r.entries[l])));
                        row.push(num(r.residual));
                        row
                    });
                    out.csv(&header, rows)
                }
            }
        }
        Command::Scan {
            order,
            x0,
            p0,
            samples,
            optimum,
            common,
        } => {
            let grid = scan_grid(x0, p0, samples, &common)?;
            let scan = quadrant_scan(&grid, order)?;
            let best = scan.optimum();
            eprintln!(
                "optimum value={} x0={} p0={} dtheta={} label={}",
                best.value, best.x0, best.p0, best.dtheta_star, best.label
            );
            if let Some(path) = optimum {
                let refined = refine_optimum(order, best, &common.trunc())?;
                #[derive(Serialize)]
                struct Record<'a> {
                    cell: &'a qho_lg::scan::CellResult<f64>,
                    refined: qho_lg::scan::Optimum<f64>,
                }
                sink(&Some(path))?.json(&Record { cell: best, refined })?;
            }
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => out.json(&scan),
                Format::Csv => out.with(|w| scan.write_heatmap_csv(w)),
            }
        }
        Command::Table1 { x0, p0, samples, common } => {
            let grid = scan_grid(x0, p0, samples, &common)?;
            let report = reproduce_table1(&grid)?;
            for row in &report.rows {
                let o = &row.refined;
                eprintln!(
                    "LG{} value={:.6} percent={:.1} x0={:.4} p0={:.4} dtheta={:.5} folded={:.5} value_ok={} location_ok={}",
                    o.order.as_int(),
                    o.value,
                    o.luders_percent,
                    o.x0,
                    o.p0,
                    o.dtheta,
                    o.dtheta_folded,
                    row.value_ok,
                    row.location_ok
                );
            }
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => out.json(&report),
                Format::Csv => {
                    let rows = report.rows.iter().map(|r| {
                        let o = &r.refined;
                        vec![
                            o.order.as_int().to_string(),
                            num(o.value),
                            num(o.luders_percent),
                            num(o.x0),
                            num(o.p0),
                            num(o.dtheta),
                            num(o.dtheta_folded),
                            o.label.clone(),
                            r.value_ok.to_string(),
                            r.location_ok.to_string(),
                        ]
                    });
                    out.csv(
                        &["order", "value", "percent", "x0", "p0", "dtheta", "dtheta_folded", "label", "value_ok", "location_ok"],
                        rows,
                    )
                }
            }
        }
        Command::Currents {
            state: st,
            range,
            step,
            common,
        } => {
            let s = state(st)?;
            let plus = ChoppedState::new(s, SignChoice::Plus);
            let minus = ChoppedState::new(s, SignChoice::Minus);
            let n = ((range.1 - range.0) / step + 1e-9).floor() as usize;
            let mut rows = Vec::new();
            for k in 0..=n {
                let th = Phase(range.0 + k as f64 * step);
                let q = (|| -> Result<[f64; 5]> {
                    Ok([
                        chopped_current(plus, 0.0, th)?.value,
                        chopped_current(minus, 0.0, th)?.value,
                        classical_chopped_current(plus, th).value,
                        classical_chopped_current(minus, th).value,
                        qp_current_combination(s, th)?,
                    ])
                })();
                match q {
                    Ok(v) => rows.push((th.0, v)),
                    Err(Error::Caustic { theta }) => eprintln!("skipped caustic θ = {theta}"),
                    Err(e) => return Err(e),
                }
            }
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Row {
                        theta: f64,
                        j_plus: f64,
                        j_minus: f64,
                        classical_plus: f64,
                        classical_minus: f64,
                        combination: f64,
                    }
                    let rows: Vec<Row> = rows
                        .iter()
                        .map(|(t, v)| Row {
                            theta: *t,
                            j_plus: v[0],
                            j_minus: v[1],
                            classical_plus: v[2],
                            classical_minus: v[3],
                            combination: v[4],
                        })
                        .collect();
                    out.json(&rows)
                }
                Format::Csv => out.csv(
                    &["theta", "j_plus", "j_minus", "classical_plus", "classical_minus", "combination"],
                    rows.iter().map(|(t, v)| std::iter::once(num(*t)).chain(v.iter().map(|x| num(*x))).collect()),
                ),
            }
        }
        Command::Bohm {
            state: st,
            chop,
            moshinsky,
            seeds,
            seed_list,
            times,
            common,
        } => {
            let source = match (moshinsky, st) {
                (Some(p), _) => BohmSource::Moshinsky { p },
                (None, Some(st)) => BohmSource::Chopped(ChoppedState::new(state(st)?, chop)),
                (None, None) => return Err(Error::InvalidInput("bohm needs --state or --moshinsky".into())),
            };
            let seeds = match (seed_list, source) {
                (Some(list), _) => list,
                (None, BohmSource::Chopped(cs)) => {
                    if seeds == 0 {
                        return Err(Error::InvalidInput("--seeds must be positive".into()));
                    }
                    quantile_seeds(cs, &equal_fractions::<f64>(seeds))?
                }
                (None, BohmSource::Moshinsky { .. }) => {
                    return Err(Error::InvalidInput("the Moshinsky source needs --seed-list".into()))
                }
            };
            let times = parse::values(&times);
            let bundle = bohm_trajectories(source, &seeds, &times, &BohmOptions::default())?;
            for (k, h) in bundle.halted.iter().enumerate() {
                if let Some((t, why)) = h {
                    eprintln!("seed {k} halted at θ = {t}: {why}");
                }
            }
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => out.json(&bundle),
                Format::Csv => {
                    let mut rows = Vec::new();
                    for (k, path) in bundle.paths.iter().enumerate() {
                        for (i, x) in path.iter().enumerate() {
                            rows.push(vec![
                                k.to_string(),
                                num(bundle.times[i]),
                                num(*x),
                                num(bundle.classical_paths[k][i]),
                            ]);
                        }
                    }
                    out.csv(&["seed", "theta", "x", "x_classical"], rows)
                }
            }
        }
        Command::Wigner {
            state: st,
            s1,
            s2,
            theta2,
            points,
            half_width,
            summary,
            common,
        } => {
            let s = state(st)?;
            let grid = GridSpec {
                half_width,
                points,
                ..GridSpec::default()
            };
            let field = match s2 {
                Some(s2) => {
                    let (q, field) = qp_via_wigner(s, s1, s2, Phase(theta2), &grid)?;
                    eprintln!("q = {} (Richardson residual {:e})", q.value, q.residual);
                    if let Some(path) = summary {
                        #[derive(Serialize)]
                        struct Summary {
                            state: (f64, f64),
                            s1: SignChoice,
                            s2: SignChoice,
                            theta2: f64,
                            q: f64,
                            residual: f64,
                            field_total: f64,
                        }
                        sink(&Some(path))?.json(&Summary {
                            state: st,
                            s1,
                            s2,
                            theta2,
                            q: q.value,
                            residual: q.residual,
                            field_total: field.total,
                        })?;
                    }
                    field
                }
                None => chopped_field(s, s1, &grid)?,
            };
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => out.json(&field),
                Format::Csv => out.with(|w| field.write_csv(w)),
            }
        }
        Command::WignerLg2 {
            state: st,
            s1,
            s2,
            theta2,
            common,
        } => {
            let s = state(st)?;
            let mut rows = Vec::new();
            for t in parse::values(&theta2) {
                let qw = wigner_lg2(s, s1, s2, Phase(t))?;
                let p12 = sequential_prob(s, s1, s2, Phase(t))?;
                rows.push([t, qw, p12, 0.5 * (qw - p12)]);
            }
            let header = ["theta2", "q_w", "p12", "interference"];
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => out.json(&rows_as_maps(&header, &rows)),
                Format::Csv => out.csv(&header, rows.iter().map(|r| r.iter().map(|v| num(*v)).collect())),
            }
        }
        Command::CohProj { branch, check, common } => {
            let b = ProjectorBranch::parse(&branch)?;
            let (g, q) = coherent_projector_optimize::<f64>(b)?;
            let sup = if check { Some(superposition_max_check::<f64>(b)?) } else { None };
            #[derive(Serialize)]
            struct Record {
                branch: &'static str,
                gamma1: Complex64,
                gamma2: Complex64,
                q: f64,
                superposition: Option<qho_lg::variants::SuperpositionCheck<f64>>,
            }
            let rec = Record {
                branch: b.label(),
                gamma1: g.g1,
                gamma2: g.g2,
                q,
                superposition: sup,
            };
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => out.json(&rec),
                Format::Csv => out.csv(
                    &["branch", "g1_re", "g1_im", "g2_re", "g2_im", "q"],
                    [vec![
                        rec.branch.to_string(),
                        num(g.g1.re),
                        num(g.g1.im),
                        num(g.g2.re),
                        num(g.g2.im),
                        num(q),
                    ]],
                ),
            }
        }
        Command::Thermal {
            order,
            t_max,
            points,
            common,
        } => {
            if points < 2 || !(t_max > 0.0) {
                return Err(Error::InvalidInput("thermal needs --points ≥ 2 and --t-max > 0".into()));
            }
            let temps: Vec<f64> = (0..points).map(|k| t_max * k as f64 / (points - 1) as f64).collect();
            let curve = thermal_violation_curve(order, &temps, &common.trunc())?;
            let rows: Vec<[f64; 2]> = curve.iter().map(|&(t, r)| [t, r]).collect();
            let header = ["temperature", "ratio"];
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => out.json(&rows_as_maps(&header, &rows)),
                Format::Csv => out.csv(&header, rows.iter().map(|r| r.iter().map(|v| num(*v)).collect())),
            }
        }
        Command::Smalltime {
            state: st,
            theta,
            order,
            common,
        } => {
            let s = state(st)?;
            let derivs = coherent_derivatives(s, order.max(2));
            let tr = common.trunc();
            let mut rows = Vec::new();
            for t in parse::values(&theta) {
                if !(t > 0.0) {
                    continue;
                }
                // the LG2 entry "-+" is 4 q(−,+); relaxed so that tiny θ still reports
                let r = lg_report_mode(s, Order::Two, t, Phase(0.0), &tr, Mode::Relaxed)?;
                let exact = 0.25 * r.get("-+").unwrap_or(f64::NAN);
                let series = smalltime_qp(&derivs, Phase(t), order)?;
                let three = smalltime_three_term(&derivs, Phase(t))?;
                rows.push([t, exact, series, three, ((series - exact) / exact).abs(), 0.25 * r.residual]);
            }
            let header = ["theta", "exact", "series", "three_term", "rel_err", "residual"];
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => out.json(&rows_as_maps(&header, &rows)),
                Format::Csv => out.csv(&header, rows.iter().map(|r| r.iter().map(|v| num(*v)).collect())),
            }
        }
        Command::SqueezeCheck {
            alpha,
            r,
            phi,
            theta1,
            theta2,
            random,
            seed,
            common,
        } => {
            let mut points = Vec::new();
            match random {
                Some(n) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    for _ in 0..n {
                        let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        let z = (rng.gen_range(0.1..0.8), rng.gen_range(-3.0..3.0));
                        let t1 = rng.gen_range(0.0..0.5);
                        let t2 = t1 + rng.gen_range(0.4..2.0);
                        points.push((a, z.0, z.1, t1, t2));
                    }
                }
                None => {
                    let a = alpha.ok_or_else(|| Error::InvalidInput("squeeze-check needs --alpha or --random".into()))?;
                    if !(theta2 > theta1) {
                        return Err(Error::InvalidInput("need theta2 > theta1".into()));
                    }
                    points.push((a, r, phi, theta1, theta2));
                }
            }
            let tr = common.trunc();
            let mut records = Vec::new();
            for (a, r, phi, t1, t2) in points {
                records.push(squeeze_record(a, SqueezeParams::new(r, phi)?, t1, t2, &tr)?);
            }
            let out = sink(&common.output)?;
            match common.format {
                Format::Json => out.json(&records),
                Format::Csv => {
                    let rows = records.iter().flat_map(|rec| {
                        rec.pairs.iter().map(move |p| {
                            vec![
                                num(rec.alpha.re),
                                num(rec.alpha.im),
                                num(rec.r),
                                num(rec.phi),
                                num(rec.theta1),
                                num(rec.theta2),
                                p.label.clone(),
                                num(p.q_squeezed),
                                num(p.q_mapped),
                            ]
                        })
                    });
                    out.csv(
                        &["alpha_re", "alpha_im", "r", "phi", "theta1", "theta2", "label", "q_squeezed", "q_mapped"],
                        rows,
                    )
                }
            }
        }
    }
}

fn scan_grid(x0: AxisRange<f64>, p0: AxisRange<f64>, samples: usize, common: &Common) -> Result<ScanGrid<f64>> {
    let mut grid = ScanGrid::new(x0, p0)?;
    grid.tau.samples = samples;
    grid.tau.final_trunc = common.trunc();
    grid.validate()?;
    Ok(grid)
}

fn rows_as_maps<const N: usize>(header: &[&str; N], rows: &[[f64; N]]) -> Vec<BTreeMap<String, f64>> {
    rows.iter()
        .map(|r| header.iter().map(|h| h.to_string()).zip(r.iter().copied()).collect())
        .collect()
}

#[derive(Serialize)]
struct PairCheck {
    label: String,
    q_squeezed: f64,
    q_mapped: f64,
}

#[derive(Serialize)]
struct SqueezeRecord {
    alpha: Complex64,
    r: f64,
    phi: f64,
    theta1: f64,
    theta2: f64,
    beta: Complex64,
    theta1_mapped: f64,
    theta2_mapped: f64,
    pairs: Vec<PairCheck>,
    max_diff: f64,
}

/// q of the squeezed state by phase-space integration against q of the mapped coherent state.
fn squeeze_record(a: Complex64, z: SqueezeParams<f64>, t1: f64, t2: f64, tr: &Truncation<f64>) -> Result<SqueezeRecord> {
    let m = squeeze_map(a, z, Phase(t1), Phase(t2));
    let coherent = CoherentState::from_alpha(m.beta);
    let g = GaussianState::squeezed(a, z.r, z.phi).evolve(Phase(t1));
    let mut pairs = Vec::new();
    let mut max_diff: f64 = 0.0;
    for s1 in SignChoice::BOTH {
        for s2 in SignChoice::BOTH {
            let q = quasiprob(coherent, s1, s2, m.theta1, m.theta2, tr)?.value;
            let (w, _) = qp_via_wigner_gaussian(&g, s1, s2, Phase(t2 - t1), &GridSpec::default())?;
            max_diff = max_diff.max((q - w.value).abs());
            pairs.push(PairCheck {
                label: format!("{}{}", s1.symbol(), s2.symbol()),
                q_squeezed: w.value,
                q_mapped: q,
            });
        }
    }
    Ok(SqueezeRecord {
        alpha: a,
        r: z.r,
        phi: z.phi,
        theta1: t1,
        theta2: t2,
        beta: m.beta,
        theta1_mapped: m.theta1.0,
        theta2_mapped: m.theta2.0,
        pairs,
        max_diff,
    })
}
