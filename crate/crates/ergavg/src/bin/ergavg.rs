//! Command-line front end: averaging demos, variation and Gowers norms of
//! serialized inputs, exponential-sum profiles, and the verification
//! harness. Exit code 0 means every pass flag of the command was true.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ergavg::gridfn::{lacunary_set, GridFunction};
use ergavg::lab::{
    self, config::ExperimentConfig, config::ExperimentKind, io as labio, ExperimentReport,
};
use ergavg::variation::{jump_count, variation_norm};
use ergavg::{averages, gowers};

#[derive(Parser)]
#[command(
    name = "ergavg",
    version,
    about = "numerical laboratory for bilinear ergodic averages sampled along (floor(sqrt n), n)"
)]
struct Cli {
    /// Experiment configuration file (TOML or JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed override; mandatory randomness root for experiments.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for report.json / points.csv / plot.svg.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bilinear average A_N (or the upper-half operator) of two grid
    /// functions given as JSON files; point masses at 0 by default.
    Avg {
        #[arg(long, default_value_t = 16)]
        cap: u64,
        /// Restrict to the upper half n > N/2.
        #[arg(long)]
        upper_half: bool,
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long)]
        g: Option<PathBuf>,
    },
    /// V^r norm (and optionally the delta-jump count) of a sampled sequence
    /// given as JSON {times, re, im}.
    Variation {
        #[arg(long, default_value_t = 2.0)]
        exponent: f64,
        #[arg(long)]
        jump_delta: Option<f64>,
        #[arg(long)]
        input: PathBuf,
    },
    /// Partial exponential sums (1/N)Σ e(zeta·floor(sqrt n) + xi·n) over a
    /// lacunary scale set, with their V^r norm.
    Expsum {
        #[arg(long, default_value_t = 0.5)]
        zeta: f64,
        #[arg(long, default_value_t = 0.25)]
        xi: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 16)]
        cap_log2: u32,
        #[arg(long, default_value_t = 3.0)]
        exponent: f64,
    },
    /// Gowers U^s norm of a grid function given as JSON.
    Gowers {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Run one experiment kind and write its report.
    Verify {
        /// One of: improving, minorArc, jumpCorollary, variationalRatio,
        /// maximalRatio, symbolComparison, sharpness, expSumVariation,
        /// shiftedSquareProbe.
        kind: String,
    },
    /// Run every experiment kind; exit 0 iff all pass.
    Sweep,
    /// Re-evaluate a stored report from its measurements.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> ergavg::Result<bool> {
    match &cli.command {
        Command::Avg {
            cap,
            upper_half,
            f,
            g,
        } => {
            let f = load_grid(f.as_deref())?;
            let g = load_grid(g.as_deref())?;
            let avg = if *upper_half {
                averages::upper_half_average(&f, &g, *cap)
            } else {
                averages::bilinear_average(&f, &g, *cap)
            };
            emit(&cli, "avg.json", &avg.to_json_string())?;
            Ok(true)
        }
        Command::Variation {
            exponent,
            jump_delta,
            input,
        } => {
            let seq = labio::sequence_from_json(&std::fs::read(input)?)?;
            let res = variation_norm(&seq, *exponent)?;
            let mut out = serde_json::json!({
                "value": res.value,
                "supTerm": res.sup_term,
                "oscTerm": res.osc_term,
                "witnessChain": res.witness_chain,
            });
            if let Some(delta) = jump_delta {
                let jumps = jump_count(&seq, *delta)?;
                out["jumpCount"] = serde_json::json!(jumps.count);
                out["jumpWitnessChain"] = serde_json::json!(jumps.witness_chain);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("plain data")
            );
            Ok(true)
        }
        Command::Expsum {
            zeta,
            xi,
            lambda,
            cap_log2,
            exponent,
        } => {
            let scales = lacunary_set(*lambda, 1, 1u64 << cap_log2)?;
            let seq = expsum_sequence(*zeta, *xi, scales.scales());
            let mut csv = String::from("x,y\n");
            for (n, v) in scales.scales().iter().zip(seq.samples()) {
                csv.push_str(&format!("{n},{}\n", v.norm()));
            }
            emit(&cli, "points.csv", &csv)?;
            let res = variation_norm(&seq, *exponent)?;
            println!(
                "V^{exponent} over {} scales (cap 2^{cap_log2}): {:.6}",
                scales.len(),
                res.value
            );
            Ok(true)
        }
        Command::Gowers { input, degree } => {
            let f = GridFunction::from_json_slice(&std::fs::read(input)?)?;
            println!("U^{degree}: {:.12}", gowers::gowers_norm(&f, *degree)?);
            Ok(true)
        }
        Command::Verify { kind } => {
            let kind = ExperimentKind::parse(kind)?;
            let config = experiment_config(&cli, kind)?;
            let report = lab::run(&config)?;
            write_report_files(cli.out.as_deref(), &report)?;
            print_report(&report);
            Ok(report.pass)
        }
        Command::Sweep => {
            let mut all_pass = true;
            for kind in ExperimentKind::ALL {
                let config = experiment_config(&cli, kind)?;
                let report = lab::run(&config)?;
                let dir = cli.out.as_deref().map(|d| d.join(kind.name()));
                write_report_files(dir.as_deref(), &report)?;
                println!(
                    "{}: {} ({:.2}s)",
                    kind.name(),
                    if report.pass { "PASS" } else { "FAIL" },
                    report.duration_secs
                );
                all_pass &= report.pass;
            }
            Ok(all_pass)
        }
        Command::Report { input } => {
            let report = ExperimentReport::from_json_str(&std::fs::read_to_string(input)?)?;
            let pass = report.reevaluate()?;
            print_report(&report);
            println!(
                "re-evaluation from stored points: {}",
                if pass { "consistent" } else { "inconsistent" }
            );
            Ok(pass)
        }
    }
}

fn expsum_sequence(zeta: f64, xi: f64, scales: &[u64]) -> ergavg::variation::IndexedSequence {
    use ergavg::gridfn::floor_sqrt;
    use num_complex::Complex64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut samples = Vec::with_capacity(scales.len());
    let mut next = 0usize;
    for n in 1..=*scales.last().expect("nonempty") {
        let phase = zeta * floor_sqrt(n) as f64 + xi * n as f64;
        let (s, c) = (2.0 * std::f64::consts::PI * phase.fract()).sin_cos();
        acc += Complex64::new(c, s);
        while next < scales.len() && scales[next] == n {
            samples.push(acc / n as f64);
            next += 1;
        }
    }
    ergavg::variation::IndexedSequence::new(scales.to_vec(), samples).expect("aligned scales")
}

fn load_grid(path: Option<&Path>) -> ergavg::Result<GridFunction> {
    match path {
        Some(p) => GridFunction::from_json_slice(&std::fs::read(p)?),
        None => Ok(GridFunction::delta(0)),
    }
}

fn experiment_config(cli: &Cli, kind: ExperimentKind) -> ergavg::Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let cfg = ExperimentConfig::from_str_any(&text)?;
            if cfg.kind != kind {
                // A sweep reuses one config's seed/parameters only for the
                // matching kind; other kinds get defaults.
                ExperimentConfig {
                    kind,
                    seed: cfg.seed,
                    parameters: BTreeMap::new(),
                }
            } else {
                cfg
            }
        }
        None => ExperimentConfig::new(kind, 0xe26a),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn emit(cli: &Cli, name: &str, content: &str) -> ergavg::Result<()> {
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), content)?;
            Ok(())
        }
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn write_report_files(dir: Option<&Path>, report: &ExperimentReport) -> ergavg::Result<()> {
    let Some(dir) = dir else {
        return Ok(());
    };
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), report.to_json_string())?;
    std::fs::write(dir.join("points.csv"), report.points_csv())?;
    let fit = report.series.first().and_then(|s| report.fits.get(&s.name));
    let svg = lab::svg::plot_loglog(
        report.config.kind.name(),
        report
            .series
            .first()
            .map(|s| s.points.as_slice())
            .unwrap_or(&[]),
        fit,
    );
    std::fs::write(dir.join("plot.svg"), svg)?;
    Ok(())
}

fn print_report(report: &ExperimentReport) {
    println!("kind: {}", report.config.kind.name());
    println!("seed: {}", report.config.seed);
    for (name, fit) in &report.fits {
        println!(
            "fit {name}: slope {:+.4}, intercept {:+.4}, residual {:.3e}",
            fit.slope, fit.intercept, fit.residual
        );
    }
    for (name, value) in &report.constants {
        println!("constant {name}: {value:.6e}");
    }
    for (name, ok) in &report.flags {
        println!("{}: {name}", if *ok { "PASS" } else { "FAIL" });
    }
    println!(
        "overall: {} ({:.2}s)",
        if report.pass { "PASS" } else { "FAIL" },
        report.duration_secs
    );
}
