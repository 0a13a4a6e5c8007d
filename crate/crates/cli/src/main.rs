//! `ldpmm`: privacy audits, Monte Carlo rate experiments, modulus curves and
//! the property suite.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use ldp_minimax::channels::{audit_privacy, BinaryChannel, DiscreteChannel, PrivacyLevel};
use ldp_minimax::harness::{
    fit_rate, load_cells, load_config, load_report, meta_path, persist, run_experiment,
    run_experiment_with_threads, CellFlag, RiskReport,
};
use ldp_minimax::moduli::{
    analytic_modulus, brute_force_modulus, FiniteFamily, Metric, ModulusCurve, ProblemTag,
};
use ldp_minimax::numeric::linspace;
use ldp_minimax::representers::{Domain, Representer};
use ldp_minimax::suite::run_suite;

#[derive(Parser)]
#[command(name = "ldpmm", version, about = "Locally private estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit a channel's likelihood ratios against a privacy level.
    Audit {
        #[arg(long)]
        alpha: f64,
        /// `binary:values=v1,v2,..[;alpha=a]`, `rr:k=K[;alpha=a]`,
        /// `identity:k=K`, or a path to a JSON channel.
        #[arg(long)]
        channel: String,
    },
    /// Run a Monte Carlo experiment and write its results.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fit log-log slopes to a results file and compare with theory.
    Rates {
        #[arg(long)]
        results: PathBuf,
    },
    /// Print analytic modulus curves as CSV.
    Moduli {
        /// e.g. `uniform_endpoint:upper=1` or `moment_heavy:kappa=2,bound=2`.
        #[arg(long)]
        problem: String,
        /// `start:end:steps`.
        #[arg(long)]
        eps_grid: String,
        /// Finite family (JSON array of {atoms, weights, theta}) whose
        /// brute-force moduli are added as extra columns.
        #[arg(long)]
        brute_force: Option<PathBuf>,
    },
    /// Run the property and inequality suite.
    Check {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Audit { alpha, channel } => audit(alpha, &channel),
        Command::Simulate { config, threads } => simulate(&config, threads).map(|_| true),
        Command::Rates { results } => rates(&results).map(|_| true),
        Command::Moduli {
            problem,
            eps_grid,
            brute_force,
        } => moduli(&problem, &eps_grid, brute_force.as_deref()).map(|_| true),
        Command::Check { seed } => check(seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Splits `name:key=v;key=v` into the name and its parameters.
fn descriptor(s: &str) -> Result<(&str, Vec<(&str, &str)>)> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let params = rest
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| anyhow!("`{p}` is not key=value"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name.trim(), params))
}

fn param<'a>(params: &[(&str, &'a str)], key: &str) -> Option<&'a str> {
    params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

fn number(params: &[(&str, &str)], key: &str) -> Result<Option<f64>> {
    param(params, key)
        .map(|v| v.parse::<f64>().with_context(|| format!("`{key}={v}` is not a number")))
        .transpose()
}

fn parse_channel(desc: &str, alpha: f64) -> Result<DiscreteChannel> {
    if Path::new(desc).is_file() {
        let text = std::fs::read_to_string(desc)?;
        return serde_json::from_str(&text).with_context(|| format!("reading channel {desc}"));
    }
    let (name, params) = descriptor(desc)?;
    let level = PrivacyLevel::new(number(&params, "alpha")?.unwrap_or(alpha))?;
    let k = || -> Result<usize> {
        let v = param(&params, "k").ok_or_else(|| anyhow!("missing `k`"))?;
        v.parse().with_context(|| format!("`k={v}` is not a count"))
    };
    Ok(match name {
        "binary" => {
            let raw = param(&params, "values").ok_or_else(|| anyhow!("missing `values`"))?;
            let values = raw
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .with_context(|| format!("bad value list `{raw}`"))?;
            let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let sup = number(&params, "sup")?.unwrap_or(sup);
            let rep = Representer::scalar(|x| x, sup, Domain::real_line())?;
            BinaryChannel::new(rep, level)?.on_values(&values)?
        }
        "rr" => DiscreteChannel::randomized_response(k()?, level)?,
        "identity" => DiscreteChannel::identity(k()?)?,
        other => bail!("unknown channel `{other}`"),
    })
}

fn audit(alpha: f64, desc: &str) -> Result<bool> {
    let level = PrivacyLevel::new(alpha)?;
    let channel = parse_channel(desc, alpha)?;
    let a = audit_privacy(&channel, level)?;
    println!("max_log_ratio {}", a.max_log_ratio);
    println!("alpha {}", a.alpha);
    println!("{}", if a.passed { "PASS" } else { "FAIL" });
    Ok(a.passed)
}

fn default_output(config: &Path) -> PathBuf {
    config.with_extension("results.jsonl")
}

fn simulate(path: &Path, threads: Option<usize>) -> Result<()> {
    let config = load_config(path).with_context(|| format!("loading {}", path.display()))?;
    let report = match threads {
        Some(t) => run_experiment_with_threads(&config, t)?,
        None => run_experiment(&config)?,
    };
    let out = config.output.clone().unwrap_or_else(|| default_output(path));
    persist(&report, &out)?;
    println!("alpha,n,risk,se,flag");
    for c in &report.cells {
        println!("{},{},{:.6e},{:.3e},{}", c.alpha, c.n, c.risk, c.se, flag_name(c.flag));
    }
    print_fits(&report);
    println!("wrote {}", out.display());
    Ok(())
}

fn flag_name(f: CellFlag) -> &'static str {
    match f {
        CellFlag::Ok => "ok",
        CellFlag::Clamped => "clamped",
    }
}

fn print_fits(report: &RiskReport) {
    for fit in &report.fits {
        println!(
            "alpha {}: slope {:.4} +- {:.4} (theory {:.4}, {} cells)",
            fit.alpha, fit.slope, fit.slope_se, report.theory_slope, fit.cells
        );
    }
}

fn rates(path: &Path) -> Result<()> {
    if meta_path(path).is_file() {
        let report = load_report(path)?;
        print_fits(&report);
        return Ok(());
    }
    // bare JSON-Lines without metadata: fit what is there
    let cells = load_cells(path)?;
    let mut alphas: Vec<f64> = cells.iter().map(|c| c.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    for a in alphas {
        let mine: Vec<_> = cells.iter().filter(|c| c.alpha == a).cloned().collect();
        match fit_rate(&mine) {
            Ok(fit) => println!("alpha {a}: slope {:.4} +- {:.4} ({} cells)", fit.slope, fit.slope_se, fit.cells),
            Err(e) => println!("alpha {a}: no fit ({e})"),
        }
    }
    Ok(())
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        bail!("eps grid `{s}` is not start:end:steps");
    };
    let (a, b): (f64, f64) = (a.parse()?, b.parse()?);
    let n: usize = n.parse()?;
    if !(a >= 0.0 && b >= a && n >= 1) {
        bail!("eps grid `{s}` needs 0 <= start <= end and steps >= 1");
    }
    Ok(if n == 1 { vec![a] } else { linspace(a, b, n) })
}

fn moduli(problem: &str, grid: &str, family: Option<&Path>) -> Result<()> {
    let tag: ProblemTag = problem.parse()?;
    let tv = ModulusCurve::new(tag.clone(), Metric::Tv)?;
    let h = ModulusCurve::new(tag, Metric::Hellinger)?;
    let eps = parse_grid(grid)?;
    let family: Option<FiniteFamily> = family
        .map(|p| -> Result<FiniteFamily> {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text).with_context(|| format!("reading family {}", p.display()))
        })
        .transpose()?;
    let mut header = String::from("eps,omega_tv,omega_h");
    if family.is_some() {
        header.push_str(",brute_tv,brute_h");
    }
    println!("{header}");
    for e in eps {
        let mut line = format!("{e},{},{}", analytic_modulus(&tv, e)?, analytic_modulus(&h, e)?);
        if let Some(f) = &family {
            let show = |m: ldp_minimax::moduli::Modulus| m.value().map_or(String::new(), |v| v.to_string());
            line.push_str(&format!(
                ",{},{}",
                show(brute_force_modulus(f, e, Metric::Tv)),
                show(brute_force_modulus(f, e, Metric::Hellinger))
            ));
        }
        println!("{line}");
    }
    Ok(())
}

fn check(seed: u64) -> Result<bool> {
    let report = run_suite(seed)?;
    for c in &report.checks {
        let status = if c.all_passed() { "PASS" } else { "FAIL" };
        println!("{status} {:<22} {}/{}", c.name, c.passed, c.trials);
    }
    println!("total {}/{}", report.total_passed(), report.total_trials());
    Ok(report.all_passed())
}
