//! The `rtc` command line.

use std::io::{Read, Write};
use std::time::Duration;

use clap::{Parser, ValueEnum};

use crate::certificate::{check_certificate_detailed, verdict, Certificate};
use crate::dp::{standard_dependency_pairs, weak_dependency_pairs, weak_innermost_dependency_pairs};
use crate::graph::{congruence_graph, estimate_graph, maximal_source_paths, to_dot};
use crate::pipeline::{analyze, pair_problem, Analysis, AnalysisConfig, SearchParams, StrategyKind};
use crate::replacement::{innermost_usable_map, usable_map};
use crate::rewrite::{fit_bound, runtime_complexity_samples, StepMode, DEFAULT_FUEL};
use crate::trs::{parse_trs, Strategy, Trs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Certificate,
    Dot,
    JsonCertificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dump {
    Widp,
    Wdp,
    Dp,
    Maps,
    Usable,
    Graph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Innermost,
}

#[derive(Parser, Debug)]
#[command(name = "rtc", version, about = "Polynomial runtime complexity bounds for term rewrite systems")]
pub struct Cli {
    /// Input file in TPDB format, or `-` for standard input.
    pub input: String,

    /// Rewriting mode; defaults to the STRATEGY section of the input, else full.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,

    /// Comma separated subset of direct, wdp, wdg.
    #[arg(long, value_delimiter = ',', default_value = "direct,wdp,wdg")]
    pub strategies: Vec<StrategyKind>,

    /// Largest matrix dimension tried.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=4))]
    pub dim: u64,

    /// Upper bound for matrix entries and constants.
    #[arg(long = "coeff-bound", default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=15))]
    pub coeff_bound: u64,

    /// Reject interpretations whose degree exceeds this value.
    #[arg(long = "degree-cap")]
    pub degree_cap: Option<usize>,

    /// Seconds allowed for a single interpretation search.
    #[arg(long = "search-budget")]
    pub search_budget: Option<f64>,

    /// Overall time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,

    #[arg(long, value_enum, default_value = "plain")]
    pub format: Format,

    /// Print a structural listing after the verdict.
    #[arg(long, value_enum)]
    pub dump: Option<Dump>,

    /// Append an rc(n) table for n = 1..=N computed by exhaustive rewriting.
    #[arg(long, value_name = "N")]
    pub oracle: Option<usize>,

    /// Step limit for the oracle.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    pub fuel: u64,

    /// Check a certificate (JSON, or a certificate-format output) instead of analysing.
    #[arg(long, value_name = "CERT")]
    pub check: Option<String>,
}

/// Runs the command line and returns the exit status: 0 for YES, 1 for MAYBE, 2 for errors.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(&cli, stdin, out) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}

fn read_input(cli: &Cli, stdin: &mut dyn Read) -> Result<Trs, String> {
    let text = if cli.input == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(|e| e.to_string())?;
        s
    } else {
        std::fs::read_to_string(&cli.input).map_err(|e| format!("cannot read {}: {e}", cli.input))?
    };
    parse_trs(&text).map_err(|e| e.to_string())
}

/// Extracts the JSON object from a certificate file that may start with a verdict and text.
pub fn certificate_json(text: &str) -> Option<&str> {
    let start = text.lines().find(|l| l.starts_with('{')).map(|l| l.as_ptr() as usize - text.as_ptr() as usize)?;
    Some(&text[start..])
}

fn execute(cli: &Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32, String> {
    if !(cli.timeout > 0.0) {
        return Err("timeout must be positive".into());
    }
    if cli.strategies.is_empty() {
        return Err("at least one strategy is required".into());
    }
    let trs = read_input(cli, stdin)?;
    let mode = match cli.mode {
        Some(ModeArg::Full) => Strategy::Full,
        Some(ModeArg::Innermost) => Strategy::Innermost,
        None => trs.strategy(),
    };
    let io = |e: std::io::Error| e.to_string();

    if let Some(path) = &cli.check {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        let json = certificate_json(&text).ok_or("no JSON certificate found")?;
        let cert = Certificate::from_json(json).map_err(|e| e.to_string())?;
        return Ok(match check_certificate_detailed(&trs, &cert) {
            Ok(()) => {
                writeln!(out, "{}", verdict(cert.degree)).map_err(io)?;
                writeln!(out, "certificate accepted").map_err(io)?;
                0
            }
            Err(reason) => {
                writeln!(out, "MAYBE").map_err(io)?;
                writeln!(out, "certificate rejected: {reason}").map_err(io)?;
                1
            }
        });
    }

    let config = AnalysisConfig {
        strategies: cli.strategies.clone(),
        params: SearchParams {
            max_dim: cli.dim as usize,
            bound: cli.coeff_bound,
            degree_cap: cli.degree_cap,
            search_time: cli.search_budget.map(Duration::from_secs_f64),
        },
        mode: Some(mode),
        timeout: Duration::from_secs_f64(cli.timeout),
    };
    let analysis = analyze(&trs, &config);
    writeln!(out, "{}", analysis.verdict()).map_err(io)?;
    write_body(cli, &trs, mode, &analysis, out).map_err(io)?;
    if let Some(what) = cli.dump {
        write!(out, "{}", dump(&trs, mode, what)).map_err(io)?;
    }
    if let Some(n) = cli.oracle {
        write!(out, "{}", oracle_table(&trs, mode, n, cli.fuel, &analysis)).map_err(io)?;
    }
    Ok(if analysis.certificate.is_some() { 0 } else { 1 })
}

fn write_body(cli: &Cli, trs: &Trs, mode: Strategy, analysis: &Analysis, out: &mut dyn Write) -> std::io::Result<()> {
    if analysis.timed_out && analysis.certificate.is_none() {
        writeln!(out, "note: analysis timed out")?;
    }
    match cli.format {
        Format::Plain => {
            if let Some(c) = &analysis.certificate {
                writeln!(out, "method: {}", c.method)?;
            }
        }
        Format::Certificate => {
            for n in &analysis.notes {
                writeln!(out, "note: {n}")?;
            }
            if let Some(c) = &analysis.certificate {
                write!(out, "{}", c.render(trs))?;
                writeln!(out, "{}", c.to_json())?;
            }
        }
        Format::JsonCertificate => {
            if let Some(c) = &analysis.certificate {
                writeln!(out, "{}", c.to_json())?;
            }
        }
        Format::Dot => {
            let p = pair_problem(trs, mode);
            write!(out, "{}", to_dot(&p, &estimate_graph(&p)))?;
        }
    }
    Ok(())
}

pub fn dump(trs: &Trs, mode: Strategy, what: Dump) -> String {
    match what {
        Dump::Widp => weak_innermost_dependency_pairs(trs).render(),
        Dump::Wdp => weak_dependency_pairs(trs).render(),
        Dump::Dp => standard_dependency_pairs(trs).render(),
        Dump::Maps => {
            let sig = trs.signature();
            format!(
                "innermost usable replacement map:\n{}usable replacement map:\n{}",
                innermost_usable_map(trs).render(sig),
                usable_map(trs).render(sig)
            )
        }
        Dump::Usable => {
            let p = pair_problem(trs, mode);
            let mut s = format!("usable rules of {}:\n", p.flavor());
            for i in p.usable_rules() {
                s.push_str(&format!("{}: {}\n", i + 1, trs.rules()[i]));
            }
            s
        }
        Dump::Graph => {
            let p = pair_problem(trs, mode);
            let g = estimate_graph(&p);
            let cg = congruence_graph(&g);
            let show = |c: usize| {
                let v: Vec<String> = cg.classes[c].iter().map(|&i| p.display_index(i).to_string()).collect();
                format!("{{{}}}", v.join(","))
            };
            let mut s = p.render();
            s.push_str("edges:\n");
            for &(a, b) in &g.edges {
                s.push_str(&format!("  {} -> {}\n", p.display_index(a), p.display_index(b)));
            }
            s.push_str("classes:");
            for c in 0..cg.classes.len() {
                s.push_str(&format!(" {}", show(c)));
            }
            s.push_str("\nsources:");
            for &c in &cg.sources {
                s.push_str(&format!(" {}", show(c)));
            }
            s.push_str("\npaths:\n");
            for path in maximal_source_paths(&cg) {
                let parts: Vec<String> = path.iter().map(|&c| show(c)).collect();
                s.push_str(&format!("  {}\n", parts.join(" -> ")));
            }
            s
        }
    }
}

/// The table `n rc(n)` and a comparison with the certified degree, fitted on `n ≤ 6`.
pub fn oracle_table(trs: &Trs, mode: Strategy, n_max: usize, fuel: u64, analysis: &Analysis) -> String {
    let samples = runtime_complexity_samples(trs, &StepMode::of(mode), n_max, fuel);
    let mut s = String::from("n rc(n)\n");
    for r in &samples {
        if r.diverged {
            s.push_str(&format!("{} >={} (diverged)\n", r.n, r.rc));
        } else {
            s.push_str(&format!("{} {}\n", r.n, r.rc));
        }
    }
    match &analysis.certificate {
        None => s.push_str("no certified bound to compare\n"),
        Some(c) => {
            let points: Vec<(usize, u64)> = samples.iter().map(|r| (r.n, r.rc)).collect();
            let fit = fit_bound(&points, c.degree as u32, 6);
            let pass = fit.holds && !samples.iter().any(|r| r.diverged);
            s.push_str(&format!(
                "{} rc(n) <= {:.3}*n^{} for n <= {}\n",
                if pass { "PASS" } else { "FAIL" },
                fit.constant,
                c.degree,
                n_max
            ));
        }
    }
    s
}
