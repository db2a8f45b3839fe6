//! `entrovel` — exponential growth and entropy-line analysis for annual
//! `year,value` series.

mod figures;
mod render;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use entrovel_core::datasource::{self, DatasetManifest};
use entrovel_core::entropy::{self, entropy_line, EntropyLine};
use entrovel_core::expfit::{fit_exponential, lambda_to_rate, rate_to_lambda};
use entrovel_core::rolling::rolling_lambda;
use entrovel_core::series::{align_many, AnnualSeries};

use render::{
    combination_label, csv_line, entropy_equation, fixed, hypothesis_equation, lambda4, pct0,
    pct1, precise, signs_code, FigureSpec, FitSummary, HypothesisRow, ReportBundle, Table,
};

#[derive(Parser)]
#[command(
    name = "entrovel",
    version,
    about = "Exponential growth fitting and entropy-line decomposition for annual time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a mono-exponential growth model to a year,value CSV
    Fit(FitArgs),
    /// Rank every sign combination of component series against a target
    Hypothesis(HypothesisArgs),
    /// Overlay the entropy lines of several series
    Compare(CompareArgs),
    /// Convert between a rate constant and an annual growth fraction
    Rates(RatesArgs),
    /// Windowed local rate constants ("velocity") and their first differences
    Rolling(RollingArgs),
    /// Materialize manifest datasets into the local cache
    Fetch(FetchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    Linear,
    Log,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with header `year,value`
    #[arg(long)]
    input: PathBuf,
    /// Calendar year mapped to t = 0 (default: first year in the file)
    #[arg(long)]
    reference_year: Option<i32>,
    /// Y-axis scale for the figure
    #[arg(long, value_enum, default_value = "linear")]
    scale: ScaleArg,
    /// Write a figure of observations plus the fitted curve
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct HypothesisArgs {
    /// Target series CSV
    #[arg(long)]
    input: PathBuf,
    /// Component series CSV (repeat for each component, up to 4)
    #[arg(long = "component", required = true)]
    components: Vec<PathBuf>,
    /// Calendar year mapped to t = 0 before alignment
    #[arg(long)]
    reference_year: Option<i32>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct CompareArgs {
    /// Input CSV (repeat; at least 2)
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Calendar year mapped to t = 0 before alignment
    #[arg(long)]
    reference_year: Option<i32>,
    /// Write the entropy-line overlay figure
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("value").required(true).multiple(false))]
struct RatesArgs {
    /// Per-year rate constant to convert to an annual growth fraction
    #[arg(long, group = "value", allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Annual growth fraction (> -1) to convert to a rate constant
    #[arg(long, group = "value", allow_hyphen_values = true)]
    rate: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct RollingArgs {
    /// Input CSV with header `year,value`
    #[arg(long)]
    input: PathBuf,
    /// Window length in years (>= 2)
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Calendar year mapped to t = 0
    #[arg(long)]
    reference_year: Option<i32>,
    /// Write a two-panel velocity/acceleration figure
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct FetchArgs {
    /// Dataset manifest (one [id] stanza per dataset)
    #[arg(long)]
    manifest: PathBuf,
    /// Cache directory (overrides ENTROVEL_CACHE and the default)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Hypothesis(args) => cmd_hypothesis(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Rates(args) => cmd_rates(args),
        Command::Rolling(args) => cmd_rolling(args),
        Command::Fetch(args) => cmd_fetch(args),
    }
}

/// Read, parse and optionally rebase one input file. The series is named
/// after the file stem; rebase drops are warned on stderr.
fn load_series(path: &Path, reference_year: Option<i32>) -> Result<AnnualSeries> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let series = AnnualSeries::parse_csv(&name, &text)
        .with_context(|| path.display().to_string())?;
    match reference_year {
        None => Ok(series),
        Some(year) => {
            let (rebased, dropped) = series
                .rebase(year)
                .with_context(|| path.display().to_string())?;
            if dropped > 0 {
                eprintln!(
                    "warning: {name}: rebasing to {year} dropped {dropped} earlier observation(s)"
                );
            }
            Ok(rebased)
        }
    }
}

fn summarize(series: &AnnualSeries) -> Result<FitSummary> {
    let fit = fit_exponential(series).with_context(|| series.name().to_string())?;
    Ok(FitSummary {
        id: series.name().to_string(),
        rate: lambda_to_rate(fit.lambda),
        fit,
    })
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let series = load_series(&args.input, args.reference_year)?;
    let summary = summarize(&series)?;
    let fit = &summary.fit;

    match args.format {
        Format::Table => {
            let mut out = String::new();
            let mut kv = |k: &str, v: String| out.push_str(&format!("{k:<10} {v}\n"));
            kv("series", summary.id.clone());
            kv("years", format!("{}-{}", series.first_year(), series.last_year()));
            kv("n", fit.n.to_string());
            kv("lambda", lambda4(fit.lambda));
            kv("rate", pct1(summary.rate));
            kv("g0", fixed(fit.g0, 4));
            kv("r2_log", pct0(fit.r2_log));
            kv("r2_linear", pct0(fit.r2_linear));
            print!("{out}");
        }
        Format::Csv => {
            print!(
                "{}",
                csv_line(&[
                    "series".into(),
                    "first_year".into(),
                    "last_year".into(),
                    "n".into(),
                    "lambda".into(),
                    "rate_pct".into(),
                    "g0".into(),
                    "r2_log_pct".into(),
                    "r2_linear_pct".into(),
                ])
            );
            print!(
                "{}",
                csv_line(&[
                    summary.id.clone(),
                    series.first_year().to_string(),
                    series.last_year().to_string(),
                    fit.n.to_string(),
                    precise(fit.lambda),
                    fixed(summary.rate * 100.0, 4),
                    precise(fit.g0),
                    fixed(fit.r2_log * 100.0, 4),
                    fixed(fit.r2_linear * 100.0, 4),
                ])
            );
        }
    }

    if let Some(path) = args.svg {
        let scale = match args.scale {
            ScaleArg::Linear => figures::Scale::Linear,
            ScaleArg::Log => figures::Scale::Log,
        };
        fs::write(&path, figures::fit_figure(&series, fit, scale))
            .with_context(|| format!("cannot write {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_hypothesis(args: HypothesisArgs) -> Result<()> {
    let target_raw = load_series(&args.input, args.reference_year)?;
    let mut component_raw = Vec::new();
    for path in &args.components {
        component_raw.push(load_series(path, args.reference_year)?);
    }

    let mut refs: Vec<&AnnualSeries> = vec![&target_raw];
    refs.extend(component_raw.iter());
    let aligned = align_many(&refs).context("aligning inputs")?;
    let target_summary = summarize(&aligned[0])?;
    let mut component_summaries = Vec::new();
    for series in &aligned[1..] {
        component_summaries.push(summarize(series)?);
    }

    let bundle = hypothesis_bundle(&target_summary, &component_summaries)?;

    match args.format {
        Format::Table => {
            let mut out = String::new();
            let target = &bundle.fits[0];
            out.push_str(&format!(
                "target: {} (lambda {}, rate {})\n",
                target.id,
                lambda4(target.fit.lambda),
                pct1(target.rate)
            ));
            let comps: Vec<String> = bundle.fits[1..]
                .iter()
                .map(|c| format!("{} (lambda {})", c.id, lambda4(c.fit.lambda)))
                .collect();
            out.push_str(&format!("components: {}\n\n", comps.join(", ")));
            for eq in &bundle.entropy_equations {
                out.push_str(eq);
                out.push('\n');
            }
            out.push('\n');

            let mut table = Table::new(vec![
                "rank",
                "flag",
                "combination",
                "combined",
                "delta",
                "delta_rate",
                "ratio",
                "equation",
            ]);
            for (i, row) in bundle.hypotheses.iter().enumerate() {
                table.row(vec![
                    (i + 1).to_string(),
                    if i == 0 { "BEST".into() } else { String::new() },
                    row.combination.clone(),
                    lambda4(row.result.combined_lambda),
                    lambda4(row.result.delta),
                    pct1(row.delta_rate),
                    row.result.velocity_ratio.map_or("n/a".into(), pct0),
                    row.equation.clone(),
                ]);
            }
            out.push_str(&table.render());
            out.push('\n');
            out.push_str(
                "note: delta is computed from unrounded rate constants; recombining the rounded values shown may differ in the last digit.\n",
            );
            out.push_str(
                "note: matching growth rates do not establish causation; simple correlation cannot be ruled out.\n",
            );
            print!("{out}");
        }
        Format::Csv => {
            print!(
                "{}",
                csv_line(&[
                    "rank".into(),
                    "best".into(),
                    "signs".into(),
                    "combination".into(),
                    "combined_lambda".into(),
                    "delta".into(),
                    "delta_rate_pct".into(),
                    "velocity_ratio_pct".into(),
                ])
            );
            for (i, row) in bundle.hypotheses.iter().enumerate() {
                print!(
                    "{}",
                    csv_line(&[
                        (i + 1).to_string(),
                        (i == 0).to_string(),
                        signs_code(&row.result.signs),
                        row.combination.clone(),
                        precise(row.result.combined_lambda),
                        precise(row.result.delta),
                        fixed(row.delta_rate * 100.0, 4),
                        row.result
                            .velocity_ratio
                            .map_or(String::new(), |r| fixed(r * 100.0, 4)),
                    ])
                );
            }
            eprintln!(
                "note: delta is computed from unrounded rate constants; recombining the rounded values shown may differ in the last digit."
            );
        }
    }
    Ok(())
}

/// Assemble fits, rendered equations and ranked hypothesis rows. All
/// numeric values are computed here; rendering only formats them.
fn hypothesis_bundle(target: &FitSummary, components: &[FitSummary]) -> Result<ReportBundle> {
    let target_line = entropy_line(&target.fit, &target.id);
    let component_lines: Vec<EntropyLine> = components
        .iter()
        .map(|c| entropy_line(&c.fit, &c.id))
        .collect();
    let component_labels: Vec<String> = components.iter().map(|c| c.id.clone()).collect();

    let ranked = entropy::enumerate_hypotheses(&target_line, &component_lines)
        .context("enumerating hypotheses")?;

    let mut entropy_equations = vec![entropy_equation(&target.id, target.fit.lambda)];
    for c in components {
        entropy_equations.push(entropy_equation(&c.id, c.fit.lambda));
    }

    let hypotheses = ranked
        .into_iter()
        .map(|result| {
            let combination = combination_label(&result.signs, &component_labels);
            let equation = hypothesis_equation(
                &target.id,
                target_line.lambda,
                &result.signs,
                &component_labels,
                result.delta,
            );
            HypothesisRow {
                delta_rate: lambda_to_rate(result.delta),
                combination,
                equation,
                result,
            }
        })
        .collect();

    let mut fits = vec![target.clone()];
    fits.extend(components.iter().cloned());
    Ok(ReportBundle {
        fits,
        entropy_equations,
        hypotheses,
        figures: Vec::new(),
    })
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    if args.inputs.len() < 2 {
        bail!("compare needs at least 2 --input files");
    }
    let mut raw = Vec::new();
    for path in &args.inputs {
        raw.push(load_series(path, args.reference_year)?);
    }
    let refs: Vec<&AnnualSeries> = raw.iter().collect();
    let aligned = align_many(&refs).context("aligning inputs")?;
    let mut summaries = Vec::new();
    for series in &aligned {
        summaries.push(summarize(series)?);
    }

    // A line coinciding with an earlier one is drawn dashed.
    let figure_lines: Vec<FigureSpec> = summaries
        .iter()
        .enumerate()
        .map(|(i, s)| FigureSpec {
            label: s.id.clone(),
            lambda: s.fit.lambda,
            dashed: summaries[..i]
                .iter()
                .any(|prev| (prev.fit.lambda - s.fit.lambda).abs() <= 1e-9),
        })
        .collect();
    let entropy_equations: Vec<String> = summaries
        .iter()
        .map(|s| entropy_equation(&s.id, s.fit.lambda))
        .collect();
    let bundle = ReportBundle {
        fits: summaries,
        entropy_equations,
        hypotheses: Vec::new(),
        figures: figure_lines,
    };

    let first = &aligned[0];
    let t_max = f64::from(first.observations().last().expect("aligned nonempty").t);

    match args.format {
        Format::Table => {
            let mut out = String::new();
            out.push_str(&format!(
                "window: {}-{} (t = 0..{})\n\n",
                first.first_year(),
                first.last_year(),
                t_max as i64
            ));
            let mut table = Table::new(vec!["series", "lambda", "rate"]);
            for s in &bundle.fits {
                table.row(vec![s.id.clone(), lambda4(s.fit.lambda), pct1(s.rate)]);
            }
            out.push_str(&table.render());
            out.push('\n');
            for eq in &bundle.entropy_equations {
                out.push_str(eq);
                out.push('\n');
            }
            print!("{out}");
        }
        Format::Csv => {
            print!(
                "{}",
                csv_line(&["series".into(), "lambda".into(), "rate_pct".into()])
            );
            for s in &bundle.fits {
                print!(
                    "{}",
                    csv_line(&[
                        s.id.clone(),
                        precise(s.fit.lambda),
                        fixed(s.rate * 100.0, 4),
                    ])
                );
            }
        }
    }

    if let Some(path) = args.svg {
        fs::write(&path, figures::overlay_figure(&bundle.figures, t_max))
            .with_context(|| format!("cannot write {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_rates(args: RatesArgs) -> Result<()> {
    let (lambda, rate) = match (args.lambda, args.rate) {
        (Some(lambda), None) => (lambda, lambda_to_rate(lambda)),
        (None, Some(rate)) => (rate_to_lambda(rate)?, rate),
        _ => bail!("pass exactly one of --lambda or --rate"),
    };
    match args.format {
        Format::Table => {
            let mut out = String::new();
            if args.lambda.is_some() {
                out.push_str(&format!("lambda     {}\n", lambda4(lambda)));
                out.push_str(&format!("rate       {} ({})\n", fixed(rate, 4), pct1(rate)));
            } else {
                out.push_str(&format!("rate       {} ({})\n", fixed(rate, 4), pct1(rate)));
                out.push_str(&format!("lambda     {}\n", lambda4(lambda)));
            }
            print!("{out}");
        }
        Format::Csv => {
            print!(
                "{}",
                csv_line(&["lambda".into(), "rate".into(), "rate_pct".into()])
            );
            print!(
                "{}",
                csv_line(&[precise(lambda), precise(rate), fixed(rate * 100.0, 4)])
            );
        }
    }
    Ok(())
}

fn cmd_rolling(args: RollingArgs) -> Result<()> {
    let series = load_series(&args.input, args.reference_year)?;
    let rv = rolling_lambda(&series, args.window).with_context(|| series.name().to_string())?;

    match args.format {
        Format::Table => {
            let mut out = String::new();
            out.push_str(&format!("series     {}\n", series.name()));
            out.push_str(&format!("window     {}\n\n", rv.window));
            let mut velocity = Table::new(vec!["t_center", "local_lambda", "local_rate"]);
            for p in &rv.points {
                velocity.row(vec![
                    fixed(p.t_center, 1),
                    lambda4(p.local_lambda),
                    pct1(lambda_to_rate(p.local_lambda)),
                ]);
            }
            out.push_str(&velocity.render());
            if !rv.accel.is_empty() {
                out.push('\n');
                let mut accel = Table::new(vec!["t_mid", "dlambda_dt"]);
                for a in &rv.accel {
                    accel.row(vec![fixed(a.t_mid, 1), fixed(a.dlambda_dt, 6)]);
                }
                out.push_str(&accel.render());
            }
            print!("{out}");
        }
        Format::Csv => {
            print!("{}", csv_line(&["kind".into(), "t".into(), "value".into()]));
            for p in &rv.points {
                print!(
                    "{}",
                    csv_line(&[
                        "velocity".into(),
                        fixed(p.t_center, 1),
                        precise(p.local_lambda),
                    ])
                );
            }
            for a in &rv.accel {
                print!(
                    "{}",
                    csv_line(&["accel".into(), fixed(a.t_mid, 1), precise(a.dlambda_dt)])
                );
            }
        }
    }

    if let Some(path) = args.svg {
        fs::write(&path, figures::rolling_figure(series.name(), &rv))
            .with_context(|| format!("cannot write {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_fetch(args: FetchArgs) -> Result<()> {
    let manifest = DatasetManifest::load(&args.manifest)
        .with_context(|| args.manifest.display().to_string())?;
    let cache_dir = resolve_cache_dir(args.cache_dir);
    let series = datasource::fetch(&manifest, &cache_dir)?;
    eprintln!("cache: {}", cache_dir.display());

    match args.format {
        Format::Table => {
            let mut table = Table::new(vec!["id", "years", "n"]);
            for (id, s) in &series {
                table.row(vec![
                    id.clone(),
                    format!("{}-{}", s.first_year(), s.last_year()),
                    s.len().to_string(),
                ]);
            }
            print!("{}", table.render());
        }
        Format::Csv => {
            print!(
                "{}",
                csv_line(&[
                    "id".into(),
                    "first_year".into(),
                    "last_year".into(),
                    "n".into(),
                ])
            );
            for (id, s) in &series {
                print!(
                    "{}",
                    csv_line(&[
                        id.clone(),
                        s.first_year().to_string(),
                        s.last_year().to_string(),
                        s.len().to_string(),
                    ])
                );
            }
        }
    }
    Ok(())
}

/// Cache precedence: `--cache-dir`, then `ENTROVEL_CACHE`, then
/// `$HOME/.cache/entrovel`, then `./.entrovel-cache`.
fn resolve_cache_dir(flag: Option<PathBuf>) -> PathBuf {
    if let Some(dir) = flag {
        return dir;
    }
    if let Ok(dir) = std::env::var("ENTROVEL_CACHE") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    match std::env::var("HOME") {
        Ok(home) if !home.is_empty() => Path::new(&home).join(".cache").join("entrovel"),
        _ => PathBuf::from(".entrovel-cache"),
    }
}
