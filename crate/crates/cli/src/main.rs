use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rlwe_channel::channel::{
    analyze_channel, coeff_failure_bound, coeff_failure_log2, find_min_distance, prob_log2, symbol_error_probability,
};
use rlwe_channel::code_search::{
    bch_search, gv_max_dimension, maximize_rate_for_dfr, minimize_dfr_for_rate, BchConvention,
};
use rlwe_channel::noise::{build_psi, NoiseModel};
use rlwe_channel::params::resolve_scheme;
use rlwe_channel::pmf::write_pmf;
use rlwe_channel::report::{
    appendix_checks, capacity_csv, checks_csv, compare_dfr_table, compare_rate_table, dfr_table_csv, fmt_log2,
    min_dfr_csv, rate_table_csv, Check, Metadata, ReportBundle, ReportRow, Status, TABLE1, TABLE2, TABLE3_RATES,
    TABLE_ALPHABETS,
};
use rlwe_channel::ring::Seed;
use rlwe_channel::simulator::{measure_coeff_failures, NoiseMode, SimulationConfig};
use rlwe_channel::{ParamSet, PrecisionConfig};

/// Noisy-channel analysis of RLWE/MLWE encryption.
#[derive(Parser)]
#[command(name = "rlwe-channel", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Preset name or path to a parameter file.
    #[arg(long, global = true, default_value = "newhope1024")]
    scheme: String,
    /// MPFR mantissa bits.
    #[arg(long, global = true, default_value_t = 1024)]
    precision: u32,
    /// Exact rational arithmetic (small moduli only).
    #[arg(long, global = true)]
    exact: bool,
    /// 64 hex digits (shorter values are zero-padded on the left).
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Output directory for CSV, PMF and JSON files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the noise laws and write them as PMF files.
    Noise,
    /// Capacity lower bounds over a range of alphabet sizes.
    Capacity {
        /// Alphabet sizes, e.g. `2-8,16,64`.
        #[arg(short = 'Q', long, default_value = "2-8,16,64")]
        alphabets: String,
    },
    /// Reproduce one of the three code-parameter tables.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        /// Use narrow-sense BCH codes instead of the best root offset.
        #[arg(long)]
        narrow_sense: bool,
    },
    /// Largest GV dimension for an [n, k, d]_Q code.
    GvSearch {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(short = 'Q', long)]
        alphabet: u32,
    },
    /// Best BCH code of length at most n with designed distance d.
    BchSearch {
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        d: usize,
        #[arg(short = 'Q', long)]
        alphabet: u32,
        #[arg(long)]
        narrow_sense: bool,
    },
    /// Smallest minimum distance meeting a failure target.
    FindD {
        #[arg(short = 'Q', long, default_value = "2,3,4,5,7")]
        alphabets: String,
        /// log2 of the target failure rate.
        #[arg(long, allow_hyphen_values = true)]
        target: f64,
    },
    /// Lowest failure rate at a given BCH rate.
    MinDfr {
        #[arg(short = 'Q', long, default_value = "2,3,4,5,7")]
        alphabets: String,
        /// Bits per coefficient.
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        narrow_sense: bool,
    },
    /// Monte Carlo encrypt/decrypt run.
    Simulate {
        #[arg(short = 'Q', long)]
        alphabet: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Check the decryption-noise identity on every trial.
        #[arg(long)]
        check_identity: bool,
    },
}

fn convention(narrow_sense: bool) -> BchConvention {
    if narrow_sense {
        BchConvention::NarrowSense
    } else {
        BchConvention::BestOffset
    }
}

/// Parses `2-8,16,64` into a sorted, deduplicated list.
fn parse_alphabets(text: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
                if a > b {
                    bail!("empty range {part}");
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse()?),
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        bail!("no alphabet sizes given");
    }
    Ok(out)
}

struct Ctx {
    global: Global,
    bundle: ReportBundle,
}

impl Ctx {
    fn precision(&self) -> Result<PrecisionConfig> {
        if self.global.exact {
            Ok(PrecisionConfig::exact())
        } else {
            Ok(PrecisionConfig::float(self.global.precision)?)
        }
    }

    fn scheme(&self) -> Result<ParamSet> {
        resolve_scheme(&self.global.scheme).with_context(|| format!("scheme {}", self.global.scheme))
    }

    fn noise(&self, param: &ParamSet) -> Result<NoiseModel> {
        Ok(build_psi(param, &self.precision()?)?)
    }

    fn out_dir(&self) -> Result<Option<&Path>> {
        match &self.global.out {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                Ok(Some(dir))
            }
            None => Ok(None),
        }
    }

    /// Prints `text` and, with `--out`, also writes it to `name`.
    fn emit(&self, name: &str, text: &str) -> Result<()> {
        print!("{text}");
        if let Some(dir) = self.out_dir()? {
            let path = dir.join(name);
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }

    fn finish(self) -> Result<ExitCode> {
        for c in &self.bundle.checks {
            if c.status != Status::Pass {
                eprintln!("{c}");
            }
        }
        if let Some(dir) = self.out_dir()? {
            let path = dir.join("report.json");
            fs::write(&path, serde_json::to_string_pretty(&self.bundle)?)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(if self.bundle.status() == Status::Fail {
            ExitCode::FAILURE
        } else {
            ExitCode::SUCCESS
        })
    }
}

fn cmd_noise(ctx: &Ctx) -> Result<()> {
    let param = ctx.scheme()?;
    let model = ctx.noise(&param)?;
    let dir = ctx.out_dir()?.unwrap_or(Path::new("."));
    for (name, pmf) in model.named_components() {
        let path = dir.join(format!("{name}.pmf"));
        write_pmf(pmf, &path).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{}: H(psi) = {:.6} bits", param.name, model.psi.entropy().to_f64());
    for alphabet in (2..=8).filter(|&a| a <= param.q) {
        println!(
            "Q={alphabet}: log2 Pr(E) <= {}",
            fmt_log2(&coeff_failure_log2(&model.psi, alphabet)?)
        );
    }
    Ok(())
}

fn cmd_capacity(ctx: &mut Ctx, alphabets: &str) -> Result<()> {
    let param = ctx.scheme()?;
    let alphabets = parse_alphabets(alphabets)?;
    if let Some(&a) = alphabets.iter().find(|&&a| a < 2 || a > param.q) {
        bail!("alphabet size {a} outside [2, {}]", param.q);
    }
    let psi = ctx.noise(&param)?.psi;
    let rows = alphabets
        .iter()
        .map(|&a| analyze_channel(&param, &psi, a))
        .collect::<rlwe_channel::Result<Vec<_>>>()?;
    ctx.bundle.rows.extend(rows.iter().map(ReportRow::from));
    ctx.emit(&format!("capacity_{}.csv", param.name), &capacity_csv(&rows)?)
}

fn cmd_table(ctx: &mut Ctx, which: u8, conv: BchConvention) -> Result<()> {
    let prec = ctx.precision()?;
    let csv = if which == 3 {
        let mut tables = Vec::new();
        for (name, rate) in TABLE3_RATES {
            let param = resolve_scheme(name)?;
            let psi = build_psi(&param, &prec)?.psi;
            tables.push(minimize_dfr_for_rate(&param, &psi, &TABLE_ALPHABETS, rate, conv)?);
        }
        let (nh, ky) = (&tables[0], &tables[1]);
        ctx.bundle.checks.extend(compare_dfr_table(nh, true));
        ctx.bundle.checks.extend(compare_dfr_table(ky, false));
        ctx.bundle.rows.extend(nh.iter().chain(ky).map(ReportRow::from));
        dfr_table_csv(nh, ky)?
    } else {
        let setup = if which == 1 { TABLE1 } else { TABLE2 };
        let param = resolve_scheme(setup.scheme)?;
        let psi = build_psi(&param, &prec)?.psi;
        let rows = maximize_rate_for_dfr(&param, &psi, &TABLE_ALPHABETS, setup.target_log2, conv)?;
        ctx.bundle.checks.extend(compare_rate_table(&rows, setup.reference));
        ctx.bundle.rows.extend(rows.iter().map(ReportRow::from));
        rate_table_csv(&rows)?
    };
    if which != 2 {
        // The independence-assumption bounds ride along with the NewHope tables.
        let mantissa = if ctx.global.exact { 1024 } else { ctx.global.precision };
        ctx.bundle.checks.extend(appendix_checks(mantissa)?);
    }
    ctx.emit(&format!("table{which}.csv"), &csv)?;
    if let Some(dir) = ctx.out_dir()? {
        fs::write(
            dir.join(format!("table{which}_checks.csv")),
            checks_csv(&ctx.bundle.checks)?,
        )?;
    }
    Ok(())
}

fn cmd_find_d(ctx: &mut Ctx, alphabets: &str, target: f64) -> Result<()> {
    let param = ctx.scheme()?;
    let psi = ctx.noise(&param)?.psi;
    let mut text = String::from("Q,d,t,log2_Pr_E,log2_DFR\n");
    for a in parse_alphabets(alphabets)? {
        let m = find_min_distance(&psi, a, param.n, target)?;
        text += &format!(
            "{a},{},{},{:.2},{}\n",
            m.d,
            m.t,
            prob_log2(&m.pr_e),
            fmt_log2(&m.dfr_log2)
        );
    }
    ctx.emit(&format!("find_d_{}.csv", param.name), &text)
}

fn cmd_min_dfr(ctx: &mut Ctx, alphabets: &str, rate: f64, conv: BchConvention) -> Result<()> {
    let param = ctx.scheme()?;
    let psi = ctx.noise(&param)?.psi;
    let rows = minimize_dfr_for_rate(&param, &psi, &parse_alphabets(alphabets)?, rate, conv)?;
    ctx.bundle.rows.extend(rows.iter().map(ReportRow::from));
    ctx.emit(&format!("min_dfr_{}.csv", param.name), &min_dfr_csv(&rows)?)
}

fn cmd_simulate(ctx: &mut Ctx, alphabet: u32, trials: u64, check_identity: bool) -> Result<()> {
    let param = ctx.scheme()?;
    if param.q > 1024 {
        eprintln!(
            "warning: q = {} is large; Monte Carlo will see few or no failures",
            param.q
        );
    }
    let seed = match &ctx.global.seed {
        Some(h) => Seed::from_hex(h)?,
        None => Seed::from_u64(0),
    };
    let cfg = SimulationConfig {
        alphabet,
        trials,
        seed,
        mode: NoiseMode::Cbd,
        check_identity,
    };
    let stats = measure_coeff_failures(&param, &cfg)?;
    let mut csv = Vec::new();
    stats.write_csv(&mut csv)?;
    ctx.emit(
        &format!("simulate_{}_Q{alphabet}.csv", param.name),
        &String::from_utf8(csv)?,
    )?;

    let psi = ctx.noise(&param)?.psi;
    let bound = coeff_failure_bound(&psi, alphabet)?.to_f64();
    let model = symbol_error_probability(&psi, alphabet)?.to_f64();
    let draws = (stats.trials * stats.n as u64) as f64;
    let emp = stats.empirical_rate();
    let sigma = (bound * (1.0 - bound) / draws).sqrt();
    let status = if emp <= bound + 3.0 * sigma {
        Status::Pass
    } else {
        Status::Fail
    };
    let pair_z = stats
        .pair_diagnostics()
        .iter()
        .map(|p| p.z.abs())
        .fold(0.0f64, f64::max);
    eprintln!("empirical Pr(E) {emp:.6e} over {} symbols", draws as u64);
    eprintln!("tail bound      {bound:.6e} (3 sigma {:.2e})", 3.0 * sigma);
    eprintln!("exact symbol error probability {model:.6e}");
    eprintln!("largest pairwise dependence |z| {pair_z:.2}");
    if check_identity {
        eprintln!("noise identity failures: {}", stats.identity_failures);
    }
    ctx.bundle.checks.push(
        Check::new(
            format!("{} Q={alphabet} empirical <= bound + 3 sigma", param.name),
            format!("{emp:.6e}"),
            format!("{:.6e}", bound + 3.0 * sigma),
            status,
        )
        .with_note(format!("seed {}", seed.to_hex())),
    );
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let precision = if cli.global.exact {
        "exact".to_string()
    } else {
        format!("{} bits", cli.global.precision)
    };
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut ctx = Ctx {
        global: cli.global,
        bundle: ReportBundle::new(Metadata {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            precision,
            timestamp: timestamp.to_string(),
        }),
    };
    match cli.command {
        Command::Noise => cmd_noise(&ctx)?,
        Command::Capacity { alphabets } => cmd_capacity(&mut ctx, &alphabets)?,
        Command::Table { which, narrow_sense } => cmd_table(&mut ctx, which, convention(narrow_sense))?,
        Command::GvSearch { n, d, alphabet } => {
            println!("{}", gv_max_dimension(n, d, alphabet)?);
        }
        Command::BchSearch {
            n_max,
            d,
            alphabet,
            narrow_sense,
        } => {
            let c = bch_search(n_max, d, alphabet, convention(narrow_sense))?;
            println!("n={} k={} b={}", c.n, c.k, c.offset);
        }
        Command::FindD { alphabets, target } => cmd_find_d(&mut ctx, &alphabets, target)?,
        Command::MinDfr {
            alphabets,
            rate,
            narrow_sense,
        } => cmd_min_dfr(&mut ctx, &alphabets, rate, convention(narrow_sense))?,
        Command::Simulate {
            alphabet,
            trials,
            check_identity,
        } => cmd_simulate(&mut ctx, alphabet, trials, check_identity)?,
    }
    ctx.finish()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
