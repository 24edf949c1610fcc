//! The `kso` command line.
//!
//! Verification commands print `OPAQUE` or `NOT_OPAQUE` on the first line and
//! exit with 0 or 1; usage and input errors exit with 2.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kstep_opacity::dot::{des_to_dot, observer_to_dot};
use kstep_opacity::oracle::{
    random_des, strong_violation_search, weak_violation_search, GeneratorParams, OracleBounds,
};
use kstep_opacity::{
    normalize, observer, parse_des, serialize_des, strong_to_weak, verify_strong, verify_weak, Des,
    KBound, Stats, Verdict,
};

pub const EXIT_OPAQUE: i32 = 0;
pub const EXIT_NOT_OPAQUE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kso", version, about = "Weak and strong k-step opacity verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Number of steps, or `inf`.
    #[arg(long)]
    k: KBound,
    /// Print an observation-level counterexample.
    #[arg(long)]
    witness: bool,
    #[arg(long)]
    stats: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide weak k-step opacity.
    VerifyWeak {
        #[command(flatten)]
        args: VerifyArgs,
        /// Write des.dot and observer.dot into this directory.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide strong k-step opacity (deterministic systems, no neutral states).
    VerifyStrong {
        #[command(flatten)]
        args: VerifyArgs,
    },
    /// Make a deterministic system normal.
    Normalize {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reduce strong opacity of a normal system to weak opacity.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Export the observer in DOT format.
    Observer {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Bounded search for a violation straight from the definitions.
    Oracle {
        #[arg(value_enum)]
        mode: OracleMode,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: KBound,
        #[arg(long, default_value_t = 8)]
        mu_max: usize,
        #[arg(long, default_value_t = 8)]
        nu_max: usize,
    },
    /// Generate a random system.
    Random {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        obs_events: usize,
        #[arg(long, default_value_t = 0)]
        unobs_events: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0.3)]
        secret_frac: f64,
        #[arg(long, default_value_t = 0.0)]
        neutral_frac: f64,
        #[arg(long)]
        nondeterministic: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time weak verification for several values of k.
    Bench {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<KBound>,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        /// Bench the strong verifier instead.
        #[arg(long)]
        strong: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleMode {
    Weak,
    Strong,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OPAQUE };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn read_des(path: &Path) -> Result<Des> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_des(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_text(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => out.write_all(text.as_bytes()).context("writing output"),
    }
}

fn verdict_code(opaque: bool) -> i32 {
    if opaque {
        EXIT_OPAQUE
    } else {
        EXIT_NOT_OPAQUE
    }
}

fn report(des: &Des, verdict: &Verdict, args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    writeln!(out, "{}", if verdict.opaque { "OPAQUE" } else { "NOT_OPAQUE" })?;
    if args.witness {
        if let Some(w) = &verdict.witness {
            writeln!(out, "mu={}", des.events().render(&w.mu))?;
            writeln!(out, "secret={}", des.state_name(w.secret_state))?;
            writeln!(out, "nu={}", des.events().render(&w.nu))?;
        }
    }
    if args.stats {
        write_stats(&verdict.stats, out)?;
    }
    Ok(verdict_code(verdict.opaque))
}

fn write_stats(stats: &Stats, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "observer_states={}", stats.observer_states)?;
    writeln!(out, "h_states={}", stats.h_states)?;
    writeln!(out, "product_states_explored={}", stats.product_states_explored)?;
    writeln!(out, "bfs_depth={}", stats.bfs_depth_reached)?;
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::VerifyWeak { args, dot } => {
            let des = read_des(&args.input)?;
            if let Some(dir) = &dot {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                fs::write(dir.join("des.dot"), des_to_dot(&des))?;
                fs::write(dir.join("observer.dot"), observer_to_dot(&des, &observer(&des)))?;
            }
            let verdict = verify_weak(&des, args.k);
            report(&des, &verdict, &args, out)
        }
        Command::VerifyStrong { args } => {
            let des = read_des(&args.input)?;
            let result = verify_strong(&des, args.k)?;
            report(&result.reduction.des, &result.verdict, &args, out)
        }
        Command::Normalize { input, output } => {
            let des = read_des(&input)?;
            let norm = normalize(&des)?;
            write_text(output.as_deref(), &serialize_des(&norm.des), out)?;
            Ok(EXIT_OPAQUE)
        }
        Command::Transform { input, output } => {
            let des = read_des(&input)?;
            let reduced = strong_to_weak(&des)?;
            write_text(output.as_deref(), &serialize_des(&reduced.des), out)?;
            Ok(EXIT_OPAQUE)
        }
        Command::Observer { input, dot } => {
            let des = read_des(&input)?;
            write_text(dot.as_deref(), &observer_to_dot(&des, &observer(&des)), out)?;
            Ok(EXIT_OPAQUE)
        }
        Command::Oracle {
            mode,
            input,
            k,
            mu_max,
            nu_max,
        } => {
            let des = read_des(&input)?;
            let bounds = OracleBounds {
                mu_max,
                nu_max,
                ..OracleBounds::default()
            };
            match mode {
                OracleMode::Weak => match weak_violation_search(&des, k, bounds) {
                    Some(find) => {
                        writeln!(out, "NOT_OPAQUE")?;
                        writeln!(out, "mu={}", des.events().render(&find.mu))?;
                        writeln!(out, "secret={}", des.state_name(find.secret_state))?;
                        writeln!(out, "nu={}", des.events().render(&find.nu))?;
                        Ok(EXIT_NOT_OPAQUE)
                    }
                    None => {
                        writeln!(out, "NO_VIOLATION_WITHIN_BOUNDS")?;
                        Ok(EXIT_OPAQUE)
                    }
                },
                OracleMode::Strong => match strong_violation_search(&des, k, bounds)? {
                    Some(s) => {
                        writeln!(out, "NOT_OPAQUE")?;
                        writeln!(out, "s={}", des.events().render(&s))?;
                        Ok(EXIT_NOT_OPAQUE)
                    }
                    None => {
                        writeln!(out, "NO_VIOLATION_WITHIN_BOUNDS")?;
                        Ok(EXIT_OPAQUE)
                    }
                },
            }
        }
        Command::Random {
            states,
            obs_events,
            unobs_events,
            density,
            secret_frac,
            neutral_frac,
            nondeterministic,
            seed,
            output,
        } => {
            let des = random_des(&GeneratorParams {
                state_count: states,
                observable_event_count: obs_events,
                unobservable_event_count: unobs_events,
                transition_density: density,
                secret_fraction: secret_frac,
                neutral_fraction: neutral_frac,
                deterministic: !nondeterministic,
                rng_seed: seed,
            })?;
            write_text(output.as_deref(), &serialize_des(&des), out)?;
            Ok(EXIT_OPAQUE)
        }
        Command::Bench {
            input,
            k_list,
            repeat,
            strong,
        } => {
            if repeat == 0 {
                bail!("--repeat must be at least 1");
            }
            let des = read_des(&input)?;
            let rows = bench(&des, &k_list, repeat, strong)?;
            for row in &rows {
                writeln!(
                    out,
                    "k={} opaque={} product_states_explored={} wall_us={}",
                    row.k,
                    row.opaque,
                    row.product_states_explored,
                    row.wall.as_micros()
                )?;
            }
            Ok(EXIT_OPAQUE)
        }
    }
}

/// One line of `bench` output.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub k: KBound,
    pub opaque: bool,
    pub product_states_explored: usize,
    /// Fastest of the repetitions.
    pub wall: Duration,
}

/// Runs the verifier `repeat` times per value of k, one run at a time. The
/// repetitions go round-robin over the k list so that drift in machine speed
/// affects every row alike.
pub fn bench(des: &Des, ks: &[KBound], repeat: usize, strong: bool) -> Result<Vec<BenchRow>> {
    let mut best = vec![Duration::MAX; ks.len()];
    let mut verdicts: Vec<Option<Verdict>> = vec![None; ks.len()];
    for _ in 0..repeat.max(1) {
        for (i, &k) in ks.iter().enumerate() {
            let start = Instant::now();
            let verdict = if strong {
                verify_strong(des, k)?.verdict
            } else {
                verify_weak(des, k)
            };
            best[i] = best[i].min(start.elapsed());
            verdicts[i] = Some(verdict);
        }
    }
    Ok(ks
        .iter()
        .zip(best)
        .zip(verdicts)
        .map(|((&k, wall), verdict)| {
            let verdict = verdict.expect("at least one repetition");
            BenchRow {
                k,
                opaque: verdict.opaque,
                product_states_explored: verdict.stats.product_states_explored,
                wall,
            }
        })
        .collect())
}
