use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use plwe_core::attack::{algorithm1, algorithm2, algorithm3_from_stream, plan_attack, AttackPlan, AttackVerdict};
use plwe_core::files::{read_params, read_samples, write_samples, ParamsFile};
use plwe_core::forge::{build_modulus, find_fq_roots, find_prime, scan, ParameterSet};
use plwe_core::harness::{run_experiment, ConfigFile};
use plwe_core::region::{SmallnessRegion, DEFAULT_TABLE_CAP};
use plwe_core::sampler::{GaussianParams, Oracle, Sample};
use plwe_core::Error;

#[derive(Parser)]
#[command(name = "plwe", version, about = "Zero-trace decision attacks on PLWE")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forge an attackable parameter set and print it as JSON.
    GenParams {
        #[arg(long)]
        min_q: u64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        rho: u64,
        #[arg(long, default_value_t = 1)]
        c: u64,
        #[arg(long, default_value_t = 8.0)]
        sigma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for small-order roots and x^2 + rho factors of f mod q.
    Scan {
        #[arg(long)]
        params_file: PathBuf,
        /// Overrides the sigma stored in the params file.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Write oracle samples as JSON lines.
    Sample {
        #[arg(long)]
        params_file: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Draw a(x) directly from R_q0 instead of all of R_q.
        #[arg(long)]
        rq0: bool,
    },
    /// Run one of the attacks on a sample file and print the verdict.
    Attack {
        #[arg(long)]
        params_file: PathBuf,
        #[arg(long)]
        samples_file: PathBuf,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
        algorithm: u8,
        /// Root in F_q for algorithm 1; defaults to the first root found.
        #[arg(long)]
        alpha: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        l: Option<u64>,
        /// Success target used to plan k and l when they are not given.
        #[arg(long, default_value_t = 0.9)]
        theta: f64,
        #[arg(long, default_value_t = 2.0)]
        safety: f64,
        /// Read the smallness region from a cache file instead of building it.
        #[arg(long)]
        region_cache: Option<PathBuf>,
    },
    /// Run the PLWE-versus-uniform experiment campaign.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_report: Option<PathBuf>,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Uniform,
    Plwe,
}

#[derive(Serialize)]
struct AttackOutput {
    algorithm: u8,
    #[serde(flatten)]
    verdict: AttackVerdict,
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<AttackPlan>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::RegionCoversField { .. } | Error::TableTooLarge { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            writeln!(io::stdout(), "{text}")?;
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::GenParams { min_q, n, rho, c, sigma, out } => {
            let q = find_prime(min_q, rho)?;
            let f = build_modulus(n, rho, q, c)?;
            let ps = ParameterSet::new(q, rho, f, sigma)?;
            eprintln!("q = {q}, rho = {rho}, r = {}", ps.r);
            eprintln!("f = {}", ps.f);
            emit(out.as_deref(), &ParamsFile::from_set(&ps).to_json())
        }
        Command::Scan { params_file, sigma, json } => {
            let ps = read_params(&read_text(&params_file)?)?;
            let report = scan(&ps.f, ps.q(), sigma.unwrap_or(ps.sigma))?;
            if json {
                emit(None, &report.to_json())
            } else {
                print!("{report}");
                Ok(())
            }
        }
        Command::Sample { params_file, kind, count, seed, out, rq0 } => {
            let ps = read_params(&read_text(&params_file)?)?;
            let ring = Arc::new(ps.ring()?);
            let mut oracle = match kind {
                Kind::Uniform => Oracle::uniform(ring, seed),
                Kind::Plwe => Oracle::plwe(ring, GaussianParams::new(ps.sigma)?, seed),
            };
            let samples: Vec<Sample> = (0..count)
                .map(|_| if rq0 { oracle.next_rq0_sample() } else { oracle.next_sample() })
                .collect();
            let file = fs::File::create(&out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
            write_samples(io::BufWriter::new(file), &samples)
        }
        Command::Attack { params_file, samples_file, algorithm, alpha, k, l, theta, safety, region_cache } => {
            let ps = read_params(&read_text(&params_file)?)?;
            let ring = ps.ring()?;
            let file = fs::File::open(&samples_file).map_err(|e| Error::Io(format!("{}: {e}", samples_file.display())))?;
            let samples = read_samples(BufReader::new(file), &ring)?;
            let cached = match &region_cache {
                Some(path) => Some(SmallnessRegion::read_cache(BufReader::new(
                    fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
                ))?),
                None => None,
            };
            let n = samples.len();
            let (verdict, plan) = match algorithm {
                1 => {
                    let alpha = match alpha {
                        Some(a) => a,
                        None => find_fq_roots(&ps.f, ps.q())?
                            .first()
                            .map(|&(a, _)| a)
                            .ok_or_else(|| Error::InvalidParameter("f has no root in F_q; pass --alpha".into()))?,
                    };
                    let alpha = ring.field().elem(alpha);
                    let region = match cached {
                        Some(r) => r,
                        None => SmallnessRegion::elos(ps.q(), ps.degree(), ps.sigma, alpha, DEFAULT_TABLE_CAP)?,
                    };
                    (algorithm1(ring.field(), &samples, &region, alpha)?, None)
                }
                2 => {
                    let region = match cached {
                        Some(r) => r,
                        None => ps.region(DEFAULT_TABLE_CAP)?,
                    };
                    (algorithm2(&ring, &samples, &region)?, None)
                }
                _ => {
                    let region = match cached {
                        Some(r) => r,
                        None => ps.region(DEFAULT_TABLE_CAP)?,
                    };
                    let plan = match (k, l) {
                        (Some(k), Some(l)) => AttackPlan::manual(k, l)?,
                        (k, l) => {
                            let mut p = plan_attack(theta, ps.q(), region.exact_size(), safety)?;
                            if let Some(k) = k {
                                p.k = k;
                                p.l = (safety * k as f64 * ps.q() as f64).ceil() as u64;
                            }
                            if let Some(l) = l {
                                p.l = l;
                            }
                            p.validate()?;
                            p
                        }
                    };
                    (algorithm3_from_stream(&ring, samples, &plan, &region)?, Some(plan))
                }
            };
            let out = AttackOutput { algorithm, verdict, samples: n, plan };
            emit(None, &serde_json::to_string_pretty(&out).expect("verdict serializes"))
        }
        Command::Experiment { config, out_report, seed, workers } => {
            let text = read_text(&config)?;
            let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
            let mut cfg = ConfigFile::parse(&text)?.resolve(|p| read_text(&base.join(p)))?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.workers = workers;
            let report = run_experiment(&cfg)?;
            for (name, d) in [("plwe", &report.plwe), ("uniform", &report.uniform)] {
                eprintln!(
                    "{name}: {}/{} failures ({:.1}%), mean sampling {:.3}s, mean attack {:.3}s",
                    d.failures,
                    cfg.ntests,
                    100.0 * d.failure_rate,
                    d.mean_sampling_secs,
                    d.mean_attack_secs
                );
            }
            eprintln!("predicted plwe failure rate {:.1}%", 100.0 * report.predicted_plwe_failure_rate);
            emit(out_report.as_deref(), &report.to_json())
        }
    }
}
