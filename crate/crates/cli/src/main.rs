use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use lcoarea::backends::{assemble_space, parse_space, sprinkle, CausalSet, MinkowskiDiamond, SpaceDocument, SprinkleConfig};
use lcoarea::covering::{random_family, verify_vitali, vitali_select, DEFAULT_MARGIN};
use lcoarea::harness::{
    density_diagnostic, run_coarea_experiment, run_minkowski_volume_experiment, run_random_suite, to_csv, CsvRow,
    ExperimentConfig, RandomShape,
};
use lcoarea::integration::{weighted_causal_integral_delta, ChainOptions, IntegralMethod};
use lcoarea::measure::{cover_at_scale, estimate_measure, Method};
use lcoarea::setcover::ExactLimits;
use lcoarea::space::{verify_axioms, Sample};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lcoarea", version, about = "Lorentzian measures, causal covers and coarea checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the pre-length space axioms of a causal-set document.
    CheckAxioms { space: PathBuf },
    /// Cover value V^s_delta of a finite set, one scale or a decreasing schedule.
    Measure {
        space: PathBuf,
        #[arg(long)]
        s: f64,
        /// One scale or a comma-separated decreasing schedule.
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
        #[arg(long, default_value = "exact")]
        method: Method,
        /// Ambient space containing every point of SPACE by id; its points
        /// become the vertex pool.
        #[arg(long)]
        pool: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        max_targets: usize,
        #[arg(long, default_value_t = 200)]
        max_candidates: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Null-tiling cover values of a rest-frame diamond of R^{1,1}.
    MeasureMinkowski {
        #[arg(long)]
        tau: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        schedule: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Causal weighted integral of a function given as `{id: value}`.
    Integrate {
        space: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value = "exact")]
        method: IntegralMethod,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a coarea experiment from a config file.
    Coarea {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a CSV summary.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Override the config tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Random covering family, Vitali selection and its verification.
    CoveringDemo {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        ecc_max: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Poisson sprinkling into the unit rest diamond.
    Sprinkle {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        intensity: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fraction of small diamonds violating the density bound.
    Density {
        space: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        per_point: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random coarea instances, run in parallel.
    RandomSuite {
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_space(path: &Path) -> Result<CausalSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_space(&text).with_context(|| format!("loading {}", path.display()))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct MeasureOutput {
    estimate: lcoarea::measure::MeasureEstimate,
    /// Optimal cover at the finest scale.
    cover: lcoarea::measure::CoverSolution,
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::CheckAxioms { space } => {
            let text = std::fs::read_to_string(&space)?;
            let doc: SpaceDocument = serde_json::from_str(&text)?;
            let set = assemble_space(&doc)?;
            let report = verify_axioms(&set, Sample::All)?;
            emit(&report, None)?;
            if let Some(f) = report.first_failure() {
                eprintln!("axiom `{}` fails", f.axiom);
                return Ok(ExitCode::from(2));
            }
            eprintln!("all axioms hold on {} points", set.len());
        }
        Command::Measure {
            space,
            s,
            delta,
            method,
            pool,
            max_targets,
            max_candidates,
            out,
        } => {
            let limits = ExactLimits {
                max_targets,
                max_candidates,
            };
            let target_set = read_space(&space)?;
            let (set, target, pool) = match pool {
                Some(p) => {
                    let ambient = read_space(&p)?;
                    let ids: Vec<&str> = target_set.points().iter().map(|p| p.id.as_str()).collect();
                    let target = ambient.indices_of(&ids).context("target point missing from the pool")?;
                    let pool: Vec<usize> = (0..ambient.len()).collect();
                    (ambient, target, pool)
                }
                None => {
                    let all: Vec<usize> = (0..target_set.len()).collect();
                    (target_set, all.clone(), all)
                }
            };
            let estimate = estimate_measure(&set, &target, s, &delta, method, Some(&pool), &limits, 1e-9)?;
            let finest = *delta.last().expect("clap requires a value");
            let cover = cover_at_scale(&set, &target, &pool, s, finest, method, &limits)?;
            emit(&MeasureOutput { estimate, cover }, out.as_deref())?;
        }
        Command::MeasureMinkowski { tau, schedule, out } => {
            let d = MinkowskiDiamond::new(vec![0.0, 0.0], vec![tau, 0.0])?;
            let r = run_minkowski_volume_experiment(&d, &schedule)?;
            eprintln!("expected omega_2 tau^2 = {}", r.expected);
            emit(&r, out.as_deref())?;
        }
        Command::Integrate {
            space,
            f,
            s,
            delta,
            method,
            out,
        } => {
            let set = read_space(&space)?;
            let text = std::fs::read_to_string(&f)?;
            let mut de = serde_json::Deserializer::from_str(&text);
            let table: BTreeMap<String, f64> = lcoarea::ext_real::map::deserialize(&mut de)?;
            let mut values = vec![0.0; set.len()];
            for (id, v) in &table {
                values[set.index_of(id)?] = *v;
            }
            let all: Vec<usize> = (0..set.len()).collect();
            let w = weighted_causal_integral_delta(&set, &values, s, delta, &all, method)?;
            emit(&w, out.as_deref())?;
        }
        Command::Coarea {
            config,
            out,
            csv,
            tolerance,
        } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
            if let Some(t) = tolerance {
                cfg.tolerance = t;
            }
            let base = config.parent().unwrap_or(Path::new("."));
            let report = run_coarea_experiment(&cfg, base)?;
            std::fs::write(&out, report.to_json()?)?;
            if let Some(c) = csv {
                std::fs::write(c, to_csv(&report.csv_rows()))?;
            }
            eprintln!(
                "{}: lhs = {}, rhs = {}, slack = {}",
                if report.passed { "pass" } else { "FAIL" },
                report.lhs,
                report.rhs,
                report.slack
            );
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
        Command::CoveringDemo {
            seed,
            n,
            ecc_max,
            samples,
        } => {
            let (e, fam) = random_family(seed, n, ecc_max)?;
            let cert = vitali_select(&e, &fam, DEFAULT_MARGIN, None)?;
            let verification = verify_vitali(&cert, &e, samples, seed)?;
            eprintln!(
                "{} of {} diamonds selected over {} classes; verification {}",
                cert.selected.len(),
                fam.len(),
                cert.classes.iter().max().copied().unwrap_or(0),
                if verification.passed() { "passed" } else { "FAILED" }
            );
            #[derive(Serialize)]
            struct Demo {
                e: Vec<Vec<f64>>,
                certificate: lcoarea::covering::VitaliCertificate,
                verification: lcoarea::covering::VitaliVerification,
            }
            let ok = verification.passed();
            emit(
                &Demo {
                    e,
                    certificate: cert,
                    verification,
                },
                None,
            )?;
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Sprinkle {
            dim,
            intensity,
            seed,
            out,
        } => {
            let set = sprinkle(&SprinkleConfig::unit_diamond(dim, intensity, seed))?;
            emit(&set.to_coords_document()?, Some(&out))?;
            eprintln!("{} points", set.len());
        }
        Command::Density {
            space,
            s,
            epsilon,
            samples,
            per_point,
            seed,
            out,
        } => {
            let set = read_space(&space)?;
            let all: Vec<usize> = (0..set.len()).collect();
            let stat = density_diagnostic(&set, &all, s, epsilon, samples, per_point, seed, &ExactLimits::default())?;
            eprintln!("{} of {} checks violate the bound", stat.violations, stat.checked);
            emit(&stat, out.as_deref())?;
        }
        Command::RandomSuite { count, start, out } => {
            let seeds: Vec<u64> = (start..start + count).collect();
            let rows = run_random_suite(&seeds, &RandomShape::default(), &ChainOptions::default());
            let failed = rows.iter().filter(|r| !r.passed).count();
            eprintln!("{} of {} instances pass", rows.len() - failed, rows.len());
            let csv: Vec<CsvRow> = rows
                .iter()
                .flat_map(|r| {
                    let names = ["phi_bound_slack", "integral_bound_slack", "coarea_slack"];
                    names
                        .iter()
                        .zip(&r.slacks)
                        .map(|(n, v)| CsvRow::new(&format!("seed{}:{n}", r.seed), r.s, Some(r.t), r.delta, *v))
                        .collect::<Vec<_>>()
                })
                .collect();
            match out {
                Some(p) => {
                    emit(&rows, Some(&p))?;
                    std::fs::write(p.with_extension("csv"), to_csv(&csv))?;
                }
                None => emit(&rows, None)?,
            }
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("LCOAREA_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: LCOAREA_THREADS must be a positive integer, got `{v}`");
                return ExitCode::from(64);
            }
        }
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
