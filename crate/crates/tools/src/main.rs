use std::path::PathBuf;
use std::process::ExitCode;

use chang_core::fourier::{dft, parseval_gap, DensityMap, MapKind};
use chang_core::oracle;
use chang_core::Complex64;
use chang_tools::error::{ToolError, EXIT_CONFIG, EXIT_OK, EXIT_VERIFY};
use chang_tools::formats::{parse_group, to_json};
use chang_tools::generators::SetGeneratorSpec;
use chang_tools::run::verify_file;
use chang_tools::sweep::{SweepFamily, SweepSpec};
use chang_tools::{run, RunConfig, RunOutcome, Variant};
use clap::{Args, Parser, Subcommand};
use rand::Rng;

#[derive(Parser)]
#[command(name = "chang", version, about = "Build and check Chang-type spectral certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `p^n` or `m1xm2x...`.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `first` or `max`.
    #[arg(long)]
    policy: Option<String>,
    /// Directory for artifacts; without it the main artifact goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include per-step phases and test functions.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// Random set of this density (seeded by --seed).
    #[arg(long, group = "set")]
    density: Option<f64>,
    /// Explicit canonical indices, comma separated.
    #[arg(long, group = "set", value_delimiter = ',')]
    elements: Option<Vec<usize>>,
    /// Subspace basis rows, e.g. `1,0,0;0,1,1`.
    #[arg(long, group = "set")]
    subspace: Option<String>,
    /// Shift turning --subspace into a coset, e.g. `0,0,1`.
    #[arg(long, requires = "subspace")]
    shift: Option<String>,
    /// Hamming ball of this radius (groups 2^n).
    #[arg(long, group = "set")]
    hamming: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Refined Chang subspace over F_p^n.
    Refine {
        #[command(flatten)]
        common: Common,
        /// Run the single-direction general refinement on 1_A / alpha instead.
        #[arg(long)]
        r1: bool,
    },
    /// Dissociated-set certificates over any finite abelian group.
    Abelian {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        classical: bool,
        /// Cap on 2^r * |G| weight entries.
        #[arg(long, env = "CHANG_WEIGHT_BUDGET")]
        weight_budget: Option<u64>,
    },
    /// Counting-lemma checks on W = V^perp.
    Count {
        #[command(flatten)]
        common: Common,
        /// Only the unweighted comparison.
        #[arg(long)]
        classical: bool,
        /// Random quadruples per weight kind.
        #[arg(long)]
        quadruples: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Brute-force cross-checks of the fast transforms.
    #[command(hide = true)]
    Oracle {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
    /// Achieved dim V against the bound over a grid (2^n families).
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long = "eps-grid", value_delimiter = ',')]
        eps_grid: Vec<f64>,
    },
    /// Re-verify a certificate JSON file.
    Verify {
        certificate: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn parse_row(s: &str) -> Result<Vec<u32>, ToolError> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| ToolError::config(format!("bad coordinate {t:?}"))))
        .collect()
}

fn build_config(common: &Common, variant: Variant) -> Result<RunConfig, ToolError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let cfg = RunConfig::load(path)?;
            if cfg.variant != variant && !compatible(cfg.variant, variant) {
                return Err(ToolError::config(format!(
                    "config variant {:?} does not belong to this subcommand",
                    cfg.variant
                )));
            }
            cfg
        }
        None => RunConfig::new(variant),
    };
    cfg.apply_env()?;
    if let Some(g) = &common.group {
        cfg.group = Some(g.clone());
    }
    if let Some(e) = common.eps {
        cfg.eps = Some(e);
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(p) = &common.policy {
        cfg.policy = p.clone();
    }
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    if common.trace {
        cfg.trace = true;
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    if let Some(d) = common.density {
        cfg.generator = Some(SetGeneratorSpec::RandomDensity { density: d, seed: cfg.seed });
    }
    if let Some(e) = &common.elements {
        cfg.generator = Some(SetGeneratorSpec::Explicit { elements: e.clone() });
    }
    if let Some(s) = &common.subspace {
        let basis = s.split(';').map(parse_row).collect::<Result<Vec<_>, _>>()?;
        cfg.generator = Some(match &common.shift {
            Some(shift) => SetGeneratorSpec::Coset {
                basis,
                shift: parse_row(shift)?,
            },
            None => SetGeneratorSpec::Subspace { basis },
        });
    }
    if let Some(r) = common.hamming {
        cfg.generator = Some(SetGeneratorSpec::HammingBall { radius: r });
    }
    Ok(cfg)
}

/// Subcommands accept any variant of their own family.
fn compatible(file: Variant, cmd: Variant) -> bool {
    use Variant::*;
    matches!(
        (file, cmd),
        (FpnRefined | FpnR1Remark, FpnRefined | FpnR1Remark)
            | (AbelianClassical | AbelianRefined, AbelianClassical | AbelianRefined)
            | (CountingClassical | CountingLocalized, CountingClassical | CountingLocalized)
    )
}

fn finish(outcome: RunOutcome, out: Option<&PathBuf>) -> Result<i32, ToolError> {
    match out {
        Some(dir) => outcome.write_to(dir)?,
        None => {
            if let Some(a) = outcome.artifacts.first() {
                print!("{}", a.contents);
            }
        }
    }
    eprintln!("{} [{}]", outcome.summary, if outcome.passed { "PASS" } else { "FAIL" });
    Ok(outcome.exit_code())
}

fn oracle_check(group: &str, seed: u64, samples: usize) -> Result<i32, ToolError> {
    let spec = parse_group(group)?;
    let mut rng = chang_tools::seeds::stream(seed, 0);
    let mut dft_err = 0.0f64;
    let mut lambda_err = 0.0f64;
    let mut parseval = 0.0f64;
    let direct = spec.order() <= oracle::LAMBDA4_DIRECT_CAP;
    for _ in 0..samples {
        let maps: Vec<DensityMap> = (0..4)
            .map(|_| {
                let v = (0..spec.order())
                    .map(|_| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
                    .collect();
                DensityMap::new(&spec, v, MapKind::Generic)
            })
            .collect::<Result<_, _>>()?;
        let fast = dft(&maps[0]);
        let slow = oracle::dft_naive(&maps[0])?;
        let scale = slow.values().iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (a, b) in fast.values().iter().zip(slow.values()) {
            dft_err = dft_err.max((a - b).norm() / scale);
        }
        parseval = parseval.max(parseval_gap(&maps[0]));
        if direct {
            let f = chang_core::counting::lambda4(&maps[0], &maps[1], &maps[2], &maps[3])?;
            let d = oracle::lambda4_direct([&maps[0], &maps[1], &maps[2], &maps[3]])?;
            lambda_err = lambda_err.max((f - d).norm() / d.norm());
        }
    }
    let passed = dft_err <= 1e-10 && lambda_err <= 1e-9 && parseval <= 1e-10;
    let report = serde_json::json!({
        "group": spec.to_string(),
        "samples": samples,
        "dft_max_relative_error": dft_err,
        "lambda4_max_relative_error": if direct { Some(lambda_err) } else { None },
        "parseval_max_gap": parseval,
        "passed": passed,
    });
    print!("{}", to_json(&report)?);
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
}

fn dispatch(cli: Cli) -> Result<i32, ToolError> {
    match cli.cmd {
        Cmd::Refine { common, r1 } => {
            let mut cfg = build_config(&common, Variant::FpnRefined)?;
            if r1 {
                cfg.variant = Variant::FpnR1Remark;
            }
            finish(run(&cfg)?, cfg.out.as_ref())
        }
        Cmd::Abelian {
            common,
            classical,
            weight_budget,
        } => {
            let mut cfg = build_config(&common, Variant::AbelianRefined)?;
            if classical {
                cfg.variant = Variant::AbelianClassical;
            }
            if weight_budget.is_some() {
                cfg.weight_budget = weight_budget;
            }
            finish(run(&cfg)?, cfg.out.as_ref())
        }
        Cmd::Count {
            common,
            classical,
            quadruples,
            restarts,
        } => {
            let mut cfg = build_config(&common, Variant::CountingLocalized)?;
            if classical {
                cfg.variant = Variant::CountingClassical;
            }
            if let Some(q) = quadruples {
                cfg.quadruples = q;
            }
            if let Some(r) = restarts {
                cfg.adversary_restarts = r;
            }
            finish(run(&cfg)?, cfg.out.as_ref())
        }
        Cmd::Oracle { group, seed, samples } => oracle_check(&group, seed, samples),
        Cmd::Sweep { common, n, eps_grid } => {
            let mut cfg = build_config(&common, Variant::TightnessSweep)?;
            if cfg.sweep.is_none() || !n.is_empty() || !eps_grid.is_empty() {
                let base = cfg.sweep.take().unwrap_or(SweepSpec {
                    p: 2,
                    n: vec![8, 9, 10],
                    eps: vec![0.3, 0.5, 0.7],
                    families: vec![SweepFamily::HammingBall { radius_divisor: 4 }],
                });
                cfg.sweep = Some(SweepSpec {
                    n: if n.is_empty() { base.n } else { n },
                    eps: if eps_grid.is_empty() { base.eps } else { eps_grid },
                    ..base
                });
            }
            finish(run(&cfg)?, cfg.out.as_ref())
        }
        Cmd::Verify { certificate, threads } => finish(verify_file(&certificate, threads)?, None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { EXIT_OK as u8 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("chang: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
