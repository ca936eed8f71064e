use clap::{Args, Parser, Subcommand};
use serde_json::json;
use smod::error::Error;
use smod::modulus::{inner_sup_p, Method};
use smod::report::{fmt_sig, parse_grid, run_sweep, write_csv, FormulaKind};
use smod::space::{parse_vector, SpaceSpec, Vector};
use smod::srenorm::srenorm_witness;
use smod::witness::{
    bochner_witness, hilbert_delta, hilbert_witness, l1_canonicalize, l1_witness, lp2_witness,
    segment_pair, uc_witness,
};
use smod::BochnerVector;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "smod", about = "Perturbation-gap estimation on finite-dimensional normed spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeedArg {
    /// Base seed; falls back to SMOD_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArg {
    fn get(&self) -> u64 {
        self.seed
            .or_else(|| std::env::var("SMOD_SEED").ok().and_then(|s| s.parse().ok()))
            .unwrap_or(0)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a norm.
    Norm {
        #[arg(long)]
        space: String,
        #[arg(long)]
        vec: String,
    },
    /// Estimate sup_{||z|| <= a} | ||x+z||^p - ||y+z||^p | for a unit pair.
    Inner {
        #[arg(long)]
        space: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value = "witness")]
        method: String,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Sweep the pairwise infimum over a (d, a) grid and write a CSV report.
    Sweep {
        #[arg(long)]
        space: String,
        #[arg(long, value_name = "START:STOP:STEP")]
        d_grid: String,
        #[arg(long, value_name = "START:STOP:STEP")]
        a_grid: String,
        /// Closed-form comparison column: l1, hilbert2 or none.
        #[arg(long, default_value = "none")]
        formula: String,
        #[arg(long)]
        out: std::path::PathBuf,
        #[arg(long, default_value = "witness")]
        method: String,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Run one of the explicit witness constructions.
    Witness {
        #[command(subcommand)]
        construction: WitnessCmd,
    },
    /// Run a verification suite.
    Verify {
        /// One of hilbert, l1, thmC, plemma, ucremark, bochner, lp2, thmD, all.
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// Inner-product maximizer z = a(x-y)/||x-y|| (p = 2 gap).
    Hilbert {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        a: f64,
    },
    /// Uniform-convexity perturbation z = (a/d)(y-x) in l2.
    Uc {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        a: f64,
    },
    /// Canonical-pair construction on n equal atoms at distance d.
    L1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        a: f64,
    },
    /// Prefix-kill construction on an n-atom Bochner space.
    Bochner {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        inner: String,
        /// Inner-space unit vector repeated on every atom.
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        a: f64,
    },
    /// Two-point construction in lp^2, p > 2.
    Lp2 {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        a: f64,
    },
    /// Case machinery for the square-sum renorming of l1.
    Srenorm {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        a: f64,
    },
    /// Distance-d pair on a length-2 sphere segment [v, w].
    Segment {
        #[arg(long)]
        space: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
        #[arg(long)]
        d: f64,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        _ => 2,
    }
}

fn print_json(value: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
}

fn flat_pair(n: usize, d: f64) -> smod::Result<(Vec<f64>, Vector, Vector)> {
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2 atoms, got {n}")));
    }
    if !(0.0 < d && d < 2.0) {
        return Err(Error::Domain(format!("need 0 < d < 2, got {d}")));
    }
    let c = (2.0 + d) / 2.0;
    let half = n / 2;
    let mut f = vec![c; n];
    let mut g = vec![c - d; n];
    for i in half..n {
        f[i] = c - d;
        g[i] = c;
    }
    Ok((vec![1.0 / n as f64; n], Vector::new(f)?, Vector::new(g)?))
}

fn run(cli: Cli) -> smod::Result<u8> {
    match cli.command {
        Command::Norm { space, vec } => {
            let space = SpaceSpec::parse(&space)?;
            let v = parse_vector(&vec)?;
            println!("{}", fmt_sig(space.norm(&v)?, 12));
            Ok(0)
        }
        Command::Inner { space, x, y, a, p, method, seed } => {
            let space = SpaceSpec::parse(&space)?;
            let x = parse_vector(&x)?;
            let y = parse_vector(&y)?;
            let method: Method = method.parse()?;
            let est = inner_sup_p(&space, &x, &y, a, p, method, seed.get())?;
            print_json(json!({ "schema": 1, "estimate": est }));
            Ok(0)
        }
        Command::Sweep { space, d_grid, a_grid, formula, out, method, threads, seed } => {
            let space = SpaceSpec::parse(&space)?;
            let d = parse_grid(&d_grid)?;
            let a = parse_grid(&a_grid)?;
            let formula: FormulaKind = formula.parse()?;
            let method: Method = method.parse()?;
            let report = run_sweep(&space, &d, &a, formula, method, seed.get(), threads)?;
            let file = std::fs::File::create(&out)?;
            write_csv(&report, std::io::BufWriter::new(file))?;
            println!("wrote {} rows to {}", report.rows.len(), out.display());
            Ok(0)
        }
        Command::Witness { construction } => {
            let result = match construction {
                WitnessCmd::Hilbert { x, y, a } => {
                    hilbert_witness(&parse_vector(&x)?, &parse_vector(&y)?, a)?
                }
                WitnessCmd::Uc { x, y, a } => {
                    let x = parse_vector(&x)?;
                    let y = parse_vector(&y)?;
                    let space = SpaceSpec::L2 { n: x.len() };
                    uc_witness(&space, &x, &y, a, hilbert_delta)?
                }
                WitnessCmd::L1 { n, d, a } => {
                    let (w, f, g) = flat_pair(n, d)?;
                    let form = l1_canonicalize(&w, &f, &g)?;
                    l1_witness(&form, a)?
                }
                WitnessCmd::Bochner { n, inner, x, y, a } => {
                    let inner = SpaceSpec::parse(&inner)?;
                    let space = SpaceSpec::bochner(vec![1.0 / n as f64; n], inner)?;
                    let x = BochnerVector::constant(&parse_vector(&x)?, n);
                    let y = BochnerVector::constant(&parse_vector(&y)?, n);
                    bochner_witness(&space, &x, &y, a)?
                }
                WitnessCmd::Lp2 { p, d, a } => lp2_witness(p, d, a)?,
                WitnessCmd::Srenorm { x, y, a } => {
                    let x = parse_vector(&x)?;
                    let y = parse_vector(&y)?;
                    let space = SpaceSpec::SRenorm { n: x.len() };
                    let d = space.norm(&x.sub(&y))?;
                    srenorm_witness(&x, &y, a, d)?.0
                }
                WitnessCmd::Segment { space, v, w, d } => {
                    let space = SpaceSpec::parse(&space)?;
                    let pair = segment_pair(&space, &parse_vector(&v)?, &parse_vector(&w)?, d)?;
                    print_json(json!({ "schema": 1, "pair": pair }));
                    return Ok(0);
                }
            };
            print_json(json!({ "schema": 1, "witness": result }));
            Ok(0)
        }
        Command::Verify { suite, seed } => {
            let seed = seed.get();
            let results = if suite == "all" {
                smod::verify::run_all(seed)?
            } else {
                vec![smod::verify::run_suite(&suite, seed)?]
            };
            let passed = results.iter().all(|r| r.passed);
            print_json(json!({ "schema": 1, "seed": seed, "passed": passed, "suites": results }));
            Ok(if passed { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
