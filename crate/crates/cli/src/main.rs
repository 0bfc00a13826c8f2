use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use tricover::certificate::{verify_certificate, Certificate};
use tricover::cover::{cover, CoverError, CoverOptions};
use tricover::generate::{family, Family};
use tricover::graph::Graph;
use tricover::io::{read_edge_list, write_edge_list};
use tricover::oracles::{nu_exact, tau_exact, tau_star_k_exact};
use tricover::order2::TailNaming;
use tricover::packing::{local_search_packing, DEFAULT_MAX_SWAP};

const VERIFY_FAILED: u8 = 2;
const REPAIR_EXHAUSTED: u8 = 3;
const INPUT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(
    name = "tricover",
    version,
    about = "Triangle packings and bounded fractional triangle covers"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Nu,
    Tau,
    Taustar2,
    Taustar3,
}

#[derive(Clone, Copy, ValueEnum)]
enum Naming {
    Smaller,
    Larger,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    /// Vertex count, or chain length for chain families.
    #[arg(long, default_value_t = 6)]
    size: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Local-search packing of an edge-list graph.
    Pack {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_SWAP)]
        max_swap: usize,
    },
    /// Cover of order k with total weight at most twice the packing size.
    Cover {
        file: PathBuf,
        #[arg(long)]
        order: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_SWAP)]
        max_swap: usize,
        #[arg(long, value_enum, default_value_t = Naming::Smaller)]
        tail_naming: Naming,
        /// Where to write the certificate.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-checks a certificate against a graph.
    Verify { file: PathBuf, cert: PathBuf },
    /// Exact values by exhaustive search.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum)]
        what: What,
    },
    /// CSV rows family,n,seed,nu,packing,sum_f,order,repairs,ms.
    Bench {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_SWAP)]
        max_swap: usize,
    },
    /// Writes a generated graph as an edge list.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

type Exit = Result<(), (u8, String)>;

fn input<E: ToString>(e: E) -> (u8, String) {
    (INPUT_ERROR, e.to_string())
}

fn load(path: &Path) -> Result<Graph, (u8, String)> {
    read_edge_list(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(out: Option<&Path>, text: &str) -> Exit {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Exit {
    match cli.cmd {
        Cmd::Pack { file, seed, max_swap } => {
            let g = load(&file)?;
            let p = local_search_packing(&g, seed, max_swap);
            println!("packing {}", p.len());
            for t in p.triangles() {
                let [a, b, c] = g.triangle(t).verts;
                println!("{a} {b} {c}");
            }
            Ok(())
        }
        Cmd::Cover {
            file,
            order,
            seed,
            max_swap,
            tail_naming,
            out,
        } => {
            let g = load(&file)?;
            let opts = CoverOptions {
                seed,
                max_swap,
                tail_naming: match tail_naming {
                    Naming::Smaller => TailNaming::SmallerFirst,
                    Naming::Larger => TailNaming::LargerFirst,
                },
                ..CoverOptions::default()
            };
            let r = match cover(&g, order, &opts) {
                Ok(r) => r,
                Err(CoverError::BadOrder(k)) => {
                    return Err(input(format!("order must be at least 2, got {k}")))
                }
                Err(e @ CoverError::RepairExhausted { .. }) => return Err((REPAIR_EXHAUSTED, e.to_string())),
            };
            println!(
                "packing {} sum_f {} budget {} repairs {}",
                r.packing.len(),
                r.f.total(),
                2 * r.packing.len(),
                r.log.len()
            );
            if let Some(out) = out {
                write(Some(&out), &Certificate::from_outcome(&g, &r).to_json())?;
            }
            if !r.report.ok() {
                return Err((VERIFY_FAILED, format!("{:?}", r.report)));
            }
            Ok(())
        }
        Cmd::Verify { file, cert } => {
            let g = load(&file)?;
            let text = fs::read_to_string(&cert).map_err(|e| input(format!("{}: {e}", cert.display())))?;
            let c = Certificate::from_json(&text).map_err(input)?;
            let r = verify_certificate(&g, &c).map_err(input)?;
            if r.ok() {
                println!("OK");
                return Ok(());
            }
            for &t in &r.failing {
                let [a, b, c] = g.triangle(t).verts;
                println!("uncovered {a} {b} {c}");
            }
            println!("budget_ok {} integrality_ok {}", r.budget_ok, r.integrality_ok);
            Err((VERIFY_FAILED, "certificate rejected".into()))
        }
        Cmd::Oracle { file, what } => {
            let g = load(&file)?;
            let v = match what {
                What::Nu => nu_exact(&g).map(|x| x.to_string()),
                What::Tau => tau_exact(&g).map(|x| x.to_string()),
                What::Taustar2 => tau_star_k_exact(&g, 2).map(|x| x.to_string()),
                What::Taustar3 => tau_star_k_exact(&g, 3).map(|x| x.to_string()),
            };
            println!("{}", v.map_err(input)?);
            Ok(())
        }
        Cmd::Bench {
            gen,
            trials,
            order,
            max_swap,
        } => {
            if order < 2 {
                return Err(input(format!("order must be at least 2, got {order}")));
            }
            println!("family,n,seed,nu,packing,sum_f,order,repairs,ms");
            let mut exhausted = 0;
            for seed in gen.seed..gen.seed + trials {
                let g = family(gen.family, gen.size, gen.p, seed);
                let nu = nu_exact(&g).map_or(String::new(), |x| x.to_string());
                let opts = CoverOptions {
                    seed,
                    max_swap,
                    ..CoverOptions::default()
                };
                let start = Instant::now();
                let res = cover(&g, order, &opts);
                let ms = start.elapsed().as_millis();
                let (packing, sum_f, repairs) = match res {
                    Ok(r) => (r.packing.len().to_string(), r.f.total().to_string(), r.log.len()),
                    Err(CoverError::RepairExhausted { log, .. }) => {
                        exhausted += 1;
                        (String::new(), "exhausted".to_string(), log.len())
                    }
                    Err(e) => return Err(input(e)),
                };
                println!(
                    "{},{},{seed},{nu},{packing},{sum_f},{order},{repairs},{ms}",
                    gen.family,
                    g.n()
                );
            }
            if exhausted > 0 {
                return Err((
                    REPAIR_EXHAUSTED,
                    format!("{exhausted} instance(s) exhausted repairs"),
                ));
            }
            Ok(())
        }
        Cmd::Gen { gen, out } => {
            let g = family(gen.family, gen.size, gen.p, gen.seed);
            write(out.as_deref(), &write_edge_list(&g))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
