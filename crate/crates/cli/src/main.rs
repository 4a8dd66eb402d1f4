//! `vira`: run certificate jobs on descriptor files and replay certificates.
//!
//! Exit status: 0 pass, 1 verified failure, 2 usage error, window overflow or
//! undecided. Certificates go to `--out`, or to `$VIRA_REPORT_DIR/<job>.json`
//! (default `./reports`). A one-line JSON report is printed on stdout.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use vira_core::arith::scalar::parse_scalar;
use vira_core::certificate::{
    check_bracket_job, classify_job, exhibit_job, filtration_job, generate_job, separate_job, validate_v_job,
    witness_job, Certificate, Verdict,
};
use vira_core::expsolve::{ExpPolyStructure, SampleSet};
use vira_core::sampling::Sampler;
use vira_core::wire::{from_json_str, parse_descriptor, parse_vdescriptor};
use vira_core::{replay, Scalar, TensorDescriptor, VDescriptor, Window};

const REPORT_DIR_ENV: &str = "VIRA_REPORT_DIR";

#[derive(Parser)]
#[command(name = "vira", version, about = "Exact certificates for tensor-product non-weight Virasoro modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Certificate path (default: $VIRA_REPORT_DIR/<job>.json, else ./reports/<job>.json).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WindowArgs {
    /// Total ∂-degree of the window.
    #[arg(long, default_value_t = 2)]
    window: u32,
    /// Number of V basis vectors in the window.
    #[arg(long, default_value_t = 3)]
    v_window: usize,
    /// Largest |k| for direct applications of L_k.
    #[arg(long, default_value_t = 2)]
    k_bound: i64,
}

impl WindowArgs {
    fn window(&self) -> Result<Window> {
        if self.v_window == 0 || self.k_bound < 0 {
            bail!("--v-window must be positive and --k-bound nonnegative");
        }
        Ok(Window::new(self.window, self.v_window))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check bracket relations, injectivity of L̄_r and cyclicity on the V window.
    ValidateV {
        /// V descriptor file, or a full descriptor (its `v` is used).
        #[arg(long)]
        v: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Check [L_m, L_n] = (n − m) L_{m+n} on random probes.
    CheckBracket {
        #[arg(long)]
        descriptor: PathBuf,
        #[arg(long, default_value_t = 6)]
        mmax: i64,
        #[arg(long, default_value_t = 10)]
        probes: usize,
        /// Coordinatewise exponent bound of the probes.
        #[arg(long, default_value_t = 2)]
        probe_degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Separate an exponential-polynomial sample set given as JSON
    /// `{"structure": {"mus": [...], "degree_bound": k}, "samples": {"window": [...], "values": [[...], ...]}}`.
    Separate {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Reduce random seeds to degree 0 and generate the window from there.
    Witness {
        #[arg(long)]
        descriptor: PathBuf,
        /// Number of random seeds.
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        /// Coordinatewise exponent bound of the seeds.
        #[arg(long, default_value_t = 2)]
        seed_degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Generate the window from v_0 ⊗ 1.
    Generate {
        #[arg(long)]
        descriptor: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Check the V ⊗ W_s filtration of M(V, Ω(λ, α0)) ⊗ Ω(λ, α1).
    Filtration {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        alpha0: String,
        #[arg(long)]
        alpha1: String,
        #[arg(long, default_value_t = 3)]
        s_max: u32,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Exhibit a proper invariant subspace of a reducible descriptor.
    Exhibit {
        #[arg(long)]
        descriptor: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Decide isomorphism of two irreducible descriptors.
    Classify {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Recompute every step of a certificate and its verdict.
    Replay { certificate: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_descriptor(path: &Path) -> Result<TensorDescriptor> {
    parse_descriptor(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_v(path: &Path) -> Result<VDescriptor> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("in {}", path.display()))?;
    let parsed = if value.get("factor0").is_some() {
        parse_descriptor(&text).map(|d| d.v)
    } else {
        parse_vdescriptor(&text)
    };
    parsed.with_context(|| format!("in {}", path.display()))
}

fn scalar(flag: &str, s: &str) -> Result<Scalar> {
    parse_scalar(s).with_context(|| format!("--{flag}"))
}

fn default_path(job: &str) -> PathBuf {
    let dir = std::env::var_os(REPORT_DIR_ENV).map_or_else(|| PathBuf::from("reports"), PathBuf::from);
    dir.join(format!("{job}.json"))
}

/// Writes through a temporary file in the target directory and renames it into place.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    std::io::Write::write_all(&mut tmp, text.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn exit_for(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Undecided => 2,
    }
}

fn emit(cert: &Certificate, job: &str, output: &Output) -> Result<u8> {
    let path = output.out.clone().unwrap_or_else(|| default_path(job));
    write_atomic(&path, &serde_json::to_string_pretty(cert)?)?;
    let report = json!({
        "kind": cert.kind,
        "verdict": cert.verdict,
        "claim": cert.claim,
        "residual": cert.residual,
        "summary": cert.summary,
        "rng_seed": cert.rng_seed,
        "certificate": path.display().to_string(),
    });
    println!("{report}");
    eprintln!("{job}: {:?} (residual {})", cert.verdict, cert.residual);
    Ok(exit_for(cert.verdict))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::ValidateV { v, output } => emit(&validate_v_job(&load_v(&v)?)?, "validate-v", &output),
        Command::CheckBracket {
            descriptor,
            mmax,
            probes,
            probe_degree,
            seed,
            output,
        } => {
            let d = load_descriptor(&descriptor)?;
            let vw = d.v.window().min(3);
            let bound = vec![probe_degree; d.nvars()];
            let ps = Sampler::new(seed).elements(probes, &bound, vw, 3);
            emit(&check_bracket_job(&d, mmax, ps, seed)?, "check-bracket", &output)
        }
        Command::Separate { input, output } => {
            #[derive(serde::Deserialize)]
            struct Instance {
                structure: ExpPolyStructure,
                samples: SampleSet,
            }
            let inst: Instance = from_json_str(&read(&input)?).with_context(|| format!("in {}", input.display()))?;
            emit(&separate_job(&inst.structure, &inst.samples)?, "separate", &output)
        }
        Command::Witness {
            descriptor,
            seeds,
            seed_degree,
            seed,
            window,
            output,
        } => {
            let d = load_descriptor(&descriptor)?;
            let w = window.window()?;
            let bound = vec![seed_degree; d.nvars()];
            let vw = w.v_count(&d.v).min(d.v.window());
            let ss = Sampler::new(seed).elements(seeds, &bound, vw, 3);
            emit(&witness_job(&d, &ss, w, window.k_bound, Some(seed))?, "witness", &output)
        }
        Command::Generate {
            descriptor,
            window,
            output,
        } => {
            let d = load_descriptor(&descriptor)?;
            emit(&generate_job(&d, window.window()?, window.k_bound)?, "generate", &output)
        }
        Command::Filtration {
            v,
            lambda,
            alpha0,
            alpha1,
            s_max,
            window,
            output,
        } => {
            let v = load_v(&v)?;
            let cert = filtration_job(
                &v,
                &scalar("lambda", &lambda)?,
                &scalar("alpha0", &alpha0)?,
                &scalar("alpha1", &alpha1)?,
                s_max,
                window.window()?,
                window.k_bound,
            )?;
            emit(&cert, "filtration", &output)
        }
        Command::Exhibit {
            descriptor,
            window,
            output,
        } => {
            let d = load_descriptor(&descriptor)?;
            emit(&exhibit_job(&d, window.window()?, window.k_bound)?, "exhibit", &output)
        }
        Command::Classify {
            first,
            second,
            window,
            output,
        } => {
            let d1 = load_descriptor(&first)?;
            let d2 = load_descriptor(&second)?;
            emit(&classify_job(&d1, &d2, window.window()?, window.k_bound)?, "classify", &output)
        }
        Command::Replay { certificate } => {
            let cert: Certificate =
                from_json_str(&read(&certificate)?).with_context(|| format!("in {}", certificate.display()))?;
            let rep = replay(&cert)?;
            println!("{}", serde_json::to_string(&rep)?);
            eprintln!(
                "replay: {} steps, {} hash mismatches, verdict {}",
                rep.steps,
                rep.hash_mismatches.len() + rep.tampered_outputs.len(),
                if rep.verdict_matches { "reproduced" } else { "differs" }
            );
            Ok(if rep.pass { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
