//! `locc`: build state sets and protocols, simulate and verify them.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use locc_core::builders::build_protocol;
use locc_core::engine::{simulate, verify_perfect, ProtocolTree};
use locc_core::families::{self, Family, StateSet};
use locc_core::linalg::tensor;
use locc_core::scalar::to_fraction_string;
use locc_core::{json, tiles, verification};
use serde_json::json;

mod sweep;
mod text;

#[derive(Parser)]
#[command(name = "locc", version, about = "Exact LOCC discrimination of orthogonal product states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Args)]
struct SetSource {
    /// State family: bipartite, example3, eq6, tripartite, even, odd.
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated dimensions, e.g. 4,5.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    /// Read the set from a JSON file instead.
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct TreeSource {
    /// Theorem selector: 1, 2, 3, 4, example1, example456.
    #[arg(long)]
    theorem: Option<String>,
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    /// Read the protocol from a JSON file instead.
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a state set.
    BuildSet {
        #[command(flatten)]
        src: SetSource,
        #[command(flatten)]
        out: Output,
    },
    /// Orthogonality, product structure, count audit and witness summary.
    CheckSet {
        #[command(flatten)]
        src: SetSource,
        #[command(flatten)]
        out: Output,
    },
    /// Construct a protocol tree.
    BuildProtocol {
        #[command(flatten)]
        src: TreeSource,
        #[command(flatten)]
        out: Output,
    },
    /// Simulate a protocol on the states of its set.
    RunProtocol {
        #[command(flatten)]
        src: TreeSource,
        /// Only this state.
        #[arg(long)]
        state: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Check perfect discrimination.
    VerifyProtocol {
        #[command(flatten)]
        src: TreeSource,
        /// Score each state on the post-selected resource branch only.
        #[arg(long)]
        post_selected: bool,
        #[command(flatten)]
        out: Output,
    },
    /// First-move indistinguishability witness for each party.
    Witness {
        #[command(flatten)]
        src: SetSource,
        #[arg(long)]
        party: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Text tile diagram of a set.
    RenderTiles {
        #[command(flatten)]
        src: SetSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a theorem's protocol over a dimension grid.
    Sweep {
        /// 1, 2 or 3.
        #[arg(long)]
        theorem: String,
        /// Largest dimension of the grid (the smallest is 4).
        #[arg(long, default_value_t = 6)]
        max: usize,
        #[arg(long)]
        post_selected: bool,
        #[command(flatten)]
        out: Output,
    },
}

/// Outcome of a command that ran to completion.
enum Status {
    Pass,
    /// A verification check failed.
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_set(src: &SetSource, default_family: Option<&str>) -> anyhow::Result<StateSet> {
    if let Some(p) = &src.input {
        if src.family.is_some() || !src.dims.is_empty() {
            bail!("--in cannot be combined with --family/--dims");
        }
        return json::from_str(&read(p)?).with_context(|| format!("invalid state set in {}", p.display()));
    }
    let family = src
        .family
        .as_deref()
        .or(default_family)
        .ok_or_else(|| anyhow!("either --family or --in is required"))?;
    Ok(families::build(Family::parse(family)?, &src.dims)?)
}

fn load_tree(src: &TreeSource) -> anyhow::Result<ProtocolTree> {
    if let Some(p) = &src.input {
        if src.theorem.is_some() || !src.dims.is_empty() {
            bail!("--in cannot be combined with --theorem/--dims");
        }
        return json::from_str(&read(p)?).with_context(|| format!("invalid protocol in {}", p.display()));
    }
    let theorem = src
        .theorem
        .as_deref()
        .ok_or_else(|| anyhow!("either --theorem or --in is required"))?;
    Ok(build_protocol(theorem, &src.dims)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: serde::Serialize>(out: &Output, value: &T, text: impl FnOnce() -> String) -> anyhow::Result<()> {
    let s = match out.format {
        Format::Json => json::to_string(value)?,
        Format::Text => text(),
    };
    emit(&out.out, &s)
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn run(cmd: Command) -> anyhow::Result<Status> {
    match cmd {
        Command::BuildSet { src, out } => {
            let set = load_set(&src, None)?;
            emit_json(&out, &set, || text::set(&set))?;
            Ok(Status::Pass)
        }
        Command::CheckSet { src, out } => {
            let set = load_set(&src, None)?;
            let check = verification::check_set(&set)?;
            emit_json(&out, &check, || text::check(&check))?;
            Ok(status(check.passed()))
        }
        Command::BuildProtocol { src, out } => {
            let tree = load_tree(&src)?;
            emit_json(&out, &tree, || text::tree(&tree))?;
            Ok(Status::Pass)
        }
        Command::RunProtocol { src, state, out } => {
            let tree = load_tree(&src)?;
            let set = tree.set.build()?;
            let resource = tree.resource.kets()?;
            let mut runs = serde_json::Map::new();
            for s in set.states() {
                if state.as_ref().is_some_and(|l| *l != s.label) {
                    continue;
                }
                let mut parts = vec![&s.ket];
                parts.extend(resource.iter());
                let hits = simulate(&tree, &tensor(&parts)?)?;
                let leaves: serde_json::Map<String, serde_json::Value> = hits
                    .into_iter()
                    .map(|(path, h)| {
                        (
                            path,
                            json!({
                                "declared": h.kind.as_str(),
                                "probability": to_fraction_string(&h.probability),
                                "in_postselection": h.in_postselection,
                            }),
                        )
                    })
                    .collect();
                runs.insert(s.label.clone(), leaves.into());
            }
            if let Some(l) = &state {
                if runs.is_empty() {
                    bail!("no state `{l}` in {}", set.family);
                }
            }
            let report = json!({
                "schema": locc_core::SCHEMA_VERSION,
                "protocol": tree.name,
                "runs": runs,
            });
            emit_json(&out, &report, || text::runs(&report))?;
            Ok(Status::Pass)
        }
        Command::VerifyProtocol { src, post_selected, out } => {
            let tree = load_tree(&src)?;
            let set = tree.set.build()?;
            let report = verify_perfect(&tree, &set, post_selected)?;
            emit_json(&out, &report, || text::report(&report))?;
            Ok(status(report.perfect))
        }
        Command::Witness { src, party, out } => {
            let set = load_set(&src, None)?;
            let parties = match party {
                Some(p) => vec![p],
                None => set.layout().parties(),
            };
            let results = parties
                .iter()
                .map(|p| verification::indistinguishability_witness(&set, p))
                .collect::<Result<Vec<_>, _>>()?;
            let value = json!({
                "schema": locc_core::SCHEMA_VERSION,
                "family": set.family,
                "params": set.params,
                "scope": verification::WITNESS_SCOPE,
                "witness": results,
            });
            emit_json(&out, &value, || text::witness(&results))?;
            Ok(Status::Pass)
        }
        Command::RenderTiles { src, out } => {
            let set = load_set(&src, Some("bipartite"))?;
            emit(&out, &tiles::render_tiles(&set)?)?;
            Ok(Status::Pass)
        }
        Command::Sweep {
            theorem,
            max,
            post_selected,
            out,
        } => sweep::run(&theorem, max, post_selected, &out),
    }
}
