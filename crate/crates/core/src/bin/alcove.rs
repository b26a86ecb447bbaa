use alcove_sheaves::cli::{self, Format, GraphKind, GraphSpec, KlFlavor, Report, Ring, RunConfig};
use alcove_sheaves::Error;
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "alcove", version, about = "Braden-MacPherson sheaves on affine moment graphs")]
struct Cli {
    /// JSON RunConfig; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    /// Root system label, e.g. A1, A2, B2.
    #[arg(long = "type", global = true)]
    type_label: Option<String>,
    #[arg(long, global = true)]
    cutoff: Option<i32>,
    /// Largest Coxeter length allowed.
    #[arg(long, global = true)]
    budget: Option<i64>,
    /// Alcove window `LO..HI`, e.g. `minus:0..plus:1`.
    #[arg(long, global = true)]
    window: Option<String>,
    /// text, json, csv or dot.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Coefficient ring: labels or full.
    #[arg(long, global = true)]
    ring: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GraphArgs {
    /// bruhat, alcove or coset.
    #[arg(long, default_value = "bruhat")]
    graph: String,
    /// Top element of an interval graph.
    #[arg(long)]
    top: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// KL polynomials below an element.
    Kl {
        #[arg(long)]
        top: String,
        /// regular, spherical or antispherical.
        #[arg(long, default_value = "regular")]
        flavor: String,
    },
    /// Build and check an indecomposable BM sheaf.
    Bm {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        skyscraper: bool,
    },
    /// Act by a Bott-Samelson word.
    Act {
        /// `B:X`, `X` or `sky:X`.
        #[arg(long)]
        sheaf: String,
        #[arg(long, default_value = "e")]
        word: String,
    },
    /// Character in the periodic module.
    Ch {
        #[arg(long)]
        sheaf: String,
        /// Also check the law for this wall.
        #[arg(long)]
        check: Option<usize>,
    },
    Hom {
        #[command(subcommand)]
        what: HomCmd,
    },
    /// Write the moment graph.
    Export {
        /// dot or json.
        kind: String,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Randomized checks of the wall-crossing laws.
    Check {
        #[arg(long, default_value_t = 20)]
        instances: usize,
    },
}

#[derive(Subcommand)]
enum HomCmd {
    /// Hom dimension on growing windows.
    Scan {
        #[arg(long, default_value = "e")]
        from: String,
        #[arg(long, default_value = "e")]
        to: String,
        #[arg(long, default_value = "e")]
        base: String,
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
    /// Graded rank of Hom and the dimension in one degree.
    Grk {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        degree: i32,
    },
}

fn config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(t) = &cli.type_label {
        cfg.type_label = t.clone();
    }
    if cli.cutoff.is_some() {
        cfg.cutoff = cli.cutoff;
    }
    if let Some(b) = cli.budget {
        cfg.budget = b;
    }
    if cli.window.is_some() {
        cfg.window = cli.window.clone();
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse()?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(r) = &cli.ring {
        cfg.ring = match r.as_str() {
            "labels" => Ring::Labels,
            "full" => Ring::Full,
            _ => return Err(Error::Invalid(format!("unknown ring {r:?}"))),
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn graph_spec(g: &GraphArgs) -> Result<GraphSpec, Error> {
    Ok(GraphSpec { kind: g.graph.parse::<GraphKind>()?, top: g.top.clone() })
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let cfg = config(cli)?;
    match &cli.cmd {
        Cmd::Kl { top, flavor } => cli::cmd_kl(&cfg, top, flavor.parse::<KlFlavor>()?),
        Cmd::Bm { graph, vertex, skyscraper } => cli::cmd_bm(&cfg, &graph_spec(graph)?, vertex, *skyscraper),
        Cmd::Act { sheaf, word } => cli::cmd_act(&cfg, sheaf, &cli::parse_word(word)?),
        Cmd::Ch { sheaf, check } => cli::cmd_ch(&cfg, sheaf, *check),
        Cmd::Hom { what: HomCmd::Scan { from, to, base, steps } } => cli::cmd_hom_scan(&cfg, from, to, base, *steps),
        Cmd::Hom { what: HomCmd::Grk { graph, from, to, degree } } => cli::cmd_hom_grk(&cfg, &graph_spec(graph)?, from, to, *degree),
        Cmd::Export { kind, graph } => cli::cmd_export(&cfg, &graph_spec(graph)?, kind.parse::<Format>()?),
        Cmd::Check { instances } => cli::cmd_check(&cfg, *instances),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.text.as_bytes());
            if report.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error[check_failed]: a verification in the report failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind(), e);
            ExitCode::from(if e.is_resource() { 3 } else { 2 })
        }
    }
}
