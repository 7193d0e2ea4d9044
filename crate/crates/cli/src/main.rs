mod render;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use ec_core::chain::{CertificateFile, CERT_SCHEMA};
use ec_core::snf::sparse_invariant_factors;
use ec_core::tower::{auto_schedule, validate_schedule};
use ec_core::{
    balls_chain_connected, build_abelianized_cover, build_cover, check_discreteness, check_fibers, fold, run_tower,
    sample, search_homotopy, theta, universality_check, verify_certificate, Chain, Family, FiniteMetricSpace,
    PresentationAtScale, SamplerSpec, ScaleAnalysis, ScaleGraph, SearchOutcome, TowerConfig,
};
use report::*;

#[derive(Parser)]
#[command(
    name = "ec",
    version,
    args_override_self = true,
    about = "Deck groups of finite metric samples across scales"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the scale graph in DOT.
    Graph {
        #[command(flatten)]
        at: AtScale,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Search for or verify a homotopy certificate between two chains.
    Certify(CertifyArgs),
    /// Write the presentation at a scale.
    Present {
        #[command(flatten)]
        at: AtScale,
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long)]
        emit_json: Option<PathBuf>,
    },
    /// Single-scale invariants and the universality verdict.
    Analyze {
        #[command(flatten)]
        at: AtScale,
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long)]
        emit_json: Option<PathBuf>,
    },
    /// Truncated cover with the deck action checks.
    Cover {
        #[command(flatten)]
        at: AtScale,
        #[arg(long)]
        radius: usize,
        /// Use abelian fiber coordinates when the group is not certified free.
        #[arg(long)]
        abelianized: bool,
        /// Deck words up to this length are checked for discreteness.
        #[arg(long, default_value_t = 3)]
        check_words: usize,
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
        #[arg(long)]
        emit_json: Option<PathBuf>,
    },
    /// The map from a fine scale to a coarse one.
    Theta {
        #[arg(long, visible_alias = "space")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        coarse: f64,
        #[arg(long, allow_negative_numbers = true)]
        fine: f64,
        #[command(flatten)]
        tower: TowerArgs,
        /// Folded image graph.
        #[arg(long)]
        emit_dot: Option<PathBuf>,
        #[arg(long)]
        emit_json: Option<PathBuf>,
    },
    /// Groups and maps over a decreasing schedule of scales.
    Tower {
        #[arg(long, visible_alias = "space")]
        input: PathBuf,
        /// Comma-separated, strictly decreasing.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required_unless_present = "auto",
            conflicts_with = "auto"
        )]
        scales: Vec<f64>,
        /// Halve from half the diameter down to twice the smallest spacing.
        #[arg(long)]
        auto: bool,
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        emit_json: Option<PathBuf>,
        #[arg(long)]
        emit_svg: Option<PathBuf>,
    },
    /// Sample an example space.
    Generate {
        #[arg(long)]
        family: String,
        /// Stage, petal count or oscillation count.
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Largest spacing along a piece; defaults to a quarter of the smallest feature.
        #[arg(long, allow_negative_numbers = true)]
        density: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct AtScale {
    #[arg(long, visible_alias = "space")]
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    scale: f64,
}

#[derive(Args)]
struct TowerArgs {
    #[arg(long, default_value_t = 64)]
    budget: usize,
    #[arg(long, default_value_t = 3)]
    window: usize,
    #[arg(long, default_value_t = 3)]
    probe_length: usize,
    #[arg(long, default_value_t = 200_000)]
    probe_budget: u128,
}

impl TowerArgs {
    fn config(&self) -> TowerConfig {
        TowerConfig {
            pass_budget: self.budget,
            stabilization_window: self.window,
            probe_length: self.probe_length,
            probe_budget: self.probe_budget,
        }
    }
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, visible_alias = "space")]
    input: PathBuf,
    /// Required unless verifying, where it defaults to the certificate's scale.
    #[arg(long, allow_negative_numbers = true)]
    scale: Option<f64>,
    /// Chain as comma-separated point indices.
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    /// Verify this certificate file instead of searching.
    #[arg(long)]
    verify: Option<PathBuf>,
    /// Chains visited before the search gives up.
    #[arg(long, default_value_t = 200_000)]
    budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

const INVALID_CERTIFICATE: u8 = 2;
const INCONCLUSIVE: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors are validation errors; 2 is reserved for invalid certificates.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("EC_THREADS") else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("EC_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Graph { at, emit_dot } => {
            let graph = at.graph()?;
            emit(emit_dot.as_deref(), &render::graph_dot(&graph))?;
        }
        Command::Certify(args) => return certify(args),
        Command::Present { at, budget, emit_json } => {
            let pres = PresentationAtScale::new(Arc::new(at.graph()?));
            emit(emit_json.as_deref(), &to_json(&presentation_report(&pres, budget))?)?;
        }
        Command::Analyze { at, budget, emit_json } => {
            let space = Arc::new(load(&at.input)?);
            check_scale(at.scale)?;
            let a = ScaleAnalysis::new(space.clone(), at.scale, budget);
            let verdict = universality_check(&a.presentation, budget);
            log::info!("betti {} ({:?}), universality {:?}", a.betti(), a.certification(), verdict);
            let report = AnalysisReport {
                schema: ANALYSIS_SCHEMA,
                tool_version: TOOL_VERSION,
                space: SpaceDigest::of(&space),
                result: ScaleReport::of(&a),
                universality: (&verdict).into(),
            };
            emit(emit_json.as_deref(), &to_json(&report)?)?;
        }
        Command::Cover { at, radius, abelianized, check_words, budget, emit_dot, emit_json } => {
            let pres = PresentationAtScale::new(Arc::new(at.graph()?));
            let sim = pres.simplify(budget);
            let cover = if abelianized {
                build_abelianized_cover(&pres, &sim, radius)
            } else {
                build_cover(&pres, &sim, radius).context("rerun with --abelianized for an approximate cover")?
            };
            let discrete = check_discreteness(&cover, check_words);
            let fibers = (!abelianized).then(|| check_fibers(&cover, 2 * radius + 2));
            let report = CoverReport {
                schema: COVER_SCHEMA,
                tool_version: TOOL_VERSION,
                scale: at.scale,
                radius,
                mode: if abelianized { "abelianized" } else { "exact" },
                rank: cover.rank,
                vertices: cover.len(),
                edges: cover.edges().len(),
                max_word_length: cover.max_word_length(),
                words_checked: discrete.words_checked,
                pairs_checked: discrete.pairs_checked,
                violations: discrete.violations.len(),
                fiber_failures: fibers.map(|f| f.failures.len() + f.injectivity_failures.len()),
            };
            if let Some(path) = emit_dot {
                write_file(&path, &render::cover_dot(&cover))?;
            }
            emit(emit_json.as_deref(), &to_json(&report)?)?;
        }
        Command::Theta { input, coarse, fine, tower, emit_dot, emit_json } => {
            let space = Arc::new(load(&input)?);
            validate_schedule(&[coarse, fine])?;
            let config = tower.config();
            let (c, f) = (
                ScaleAnalysis::new(space.clone(), coarse, config.pass_budget),
                ScaleAnalysis::new(space, fine, config.pass_budget),
            );
            let t = theta(&c, &f, &config)?;
            let connected = balls_chain_connected(c.presentation.graph(), f.presentation.graph());
            if let Some(path) = emit_dot {
                ensure!(t.folding.is_some(), "the folded graph needs both groups certified free");
                write_file(&path, &render::folded_dot(&fold(&t.images, c.simplification.rank())))?;
            }
            let report = ThetaReport {
                schema: THETA_SCHEMA,
                tool_version: TOOL_VERSION,
                coarse: ScaleReport::of(&c),
                fine: ScaleReport::of(&f),
                map: MapReport::of(&t, Some(connected)),
            };
            emit(emit_json.as_deref(), &to_json(&report)?)?;
        }
        Command::Tower { input, scales, auto, tower, emit_json, emit_svg } => {
            let space = Arc::new(load(&input)?);
            let schedule = if auto { auto_schedule(&space) } else { scales };
            let t = run_tower(space.clone(), &schedule, &tower.config())?;
            if let Some(path) = emit_svg {
                write_file(&path, &render::tower_svg(&t))?;
            }
            emit(emit_json.as_deref(), &to_json(&TowerReport::of(&space, &t))?)?;
        }
        Command::Generate { family, level, density, out } => {
            let family = Family::from_name(&family, level)?;
            let spec = match density {
                Some(h) => SamplerSpec::new(family, h),
                None => SamplerSpec::at_reference_density(family),
            };
            let space = sample(&spec)?;
            emit(out.as_deref(), &(space.to_json() + "\n"))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

impl AtScale {
    fn graph(&self) -> Result<ScaleGraph> {
        let space = load(&self.input)?;
        check_scale(self.scale)?;
        Ok(ScaleGraph::new(Arc::new(space), self.scale))
    }
}

fn check_scale(scale: f64) -> Result<()> {
    ensure!(scale > 0.0 && scale.is_finite(), "scale must be a positive finite number, got {scale}");
    Ok(())
}

fn load(path: &Path) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::load(path).with_context(|| format!("reading {}", path.display()))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes to `path`, or to stdout without one.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_chain(graph: &ScaleGraph, text: &str) -> Result<Chain> {
    let vertices = text
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().with_context(|| format!("bad point index {s:?} in chain")))
        .collect::<Result<Vec<_>>>()?;
    Chain::new(graph, vertices).with_context(|| format!("chain {text:?}"))
}

fn presentation_report(pres: &PresentationAtScale, budget: usize) -> PresentationReport {
    let group = pres.group();
    let rank = sparse_invariant_factors(&group.relator_rows(), group.generators()).len();
    let sim = pres.simplify(budget);
    PresentationReport {
        schema: PRESENTATION_SCHEMA,
        tool_version: TOOL_VERSION,
        scale: pres.scale(),
        basepoint: pres.basepoint(),
        generators: pres.generators().to_vec(),
        relators: group.relators().iter().map(|w| w.to_signed()).collect(),
        rank_upper: group.generators() - rank,
        simplified: SimplifiedReport {
            survivors: sim.survivors.clone(),
            relators: sim.group.relators().iter().map(|w| w.to_signed()).collect(),
            certification: sim.certification,
            passes: sim.passes,
        },
    }
}

fn certify(args: CertifyArgs) -> Result<ExitCode> {
    let space = Arc::new(load(&args.input)?);
    if let Some(path) = &args.verify {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: CertificateFile = match serde_json::from_str(&text) {
            Ok(f) => f,
            Err(e) => return invalid(format!("{}: {e}", path.display())),
        };
        if file.schema != CERT_SCHEMA {
            return invalid(format!("unsupported certificate schema {:?}", file.schema));
        }
        let scale = args.scale.unwrap_or(file.scale);
        check_scale(scale)?;
        if scale != file.scale {
            bail!("certificate is for scale {}, not {scale}", file.scale);
        }
        let graph = ScaleGraph::new(space, scale);
        let end = match verify_certificate(&graph, &file.certificate()) {
            Ok(end) => end,
            Err(e) => return invalid(e.to_string()),
        };
        let from = args.from.as_deref().map(|t| parse_chain(&graph, t)).transpose()?;
        let to = args.to.as_deref().map(|t| parse_chain(&graph, t)).transpose()?;
        if from.is_some_and(|c| c != file.start) {
            return invalid("certificate starts elsewhere".into());
        }
        if to.as_ref().or(file.end.as_ref()).is_some_and(|c| *c != end) {
            return invalid(format!("certificate ends at {:?}", end.vertices()));
        }
        println!("{}", serde_json::json!({ "verified": true, "moves": file.moves.len(), "end": end }));
        return Ok(ExitCode::SUCCESS);
    }
    let scale = args.scale.ok_or_else(|| anyhow!("--scale is required unless verifying"))?;
    check_scale(scale)?;
    let graph = ScaleGraph::new(space, scale);
    let (Some(from), Some(to)) = (&args.from, &args.to) else { bail!("--from and --to are required unless verifying") };
    let (a, b) = (parse_chain(&graph, from)?, parse_chain(&graph, to)?);
    match search_homotopy(&graph, &a, &b, args.budget)? {
        SearchOutcome::Found(cert) => {
            let file = CertificateFile::new(scale, &cert, Some(b));
            emit(args.out.as_deref(), &to_json(&file)?)?;
            Ok(ExitCode::SUCCESS)
        }
        SearchOutcome::NotFoundWithinBudget { explored } => {
            eprintln!("no certificate found among {explored} chains; this does not show the chains are inequivalent");
            Ok(ExitCode::from(INCONCLUSIVE))
        }
    }
}

fn invalid(message: String) -> Result<ExitCode> {
    eprintln!("invalid certificate: {message}");
    Ok(ExitCode::from(INVALID_CERTIFICATE))
}
