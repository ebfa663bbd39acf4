use clap::{Args, Parser, Subcommand};
use rgg_bench::run::batch_config;
use rgg_bench::{
    build_bundle, emit_report, load_bundle, quality::quality_prepared, run_prepared, BenchError, EngineChoice,
    Format, Mode, Prepared, Scenario,
};
use rgg_core::batch::BatchLayout;
use rgg_core::batch::SpatialGrid;
use rgg_core::roadmap::save_roadmap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rgg-bench", about = "Benchmarks for roadmap validity maintenance under moving obstacles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    scenario: PathBuf,
    /// Override the roadmap sampling seed.
    #[arg(long)]
    roadmap_seed: Option<u64>,
    /// Override the move script seed.
    #[arg(long)]
    move_seed: Option<u64>,
    /// Override the roadmap node count.
    #[arg(long)]
    nodes: Option<usize>,
    /// Override the number of moves.
    #[arg(long)]
    iterations: Option<usize>,
    /// Use a roadmap file written by `build` instead of sampling one.
    #[arg(long)]
    roadmap: Option<PathBuf>,
}

impl Common {
    fn scenario(&self) -> Result<Scenario, BenchError> {
        let mut s = Scenario::load(&self.scenario)?;
        if let Some(v) = self.roadmap_seed {
            s.roadmap.seed = v;
        }
        if let Some(v) = self.move_seed {
            s.moves.seed = v;
        }
        if let Some(v) = self.nodes {
            s.roadmap.nodes = v;
        }
        if let Some(v) = self.iterations {
            s.moves.iterations = v;
        }
        Ok(s)
    }

    fn prepare(&self, s: &Scenario) -> Result<Prepared, BenchError> {
        match &self.roadmap {
            Some(p) => load_bundle(s, p),
            None => build_bundle(s),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a roadmap, build its approximations and save them.
    Build {
        #[command(flatten)]
        common: Common,
        /// Output file.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Replay a scenario and write the per-move report.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        engine: Option<EngineChoice>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Disable the inner-approximation phase.
        #[arg(long)]
        no_under: bool,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compare sampled labels with the exact oracle.
    Quality {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        engine: Option<EngineChoice>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Components checked per move.
        #[arg(long, default_value_t = 100)]
        sample: usize,
    },
    /// Print the batch layout shapes, checksums and grid statistics.
    DumpLayout {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, BenchError> {
    match cli.command {
        Command::Build { common, out } => {
            let s = common.scenario()?;
            let p = build_bundle(&s)?;
            save_roadmap(&p.bundle.roadmap, &p.bundle.geometry, &out)?;
            eprintln!(
                "wrote {} ({} nodes, {} edges, {:.3} s)",
                out.display(),
                p.preprocess.nodes,
                p.preprocess.edges,
                p.preprocess.total_us() / 1e6
            );
        }
        Command::Run {
            common,
            engine,
            mode,
            no_under,
            format,
            out,
        } => {
            let mut s = common.scenario()?;
            s.engine = engine.unwrap_or(s.engine);
            s.mode = mode.unwrap_or(s.mode);
            s.under_phase &= !no_under;
            let report = run_prepared(&s, common.prepare(&s)?)?;
            emit_report(&report, format, out.as_deref())?;
        }
        Command::Quality {
            common,
            engine,
            mode,
            sample,
        } => {
            let mut s = common.scenario()?;
            s.engine = engine.unwrap_or(s.engine);
            s.mode = mode.unwrap_or(s.mode);
            let q = quality_prepared(&s, &common.prepare(&s)?, sample)?;
            print!("{}", q.pretty());
            if !q.is_sound() {
                eprintln!("error: labels contradict the exact oracle");
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::DumpLayout { common } => {
            let s = common.scenario()?;
            let p = common.prepare(&s)?;
            let layout = BatchLayout::serialize(&p.bundle.geometry, &s.obstacles()?, None)?;
            println!("N={} B={} S={} K={} M={} C={}", layout.n, layout.b, layout.s, layout.k, layout.m, layout.c);
            for ((name, dims, len), crc) in layout.shapes().into_iter().zip(layout.checksums()) {
                println!("{name:<14} {dims:?} len={len} crc32={crc:08x}");
            }
            let grid = SpatialGrid::build(&layout.component_aabb, &s.bounds(), batch_config(&s).cell_capacity)?;
            println!(
                "grid dims={:?} cell={:?} nonempty={} mean occupancy={:.2}",
                grid.dims(),
                grid.cell_size().to_array(),
                grid.nonempty_cells(),
                grid.mean_occupancy()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
