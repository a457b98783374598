use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use intrinsim_cli::{
    cmd_poisson, cmd_project, cmd_simplify, cmd_stats, poisson_table, RunOptions, STATS_HEADER,
};

#[derive(Parser)]
#[command(
    name = "intrinsim",
    about = "Intrinsic simplification of triangle-mesh metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simplify an OBJ; writes the intrinsic mesh and the vertex mapping.
    Simplify {
        input: PathBuf,
        /// Curvature threshold: vertices with |kappa| strictly below it are
        /// removal candidates.
        #[arg(long)]
        kappa_max: f64,
        /// Where to write the simplified intrinsic mesh (default: input with
        /// extension .itm).
        #[arg(long)]
        output_mesh: Option<PathBuf>,
        /// Where to write the barycentric mapping (default: input with
        /// extension .map).
        #[arg(long)]
        output_mapping: Option<PathBuf>,
        /// Skip barycentric tracking of removed vertices.
        #[arg(long)]
        no_track: bool,
        /// Skip the initial whole-mesh Delaunay flip pass.
        #[arg(long)]
        no_initial_delaunay: bool,
        /// Tie-break order for equal-curvature candidates.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Simplify every OBJ in a directory at each threshold; prints CSV.
    Stats {
        corpus: PathBuf,
        /// Comma-separated list of curvature thresholds.
        #[arg(long, value_delimiter = ',', required = true)]
        kappa_max: Vec<f64>,
        /// Worker threads for the corpus (default: one per core).
        #[arg(long)]
        threads: Option<usize>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        no_track: bool,
        #[arg(long)]
        no_initial_delaunay: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rebuild approximate 3D positions for removed vertices and write the
    /// simplified mesh as OBJ over the original vertex ids.
    Project {
        mesh: PathBuf,
        mapping: PathBuf,
        original: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Transfer-error sweep: solve a spike Poisson problem on the original
    /// and on each simplified mesh; prints an MSE table.
    Poisson {
        input: PathBuf,
        /// Vertex carrying the unit spike.
        #[arg(long)]
        source: usize,
        /// Comma-separated list of curvature thresholds.
        #[arg(long, value_delimiter = ',', required = true)]
        kappa_max: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simplify {
            input,
            kappa_max,
            output_mesh,
            output_mapping,
            no_track,
            no_initial_delaunay,
            seed,
        } => {
            let mut options = RunOptions::new(kappa_max);
            options.track = !no_track;
            options.initial_delaunay = !no_initial_delaunay;
            options.seed = seed;
            let mesh_out = output_mesh.unwrap_or_else(|| input.with_extension("itm"));
            let mapping_out = output_mapping.unwrap_or_else(|| input.with_extension("map"));
            let row = cmd_simplify(&input, &options, &mesh_out, &mapping_out)?;
            println!("{STATS_HEADER}");
            println!("{}", row.csv());
        }
        Command::Stats {
            corpus,
            kappa_max,
            threads,
            output,
            no_track,
            no_initial_delaunay,
            seed,
        } => {
            // kappa_max here is a placeholder overridden per row.
            let mut options = RunOptions::new(0.0);
            options.track = !no_track;
            options.initial_delaunay = !no_initial_delaunay;
            options.seed = seed;
            let csv = cmd_stats(&corpus, &kappa_max, threads, &options)?;
            match output {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Project {
            mesh,
            mapping,
            original,
            output,
        } => {
            cmd_project(&mesh, &mapping, &original, &output)?;
        }
        Command::Poisson {
            input,
            source,
            kappa_max,
            seed,
        } => {
            let rows = cmd_poisson(&input, source, &kappa_max, seed)?;
            print!("{}", poisson_table(&rows));
        }
    }
    Ok(())
}
