//! Implementations behind the `intrinsim` binary, callable in-process so
//! tests can drive them without spawning the executable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use intrinsim::io;
use intrinsim::simplify::{simplify, SimplifyConfig, SimplifyReport};
use intrinsim::{poisson_transfer_mse, IntrinsicMesh, VertexId};

/// Column set of the stats CSV; one row per (mesh, threshold) pair.
pub const STATS_HEADER: &str = "name,kappa_max,vertices_before,vertices_after,removable_pct,\
removed_pct,remove_seconds,track_seconds,total_seconds";

/// One line of the corpus report: sizes, the fraction of vertices under the
/// curvature threshold, the success rate among processed candidates, and the
/// remove/track wall-clock split.
#[derive(Debug, Clone)]
pub struct StatsRow {
    pub name: String,
    pub kappa_max: f64,
    pub vertices_before: usize,
    pub vertices_after: usize,
    pub removable_pct: f64,
    pub removed_pct: f64,
    pub remove_seconds: f64,
    pub track_seconds: f64,
    pub total_seconds: f64,
}

impl StatsRow {
    pub fn from_report(name: impl Into<String>, kappa_max: f64, report: &SimplifyReport) -> Self {
        let removable_pct = if report.vertices_before == 0 {
            0.0
        } else {
            100.0 * report.removable_initial as f64 / report.vertices_before as f64
        };
        // No candidates means nothing failed; report a clean 100.
        let removed_pct = if report.candidates_encountered == 0 {
            100.0
        } else {
            100.0 * report.removed as f64 / report.candidates_encountered as f64
        };
        StatsRow {
            name: name.into(),
            kappa_max,
            vertices_before: report.vertices_before,
            vertices_after: report.vertices_after,
            removable_pct,
            removed_pct,
            remove_seconds: report.remove_seconds,
            track_seconds: report.track_seconds,
            total_seconds: report.total_seconds,
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.name,
            self.kappa_max,
            self.vertices_before,
            self.vertices_after,
            self.removable_pct,
            self.removed_pct,
            self.remove_seconds,
            self.track_seconds,
            self.total_seconds
        )
    }
}

/// Simplification switches shared by every subcommand that runs the pipeline.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub kappa_max: f64,
    pub track: bool,
    pub initial_delaunay: bool,
    pub seed: Option<u64>,
}

impl RunOptions {
    pub fn new(kappa_max: f64) -> Self {
        RunOptions {
            kappa_max,
            track: true,
            initial_delaunay: true,
            seed: None,
        }
    }

    fn config(&self) -> SimplifyConfig {
        let mut config = SimplifyConfig::new(self.kappa_max);
        config.track_mappings = self.track;
        config.initial_delaunay = self.initial_delaunay;
        config.seed = self.seed;
        config
    }
}

fn mesh_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "mesh".into())
}

fn build_mesh(path: &Path) -> Result<IntrinsicMesh> {
    let (positions, faces) =
        io::load_obj(path).with_context(|| format!("reading {}", path.display()))?;
    IntrinsicMesh::build_from_extrinsic(&positions, &faces)
        .with_context(|| format!("building mesh from {}", path.display()))
}

/// Simplify one OBJ and write the intrinsic mesh plus the mapping next to
/// it. Returns the stats row the binary prints.
pub fn cmd_simplify(
    input: &Path,
    options: &RunOptions,
    mesh_out: &Path,
    mapping_out: &Path,
) -> Result<StatsRow> {
    let mut mesh = build_mesh(input)?;
    let outcome = simplify(&mut mesh, &options.config())?;
    let (mesh_text, renumbering) = io::itm_string(&mesh);
    std::fs::write(mesh_out, mesh_text)
        .with_context(|| format!("writing {}", mesh_out.display()))?;
    // Without tracking the mapping file is written empty, so the output pair
    // always exists together.
    let mapping_text = outcome
        .mapping
        .as_ref()
        .map(|m| io::mapping_string(m, &renumbering))
        .unwrap_or_default();
    std::fs::write(mapping_out, mapping_text)
        .with_context(|| format!("writing {}", mapping_out.display()))?;
    Ok(StatsRow::from_report(
        mesh_name(input),
        options.kappa_max,
        &outcome.report,
    ))
}

/// Run the corpus: every `.obj` in the directory at every threshold, in
/// parallel. Per-mesh failures go to standard error and the run continues.
/// Rows come back sorted by (name, threshold), so aggregation does not
/// depend on scheduling.
pub fn cmd_stats(
    corpus: &Path,
    kappas: &[f64],
    threads: Option<usize>,
    options: &RunOptions,
) -> Result<String> {
    let mut inputs: Vec<PathBuf> = std::fs::read_dir(corpus)
        .with_context(|| format!("reading directory {}", corpus.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj")))
        .collect();
    inputs.sort();

    let tasks: Vec<(PathBuf, f64)> = inputs
        .iter()
        .flat_map(|p| kappas.iter().map(move |&k| (p.clone(), k)))
        .collect();

    let run_one = |(path, kappa): &(PathBuf, f64)| -> Option<StatsRow> {
        let work = || -> Result<StatsRow> {
            let mut mesh = build_mesh(path)?;
            let mut opts = options.clone();
            opts.kappa_max = *kappa;
            let outcome = simplify(&mut mesh, &opts.config())?;
            Ok(StatsRow::from_report(
                mesh_name(path),
                *kappa,
                &outcome.report,
            ))
        };
        match work() {
            Ok(row) => Some(row),
            Err(e) => {
                eprintln!("skipping {} at kappa_max {kappa}: {e:#}", path.display());
                None
            }
        }
    };

    use rayon::prelude::*;
    let mut rows: Vec<StatsRow> = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building thread pool")?
            .install(|| tasks.par_iter().filter_map(run_one).collect()),
        None => tasks.par_iter().filter_map(run_one).collect(),
    };
    rows.sort_by(|a, b| {
        a.name
            .cmp(&b.name)
            .then(a.kappa_max.total_cmp(&b.kappa_max))
    });

    let mut out = String::from(STATS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv());
        out.push('\n');
    }
    Ok(out)
}

/// Place every vertex of the original mesh in 3D: surviving vertices keep
/// their original positions, tracked removed vertices get their barycentrics
/// applied to the host face's corner positions, and untracked removed
/// vertices fall back to their original positions. Emits the simplified face
/// list over original vertex ids.
pub fn cmd_project(
    mesh_path: &Path,
    mapping_path: &Path,
    original_path: &Path,
    output: &Path,
) -> Result<()> {
    let mesh =
        io::load_itm(mesh_path).with_context(|| format!("reading {}", mesh_path.display()))?;
    let (positions, _) = io::load_obj(original_path)
        .with_context(|| format!("reading {}", original_path.display()))?;
    let capacity = mesh.complex().vertex_capacity();
    if positions.len() != capacity {
        bail!(
            "vertex count mismatch: {} has {} vertices, {} expects {capacity}",
            original_path.display(),
            positions.len(),
            mesh_path.display()
        );
    }
    let entries = io::load_mapping(mapping_path, &mesh)
        .with_context(|| format!("reading {}", mapping_path.display()))?;

    let mut projected = positions.clone();
    for (v, point) in &entries {
        if mesh.complex().vertex_alive(*v) {
            bail!("mapping entry for vertex {v} which is still in the mesh");
        }
        let corners = mesh.complex().face_vertices(point.face);
        let mut p = [0.0; 3];
        for (corner, w) in corners.iter().zip(point.coords) {
            for (axis, c) in p.iter_mut().zip(positions[corner.0]) {
                *axis += w * c;
            }
        }
        projected[v.0] = p;
    }

    let faces: Vec<[usize; 3]> = mesh
        .complex()
        .faces()
        .map(|f| {
            let [a, b, c] = mesh.complex().face_vertices(f);
            [a.0, b.0, c.0]
        })
        .collect();
    std::fs::write(output, io::obj_string(&projected, &faces))
        .with_context(|| format!("writing {}", output.display()))?;
    Ok(())
}

/// One row of the transfer-error table.
#[derive(Debug, Clone)]
pub struct PoissonRow {
    pub kappa_max: f64,
    pub removed: usize,
    pub mse: Result<f64, String>,
}

pub const POISSON_HEADER: &str = "kappa_max,removed,mse";

impl PoissonRow {
    pub fn csv(&self) -> String {
        match &self.mse {
            Ok(v) => format!("{},{},{}", self.kappa_max, self.removed, v),
            Err(e) => format!(
                "{},{},{}",
                self.kappa_max,
                self.removed,
                e.replace(',', ";")
            ),
        }
    }
}

/// Sweep thresholds: simplify a copy of the mesh at each one, solve the
/// Poisson problem for a unit spike at `source` on both meshes, and report
/// the mean squared transfer error. Initial Delaunay flips are off here so
/// the zero-threshold row compares a mesh against itself.
pub fn cmd_poisson(
    input: &Path,
    source: usize,
    kappas: &[f64],
    seed: Option<u64>,
) -> Result<Vec<PoissonRow>> {
    let original = build_mesh(input)?;
    let capacity = original.complex().vertex_capacity();
    if source >= capacity || !original.complex().vertex_alive(VertexId(source)) {
        bail!("source vertex {source} is not in the mesh ({capacity} vertices)");
    }
    let mut rhs = vec![0.0; capacity];
    rhs[source] = 1.0;

    let mut rows = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let mut opts = RunOptions::new(kappa);
        opts.initial_delaunay = false;
        opts.seed = seed;
        let mut simplified = original.clone();
        let outcome = simplify(&mut simplified, &opts.config())?;
        let mapping = outcome.mapping.expect("tracking is on");
        let mse =
            poisson_transfer_mse(&original, &simplified, &mapping, &rhs).map_err(|e| e.to_string());
        rows.push(PoissonRow {
            kappa_max: kappa,
            removed: outcome.report.removed,
            mse,
        });
    }
    Ok(rows)
}

pub fn poisson_table(rows: &[PoissonRow]) -> String {
    let mut out = String::from(POISSON_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(out, "{}", row.csv()).unwrap();
    }
    out
}
