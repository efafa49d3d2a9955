use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use orthoforge::drawing::{
    emit_svg, load_raster, parse_svg, rasterize_with, render_drawing_with, save_raster, RenderOptions, TechnicalDrawing,
    DEFAULT_RASTER_SIZE,
};
use orthoforge::geometry::{load_mesh_auto, normalize_longest_edge, write_obj, LoadOptions, NORMALIZED_EXTENT};
use orthoforge::pipeline::{
    build_dataset, evaluate_generated, run_roundtrip, write_random_corpus, Config, CorpusManifest, DatasetOptions,
    RasterFormat,
};
use orthoforge::projection::StandardView;
use orthoforge::reconstruct::{reconstruct_from_drawings_with, ReconstructOptions, DEFAULT_RESOLUTION};
use orthoforge::shapes::builtin_corpus;
use orthoforge::vectorize::{vectorize_drawing_with, VectorizeOptions};

#[derive(Parser)]
#[command(name = "orthoforge", version, about = "Technical drawings from meshes and solids from drawings")]
struct Cli {
    /// JSON config file; falls back to $ORTHOFORGE_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render normalized drawings of a mesh.
    Render(RenderArgs),
    /// Trace a raster drawing into an SVG.
    Vectorize(VectorizeArgs),
    /// Rebuild a solid from top, front and side drawings.
    Reconstruct(ReconstructArgs),
    /// Render every mesh in a directory and write a manifest.
    Dataset(DatasetArgs),
    /// Chamfer statistics of generated views against a dataset.
    Evaluate(EvaluateArgs),
    /// Render, vectorize and reconstruct a mesh, then score the result.
    Roundtrip(RoundtripArgs),
    /// Write procedural (or the built-in) test meshes as OBJ files.
    GenCorpus(GenCorpusArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct RenderArgs {
    mesh: PathBuf,
    /// top, front, side, iso or all
    #[arg(long, default_value = "all")]
    view: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_enum, default_value = "on")]
    hidden: OnOff,
    /// Write SVG files.
    #[arg(long)]
    svg: bool,
    /// Write PGM rasters.
    #[arg(long, conflicts_with = "png")]
    pgm: bool,
    /// Write PNG rasters.
    #[arg(long)]
    png: bool,
    /// Merge coincident STL vertices on load.
    #[arg(long)]
    dedup: bool,
}

#[derive(Args)]
struct VectorizeArgs {
    raster: PathBuf,
    #[arg(long)]
    view: StandardView,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 128)]
    threshold: u8,
    #[arg(long)]
    close_dashes: bool,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Raster (PGM/PNG) or SVG drawing of each view.
    #[arg(long)]
    top: PathBuf,
    #[arg(long)]
    front: PathBuf,
    #[arg(long)]
    side: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    extrusion_json: Option<PathBuf>,
    /// Run-length-encoded occupancy dump.
    #[arg(long)]
    voxels_json: Option<PathBuf>,
    /// Marching-tetrahedra surface instead of voxel blocks.
    #[arg(long)]
    smooth: bool,
}

#[derive(Args)]
struct DatasetArgs {
    corpus_dir: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    size: Option<usize>,
    /// Store rasters as PNG instead of PGM.
    #[arg(long)]
    png: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    generated: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RoundtripArgs {
    mesh: PathBuf,
    #[arg(long)]
    resolution: Option<usize>,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct GenCorpusArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the five built-in test meshes instead.
    #[arg(long)]
    builtin: bool,
}

fn views(spec: &str) -> Result<Vec<StandardView>> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(StandardView::ALL.to_vec());
    }
    Ok(vec![spec.parse::<StandardView>().map_err(anyhow::Error::msg)?])
}

fn render_options(cfg: &Config, hidden: bool) -> RenderOptions {
    RenderOptions { hidden, window: cfg.window_rect(), ..Default::default() }
}

fn render(cfg: &Config, a: RenderArgs) -> Result<()> {
    let mesh = load_mesh_auto(&a.mesh, LoadOptions { dedup: a.dedup })
        .with_context(|| format!("loading {}", a.mesh.display()))?;
    let (mesh, _) = normalize_longest_edge(&mesh, NORMALIZED_EXTENT)?;
    let size = a.size.or(cfg.raster_size).unwrap_or(DEFAULT_RASTER_SIZE);
    let opts = render_options(cfg, matches!(a.hidden, OnOff::On));
    let (svg, pgm, png) = if !a.svg && !a.pgm && !a.png { (true, true, false) } else { (a.svg, a.pgm, a.png) };
    std::fs::create_dir_all(&a.out)?;
    let stem = a.mesh.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "mesh".into());
    for view in views(&a.view)? {
        let d = render_drawing_with(&mesh, view, &opts)?;
        let base = a.out.join(format!("{stem}_{}", view.as_str()));
        if svg {
            emit_svg(&d, &base.with_extension("svg"))?;
        }
        if pgm || png {
            let r = rasterize_with(&d, size, cfg.dash());
            save_raster(&r, &base.with_extension(if png { "png" } else { "pgm" }))?;
        }
        println!("{}: {} segments", view, d.segments.len());
    }
    Ok(())
}

fn vectorize(a: VectorizeArgs) -> Result<()> {
    let r = load_raster(&a.raster).with_context(|| format!("loading {}", a.raster.display()))?;
    let opts = VectorizeOptions { threshold: a.threshold, close_dashes: a.close_dashes, ..Default::default() };
    let d = vectorize_drawing_with(&r, a.view, &opts);
    emit_svg(&d, &a.out)?;
    println!("{} segments", d.segments.len());
    Ok(())
}

/// A drawing from an SVG file, or the vectorization of a raster.
fn load_drawing(path: &Path, view: StandardView) -> Result<TechnicalDrawing> {
    let is_svg = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg"));
    let mut d = if is_svg {
        parse_svg(path)?
    } else {
        vectorize_drawing_with(&load_raster(path)?, view, &VectorizeOptions::default())
    };
    d.view = view;
    Ok(d)
}

fn reconstruct(cfg: &Config, a: ReconstructArgs) -> Result<()> {
    let top = load_drawing(&a.top, StandardView::Top).with_context(|| format!("reading {}", a.top.display()))?;
    let front = load_drawing(&a.front, StandardView::Front).with_context(|| format!("reading {}", a.front.display()))?;
    let side = load_drawing(&a.side, StandardView::Side).with_context(|| format!("reading {}", a.side.display()))?;
    let opts = ReconstructOptions {
        resolution: a.resolution.or(cfg.resolution).unwrap_or(DEFAULT_RESOLUTION),
        smooth: a.smooth,
        ..Default::default()
    };
    let r = reconstruct_from_drawings_with(&top, &front, &side, &opts)?;
    let mut buf = Vec::new();
    write_obj(&r.mesh, &mut buf)?;
    std::fs::write(&a.out, buf).with_context(|| format!("writing {}", a.out.display()))?;
    println!("volume {:.4}, {} triangles", r.grid.volume(), r.mesh.faces().len());
    match (&r.extrusion, &a.extrusion_json) {
        (Some(p), Some(path)) => {
            std::fs::write(path, p.to_json())?;
            println!("extrusion along {} over [{:.4}, {:.4}]", p.axis, p.span.0, p.span.1);
        }
        (Some(p), None) => println!("extrusion along {} over [{:.4}, {:.4}]", p.axis, p.span.0, p.span.1),
        (None, _) => println!("no extrusion detected"),
    }
    if let Some(path) = &a.voxels_json {
        std::fs::write(path, serde_json::to_string(&r.grid.to_rle())?)?;
    }
    Ok(())
}

fn dataset(cfg: &Config, a: DatasetArgs) -> Result<()> {
    let opts = DatasetOptions {
        workers: a.workers.or(cfg.workers),
        size: a.size.or(cfg.raster_size).unwrap_or(DEFAULT_RASTER_SIZE),
        format: if a.png { RasterFormat::Png } else { RasterFormat::Pgm },
        render: render_options(cfg, true),
        dash: cfg.dash(),
        ..Default::default()
    };
    let m = build_dataset(&a.corpus_dir, &a.out, &opts)?;
    let ok = m.succeeded().count();
    println!("{ok} of {} meshes rendered; manifest at {}", m.entries.len(), a.out.join("manifest.json").display());
    for e in m.entries.iter().filter(|e| e.error.is_some()) {
        println!("  failed {}: {}", e.id, e.error.as_deref().unwrap_or_default());
    }
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let m = CorpusManifest::load(&a.manifest)?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let ev = evaluate_generated(&m, base, &a.generated)?;
    std::fs::write(&a.out, ev.to_json()).with_context(|| format!("writing {}", a.out.display()))?;
    print!("{}", ev.report.to_table());
    for s in &ev.skipped {
        println!("skipped {} {}: {}", s.id, s.view, s.reason);
    }
    Ok(())
}

fn roundtrip(cfg: &Config, a: RoundtripArgs) -> Result<bool> {
    let mesh = load_mesh_auto(&a.mesh, LoadOptions::default()).with_context(|| format!("loading {}", a.mesh.display()))?;
    let resolution = a.resolution.or(cfg.resolution).unwrap_or(DEFAULT_RESOLUTION);
    let r = run_roundtrip(&mesh, resolution, &cfg.thresholds)?;
    print!("{}", r.to_text());
    if let Some(p) = &a.json {
        std::fs::write(p, serde_json::to_string_pretty(&r)?)?;
    }
    Ok(r.pass)
}

fn gen_corpus(a: GenCorpusArgs) -> Result<()> {
    if a.builtin {
        std::fs::create_dir_all(&a.out)?;
        for (name, m) in builtin_corpus() {
            let mut buf = Vec::new();
            write_obj(&m, &mut buf)?;
            std::fs::write(a.out.join(format!("{name}.obj")), buf)?;
        }
        println!("wrote 5 built-in meshes");
    } else {
        let files = write_random_corpus(&a.out, a.seed, a.count)?;
        println!("wrote {} meshes", files.len());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = Config::resolve(cli.config.as_deref())?;
    match cli.command {
        Command::Render(a) => render(&cfg, a)?,
        Command::Vectorize(a) => vectorize(a)?,
        Command::Reconstruct(a) => reconstruct(&cfg, a)?,
        Command::Dataset(a) => dataset(&cfg, a)?,
        Command::Evaluate(a) => evaluate(a)?,
        Command::Roundtrip(a) => return roundtrip(&cfg, a),
        Command::GenCorpus(a) => {
            if a.count == 0 && !a.builtin {
                bail!("--count must be positive");
            }
            gen_corpus(a)?
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
