//! Command-line interface.
//!
//! Exit codes: 0 success, 1 bad flags or parameters, 2 I/O or malformed
//! input files, 3 seed outside the volume.

use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spherecut::evalkit::{evaluate_manifest, load_manifest, make_phantom, summarize, PhantomShape, PhantomSpec};
use spherecut::graphbuild::{CostModel, OobPolicy, SegmentationParams, SurfacePlacement};
use spherecut::maxflow::{max_flow, parse_dimacs};
use spherecut::segmenter::{segment, segmentation_network};
use spherecut::volume::{load_volume, save_mask, save_volume, Volume3D};
use spherecut::{Error, WorldPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_SEED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spherecut", version, about = "Seeded spherical graph-cut segmentation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment the object around a seed and write its mask.
    Segment(SegmentArgs),
    /// Write a synthetic sphere or ellipsoid volume and its truth mask.
    Phantom(PhantomArgs),
    /// Compare mask pairs listed in a manifest and summarize.
    Eval(EvalArgs),
    /// Serve the HTTP API (and optionally the viewer) for one volume.
    Serve(ServeArgs),
    /// Solve a DIMACS max-flow problem.
    Maxflow(MaxflowArgs),
}

fn parse_triple<T: FromStr>(s: &str) -> Result<[T; 3], String>
where
    T::Err: std::fmt::Display,
{
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected three comma-separated values, got {s:?}"));
    };
    let p = |x: &str| x.parse::<T>().map_err(|e| format!("{x:?}: {e}"));
    Ok([p(a)?, p(b)?, p(c)?])
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    parse_triple(s)
}

fn parse_index(s: &str) -> Result<[usize; 3], String> {
    parse_triple(s)
}

fn parse_dims(s: &str) -> Result<[usize; 3], String> {
    let d: [usize; 3] = parse_triple(s)?;
    if d.contains(&0) {
        return Err("every extent must be positive".into());
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OobArg {
    Zero,
    Clamp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CostArg {
    Region,
    Deviation,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SurfaceArg {
    Midpoint,
    Node,
}

#[derive(Debug, Args)]
#[group(id = "seed_source", required = true, multiple = false)]
pub struct SeedArgs {
    /// Seed in world millimetres, `X,Y,Z`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, group = "seed_source")]
    pub seed: Option<[f64; 3]>,
    /// Seed as a voxel index, `I,J,K`.
    #[arg(long, value_parser = parse_index, group = "seed_source")]
    pub seed_voxel: Option<[usize; 3]>,
}

impl SeedArgs {
    fn resolve(&self, vol: &Volume3D) -> spherecut::Result<WorldPoint> {
        match (self.seed, self.seed_voxel) {
            (Some(p), _) => Ok(WorldPoint::from(p)),
            (None, Some(ijk)) => {
                let p = vol.geometry().voxel_to_world(ijk.map(|c| c as f64));
                if (0..3).any(|a| ijk[a] >= vol.dims()[a]) {
                    return Err(Error::SeedOutOfBounds(p));
                }
                Ok(p)
            }
            (None, None) => unreachable!("clap requires one seed flag"),
        }
    }
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Icosphere level: 5 casts 2432 rays, 6 casts 7292.
    #[arg(long, default_value_t = 5)]
    pub mesh_level: usize,
    #[arg(long, default_value_t = 50)]
    pub nodes_per_ray: usize,
    #[arg(long, default_value_t = 50.0)]
    pub ray_length_mm: f64,
    /// Largest boundary jump between neighbouring rays, in nodes.
    #[arg(long, default_value_t = 1)]
    pub delta_r: usize,
    /// Radius of the ball used for the seed mean intensity.
    #[arg(long, default_value_t = 2.0)]
    pub seed_radius_mm: f64,
    #[arg(long, value_enum, default_value_t = OobArg::Zero)]
    pub out_of_bounds: OobArg,
    #[arg(long, value_enum, default_value_t = CostArg::Region)]
    pub cost: CostArg,
    /// Region cost threshold as a fraction of the largest deviation.
    #[arg(long, default_value_t = 0.5)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t = SurfaceArg::Midpoint)]
    pub surface: SurfaceArg,
}

impl ParamArgs {
    pub fn to_params(&self) -> SegmentationParams {
        SegmentationParams {
            mesh_level: self.mesh_level,
            nodes_per_ray: self.nodes_per_ray,
            ray_length_mm: self.ray_length_mm,
            delta_r: self.delta_r,
            seed_stat_radius_mm: self.seed_radius_mm,
            oob_policy: match self.out_of_bounds {
                OobArg::Zero => OobPolicy::ZeroIntensity,
                OobArg::Clamp => OobPolicy::ClampToEdge,
            },
            cost_model: match self.cost {
                CostArg::Region => CostModel::Region { tolerance: self.tolerance },
                CostArg::Deviation => CostModel::Deviation,
            },
            surface: match self.surface {
                SurfaceArg::Midpoint => SurfacePlacement::Midpoint,
                SurfaceArg::Node => SurfacePlacement::Node,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Input volume (.nii or .rvol).
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub seed: SeedArgs,
    /// Output mask (.nii or .rvol).
    #[arg(long, short)]
    pub output: PathBuf,
    /// JSON report path; defaults to the output path with a .json extension.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the flow network as DIMACS text.
    #[arg(long)]
    pub dimacs: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ShapeArg {
    Sphere,
    Ellipsoid,
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[arg(long, value_enum, default_value_t = ShapeArg::Sphere)]
    pub shape: ShapeArg,
    /// Sphere radius in mm.
    #[arg(long, default_value_t = 20.0)]
    pub radius: f64,
    /// Ellipsoid semi-axes in mm, `A,B,C`.
    #[arg(long, value_parser = parse_point, default_value = "25,20,15")]
    pub semi_axes: [f64; 3],
    #[arg(long, value_parser = parse_dims, default_value = "128,128,128")]
    pub dims: [usize; 3],
    #[arg(long, value_parser = parse_point, default_value = "1,1,1")]
    pub spacing: [f64; 3],
    #[arg(long, default_value_t = 200.0, allow_hyphen_values = true)]
    pub object: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub background: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Output volume.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Output ground-truth mask.
    #[arg(long)]
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// JSON list of `{"id", "auto", "ref"}` entries.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Text table path; the JSON summary goes next to it with a .json extension.
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Directory of viewer assets served at `/`.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MaxflowArgs {
    /// DIMACS file, or `-` for standard input.
    #[arg(long, short, default_value = "-")]
    pub input: PathBuf,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SeedOutOfBounds(_) => EXIT_SEED,
            Error::Read { .. }
            | Error::Write { .. }
            | Error::UnknownFormat(_)
            | Error::UnsupportedDatatype(_)
            | Error::UnsupportedHeader(_)
            | Error::PayloadSizeMismatch { .. }
            | Error::InvalidDims(_)
            | Error::RvolHeader(_)
            | Error::Dimacs { .. }
            | Error::Manifest(_) => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Segment(args) => cmd_segment(&args),
        Command::Phantom(args) => cmd_phantom(&args),
        Command::Eval(args) => cmd_eval(&args),
        Command::Serve(args) => cmd_serve(&args),
        Command::Maxflow(args) => cmd_maxflow(&args),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| io_failure(path, e))
}

pub fn cmd_segment(args: &SegmentArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let params = args.params.to_params();
    params.validate()?;
    let vol = load_volume(&args.input)?;
    let seed = args.seed.resolve(&vol)?;
    let res = segment(&vol, seed, &params)?;
    save_mask(&res.mask, &args.output)?;
    let report_path = args.report.clone().unwrap_or_else(|| args.output.with_extension("json"));
    write_text(&report_path, &res.report().to_json(true))?;
    if let Some(path) = &args.dimacs {
        write_text(path, &segmentation_network(&vol, seed, &params)?.network.to_dimacs())?;
    }
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{} voxels, {:.3} cm^3, objective {:.3}",
        res.mask.count(),
        spherecut::evalkit::mask_volume_cm3(&res.mask),
        res.objective
    );
    println!("segmentation {:.1} ms, total {:.1} ms", res.timings.total, start.elapsed().as_secs_f64() * 1e3);
    Ok(())
}

pub fn cmd_phantom(args: &PhantomArgs) -> Result<(), Failure> {
    let (shape, semi_axes_mm) = match args.shape {
        ShapeArg::Sphere => (PhantomShape::Sphere, [args.radius; 3]),
        ShapeArg::Ellipsoid => (PhantomShape::Ellipsoid, args.semi_axes),
    };
    let spec = PhantomSpec {
        shape,
        semi_axes_mm,
        center: None,
        dims: args.dims,
        spacing: args.spacing,
        object_intensity: args.object,
        background_intensity: args.background,
        noise_sigma: args.noise_sigma,
        rng_seed: args.rng_seed,
    };
    let (vol, truth) = make_phantom(&spec)?;
    save_volume(&vol, &args.output)?;
    save_mask(&truth, &args.truth)?;
    let c = vol.center();
    println!("center {:.2},{:.2},{:.2} mm; truth {} voxels", c.x, c.y, c.z, truth.count());
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), Failure> {
    let entries = load_manifest(&args.manifest)?;
    let cases = evaluate_manifest(&entries)?;
    let summary = summarize(&cases)?;
    let table = summary.render_table();
    write_text(&args.report, &table)?;
    write_text(&args.report.with_extension("json"), &summary.to_json())?;
    print!("{table}");
    Ok(())
}

pub fn cmd_serve(args: &ServeArgs) -> Result<(), Failure> {
    let vol = load_volume(&args.input)?;
    let state = crate::server::AppState::new(vol, args.input.clone());
    let app = crate::server::router(state, args.static_dir.as_deref());
    let addr = format!("{}:{}", args.host, args.port);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure { code: EXIT_IO, message: e.to_string() })?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| Failure { code: EXIT_IO, message: format!("cannot bind {addr}: {e}") })?;
        tracing::info!("listening on http://{addr}");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
                tracing::info!("shutting down");
            })
            .await
            .map_err(|e| Failure { code: EXIT_IO, message: e.to_string() })
    })
}

pub fn cmd_maxflow(args: &MaxflowArgs) -> Result<(), Failure> {
    let text = if args.input.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| io_failure(Path::new("<stdin>"), e))?;
        s
    } else {
        std::fs::read_to_string(&args.input).map_err(|e| io_failure(&args.input, e))?
    };
    let net = parse_dimacs(&text)?;
    let cut = max_flow(&net);
    println!("flow {}", cut.flow_value);
    println!("source side {} of {} nodes", cut.source_side.iter().filter(|&&s| s).count(), net.node_count());
    println!("augmentations {}, {:.3} ms", cut.stats.augmentations, cut.stats.elapsed.as_secs_f64() * 1e3);
    Ok(())
}
