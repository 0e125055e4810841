use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lineglow::bench::{bench_scaling, BenchConfig, DEFAULT_COUNTS};
use lineglow::chart::{Chart, Series};
use lineglow::config::Config;
use lineglow::export;
use lineglow::fidelity::{default_phis, fidelity_sweep, DEFAULT_THRESHOLD};
use lineglow::io::{apply_clusters, ingest, Format};
use lineglow::parallel::build_scene;
use lineglow::{service, synth, Error};
use lineglow_core::compose::mean_delta_e00;
use lineglow_core::polyline::fit_to_grid;
use lineglow_core::{
    ColormapChoice, DensityScale, GridSize, Lighting, Polyline, RenderParams, SceneConfig, ShadingSpace,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "lineglow", version, about = "Structure-aware illumination for line density plots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a dataset to a PNG.
    Render(RenderArgs),
    /// Write per-line outlierness as CSV.
    Outlierness(OutliernessArgs),
    /// Time the pipeline stages against line count.
    Bench(BenchArgs),
    /// Sweep phi and report mean CIEDE2000 against the unshaded plot.
    Fidelity(FidelityArgs),
    /// Run the local HTTP service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Dataset file (.csv or .json).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// JSON config with grid settings and default parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    /// Margin as a fraction of the shorter grid side.
    #[arg(long)]
    margin: Option<f64>,
    /// CSV of `line_id,cluster` overriding the dataset's labels.
    #[arg(long)]
    clusters: Option<PathBuf>,
}

#[derive(Args, Default)]
struct ParamArgs {
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eta_high: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long)]
    kernel: Option<usize>,
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long, value_enum)]
    colormap: Option<ColormapArg>,
    #[arg(long, value_enum)]
    density_scale: Option<ScaleArg>,
    /// `adaptive`, `fixed:AZIMUTH:ELEVATION` or `manual`.
    #[arg(long, value_parser = parse_lighting)]
    lighting: Option<Lighting>,
    #[arg(long, value_enum)]
    shading: Option<ShadingArg>,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    out: PathBuf,
    /// Composed normal map as RGB PNG.
    #[arg(long)]
    dump_normals: Option<PathBuf>,
    /// Normal provenance as indexed PNG.
    #[arg(long)]
    dump_provenance: Option<PathBuf>,
    /// Intensity map as 16-bit PNG.
    #[arg(long)]
    dump_intensity: Option<PathBuf>,
    /// Density field as little-endian f32.
    #[arg(long)]
    dump_density: Option<PathBuf>,
    /// Add mean CIEDE2000 against the unshaded plot to the summary.
    #[arg(long)]
    report_fidelity: bool,
}

#[derive(Args)]
struct OutliernessArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    kernel: Option<usize>,
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_COUNTS)]
    counts: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 512)]
    width: usize,
    #[arg(long, default_value_t = 512)]
    height: usize,
    #[arg(long, default_value_t = 120.0)]
    line_length: f64,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    chart: Option<PathBuf>,
}

#[derive(Args)]
struct FidelityArgs {
    /// Dataset; the synthetic corridor fixture when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 512)]
    width: usize,
    #[arg(long, default_value_t = 512)]
    height: usize,
    /// Line count of the synthetic fixture.
    #[arg(long, default_value_t = 300)]
    lines: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    phis: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    chart: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Directory of static UI assets served under /ui.
    #[arg(long)]
    ui: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColormapArg {
    Multi,
    Single,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Log,
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShadingArg {
    Lab,
    RgbBaseline,
}

fn parse_lighting(s: &str) -> Result<Lighting, String> {
    match s {
        "adaptive" => Ok(Lighting::Adaptive),
        "manual" => Ok(Lighting::PerClusterManual),
        _ => {
            let parts: Vec<&str> = s.split(':').collect();
            match parts.as_slice() {
                ["fixed", az, el] => {
                    let azimuth = az.parse().map_err(|_| format!("invalid azimuth {az:?}"))?;
                    let elevation = el.parse().map_err(|_| format!("invalid elevation {el:?}"))?;
                    Ok(Lighting::FixedGlobal { azimuth, elevation })
                }
                _ => Err("expected adaptive, manual or fixed:AZIMUTH:ELEVATION".into()),
            }
        }
    }
}

impl ParamArgs {
    fn apply(&self, mut p: RenderParams) -> RenderParams {
        macro_rules! set {
            ($field:ident, $value:expr) => {
                if let Some(v) = $value {
                    p.$field = v;
                }
            };
        }
        set!(mu, self.mu);
        set!(sigma, self.sigma);
        set!(eta, self.eta);
        if self.eta_high.is_some() {
            p.eta_high = self.eta_high;
        }
        set!(phi, self.phi);
        set!(kernel_n, self.kernel);
        set!(bandwidth, self.bandwidth);
        set!(
            colormap,
            self.colormap.map(|c| match c {
                ColormapArg::Multi => ColormapChoice::MultiHue,
                ColormapArg::Single => ColormapChoice::SingleHuePerCluster,
            })
        );
        set!(
            density_scale,
            self.density_scale.map(|s| match s {
                ScaleArg::Log => DensityScale::Log,
                ScaleArg::Linear => DensityScale::Linear,
            })
        );
        set!(lighting, self.lighting);
        set!(
            shading,
            self.shading.map(|s| match s {
                ShadingArg::Lab => ShadingSpace::LuminanceOnly,
                ShadingArg::RgbBaseline => ShadingSpace::DirectRgbBaseline,
            })
        );
        p
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Error> {
    path.map_or_else(|| Ok(Config::default()), Config::load)
}

struct Loaded {
    lines: Vec<Polyline>,
    size: GridSize,
    config: Config,
}

fn load(data: &DataArgs) -> Result<Loaded, Error> {
    let config = load_config(data.config.as_deref())?;
    let width = data.width.unwrap_or(config.width);
    let height = data.height.unwrap_or(config.height);
    let margin = data.margin.unwrap_or(config.margin);
    let format = data.format.map(|f| match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    });
    let mut ing = ingest(&data.input, format, width, height, margin)?;
    for w in &ing.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &data.clusters {
        apply_clusters(&mut ing.lines, &lineglow::io::read_clusters(path)?);
    }
    Ok(Loaded {
        lines: ing.lines,
        size: GridSize::new(width, height),
        config,
    })
}

fn render(args: &RenderArgs) -> Result<(), Error> {
    let data = load(&args.data)?;
    let params = args.params.apply(data.config.params.clone());
    params.validate()?;
    let scene = build_scene(&data.lines, &SceneConfig::new(data.size, params.bandwidth, params.kernel_n))?;
    let r = scene.render(&params)?;
    export::write(&args.out, &export::rgb_png(&r.image)?)?;
    if let Some(p) = &args.dump_normals {
        export::write(p, &export::normals_png(&r.structure.composed)?)?;
    }
    if let Some(p) = &args.dump_provenance {
        export::write(p, &export::provenance_png(&r.structure.composed)?)?;
    }
    if let Some(p) = &args.dump_intensity {
        export::write(p, &export::intensity_png(&r.intensity.grid)?)?;
    }
    if let Some(p) = &args.dump_density {
        export::write(p, &export::f32_grid(&scene.density.grid))?;
    }
    let mut summary = json!({
        "lines": scene.lines.len(),
        "f_max": scene.density.max(),
        "i_min": r.intensity.i_min,
        "i_empty": r.intensity.i_empty,
        "selected": r.structure.selection.selected.len(),
        "gamut_clamped": r.gamut_clamped.iter().filter(|c| **c).count(),
    });
    if args.report_fidelity {
        summary["mean_delta_e00"] = json!(mean_delta_e00(&r.base, &r.image)?);
    }
    println!("{summary}");
    Ok(())
}

fn outlierness(args: &OutliernessArgs) -> Result<(), Error> {
    let data = load(&args.data)?;
    let kernel = args.kernel.unwrap_or(data.config.params.kernel_n);
    let bandwidth = args.bandwidth.unwrap_or(data.config.params.bandwidth);
    let scene = build_scene(&data.lines, &SceneConfig::new(data.size, bandwidth, kernel))?;
    let mut out = String::from("line_id,score,rank,normalized\n");
    for e in scene.outliers.entries() {
        out.push_str(&format!("{},{:.9},{},{:.9}\n", e.line_id, e.score, e.rank, e.normalized));
    }
    match &args.out {
        Some(p) => export::write(p, out.as_bytes()),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

const SERIES_COLORS: [[u8; 3]; 3] = [[31, 119, 180], [214, 39, 40], [44, 160, 44]];

fn bench(args: &BenchArgs) -> Result<(), Error> {
    let cfg = BenchConfig {
        size: GridSize::new(args.width, args.height),
        line_length: args.line_length,
        repeats: args.repeats,
        seed: args.seed,
        ..BenchConfig::default()
    };
    let report = bench_scaling(&args.counts, &cfg)?;
    let csv = report.to_csv();
    match &args.out {
        Some(p) => export::write(p, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    if let Some(p) = &args.chart {
        let series = [
            |r: &lineglow::bench::ScalingRow| r.outlierness,
            |r: &lineglow::bench::ScalingRow| r.normal_map,
            |r: &lineglow::bench::ScalingRow| r.lighting,
        ]
        .iter()
        .zip(SERIES_COLORS)
        .map(|(f, color)| Series {
            color,
            points: report.rows.iter().map(|r| (r.count as f64, f(r))).collect(),
        })
        .collect();
        let chart = Chart {
            size: GridSize::new(640, 400),
            series,
            reference: None,
        };
        export::write(p, &chart.png()?)?;
    }
    eprintln!(
        "{}",
        json!({
            "outlierness_fit": report.outlierness_fit,
            "normal_map_fit": report.normal_map_fit,
            "lighting_fit": report.lighting_fit,
            "doubling_ratios": report.doubling_ratios(),
        })
    );
    Ok(())
}

fn fidelity(args: &FidelityArgs) -> Result<(), Error> {
    let config = load_config(args.config.as_deref())?;
    let size = GridSize::new(args.width, args.height);
    let lines = match &args.input {
        Some(path) => ingest(path, None, size.width, size.height, config.margin)?.lines,
        None => synth::corridor(size, args.lines, args.seed),
    };
    let params = args.params.apply(config.params.clone());
    params.validate()?;
    let (lines, _) = if args.input.is_some() {
        (lines, None)
    } else {
        let (l, t) = fit_to_grid(&lines, size, config.margin)?;
        (l, Some(t))
    };
    let scene = build_scene(&lines, &SceneConfig::new(size, params.bandwidth, params.kernel_n))?;
    let phis = args.phis.clone().unwrap_or_else(default_phis);
    let report = fidelity_sweep(&scene, &params, &phis, args.threshold)?;
    let csv = report.to_csv();
    match &args.out {
        Some(p) => export::write(p, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    if let Some(p) = &args.chart {
        let chart = Chart {
            size: GridSize::new(640, 400),
            series: vec![
                Series {
                    color: SERIES_COLORS[0],
                    points: report.rows.iter().map(|r| (-r.phi, r.ours)).collect(),
                },
                Series {
                    color: SERIES_COLORS[1],
                    points: report.rows.iter().map(|r| (-r.phi, r.baseline)).collect(),
                },
            ],
            reference: Some((report.threshold, [150, 150, 150])),
        };
        export::write(p, &chart.png()?)?;
    }
    eprintln!("{}", json!({ "threshold": report.threshold, "crossing_phi": report.crossing_phi }));
    Ok(())
}

fn serve(args: &ServeArgs) -> Result<(), Error> {
    let data = load(&args.data)?;
    let params = args.params.apply(data.config.params.clone());
    let svc = service::Service::new(data.lines, data.size, params, args.ui.clone())?;
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Error::Usage(e.to_string()))?;
    eprintln!("listening on http://127.0.0.1:{}", args.port);
    rt.block_on(service::serve(svc, args.port))
        .map_err(|e| Error::Usage(format!("server error: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Render(a) => render(a),
        Command::Outlierness(a) => outlierness(a),
        Command::Bench(a) => bench(a),
        Command::Fidelity(a) => fidelity(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Core(lineglow_core::Error::InvalidParam { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
