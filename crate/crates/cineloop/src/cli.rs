//! Command-line surface: generate, flow (synth/integrate/viz), mask, eval,
//! and scene. Every command is deterministic for identical flags and inputs.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};

use cineloop_core::compose::CinemagraphJob;
use cineloop_core::flow::{constant_flow, radial_flow, rotation_flow};
use cineloop_core::{field, mask as maskproc, metrics, style, FlowField, LoopSpec, StyleParams};

use crate::scene::TranslationScene;
use crate::{eval, flo, gifio, pngio, render, viz};

#[derive(Parser)]
#[command(name = "cineloop", version, about = "Seamlessly looping cinemagraphs from a still image, a mask, and a motion field")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a looping cinemagraph as a PNG sequence and/or GIF
    Generate(GenerateArgs),
    /// Author, integrate, and visualize motion fields
    Flow {
        #[command(subcommand)]
        action: FlowAction,
    },
    /// Refine a mask by removing sub-threshold components
    Mask(MaskArgs),
    /// Run the ablation study on the bundled synthetic scene
    Eval(EvalArgs),
    /// Write the bundled synthetic scene to image/mask PNGs
    Scene(SceneArgs),
}

/// Procedural flow preset: `constant:u,v`, `rotation:cx,cy,omega`, or
/// `radial:cx,cy,k`.
#[derive(Debug, Clone, Copy)]
pub enum FlowPreset {
    Constant { u: f32, v: f32 },
    Rotation { cx: f32, cy: f32, omega: f32 },
    Radial { cx: f32, cy: f32, k: f32 },
}

impl FlowPreset {
    pub fn build(&self, width: usize, height: usize) -> FlowField {
        match *self {
            FlowPreset::Constant { u, v } => constant_flow(width, height, u, v),
            FlowPreset::Rotation { cx, cy, omega } => rotation_flow(width, height, cx, cy, omega),
            FlowPreset::Radial { cx, cy, k } => radial_flow(width, height, cx, cy, k),
        }
    }
}

impl FromStr for FlowPreset {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .with_context(|| format!("preset {s:?} must look like kind:params"))?;
        let params: Vec<f32> = rest
            .split(',')
            .map(|p| p.trim().parse::<f32>().with_context(|| format!("bad number {p:?}")))
            .collect::<Result<_>>()?;
        let expect = |n: usize| -> Result<()> {
            ensure!(params.len() == n, "preset {kind} takes {n} parameters, got {}", params.len());
            Ok(())
        };
        match kind {
            "constant" => {
                expect(2)?;
                Ok(FlowPreset::Constant { u: params[0], v: params[1] })
            }
            "rotation" => {
                expect(3)?;
                Ok(FlowPreset::Rotation { cx: params[0], cy: params[1], omega: params[2] })
            }
            "radial" => {
                expect(3)?;
                Ok(FlowPreset::Radial { cx: params[0], cy: params[1], k: params[2] })
            }
            other => bail!("unknown preset kind {other:?} (expected constant, rotation, or radial)"),
        }
    }
}

fn parse_style_stats(s: &str) -> Result<([f32; 3], [f32; 3])> {
    let values: Vec<f32> = s
        .split(',')
        .map(|p| p.trim().parse::<f32>().with_context(|| format!("bad number {p:?}")))
        .collect::<Result<_>>()?;
    ensure!(values.len() == 6, "--style-stats takes six floats: m1,m2,m3,s1,s2,s3");
    Ok(([values[0], values[1], values[2]], [values[3], values[4], values[5]]))
}

#[derive(Args)]
struct GenerateArgs {
    /// Input still image (PNG)
    #[arg(long)]
    image: PathBuf,
    /// Dynamic-region mask (PNG, strictly 0/255)
    #[arg(long)]
    mask: PathBuf,
    /// Motion field as a Middlebury .flo file
    #[arg(long, conflicts_with = "flow_preset")]
    flow: Option<PathBuf>,
    /// Procedural motion field, e.g. constant:1,0 or rotation:256,256,0.05
    #[arg(long, value_name = "PRESET")]
    flow_preset: Option<FlowPreset>,
    /// Loop length N; the output has N+1 frames
    #[arg(long, default_value_t = 48)]
    frames: usize,
    /// Feature pyramid depth
    #[arg(long, default_value_t = 5)]
    levels: usize,
    /// Normalize the dynamic region's mean speed to this many pixels/frame
    #[arg(long)]
    speed: Option<f32>,
    /// Style target image (requires --beta)
    #[arg(long, conflicts_with = "style_stats", requires = "beta")]
    style_image: Option<PathBuf>,
    /// Style target statistics m1,m2,m3,s1,s2,s3 (requires --beta)
    #[arg(long, requires = "beta")]
    style_stats: Option<String>,
    /// Style interpolation weight in [0, 1]
    #[arg(long)]
    beta: Option<f32>,
    /// Directory for the PNG sequence frame_000.png…
    #[arg(long)]
    out: Option<PathBuf>,
    /// Path for a looping GIF
    #[arg(long)]
    gif: Option<PathBuf>,
    /// GIF frame delay in hundredths of a second
    #[arg(long, default_value_t = 4)]
    gif_delay: u16,
}

#[derive(Subcommand)]
enum FlowAction {
    /// Write a procedural preset as a .flo file
    Synth {
        #[arg(long, value_name = "PRESET")]
        preset: FlowPreset,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Euler-integrate a .flo field and write the displacement as .flo
    Integrate {
        #[arg(long)]
        flo: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a .flo field as an HSV-wheel PNG
    Viz {
        #[arg(long)]
        flo: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct MaskArgs {
    /// Input mask PNG
    #[arg(long = "in")]
    input: PathBuf,
    /// Output mask PNG
    #[arg(long)]
    out: PathBuf,
    /// Components below this area ratio are flipped
    #[arg(long, default_value_t = 0.03)]
    threshold: f64,
}

#[derive(Args)]
struct EvalArgs {
    /// CSV report path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 128)]
    width: usize,
    #[arg(long, default_value_t = 64)]
    height: usize,
    /// Loop length N of the evaluation scene
    #[arg(long, default_value_t = 8)]
    frames: usize,
    #[arg(long, default_value_t = 3)]
    levels: usize,
}

#[derive(Args)]
struct SceneArgs {
    #[arg(long)]
    out_image: PathBuf,
    #[arg(long)]
    out_mask: PathBuf,
    #[arg(long, default_value_t = 512)]
    width: usize,
    #[arg(long, default_value_t = 512)]
    height: usize,
    /// Loop length the scene's texture period is matched to
    #[arg(long, default_value_t = 48)]
    frames: usize,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Flow { action } => cmd_flow(action),
        Command::Mask(args) => cmd_mask(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Scene(args) => cmd_scene(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    ensure!(
        args.out.is_some() || args.gif.is_some(),
        "nothing to write: pass --out DIR and/or --gif PATH"
    );
    let image = pngio::load_image(&args.image)
        .with_context(|| format!("loading image {}", args.image.display()))?;
    let mask = pngio::load_mask(&args.mask)
        .with_context(|| format!("loading mask {}", args.mask.display()))?;

    let mut flow = match (&args.flow, &args.flow_preset) {
        (Some(path), None) => {
            let contents = flo::read_flo(path).with_context(|| format!("loading flow {}", path.display()))?;
            if contents.zeroed_values > 0 {
                eprintln!(
                    "warning: zeroed {} unknown/non-finite flow values",
                    contents.zeroed_values
                );
            }
            contents.field
        }
        (None, Some(preset)) => preset.build(image.width(), image.height()),
        _ => bail!("exactly one of --flow or --flow-preset is required"),
    };

    if let Some(target) = args.speed {
        ensure!(target > 0.0 && target.is_finite(), "--speed must be positive");
        let flow_mask = mask.resize_nearest(flow.width(), flow.height());
        flow = field::normalize_speed(&flow, &flow_mask, target)?;
    }

    let style = build_style(&args)?;
    let job = CinemagraphJob {
        image,
        mask,
        flow,
        spec: LoopSpec::new(args.frames)?,
        levels: args.levels,
        style,
    };
    let frames = render::render_frames(&job)?;

    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (t, frame) in frames.iter().enumerate() {
            let path = dir.join(format!("frame_{t:03}.png"));
            pngio::save_image(&path, frame).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    if let Some(path) = &args.gif {
        gifio::write_gif(path, &frames, args.gif_delay)?;
    }

    let gap = metrics::loop_gap(&frames)?;
    println!("loop_gap: {gap:.6e}");
    Ok(())
}

fn build_style(args: &GenerateArgs) -> Result<Option<StyleParams>> {
    let beta = match args.beta {
        Some(beta) => beta,
        None => {
            ensure!(
                args.style_image.is_none() && args.style_stats.is_none(),
                "--style-image/--style-stats require --beta"
            );
            return Ok(None);
        }
    };
    let params = match (&args.style_image, &args.style_stats) {
        (Some(path), None) => {
            let target = pngio::load_image(path)
                .with_context(|| format!("loading style image {}", path.display()))?;
            style::fit_style(&target).with_beta(beta)?
        }
        (None, Some(stats)) => {
            let (mean, std) = parse_style_stats(stats)?;
            StyleParams::from_stats(mean, std, beta)?
        }
        (None, None) => bail!("--beta requires --style-image or --style-stats"),
        _ => unreachable!("clap conflicts_with prevents both"),
    };
    Ok(Some(params))
}

fn cmd_flow(action: FlowAction) -> Result<()> {
    match action {
        FlowAction::Synth { preset, width, height, out } => {
            ensure!(width > 0 && height > 0, "dimensions must be positive");
            let field = preset.build(width, height);
            flo::write_flow(&out, &field)?;
            println!("wrote {}", out.display());
        }
        FlowAction::Integrate { flo: input, steps, out } => {
            let contents = flo::read_flo(&input)?;
            if contents.zeroed_values > 0 {
                eprintln!(
                    "warning: zeroed {} unknown/non-finite flow values",
                    contents.zeroed_values
                );
            }
            let displacement = field::integrate(&contents.field, steps);
            flo::write_flo(&out, displacement.width(), displacement.height(), displacement.data())?;
            println!("wrote {}", out.display());
        }
        FlowAction::Viz { flo: input, out } => {
            let contents = flo::read_flo(&input)?;
            let rendered = viz::flow_wheel(&contents.field);
            pngio::save_image(&out, &rendered)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn cmd_mask(args: MaskArgs) -> Result<()> {
    let mask = pngio::load_mask(&args.input)
        .with_context(|| format!("loading mask {}", args.input.display()))?;
    let refined = maskproc::refine_mask(&mask, args.threshold)?;
    pngio::save_mask(&args.out, &refined)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let report = eval::run_eval(args.width, args.height, args.frames, args.levels)?;
    std::fs::write(&args.out, report.to_csv())
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {} ({} rows)", args.out.display(), report.rows.len());
    println!("note: neural metrics (LPIPS, FID) are out of scope; reporting RMSE and MS-SSIM only");
    Ok(())
}

fn cmd_scene(args: SceneArgs) -> Result<()> {
    let scene = TranslationScene::new(args.width, args.height, args.frames);
    pngio::save_image(&args.out_image, &scene.image())?;
    pngio::save_mask(&args.out_mask, &scene.mask())?;
    println!("wrote {} and {}", args.out_image.display(), args.out_mask.display());
    Ok(())
}

/// Entry point shared by `main` and the test harness.
pub fn main_with_args<I, T>(argv: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run(Cli::parse_from(argv))
}
