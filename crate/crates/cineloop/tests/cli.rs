//! End-to-end CLI checks driving the built binary.

use std::path::Path;
use std::process::{Command, Output};

use cineloop::scene::TranslationScene;
use cineloop::{flo, pngio};
use cineloop_core::field;
use cineloop_core::flow::constant_flow;
use cineloop_core::mask::Mask;
use cineloop_testkit as testkit;

fn cineloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cineloop"))
        .args(args)
        .output()
        .expect("spawning cineloop")
}

fn write_scene(dir: &Path, size: usize, n: usize) -> (String, String) {
    let scene = TranslationScene::new(size, size, n);
    let image = dir.join("image.png");
    let mask = dir.join("mask.png");
    pngio::save_image(&image, &scene.image()).unwrap();
    pngio::save_mask(&mask, &scene.mask()).unwrap();
    (
        image.to_str().unwrap().to_owned(),
        mask.to_str().unwrap().to_owned(),
    )
}

#[test]
fn generate_zero_flow_reproduces_input() {
    let dir = tempfile::tempdir().unwrap();
    let (image, mask) = write_scene(dir.path(), 32, 4);
    let out = dir.path().join("frames");
    let output = cineloop(&[
        "generate",
        "--image", &image,
        "--mask", &mask,
        "--flow-preset", "constant:0,0",
        "--frames", "4",
        "--levels", "3",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let gap_line = stdout.lines().find(|l| l.starts_with("loop_gap:")).expect("loop_gap printed");
    let gap: f64 = gap_line.trim_start_matches("loop_gap:").trim().parse().unwrap();
    assert!(gap <= 1e-6, "zero flow loop gap {gap}");

    let original = std::fs::read(&image).unwrap();
    for t in 0..=4 {
        let frame = std::fs::read(out.join(format!("frame_{t:03}.png"))).unwrap();
        assert_eq!(frame, original, "frame {t} differs from the input image");
    }
}

#[test]
fn generate_writes_n_plus_one_frames() {
    let dir = tempfile::tempdir().unwrap();
    let (image, mask) = write_scene(dir.path(), 32, 48);
    let out = dir.path().join("frames");
    let output = cineloop(&[
        "generate",
        "--image", &image,
        "--mask", &mask,
        "--flow-preset", "constant:1,0",
        "--frames", "48",
        "--levels", "3",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let count = std::fs::read_dir(&out).unwrap().count();
    assert_eq!(count, 49, "expected N+1 = 49 frame files");

    // loop closure on the bundled scene
    let first = std::fs::read(out.join("frame_000.png")).unwrap();
    let last = std::fs::read(out.join("frame_048.png")).unwrap();
    assert_eq!(first, last, "endpoint frames must match after 8-bit export");
}

#[test]
fn generate_accepts_flo_files_and_styles() {
    let dir = tempfile::tempdir().unwrap();
    let (image, mask) = write_scene(dir.path(), 32, 4);
    let flow_path = dir.path().join("flow.flo");
    flo::write_flow(&flow_path, &constant_flow(32, 32, 0.5, 0.0)).unwrap();
    let out = dir.path().join("frames");
    let output = cineloop(&[
        "generate",
        "--image", &image,
        "--mask", &mask,
        "--flow", flow_path.to_str().unwrap(),
        "--frames", "4",
        "--levels", "2",
        "--speed", "1.0",
        "--style-stats", "0.6,0.5,0.4,0.2,0.2,0.2",
        "--beta", "0.5",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 5);
}

#[test]
fn generate_rejects_bad_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let (image, mask) = write_scene(dir.path(), 32, 4);
    let out = dir.path().join("frames");

    // no output sink
    let output = cineloop(&[
        "generate",
        "--image", &image,
        "--mask", &mask,
        "--flow-preset", "constant:1,0",
    ]);
    assert!(!output.status.success());

    // no flow source
    let output = cineloop(&[
        "generate",
        "--image", &image,
        "--mask", &mask,
        "--out", out.to_str().unwrap(),
    ]);
    assert!(!output.status.success());

    // dimensions not divisible by 2^(levels-1)
    let output = cineloop(&[
        "generate",
        "--image", &image,
        "--mask", &mask,
        "--flow-preset", "constant:1,0",
        "--frames", "4",
        "--levels", "7",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("divisible"), "unexpected error text: {stderr}");

    // invalid beta
    let output = cineloop(&[
        "generate",
        "--image", &image,
        "--mask", &mask,
        "--flow-preset", "constant:1,0",
        "--style-stats", "0.5,0.5,0.5,0.1,0.1,0.1",
        "--beta", "1.5",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(!output.status.success());

    // style without beta is a usage error
    let output = cineloop(&[
        "generate",
        "--image", &image,
        "--mask", &mask,
        "--flow-preset", "constant:1,0",
        "--style-stats", "0.5,0.5,0.5,0.1,0.1,0.1",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(!output.status.success());
}

#[test]
fn flow_synth_integrate_round_trip_matches_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let synth = dir.path().join("synth.flo");
    let integrated = dir.path().join("integrated.flo");

    let output = cineloop(&[
        "flow", "synth",
        "--preset", "constant:0.5,-0.25",
        "--width", "16",
        "--height", "12",
        "--out", synth.to_str().unwrap(),
    ]);
    assert!(output.status.success());

    let output = cineloop(&[
        "flow", "integrate",
        "--flo", synth.to_str().unwrap(),
        "--steps", "5",
        "--out", integrated.to_str().unwrap(),
    ]);
    assert!(output.status.success());

    let on_disk = flo::read_flo(&integrated).unwrap();
    let in_process = field::integrate(&constant_flow(16, 12, 0.5, -0.25), 5);
    assert_eq!(on_disk.field.data(), in_process.data(), "CLI and library integration differ");
    // interior cells hit the closed form 5·(u, v)
    assert_eq!(on_disk.field.get(4, 4), (2.5, -1.25));
}

#[test]
fn flow_viz_zero_field_is_white() {
    let dir = tempfile::tempdir().unwrap();
    let synth = dir.path().join("zero.flo");
    let png = dir.path().join("viz.png");
    cineloop(&["flow", "synth", "--preset", "constant:0,0", "--width", "8", "--height", "8", "--out", synth.to_str().unwrap()]);
    let output = cineloop(&["flow", "viz", "--flo", synth.to_str().unwrap(), "--out", png.to_str().unwrap()]);
    assert!(output.status.success());
    let img = pngio::load_image(&png).unwrap();
    assert!(img.data().iter().all(|&v| v == 1.0), "zero-flow wheel must be white");
}

#[test]
fn mask_command_applies_area_rule_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    let once = dir.path().join("once.png");
    let twice = dir.path().join("twice.png");

    // one 2%-area blob inside a 512×512 static background
    let mut data = vec![0u8; 512 * 512];
    testkit::paint_blob(&mut data, 512, 512, 50, 50, 72, 5243, 1);
    pngio::save_mask(&input, &Mask::from_data(512, 512, data).unwrap()).unwrap();

    let output = cineloop(&["mask", "--in", input.to_str().unwrap(), "--out", once.to_str().unwrap(), "--threshold", "0.03"]);
    assert!(output.status.success());
    assert_eq!(pngio::load_mask(&once).unwrap().dynamic_count(), 0);

    let output = cineloop(&["mask", "--in", once.to_str().unwrap(), "--out", twice.to_str().unwrap(), "--threshold", "0.03"]);
    assert!(output.status.success());
    assert_eq!(std::fs::read(&once).unwrap(), std::fs::read(&twice).unwrap());

    // an all-ones mask passes through unchanged
    let ones_in = dir.path().join("ones.png");
    let ones_out = dir.path().join("ones_out.png");
    pngio::save_mask(&ones_in, &Mask::filled(64, 64, 1)).unwrap();
    let output = cineloop(&["mask", "--in", ones_in.to_str().unwrap(), "--out", ones_out.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(pngio::load_mask(&ones_out).unwrap(), Mask::filled(64, 64, 1));
}

#[test]
fn eval_command_emits_full_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("report.csv");
    let output = cineloop(&[
        "eval",
        "--out", csv_path.to_str().unwrap(),
        "--width", "64",
        "--height", "32",
        "--frames", "4",
        "--levels", "3",
    ]);
    assert!(output.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("method,metric,value"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 20, "5 methods × 2 metrics × 2 frame sets");
    assert!(rows.iter().any(|r| r.starts_with("full,rmse_vs_full,0.000000")));
    assert!(rows.iter().any(|r| r.starts_with("full,ms_ssim_vs_full,1.000000")));
    for method in ["full", "no_forward_warp", "no_dfw", "no_msdfw", "no_mask"] {
        assert_eq!(rows.iter().filter(|r| r.starts_with(&format!("{method},"))).count(), 4);
    }
}

#[test]
fn scene_command_writes_compatible_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("scene.png");
    let mask = dir.path().join("scene_mask.png");
    let output = cineloop(&[
        "scene",
        "--out-image", image.to_str().unwrap(),
        "--out-mask", mask.to_str().unwrap(),
        "--width", "64",
        "--height", "64",
        "--frames", "8",
    ]);
    assert!(output.status.success());
    let img = pngio::load_image(&image).unwrap();
    let m = pngio::load_mask(&mask).unwrap();
    assert_eq!((img.width(), img.height()), (64, 64));
    assert_eq!((m.width(), m.height()), (64, 64));
    assert!(m.dynamic_count() > 0);
}
