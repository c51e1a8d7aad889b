//! Regenerates the bundled fixture image (and its length-9 motion-blurred
//! variant used when freezing metric reference values):
//!
//! ```text
//! cargo run -p uiqa-core --example gen_fixture -- crates/uiqa-core/testdata
//! ```

use uiqa_core::distortion::{apply_distortion, DistortionSpec};
use uiqa_core::image::save_image;
use uiqa_core::synth::photographic_fixture;

/// Seed for the blurred variant's kernel angle; fixed so the frozen SSIM
/// reference value stays valid.
pub const FIXTURE_BLUR_SEED: u64 = 0x5eed;

fn main() {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/uiqa-core/testdata".to_string());
    std::fs::create_dir_all(&out).expect("create output directory");
    let fixture = photographic_fixture();
    save_image(&fixture, format!("{out}/fixture.png")).expect("write fixture");
    let blurred = apply_distortion(
        &fixture,
        &DistortionSpec::motion_blur(2, 9, FIXTURE_BLUR_SEED),
    )
    .expect("blur fixture");
    save_image(&blurred, format!("{out}/fixture_blur9.png")).expect("write blurred fixture");
    println!("wrote {out}/fixture.png and {out}/fixture_blur9.png");
}
