//! Published constants of the classical metrics, kept in one place.
//!
//! Conventions pinned here because reference implementations diverge on
//! them: all color statistics run on unit-interval reals; UCIQE normalizes
//! CIELAB by 100 so its three terms share a [0, ~1] scale; block metrics
//! use 8x8 blocks and ignore partial edge blocks; natural logarithms
//! throughout.

/// SSIM: 11x11 Gaussian window, sigma 1.5, K1/K2 regularizers, 8-bit range.
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
pub const SSIM_L: f64 = 255.0;

/// UCIQE = C1 * sigma_chroma + C2 * contrast_luminance + C3 * mean_saturation.
pub const UCIQE_C1: f64 = 0.4680;
pub const UCIQE_C2: f64 = 0.2745;
pub const UCIQE_C3: f64 = 0.2576;
/// Quantile pair defining the luminance contrast term.
pub const UCIQE_CONTRAST_QUANTILE: f64 = 0.01;

/// UIQM = C1 * UICM + C2 * UISM + C3 * UIConM.
pub const UIQM_C1: f64 = 0.0282;
pub const UIQM_C2: f64 = 0.2953;
pub const UIQM_C3: f64 = 3.5753;
/// UICM = A * sqrt(mu_RG^2 + mu_YB^2) + B * sqrt(var_RG + var_YB) with
/// asymmetric alpha-trimmed means.
pub const UICM_MU_WEIGHT: f64 = -0.0268;
pub const UICM_SIGMA_WEIGHT: f64 = 0.1586;
pub const UICM_ALPHA: f64 = 0.1;
/// Block size shared by the UISM edge-EME and UIConM logAMEE terms.
pub const UIQM_BLOCK: usize = 8;
/// BT.601 luma weights, also used to combine per-channel EME in UISM.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];
