#!/usr/bin/env python3
"""Independent reference implementations used to freeze the metric values
asserted in the acceptance suite.

SSIM comes from scikit-image (cross-implementation check); UCIQE and UIQM
are re-derived here in NumPy from the documented formulas, sharing no code
with the Rust implementations.

Usage: python3 tools/oracles.py crates/uiqa-core/testdata
"""

import sys

import numpy as np
from PIL import Image
from skimage.metrics import structural_similarity

M = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
WHITE = M.sum(axis=1)
LAB_EPS = 216.0 / 24389.0
LAB_KAPPA = 24389.0 / 27.0


def srgb_to_lab(img_u8):
    v = img_u8.astype(np.float64) / 255.0
    lin = np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)
    xyz = lin @ M.T / WHITE
    f = np.where(xyz > LAB_EPS, np.cbrt(xyz), (LAB_KAPPA * xyz + 16.0) / 116.0)
    l = 116.0 * f[..., 1] - 16.0
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])
    return l, a, b


def uciqe(img_u8):
    l, a, b = srgb_to_lab(img_u8)
    chroma = np.sqrt(a * a + b * b) / 100.0
    sigma_c = chroma.std()  # population
    ln = l / 100.0
    contrast = np.percentile(ln, 99, method="linear") - np.percentile(
        ln, 1, method="linear"
    )
    rgb = img_u8.astype(np.float64)
    mx = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    sat = np.where(mx > 0, (mx - mn) / np.where(mx > 0, mx, 1.0), 0.0)
    return 0.4680 * sigma_c + 0.2745 * contrast + 0.2576 * sat.mean()


def alpha_trimmed(values, alpha=0.1):
    s = np.sort(values.ravel())
    trim = int(np.floor(alpha * s.size))
    kept = s[trim : s.size - trim]
    mu = kept.mean()
    var = ((values - mu) ** 2).mean()
    return mu, var


def uicm(img_u8):
    v = img_u8.astype(np.float64) / 255.0
    rg = v[..., 0] - v[..., 1]
    yb = (v[..., 0] + v[..., 1]) / 2.0 - v[..., 2]
    mu_rg, var_rg = alpha_trimmed(rg)
    mu_yb, var_yb = alpha_trimmed(yb)
    return -0.0268 * np.hypot(mu_rg, mu_yb) + 0.1586 * np.sqrt(var_rg + var_yb)


def sobel_mag(p):
    g = np.zeros_like(p)
    gx = (
        p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:]
        - p[:-2, :-2] - 2 * p[1:-1, :-2] - p[2:, :-2]
    )
    gy = (
        p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:]
        - p[:-2, :-2] - 2 * p[:-2, 1:-1] - p[:-2, 2:]
    )
    g[1:-1, 1:-1] = np.hypot(gx, gy)
    return g


def blocks(p, size=8):
    k2, k1 = p.shape[0] // size, p.shape[1] // size
    trimmed = p[: k2 * size, : k1 * size]
    return trimmed.reshape(k2, size, k1, size).transpose(0, 2, 1, 3), k1, k2


def eme(p):
    b, k1, k2 = blocks(p)
    mx = b.max(axis=(2, 3))
    mn = b.min(axis=(2, 3))
    ok = (mn > 0) & (mx > 0)
    return 2.0 / (k1 * k2) * np.log(mx[ok] / mn[ok]).sum()


def uism(img_u8):
    v = img_u8.astype(np.float64) / 255.0
    total = 0.0
    for c, w in zip(range(3), (0.299, 0.587, 0.114)):
        plane = v[..., c]
        total += w * eme(sobel_mag(plane) * plane)
    return total


def uiconm(img_u8):
    rgb = img_u8.astype(np.float64)
    luma = (0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]) / 255.0
    b, k1, k2 = blocks(luma)
    mx = b.max(axis=(2, 3))
    mn = b.min(axis=(2, 3))
    top = mx - mn
    bot = mx + mn
    ok = (top > 0) & (bot > 0)
    m = top[ok] / bot[ok]
    return (m * np.log(m)).sum() / (k1 * k2)


def uiqm(img_u8):
    return 0.0282 * uicm(img_u8) + 0.2953 * uism(img_u8) + 3.5753 * uiconm(img_u8)


def grayscale_601(img_u8):
    rgb = img_u8.astype(np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.floor(y + 0.5).clip(0, 255).astype(np.uint8)  # round half up


def main():
    testdata = sys.argv[1] if len(sys.argv) > 1 else "crates/uiqa-core/testdata"
    fixture = np.asarray(Image.open(f"{testdata}/fixture.png"))
    blurred = np.asarray(Image.open(f"{testdata}/fixture_blur9.png"))

    ssim_value = structural_similarity(
        grayscale_601(fixture),
        grayscale_601(blurred),
        data_range=255,
        gaussian_weights=True,
        sigma=1.5,
        use_sample_covariance=False,
    )
    print(f"SSIM(fixture, blur9)  = {ssim_value:.12f}")
    print(f"UCIQE(fixture)        = {uciqe(fixture):.12f}")
    u = uiqm(fixture)
    print(f"UICM(fixture)         = {uicm(fixture):.12f}")
    print(f"UISM(fixture)         = {uism(fixture):.12f}")
    print(f"UIConM(fixture)       = {uiconm(fixture):.12f}")
    print(f"UIQM(fixture)         = {u:.12f}")


if __name__ == "__main__":
    main()
