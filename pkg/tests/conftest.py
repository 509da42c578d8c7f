"""Shared deterministic fixtures: random, natural-looking, and tissue-like rasters."""

from __future__ import annotations

import numpy as np
import pytest

from seamstain.image import RasterImage


def rand_raster(width: int, height: int, seed: int = 0) -> RasterImage:
    rng = np.random.default_rng(seed)
    return RasterImage(rng.integers(0, 256, (height, width, 3), dtype=np.uint8))


def natural_raster(width: int, height: int, seed: int = 0, noise: float = 1.0) -> RasterImage:
    """Smooth low-frequency color fields plus mild noise, photograph-like."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    img = np.empty((height, width, 3), dtype=np.float64)
    for ch in range(3):
        acc = np.full((height, width), 128.0)
        for _ in range(4):
            wavelength = rng.uniform(150.0, 400.0)
            angle = rng.uniform(0, 2 * np.pi)
            phase = rng.uniform(0, 2 * np.pi)
            amp = rng.uniform(8.0, 24.0)
            k = 2 * np.pi / wavelength
            acc += amp * np.sin(k * (np.cos(angle) * x + np.sin(angle) * y) + phase)
        img[:, :, ch] = acc
    if noise > 0:
        img += rng.normal(0.0, noise, img.shape)
    return RasterImage(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8))


def tissue_raster(width: int, height: int, seed: int = 0) -> RasterImage:
    """Saturated magenta-purple fields: every pixel passes the tissue criterion."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    base = np.array([175.0, 85.0, 155.0])
    img = np.empty((height, width, 3), dtype=np.float64)
    for ch in range(3):
        wavelength = rng.uniform(120.0, 300.0)
        angle = rng.uniform(0, 2 * np.pi)
        phase = rng.uniform(0, 2 * np.pi)
        k = 2 * np.pi / wavelength
        wave = np.sin(k * (np.cos(angle) * x + np.sin(angle) * y) + phase)
        img[:, :, ch] = base[ch] + 28.0 * wave
    return RasterImage(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8))


def speckle_tissue_raster(width: int, height: int, seed: int = 0) -> RasterImage:
    """iid magenta-purple speckle: chroma statistics are stationary, so every
    tile sees the same color distribution as the whole slide."""
    rng = np.random.default_rng(seed)
    palette = np.array(
        [[185, 90, 165], [150, 70, 140], [205, 120, 185], [120, 55, 110]],
        dtype=np.float64,
    )
    img = palette[rng.integers(0, len(palette), (height, width))]
    img += rng.normal(0.0, 6.0, img.shape)
    return RasterImage(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8))


def constant_raster(width: int, height: int, rgb: tuple[int, int, int]) -> RasterImage:
    return RasterImage(np.full((height, width, 3), rgb, dtype=np.uint8))


@pytest.fixture
def small_random():
    return rand_raster(37, 23, seed=7)
