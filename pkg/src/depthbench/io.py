"""Bit-exact file formats: FMAP float grids, 16-bit depth PNGs, sky-mask
PNGs and plain images.

Formats:
  float map  -- magic "FMAP1\\n", ASCII "W H\\n", then W*H little-endian
                float32 values, row-major. NaN marks invalid pixels.
  depth PNG  -- 16-bit single-channel PNG, meters = raw / 256, raw 0 is
                the invalid sentinel.
  sky mask   -- 8-bit PNG, nonzero = sky.
"""

import numpy as np
from PIL import Image

from .geometry import DepthMap

FMAP_MAGIC = b"FMAP1\n"


def save_float_map(path, grid):
    grid = np.asarray(grid, dtype=np.float32)
    if grid.ndim != 2:
        raise ValueError("float maps are 2D grids")
    h, w = grid.shape
    with open(path, "wb") as fh:
        fh.write(FMAP_MAGIC)
        fh.write(f"{w} {h}\n".encode("ascii"))
        fh.write(grid.astype("<f4").tobytes())


def load_float_map(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(FMAP_MAGIC):
        raise ValueError(f"{path}: not a float map (bad magic)")
    header_end = data.index(b"\n", len(FMAP_MAGIC))
    try:
        w, h = (int(tok) for tok in data[len(FMAP_MAGIC):header_end].split())
    except Exception as exc:
        raise ValueError(f"{path}: bad float map dimensions") from exc
    payload = data[header_end + 1 :]
    if len(payload) != 4 * w * h:
        raise ValueError(f"{path}: truncated float map payload")
    return np.frombuffer(payload, dtype="<f4").reshape(h, w).copy()


def load_depth_png16(path) -> DepthMap:
    """16-bit depth PNG: meters = raw / 256, raw 0 invalid."""
    img = Image.open(path)
    if img.mode not in ("I", "I;16", "I;16B", "I;16L"):
        raise ValueError(f"{path}: expected a 16-bit single-channel PNG, got mode {img.mode}")
    raw = np.asarray(img, dtype=np.int64)
    if raw.ndim != 2:
        raise ValueError(f"{path}: expected a single-channel PNG")
    if raw.min() < 0 or raw.max() > 65535:
        raise ValueError(f"{path}: sample values outside the 16-bit range")
    values = raw / 256.0
    return DepthMap(values, raw > 0)


def save_depth_png16(path, depth: DepthMap):
    raw = np.round(depth.values * 256.0)
    raw = np.clip(raw, 1, 65535)  # keep valid pixels nonzero
    raw = np.where(depth.valid, raw, 0).astype(np.uint16)
    Image.fromarray(raw).save(path, format="PNG")


def load_depth_any(path) -> DepthMap:
    """Load depth by extension: .png as a 16-bit PNG, anything else as a
    float map (NaN / nonpositive = invalid)."""
    if str(path).lower().endswith(".png"):
        return load_depth_png16(path)
    grid = load_float_map(path).astype(np.float64)
    valid = np.isfinite(grid) & (grid > 0.0)
    return DepthMap(np.where(valid, grid, 0.0), valid)


def load_sky_mask(path):
    arr = np.asarray(Image.open(path))
    if arr.ndim == 3:
        arr = arr.max(axis=2)
    return arr != 0


def save_sky_mask(path, mask):
    Image.fromarray(np.asarray(mask, dtype=bool).astype(np.uint8) * 255,
                    mode="L").save(path, format="PNG")


def load_image(path):
    """Load an image as float64 in [0, 1]; .png/.jpg via Pillow, float
    maps as-is."""
    name = str(path).lower()
    if name.endswith((".png", ".jpg", ".jpeg", ".bmp")):
        arr = np.asarray(Image.open(path), dtype=np.float64)
        if arr.ndim == 3 and arr.shape[2] == 4:
            arr = arr[:, :, :3]
        return arr / 255.0
    return load_float_map(path).astype(np.float64)


def save_image_png(path, image):
    arr = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    Image.fromarray(np.round(arr * 255.0).astype(np.uint8)).save(path, format="PNG")
