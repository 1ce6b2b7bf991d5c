"""Dataset manifests: which images, ground truths and method predictions
make up an evaluation run.

Manifest JSON layout::

    {
      "intrinsics": {"fx": ..., "fy": ..., "cx": ..., "cy": ...},   # optional default
      "images": [
        {
          "name": "scene_000",
          "gt_depth": "gt/scene_000.png",
          "predictions": {"method_a": "preds/a/scene_000.png", ...},
          "image": "rgb/scene_000.png",          # optional
          "sky_mask": "sky/scene_000.png",       # optional
          "intrinsics": {...}                    # optional per-image override
        },
        ...
      ]
    }

Relative paths resolve against the manifest's directory. Every referenced
file must exist at load time and every record must cover the same method
set.
"""

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class ImageRecord:
    name: str
    gt_depth: Path
    predictions: dict
    image: Path = None
    sky_mask: Path = None
    intrinsics: dict = None


@dataclass(frozen=True)
class Manifest:
    path: Path
    records: tuple
    methods: tuple
    default_intrinsics: dict = None

    def __len__(self):
        return len(self.records)


def _resolve(base: Path, rel):
    p = Path(rel)
    return p if p.is_absolute() else base / p


def _check_exists(path: Path, what, name):
    if not path.is_file():
        raise FileNotFoundError(f"manifest record {name!r}: missing {what} {path}")


def load_manifest(path) -> Manifest:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    base = path.parent
    images = doc.get("images")
    if not images:
        raise ValueError(f"{path}: manifest lists no images")

    records = []
    methods = None
    for i, entry in enumerate(images):
        name = entry.get("name", f"image_{i:04d}")
        if "gt_depth" not in entry or "predictions" not in entry:
            raise ValueError(f"manifest record {name!r}: needs gt_depth and predictions")
        gt = _resolve(base, entry["gt_depth"])
        _check_exists(gt, "ground-truth depth", name)
        preds = {}
        for method, rel in sorted(entry["predictions"].items()):
            p = _resolve(base, rel)
            _check_exists(p, f"prediction for {method!r}", name)
            preds[method] = p
        record_methods = tuple(sorted(preds))
        if methods is None:
            methods = record_methods
        elif record_methods != methods:
            raise ValueError(
                f"manifest record {name!r}: method set {record_methods} does not "
                f"match {methods}"
            )
        image = sky = None
        if entry.get("image"):
            image = _resolve(base, entry["image"])
            _check_exists(image, "image", name)
        if entry.get("sky_mask"):
            sky = _resolve(base, entry["sky_mask"])
            _check_exists(sky, "sky mask", name)
        records.append(
            ImageRecord(
                name=name,
                gt_depth=gt,
                predictions=preds,
                image=image,
                sky_mask=sky,
                intrinsics=entry.get("intrinsics"),
            )
        )
    return Manifest(
        path=path,
        records=tuple(records),
        methods=methods,
        default_intrinsics=doc.get("intrinsics"),
    )
