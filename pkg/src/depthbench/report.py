"""Metric reports: per-image values, dataset aggregates, method ranking
and emission as JSON / CSV / markdown.

Aggregates are the mean of per-image values in manifest order. Ranks are
dense (ties share a rank and raise a flag). All emitted floats carry 6
significant digits, so emit -> load -> emit is value-identical.
"""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .metrics.image import METRIC_ORDER
from .metrics.pointcloud import POINTCLOUD_METRIC_ORDER

EDGE_METRIC_ORDER = ("EdgeAcc", "EdgeComp")
BOUNDARY_SUFFIX = "@Edges"

_HIGHER_BETTER = {
    "Delta<1.25", "Delta<1.25^2", "Delta<1.25^3",
    "Precision", "Recall", "F-Score", "IoU",
}

# headline orderings: image-based uses AbsRel, pointcloud- and edge-based
# use the F-Score
HEADLINE_KEYS = {
    "image": ("AbsRel", "lower"),
    "pointcloud": ("F-Score", "higher"),
    "edge": ("F-Score" + BOUNDARY_SUFFIX, "higher"),
}


def metric_direction(name):
    """'lower' or 'higher' is better for the named metric."""
    base = name[: -len(BOUNDARY_SUFFIX)] if name.endswith(BOUNDARY_SUFFIX) else name
    return "higher" if base in _HIGHER_BETTER else "lower"


def rank_methods(per_method_aggregates, key, direction=None):
    """Dense ranks over methods for one aggregate metric.

    Ties share a rank and set the tie flag. Returns
    {"key", "direction", "ranks": {method: rank}, "ties": bool}.
    """
    if not per_method_aggregates:
        raise ValueError("no methods to rank")
    if direction is None:
        direction = metric_direction(key)
    if direction not in ("lower", "higher"):
        raise ValueError("direction must be 'lower' or 'higher'")
    values = {}
    for method, aggs in per_method_aggregates.items():
        if key not in aggs:
            raise KeyError(f"method {method!r} has no aggregate {key!r}")
        values[method] = aggs[key]
    ordered = sorted(set(values.values()), reverse=(direction == "higher"))
    rank_of = {v: i + 1 for i, v in enumerate(ordered)}
    ranks = {m: rank_of[v] for m, v in values.items()}
    return {
        "key": key,
        "direction": direction,
        "ranks": ranks,
        "ties": len(ordered) < len(values),
    }


@dataclass
class MetricReport:
    protocol: dict
    methods: list
    image_names: list
    per_image: dict  # method -> list of {"name", "image", "pointcloud", "edge"}
    aggregates: dict  # method -> {metric: value}
    ranks: dict  # metric -> rank_methods() output
    failures: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    def metric_names(self):
        """Aggregate metric names in canonical report order."""
        present = set()
        for aggs in self.aggregates.values():
            present.update(aggs)
        ordered = []
        for name in METRIC_ORDER:
            if name in present:
                ordered.append(name)
        for name in POINTCLOUD_METRIC_ORDER:
            if name in present:
                ordered.append(name)
        for name in EDGE_METRIC_ORDER:
            if name in present:
                ordered.append(name)
        for base in METRIC_ORDER + POINTCLOUD_METRIC_ORDER:
            name = base + BOUNDARY_SUFFIX
            if name in present:
                ordered.append(name)
        ordered.extend(sorted(present - set(ordered)))
        return ordered

    def to_json_dict(self):
        return _round_floats(
            {
                "protocol": self.protocol,
                "methods": list(self.methods),
                "image_names": list(self.image_names),
                "per_image": self.per_image,
                "aggregates": self.aggregates,
                "ranks": self.ranks,
                "failures": self.failures,
                "counts": self.counts,
            }
        )

    @classmethod
    def from_json_dict(cls, doc):
        return cls(
            protocol=doc["protocol"],
            methods=list(doc["methods"]),
            image_names=list(doc["image_names"]),
            per_image=doc["per_image"],
            aggregates=doc["aggregates"],
            ranks=doc["ranks"],
            failures=doc.get("failures", []),
            counts=doc.get("counts", {}),
        )


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def validate_ranks(report: MetricReport):
    """Check every rank column against its aggregate column.

    A method ranked strictly better than another must not have a strictly
    worse aggregate under the declared direction.
    """
    for key, entry in report.ranks.items():
        direction = entry["direction"]
        ranks = entry["ranks"]
        for m_a, r_a in ranks.items():
            v_a = report.aggregates[m_a][entry["key"]]
            for m_b, r_b in ranks.items():
                if r_a >= r_b:
                    continue
                v_b = report.aggregates[m_b][entry["key"]]
                worse = v_a > v_b if direction == "lower" else v_a < v_b
                if worse:
                    raise RuntimeError(
                        f"rank column {key!r} is inconsistent with its aggregates "
                        f"({m_a} ranked {r_a} vs {m_b} ranked {r_b})"
                    )


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _write_json(report: MetricReport, path: Path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(report: MetricReport, path: Path):
    names = report.metric_names()
    rank_cols = [k for k in report.ranks if k.startswith("rank:")]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method"] + names + [c.replace("rank:", "rank_") for c in rank_cols])
        for method in report.methods:
            row = [method]
            for name in names:
                value = report.aggregates[method].get(name, "")
                row.append(_fmt(value) if value != "" else "")
            for col in rank_cols:
                row.append(report.ranks[col]["ranks"][method])
            writer.writerow(row)


def _write_markdown(report: MetricReport, path: Path):
    names = report.metric_names()
    rank_cols = [k for k in report.ranks if k.startswith("rank:")]
    header = ["Method"] + [c.replace("rank:", "Rank ") for c in rank_cols] + names
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join([" --- "] * len(header)) + "|"]
    for method in report.methods:
        row = [method]
        for col in rank_cols:
            row.append(str(report.ranks[col]["ranks"][method]))
        for name in names:
            value = report.aggregates[method].get(name, "")
            row.append(_fmt(value) if value != "" else "")
        lines.append("| " + " | ".join(row) + " |")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_report(report: MetricReport, out_dir, formats=("json",)):
    """Write the report in the requested formats; returns the paths.

    JSON carries full per-image detail, CSV and markdown carry aggregates
    plus ranks. Rank consistency is validated on every emit.
    """
    if not report.methods:
        raise ValueError("report has no methods")
    validate_ranks(report)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    writers = {"json": _write_json, "csv": _write_csv, "markdown": _write_markdown}
    suffix = {"json": ".json", "csv": ".csv", "markdown": ".md"}
    paths = []
    for fmt in formats:
        if fmt not in writers:
            raise ValueError(f"unknown report format {fmt!r}")
        path = out_dir / f"report{suffix[fmt]}"
        writers[fmt](report, path)
        paths.append(path)
    return paths


def load_report(path) -> MetricReport:
    with open(path, "r", encoding="utf-8") as fh:
        return MetricReport.from_json_dict(json.load(fh))
