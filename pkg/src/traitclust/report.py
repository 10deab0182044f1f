"""Cluster labeling, population trait percentages, fusion, and emission.

A fitted clustering plus per-respondent trait profiles turn into a
ClusterLabeling (each cluster tagged with its dominant dimension) and then a
PercentReport (share of the population per dominant dimension). Reports from
different sources can be fused as a convex combination and emitted as JSON,
a plain-text table, or a dimension,percentage CSV for plotting.
"""

import json
import math
from dataclasses import dataclass, field

from .errors import AlignmentError, ReportError

PROVENANCE_QUESTIONNAIRE = "questionnaire"
PROVENANCE_EXTERNAL = "external"
PROVENANCE_FUSED = "fused"

PROVENANCES = (PROVENANCE_QUESTIONNAIRE, PROVENANCE_EXTERNAL, PROVENANCE_FUSED)

FORMATS = ("json", "text", "piedata")

SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ClusterSummary:
    index: int
    size: int
    dominant: str
    mean_percent: dict


@dataclass(frozen=True)
class ClusterLabeling:
    """Per-cluster dominant dimensions over a fitted model's population."""

    dimensions: tuple[str, ...]
    clusters: tuple[ClusterSummary, ...]
    n: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        object.__setattr__(self, "clusters", tuple(self.clusters))


@dataclass(frozen=True)
class PercentReport:
    """Percentages per dimension, summing to 100 (within 1e-9)."""

    dimensions: tuple[str, ...]
    percent: dict
    provenance: str = PROVENANCE_QUESTIONNAIRE
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        if self.provenance not in PROVENANCES:
            raise ReportError(f"unknown provenance {self.provenance!r}")
        if set(self.percent) != set(self.dimensions):
            raise ReportError("percent keys do not match the dimension list")
        for d, v in self.percent.items():
            if not -SUM_TOLERANCE <= v <= 100.0 + SUM_TOLERANCE:
                raise ReportError(f"percentage for {d!r} out of [0, 100]: {v}")
        total = math.fsum(self.percent.values())
        if abs(total - 100.0) > SUM_TOLERANCE:
            raise ReportError(f"percentages sum to {total!r}, expected 100")


def label_clusters(model, profiles, schema) -> ClusterLabeling:
    """Tag each cluster with the dimension whose mean member percentage is
    highest (earliest schema dimension on ties)."""
    n = len(model.assignments)
    profiles = list(profiles)
    if len(profiles) != n:
        raise AlignmentError(f"{len(profiles)} profiles for {n} assigned rows")
    k = len(model.modes)
    dims = schema.dimensions
    sums = [{d: 0.0 for d in dims} for _ in range(k)]
    sizes = [0] * k
    for profile, l in zip(profiles, model.assignments):
        sizes[l] += 1
        for d in dims:
            sums[l][d] += profile.percent[d]
    summaries = []
    for l in range(k):
        if sizes[l] == 0:
            raise ReportError(f"cluster {l} has no members; cannot label")
        mean = {d: sums[l][d] / sizes[l] for d in dims}
        dominant = dims[0]
        for d in dims:
            if mean[d] > mean[dominant]:
                dominant = d
        summaries.append(
            ClusterSummary(index=l, size=sizes[l], dominant=dominant, mean_percent=mean)
        )
    meta = {
        "k": k,
        "policy": model.config.policy.mode,
        "schema": schema.name,
        "seed": model.config.seed,
    }
    return ClusterLabeling(dimensions=dims, clusters=tuple(summaries), n=n, meta=meta)


def personality_percentages(labeling: ClusterLabeling) -> PercentReport:
    """Population share per dimension: the sizes of all clusters labeled
    with that dimension, as a percentage of all respondents."""
    totals = {d: 0 for d in labeling.dimensions}
    for summary in labeling.clusters:
        totals[summary.dominant] += summary.size
    percent = {d: 100.0 * totals[d] / labeling.n for d in labeling.dimensions}
    return PercentReport(
        dimensions=labeling.dimensions,
        percent=percent,
        provenance=PROVENANCE_QUESTIONNAIRE,
        meta=dict(labeling.meta),
    )


def mean_percentages(profiles, schema, meta=None) -> PercentReport:
    """Alternative aggregate: the arithmetic mean of individual percentage
    profiles (no clustering involved)."""
    profiles = list(profiles)
    if not profiles:
        raise ReportError("cannot aggregate an empty profile list")
    dims = schema.dimensions
    percent = {
        d: math.fsum(p.percent[d] for p in profiles) / len(profiles) for d in dims
    }
    base = {"aggregate": "mean", "schema": schema.name}
    if meta:
        base.update(meta)
    return PercentReport(
        dimensions=dims,
        percent=percent,
        provenance=PROVENANCE_QUESTIONNAIRE,
        meta=base,
    )


def fuse_profiles(a: PercentReport, b: PercentReport, w: float = 0.5) -> PercentReport:
    """Convex combination w*a + (1-w)*b of two reports over the same
    dimension set."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"fusion weight must lie in [0, 1], got {w}")
    if set(a.dimensions) != set(b.dimensions):
        raise ReportError("cannot fuse reports over different dimension sets")
    percent = {d: w * a.percent[d] + (1.0 - w) * b.percent[d] for d in a.dimensions}
    return PercentReport(
        dimensions=a.dimensions,
        percent=percent,
        provenance=PROVENANCE_FUSED,
        meta={"fusion_weight": w, "sources": [a.provenance, b.provenance]},
    )


def _round3(value: float) -> str:
    return format(value, ".3f")


def _report_doc(report: PercentReport) -> dict:
    return {
        "kind": "percent_report",
        "dimensions": list(report.dimensions),
        "percent": {d: report.percent[d] for d in report.dimensions},
        "provenance": report.provenance,
        "metadata": dict(report.meta),
    }


def _labeling_doc(labeling: ClusterLabeling) -> dict:
    return {
        "kind": "cluster_labeling",
        "dimensions": list(labeling.dimensions),
        "n": labeling.n,
        "clusters": [
            {
                "index": c.index,
                "size": c.size,
                "dominant": c.dominant,
                "mean_percent": {d: c.mean_percent[d] for d in labeling.dimensions},
            }
            for c in labeling.clusters
        ],
        "metadata": dict(labeling.meta),
    }


def _labeling_shares(labeling: ClusterLabeling) -> dict:
    totals = {d: 0 for d in labeling.dimensions}
    for c in labeling.clusters:
        totals[c.dominant] += c.size
    return {d: 100.0 * totals[d] / labeling.n for d in labeling.dimensions}


def emit_report(obj, fmt: str = "json") -> str:
    """Serialize a PercentReport or ClusterLabeling.

    json keeps full float precision (emit -> parse is lossless); text and
    piedata render numbers with three decimals, round-half-even. piedata is
    a two-column dimension,percentage CSV.
    """
    if fmt not in FORMATS:
        raise ReportError(f"unknown report format {fmt!r}")
    if isinstance(obj, PercentReport):
        if fmt == "json":
            return json.dumps(_report_doc(obj), indent=2, sort_keys=True) + "\n"
        if fmt == "piedata":
            lines = ["dimension,percentage"]
            lines += [f"{d},{_round3(obj.percent[d])}" for d in obj.dimensions]
            return "\n".join(lines) + "\n"
        width = max(len(d) for d in obj.dimensions)
        lines = [f"trait percentages ({obj.provenance})"]
        for d in obj.dimensions:
            lines.append(f"{d:<{width}}  {_round3(obj.percent[d]):>8}")
        lines.append(f"{'total':<{width}}  {_round3(math.fsum(obj.percent.values())):>8}")
        return "\n".join(lines) + "\n"
    if isinstance(obj, ClusterLabeling):
        if fmt == "json":
            return json.dumps(_labeling_doc(obj), indent=2, sort_keys=True) + "\n"
        if fmt == "piedata":
            shares = _labeling_shares(obj)
            lines = ["dimension,percentage"]
            lines += [f"{d},{_round3(shares[d])}" for d in obj.dimensions]
            return "\n".join(lines) + "\n"
        width = max(len(d) for d in obj.dimensions)
        lines = [f"{obj.n} respondents in {len(obj.clusters)} clusters"]
        for c in obj.clusters:
            lines.append(f"cluster {c.index}: size {c.size}, dominant {c.dominant}")
            for d in obj.dimensions:
                lines.append(f"  {d:<{width}}  {_round3(c.mean_percent[d]):>8}")
        return "\n".join(lines) + "\n"
    raise TypeError(f"cannot emit {type(obj).__name__}")


def parse_report(text: str) -> PercentReport:
    """Inverse of emit_report(..., "json") for percent reports; also accepts
    externally produced documents (provenance "external")."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportError(f"invalid report JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("kind") != "percent_report":
        raise ReportError('expected a JSON object with kind "percent_report"')
    for key in ("dimensions", "percent", "provenance"):
        if key not in doc:
            raise ReportError(f"report document is missing {key!r}")
    dims = tuple(str(d) for d in doc["dimensions"])
    percent = doc["percent"]
    if not isinstance(percent, dict):
        raise ReportError("percent must be an object")
    return PercentReport(
        dimensions=dims,
        percent={str(d): float(v) for d, v in percent.items()},
        provenance=str(doc["provenance"]),
        meta=dict(doc.get("metadata", {})),
    )
