"""Questionnaire schemas, response parsing, trait scoring, and synthesis.

A schema names a set of trait dimensions and maps each survey column to one
dimension with a positive or negative keying. Scoring sums Likert answers
per dimension, reversing negatively keyed items as likert_min + likert_max
- value, then normalizes the raw totals to percentages summing to 100.
"""

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .dissimilarity import CATEGORICAL
from .errors import AlignmentError, DegenerateProfileError, ParseError, SchemaError
from .kmodes import CategoricalDataset

POSITIVE = "positive"
NEGATIVE = "negative"

PRESETS = ("ocean50", "scenario", "scenario3", "iwp")

MISSING_POLICIES = ("drop_row", "impute_mode")


@dataclass(frozen=True)
class SurveyItem:
    """One survey column: which dimension it loads on and in which direction."""

    column: str
    dimension: str
    keying: str = POSITIVE
    text: str = ""


@dataclass(frozen=True)
class SurveySchema:
    name: str
    dimensions: tuple[str, ...]
    items: tuple[SurveyItem, ...]
    likert_min: int = 1
    likert_max: int = 5
    missing_code: int = 0

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        object.__setattr__(self, "items", tuple(self.items))
        if not self.dimensions:
            raise SchemaError(f"schema {self.name!r}: no dimensions")
        if len(set(self.dimensions)) != len(self.dimensions):
            raise SchemaError(f"schema {self.name!r}: duplicate dimensions")
        if not self.items:
            raise SchemaError(f"schema {self.name!r}: no items")
        seen = set()
        dims = set(self.dimensions)
        for item in self.items:
            if item.column in seen:
                raise SchemaError(f"schema {self.name!r}: duplicate column {item.column!r}")
            seen.add(item.column)
            if item.dimension not in dims:
                raise SchemaError(
                    f"schema {self.name!r}: item {item.column!r} references unknown "
                    f"dimension {item.dimension!r}"
                )
            if item.keying not in (POSITIVE, NEGATIVE):
                raise SchemaError(
                    f"schema {self.name!r}: item {item.column!r} has invalid keying "
                    f"{item.keying!r}"
                )
        if self.likert_min >= self.likert_max:
            raise SchemaError(
                f"schema {self.name!r}: likert_min must be below likert_max"
            )
        if self.likert_min < 0:
            raise SchemaError(f"schema {self.name!r}: likert_min must be >= 0")

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(item.column for item in self.items)

    def items_for(self, dimension: str) -> tuple[SurveyItem, ...]:
        return tuple(item for item in self.items if item.dimension == dimension)


@dataclass(frozen=True)
class ResponseTable:
    """Parsed (or generated) answers: one id and one int row per respondent."""

    ids: tuple
    columns: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]
    id_name: str = "row_id"

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if len(self.ids) != len(self.rows):
            raise AlignmentError(f"{len(self.ids)} ids for {len(self.rows)} rows")
        for rid, row in zip(self.ids, self.rows):
            if len(row) != len(self.columns):
                raise AlignmentError(
                    f"row {rid!r} has {len(row)} cells, expected {len(self.columns)}"
                )

    @property
    def n(self) -> int:
        return len(self.rows)

    def to_csv(self, delimiter: str = ",") -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
        writer.writerow([self.id_name, *self.columns])
        for rid, row in zip(self.ids, self.rows):
            writer.writerow([rid, *row])
        return buf.getvalue()


@dataclass(frozen=True)
class TraitProfile:
    """Raw per-dimension sums and their percentage normalization."""

    raw: dict
    percent: dict


@dataclass(frozen=True)
class ParseReport:
    rows_read: int
    rows_kept: int
    rows_dropped: int


@dataclass(frozen=True)
class ParseResult:
    table: ResponseTable
    dataset: CategoricalDataset
    report: ParseReport


def _schema_from_dict(doc) -> SurveySchema:
    if not isinstance(doc, dict):
        raise SchemaError(f"schema document must be an object, got {type(doc).__name__}")
    for key in ("name", "dimensions", "items"):
        if key not in doc:
            raise SchemaError(f"schema document is missing {key!r}")
    items = []
    for entry in doc["items"]:
        if not isinstance(entry, dict) or "column" not in entry or "dimension" not in entry:
            raise SchemaError(f"malformed schema item: {entry!r}")
        items.append(
            SurveyItem(
                column=str(entry["column"]),
                dimension=str(entry["dimension"]),
                keying=str(entry.get("keying", POSITIVE)),
                text=str(entry.get("text", "")),
            )
        )
    return SurveySchema(
        name=str(doc["name"]),
        dimensions=tuple(str(d) for d in doc["dimensions"]),
        items=tuple(items),
        likert_min=int(doc.get("likert_min", 1)),
        likert_max=int(doc.get("likert_max", 5)),
        missing_code=int(doc.get("missing_code", 0)),
    )


def load_schema(source) -> SurveySchema:
    """Load a schema from a preset name, a JSON file path, or a dict."""
    if isinstance(source, SurveySchema):
        return source
    if isinstance(source, dict):
        return _schema_from_dict(source)
    if isinstance(source, (str, Path)):
        name = str(source)
        if name in PRESETS:
            text = resources.files("traitclust").joinpath(f"schemas/{name}.json").read_text("utf-8")
        else:
            path = Path(name)
            if not path.is_file():
                raise SchemaError(f"unknown schema preset or missing file: {name!r}")
            text = path.read_text("utf-8")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid schema JSON in {name!r}: {exc}") from exc
        return _schema_from_dict(doc)
    raise SchemaError(f"cannot load a schema from {type(source).__name__}")


def schema_to_dict(schema: SurveySchema) -> dict:
    return {
        "name": schema.name,
        "dimensions": list(schema.dimensions),
        "likert_min": schema.likert_min,
        "likert_max": schema.likert_max,
        "missing_code": schema.missing_code,
        "items": [
            {
                "column": item.column,
                "dimension": item.dimension,
                "keying": item.keying,
                "text": item.text,
            }
            for item in schema.items
        ],
    }


def dump_schema(schema: SurveySchema) -> str:
    return json.dumps(schema_to_dict(schema), indent=2, sort_keys=True) + "\n"


def parse_responses(stream, schema: SurveySchema, delimiter: str = ",",
                    missing_policy: str = "drop_row") -> ParseResult:
    """Parse delimited text into a ResponseTable and its categorical dataset.

    The header must contain every schema column; extra columns are ignored.
    The first non-schema column, if any, supplies row ids (otherwise the row
    ordinal does). Missing answers (== schema.missing_code) are either
    dropped with their row or imputed with the column's most frequent
    observed value, per missing_policy. Likert answers are kept verbatim as
    the dataset's category codes.
    """
    if missing_policy not in MISSING_POLICIES:
        raise ValueError(f"missing_policy must be one of {MISSING_POLICIES}, got {missing_policy!r}")
    text = stream if isinstance(stream, str) else stream.read()
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input: no header row") from None

    wanted = set(schema.columns)
    missing_cols = [c for c in schema.columns if c not in header]
    if missing_cols:
        raise ParseError(f"header is missing schema columns: {', '.join(missing_cols)}")
    for col in schema.columns:
        if header.count(col) > 1:
            raise ParseError(f"header repeats schema column {col!r}")
    positions = [header.index(col) for col in schema.columns]
    id_pos = next((p for p, name in enumerate(header) if name not in wanted), None)
    id_name = header[id_pos] if id_pos is not None else "row_id"

    lo, hi, miss = schema.likert_min, schema.likert_max, schema.missing_code
    ids, values = [], []
    seen_ids = set()
    rows_read = 0
    for lineno, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(header):
            raise ParseError(
                f"row {lineno}: expected {len(header)} cells, found {len(cells)}"
            )
        row = []
        for col, pos in zip(schema.columns, positions):
            cell = cells[pos]
            try:
                v = int(cell)
            except ValueError:
                raise ParseError(
                    f"row {lineno}, column {col!r}: non-integer value {cell!r}"
                ) from None
            if not (lo <= v <= hi or v == miss):
                raise ParseError(
                    f"row {lineno}, column {col!r}: value {v} outside [{lo}, {hi}] "
                    f"and not the missing code {miss}"
                )
            row.append(v)
        rid = cells[id_pos] if id_pos is not None else str(rows_read)
        if rid in seen_ids:
            raise ParseError(f"row {lineno}: duplicate id {rid!r}")
        seen_ids.add(rid)
        ids.append(rid)
        values.append(row)
        rows_read += 1

    if missing_policy == "impute_mode":
        for c in range(len(schema.columns)):
            observed = [row[c] for row in values if row[c] != miss]
            if any(row[c] == miss for row in values):
                if not observed:
                    raise ParseError(
                        f"column {schema.columns[c]!r}: every value is missing, cannot impute"
                    )
                counts = {}
                for v in observed:
                    counts[v] = counts.get(v, 0) + 1
                top = max(counts.values())
                mode = min(v for v, cnt in counts.items() if cnt == top)
                for row in values:
                    if row[c] == miss:
                        row[c] = mode
        kept_ids, kept_rows = ids, values
    else:
        kept_ids, kept_rows = [], []
        for rid, row in zip(ids, values):
            if miss in row:
                continue
            kept_ids.append(rid)
            kept_rows.append(row)

    table = ResponseTable(
        ids=tuple(kept_ids),
        columns=schema.columns,
        rows=tuple(tuple(r) for r in kept_rows),
        id_name=id_name,
    )
    dataset = CategoricalDataset.from_values(
        kept_rows,
        kinds=[CATEGORICAL] * len(schema.columns),
        names=list(schema.columns),
        row_ids=list(kept_ids),
    )
    report = ParseReport(
        rows_read=rows_read,
        rows_kept=len(kept_rows),
        rows_dropped=rows_read - len(kept_rows),
    )
    return ParseResult(table=table, dataset=dataset, report=report)


def score_profile(values, schema: SurveySchema) -> TraitProfile:
    """Sum answers into per-dimension raw scores (reversing negative items)
    and attach the percentage normalization."""
    values = tuple(values)
    if len(values) != len(schema.items):
        raise AlignmentError(
            f"{len(values)} answers for {len(schema.items)} schema items"
        )
    lo, hi = schema.likert_min, schema.likert_max
    raw = {d: 0 for d in schema.dimensions}
    for item, v in zip(schema.items, values):
        if not isinstance(v, int) or not lo <= v <= hi:
            raise ValueError(
                f"item {item.column!r}: answer {v!r} outside the Likert range "
                f"[{lo}, {hi}] (impute or drop missing values before scoring)"
            )
        raw[item.dimension] += v if item.keying == POSITIVE else lo + hi - v
    return TraitProfile(raw=raw, percent=normalize_profile(raw))


def normalize_profile(raw: dict) -> dict:
    """Rescale non-negative raw scores to percentages summing to 100."""
    for d, v in raw.items():
        if v < 0:
            raise ValueError(f"raw score for {d!r} is negative: {v}")
    total = math.fsum(raw.values())
    if total == 0:
        raise DegenerateProfileError("all raw scores are zero; percentages are undefined")
    return {d: 100.0 * v / total for d, v in raw.items()}


def generate_synthetic(n: int, schema: SurveySchema, weights=None, seed: int = 0,
                       noise: float = 0.0) -> ResponseTable:
    """Draw n respondents, each with a latent dominant dimension sampled from
    the mixture, answering that dimension's positive items at likert_max and
    its negative items at likert_min (and the converse on every other
    dimension). With noise > 0, each answer is replaced by a uniform Likert
    draw with that probability. Deterministic for a given seed.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= noise <= 1.0:
        raise ValueError(f"noise must lie in [0, 1], got {noise}")
    dims = schema.dimensions
    if weights is None:
        ws = [1.0 / len(dims)] * len(dims)
    elif isinstance(weights, dict):
        unknown = set(weights) - set(dims)
        if unknown:
            raise ValueError(f"mixture names unknown dimensions: {sorted(unknown)}")
        ws = [float(weights.get(d, 0.0)) for d in dims]
    else:
        ws = [float(w) for w in weights]
        if len(ws) != len(dims):
            raise ValueError(f"{len(ws)} mixture weights for {len(dims)} dimensions")
    if any(w < 0 for w in ws):
        raise ValueError("mixture weights must be non-negative")
    if abs(math.fsum(ws) - 1.0) > 1e-9:
        raise ValueError(f"mixture weights must sum to 1, got {math.fsum(ws)}")

    cumulative = []
    acc = 0.0
    for w in ws:
        acc += w
        cumulative.append(acc)

    rng = random.Random(seed)
    lo, hi = schema.likert_min, schema.likert_max
    ids, rows = [], []
    for i in range(n):
        u = rng.random()
        dominant = dims[-1]
        for d, edge in zip(dims, cumulative):
            if u < edge:
                dominant = d
                break
        row = []
        for item in schema.items:
            on_dominant = item.dimension == dominant
            if item.keying == POSITIVE:
                v = hi if on_dominant else lo
            else:
                v = lo if on_dominant else hi
            if noise > 0.0 and rng.random() < noise:
                v = rng.randint(lo, hi)
            row.append(v)
        ids.append(str(i))
        rows.append(tuple(row))
    return ResponseTable(
        ids=tuple(ids),
        columns=schema.columns,
        rows=tuple(rows),
        id_name="respondent_id",
    )
