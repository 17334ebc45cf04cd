"""Configuration files and the flat CSV record format.

Configurations are JSON objects::

    {"group_sizes": [21, 21, 21], "support_rates": [0.5, 0.5, 0.5],
     "benefit": 1000, "cost_cap": 200}

``benefit`` and ``cost_cap`` default to 1000 and 200.  Observed turnouts and
cutpoint samples share one CSV layout with columns
``config_id, rule, group, candidate, value``, one datum per row.
"""

from __future__ import annotations

import csv
import io as _io
import json
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Sequence, Union

from .behavioral import ObservedTurnout
from .model import ElectorateConfig, Rule, ValidationError
from .welfare import CutpointSample

RECORD_COLUMNS = ("config_id", "rule", "group", "candidate", "value")

PathLike = Union[str, Path]


class ParseError(ValueError):
    pass


def config_from_dict(data) -> ElectorateConfig:
    if not isinstance(data, dict):
        raise ValidationError("configuration must be a JSON object", "$")
    for key in ("group_sizes", "support_rates"):
        if key not in data:
            raise ValidationError("required field missing", key)
        if not isinstance(data[key], list):
            raise ValidationError("must be a list of three numbers", key)
    unknown = set(data) - {"group_sizes", "support_rates", "benefit", "cost_cap", "label"}
    if unknown:
        raise ValidationError(f"unknown field(s) {sorted(unknown)}", "$")
    sizes = data["group_sizes"]
    for i, n in enumerate(sizes):
        if isinstance(n, bool) or not isinstance(n, int):
            raise ValidationError(f"must be an integer, got {n!r}", f"group_sizes[{i}]")
    rates = data["support_rates"]
    for i, p in enumerate(rates):
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise ValidationError(f"must be a number, got {p!r}", f"support_rates[{i}]")
    for key in ("benefit", "cost_cap"):
        v = data.get(key)
        if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float))):
            raise ValidationError(f"must be a number, got {v!r}", key)
    return ElectorateConfig(
        tuple(sizes),
        tuple(rates),
        benefit=data.get("benefit", 1000.0),
        cost_cap=data.get("cost_cap", 200.0),
        label=data.get("label"),
    )


def load_config(path: PathLike) -> ElectorateConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 ({exc})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)


def dumps_config(config: ElectorateConfig) -> str:
    return json.dumps(config.to_dict(), indent=2) + "\n"


def save_config(config: ElectorateConfig, path: PathLike) -> None:
    Path(path).write_text(dumps_config(config), encoding="utf-8")


def _read_records(source) -> list[dict]:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    reader = csv.DictReader(_io.StringIO(text))
    if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != list(RECORD_COLUMNS):
        raise ParseError(f"expected header {','.join(RECORD_COLUMNS)}, got {reader.fieldnames}")
    rows = []
    for line, raw in enumerate(reader, start=2):
        row = {k.strip(): (v or "").strip() for k, v in raw.items() if k is not None}
        try:
            rows.append(
                {
                    "config_id": int(row["config_id"]),
                    "rule": Rule.parse(row["rule"]),
                    "group": int(row["group"]),
                    "candidate": row["candidate"].upper(),
                    "value": float(row["value"]),
                }
            )
        except (ValueError, ValidationError) as exc:
            raise ParseError(f"line {line}: {exc}") from None
        if rows[-1]["candidate"] not in ("A", "B"):
            raise ParseError(f"line {line}: candidate must be A or B")
        if rows[-1]["group"] not in (1, 2, 3):
            raise ParseError(f"line {line}: group must be 1, 2 or 3")
    return rows


def read_observed_turnout(source) -> list[ObservedTurnout]:
    """One row per (config, rule, candidate) with the group-1 turnout in ``value``."""
    seen = defaultdict(dict)
    for r in _read_records(source):
        if r["group"] != 1:
            raise ParseError(f"observed turnout is only defined for group 1, got group {r['group']}")
        key = (r["config_id"], r["rule"])
        if r["candidate"] in seen[key]:
            raise ParseError(f"duplicate turnout for config {key[0]} {key[1].value} {r['candidate']}")
        seen[key][r["candidate"]] = r["value"]
    out = []
    for (cid, rule), vals in seen.items():
        if set(vals) != {"A", "B"}:
            raise ParseError(f"config {cid} {rule.value}: need turnout for both candidates")
        out.append(ObservedTurnout(cid, rule, vals["A"], vals["B"]))
    return out


def read_cutpoint_samples(source) -> dict[tuple[int, Rule], dict[str, CutpointSample]]:
    """Group-1 cutpoint samples keyed by (config id, rule), then candidate."""
    values = defaultdict(lambda: defaultdict(list))
    for r in _read_records(source):
        if r["group"] != 1:
            raise ParseError(f"cutpoint samples are only used for group 1, got group {r['group']}")
        values[(r["config_id"], r["rule"])][r["candidate"]].append(r["value"])
    return {
        key: {c: CutpointSample(1, c, tuple(v)) for c, v in by_cand.items()} for key, by_cand in values.items()
    }


def write_records(rows: Sequence[dict], columns: Sequence[str], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row.get(c)) for c in columns])


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "value"):
        return str(v.value)
    return str(v)


def records_from(observed: Iterable[ObservedTurnout]) -> list[dict]:
    rows = []
    for o in observed:
        for cand in ("A", "B"):
            rows.append({"config_id": o.config_id, "rule": o.rule, "group": 1, "candidate": cand, "value": o.get(cand)})
    return rows
