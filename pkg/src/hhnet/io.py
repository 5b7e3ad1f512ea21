"""CSV/JSON reading and writing, and village bundle ingestion."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import re
from io import StringIO
from pathlib import Path

import numpy as np

from hhnet.errors import ValidationError
from hhnet.graph import NetworkBundle, build_network

NODE_COLUMNS = ("person_id", "household_id", "gender")
EDGE_COLUMNS = ("source", "target", "layer", "weight")


def _read_csv(path, required):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise ValidationError(f"{path}: line 1: header lacks column(s) {', '.join(missing)}")
        rows = []
        for row in reader:
            if None in row:
                raise ValidationError(f"{path}: line {reader.line_num}: more fields than header columns")
            rows.append({k: (v.strip() if isinstance(v, str) else v) for k, v in row.items()})
    return rows


def read_nodes(path) -> list[dict]:
    return _read_csv(path, ("person_id", "household_id"))


def read_edges(path) -> list[dict]:
    return _read_csv(path, ("source", "target"))


def load_bundle(nodes_path, edges_path, directed: bool = False) -> NetworkBundle:
    nodes = read_nodes(nodes_path)
    edges = read_edges(edges_path)
    try:
        return build_network(nodes, edges, directed=directed)
    except ValidationError as exc:
        # record k is on line k + 2 of its file (after the header)
        def locate(msg):
            msg = re.sub(r"^node record (\d+)",
                         lambda m: f"{nodes_path}: line {int(m.group(1)) + 2}", msg)
            return re.sub(r"^edge record (\d+)",
                          lambda m: f"{edges_path}: line {int(m.group(1)) + 2}", msg)
        raise ValidationError(f"{nodes_path} / {edges_path}: invalid network",
                              [locate(p) for p in exc.problems]) from None


def read_ids(path) -> list:
    """Seed ids from a JSON file (a list, or an object with a ``seeds`` list)
    or from a text file with one id per line. Ids are returned as strings."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith(("[", "{")):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        if isinstance(data, dict):
            data = data.get("seeds")
        if not isinstance(data, list):
            raise ValidationError(f"{path}: expected a list of ids or an object with 'seeds'")
        return [str(x) for x in data]
    return [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]


def clean(obj):
    """Make a result JSON-safe: numpy scalars to Python, NaN/inf to strings."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=str) if isinstance(obj, (set, frozenset)) else obj
        return [clean(v) for v in items]
    if isinstance(obj, np.ndarray):
        return [clean(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def dumps_json(obj) -> str:
    return json.dumps(clean(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def csv_text(header, rows) -> str:
    buf = StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["undefined" if v is None else v for v in row])
    return buf.getvalue()


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _village_pairs(directory: Path):
    for sub in sorted(p for p in directory.iterdir() if p.is_dir()):
        if (sub / "nodes.csv").exists() or (sub / "edges.csv").exists():
            yield sub.name, sub / "nodes.csv", sub / "edges.csv"
    for nodes in sorted(directory.glob("*_nodes.csv")):
        name = nodes.name[: -len("_nodes.csv")]
        yield name, nodes, directory / f"{name}_edges.csv"


def ingest_village_bundle(directory, directed: bool = False):
    """Load every village under ``directory``.

    Villages are either subdirectories holding ``nodes.csv`` and ``edges.csv``
    or flat ``<name>_nodes.csv`` / ``<name>_edges.csv`` pairs. Villages that fail
    validation are skipped and reported. Returns ``(bundles, skipped)`` where
    ``bundles`` maps village name to NetworkBundle in name order.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"{directory} is not a directory")
    found = list(_village_pairs(directory))
    if not found:
        raise ValidationError(f"{directory}: no village files found")
    bundles, skipped = {}, []
    for name, nodes, edges in sorted(found):
        try:
            if not nodes.exists() or not edges.exists():
                raise ValidationError("missing nodes or edges file")
            bundles[name] = load_bundle(nodes, edges, directed)
        except ValidationError as exc:
            skipped.append({"village": name, "reason": str(exc)})
    return bundles, skipped
