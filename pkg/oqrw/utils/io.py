"""
Walk, state and observable documents.

Documents are JSON, or YAML when the file suffix is ``.yaml`` / ``.yml``.
Matrices are written row by row with each entry as an ``[re, im]`` pair; a
flat row-major list of pairs is accepted on input as well. Floats are
emitted with their shortest round-trip representation, so loading a saved
document reproduces every entry bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import yaml

from oqrw import significant_digits, support_tol
from oqrw.blocks import BlockObservable, BlockProjection, BlockState
from oqrw.exceptions import FileFormatError, StructuralError
from oqrw.utils.math import ComplexMatrix, frobenius
from oqrw.walk_model import TransitionFamily, ValidationMode

logger = logging.getLogger(__name__)

YAML_SUFFIXES = {".yaml", ".yml"}


def read_document(path: str | os.PathLike) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise FileFormatError(f"cannot read file: {e.strerror}", location=str(path))
    try:
        if path.suffix.lower() in YAML_SUFFIXES:
            document = yaml.safe_load(text)
        else:
            document = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"invalid JSON: {e.msg}", location=f"{path}:{e.lineno}:{e.colno}")
    except yaml.YAMLError as e:
        raise FileFormatError(f"invalid YAML: {e}", location=str(path))
    if not isinstance(document, dict):
        raise FileFormatError("top-level value must be a mapping", location=str(path))
    return document


def render_document(document: Mapping, fmt: str = "json") -> str:
    if fmt == "yaml":
        return yaml.safe_dump(dict(document), sort_keys=False)
    return json.dumps(document, indent=2) + "\n"


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temporary sibling and move it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile("w", dir=path.parent, prefix=f".{path.name}.", delete=False) as handle:
        handle.write(text)
        tmp_name = handle.name
    os.replace(tmp_name, path)


def save_document(path: str | os.PathLike, document: Mapping) -> None:
    fmt = "yaml" if Path(path).suffix.lower() in YAML_SUFFIXES else "json"
    write_text_atomic(path, render_document(document, fmt))


# Matrices


def matrix_to_document(matrix: ComplexMatrix) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


def _entry(value, location: str) -> complex:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise FileFormatError("entry must be an [re, im] pair", location=location)
    parts = []
    for part in value:
        if isinstance(part, bool) or not isinstance(part, (int, float)):
            raise FileFormatError(f"non-numeric component {part!r}", location=location)
        parts.append(float(part))
    return complex(parts[0], parts[1])


def matrix_from_document(value, dim: int, location: str) -> ComplexMatrix:
    if not isinstance(value, list):
        raise FileFormatError("matrix must be a list", location=location)
    flat = len(value) == dim * dim and all(
        isinstance(v, (list, tuple)) and len(v) == 2 and not isinstance(v[0], (list, tuple)) for v in value
    )
    if flat:
        rows = [value[r * dim:(r + 1) * dim] for r in range(dim)]
    else:
        rows = value
    if len(rows) != dim:
        raise FileFormatError(f"expected {dim} rows, got {len(rows)}", location=location)
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for r, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            size = len(row) if isinstance(row, list) else type(row).__name__
            raise FileFormatError(f"expected {dim} entries, got {size}", location=f"{location}[{r}]")
        for c, entry in enumerate(row):
            matrix[r, c] = _entry(entry, f"{location}[{r}][{c}]")
    return matrix


def _require(document: Mapping, key: str, kind: type, location: str = ""):
    where = f"{location}.{key}" if location else key
    if key not in document:
        raise FileFormatError("missing key", location=where)
    value = document[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise FileFormatError(f"expected an integer, got {value!r}", location=where)
    if kind is not int and not isinstance(value, kind):
        raise FileFormatError(f"expected {kind.__name__}, got {type(value).__name__}", location=where)
    return value


def _header(document: Mapping) -> tuple[int, tuple[str, ...]]:
    h_dim = _require(document, "h_dim", int)
    if h_dim <= 0:
        raise FileFormatError(f"h_dim must be positive, got {h_dim}", location="h_dim")
    sites = tuple(str(s) for s in _require(document, "sites", list))
    if not sites:
        raise FileFormatError("site list is empty", location="sites")
    return h_dim, sites


def _site(sites: Sequence[str], value, location: str) -> int:
    label = str(value)
    if label not in sites:
        raise FileFormatError(f"unknown site {value!r}", location=location)
    return sites.index(label)


# Walks


def walk_from_document(
    document: Mapping, kraus_tol: float | None = None, validation: ValidationMode | str | None = None
) -> TransitionFamily:
    h_dim, sites = _header(document)
    mode = validation or document.get("validation", ValidationMode.STRICT.value)
    try:
        mode = ValidationMode(mode)
    except ValueError:
        raise FileFormatError(f"unknown validation mode {mode!r}", location="validation")
    transitions = []
    for n, item in enumerate(_require(document, "transitions", list)):
        where = f"transitions[{n}]"
        if not isinstance(item, dict):
            raise FileFormatError("transition must be a mapping", location=where)
        source = _site(sites, _require(item, "from", object, where), f"{where}.from")
        target = _site(sites, _require(item, "to", object, where), f"{where}.to")
        matrix = matrix_from_document(_require(item, "matrix", list, where), h_dim, f"{where}.matrix")
        transitions.append((target, source, matrix))
    kwargs = {} if kraus_tol is None else {"kraus_tol": kraus_tol}
    return TransitionFamily.build(h_dim, sites, transitions, validation_mode=mode, **kwargs)


def walk_to_document(family: TransitionFamily) -> dict:
    return {
        "h_dim": family.h_dim,
        "sites": list(family.sites),
        "validation": family.validation_mode.value,
        "transitions": [
            {"from": family.sites[j], "to": family.sites[i], "matrix": matrix_to_document(b)}
            for i, j, b in family.iter_transitions()
        ],
    }


def load_walk(path, kraus_tol: float | None = None) -> TransitionFamily:
    family = walk_from_document(read_document(path), kraus_tol=kraus_tol)
    logger.info(f"loaded walk with {family.n_sites} sites and {family.n_transitions} transitions from {path}")
    return family


# States and observables


def _blocks_from_document(document: Mapping, h_dim: int, sites: Sequence[str]) -> dict[int, ComplexMatrix]:
    blocks = {}
    for n, item in enumerate(_require(document, "blocks", list)):
        where = f"blocks[{n}]"
        if not isinstance(item, dict):
            raise FileFormatError("block must be a mapping", location=where)
        site = _site(sites, _require(item, "site", object, where), f"{where}.site")
        if site in blocks:
            raise FileFormatError(f"duplicate block for site {sites[site]}", location=where)
        blocks[site] = matrix_from_document(_require(item, "matrix", list, where), h_dim, f"{where}.matrix")

    for n, item in enumerate(document.get("couplings", []) or []):
        where = f"couplings[{n}]"
        if not isinstance(item, dict):
            raise FileFormatError("coupling must be a mapping", location=where)
        matrix = matrix_from_document(_require(item, "matrix", list, where), h_dim, f"{where}.matrix")
        if frobenius(matrix) > support_tol:
            raise FileFormatError("off-diagonal position blocks are not supported", location=where)
    return blocks


def _check_sites(sites: Sequence[str], h_dim: int, family: TransitionFamily | None) -> None:
    if family is None:
        return
    if tuple(sites) != family.sites or h_dim != family.h_dim:
        raise StructuralError(
            f"document (h_dim={h_dim}, sites={list(sites)}) does not match the walk "
            f"(h_dim={family.h_dim}, sites={list(family.sites)})"
        )


def state_from_document(document: Mapping, family: TransitionFamily | None = None, **kwargs) -> BlockState:
    h_dim, sites = _header(document)
    _check_sites(sites, h_dim, family)
    blocks = _blocks_from_document(document, h_dim, sites)
    return BlockState(h_dim=h_dim, n_sites=len(sites), blocks=blocks, **kwargs)


def observable_from_document(
    document: Mapping, family: TransitionFamily | None = None, projection: bool | None = None
) -> BlockObservable:
    h_dim, sites = _header(document)
    _check_sites(sites, h_dim, family)
    blocks = _blocks_from_document(document, h_dim, sites)
    if projection is None:
        projection = document.get("kind", "observable") == "projection"
    if projection:
        return BlockProjection(h_dim=h_dim, n_sites=len(sites), diag_blocks=blocks)
    return BlockObservable.from_blocks(h_dim, len(sites), blocks)


def blocks_to_document(
    h_dim: int, sites: Sequence[str], blocks: Mapping[int, ComplexMatrix], kind: str | None = None
) -> dict:
    document = {"h_dim": h_dim, "sites": list(sites)}
    if kind is not None:
        document["kind"] = kind
    document["blocks"] = [
        {"site": sites[i], "matrix": matrix_to_document(b)} for i, b in sorted(blocks.items())
    ]
    return document


def state_to_document(state: BlockState, sites: Sequence[str]) -> dict:
    return blocks_to_document(state.h_dim, sites, state.blocks)


def observable_to_document(observable: BlockObservable, sites: Sequence[str]) -> dict:
    kind = "projection" if isinstance(observable, BlockProjection) else "observable"
    return blocks_to_document(observable.h_dim, sites, observable.diag_blocks, kind=kind)


def load_state(path, family: TransitionFamily | None = None, **kwargs) -> BlockState:
    return state_from_document(read_document(path), family=family, **kwargs)


def load_observable(path, family: TransitionFamily | None = None, projection: bool | None = None) -> BlockObservable:
    return observable_from_document(read_document(path), family=family, projection=projection)


# Tabular output


def format_number(value: float) -> str:
    return f"{value:.{significant_digits}g}"


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def distribution_csv(distribution: Mapping[int, float], sites: Sequence[str]) -> str:
    return render_csv(["site", "probability"], [(sites[i], float(distribution.get(i, 0.0))) for i in range(len(sites))])


def trajectory_csv(distributions: Sequence[Mapping[int, float]], sites: Sequence[str]) -> str:
    rows = [[n] + [float(d.get(i, 0.0)) for i in range(len(sites))] for n, d in enumerate(distributions)]
    return render_csv(["step", *sites], rows)


def series_csv(series: Sequence[float]) -> str:
    return render_csv(["n", "value"], [(n, float(v)) for n, v in enumerate(series)])
