import csv
import enum
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Type

import numpy as np
from pydantic import BaseModel

from app.core.exceptions import ConfigInvalidError
from app.schemas.grid import ComplexField, Grid1D, Representation

logger = logging.getLogger(__name__)

FIELD_SUFFIXES = (".txt", ".npz")


def _cell(value: Any) -> str:
    """CSV cell text; floats use repr so values round-trip exactly."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def flatten(row: BaseModel) -> Dict[str, Any]:
    """Field values in declaration order; nested models are inlined."""
    flat: Dict[str, Any] = {}
    for name, field in type(row).model_fields.items():
        value = getattr(row, name)
        annotation = field.annotation
        nested = _nested_model(annotation)
        if nested is not None:
            inner = flatten(value) if value is not None else {k: None for k in _columns(nested)}
            flat.update(inner)
        else:
            flat[name] = value
    return flat


def _nested_model(annotation: Any) -> Optional[Type[BaseModel]]:
    candidates = getattr(annotation, "__args__", None) or (annotation,)
    for candidate in candidates:
        if isinstance(candidate, type) and issubclass(candidate, BaseModel):
            return candidate
    return None


def _columns(model: Type[BaseModel]) -> List[str]:
    columns: List[str] = []
    for name, field in model.model_fields.items():
        nested = _nested_model(field.annotation)
        columns.extend(_columns(nested) if nested is not None else [name])
    return columns


def write_rows_csv(path: Path, model: Type[BaseModel], rows: Sequence[BaseModel]) -> Path:
    """Header row is always written, even for an empty table."""
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = _columns(model)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            flat = flatten(row)
            writer.writerow([_cell(flat[c]) for c in columns])
    logger.info("wrote %d rows to %s", len(rows), path)
    return path


def write_sidecar(path: Path, config: BaseModel, **sections: Any) -> Path:
    """JSON record of the full config plus any summaries, keys sorted."""
    path.parent.mkdir(parents=True, exist_ok=True)
    payload: Dict[str, Any] = {"config": config.model_dump(mode="json")}
    for key, value in sections.items():
        payload[key] = value.model_dump(mode="json") if isinstance(value, BaseModel) else value
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("wrote %s", path)
    return path


def write_field(path: Path, field: ComplexField) -> Path:
    """Pointer field as a text record (``.txt``) or numpy archive (``.npz``)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = field.grid
    if path.suffix == ".npz":
        np.savez(
            path,
            lo=grid.lo,
            hi=grid.hi,
            n=grid.n,
            representation=field.representation.value,
            real=field.amps.real,
            imag=field.amps.imag,
        )
    elif path.suffix == ".txt":
        header = "\n".join(
            [
                f"representation {field.representation.value}",
                f"lo {grid.lo!r}",
                f"hi {grid.hi!r}",
                f"n {grid.n}",
                "point real imag",
            ]
        )
        data = np.column_stack([grid.points, field.amps.real, field.amps.imag])
        np.savetxt(path, data, fmt="%.17g", header=header)
    else:
        raise ConfigInvalidError(f"field records end in one of {FIELD_SUFFIXES}, got {path.name}")
    logger.info("wrote %s field (%d points) to %s", field.representation.value, grid.n, path)
    return path


def read_field(path: Path) -> ComplexField:
    if path.suffix == ".npz":
        with np.load(path) as data:
            grid = Grid1D(lo=float(data["lo"]), hi=float(data["hi"]), n=int(data["n"]))
            amps = data["real"] + 1j * data["imag"]
            representation = Representation(str(data["representation"]))
        return ComplexField(grid=grid, amps=amps, representation=representation)

    meta: Dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            parts = line[1:].split()
            if len(parts) == 2:
                meta[parts[0]] = parts[1]
    data = np.loadtxt(path, ndmin=2)
    grid = Grid1D(lo=float(meta["lo"]), hi=float(meta["hi"]), n=int(meta["n"]))
    return ComplexField(
        grid=grid,
        amps=data[:, 1] + 1j * data[:, 2],
        representation=Representation(meta["representation"]),
    )
