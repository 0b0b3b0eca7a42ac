"""Dataset files: four CSV tables plus a small YAML manifest.

Schemas (UTF-8, LF, comma-separated, one header row):

    roles.csv         role_id,name,rank
    stakeholders.csv  stakeholder_id,name,role_id,within_role_rank
    requirements.csv  requirement_id,title,status
    ratings.csv       stakeholder_id,requirement_id,rating

The manifest carries the rating scale and optional metadata. Saving is
canonical (sorted rows, shortest round-trip float formatting), so
save(load(dir)) is byte-identical for canonically formatted input.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import yaml

from .domain import (
    RatingCell,
    RatingMatrix,
    Requirement,
    Role,
    Stakeholder,
    Status,
)
from .errors import IntegrityError, ParseError
from .evaluation import SyntheticDataset

ROLES_FILE = "roles.csv"
STAKEHOLDERS_FILE = "stakeholders.csv"
REQUIREMENTS_FILE = "requirements.csv"
RATINGS_FILE = "ratings.csv"
PREDICTED_FILE = "predicted_ratings.csv"
FULL_RATINGS_FILE = "full_ratings.csv"
MANIFEST_FILE = "manifest.yaml"

_HEADERS = {
    ROLES_FILE: ["role_id", "name", "rank"],
    STAKEHOLDERS_FILE: ["stakeholder_id", "name", "role_id", "within_role_rank"],
    REQUIREMENTS_FILE: ["requirement_id", "title", "status"],
    RATINGS_FILE: ["stakeholder_id", "requirement_id", "rating"],
}


@dataclass(frozen=True)
class DatasetBundle:
    roles: tuple[Role, ...]
    stakeholders: tuple[Stakeholder, ...]
    requirements: tuple[Requirement, ...]
    ratings: RatingMatrix
    name: str | None = None


# --- low-level table handling ----------------------------------------------

def _read_table(path: Path, header: list[str]) -> list[tuple[int, list[str]]]:
    """Rows of one CSV file as (line_number, fields), header validated."""
    if not path.is_file():
        raise ParseError("file not found", path=str(path))
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc}", path=str(path)) from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != header:
        raise ParseError(f"expected header {','.join(header)}",
                         path=str(path), line=1)
    out = []
    for index, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}",
                             path=str(path), line=index)
        out.append((index, row))
    return out


def _parse_int(text: str, what: str, path: Path, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {text!r}",
                         path=str(path), line=line, field=what) from None


def _parse_float(text: str, what: str, path: Path, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{what} must be a number, got {text!r}",
                         path=str(path), line=line, field=what) from None


def _require(text: str, what: str, path: Path, line: int) -> str:
    if not text:
        raise ParseError(f"{what} must not be empty", path=str(path),
                         line=line, field=what)
    return text


def _check_rank_permutation(ranks: list[int], what: str) -> None:
    if sorted(ranks) != list(range(1, len(ranks) + 1)):
        raise IntegrityError(f"{what} ranks not a permutation of "
                             f"1..{len(ranks)}: got {sorted(ranks)}")


def _fmt(value: float) -> str:
    return repr(float(value))


# --- loading ----------------------------------------------------------------

def load_manifest(directory: Path) -> dict:
    path = Path(directory) / MANIFEST_FILE
    if not path.is_file():
        return {}
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ParseError(f"bad manifest: {exc}", path=str(path)) from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ParseError("manifest must be a mapping", path=str(path))
    return data


def load_roles(directory: Path) -> tuple[Role, ...]:
    path = Path(directory) / ROLES_FILE
    roles = []
    seen: set[str] = set()
    for line, (role_id, name, rank) in _read_table(path, _HEADERS[ROLES_FILE]):
        role_id = _require(role_id, "role_id", path, line)
        if role_id in seen:
            raise ParseError(f"duplicate role {role_id!r}", path=str(path), line=line)
        seen.add(role_id)
        roles.append(Role(role_id, name, _parse_int(rank, "rank", path, line)))
    _check_rank_permutation([r.rank for r in roles], "role")
    return tuple(roles)


def load_stakeholders(directory: Path,
                      roles: tuple[Role, ...]) -> tuple[Stakeholder, ...]:
    path = Path(directory) / STAKEHOLDERS_FILE
    known_roles = {r.id for r in roles}
    out = []
    seen: set[str] = set()
    for line, (sid, name, role_id, rank) in _read_table(
            path, _HEADERS[STAKEHOLDERS_FILE]):
        sid = _require(sid, "stakeholder_id", path, line)
        if sid in seen:
            raise ParseError(f"duplicate stakeholder {sid!r}", path=str(path),
                             line=line)
        seen.add(sid)
        if role_id not in known_roles:
            raise IntegrityError(
                f"stakeholder {sid!r} references unknown role {role_id!r}",
                field="role_id")
        out.append(Stakeholder(sid, name, role_id,
                               _parse_int(rank, "within_role_rank", path, line)))
    for role in roles:
        ranks = [s.within_role_rank for s in out if s.role_id == role.id]
        if not ranks:
            raise IntegrityError(f"role {role.id!r} has no stakeholders")
        _check_rank_permutation(ranks, f"role {role.id!r} stakeholder")
    return tuple(out)


def load_requirements(directory: Path,
                      filename: str = REQUIREMENTS_FILE) -> tuple[Requirement, ...]:
    path = Path(directory) / filename
    out = []
    seen: set[str] = set()
    for line, (rid, title, status) in _read_table(path, _HEADERS[REQUIREMENTS_FILE]):
        rid = _require(rid, "requirement_id", path, line)
        if rid in seen:
            raise ParseError(f"duplicate requirement {rid!r}", path=str(path),
                             line=line)
        seen.add(rid)
        try:
            parsed = Status(status)
        except ValueError:
            raise ParseError(f"status must be 'elicited' or 'new', got {status!r}",
                             path=str(path), line=line, field="status") from None
        out.append(Requirement(rid, title, parsed))
    return tuple(out)


def load_rating_cells(path: Path) -> dict[tuple[str, str], float]:
    cells: dict[tuple[str, str], float] = {}
    for line, (sid, rid, rating) in _read_table(path, _HEADERS[RATINGS_FILE]):
        key = (_require(sid, "stakeholder_id", path, line),
               _require(rid, "requirement_id", path, line))
        if key in cells:
            raise ParseError(f"duplicate rating for cell {key}", path=str(path),
                             line=line)
        cells[key] = _parse_float(rating, "rating", path, line)
    return cells


def load_dataset(directory: str | Path) -> DatasetBundle:
    """Load and eagerly validate a dataset directory.

    Referential integrity, rank permutations and the rating scale are all
    checked here so that every later operation can assume a well-formed
    project.
    """
    directory = Path(directory)
    manifest = load_manifest(directory)
    scale = manifest.get("scale", {})
    scale_min = float(scale.get("min", 0.0))
    scale_max = float(scale.get("max", 5.0))
    roles = load_roles(directory)
    stakeholders = load_stakeholders(directory, roles)
    requirements = load_requirements(directory)
    cells = load_rating_cells(directory / RATINGS_FILE)
    ratings = RatingMatrix(
        tuple(s.id for s in stakeholders), tuple(r.id for r in requirements),
        {key: RatingCell(value) for key, value in cells.items()},
        scale_min, scale_max)
    return DatasetBundle(roles, stakeholders, requirements, ratings,
                         name=manifest.get("name"))


# --- saving -----------------------------------------------------------------

def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def save_rating_cells(path: Path, cells: dict[tuple[str, str], float]) -> None:
    rows = [[sid, rid, _fmt(value)]
            for (sid, rid), value in sorted(cells.items())]
    _write_csv(path, _HEADERS[RATINGS_FILE], rows)


def save_dataset(bundle: DatasetBundle, directory: str | Path,
                 extra_manifest: dict | None = None) -> None:
    """Write a bundle in canonical form (sorted rows, LF endings)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_csv(directory / ROLES_FILE, _HEADERS[ROLES_FILE],
               [[r.id, r.display_name, str(r.rank)]
                for r in sorted(bundle.roles, key=lambda r: r.id)])
    _write_csv(directory / STAKEHOLDERS_FILE, _HEADERS[STAKEHOLDERS_FILE],
               [[s.id, s.display_name, s.role_id, str(s.within_role_rank)]
                for s in sorted(bundle.stakeholders, key=lambda s: s.id)])
    _write_csv(directory / REQUIREMENTS_FILE, _HEADERS[REQUIREMENTS_FILE],
               [[r.id, r.title, r.status.value]
                for r in sorted(bundle.requirements, key=lambda r: r.id)])
    save_rating_cells(directory / RATINGS_FILE, bundle.ratings.elicited_cells())
    manifest = {
        "name": bundle.name or "dataset",
        "scale": {"min": float(bundle.ratings.scale_min),
                  "max": float(bundle.ratings.scale_max)},
    }
    manifest.update(extra_manifest or {})
    (directory / MANIFEST_FILE).write_text(
        yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8")


# --- synthetic datasets -----------------------------------------------------

def save_synthetic_dataset(dataset: SyntheticDataset,
                           directory: str | Path) -> None:
    """Bundle files for the observed ratings plus the complete ground-truth
    matrix and the generator parameters."""
    directory = Path(directory)
    bundle = DatasetBundle(dataset.roles, dataset.stakeholders,
                           dataset.requirements, dataset.observed,
                           name="synthetic")
    generator = {
        "planted_rank": dataset.planted_rank,
        "noise_std": float(dataset.noise_std),
        "density": float(dataset.density),
        "seed": dataset.seed,
    }
    save_dataset(bundle, directory, extra_manifest={"generator": generator})
    save_rating_cells(directory / FULL_RATINGS_FILE,
                      dataset.full.elicited_cells())


def load_synthetic_dataset(directory: str | Path) -> SyntheticDataset:
    """Inverse of save_synthetic_dataset; needs full_ratings.csv."""
    directory = Path(directory)
    bundle = load_dataset(directory)
    manifest = load_manifest(directory)
    generator = manifest.get("generator", {})
    full_cells = load_rating_cells(directory / FULL_RATINGS_FILE)
    full = RatingMatrix(
        bundle.ratings.stakeholder_ids, bundle.ratings.requirement_ids,
        {key: RatingCell(value) for key, value in full_cells.items()},
        bundle.ratings.scale_min, bundle.ratings.scale_max)
    return SyntheticDataset(
        bundle.roles, bundle.stakeholders, bundle.requirements,
        bundle.ratings, full,
        planted_rank=int(generator.get("planted_rank", 0)),
        noise_std=float(generator.get("noise_std", 0.0)),
        density=float(generator.get("density", 1.0)),
        seed=int(generator.get("seed", 0)))
