"""Isotropic elastic material records, sound speeds and the built-in table.

Moduli are stored in Pa, densities in kg/m^3.  A static permittivity of
``math.inf`` marks a conductor.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal, Optional

SpeedMode = Literal["lame", "c11"]
SPEED_MODES = ("lame", "c11")
CONDUCTOR = math.inf


class MaterialError(ValueError):
    """Invalid material record or material file."""


class MissingC11Error(MaterialError):
    pass


@dataclass(frozen=True)
class ElasticMaterial:
    name: str
    rho: float
    lam: float
    mu: float
    c11: Optional[float] = None
    eps0: float = 1.0

    def __post_init__(self):
        validate(self)

    @property
    def is_conductor(self) -> bool:
        return math.isinf(self.eps0)

    def young_modulus(self) -> float:
        """Isotropic Young's modulus mu (3 lambda + 2 mu) / (lambda + mu)."""
        return self.mu * (3.0 * self.lam + 2.0 * self.mu) / (self.lam + self.mu)


@dataclass(frozen=True)
class SoundSpeeds:
    c_l: float
    c_t: float
    mode: str


def validate(mat: ElasticMaterial) -> None:
    if not mat.name:
        raise MaterialError("material name must be non-empty")
    for field in ("rho", "lam", "mu"):
        value = getattr(mat, field)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise MaterialError(f"{mat.name}: {field} must be a finite number, got {value!r}")
    if mat.rho <= 0:
        raise MaterialError(f"{mat.name}: rho > 0 violated (rho={mat.rho})")
    if mat.mu <= 0:
        raise MaterialError(f"{mat.name}: mu > 0 violated (mu={mat.mu}); fluids are unsupported")
    if mat.lam + 2.0 * mat.mu <= 0:
        raise MaterialError(f"{mat.name}: lambda + 2 mu > 0 violated")
    if mat.c11 is not None and not (mat.c11 > 0 and math.isfinite(mat.c11)):
        raise MaterialError(f"{mat.name}: c11 > 0 violated (c11={mat.c11})")
    if not (mat.eps0 >= 1.0):
        raise MaterialError(f"{mat.name}: eps0 >= 1 violated (eps0={mat.eps0})")


def sound_speeds(mat: ElasticMaterial, mode: SpeedMode = "c11") -> SoundSpeeds:
    """Longitudinal and transverse sound speeds in m/s.

    ``mode="lame"`` uses c_l = sqrt((lambda + 2 mu) / rho); ``mode="c11"``
    uses c_l = sqrt(C11 / rho).  The transverse speed is sqrt(mu / rho) in
    both conventions.
    """
    if mode not in SPEED_MODES:
        raise ValueError(f"unknown speed mode {mode!r}, expected one of {SPEED_MODES}")
    validate(mat)
    if mode == "c11":
        if mat.c11 is None:
            raise MissingC11Error(f"{mat.name}: c11 is required for speed mode 'c11'")
        c_l = math.sqrt(mat.c11 / mat.rho)
    else:
        c_l = math.sqrt((mat.lam + 2.0 * mat.mu) / mat.rho)
    return SoundSpeeds(c_l=c_l, c_t=math.sqrt(mat.mu / mat.rho), mode=mode)


GPA = 1e9

# name, rho, lambda, mu, C11 (GPa), eps(0)
_TABLE = [
    ("Ge", 5323.0, 44.0, 66.7, 126.0, 16.2),
    ("Si", 2329.0, 64.0, 79.6, 166.0, 11.7),
    ("Diamond", 3514.0, 124.0, 578.0, 1070.0, 5.7),
    ("BN_cub", 3487.0, 190.0, 480.0, 820.0, 7.1),
    ("BN_hex", 2180.0, 30.0, 15.0, 75.0, 5.9),
    ("BN_w", 3487.0, 13.4, 38.8, 98.2, 5.9),
    ("In", 7300.0, 39.50, 6.55, 44.50, CONDUCTOR),
]

# Printed sound-speed columns (m/s), kept for comparison only.
TABLE_SPEEDS = {
    "Ge": (4865.27, 3539.85),
    "Si": (8442.47, 5846.17),
    "Diamond": (17447.3, 12823.0),
    "BN_cub": (15334.9, 11732.6),
    "BN_hex": (18548.2, 8295.0),
    "BN_w": (16781.5, 10548.5),
    "In": (2467.30, 946.59),
}


def builtin_table() -> list[ElasticMaterial]:
    return [
        ElasticMaterial(name, rho, lam * GPA, mu * GPA, c11 * GPA, eps)
        for name, rho, lam, mu, c11, eps in _TABLE
    ]


class MaterialDB:
    """Name -> material lookup, optionally extended from a file."""

    def __init__(self, materials: Iterable[ElasticMaterial] = ()):
        self._by_name: dict[str, ElasticMaterial] = {}
        for mat in materials:
            self.add(mat)

    def add(self, mat: ElasticMaterial, replace: bool = False) -> None:
        if mat.name in self._by_name and not replace:
            raise MaterialError(f"duplicate material name {mat.name!r}")
        self._by_name[mat.name] = mat

    def __getitem__(self, name: str) -> ElasticMaterial:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown material {name!r}; known: {', '.join(self._by_name)}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __iter__(self):
        return iter(self._by_name.values())

    def __len__(self) -> int:
        return len(self._by_name)

    def names(self) -> list[str]:
        return list(self._by_name)


def default_db(materials_file: Optional[str | Path] = None) -> MaterialDB:
    db = MaterialDB(builtin_table())
    if materials_file is not None:
        for mat in load_materials(materials_file):
            db.add(mat, replace=True)
    return db


_REQUIRED = ("name", "rho_kg_m3", "lambda_GPa", "mu_GPa")
_OPTIONAL = ("c11_GPa", "eps0")


def _record_to_material(rec: dict, index: int) -> ElasticMaterial:
    where = f"record {index}"
    if not isinstance(rec, dict):
        raise MaterialError(f"{where}: expected an object, got {type(rec).__name__}")
    missing = [k for k in _REQUIRED if k not in rec]
    if missing:
        raise MaterialError(f"{where}: missing field(s) {', '.join(missing)}")
    unknown = sorted(set(rec) - set(_REQUIRED) - set(_OPTIONAL))
    if unknown:
        raise MaterialError(f"{where}: unknown field(s) {', '.join(unknown)}")
    name = rec["name"]
    if not isinstance(name, str):
        raise MaterialError(f"{where}: field 'name' must be a string")
    where = f"record {index} ({name})"

    def number(key):
        value = rec[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MaterialError(f"{where}: field {key!r} must be a number, got {value!r}")
        return float(value)

    eps0 = rec.get("eps0", 1.0)
    if isinstance(eps0, str):
        if eps0.strip().lower() != "inf":
            raise MaterialError(f"{where}: field 'eps0' must be a number or \"inf\", got {eps0!r}")
        eps0 = CONDUCTOR
    elif isinstance(eps0, bool) or not isinstance(eps0, (int, float)):
        raise MaterialError(f"{where}: field 'eps0' must be a number or \"inf\", got {eps0!r}")
    c11 = number("c11_GPa") * GPA if "c11_GPa" in rec and rec["c11_GPa"] is not None else None
    try:
        return ElasticMaterial(
            name=name,
            rho=number("rho_kg_m3"),
            lam=number("lambda_GPa") * GPA,
            mu=number("mu_GPa") * GPA,
            c11=c11,
            eps0=float(eps0),
        )
    except MaterialError as exc:
        raise MaterialError(f"{where}: {exc}") from None


def parse_materials(text: str, source: str = "<string>") -> list[ElasticMaterial]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MaterialError(f"{source}:{exc.lineno}:{exc.colno}: parse error: {exc.msg}") from None
    if not isinstance(data, list):
        raise MaterialError(f"{source}: top level must be an array of material records")
    out: list[ElasticMaterial] = []
    errors: list[str] = []
    seen: set[str] = set()
    for i, rec in enumerate(data):
        try:
            mat = _record_to_material(rec, i)
        except MaterialError as exc:
            errors.append(f"{source}: {exc}")
            continue
        if mat.name in seen:
            errors.append(f"{source}: record {i}: duplicate material name {mat.name!r}")
            continue
        seen.add(mat.name)
        out.append(mat)
    if errors:
        # one line per offending record
        raise MaterialError("\n".join(errors))
    return out


def load_materials(path: str | Path) -> list[ElasticMaterial]:
    """Read a JSON materials file (see README for the schema)."""
    path = Path(path)
    return parse_materials(path.read_text(encoding="utf-8"), source=str(path))


def material_to_record(mat: ElasticMaterial) -> dict:
    rec = {
        "name": mat.name,
        "rho_kg_m3": mat.rho,
        "lambda_GPa": mat.lam / GPA,
        "mu_GPa": mat.mu / GPA,
    }
    if mat.c11 is not None:
        rec["c11_GPa"] = mat.c11 / GPA
    rec["eps0"] = "inf" if mat.is_conductor else mat.eps0
    return rec
