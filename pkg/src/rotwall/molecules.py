"""Molecular constants, pulse-train parameters and the bundled molecule table.

Everything downstream works in reduced units: hbar = 1, B = 1 and time in
units of the revival time t_rev = pi hbar / B.  Physical inputs (B, D in
cm^-1, temperatures in K) are converted here and nowhere else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from .errors import ConfigError, UnknownMoleculeError

SPEED_OF_LIGHT_CM = 2.99792458e10  # cm / s
K_B_CM = 0.6950348  # Boltzmann constant, cm^-1 / K

MAX_D_OVER_B = 1e-2


@dataclass(frozen=True)
class MoleculeParams:
    name: str
    B: float
    D: float
    g_even: float = 1.0
    g_odd: float = 1.0

    def __post_init__(self):
        if not self.B > 0:
            raise ConfigError(f"{self.name}: rotational constant B must be > 0, got {self.B}")
        if self.D < 0:
            raise ConfigError(f"{self.name}: distortion constant D must be >= 0, got {self.D}")
        if self.D / self.B >= MAX_D_OVER_B:
            raise ConfigError(f"{self.name}: D/B = {self.D / self.B:g} exceeds {MAX_D_OVER_B:g}")
        if self.g_even < 0 or self.g_odd < 0 or self.g_even + self.g_odd <= 0:
            raise ConfigError(f"{self.name}: invalid spin weights ({self.g_even}, {self.g_odd})")

    @property
    def D_over_B(self) -> float:
        return self.D / self.B

    @property
    def t_rev_ps(self) -> float:
        """Revival time pi*hbar/B in picoseconds."""
        return 1e12 / (2.0 * SPEED_OF_LIGHT_CM * self.B)

    def spin_weight(self, J: int) -> float:
        return self.g_even if J % 2 == 0 else self.g_odd

    def reduced_temperature(self, temperature: float) -> float:
        """k_B T in units of B."""
        return K_B_CM * temperature / self.B

    @classmethod
    def from_revival(cls, name, t_rev_ps, D_over_B, g_even=1.0, g_odd=1.0):
        B = 1e12 / (2.0 * SPEED_OF_LIGHT_CM * t_rev_ps)
        return cls(name, B, B * D_over_B, g_even, g_odd)


@dataclass(frozen=True)
class PulseTrainSpec:
    P: float
    N: int = 0
    delta: float = 0.0

    def __post_init__(self):
        if self.P < 0 or not math.isfinite(self.P):
            raise ConfigError(f"kick strength P must be >= 0, got {self.P}")
        if int(self.N) != self.N or self.N < 0:
            raise ConfigError(f"pulse count N must be a non-negative integer, got {self.N}")
        if not abs(self.delta) < 0.5:
            raise ConfigError(f"detuning must satisfy |delta| < 0.5, got {self.delta}")

    @property
    def tau_over_trev(self) -> float:
        return 1.0 + self.delta


class MoleculeDatabase:
    """Name -> :class:`MoleculeParams` mapping loaded from a YAML file."""

    def __init__(self, entries: dict[str, MoleculeParams], sources: dict[str, str] | None = None):
        self.entries = dict(entries)
        self.sources = dict(sources or {})

    @classmethod
    def load(cls, path: str | Path | None = None) -> "MoleculeDatabase":
        if path is None:
            text = resources.files("rotwall.data").joinpath("molecules.yaml").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        raw = yaml.safe_load(text) or {}
        entries, sources = {}, {}
        for name, rec in raw.items():
            try:
                entries[name] = MoleculeParams(
                    name=name,
                    B=float(rec["B"]),
                    D=float(rec["D"]),
                    g_even=float(rec.get("g_even", 1.0)),
                    g_odd=float(rec.get("g_odd", 1.0)),
                )
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"malformed molecule entry {name!r}: {exc}") from exc
            sources[name] = str(rec.get("source", ""))
        return cls(entries, sources)

    def names(self) -> list[str]:
        return list(self.entries)

    def __contains__(self, name):
        return name in self.entries

    def __getitem__(self, name: str) -> MoleculeParams:
        try:
            return self.entries[name]
        except KeyError:
            raise UnknownMoleculeError(
                f"unknown molecule {name!r}; available: {', '.join(self.names())}"
            ) from None


_default_db = None


def get_molecule(name: str) -> MoleculeParams:
    global _default_db
    if _default_db is None:
        _default_db = MoleculeDatabase.load()
    return _default_db[name]
