"""Uniform domain-randomization sampling from a named range table."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# name -> (low, high); multiplicative entries are scale factors, the
# rest are absolute offsets in the noted unit
DEFAULT_RANGES = [
    ("pelvis_torso_mass_scale", 0.9, 1.1),
    ("pelvis_torso_com_offset_m", -0.02, 0.02),
    ("ankle_static_friction_scale", 0.5, 1.5),
    ("ankle_solref_time_s", 0.015, 0.03),
    ("ankle_solref_damping_ratio", 0.5, 2.0),
    ("joint_offset_rad", -0.01, 0.01),
    ("motor_stiffness_scale", 0.8, 1.2),
    ("motor_damping_scale", 0.8, 1.2),
    ("motor_armature_scale", 0.75, 1.25),
]


@dataclass(frozen=True)
class RandomizationSpec:
    entries: tuple  # ordered (name, low, high) triples

    def __post_init__(self):
        entries = tuple((str(n), float(lo), float(hi)) for n, lo, hi in self.entries)
        names = [n for n, _, _ in entries]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names")
        for name, lo, hi in entries:
            if not lo <= hi:
                raise ValueError(f"{name}: low {lo} must be <= high {hi}")
        object.__setattr__(self, "entries", entries)

    def names(self):
        return [n for n, _, _ in self.entries]

    def range_of(self, name: str):
        for n, lo, hi in self.entries:
            if n == name:
                return lo, hi
        raise KeyError(name)


def default_randomization_spec() -> RandomizationSpec:
    return RandomizationSpec(entries=tuple(DEFAULT_RANGES))


def sample_randomization(spec: RandomizationSpec, seed) -> dict:
    """One independent uniform draw per entry, in spec order.

    Deterministic per seed; degenerate ranges [a, a] always yield a.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return {name: float(rng.uniform(lo, hi)) if lo < hi else lo
            for name, lo, hi in spec.entries}


def load_randomization_spec(path) -> RandomizationSpec:
    """Text table, one parameter per line: `name, low, high`."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p for p in line.replace(",", " ").split() if p]
            if len(parts) != 3:
                raise ValueError(f"bad randomization line: {raw!r}")
            entries.append((parts[0], float(parts[1]), float(parts[2])))
    if not entries:
        raise ValueError("empty randomization spec")
    return RandomizationSpec(entries=tuple(entries))


def save_randomization_spec(path, spec: RandomizationSpec) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# parameter_name, low, high\n")
        for name, lo, hi in spec.entries:
            fh.write(f"{name}, {lo!r}, {hi!r}\n")
