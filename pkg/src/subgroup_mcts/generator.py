"""Synthetic nominal datasets with planted ground-truth patterns.

The generator hides a configurable number of random descriptions in noise:
each hidden pattern gets a block of positively labeled objects carrying its
values (each object noisy with the given rate, rerolling the pattern's
attribute values uniformly), followed by a smaller block of negatively
labeled objects carrying the exact values, and the table is padded with
uniformly random negative objects. Blocks are laid out in order: for pattern
i the positive block starts at i * (pattern_sup + out_count), so tests can
replay coverage counts independently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .dataset import Dataset, NOMINAL
from .patterns import Description, ValueRestriction

POSITIVE = "+"
NEGATIVE = "-"


@dataclass(frozen=True)
class GeneratorParams:
    nb_obj: int
    nb_attr: int
    domain_size: int
    nb_patterns: int
    pattern_sup: int
    out_factor: float
    noise_rate: float
    seed: int = 0

    def __post_init__(self):
        for field in ("nb_obj", "nb_attr", "domain_size", "nb_patterns", "pattern_sup"):
            if getattr(self, field) < 1:
                raise ValueError(f"{field} must be >= 1")
        for field in ("out_factor", "noise_rate"):
            if not (0.0 <= getattr(self, field) <= 1.0):
                raise ValueError(f"{field} must be in [0, 1]")
        needed = self.nb_patterns * self.pattern_sup * (1.0 + self.out_factor)
        if needed > self.nb_obj:
            raise ValueError(
                f"nb_patterns * pattern_sup * (1 + out_factor) = {needed:g} "
                f"exceeds nb_obj = {self.nb_obj}")

    @property
    def out_count(self) -> int:
        return int(self.pattern_sup * self.out_factor)


@dataclass(frozen=True)
class GroundTruth:
    """The planted descriptions, in block order."""

    hidden: tuple


def generate_artificial(params: GeneratorParams) -> tuple:
    """Build (Dataset, GroundTruth) deterministically from the params and seed."""
    rng = random.Random(params.seed)
    values = [f"v{i}" for i in range(params.domain_size)]
    attr_names = [f"a{i}" for i in range(params.nb_attr)]

    hidden = []
    for _ in range(params.nb_patterns):
        length = rng.randint(1, params.nb_attr)
        attrs = sorted(rng.sample(range(params.nb_attr), length))
        hidden.append({a: rng.choice(values) for a in attrs})

    rows = []
    labels = []

    def random_row():
        return [rng.choice(values) for _ in range(params.nb_attr)]

    for pattern in hidden:
        for _ in range(params.pattern_sup):
            row = random_row()
            noisy = rng.random() < params.noise_rate
            for a, v in pattern.items():
                # a noisy object rerolls the pattern attributes uniformly, so
                # it may still satisfy the pattern by accident
                row[a] = rng.choice(values) if noisy else v
            rows.append(row)
            labels.append(POSITIVE)
        for _ in range(params.out_count):
            row = random_row()
            for a, v in pattern.items():
                row[a] = v
            rows.append(row)
            labels.append(NEGATIVE)
    while len(rows) < params.nb_obj:
        rows.append(random_row())
        labels.append(NEGATIVE)

    columns = [[row[a] for row in rows] for a in range(params.nb_attr)]
    specs = [(name, NOMINAL) for name in attr_names]
    name = f"gen_{params.nb_obj}_{params.nb_attr}_{params.domain_size}"
    data = Dataset.from_columns(name, specs, labels, columns)

    descriptions = []
    for pattern in hidden:
        restrictions = [ValueRestriction(a, v) for a, v in pattern.items()]
        descriptions.append(Description(restrictions))
    return data, GroundTruth(tuple(descriptions))
