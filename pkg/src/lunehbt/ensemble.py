"""Unpolarized circular complex-Gaussian source ensembles.

Two independent, centered sources with intensity scales kappa and
kappa_prime.  Each complex field component is drawn with independent
N(0, kappa/2) real and imaginary parts, the unique circular Gaussian whose
second moments are <E*_a E_b> = kappa * delta_ab and <E_a E_b> = 0.  Higher
moments then factorize by Gaussian (Isserlis) pairing, which
``wick_expectation`` evaluates by exhaustive matching; it is the trusted
oracle against which the closed-form correlators are checked.
"""

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .polarization import Frame, JonesVector


@dataclass(frozen=True)
class EnsembleParams:
    """Intensity scales of the two source ensembles (arbitrary units >= 0)."""

    kappa: float
    kappa_prime: float

    def __post_init__(self) -> None:
        for name in ("kappa", "kappa_prime"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    def intensity_scale(self, source: int) -> float:
        if source == 1:
            return self.kappa
        if source == 2:
            return self.kappa_prime
        raise ValueError(f"source index must be 1 or 2, got {source}")


class FieldFactor(NamedTuple):
    """One factor E^(source)_component (conjugated or not) in a moment."""

    source: int
    component: int
    conjugated: bool


@dataclass(frozen=True)
class FieldSample:
    """One joint draw of the two source fields."""

    e1: JonesVector
    e2: JonesVector


def sample_fields(
    params: EnsembleParams, rng: np.random.Generator, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` joint field realizations, shape (n, 2) complex per source.

    The draw order (all of source 1, then source 2; real block before
    imaginary block) is part of the reproducibility contract.
    """

    def draw(kappa: float) -> np.ndarray:
        z = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
        return z * math.sqrt(kappa / 2.0)

    return draw(params.kappa), draw(params.kappa_prime)


def sample(
    params: EnsembleParams,
    rng: np.random.Generator,
    frames: tuple[Frame, Frame] = (Frame.XY, Frame.XY),
) -> FieldSample:
    """Draw a single FieldSample; ``frames`` tags the two vectors."""
    e1, e2 = sample_fields(params, rng, 1)
    return FieldSample(
        JonesVector.from_array(e1[0], frames[0]),
        JonesVector.from_array(e2[0], frames[1]),
    )


def _check_component(*components: int) -> None:
    for c in components:
        if c not in (0, 1):
            raise ValueError(f"component index must be 0 (x) or 1 (y), got {c}")


def second_moment(
    params: EnsembleParams, source: int, alpha: int, beta: int
) -> float:
    """<E*_alpha E_beta> = kappa_source * delta(alpha, beta)."""
    _check_component(alpha, beta)
    return params.intensity_scale(source) if alpha == beta else 0.0


def fourth_moment(
    params: EnsembleParams,
    source: int,
    alpha_p: int,
    beta_p: int,
    alpha: int,
    beta: int,
) -> float:
    """<E*_ap E*_bp E_a E_b> = kappa^2 (delta_ap,a delta_bp,b + delta_ap,b delta_bp,a)."""
    _check_component(alpha_p, beta_p, alpha, beta)
    kappa = params.intensity_scale(source)
    return kappa * kappa * (
        float(alpha_p == alpha and beta_p == beta)
        + float(alpha_p == beta and beta_p == alpha)
    )


def wick_expectation(
    factors: Sequence[FieldFactor], params: EnsembleParams
) -> float:
    """Gaussian moment of an ordered product of field components.

    Sums over all perfect matchings that pair each conjugated factor with an
    unconjugated factor of the same source, each pair contributing
    ``second_moment``.  Returns exactly 0.0 when any source has unbalanced
    conjugation counts (this covers all odd-order products).

    Enumerates matchings combinatorially, so it is exact but only intended
    for small orders (fine up to ~10 pairs).
    """
    total = 1.0
    for source in (1, 2):
        conj = [f.component for f in factors if f.source == source and f.conjugated]
        plain = [
            f.component for f in factors if f.source == source and not f.conjugated
        ]
        if len(conj) != len(plain):
            return 0.0
        if not conj:
            continue
        acc = 0.0
        for perm in itertools.permutations(plain):
            acc += math.prod(
                second_moment(params, source, a, b) for a, b in zip(conj, perm)
            )
        total *= acc
    return total
