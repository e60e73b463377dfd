"""Bench geometry for the paraxial two-source / two-detector layout.

Sources sit on the x axis at x = +/- s/2, detectors at x = +/- d/2 in the
plane z = l.  Each source-detector pair gets a dimensionless propagation
factor u = -i * k0 * l * area / (2 pi R^2) with R the pair distance.
"""

import math
import warnings
from dataclasses import InitVar, dataclass

PARAXIAL_RATIO = 10.0

_POSITIVE_FIELDS = (
    "source_separation",
    "detector_separation",
    "axial_distance",
    "area1",
    "area2",
    "wavenumber",
)


class ParaxialWarning(UserWarning):
    """Axial distance is too small relative to the separations for the
    far-field propagation formula to be trustworthy."""


@dataclass(frozen=True)
class SetupGeometry:
    """Separations, source areas and wavenumber of the two-source bench.

    All lengths in meters, areas in m^2, wavenumber in 1/m.  Pass
    ``validate=False`` to skip the positivity check (degenerate layouts in
    tests); the paraxial condition is only ever a warning.
    """

    source_separation: float
    detector_separation: float
    axial_distance: float
    area1: float
    area2: float
    wavenumber: float
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        if not validate:
            return
        for name in _POSITIVE_FIELDS:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be strictly positive, got {value}")

    @property
    def is_paraxial(self) -> bool:
        return self.axial_distance >= PARAXIAL_RATIO * max(
            self.source_separation, self.detector_separation
        )


@dataclass(frozen=True)
class PropagationFactors:
    """Per-pair propagation factors u (dimensionless) and distances r (m).

    Index convention: first digit is the source (1, 2), second the detector
    (3, 4).  Every u is -i times a positive real.
    """

    u13: complex
    u23: complex
    u14: complex
    u24: complex
    r13: float
    r23: float
    r14: float
    r24: float


def distances(g: SetupGeometry) -> tuple[float, float, float, float]:
    """(r13, r23, r14, r24) for the symmetric placement.

    Source 1 and detector 3 sit on the same side of the axis, so
    r13 = r24 = sqrt((s-d)^2/4 + l^2) and r14 = r23 = sqrt((s+d)^2/4 + l^2).
    """
    near = math.hypot(
        0.5 * (g.source_separation - g.detector_separation), g.axial_distance
    )
    far = math.hypot(
        0.5 * (g.source_separation + g.detector_separation), g.axial_distance
    )
    return near, far, far, near


def propagation_factors(g: SetupGeometry) -> PropagationFactors:
    """Propagation factors for all four source-detector pairs.

    Emits a ParaxialWarning (never an error) when the axial distance is
    below PARAXIAL_RATIO times the larger separation.
    """
    if not g.is_paraxial:
        warnings.warn(
            f"axial distance {g.axial_distance} is below {PARAXIAL_RATIO}x the "
            "larger separation; the far-field propagation factors are "
            "inaccurate in this regime",
            ParaxialWarning,
            stacklevel=2,
        )
    r13, r23, r14, r24 = distances(g)

    def u(area: float, r: float) -> complex:
        return -1j * g.wavenumber * g.axial_distance * area / (2.0 * math.pi * r * r)

    return PropagationFactors(
        u13=u(g.area1, r13),
        u23=u(g.area2, r23),
        u14=u(g.area1, r14),
        u24=u(g.area2, r24),
        r13=r13,
        r23=r23,
        r14=r14,
        r24=r24,
    )
