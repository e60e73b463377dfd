"""Intensity-intensity correlators for the two bench layouts.

Both layouts superpose a right-circular branch of source 1 and a
left-circular branch of source 2 at each of two detectors behind linear
polarizers.  The correlator <I_a I_b> then expands into sixteen labeled
terms, one per choice of source in each of the four field factors; only six
survive the Gaussian source statistics.  ``gamma_hbt`` / ``gamma_mz`` give
the six terms and totals in closed form, while ``sixteen_terms`` evaluates
every label through the Wick oracle so the vanishing of the other ten is
computed, not assumed.

Term label convention: the four digits name the source (1 or 2) feeding, in
order, the conjugated then unconjugated factor of the first detector
intensity, then the same pair for the second detector.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .ensemble import EnsembleParams, FieldFactor, FieldSample, wick_expectation
from .geometry import PropagationFactors, SetupGeometry, propagation_factors
from .polarization import (
    Frame,
    JonesVector,
    L,
    Linear,
    R,
    projector,
    tau,
    trace_product,
)

TERM_LABELS: tuple[str, ...] = tuple(
    f"{i}{j}{k}{l}" for i, j, k, l in itertools.product((1, 2), repeat=4)
)

NONZERO_LABELS = frozenset({"1111", "1122", "1221", "2112", "2211", "2222"})

MatrixPair = tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class CorrelationBreakdown:
    """Correlator total with its per-term decomposition.

    ``terms`` maps all sixteen labels to complex values (ten are exactly
    zero, and the 2112 entry is the conjugate of 1221).  The fringe pair
    (coefficient, phase) captures the angle-dependent contribution as
    coefficient * cos(phase).
    """

    total: float
    terms: Mapping[str, complex]
    trace_factor: complex
    fringe_coefficient: float
    fringe_phase: float

    @property
    def geometric_term(self) -> float:
        """Contribution of the polarizer geometry to the correlator."""
        return self.fringe_coefficient * math.cos(self.fringe_phase)


def hbt_transfer_matrices(
    pf: PropagationFactors, theta3: float, theta4: float
) -> tuple[MatrixPair, MatrixPair]:
    """Source-to-detector field maps ((to D3 from S1, from S2), (to D4 ...)).

    Each detector field is the sum over sources of matrix @ source_field:
    circular selection at the source, propagation factor, linear polarizer
    at the detector.
    """
    p_r, p_l = projector(R), projector(L)
    p3, p4 = projector(Linear(theta3)), projector(Linear(theta4))
    return (
        (pf.u13 * p3 @ p_r, pf.u23 * p3 @ p_l),
        (pf.u14 * p4 @ p_r, pf.u24 * p4 @ p_l),
    )


def mz_transfer_matrices(
    theta3: float, theta4: float
) -> tuple[MatrixPair, MatrixPair]:
    """Source-to-detector field maps for the half-silvered-mirror layout.

    Reflection carries -tau2/sqrt(2) (component relabeling between the two
    orthogonal propagation frames plus the sign of the mirror boundary
    condition), transmission carries 1/sqrt(2); both branches pass the
    right-circular polarizer first and a linear polarizer last.
    """
    p_r = projector(R)
    t2 = tau(2)
    p3, p4 = projector(Linear(theta3)), projector(Linear(theta4))
    s = 1.0 / math.sqrt(2.0)
    return (
        (-s * p3 @ t2 @ p_r, s * p3 @ p_r),
        (s * p4 @ p_r, -s * p4 @ t2 @ p_r),
    )


def hbt_detector_fields(
    e: FieldSample, pf: PropagationFactors, theta3: float, theta4: float
) -> tuple[JonesVector, JonesVector]:
    """Fields at the two detectors for one joint source draw (both XY)."""
    (m31, m32), (m41, m42) = hbt_transfer_matrices(pf, theta3, theta4)
    a1, a2 = e.e1.array, e.e2.array
    return (
        JonesVector.from_array(m31 @ a1 + m32 @ a2, Frame.XY),
        JonesVector.from_array(m41 @ a1 + m42 @ a2, Frame.XY),
    )


def mz_detector_fields(
    e: FieldSample, theta3: float, theta4: float
) -> tuple[JonesVector, JonesVector]:
    """Fields at the two detectors of the mirror layout.

    Requires e1 in the XY frame and e2 in the YZ frame; the outputs live in
    YZ (detector 1) and XY (detector 2) respectively.
    """
    if e.e1.frame is not Frame.XY or e.e2.frame is not Frame.YZ:
        raise ValueError(
            "field frames must be (XY, YZ) for the mirror layout, got "
            f"({e.e1.frame.name}, {e.e2.frame.name})"
        )
    (m11, m12), (m21, m22) = mz_transfer_matrices(theta3, theta4)
    a1, a2 = e.e1.array, e.e2.array
    return (
        JonesVector.from_array(m11 @ a1 + m12 @ a2, Frame.YZ),
        JonesVector.from_array(m21 @ a1 + m22 @ a2, Frame.XY),
    )


def _zero_terms() -> dict[str, complex]:
    return {label: 0j for label in TERM_LABELS}


def gamma_hbt(
    g: SetupGeometry, p: EnsembleParams, theta3: float, theta4: float
) -> CorrelationBreakdown:
    """Closed-form correlator for the paraxial layout.

    The six surviving terms are hand-coded products of propagation-factor
    moduli, intensity scales, and the four-projector trace; the fringe part
    is (kappa*kappa'/2) (k0 l / 2pi)^4 (A1 A2 / r13 r23 r14 r24)^2
    cos 2(theta3 - theta4).
    """
    pf = propagation_factors(g)
    tr = trace_product(
        [projector(R), projector(Linear(theta3)), projector(L), projector(Linear(theta4))]
    )
    k, kp = p.kappa, p.kappa_prime
    terms = _zero_terms()
    terms["1111"] = complex(abs(pf.u13) ** 2 * abs(pf.u14) ** 2 * k * k / 2.0)
    terms["1122"] = complex(abs(pf.u13) ** 2 * abs(pf.u24) ** 2 * k * kp / 4.0)
    terms["1221"] = (
        np.conj(pf.u13) * pf.u23 * np.conj(pf.u24) * pf.u14 * k * kp * tr
    )
    terms["2112"] = terms["1221"].conjugate()
    terms["2211"] = complex(abs(pf.u23) ** 2 * abs(pf.u14) ** 2 * k * kp / 4.0)
    terms["2222"] = complex(abs(pf.u23) ** 2 * abs(pf.u24) ** 2 * kp * kp / 2.0)
    total = sum(terms.values()).real
    coeff = (
        (k * kp / 2.0)
        * (g.wavenumber * g.axial_distance / (2.0 * math.pi)) ** 4
        * (g.area1 * g.area2 / (pf.r13 * pf.r23 * pf.r14 * pf.r24)) ** 2
    )
    return CorrelationBreakdown(
        total=total,
        terms=terms,
        trace_factor=tr,
        fringe_coefficient=coeff,
        fringe_phase=2.0 * (theta3 - theta4),
    )


def gamma_mz(
    p: EnsembleParams, theta3: float, theta4: float
) -> CorrelationBreakdown:
    """Closed-form correlator for the mirror layout.

    No geometry enters: the mirror splits intensities equally and the
    detector distances drop out.  Total is
    (kappa^2 + kappa kappa' + kappa'^2)/8 - (kappa kappa'/8) cos 2(theta3 + theta4).
    """
    tr = trace_product(
        [
            projector(R),
            projector(Linear(math.pi / 2.0 - theta3)),
            projector(L),
            projector(Linear(theta4)),
        ]
    )
    k, kp = p.kappa, p.kappa_prime
    terms = _zero_terms()
    terms["1111"] = complex(k * k / 8.0)
    terms["1122"] = complex(k * kp / 16.0)
    terms["1221"] = (k * kp / 4.0) * tr
    terms["2112"] = terms["1221"].conjugate()
    terms["2211"] = complex(k * kp / 16.0)
    terms["2222"] = complex(kp * kp / 8.0)
    total = sum(terms.values()).real
    return CorrelationBreakdown(
        total=total,
        terms=terms,
        trace_factor=tr,
        fringe_coefficient=-k * kp / 8.0,
        fringe_phase=2.0 * (theta3 + theta4),
    )


def sixteen_terms(
    m_first: MatrixPair, m_second: MatrixPair, p: EnsembleParams
) -> dict[str, complex]:
    """All sixteen labeled contributions to <I_first I_second> via the Wick
    oracle.

    With d_first = m_first[0] @ e1 + m_first[1] @ e2 (same for the second
    detector), term ijkl collects the source-(i,j) factors of the first
    intensity and the source-(k,l) factors of the second, and contracts the
    component sums against the Gaussian moments.  Labels whose conjugation
    counts are unbalanced per source come out exactly 0.
    """
    out: dict[str, complex] = {}
    for i, j, k, l in itertools.product((1, 2), repeat=4):
        g_first = m_first[i - 1].conj().T @ m_first[j - 1]
        g_second = m_second[k - 1].conj().T @ m_second[l - 1]
        value = 0j
        for alpha, beta, gamma, delta in itertools.product((0, 1), repeat=4):
            moment = wick_expectation(
                [
                    FieldFactor(i, alpha, True),
                    FieldFactor(j, beta, False),
                    FieldFactor(k, gamma, True),
                    FieldFactor(l, delta, False),
                ],
                p,
            )
            if moment:
                value += g_first[alpha, beta] * g_second[gamma, delta] * moment
        out[f"{i}{j}{k}{l}"] = value
    return out


def gamma_hbt_16terms(
    g: SetupGeometry, p: EnsembleParams, theta3: float, theta4: float
) -> dict[str, complex]:
    """Paraxial-layout terms evaluated through the Wick oracle (no use of
    the hand-coded six-term formulas)."""
    pf = propagation_factors(g)
    m3, m4 = hbt_transfer_matrices(pf, theta3, theta4)
    return sixteen_terms(m3, m4, p)


def gamma_mz_16terms(
    p: EnsembleParams, theta3: float, theta4: float
) -> dict[str, complex]:
    """Mirror-layout terms evaluated through the Wick oracle."""
    m1, m2 = mz_transfer_matrices(theta3, theta4)
    return sixteen_terms(m1, m2, p)
