"""Exact 2x2 polarization algebra.

Jones two-vectors, circular/linear polarization projectors, the tau matrices
of polarization optics, ordered trace products, four-vertex Bargmann
invariants, and the solid angle of a lune on the Poincare sphere.

All matrices are plain ``numpy`` complex arrays of shape (2, 2); all
functions are pure and thread-safe.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Sequence, Union

import numpy as np

_ANGLE_TOL = 1e-12

IDENTITY = np.eye(2, dtype=complex)


class Frame(Enum):
    """Which Cartesian component pair a transverse two-vector refers to."""

    XY = "xy"
    YZ = "yz"


class Circular(Enum):
    RIGHT = "R"
    LEFT = "L"


R = Circular.RIGHT
L = Circular.LEFT


@dataclass(frozen=True, eq=False)
class Linear:
    """Linear polarization at ``angle`` radians in the transverse plane.

    The angle is stored as given; physically the state is periodic in pi,
    and equality compares angles modulo pi.
    """

    angle: float

    @property
    def canonical_angle(self) -> float:
        """Angle folded into [0, pi)."""
        return self.angle % math.pi

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Linear):
            return NotImplemented
        d = (self.angle - other.angle) % math.pi
        return min(d, math.pi - d) <= _ANGLE_TOL

    def __hash__(self) -> int:
        # equality is tolerance-based mod pi, so only a degenerate hash is safe
        return hash(Linear)


PolState = Union[Circular, Linear]


@dataclass(frozen=True)
class JonesVector:
    """Complex two-component field amplitude in a stated component frame.

    Not normalized in general: instances also represent raw field draws and
    propagated detector fields, not just unit polarization states.
    """

    c0: complex
    c1: complex
    frame: Frame = Frame.XY

    @property
    def array(self) -> np.ndarray:
        return np.array([self.c0, self.c1], dtype=complex)

    def intensity(self) -> float:
        """Squared norm c0*c0.conj() + c1*c1.conj()."""
        return abs(self.c0) ** 2 + abs(self.c1) ** 2

    @classmethod
    def from_array(cls, a, frame: Frame = Frame.XY) -> "JonesVector":
        return cls(complex(a[0]), complex(a[1]), frame)


def ket(state: PolState, frame: Frame = Frame.XY) -> JonesVector:
    """Unit Jones vector of a pure polarization state.

    R -> (1, i)/sqrt(2), L -> (1, -i)/sqrt(2), Linear(t) -> (cos t, sin t).
    """
    a = ket_array(state)
    return JonesVector(complex(a[0]), complex(a[1]), frame)


def ket_array(state: PolState) -> np.ndarray:
    s = 1.0 / math.sqrt(2.0)
    if state is Circular.RIGHT:
        return np.array([s, 1j * s])
    if state is Circular.LEFT:
        return np.array([s, -1j * s])
    if isinstance(state, Linear):
        return np.array([math.cos(state.angle), math.sin(state.angle)], dtype=complex)
    raise TypeError(f"not a polarization state: {state!r}")


def projector(state: PolState) -> np.ndarray:
    """Rank-1 Hermitian projector |s><s| onto a pure polarization state."""
    k = ket_array(state)
    return np.outer(k, k.conj())


def tau(i: int) -> np.ndarray:
    """Tau matrices of polarization optics: the cyclically relabeled Pauli
    triple (tau1 = sigma3, tau2 = sigma1, tau3 = sigma2).

    tau2 also implements mirror reflection of transverse field components.
    """
    if i == 1:
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if i == 2:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if i == 3:
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    raise ValueError(f"tau index must be 1, 2 or 3, got {i}")


def trace_product(matrices: Sequence[np.ndarray]) -> complex:
    """Trace of the ordered product of 2x2 matrices.

    Invariant under cyclic rotation of the argument list.
    """
    if len(matrices) == 0:
        raise ValueError("trace_product needs at least one matrix")
    return complex(np.trace(reduce(np.matmul, matrices)))


def bargmann4(s1: PolState, s2: PolState, s3: PolState, s4: PolState) -> complex:
    """Four-vertex Bargmann invariant <s1|s2><s2|s3><s3|s4><s4|s1>.

    Equals the trace of the product of the four projectors. May be 0 (when
    adjacent states are orthogonal), in which case its phase is undefined;
    callers extracting a phase must handle that case.
    """
    kets = [ket_array(s) for s in (s1, s2, s3, s4)]
    out = 1.0 + 0.0j
    for a, b in zip(kets, kets[1:] + kets[:1]):
        out *= np.vdot(a, b)
    return complex(out)


def lune_solid_angle(theta3: float, theta4: float) -> float:
    """Signed solid angle 4*(theta3 - theta4) of the Poincare-sphere lune
    bounded by the meridians at polar angles 2*theta3 and 2*theta4.

    Reported verbatim, not folded into [0, 4pi); the phase of
    ``bargmann4(R, Linear(theta3), L, Linear(theta4))`` is -Omega/2 mod 2pi.
    """
    return 4.0 * (theta3 - theta4)


def mirror_conjugate(m: np.ndarray) -> np.ndarray:
    """tau2 @ m @ tau2: swaps the circular projectors and sends the linear
    projector at angle t to the one at pi/2 - t. An involution."""
    t2 = tau(2)
    return t2 @ np.asarray(m) @ t2


def is_projector(m: np.ndarray, tol: float = 1e-12) -> bool:
    """True when m is Hermitian and idempotent within ``tol``."""
    m = np.asarray(m)
    return bool(
        np.allclose(m, m.conj().T, rtol=0.0, atol=tol)
        and np.allclose(m @ m, m, rtol=0.0, atol=tol)
    )


def wrap_phase(x: float) -> float:
    """Fold an angle onto the principal branch (-pi, pi]."""
    w = math.remainder(x, math.tau)
    return w if w > -math.pi else w + math.tau
