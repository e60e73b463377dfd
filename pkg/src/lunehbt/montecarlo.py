"""Monte Carlo estimation of the intensity-product correlators.

Samples the Gaussian source ensembles, propagates each draw through the
detector field maps, and averages the product of detector intensities.
Sampling is split over independently seeded PCG64 sub-streams (spawned from
a single 64-bit seed); per-stream moments accumulate in streaming
(Welford/Chan) form and merge in a fixed pairwise tree, so results are
bit-reproducible for a given (seed, n_streams) no matter how streams are
scheduled.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from .correlators import (
    MatrixPair,
    gamma_hbt,
    gamma_mz,
    hbt_transfer_matrices,
    mz_transfer_matrices,
)
from .ensemble import EnsembleParams, fourth_moment, sample_fields, second_moment
from .geometry import SetupGeometry, propagation_factors

CHUNK_SIZE = 1 << 16


@dataclass(frozen=True)
class McConfig:
    """One Monte Carlo run: layout, ensemble, angles, and sampling budget.

    ``n_samples`` is rounded up to a multiple of ``n_streams``; the actual
    count lands in McEstimate.n_effective.
    """

    setup: Literal["hbt", "mz"]
    params: EnsembleParams
    theta3: float
    theta4: float
    n_samples: int
    seed: int = 0
    n_streams: int = 1
    geometry: SetupGeometry | None = None

    def __post_init__(self) -> None:
        if self.setup not in ("hbt", "mz"):
            raise ValueError(f"setup must be 'hbt' or 'mz', got {self.setup!r}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.n_streams < 1:
            raise ValueError(f"n_streams must be >= 1, got {self.n_streams}")
        if self.setup == "hbt" and self.geometry is None:
            raise ValueError("the hbt setup requires a geometry")


@dataclass(frozen=True)
class McEstimate:
    """Sample mean of the intensity product with its CLT error bar."""

    mean: float
    std_error: float
    n_effective: int
    analytic: float
    z_score: float


@dataclass
class RunningMoments:
    """Streaming count/mean/M2 accumulator with exact-merge semantics."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add_batch(self, values: np.ndarray) -> None:
        n = int(values.size)
        if n == 0:
            return
        batch_mean = float(values.mean())
        batch_m2 = float(np.square(values - batch_mean).sum())
        self._combine(n, batch_mean, batch_m2)

    def merge(self, other: "RunningMoments") -> None:
        self._combine(other.count, other.mean, other.m2)

    def _combine(self, n: int, mean: float, m2: float) -> None:
        if n == 0:
            return
        total = self.count + n
        delta = mean - self.mean
        self.mean += delta * n / total
        self.m2 += m2 + delta * delta * self.count * n / total
        self.count = total

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 0 else 0.0


def merge_pairwise(parts: Sequence[RunningMoments]) -> RunningMoments:
    """Reduce accumulators in a fixed binary tree ordered by index."""
    items = [RunningMoments(p.count, p.mean, p.m2) for p in parts]
    if not items:
        return RunningMoments()
    while len(items) > 1:
        merged = []
        for a, b in zip(items[::2], items[1::2]):
            a.merge(b)
            merged.append(a)
        if len(items) % 2:
            merged.append(items[-1])
        items = merged
    return items[0]


def _transfer_matrices(cfg: McConfig) -> tuple[MatrixPair, MatrixPair]:
    if cfg.setup == "hbt":
        pf = propagation_factors(cfg.geometry)
        return hbt_transfer_matrices(pf, cfg.theta3, cfg.theta4)
    return mz_transfer_matrices(cfg.theta3, cfg.theta4)


def _analytic_total(cfg: McConfig) -> float:
    if cfg.setup == "hbt":
        return gamma_hbt(cfg.geometry, cfg.params, cfg.theta3, cfg.theta4).total
    return gamma_mz(cfg.params, cfg.theta3, cfg.theta4).total


def _intensity_products(
    m_first: MatrixPair,
    m_second: MatrixPair,
    params: EnsembleParams,
    rng: np.random.Generator,
    n: int,
) -> np.ndarray:
    e1, e2 = sample_fields(params, rng, n)
    d_first = e1 @ m_first[0].T + e2 @ m_first[1].T
    d_second = e1 @ m_second[0].T + e2 @ m_second[1].T
    i_first = np.abs(d_first[:, 0]) ** 2 + np.abs(d_first[:, 1]) ** 2
    i_second = np.abs(d_second[:, 0]) ** 2 + np.abs(d_second[:, 1]) ** 2
    return i_first * i_second


def _zscore(diff: float, std_error: float) -> float:
    if std_error > 0.0:
        return diff / std_error
    return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)


def _estimate(cfg: McConfig, seed_seq: np.random.SeedSequence) -> McEstimate:
    m_first, m_second = _transfer_matrices(cfg)
    per_stream = -(-cfg.n_samples // cfg.n_streams)
    parts = []
    for child in seed_seq.spawn(cfg.n_streams):
        rng = np.random.default_rng(child)
        acc = RunningMoments()
        remaining = per_stream
        while remaining > 0:
            n = min(CHUNK_SIZE, remaining)
            acc.add_batch(
                _intensity_products(m_first, m_second, cfg.params, rng, n)
            )
            remaining -= n
        parts.append(acc)
    total = merge_pairwise(parts)
    analytic = _analytic_total(cfg)
    return McEstimate(
        mean=total.mean,
        std_error=total.std_error,
        n_effective=total.count,
        analytic=analytic,
        z_score=_zscore(total.mean - analytic, total.std_error),
    )


def estimate_gamma(cfg: McConfig) -> McEstimate:
    """Estimate the correlator by direct simulation.

    Deterministic for fixed (seed, n_streams, config): the seed feeds a
    SeedSequence whose spawned children drive one PCG64 generator per
    stream, and the per-stream moments merge in a fixed order.
    """
    return _estimate(cfg, np.random.SeedSequence(cfg.seed))


@dataclass(frozen=True)
class FringeFit:
    """Least-squares summary of a fringe scan.

    The two-parameter fit holds the phase at its known value:
    mean(theta) ~ offset + amplitude * cos(2(theta -+ theta_other)).
    ``visibility`` is |amplitude|/offset with a delta-method error bar.
    The free-phase fit (offset_free, amplitude_free, phase) is a reported
    diagnostic: mean(theta) ~ offset_free + amplitude_free * cos(2 theta - phase).
    """

    offset: float
    amplitude: float
    visibility: float
    visibility_std_error: float
    phase: float
    phase_std_error: float
    amplitude_free: float


@dataclass(frozen=True)
class FringeScanResult:
    variable: str
    points: list[tuple[float, McEstimate]] = field(repr=False)
    fit: FringeFit


def _weighted_lstsq(
    design: np.ndarray, y: np.ndarray, sigma: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    # zero-variance points (all-zero ensembles) fall back to unit weights
    safe = np.where(sigma > 0.0, sigma, 1.0)
    w = 1.0 / np.square(safe)
    xtw = design.T * w
    cov = np.linalg.inv(xtw @ design)
    beta = cov @ (xtw @ y)
    return beta, cov


def fringe_scan(
    cfg: McConfig, variable: Literal["theta3", "theta4"], grid: Sequence[float]
) -> FringeScanResult:
    """Estimate the correlator across a polarizer-angle grid and fit the
    fringe.

    Every grid point gets its own spawned sub-stream family, so the point
    estimates are statistically independent while the whole scan stays
    reproducible from cfg.seed.
    """
    if variable not in ("theta3", "theta4"):
        raise ValueError(f"variable must be 'theta3' or 'theta4', got {variable!r}")
    if len(grid) == 0:
        raise ValueError("grid must be nonempty")
    root = np.random.SeedSequence(cfg.seed)
    points = []
    for value, child in zip(grid, root.spawn(len(grid))):
        cfg_point = replace(cfg, **{variable: float(value)})
        points.append((float(value), _estimate(cfg_point, child)))

    other = cfg.theta4 if variable == "theta3" else cfg.theta3
    sign = -1.0 if cfg.setup == "hbt" else 1.0
    angles = np.array([a for a, _ in points])
    y = np.array([est.mean for _, est in points])
    sigma = np.array([est.std_error for _, est in points])

    # fixed-phase model: offset + amplitude * cos(2(theta -+ theta_other))
    design2 = np.column_stack(
        [np.ones_like(angles), np.cos(2.0 * (angles + sign * other))]
    )
    (offset, amplitude), cov2 = _weighted_lstsq(design2, y, sigma)
    if offset != 0.0:
        visibility = abs(amplitude) / offset
        grad = np.array([-abs(amplitude) / offset**2, math.copysign(1.0, amplitude) / offset])
        visibility_se = math.sqrt(max(float(grad @ cov2 @ grad), 0.0))
    else:
        visibility, visibility_se = 0.0, 0.0

    # free-phase diagnostic: offset + c cos(2 theta) + s sin(2 theta)
    design3 = np.column_stack(
        [np.ones_like(angles), np.cos(2.0 * angles), np.sin(2.0 * angles)]
    )
    (offset_free, c, s), cov3 = _weighted_lstsq(design3, y, sigma)
    amp_free = math.hypot(c, s)
    phase = math.atan2(s, c)
    if amp_free > 0.0:
        grad = np.array([0.0, -s, c]) / (amp_free * amp_free)
        phase_se = math.sqrt(max(float(grad @ cov3 @ grad), 0.0))
    else:
        phase_se = 0.0

    fit = FringeFit(
        offset=float(offset),
        amplitude=float(amplitude),
        visibility=float(visibility),
        visibility_std_error=float(visibility_se),
        phase=float(phase),
        phase_std_error=float(phase_se),
        amplitude_free=float(amp_free),
    )
    return FringeScanResult(variable=variable, points=points, fit=fit)


@dataclass(frozen=True)
class MomentCheck:
    """One audited moment: empirical estimate vs. ensemble oracle."""

    category: str
    source: int | None
    indices: tuple[int, ...]
    estimate: complex
    expected: complex
    std_error_re: float
    std_error_im: float
    z: float


@dataclass(frozen=True)
class MomentAuditReport:
    n_samples: int
    checks: list[MomentCheck]

    @property
    def max_abs_z(self) -> float:
        return max(c.z for c in self.checks)


def moment_audit(cfg: McConfig) -> MomentAuditReport:
    """Empirically verify the sampler against the moment oracles.

    Covers first moments, coherency matrices <E* E>, conjugate second
    moments <E E>, cross-source moments, and all sixteen single-source
    fourth-moment index tuples, reporting a z-score per real/imaginary part
    (the per-check z is the worse of the two).
    """
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    n = cfg.n_samples
    e1, e2 = sample_fields(cfg.params, rng, n)
    fields = {1: e1, 2: e2}
    checks: list[MomentCheck] = []

    def add(
        category: str,
        source: int | None,
        indices: tuple[int, ...],
        values: np.ndarray,
        expected: complex,
    ) -> None:
        sqrt_n = math.sqrt(n)
        est_re, est_im = float(values.real.mean()), float(values.imag.mean())
        se_re = float(values.real.std(ddof=1)) / sqrt_n if n > 1 else 0.0
        se_im = float(values.imag.std(ddof=1)) / sqrt_n if n > 1 else 0.0
        z = max(
            abs(_zscore(est_re - expected.real, se_re)),
            abs(_zscore(est_im - expected.imag, se_im)),
        )
        checks.append(
            MomentCheck(
                category=category,
                source=source,
                indices=indices,
                estimate=complex(est_re, est_im),
                expected=complex(expected),
                std_error_re=se_re,
                std_error_im=se_im,
                z=z,
            )
        )

    for a in (1, 2):
        f = fields[a]
        for alpha in (0, 1):
            add("first", a, (alpha,), f[:, alpha], 0j)
        for alpha in (0, 1):
            for beta in (0, 1):
                add(
                    "coherency",
                    a,
                    (alpha, beta),
                    f[:, alpha].conj() * f[:, beta],
                    complex(second_moment(cfg.params, a, alpha, beta)),
                )
                add(
                    "conjugate_second",
                    a,
                    (alpha, beta),
                    f[:, alpha] * f[:, beta],
                    0j,
                )
        for tup in np.ndindex(2, 2, 2, 2):
            ap, bp, alpha, beta = (int(t) for t in tup)
            add(
                "fourth",
                a,
                (ap, bp, alpha, beta),
                f[:, ap].conj() * f[:, bp].conj() * f[:, alpha] * f[:, beta],
                complex(fourth_moment(cfg.params, a, ap, bp, alpha, beta)),
            )
    for alpha in (0, 1):
        for beta in (0, 1):
            add("cross", None, (alpha, beta), e1[:, alpha].conj() * e2[:, beta], 0j)

    return MomentAuditReport(n_samples=n, checks=checks)
