"""Nearest-neighbor spacing statistics of intramanifold spectra.

The chain is: diagonalize each n-manifold, keep levels inside a scaled
energy window, unfold each manifold separately to unit mean spacing, pool
the spacings, then characterize the result by a Brody distribution

    p(s; q) = (q+1) alpha s^q exp(-alpha s^(q+1)),
    alpha = Gamma((q+2)/(q+1))^(q+1),

which interpolates between Poisson (q=0, uncorrelated levels) and Wigner
(q=1, full level repulsion).  alpha enforces mean spacing 1.  The fit is
maximum likelihood on the raw spacings; histograms are produced for
reporting only.

Unfolding uses a degree-3 polynomial fit of the cumulative level staircase
N(E); the spacings are differences of the fitted smooth counting function
at consecutive levels, rescaled to exact unit mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import minimize_scalar
from scipy.special import gamma as _gamma_fn

from .errors import InsufficientDataError, NumericalError
from .fields import FieldParams
from .perturbation import build_extended_matrix, diagonalize_manifold

__all__ = [
    "LevelSequence",
    "SpacingEnsemble",
    "BrodyFit",
    "SpacingHistogram",
    "window_levels",
    "unfold",
    "pool",
    "brody_alpha",
    "pdf",
    "sample_brody",
    "fit_brody",
    "nns_pipeline_scaled",
    "nns_pipeline",
]

MIN_LEVELS_FOR_UNFOLD = 10
MIN_SPACINGS_FOR_FIT = 50


@dataclass(frozen=True)
class LevelSequence:
    """Ascending eigenvalues of one n-manifold."""

    n: int
    energies: np.ndarray
    params: FieldParams

    @classmethod
    def from_energies(
        cls, n: int, energies: np.ndarray, params: FieldParams, dedup_rtol: float = 1e-13
    ) -> "LevelSequence":
        """Sort and drop near-coincident levels (relative spacing < dedup_rtol)."""
        e = np.sort(np.asarray(energies, dtype=float))
        if e.size:
            scale = np.maximum(np.abs(e[:-1]), np.abs(e[1:]))
            keep = np.concatenate([[True], np.diff(e) > dedup_rtol * scale])
            e = e[keep]
        return cls(n=n, energies=e, params=params)

    def __len__(self) -> int:
        return len(self.energies)


@dataclass(frozen=True)
class SpacingEnsemble:
    """Unit-mean spacings pooled from one or more manifolds."""

    spacings: np.ndarray
    manifolds: tuple[int, ...]
    window: tuple[float, float] | None = None

    def __post_init__(self):
        s = np.asarray(self.spacings, dtype=float)
        object.__setattr__(self, "spacings", s)

    def __len__(self) -> int:
        return len(self.spacings)


def window_levels(seq: LevelSequence, se_target: float, sg: float) -> LevelSequence:
    """Keep levels whose scaled energy n^2 E lies within 0.1 sg of se_target."""
    se = seq.n**2 * seq.energies
    mask = np.abs(se - se_target) <= 0.1 * sg
    return LevelSequence(n=seq.n, energies=seq.energies[mask], params=seq.params)


def unfold(seq: LevelSequence, degree: int = 3) -> SpacingEnsemble:
    """Unfold one manifold's levels to unit mean spacing.

    Fits the staircase midpoints (E_i, i - 1/2) with a polynomial of the
    given degree and takes spacings of the fitted counting function.  The
    result is rescaled to exact unit mean.
    """
    e = seq.energies
    if len(e) < MIN_LEVELS_FOR_UNFOLD:
        raise InsufficientDataError(
            f"unfolding needs >= {MIN_LEVELS_FOR_UNFOLD} levels, got {len(e)}"
        )
    counts = np.arange(len(e)) + 0.5
    fit = Polynomial.fit(e, counts, deg=degree)
    smooth = fit(e)
    spac = np.diff(smooth)
    if np.any(spac <= 0):
        raise NumericalError(
            "unfolding produced nonpositive spacings; the staircase fit is "
            "not monotone over this window"
        )
    spac /= spac.mean()
    return SpacingEnsemble(spacings=spac, manifolds=(seq.n,))


def pool(ensembles: list[SpacingEnsemble]) -> SpacingEnsemble:
    """Concatenate per-manifold ensembles (order does not affect fits)."""
    if not ensembles:
        raise InsufficientDataError("nothing to pool")
    spac = np.concatenate([e.spacings for e in ensembles])
    mans = tuple(m for e in ensembles for m in e.manifolds)
    windows = {e.window for e in ensembles}
    window = windows.pop() if len(windows) == 1 else None
    return SpacingEnsemble(spacings=spac, manifolds=mans, window=window)


def brody_alpha(q: float) -> float:
    """Normalization constant Gamma((q+2)/(q+1))^(q+1) of the Brody density."""
    return float(_gamma_fn((q + 2.0) / (q + 1.0)) ** (q + 1.0))


def pdf(family: str, s, q: float | None = None):
    """Spacing density of the poisson, wigner, or brody family at s >= 0."""
    s = np.asarray(s, dtype=float)
    if family == "poisson":
        return np.exp(-s)
    if family == "wigner":
        return (math.pi / 2.0) * s * np.exp(-(math.pi / 4.0) * s * s)
    if family == "brody":
        if q is None or not 0.0 <= q <= 1.0:
            raise ValueError(f"brody needs q in [0, 1], got {q}")
        a = brody_alpha(q)
        with np.errstate(divide="ignore"):
            sq = np.where(s > 0, s, 1.0) ** q
            sq = np.where(s > 0, sq, 1.0 if q == 0.0 else 0.0)
        return (q + 1.0) * a * sq * np.exp(-a * s ** (q + 1.0))
    raise ValueError(f"unknown family {family!r}")


def sample_brody(q: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw spacings from the Brody density via the analytic inverse CDF.

    The CDF is 1 - exp(-alpha s^(q+1)), so s = (-log(1-u)/alpha)^(1/(q+1)).
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    a = brody_alpha(q)
    u = rng.random(size)
    return (-np.log1p(-u) / a) ** (1.0 / (q + 1.0))


@dataclass(frozen=True)
class BrodyFit:
    """Maximum-likelihood Brody parameter with a curvature error bar."""

    q: float
    alpha: float
    log_likelihood: float
    q_err: float
    n_samples: int


def _brody_loglik(q: float, s: np.ndarray, logs: np.ndarray) -> float:
    a = brody_alpha(q)
    return float(
        len(s) * (math.log(q + 1.0) + math.log(a))
        + q * logs.sum()
        - a * np.sum(s ** (q + 1.0))
    )


def fit_brody(ens: SpacingEnsemble) -> BrodyFit:
    """Fit q in [0, 1] by bounded 1-D likelihood maximization on raw spacings."""
    s = ens.spacings
    if len(s) < MIN_SPACINGS_FOR_FIT:
        raise InsufficientDataError(
            f"Brody fit needs >= {MIN_SPACINGS_FOR_FIT} spacings, got {len(s)}"
        )
    if np.any(s <= 0):
        raise ValueError("spacings must be positive")
    if s.max() - s.min() < 1e-12 * s.mean():
        raise NumericalError("degenerate ensemble: all spacings equal")
    logs = np.log(s)

    res = minimize_scalar(
        lambda q: -_brody_loglik(q, s, logs),
        bounds=(0.0, 1.0),
        method="bounded",
        options={"xatol": 1e-6},
    )
    qhat = float(res.x)
    ll = -float(res.fun)
    h = 1e-3
    qlo, qhi = max(qhat - h, 0.0), min(qhat + h, 1.0)
    qmid = 0.5 * (qlo + qhi)
    d2 = (
        _brody_loglik(qhi, s, logs)
        - 2.0 * _brody_loglik(qmid, s, logs)
        + _brody_loglik(qlo, s, logs)
    ) / ((0.5 * (qhi - qlo)) ** 2)
    q_err = 1.0 / math.sqrt(-d2) if d2 < 0 else math.inf
    return BrodyFit(
        q=qhat, alpha=brody_alpha(qhat), log_likelihood=ll, q_err=q_err, n_samples=len(s)
    )


@dataclass(frozen=True)
class SpacingHistogram:
    """Fixed-bin density histogram of a spacing ensemble.

    density integrates to the fraction of samples inside [edges[0], edges[-1]];
    samples outside the range are counted in n_total but in no bin.
    """

    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    n_total: int

    @classmethod
    def from_ensemble(
        cls, ens: SpacingEnsemble, bin_width: float = 0.25, s_max: float = 4.0
    ) -> "SpacingHistogram":
        edges = np.arange(0.0, s_max + 0.5 * bin_width, bin_width)
        counts, _ = np.histogram(ens.spacings, bins=edges)
        density = counts / (len(ens.spacings) * bin_width)
        return cls(edges=edges, counts=counts, density=density, n_total=len(ens.spacings))

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


@dataclass(frozen=True)
class PipelineResult:
    """End-to-end spacing-statistics result with per-manifold bookkeeping."""

    histogram: SpacingHistogram
    fit: BrodyFit
    ensemble: SpacingEnsemble
    levels_per_manifold: dict[int, int] = field(default_factory=dict)


def _pipeline_core(
    jobs: list[tuple[int, FieldParams, float]],
    se_target: float,
    degree: int,
    bin_width: float,
    window_first: bool,
) -> PipelineResult:
    ensembles = []
    per_manifold: dict[int, int] = {}
    for n, fp, sg in jobs:
        mat = build_extended_matrix(n, fp)
        energies = diagonalize_manifold(mat)
        seq = LevelSequence.from_energies(n, energies, fp)
        if window_first:
            seq = window_levels(seq, se_target, sg)
            ens = unfold(seq, degree=degree)
        else:
            ens_full = unfold(seq, degree=degree)
            # map each spacing to its lower level, then cut on the window
            se = n**2 * seq.energies
            keep = (np.abs(se[:-1] - se_target) <= 0.1 * sg) & (
                np.abs(se[1:] - se_target) <= 0.1 * sg
            )
            spac = ens_full.spacings[keep]
            if len(spac) < MIN_LEVELS_FOR_UNFOLD - 1:
                raise InsufficientDataError(
                    f"window kept only {len(spac)} spacings in manifold n={n}"
                )
            spac = spac / spac.mean()
            ens = SpacingEnsemble(spacings=spac, manifolds=(n,))
        per_manifold[n] = len(ens) + 1
        ensembles.append(ens)
    pooled = pool(ensembles)
    hist = SpacingHistogram.from_ensemble(pooled, bin_width=bin_width)
    return PipelineResult(
        histogram=hist,
        fit=fit_brody(pooled),
        ensemble=pooled,
        levels_per_manifold=per_manifold,
    )


def nns_pipeline_scaled(
    sg: float,
    sf: float,
    beta: float,
    n_range=range(50, 61),
    se_target: float = -0.5,
    *,
    degree: int = 3,
    bin_width: float = 0.25,
    window_first: bool = True,
) -> PipelineResult:
    """Spacing statistics at fixed scaled fields n^3 gamma = sg, n^4 f = sf.

    Every manifold in n_range is diagonalized with the laboratory fields
    gamma = sg/n^3, f = sf/n^4 so that all manifolds share the same scaled
    dynamics, then windowed about se_target, unfolded separately, pooled,
    and fitted.
    """
    jobs = [
        (n, FieldParams(gamma=sg / n**3, f=sf / n**4, beta=beta), sg) for n in n_range
    ]
    if not jobs:
        raise InsufficientDataError("empty manifold range")
    return _pipeline_core(jobs, se_target, degree, bin_width, window_first)


def nns_pipeline(
    params: FieldParams,
    n_range=range(50, 61),
    se_target: float = -0.5,
    *,
    degree: int = 3,
    bin_width: float = 0.25,
    window_first: bool = True,
) -> PipelineResult:
    """Spacing statistics at fixed laboratory fields.

    The scaled strengths then differ between manifolds; each manifold's
    window uses its own n^3 gamma.
    """
    jobs = [(n, params, n**3 * params.gamma) for n in n_range]
    if not jobs:
        raise InsufficientDataError("empty manifold range")
    return _pipeline_core(jobs, se_target, degree, bin_width, window_first)
