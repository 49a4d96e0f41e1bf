"""Two-point correlators at distances 2^m and critical exponents from channel spectra.

The connected correlator of an infinite tree at distance 2^m is the trace
of the observable pair against the m-th pair-descend image of the
difference between the true two-site state and its classical (product of
marginals) counterpart.  Exponents are base-2 logs of the pair-descend
adjoint's eigenvalues; eigenoperators are the corresponding primary blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tensor_core import TAU_RANK, Isometry, Observable
from . import channels as ch
from . import thermo

CLUSTER_TOL = 1e-7
EIGENOPERATOR_TOL = 1e-8
SERIES_FLOOR = 1e-14


@dataclass(frozen=True)
class CorrelatorQuery:
    theta: Observable
    theta_prime: Observable
    m: int = 0

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("distance exponent must be >= 0, got %d" % self.m)

    def block(self) -> np.ndarray:
        return np.kron(self.theta.matrix, self.theta_prime.matrix)


@dataclass(frozen=True)
class SpectrumEntry:
    kappa: complex
    exponent: complex | None
    algebraic: int
    geometric: int
    eigenoperators: tuple

    @property
    def modulus(self) -> float:
        return abs(self.kappa)


@dataclass(frozen=True)
class SpectrumReport:
    d: int
    entries: tuple
    diagonalizable: bool


@dataclass(frozen=True)
class CorrelatorSeries:
    points: tuple                      # ((delta_alpha, value), ...)
    prefactor: complex                 # value at distance 1
    fitted_exponent: complex | None
    is_eigenoperator: bool
    kappa: complex | None
    degenerate: bool
    log_corrections: bool
    decomposition: tuple | None        # ((kappa, coefficient), ...) when fitted spectrally
    residual: float | None


def pair_difference_infinity(lam: Isometry) -> np.ndarray:
    """Quantum-minus-classical two-site state; traceless, drives all decay."""
    rho2 = thermo.two_site_infinity(lam)
    eta = thermo.classical_pair_infinity(lam)
    return rho2.matrix - eta.matrix


def correlator_thermo(lam: Isometry, query: CorrelatorQuery) -> complex:
    """Connected correlator at distance 2**query.m in the infinite-depth limit."""
    diff = pair_difference_infinity(lam)
    pair = ch.pair_descend_channel(lam)
    moved = ch.unvec(np.linalg.matrix_power(pair.matrix, query.m) @ ch.vec(diff), pair.dim_out)
    return complex(np.trace(query.block() @ moved))


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    """Greedy connected-component clustering of complex values at tolerance tol."""
    order = sorted(range(len(values)), key=lambda i: (-abs(values[i]), values[i].real, values[i].imag))
    clusters: list[list[int]] = []
    for i in order:
        for cluster in clusters:
            if any(abs(values[i] - values[j]) <= tol for j in cluster):
                cluster.append(i)
                break
        else:
            clusters.append([i])
    return clusters


def _spectral_structure(matrix: np.ndarray, cluster_tol: float, tau_rank: float):
    """Cluster the spectrum and measure algebraic/geometric multiplicities."""
    evals = np.linalg.eigvals(matrix)
    dim = matrix.shape[0]
    out = []
    for cluster in _cluster(evals, cluster_tol):
        kappa = complex(np.mean(evals[cluster]))
        shifted = matrix - kappa * np.eye(dim)
        s = np.linalg.svd(shifted, compute_uv=False)
        top = s[0] if s[0] > 0 else 1.0
        geometric = int(np.count_nonzero(s <= tau_rank * top))
        out.append((kappa, len(cluster), geometric, shifted))
    out.sort(key=lambda item: (-abs(item[0]), -item[0].real, -item[0].imag))
    return out


def _log2_or_none(kappa: complex) -> complex | None:
    if abs(kappa) <= 1e-14:
        return None
    return complex(np.log(kappa) / np.log(2.0))


def exponent_spectrum(
    lam: Isometry,
    cluster_tol: float = CLUSTER_TOL,
    tau_rank: float = TAU_RANK,
) -> SpectrumReport:
    """Full eigenstructure of the pair-descend adjoint, sorted by |kappa| descending.

    Geometric multiplicities come from the SVD rank of (A - kappa I) at the
    rank tolerance; eigenoperators are the corresponding null vectors,
    reshaped to two-site operators.
    """
    adj = ch.adjoint(ch.pair_descend_channel(lam))
    mat = adj.matrix
    dim_op = adj.dim_out  # operators live on d^2-dimensional pair space
    entries = []
    diagonalizable = True
    for kappa, algebraic, geometric, shifted in _spectral_structure(mat, cluster_tol, tau_rank):
        _, _, vh = np.linalg.svd(shifted)
        ops = tuple(ch.unvec(vh[dim_op * dim_op - 1 - k].conj(), dim_op) for k in range(geometric))
        entries.append(
            SpectrumEntry(
                kappa=kappa,
                exponent=_log2_or_none(kappa),
                algebraic=algebraic,
                geometric=geometric,
                eigenoperators=ops,
            )
        )
        if algebraic != geometric:
            diagonalizable = False
    return SpectrumReport(d=lam.d, entries=tuple(entries), diagonalizable=diagonalizable)


def _series(lam: Isometry, block: np.ndarray, m_values: Sequence[int]) -> list[tuple[int, complex]]:
    diff = pair_difference_infinity(lam)
    pair = ch.pair_descend_channel(lam)
    dim = pair.dim_out
    points = []
    current = np.array(diff)
    last_m = 0
    for m in m_values:
        steps = m - last_m
        if steps:
            current = ch.unvec(np.linalg.matrix_power(pair.matrix, steps) @ ch.vec(current), dim)
            last_m = m
        points.append((2 ** m, complex(np.trace(block @ current))))
    return points


def powerlaw_check(
    lam: Isometry,
    query,
    m_range: Sequence[int] = range(0, 16),
) -> CorrelatorSeries:
    """Correlator series over distances 2^m with a power-law consistency fit.

    ``query`` is a CorrelatorQuery or a raw two-site block.  If the block is
    an eigenoperator of the pair-descend adjoint, successive ratios must
    reproduce its eigenvalue and the fitted exponent is the base-2 log of
    the mean ratio.  Otherwise the series is decomposed over the spectrum;
    Jordan structure (log corrections) is flagged and the decomposition is
    fitted with polynomial coefficients, reporting the residual.
    """
    m_values = sorted(set(int(m) for m in m_range))
    if not m_values or m_values[0] < 0:
        raise ValueError("m_range must contain nonnegative integers")
    if isinstance(query, CorrelatorQuery):
        block = query.block()
    else:
        block = np.asarray(query, dtype=complex)
    pair = ch.pair_descend_channel(lam)
    dim = pair.dim_out
    if block.shape != (dim, dim):
        raise ValueError("observable block must be %d x %d" % (dim, dim))

    points = _series(lam, block, m_values)
    g = points[0][1] if m_values[0] == 0 else _series(lam, block, [0])[0][1]
    values = np.array([v for _, v in points])
    scale = float(np.abs(values).max()) if values.size else 0.0

    if scale < SERIES_FLOOR:
        return CorrelatorSeries(
            points=tuple(points), prefactor=g, fitted_exponent=None,
            is_eigenoperator=False, kappa=None, degenerate=True,
            log_corrections=False, decomposition=None, residual=None,
        )

    # eigenoperator membership against the adjoint map
    adj_mat = pair.matrix.conj().T
    x = ch.vec(block)
    ax = adj_mat @ x
    kappa_est = complex(np.vdot(x, ax) / np.vdot(x, x))
    member = float(np.linalg.norm(ax - kappa_est * x)) <= EIGENOPERATOR_TOL * float(np.linalg.norm(x))

    if member:
        floor = max(SERIES_FLOOR, 1e-6 * scale)
        ratios = [
            points[i + 1][1] / points[i][1]
            for i in range(len(points) - 1)
            if m_values[i + 1] == m_values[i] + 1
            and abs(points[i][1]) >= floor and abs(points[i + 1][1]) >= floor
        ]
        if not ratios:
            return CorrelatorSeries(
                points=tuple(points), prefactor=g, fitted_exponent=None,
                is_eigenoperator=True, kappa=kappa_est, degenerate=True,
                log_corrections=False, decomposition=None, residual=None,
            )
        kappa_fit = complex(np.mean(ratios))
        return CorrelatorSeries(
            points=tuple(points), prefactor=g,
            fitted_exponent=_log2_or_none(kappa_fit),
            is_eigenoperator=True, kappa=kappa_est, degenerate=False,
            log_corrections=False, decomposition=None,
            residual=float(max(abs(r - kappa_est) for r in ratios)),
        )

    # general block: decompose over the spectrum of the forward map
    structure = _spectral_structure(pair.matrix, CLUSTER_TOL, TAU_RANK)
    jordan = any(alg != geo for _, alg, geo, _ in structure)
    ms = np.array(m_values, dtype=float)
    columns = []
    labels = []
    for kappa, alg, geo, _ in structure:
        if abs(kappa) == 0.0:
            columns.append(np.array([1.0 + 0j if m == 0 else 0.0 for m in m_values]))
            labels.append((kappa, 0))
            continue
        width = max(1, alg - geo + 1) if jordan else 1
        for p in range(width):
            columns.append((kappa ** ms) * (ms ** p))
            labels.append((kappa, p))
    design = np.stack(columns, axis=1)
    coeffs, _, _, _ = np.linalg.lstsq(design, values, rcond=None)
    reconstructed = design @ coeffs
    residual = float(np.abs(reconstructed - values).max())
    decomposition = tuple(
        (labels[i][0], complex(coeffs[i]))
        for i in range(len(labels))
        if labels[i][1] == 0
    )
    contributing = [
        (kappa, coeff) for (kappa, coeff) in decomposition if abs(coeff) > 1e-12 and abs(kappa) > 0
    ]
    fitted = _log2_or_none(max(contributing, key=lambda t: abs(t[0]))[0]) if contributing else None
    return CorrelatorSeries(
        points=tuple(points), prefactor=g, fitted_exponent=fitted,
        is_eigenoperator=False, kappa=None, degenerate=False,
        log_corrections=jordan, decomposition=decomposition, residual=residual,
    )
