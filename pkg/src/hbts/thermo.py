"""Thermodynamic-limit reduced states: channel fixed points and resolvent solves.

All functions here take only the tree isometry — never the top tensor —
because every infinite-depth local quantity is independent of how the tree
is closed at the top.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFixedPointError, ValidationError
from .tensor_core import DensityOp, Isometry, density_op, numerical_rank, partial_trace
from . import channels as ch

TAU_FIX = 1e-10
TAU_SPEC = 1e-10


@dataclass(frozen=True)
class FixedPointResult:
    state: DensityOp
    residual: float
    unit_eigenvalue_multiplicity: int
    mixing: bool


def fixed_point(channel: ch.Channel, tau_fix: float = TAU_FIX, tau_spec: float = TAU_SPEC) -> FixedPointResult:
    """Stationary state of a square CPT channel via dense eigendecomposition.

    The eigenvalue-1 eigenvector is trace-normalized and Hermitized.  A
    degenerate unit eigenvalue aborts with the multiplicity attached; a
    unique unit eigenvalue with extra peripheral spectrum is returned with
    ``mixing=False``.
    """
    if not channel.is_square:
        raise ValueError("fixed points need a square channel, got %d -> %d sites" % (channel.nu_in, channel.nu_out))
    mat = channel.matrix
    evals, evecs = np.linalg.eig(mat)
    unit = np.abs(evals - 1.0) <= tau_spec
    multiplicity = int(np.count_nonzero(unit))
    if multiplicity != 1:
        raise DegenerateFixedPointError(
            "channel %s has unit-eigenvalue multiplicity %d" % (channel.name or "?", multiplicity),
            multiplicity,
        )
    peripheral = int(np.count_nonzero(np.abs(evals) >= 1.0 - tau_spec))
    mixing = peripheral == 1
    vec_fp = evecs[:, int(np.argmin(np.abs(evals - 1.0)))]
    x = ch.unvec(vec_fp, channel.dim_out)
    tr = complex(np.trace(x))
    if abs(tr) < 1e-14:
        raise DegenerateFixedPointError(
            "unit eigenvector of %s is traceless; stationary state undefined" % (channel.name or "?"),
            multiplicity,
        )
    x = x / tr
    x = (x + x.conj().T) / 2.0
    state = density_op(x, channel.d, channel.nu_out, label="fixed-point")
    residual = float(np.abs(ch.apply(channel, x) - x).max())
    if mixing and residual > tau_fix:
        raise ValidationError(
            "stationary state of %s fails its own equation: residual %g" % (channel.name or "?", residual)
        )
    return FixedPointResult(state, residual, multiplicity, mixing)


def _require_mixing(result: FixedPointResult, what: str) -> FixedPointResult:
    if not result.mixing:
        raise DegenerateFixedPointError(
            "%s is not mixing: peripheral spectrum beyond the unit eigenvalue" % what, 1
        )
    return result


def single_site_infinity(lam: Isometry) -> FixedPointResult:
    """Fixed point of the averaged descend channel: the infinite-depth one-site state."""
    dc = ch.descend_channels(lam)
    return fixed_point(dc.average)


def _resolvent_solve(lam: Isometry, rhs_matrix: np.ndarray, label: str) -> DensityOp:
    """Solve (Id - M/2) x = vec(rhs)/2 with M = right (x) left descend."""
    dc = ch.descend_channels(lam)
    m = ch.tensor(dc.right, dc.left).matrix
    dim = lam.d ** 2
    a = np.eye(dim * dim, dtype=complex) - m / 2.0
    x = np.linalg.solve(a, ch.vec(rhs_matrix) / 2.0)
    mat = ch.unvec(x, dim)
    mat = (mat + mat.conj().T) / 2.0
    mat = mat / np.trace(mat).real
    return density_op(mat, lam.d, 2, label=label)


def two_site_infinity(lam: Isometry) -> DensityOp:
    """Infinite-depth averaged nearest-neighbor state, solved in closed form.

    Sums the geometric series of the pair recursion by a single linear
    solve; the series converges because descend maps are non-expansive.
    """
    rho1 = _require_mixing(single_site_infinity(lam), "averaged descend channel").state
    grow = ch.growth_channel(lam)
    return _resolvent_solve(lam, ch.apply(grow, rho1), label="thermodynamic nu=2")


def classical_pair_infinity(lam: Isometry) -> DensityOp:
    """Infinite-depth averaged product-of-neighboring-marginals state.

    Quantum correlations are stripped, classical ones kept; the source term
    is the stationary state of the pair-descend channel pushed through
    left (x) right.
    """
    pair = ch.pair_descend_channel(lam)
    sigma = _require_mixing(fixed_point(pair), "pair-descend channel").state
    dc = ch.descend_channels(lam)
    src = ch.apply(ch.tensor(dc.left, dc.right), sigma)
    return _resolvent_solve(lam, src, label="thermodynamic classical pair")


def reduced_infinity(lam: Isometry, nu: int) -> DensityOp:
    """Infinite-depth averaged nu-consecutive-site state, nu in 1..4."""
    if nu == 1:
        res = _require_mixing(single_site_infinity(lam), "averaged descend channel")
        return DensityOp(lam.d, 1, res.state.matrix, label="thermodynamic nu=1")
    if nu == 2:
        return two_site_infinity(lam)
    if nu in (3, 4):
        rho2 = two_site_infinity(lam)
        ext = ch.extension_channel(lam, nu)
        mat = ch.apply(ext, rho2)
        mat = (mat + mat.conj().T) / 2.0
        return density_op(mat, lam.d, nu, label="thermodynamic nu=%d" % nu)
    raise ValueError("thermodynamic states are available for nu in 1..4, got %r" % (nu,))


def marginal_deviation(op: DensityOp, reference: np.ndarray) -> float:
    """Largest max-norm gap between any single-position marginal and a reference."""
    worst = 0.0
    for pos in range(1, op.nu + 1):
        marg = partial_trace(op, [pos]).matrix
        worst = max(worst, float(np.abs(marg - reference).max()))
    return worst


def thermo_report(lam: Isometry, nu: int) -> dict:
    """Plain-dict summary: rank, spectrum, consistency residual, mixing flag."""
    fp = single_site_infinity(lam)
    state = reduced_infinity(lam, nu)
    evals = np.linalg.eigvalsh((state.matrix + state.matrix.conj().T) / 2.0)
    if nu == 1:
        residual = fp.residual
    elif nu == 2:
        dc = ch.descend_channels(lam)
        grow = ch.growth_channel(lam)
        rl = ch.tensor(dc.right, dc.left)
        again = (ch.apply(rl, state) + ch.apply(grow, fp.state)) / 2.0
        residual = float(np.abs(again - state.matrix).max())
    else:
        residual = marginal_deviation(state, fp.state.matrix)
    return {
        "nu": nu,
        "rank": numerical_rank(state),
        "eigenvalues": [float(x) for x in evals[::-1]],
        "residual": residual,
        "mixing": fp.mixing,
    }
