"""Brute-force oracle for finite trees: explicit states, exact averages, recursion checks.

Everything here treats the lattice as a ring (periodic indices); averages
over starting position always include the wrap-around pairs.  The explicit
state costs d**(2**n) amplitudes, so depth is capped by a memory budget;
``level_states`` provides the same averaged quantities at any depth through
channel iteration instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError
from .tensor_core import (
    TAU_TRACE,
    DensityOp,
    Isometry,
    LatticeSpec,
    Observable,
    TopTensor,
    density_op,
    require_isometry,
    require_top,
)
from . import channels as ch

DEFAULT_MAX_AMPLITUDES = 1 << 16


@dataclass(frozen=True)
class PureState:
    spec: LatticeSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.spec.d ** self.spec.N:
            raise ValueError("amplitude vector has %d entries, expected d**N = %d" % (amps.size, self.spec.d ** self.spec.N))
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def build_state(lam: Isometry, c: TopTensor, n: int, max_amplitudes: int = DEFAULT_MAX_AMPLITUDES) -> PureState:
    """Contract the depth-n tree explicitly into a d**(2**n) amplitude vector."""
    require_isometry(lam)
    require_top(c)
    if lam.d != c.d:
        raise ValueError("isometry and top tensor have different local dimension")
    if n < 1:
        raise ValueError("tree depth must be >= 1, got %d" % n)
    d = lam.d
    required = d ** (2 ** n)
    if required > max_amplitudes:
        raise ResourceLimitError(
            "depth %d needs %d amplitudes, budget is %d" % (n, required, max_amplitudes),
            required=required,
        )
    v = lam.v  # (l1 l2) x u
    amp = np.array(c.c, dtype=complex).reshape(-1)
    sites = 2
    for _ in range(n - 1):
        t = amp.reshape((d,) * sites)
        for ax in range(sites):
            t = np.tensordot(t, v, axes=([ax], [1]))  # replaces site ax by its child pair
            t = np.moveaxis(t, -1, ax)
        amp = t.reshape(-1)
        sites *= 2
    return PureState(LatticeSpec(d=d, N=sites, n=n), amp)


def _site_tensor(psi: PureState) -> np.ndarray:
    return psi.amplitudes.reshape((psi.spec.d,) * psi.spec.N)


def _reduced(psi: PureState, sites0: list[int]) -> np.ndarray:
    """Reduced density matrix of the given 0-based sites, in the given order."""
    N = psi.spec.N
    t = _site_tensor(psi)
    rest = [s for s in range(N) if s not in sites0]
    t = t.transpose(sites0 + rest)
    k = len(sites0)
    a = t.reshape(psi.spec.d ** k, -1)
    return a @ a.conj().T


def reduced_avg(psi: PureState, nu: int) -> DensityOp:
    """Average over all cyclic starting positions of the nu-consecutive-site state."""
    N = psi.spec.N
    if not 1 <= nu <= N:
        raise ValueError("window size %d out of range 1..%d" % (nu, N))
    acc = np.zeros((psi.spec.d ** nu,) * 2, dtype=complex)
    for alpha in range(N):
        acc += _reduced(psi, [(alpha + j) % N for j in range(nu)])
    acc /= N
    return density_op(acc, psi.spec.d, nu, label="finite n=%d averaged" % (psi.spec.n or 0))


def site_marginals(psi: PureState) -> list[np.ndarray]:
    """One-site reduced density matrix of every site, in site order."""
    return [_reduced(psi, [alpha]) for alpha in range(psi.spec.N)]


def classical_pair_avg(psi: PureState) -> DensityOp:
    """Average of marginal products over neighboring pairs (cyclic)."""
    N = psi.spec.N
    margs = site_marginals(psi)
    acc = sum(np.kron(margs[a], margs[(a + 1) % N]) for a in range(N)) / N
    return density_op(acc, psi.spec.d, 2, label="finite classical pair")


def same_site_pair_avg(psi: PureState) -> DensityOp:
    """Average of marginal self-products, the seed of the pair-descend iteration."""
    N = psi.spec.N
    margs = site_marginals(psi)
    acc = sum(np.kron(m, m) for m in margs) / N
    return density_op(acc, psi.spec.d, 2, label="finite same-site pair")


def single_site_base(c: TopTensor) -> DensityOp:
    """Averaged one-site state of the depth-1 tree, straight from the top tensor."""
    require_top(c)
    first = c.c @ c.c.conj().T        # entries sum_k C[l,k] conj(C[u,k])
    second = c.c.T @ c.c.conj()       # entries sum_k C[k,l] conj(C[k,u])
    return density_op((first + second) / 2.0, c.d, 1, label="depth-1 single site")


@dataclass(frozen=True)
class LevelStates:
    """Averaged level-n states computed by channel iteration (any depth)."""

    n: int
    single: DensityOp
    pair: DensityOp
    classical_pair: DensityOp
    same_site_pair: DensityOp


def level_states(lam: Isometry, c: TopTensor, n: int) -> LevelStates:
    """Iterate the level recursions from the depth-1 base cases.

    The pair state follows the two-site recursion; the classical-pair state
    rides along via the same-site product average, which the pair-descend
    channel propagates level to level.
    """
    require_isometry(lam)
    require_top(c)
    if n < 1:
        raise ValueError("tree depth must be >= 1, got %d" % n)
    d = lam.d
    amp = np.array(c.c, dtype=complex).reshape(-1)
    rho_full = np.outer(amp, amp.conj())
    m1 = rho_full.reshape(d, d, d, d).trace(axis1=1, axis2=3)  # keep site 1
    m2 = rho_full.reshape(d, d, d, d).trace(axis1=0, axis2=2)  # keep site 2
    swap = rho_full.reshape(d, d, d, d).transpose(1, 0, 3, 2).reshape(d * d, d * d)
    rho1 = (m1 + m2) / 2.0
    rho2 = (rho_full + swap) / 2.0
    eta = (np.kron(m1, m2) + np.kron(m2, m1)) / 2.0
    omega = (np.kron(m1, m1) + np.kron(m2, m2)) / 2.0

    dc = ch.descend_channels(lam)
    grow = ch.growth_channel(lam)
    rl = ch.tensor(dc.right, dc.left)
    lr = ch.tensor(dc.left, dc.right)
    pair = ch.pair_descend_channel(lam)
    for _ in range(n - 1):
        rho1_next = ch.apply(dc.average, rho1)
        rho2_next = (ch.apply(rl, rho2) + ch.apply(grow, rho1)) / 2.0
        eta_next = (ch.apply(rl, eta) + ch.apply(lr, omega)) / 2.0
        omega_next = ch.apply(pair, omega)
        rho1, rho2, eta, omega = rho1_next, rho2_next, eta_next, omega_next

    label = "level n=%d" % n
    return LevelStates(
        n=n,
        single=density_op(rho1, d, 1, label=label + " single"),
        pair=density_op(rho2, d, 2, label=label + " pair"),
        classical_pair=density_op(eta, d, 2, label=label + " classical pair"),
        same_site_pair=density_op(omega, d, 2, label=label + " same-site pair"),
    )


@dataclass(frozen=True)
class RecursionReport:
    n_max: int
    single_site: float
    pair: float
    triple: float
    quad: float

    @property
    def max_residual(self) -> float:
        return max(self.single_site, self.pair, self.triple, self.quad)


def recursion_check(
    lam: Isometry,
    c: TopTensor,
    n_max: int,
    max_amplitudes: int = DEFAULT_MAX_AMPLITUDES,
) -> RecursionReport:
    """Verify all four level recursions against brute-force averages up to n_max.

    Checks, for every depth within budget:
      * one-site:  next single state equals descend of the current one;
      * two-site:  next pair state equals the half/half pair recursion;
      * three-site: depth-n triple equals the 2->3 extension of depth n-1;
      * four-site: depth-n quadruple equals the 2->4 extension of depth n-2
        material (defined for n >= 3 only).
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2 to check any recursion")
    states = {n: build_state(lam, c, n, max_amplitudes) for n in range(1, n_max + 1)}
    rho1 = {n: reduced_avg(states[n], 1).matrix for n in range(1, n_max + 1)}
    rho2 = {n: reduced_avg(states[n], 2).matrix for n in range(1, n_max + 1)}

    dc = ch.descend_channels(lam)
    grow = ch.growth_channel(lam)
    rl = ch.tensor(dc.right, dc.left)
    ext3 = ch.extension_channel(lam, 3)
    ext4 = ch.extension_channel(lam, 4)

    res1 = 0.0
    res2 = 0.0
    for n in range(1, n_max):
        res1 = max(res1, float(np.abs(ch.apply(dc.average, rho1[n]) - rho1[n + 1]).max()))
        pred = (ch.apply(rl, rho2[n]) + ch.apply(grow, rho1[n])) / 2.0
        res2 = max(res2, float(np.abs(pred - rho2[n + 1]).max()))

    res3 = 0.0
    for n in range(2, n_max + 1):
        brute = reduced_avg(states[n], 3).matrix
        res3 = max(res3, float(np.abs(ch.apply(ext3, rho2[n - 1]) - brute).max()))

    res4 = 0.0
    for n in range(3, n_max + 1):
        brute = reduced_avg(states[n], 4).matrix
        pred = (
            ch.apply(ch.tensor(grow, grow), rho2[n - 1])
            + ch.apply(ch.compose(ch.tensor(ch.tensor(dc.right, grow), dc.left), ext3), rho2[n - 2])
        ) / 2.0
        res4 = max(res4, float(np.abs(pred - brute).max()))

    return RecursionReport(n_max=n_max, single_site=res1, pair=res2, triple=res3, quad=res4)


def correlator_finite(psi: PureState, theta: Observable, theta_prime: Observable, delta: int) -> complex:
    """Translation-averaged connected two-point function at distance delta."""
    N = psi.spec.N
    if not 1 <= delta < N:
        raise ValueError("distance %d out of range 1..%d" % (delta, N - 1))
    margs = site_marginals(psi)
    singles_a = [complex(np.trace(theta.matrix @ m)) for m in margs]
    singles_b = [complex(np.trace(theta_prime.matrix @ m)) for m in margs]
    joint_obs = np.kron(theta.matrix, theta_prime.matrix)
    total = 0.0 + 0.0j
    for beta in range(N):
        pair = _reduced(psi, [beta, (beta + delta) % N])
        total += complex(np.trace(joint_obs @ pair)) - singles_a[beta] * singles_b[(beta + delta) % N]
    return total / N


def correlator_level(
    lam: Isometry,
    c: TopTensor,
    n: int,
    theta: Observable,
    theta_prime: Observable,
    m: int,
) -> complex:
    """Connected correlator at distance 2**m for a depth-n tree, via channels.

    Matches :func:`correlator_finite` on the explicit state but works at any
    depth; needs m <= n - 1.
    """
    if m < 0 or m > n - 1:
        raise ValueError("distance exponent m must satisfy 0 <= m <= n-1")
    lv = level_states(lam, c, n - m)
    pair = ch.pair_descend_channel(lam)
    diff = lv.pair.matrix - lv.classical_pair.matrix
    moved = ch.unvec(np.linalg.matrix_power(pair.matrix, m) @ ch.vec(diff), pair.dim_out)
    return complex(np.trace(np.kron(theta.matrix, theta_prime.matrix) @ moved))


def state_norm_check(psi: PureState, tol: float = TAU_TRACE) -> bool:
    return abs(psi.norm() - 1.0) <= tol
