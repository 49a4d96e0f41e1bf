"""Parent Hamiltonians: kernel projectors, cyclic assembly, exact diagonalization.

The interaction term is a weighted sum of projectors onto the kernel of the
infinite-depth reduced state, so the full Hamiltonian is PSD and kills the
tree state.  Everything ground-space related (degeneracy, the grown
subspace and its translate, unfrustration, adjoint nullity) is verified
numerically on dense matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import KernelNotFoundError, ResourceLimitError, ValidationError
from .tensor_core import TAU_RANK, DensityOp, Isometry, numerical_rank, svd_rank
from . import channels as ch
from . import thermo

TAU_GS = 1e-10
DEFAULT_MAX_DIM = 4096


@dataclass(frozen=True)
class HamiltonianSpec:
    """Local interaction: d, window size nu, PSD term, kernel size and weights."""

    d: int
    nu: int
    h_term: np.ndarray
    kernel_dim: int
    weights: np.ndarray
    normalize: bool = True

    def __post_init__(self):
        dim = self.d ** self.nu
        mat = np.array(self.h_term, dtype=complex)
        if mat.shape != (dim, dim):
            raise ValueError("interaction term must be %d x %d, got %s" % (dim, dim, mat.shape))
        mat.setflags(write=False)
        object.__setattr__(self, "h_term", mat)
        w = np.array(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class GroundSpaceReport:
    spectrum: np.ndarray
    ground_energy: float
    degeneracy: int
    histogram: tuple            # ((left, right, count), ...) on the rescaled spectrum
    tau_gs: float


@dataclass(frozen=True)
class SubspaceReport:
    N: int
    dim_grown: int
    dim_translated: int
    dim_union: int
    max_h_residual: float       # max over basis images of ||H |phi>||
    max_local_energy: float     # max over terms and basis images of <phi|H_nu(alpha)|phi>
    unfrustrated: bool


@dataclass(frozen=True)
class NullityReport:
    precondition_met: bool      # two-site state full rank
    residual: float             # max-norm of the descended interaction
    trace_residual: float       # |Tr[rho2 . adjoint(ext)(H)]|


def kernel_basis(rho: DensityOp, tau: float = TAU_RANK) -> np.ndarray:
    """Orthonormal kernel vectors (columns) of a PSD operator at relative tolerance."""
    mat = (rho.matrix + rho.matrix.conj().T) / 2.0
    evals, evecs = np.linalg.eigh(mat)
    top = float(evals[-1])
    if top <= 0.0:
        return np.array(evecs)  # the zero operator: everything is kernel
    mask = evals <= tau * top
    return np.array(evecs[:, mask])


def build_interaction(
    lam: Isometry,
    weights: Sequence[float] | None = None,
    nu: int | str = "auto",
    tau: float = TAU_RANK,
) -> HamiltonianSpec:
    """Kernel-projector interaction from the smallest window with a nontrivial kernel.

    ``nu="auto"`` walks windows 2, 3, 4 and stops at the first rank-deficient
    reduced state (theory guarantees one by nu=4).  Weights default to 1 per
    kernel vector and must be strictly positive.
    """
    if nu == "auto":
        candidates = [2, 3, 4]
    elif nu in (2, 3, 4):
        candidates = [int(nu)]
    else:
        raise ValueError("interaction window must be 2, 3, 4 or 'auto', got %r" % (nu,))

    for window in candidates:
        rho = thermo.reduced_infinity(lam, window)
        kernel = kernel_basis(rho, tau)
        if kernel.shape[1] > 0:
            k = kernel.shape[1]
            if weights is None:
                w = np.ones(k)
            else:
                w = np.array([float(x) for x in weights], dtype=float)
                if w.size != k:
                    raise ValueError("expected %d kernel weights, got %d" % (k, w.size))
                if np.any(w <= 0.0):
                    raise ValueError("kernel weights must be strictly positive")
            h = kernel @ np.diag(w.astype(complex)) @ kernel.conj().T
            h = (h + h.conj().T) / 2.0
            annihilation = float(np.abs(h @ rho.matrix).max())
            if annihilation > 1e-10:
                raise ValidationError(
                    "interaction does not annihilate its reduced state: residual %g" % annihilation
                )
            return HamiltonianSpec(d=lam.d, nu=window, h_term=h, kernel_dim=k, weights=w)
    raise KernelNotFoundError(
        "no nontrivial kernel up to window 4; numerically impossible for a valid isometry"
    )


def embedded_term(h: np.ndarray, d: int, nu: int, N: int, start: int) -> np.ndarray:
    """The interaction placed on sites start..start+nu-1 (0-based, cyclic) of N sites."""
    sites = [(start + j) % N for j in range(nu)]
    rest = [s for s in range(N) if s not in sites]
    m = np.kron(h, np.eye(d ** (N - nu), dtype=complex))
    t = m.reshape((d,) * (2 * N))
    order = sites + rest
    inv = np.argsort(order)
    t = t.transpose(tuple(inv) + tuple(N + i for i in inv))
    return t.reshape(d ** N, d ** N)


def assemble(hs: HamiltonianSpec, N: int, max_dim: int = DEFAULT_MAX_DIM) -> np.ndarray:
    """Cyclic sum of the interaction over all starting sites, 1/N-normalized."""
    if N < hs.nu:
        raise ValueError("lattice of %d sites cannot host a %d-site interaction" % (N, hs.nu))
    dim = hs.d ** N
    if dim > max_dim:
        raise ResourceLimitError(
            "dense assembly needs a %d x %d matrix, budget is %d" % (dim, dim, max_dim),
            required=dim,
        )
    total = np.zeros((dim, dim), dtype=complex)
    for alpha in range(N):
        total += embedded_term(hs.h_term, hs.d, hs.nu, N, alpha)
    if hs.normalize:
        total /= N
    return (total + total.conj().T) / 2.0


def diagonalize(h: np.ndarray, tau_gs: float = TAU_GS, bins: int = 50) -> GroundSpaceReport:
    """Full spectrum, ground degeneracy at absolute tolerance, rescaled histogram."""
    h = np.asarray(h)
    spectrum = np.linalg.eigvalsh((h + h.conj().T) / 2.0)
    ground = float(spectrum[0])
    degeneracy = int(np.count_nonzero(spectrum <= ground + tau_gs))
    top = float(spectrum[-1])
    rescaled = spectrum / top if top > tau_gs else spectrum
    counts, edges = np.histogram(rescaled, bins=bins, range=(min(0.0, float(rescaled[0])), 1.0))
    histogram = tuple(
        (float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(len(counts))
    )
    return GroundSpaceReport(
        spectrum=spectrum, ground_energy=ground, degeneracy=degeneracy,
        histogram=histogram, tau_gs=tau_gs,
    )


def grown_basis(lam: Isometry, N: int) -> np.ndarray:
    """Orthonormal basis (columns) of the subspace grown by one tree layer.

    Column j is the image of the j-th computational basis state of N/2
    sites under one layer of isometries; orthonormality is inherited.
    """
    if N % 2 != 0:
        raise ValueError("growing a layer needs an even target size, got N=%d" % N)
    d = lam.d
    half = N // 2
    v = lam.v
    basis = np.zeros((d ** N, d ** half), dtype=complex)
    for j in range(d ** half):
        digits = []
        x = j
        for _ in range(half):
            digits.append(x % d)
            x //= d
        digits.reverse()
        phi = np.ones(1, dtype=complex)
        for u in digits:
            phi = np.kron(phi, v[:, u])
        basis[:, j] = phi
    return basis


def translate_state(vec: np.ndarray, d: int, N: int) -> np.ndarray:
    """One-site cyclic translation: site contents move one position to the right."""
    t = np.asarray(vec).reshape((d,) * N)
    return np.moveaxis(t, -1, 0).reshape(-1)


def grown_subspace_check(
    lam: Isometry,
    hs: HamiltonianSpec,
    N: int,
    tau_gs: float = TAU_GS,
    max_dim: int = DEFAULT_MAX_DIM,
) -> SubspaceReport:
    """Verify the grown subspace is annihilated term by term, and measure its span.

    Checks every basis image against the assembled Hamiltonian and against
    each local term separately (unfrustration), then ranks the union of the
    subspace with its one-site translate.
    """
    if N % 2 != 0:
        raise ValueError("the grown-subspace construction needs even N, got %d" % N)
    ham = assemble(hs, N, max_dim=max_dim)
    basis = grown_basis(lam, N)
    h_images = ham @ basis
    max_h_residual = float(np.linalg.norm(h_images, axis=0).max())

    max_local = 0.0
    for alpha in range(N):
        term = embedded_term(hs.h_term, hs.d, hs.nu, N, alpha)
        energies = np.einsum("ij,ij->j", basis.conj(), term @ basis)
        max_local = max(max_local, float(np.abs(energies).max()))

    translated = np.stack([translate_state(basis[:, j], hs.d, N) for j in range(basis.shape[1])], axis=1)
    dim_grown = svd_rank(basis)
    dim_translated = svd_rank(translated)
    dim_union = svd_rank(np.hstack([basis, translated]))
    return SubspaceReport(
        N=N,
        dim_grown=dim_grown,
        dim_translated=dim_translated,
        dim_union=dim_union,
        max_h_residual=max_h_residual,
        max_local_energy=max_local,
        unfrustrated=(max_local <= tau_gs and max_h_residual <= tau_gs),
    )


def adjoint_nullity_check(lam: Isometry, hs: HamiltonianSpec) -> NullityReport:
    """Descend a 3-site interaction back to 2 sites through the extension adjoint.

    When the two-site infinite-depth state has full rank, the descended
    operator must vanish identically; a rank-deficient two-site state only
    flags the precondition instead of raising.
    """
    if hs.nu != 3:
        raise ValueError("the operator nullity argument applies to 3-site interactions")
    rho2 = thermo.two_site_infinity(lam)
    full = numerical_rank(rho2) == rho2.dim
    descended = ch.apply(ch.adjoint(ch.extension_channel(lam, 3)), hs.h_term)
    residual = float(np.abs(descended).max())
    trace_residual = float(abs(np.trace(rho2.matrix @ descended)))
    return NullityReport(precondition_met=full, residual=residual, trace_residual=trace_residual)
