"""Truncated Fock-space numerics used to cross-check the closed forms.

Everything lives on a joint basis of ``modes`` oscillators truncated at a
shared per-mode photon cutoff.  One mechanism serves every unitary in the
package: the matrix exponential of the truncated generator (scipy's
scaling-and-squaring expm).  The beamsplitter exponential is taken per
total-photon block, which is still the same mechanism, just applied to the
invariant subspaces the generator already has.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .closed_forms import CatFamily, CatStateSpec, abs2, branch_overlap, hcs_norms, omega_norm
from .errors import DomainError, SizingError, TruncationError

#: Largest joint dimension for state vectors ((cutoff+1)**modes).
MAX_JOINT_DIM = 1 << 22

#: Largest dimension for dense operators.
MAX_OPERATOR_DIM = 4096

_HERM_TOL = 1e-10
_DENSITY_TOL = 1e-10


@dataclass(frozen=True)
class TruncationReport:
    """How much amplitude a truncated construction left behind."""

    cutoff_used: int
    tail_mass: float
    converged: bool


@dataclass(frozen=True)
class FockVector:
    """State vector on ``modes`` oscillators with a shared per-mode cutoff."""

    cutoff: int
    modes: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.cutoff < 0 or self.modes < 1:
            raise DomainError("cutoff must be >= 0 and modes >= 1")
        dim = (self.cutoff + 1) ** self.modes
        if dim > MAX_JOINT_DIM:
            raise SizingError(
                f"joint dimension {dim} exceeds MAX_JOINT_DIM = {MAX_JOINT_DIM}"
            )
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != dim:
            raise DomainError(f"expected {dim} amplitudes, got {amps.size}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** self.modes

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.cutoff + 1,) * self.modes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on the joint truncated basis.

    ``hermitian_hint`` records whether the constructor believes the matrix is
    Hermitian; consumers that require Hermiticity still verify it.
    """

    cutoff: int
    modes: int
    matrix: np.ndarray
    hermitian_hint: bool = False

    def __post_init__(self):
        dim = (self.cutoff + 1) ** self.modes
        if dim > MAX_OPERATOR_DIM:
            raise SizingError(
                f"operator dimension {dim} exceeds MAX_OPERATOR_DIM = {MAX_OPERATOR_DIM}"
            )
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (dim, dim):
            raise DomainError(f"expected a {dim} x {dim} matrix, got {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** self.modes


def default_cutoff(alpha) -> int:
    """Cutoff heuristic ceil(|alpha|^2 + 8|alpha| + 20).

    Eight standard deviations of headroom above the Poisson mean plus a
    floor of twenty keeps per-mode tail mass far below 1e-9 for |alpha| <= 4.
    """
    r = abs(complex(alpha))
    return math.ceil(r * r + 8.0 * r + 20.0)


def coherent_vector(alpha, cutoff: int, tail_tol: float = 1e-9):
    """Truncated coherent state, built by the stable amplitude recursion.

    Returns (FockVector, TruncationReport); raises TruncationError when the
    amplitude mass beyond the cutoff exceeds ``tail_tol``.
    """
    alpha = complex(alpha)
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[0] = math.exp(-0.5 * abs2(alpha))
    for n in range(cutoff):
        amps[n + 1] = amps[n] * alpha / math.sqrt(n + 1.0)
    tail = max(0.0, 1.0 - float(np.vdot(amps, amps).real))
    report = TruncationReport(cutoff_used=cutoff, tail_mass=tail, converged=tail <= tail_tol)
    if not report.converged:
        raise TruncationError(
            f"coherent state |alpha| = {abs(alpha):g} keeps tail mass {tail:.3e} "
            f"beyond cutoff {cutoff} (tolerance {tail_tol:g})",
            tail_mass=tail,
            cutoff=cutoff,
        )
    return FockVector(cutoff=cutoff, modes=1, amplitudes=amps), report


def kitten_vectors(alpha, cutoff: int, tail_tol: float = 1e-9):
    """Normalized even and odd single-mode superpositions (|a> +- |-a>)/A."""
    plus, _ = coherent_vector(alpha, cutoff, tail_tol)
    minus, _ = coherent_vector(-alpha, cutoff, tail_tol)
    a_plus, a_minus = hcs_norms(alpha)
    even = (plus.amplitudes + minus.amplitudes) / a_plus
    odd = (plus.amplitudes - minus.amplitudes) / a_minus
    return (
        FockVector(cutoff=cutoff, modes=1, amplitudes=even),
        FockVector(cutoff=cutoff, modes=1, amplitudes=odd),
    )


def mode_ops(cutoff: int):
    """Single-mode ladder, number, parity operators and the quadrature builder."""
    d = cutoff + 1
    lower = np.zeros((d, d), dtype=complex)
    lower[np.arange(d - 1), np.arange(1, d)] = np.sqrt(np.arange(1, d))
    raise_ = lower.conj().T
    number = np.diag(np.arange(d, dtype=float)).astype(complex)
    parity = np.diag((-1.0) ** np.arange(d)).astype(complex)
    return ModeOps(
        cutoff=cutoff,
        annihilation=FockOperator(cutoff, 1, lower),
        creation=FockOperator(cutoff, 1, raise_),
        number=FockOperator(cutoff, 1, number, hermitian_hint=True),
        parity=FockOperator(cutoff, 1, parity, hermitian_hint=True),
    )


@dataclass(frozen=True)
class ModeOps:
    cutoff: int
    annihilation: FockOperator
    creation: FockOperator
    number: FockOperator
    parity: FockOperator

    def quadrature(self, phi: float) -> FockOperator:
        """x(phi) = (a e^{-i phi} + a^dag e^{i phi}) / sqrt(2)."""
        a = self.annihilation.matrix
        mat = (a * np.exp(-1j * phi) + a.conj().T * np.exp(1j * phi)) / math.sqrt(2.0)
        return FockOperator(self.cutoff, 1, mat, hermitian_hint=True)


def displacement_op(alpha, cutoff: int) -> FockOperator:
    """D(alpha) = expm(alpha a^dag - conj(alpha) a) on the truncated basis."""
    alpha = complex(alpha)
    ops = mode_ops(cutoff)
    gen = alpha * ops.creation.matrix - alpha.conjugate() * ops.annihilation.matrix
    return FockOperator(cutoff, 1, expm(gen))


def phase_shifter(phi: float, mode: int, modes: int, cutoff: int) -> FockOperator:
    """exp(i phi n) on one mode of a joint basis, as a dense diagonal operator.

    The generator is diagonal, so its exponential is the elementwise
    exponential of the diagonal; no approximation is involved.
    """
    _check_mode_index(mode, modes)
    d = cutoff + 1
    single = np.exp(1j * phi * np.arange(d))
    diag = np.ones(1, dtype=complex)
    for k in range(modes):
        diag = np.kron(diag, single if k == mode else np.ones(d))
    return FockOperator(cutoff, modes, np.diag(diag))


def beamsplitter_kernel(theta: float, cutoff: int) -> np.ndarray:
    """Two-mode matrix of expm(i theta (a^dag b + b^dag a)).

    The generator conserves total photon number, so the exponential is taken
    block by block: the block at total count n is a tridiagonal (n+1) sized
    matrix, which keeps the cost linear in the number of blocks instead of
    cubic in the full two-mode dimension.
    """
    d = cutoff + 1
    kernel = np.zeros((d * d, d * d), dtype=complex)
    for n in range(2 * cutoff + 1):
        ks = np.arange(max(0, n - cutoff), min(n, cutoff) + 1)
        size = ks.size
        gen = np.zeros((size, size), dtype=complex)
        if size > 1:
            hop = np.sqrt((ks[:-1] + 1.0) * (n - ks[:-1]))
            rows = np.arange(size - 1)
            gen[rows + 1, rows] = 1j * theta * hop
            gen[rows, rows + 1] = 1j * theta * hop
        block = expm(gen) if size > 1 else np.ones((1, 1), dtype=complex)
        idx = ks * d + (n - ks)
        kernel[np.ix_(idx, idx)] = block
    return kernel


def beamsplitter_op(theta: float, mode_i: int, mode_j: int, modes: int, cutoff: int) -> FockOperator:
    """Beamsplitter between two modes of a joint basis, as a dense operator."""
    kernel = beamsplitter_kernel(theta, cutoff)
    return FockOperator(cutoff, modes, _embed_two_mode(kernel, mode_i, mode_j, modes, cutoff))


def coherent_mixer_kernel(theta: float, cutoff: int) -> np.ndarray:
    """Two-mode matrix of P_j(-pi/2) B(theta) P_j(-pi/2).

    Sends |u>|v> to |u cos(theta) + v sin(theta)> |u sin(theta) - v cos(theta)>
    with no stray phases, which is the mixing convention the splitting
    network is stated in.
    """
    d = cutoff + 1
    phase = np.kron(np.ones(d), np.exp(-0.5j * math.pi * np.arange(d)))
    mixed = beamsplitter_kernel(theta, cutoff)
    return (phase[:, None] * mixed) * phase[None, :]


def coherent_mixer(theta: float, mode_i: int, mode_j: int, modes: int, cutoff: int) -> FockOperator:
    """Dense embedding of coherent_mixer_kernel into a joint basis."""
    kernel = coherent_mixer_kernel(theta, cutoff)
    return FockOperator(cutoff, modes, _embed_two_mode(kernel, mode_i, mode_j, modes, cutoff))


def cat_split_thetas(modes: int) -> list[float]:
    """Mixing angles that split one amplitude-sqrt(M) mode evenly over M modes.

    theta_q = f^(M-1-q)(pi/4) with f(x) = atan(1/cos(x)), for q = 1 .. M-1,
    in the order the mixers are applied (pair (q, q+1) gets theta_q).
    """
    if modes < 1:
        raise DomainError(f"modes must be >= 1, got {modes}")
    thetas = []
    for q in range(1, modes):
        t = math.pi / 4.0
        for _ in range(modes - 1 - q):
            t = math.atan(1.0 / math.cos(t))
        thetas.append(t)
    return thetas


def apply_split_network(state: FockVector) -> FockVector:
    """Run the even-splitting mixer chain over all adjacent mode pairs."""
    thetas = cat_split_thetas(state.modes)
    out = state
    for q, theta in enumerate(thetas, start=1):
        kernel = coherent_mixer_kernel(theta, state.cutoff)
        out = apply_two_mode(kernel, out, q - 1, q)
    return out


def apply_single_mode(kernel: np.ndarray, state: FockVector, mode: int) -> FockVector:
    """Apply a (d x d) matrix to one mode of a joint state."""
    _check_mode_index(mode, state.modes)
    t = np.tensordot(kernel, state.as_tensor(), axes=([1], [mode]))
    t = np.moveaxis(t, 0, mode)
    return FockVector(cutoff=state.cutoff, modes=state.modes, amplitudes=t.reshape(-1))


def apply_two_mode(kernel: np.ndarray, state: FockVector, mode_i: int, mode_j: int) -> FockVector:
    """Apply a (d^2 x d^2) matrix to a pair of modes of a joint state."""
    _check_mode_pair(mode_i, mode_j, state.modes)
    d = state.cutoff + 1
    k4 = np.asarray(kernel, dtype=complex).reshape(d, d, d, d)
    t = np.tensordot(k4, state.as_tensor(), axes=([2, 3], [mode_i, mode_j]))
    t = np.moveaxis(t, [0, 1], [mode_i, mode_j])
    return FockVector(cutoff=state.cutoff, modes=state.modes, amplitudes=t.reshape(-1))


def apply_phase(state: FockVector, phi: float, mode: int) -> FockVector:
    """Apply exp(i phi n) to one mode without building the joint diagonal."""
    _check_mode_index(mode, state.modes)
    d = state.cutoff + 1
    shape = [1] * state.modes
    shape[mode] = d
    factor = np.exp(1j * phi * np.arange(d)).reshape(shape)
    return FockVector(
        cutoff=state.cutoff,
        modes=state.modes,
        amplitudes=(state.as_tensor() * factor).reshape(-1),
    )


def tensor(*parts):
    """Kronecker product of FockVectors (or of FockOperators) with equal cutoffs."""
    if not parts:
        raise DomainError("tensor needs at least one argument")
    cutoffs = {p.cutoff for p in parts}
    if len(cutoffs) != 1:
        raise DomainError(f"tensor requires a shared cutoff, got {sorted(cutoffs)}")
    modes = sum(p.modes for p in parts)
    if all(isinstance(p, FockVector) for p in parts):
        amps = functools.reduce(np.kron, [p.amplitudes for p in parts])
        return FockVector(cutoff=parts[0].cutoff, modes=modes, amplitudes=amps)
    if all(isinstance(p, FockOperator) for p in parts):
        mat = functools.reduce(np.kron, [p.matrix for p in parts])
        hint = all(p.hermitian_hint for p in parts)
        return FockOperator(parts[0].cutoff, modes, mat, hermitian_hint=hint)
    raise DomainError("tensor arguments must be all vectors or all operators")


def density(state: FockVector) -> FockOperator:
    """Projector |psi><psi| / <psi|psi> as a dense operator."""
    v = state.amplitudes
    n2 = float(np.vdot(v, v).real)
    if n2 <= 0.0:
        raise DomainError("cannot normalize the zero vector")
    return FockOperator(
        state.cutoff, state.modes, np.outer(v, v.conj()) / n2, hermitian_hint=True
    )


def partial_trace(op: FockOperator, keep) -> FockOperator:
    """Trace out all modes not listed in ``keep`` from a density operator.

    The input must be a density operator: Hermitian, unit trace and positive
    semidefinite, each within 1e-10.  Kept modes stay in their original
    relative order.
    """
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        _check_mode_index(k, op.modes)
    if not keep:
        raise DomainError("must keep at least one mode")
    _check_density(op.matrix)
    d = op.cutoff + 1
    remaining = list(range(op.modes))
    t = op.matrix.reshape((d,) * (2 * op.modes))
    for mode in sorted(set(range(op.modes)) - set(keep), reverse=True):
        pos = remaining.index(mode)
        t = np.trace(t, axis1=pos, axis2=pos + len(remaining))
        remaining.remove(mode)
    dim = d ** len(remaining)
    return FockOperator(op.cutoff, len(remaining), t.reshape(dim, dim), hermitian_hint=True)


def trace_norm(op: FockOperator) -> float:
    """Sum of absolute eigenvalues of a Hermitian operator."""
    _check_hermitian(op.matrix)
    return float(np.sum(np.abs(np.linalg.eigvalsh(op.matrix))))


@dataclass(frozen=True)
class HelstromPovm:
    """Two-outcome measurement that best distinguishes a pair of states."""

    plus: FockOperator
    minus: FockOperator
    success_probability: float


def helstrom_povm(rho_a: FockOperator, rho_b: FockOperator) -> HelstromPovm:
    """Projectors onto the positive and negative parts of rho_a - rho_b.

    The success probability for equal priors is 1/2 + (1/4) ||rho_a - rho_b||_1.
    """
    if rho_a.dim != rho_b.dim or rho_a.modes != rho_b.modes:
        raise DomainError("states must live on the same basis")
    _check_density(rho_a.matrix)
    _check_density(rho_b.matrix)
    delta = rho_a.matrix - rho_b.matrix
    vals, vecs = np.linalg.eigh(delta)
    pos = vecs[:, vals >= 0.0]
    plus = pos @ pos.conj().T
    minus = np.eye(rho_a.dim) - plus
    success = 0.5 + 0.25 * float(np.sum(np.abs(vals)))
    return HelstromPovm(
        plus=FockOperator(rho_a.cutoff, rho_a.modes, plus, hermitian_hint=True),
        minus=FockOperator(rho_a.cutoff, rho_a.modes, minus, hermitian_hint=True),
        success_probability=success,
    )


def expectation(op: FockOperator, state: FockVector) -> complex:
    """<psi|M|psi> / <psi|psi>."""
    v = state.amplitudes
    n2 = float(np.vdot(v, v).real)
    return complex(np.vdot(v, op.matrix @ v) / n2)


def variance(op: FockOperator, state: FockVector) -> float:
    """<M^2> - <M>^2 for a Hermitian M."""
    _check_hermitian(op.matrix)
    v = state.amplitudes / np.linalg.norm(state.amplitudes)
    mv = op.matrix @ v
    e1 = float(np.vdot(v, mv).real)
    e2 = float(np.vdot(mv, mv).real)
    return e2 - e1 * e1


def total_photon_pmf(state: FockVector) -> np.ndarray:
    """Probability of each total photon count, length modes*cutoff + 1."""
    d = state.cutoff + 1
    totals = np.indices((d,) * state.modes).reshape(state.modes, -1).sum(axis=0)
    weights = np.abs(state.amplitudes) ** 2
    weights = weights / weights.sum()
    return np.bincount(totals, weights=weights, minlength=state.modes * state.cutoff + 1)


def build_state(spec: CatStateSpec, cutoff: int | None = None, tail_tol: float = 1e-9):
    """Assemble the truncated vector for a state family.

    Returns (FockVector, TruncationReport).  The vector is scaled by the
    closed-form normalization, so any deviation of its numeric norm from one
    is truncation loss; that loss is reported, not silently renormalized.
    """
    if cutoff is None:
        cutoff = default_cutoff(_peak_amplitude(spec))
    modes_out = spec.modes + (1 if spec.aux is not None else 0)
    dim = (cutoff + 1) ** modes_out
    if dim > MAX_JOINT_DIM:
        # refuse before assembly; the kron products allocate the full vector
        raise SizingError(
            f"joint dimension {dim} exceeds MAX_JOINT_DIM = {MAX_JOINT_DIM}"
        )
    amps = _assemble(spec, cutoff, tail_tol)
    if spec.aux is not None:
        aux_vec, _ = coherent_vector(spec.aux, cutoff, tail_tol)
        amps = np.kron(amps, aux_vec.amplitudes)
        modes = spec.modes + 1
    else:
        modes = spec.modes
    vec = FockVector(cutoff=cutoff, modes=modes, amplitudes=amps)
    tail = max(0.0, 1.0 - vec.norm() ** 2)
    report = TruncationReport(
        cutoff_used=cutoff, tail_mass=tail, converged=tail <= 100.0 * modes * tail_tol
    )
    return vec, report


def _peak_amplitude(spec: CatStateSpec) -> complex:
    if spec.family is CatFamily.OMEGA_PRIME:
        return math.sqrt(spec.modes) * abs(complex(spec.alpha))
    if spec.aux is not None and abs(complex(spec.aux)) > abs(complex(spec.alpha)):
        return spec.aux
    return spec.alpha


def _kron_power(v: np.ndarray, n: int) -> np.ndarray:
    return functools.reduce(np.kron, [v] * n)


def _assemble(spec: CatStateSpec, cutoff: int, tail_tol: float) -> np.ndarray:
    alpha = complex(spec.alpha)
    family = spec.family
    if family in (CatFamily.EVEN_CAT, CatFamily.ODD_CAT):
        even, odd = kitten_vectors(alpha, cutoff, tail_tol)
        return (even if family is CatFamily.EVEN_CAT else odd).amplitudes
    if family is CatFamily.PRODUCT_COHERENT:
        one, _ = coherent_vector(alpha, cutoff, tail_tol)
        return _kron_power(one.amplitudes, spec.modes)
    if family is CatFamily.OMEGA:
        plus, _ = coherent_vector(alpha, cutoff, tail_tol)
        minus, _ = coherent_vector(-alpha, cutoff, tail_tol)
        branches = _kron_power(plus.amplitudes, spec.modes) + _kron_power(
            minus.amplitudes, spec.modes
        )
        return branches * omega_norm(spec.modes, alpha)
    if family is CatFamily.OMEGA_PRIME:
        root = math.sqrt(spec.modes) * alpha
        plus, _ = coherent_vector(root, cutoff, tail_tol)
        minus, _ = coherent_vector(-root, cutoff, tail_tol)
        head = (plus.amplitudes + minus.amplitudes) * omega_norm(spec.modes, alpha)
        vac = np.zeros(cutoff + 1, dtype=complex)
        vac[0] = 1.0
        if spec.modes == 1:
            return head
        return np.kron(head, _kron_power(vac, spec.modes - 1))
    if family is CatFamily.HCS:
        even, odd = kitten_vectors(alpha, cutoff, tail_tol)
        return (
            _kron_power(even.amplitudes, spec.modes)
            + _kron_power(odd.amplitudes, spec.modes)
        ) / math.sqrt(2.0)
    if family is CatFamily.GHZ_DISTILLED:
        plus, _ = coherent_vector(alpha, cutoff, tail_tol)
        minus, _ = coherent_vector(-alpha, cutoff, tail_tol)
        w = branch_overlap(alpha)
        ortho = (minus.amplitudes - w * plus.amplitudes) / math.sqrt(1.0 - w * w)
        return (
            _kron_power(plus.amplitudes, spec.modes) + _kron_power(ortho, spec.modes)
        ) / math.sqrt(2.0)
    raise DomainError(f"unknown family {family}")


def _check_mode_index(mode: int, modes: int):
    if not 0 <= mode < modes:
        raise DomainError(f"mode index {mode} out of range for {modes} modes")


def _check_mode_pair(mode_i: int, mode_j: int, modes: int):
    _check_mode_index(mode_i, modes)
    _check_mode_index(mode_j, modes)
    if mode_i == mode_j:
        raise DomainError("mode indices must differ")


def _check_hermitian(mat: np.ndarray, tol: float = _HERM_TOL):
    dev = float(np.max(np.abs(mat - mat.conj().T)))
    if dev > tol:
        raise DomainError(f"operator is not Hermitian (deviation {dev:.3e})")


def _check_density(mat: np.ndarray):
    _check_hermitian(mat)
    tr = complex(np.trace(mat))
    if abs(tr - 1.0) > _DENSITY_TOL:
        raise DomainError(f"density trace deviates from 1 by {abs(tr - 1.0):.3e}")
    floor = float(np.linalg.eigvalsh(mat)[0])
    if floor < -_DENSITY_TOL:
        raise DomainError(f"density has negative eigenvalue {floor:.3e}")


def _embed_two_mode(
    kernel: np.ndarray, mode_i: int, mode_j: int, modes: int, cutoff: int
) -> np.ndarray:
    _check_mode_pair(mode_i, mode_j, modes)
    dim = (cutoff + 1) ** modes
    if dim > MAX_OPERATOR_DIM:
        raise SizingError(
            f"operator dimension {dim} exceeds MAX_OPERATOR_DIM = {MAX_OPERATOR_DIM}"
        )
    if modes == 2 and (mode_i, mode_j) == (0, 1):
        return np.asarray(kernel, dtype=complex)
    d = cutoff + 1
    rest = [k for k in range(modes) if k not in (mode_i, mode_j)]
    full = np.kron(kernel, np.eye(d ** len(rest)))
    src_order = [mode_i, mode_j] + rest
    perm = [src_order.index(m) for m in range(modes)]
    t = full.reshape((d,) * (2 * modes))
    t = np.transpose(t, perm + [p + modes for p in perm])
    return t.reshape(dim, dim)
