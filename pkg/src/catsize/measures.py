"""The cat-size measures, uniformly packaged.

Each measure returns a MeasureResult tagging the value with its parameters
and provenance.  Variances of mode-summed generators over two-branch
superpositions are evaluated exactly through the Gram reduction: a state
c1 |u>^N + c2 |v>^N needs only the 2x2 tables <x|A|y>, <x|A^2|y> and the
overlap g = <u|v>, with the mode count entering through powers of g.  The
truncated Fock oracle re-derives the same numbers at small mode counts.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .closed_forms import (
    CatFamily,
    CatStateSpec,
    GeneratorKind,
    MeasureParams,
    abs2,
    branch_overlap,
    cat_size_C,
    cat_size_C_approx,
    delta_validity_interval,
    distill_expected_n,
    distill_pm,
    equivalent_ghz_size,
    ghz_mode_loss_offdiag,
    hcs_norms,
    helstrom_success_n_modes,
    marquardt_pd,
    marquardt_s,
    mode_loss_offdiag,
    mode_loss_offdiag_mean,
    n_eff_integer,
    n_eff_real,
    rdm_particle_trace,
)
from .errors import DomainError, ResolutionError
from .fock import (
    MAX_OPERATOR_DIM,
    FockOperator,
    FockVector,
    apply_single_mode,
    build_state,
    coherent_vector,
    default_cutoff,
    density,
    kitten_vectors,
    mode_ops,
    tensor,
    total_photon_pmf,
    trace_norm,
)
from .phase_space import default_feature_window, extract_features, wigner_grid


class MeasureKind(enum.Enum):
    BRANCH_DIST_INT = "branch-dist-int"
    BRANCH_DIST_REAL = "branch-dist-real"
    RQFI = "rqfi"
    MARQUARDT = "marquardt"
    DISTILLATION = "distillation"
    MODE_LOSS = "mode-loss"
    WIGNER_EMPIRICAL = "wigner-empirical"


class Method(enum.Enum):
    CLOSED_FORM = "closed-form"
    ORACLE = "oracle"
    HYBRID = "hybrid"
    LOWER_BOUND = "lower-bound"


@dataclass(frozen=True)
class MeasureResult:
    measure: MeasureKind
    value: float
    params: MeasureParams
    state: CatStateSpec
    method: Method
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value >= 0.0:
            raise DomainError(f"a size must be nonnegative, got {self.value}")


# ---------------------------------------------------------------------------
# generator families
# ---------------------------------------------------------------------------

_KIND_ORDER = (
    GeneratorKind.BOUNDED_LOCAL,
    GeneratorKind.QUADRATURE,
    GeneratorKind.NUMBER,
    GeneratorKind.SPIN_SANDWICH,
)


@dataclass(frozen=True)
class GeneratorFamily:
    """A finite menu of per-mode generators to maximize over.

    The sandwich generators are normalized differently from the three
    capped families (their single-branch information grows with |alpha|),
    so they do not combine with the others in one maximization.
    """

    kinds: frozenset
    n_phases: int = 16

    def __post_init__(self):
        if not self.kinds:
            raise DomainError("a generator family needs at least one kind")
        if GeneratorKind.SPIN_SANDWICH in self.kinds and len(self.kinds) > 1:
            raise DomainError(
                "sandwich generators use a branch-variance denominator and "
                "cannot be mixed with the capped families"
            )

    @classmethod
    def bounded_local(cls) -> "GeneratorFamily":
        return cls(kinds=frozenset({GeneratorKind.BOUNDED_LOCAL}))

    @classmethod
    def quadrature(cls, n_phases: int = 16) -> "GeneratorFamily":
        return cls(kinds=frozenset({GeneratorKind.QUADRATURE}), n_phases=n_phases)

    @classmethod
    def number(cls) -> "GeneratorFamily":
        return cls(kinds=frozenset({GeneratorKind.NUMBER}))

    @classmethod
    def spin_sandwich(cls) -> "GeneratorFamily":
        return cls(kinds=frozenset({GeneratorKind.SPIN_SANDWICH}))

    @classmethod
    def from_label(cls, label: str) -> "GeneratorFamily":
        """Parse 'quadrature', 'quadrature+number', etc."""
        kinds = set()
        for part in label.split("+"):
            part = part.strip()
            try:
                kinds.add(GeneratorKind(part))
            except ValueError:
                allowed = ", ".join(k.value for k in _KIND_ORDER)
                raise DomainError(
                    f"unknown generator kind {part!r}; expected one of {allowed}"
                ) from None
        return cls(kinds=frozenset(kinds))

    def __or__(self, other: "GeneratorFamily") -> "GeneratorFamily":
        return GeneratorFamily(
            kinds=self.kinds | other.kinds,
            n_phases=max(self.n_phases, other.n_phases),
        )

    def label(self) -> str:
        return "+".join(k.value for k in _KIND_ORDER if k in self.kinds)


@dataclass(frozen=True)
class ModeGenerator:
    """One per-mode generator with its exact 2x2 bracket tables.

    g is the branch overlap <u|v>; the a_* entries are <x|A|y> and the
    a2_* entries <x|A^2|y> over the branch pair; var_u, var_v are the
    single-mode variances on each branch.  ``builder`` produces the truncated
    matrix for the Fock oracle.
    """

    label: str
    kind: GeneratorKind
    g: complex
    a_uu: complex
    a_uv: complex
    a_vv: complex
    a2_uu: complex
    a2_uv: complex
    a2_vv: complex
    var_u: float
    var_v: float
    builder: Callable[[int], np.ndarray]


def _two_branch_variance(gen: ModeGenerator, modes: int, c1: complex, c2: complex) -> float:
    """Variance of the mode sum of ``gen`` over c1 |u>^N + c2 |v>^N."""
    n = modes
    g = complex(gen.g)
    gram = np.array([[1.0 + 0j, g], [g.conjugate(), 1.0 + 0j]])
    first = np.array(
        [[gen.a_uu, gen.a_uv], [complex(gen.a_uv).conjugate(), gen.a_vv]]
    )
    second = np.array(
        [[gen.a2_uu, gen.a2_uv], [complex(gen.a2_uv).conjugate(), gen.a2_vv]]
    )
    coeff = np.array([c1, c2])
    norm_sq = 0.0 + 0j
    e1 = 0.0 + 0j
    e2 = 0.0 + 0j
    for x in range(2):
        for y in range(2):
            weight = coeff[x].conjugate() * coeff[y]
            gxy = gram[x, y]
            norm_sq += weight * gxy ** n
            e1 += weight * n * first[x, y] * gxy ** (n - 1)
            term = n * second[x, y] * gxy ** (n - 1)
            if n >= 2:
                term += n * (n - 1) * first[x, y] ** 2 * gxy ** (n - 2)
            e2 += weight * term
    mean = e1 / norm_sq
    return float((e2 / norm_sq).real - (mean.real ** 2 - mean.imag ** 2))


# ---------------------------------------------------------------------------
# bracket tables and oracle builders
# ---------------------------------------------------------------------------

def _pseudo_sigma_z_builder(alpha):
    def build(cutoff: int) -> np.ndarray:
        plus, _ = coherent_vector(alpha, cutoff)
        minus, _ = coherent_vector(-alpha, cutoff)
        a_plus, a_minus = hcs_norms(alpha)
        even = (plus.amplitudes + minus.amplitudes) / a_plus
        odd = (plus.amplitudes - minus.amplitudes) / a_minus
        xi_p = (even + odd) / math.sqrt(2.0)
        xi_m = (even - odd) / math.sqrt(2.0)
        return np.outer(xi_p, xi_p.conj()) - np.outer(xi_m, xi_m.conj())

    return build


def _quadrature_builder(phi):
    return lambda cutoff: mode_ops(cutoff).quadrature(phi).matrix


def _number_builder(cutoff: int) -> np.ndarray:
    return mode_ops(cutoff).number.matrix


def _kitten_sigma_z_builder(alpha):
    def build(cutoff: int) -> np.ndarray:
        even, odd = kitten_vectors(alpha, cutoff)
        return np.outer(even.amplitudes, even.amplitudes.conj()) - np.outer(
            odd.amplitudes, odd.amplitudes.conj()
        )

    return build


def _sandwich_builder(alpha, axis: str):
    def build(cutoff: int) -> np.ndarray:
        even, odd = kitten_vectors(alpha, cutoff)
        e, o = even.amplitudes, odd.amplitudes
        if axis == "z":
            core = np.outer(e, e.conj()) - np.outer(o, o.conj())
        else:
            core = np.outer(e, o.conj()) + np.outer(o, e.conj())
        ops = mode_ops(cutoff)
        return ops.creation.matrix @ core @ ops.annihilation.matrix

    return build


def _coherent_pair_generators(alpha, family: GeneratorFamily) -> list[ModeGenerator]:
    """Brackets over u = |alpha>, v = |-alpha>."""
    a = abs2(alpha)
    w = branch_overlap(alpha)
    s = math.sqrt(1.0 - w * w)
    gens = []
    if GeneratorKind.BOUNDED_LOCAL in family.kinds:
        gens.append(
            ModeGenerator(
                label="pseudo-sigma-z",
                kind=GeneratorKind.BOUNDED_LOCAL,
                g=w,
                a_uu=s,
                a_uv=0.0,
                a_vv=-s,
                a2_uu=1.0,
                a2_uv=w,
                a2_vv=1.0,
                var_u=1.0 - s * s,
                var_v=1.0 - s * s,
                builder=_pseudo_sigma_z_builder(alpha),
            )
        )
    if GeneratorKind.QUADRATURE in family.kinds:
        base = cmath.phase(alpha) if alpha != 0 else 0.0
        for k in range(family.n_phases):
            phi = base + k * math.pi / family.n_phases
            rot = alpha * cmath.exp(-1j * phi)
            mean_u = math.sqrt(2.0) * rot.real
            sq = 2.0 * (rot * rot).real
            gens.append(
                ModeGenerator(
                    label=f"quadrature(phi=base+{k}pi/{family.n_phases})",
                    kind=GeneratorKind.QUADRATURE,
                    g=w,
                    a_uu=mean_u,
                    a_uv=-1j * math.sqrt(2.0) * w * rot.imag,
                    a_vv=-mean_u,
                    a2_uu=(sq + 2.0 * a + 1.0) / 2.0,
                    a2_uv=w * (sq - 2.0 * a + 1.0) / 2.0,
                    a2_vv=(sq + 2.0 * a + 1.0) / 2.0,
                    var_u=0.5,
                    var_v=0.5,
                    builder=_quadrature_builder(phi),
                )
            )
    if GeneratorKind.NUMBER in family.kinds:
        gens.append(
            ModeGenerator(
                label="number",
                kind=GeneratorKind.NUMBER,
                g=w,
                a_uu=a,
                a_uv=-a * w,
                a_vv=a,
                a2_uu=a * a + a,
                a2_uv=(a * a - a) * w,
                a2_vv=a * a + a,
                var_u=a,
                var_v=a,
                builder=_number_builder,
            )
        )
    if GeneratorKind.SPIN_SANDWICH in family.kinds:
        raise DomainError(
            "sandwich generators act on the kitten pair; only the hidden "
            "superposition family supports them"
        )
    return gens


def _kitten_pair_generators(alpha, family: GeneratorFamily) -> list[ModeGenerator]:
    """Brackets over u = even kitten, v = odd kitten (orthogonal pair)."""
    a = abs2(alpha)
    t_sq = math.tanh(a)
    n_u = a * t_sq
    n_v = a / t_sq
    gens = []
    if GeneratorKind.BOUNDED_LOCAL in family.kinds:
        gens.append(
            ModeGenerator(
                label="kitten-sigma-z",
                kind=GeneratorKind.BOUNDED_LOCAL,
                g=0.0,
                a_uu=1.0,
                a_uv=0.0,
                a_vv=-1.0,
                a2_uu=1.0,
                a2_uv=0.0,
                a2_vv=1.0,
                var_u=0.0,
                var_v=0.0,
                builder=_kitten_sigma_z_builder(alpha),
            )
        )
    if GeneratorKind.QUADRATURE in family.kinds:
        base = cmath.phase(alpha) if alpha != 0 else 0.0
        for k in range(family.n_phases):
            phi = base + k * math.pi / family.n_phases
            rot = alpha * cmath.exp(-1j * phi)
            sq = 2.0 * (rot * rot).real
            x2_uu = (sq + 2.0 * n_u + 1.0) / 2.0
            x2_vv = (sq + 2.0 * n_v + 1.0) / 2.0
            root = math.sqrt(t_sq)
            cross = (
                (alpha / root) * cmath.exp(-1j * phi)
                + alpha.conjugate() * root * cmath.exp(1j * phi)
            ) / math.sqrt(2.0)
            gens.append(
                ModeGenerator(
                    label=f"quadrature(phi=base+{k}pi/{family.n_phases})",
                    kind=GeneratorKind.QUADRATURE,
                    g=0.0,
                    a_uu=0.0,
                    a_uv=cross,
                    a_vv=0.0,
                    a2_uu=x2_uu,
                    a2_uv=0.0,
                    a2_vv=x2_vv,
                    var_u=x2_uu,
                    var_v=x2_vv,
                    builder=_quadrature_builder(phi),
                )
            )
    if GeneratorKind.NUMBER in family.kinds:
        gens.append(
            ModeGenerator(
                label="number",
                kind=GeneratorKind.NUMBER,
                g=0.0,
                a_uu=n_u,
                a_uv=0.0,
                a_vv=n_v,
                a2_uu=a * a + n_u,
                a2_uv=0.0,
                a2_vv=a * a + n_v,
                var_u=a * a + n_u - n_u * n_u,
                var_v=a * a + n_v - n_v * n_v,
                builder=_number_builder,
            )
        )
    if GeneratorKind.SPIN_SANDWICH in family.kinds:
        gens.append(
            ModeGenerator(
                label="sandwich-z",
                kind=GeneratorKind.SPIN_SANDWICH,
                g=0.0,
                a_uu=-n_u,
                a_uv=0.0,
                a_vv=n_v,
                a2_uu=a * a + n_u,
                a2_uv=0.0,
                a2_vv=a * a + n_v,
                var_u=a * a + n_u - n_u * n_u,
                var_v=a * a + n_v - n_v * n_v,
                builder=_sandwich_builder(alpha, "z"),
            )
        )
        gens.append(
            ModeGenerator(
                label="sandwich-x",
                kind=GeneratorKind.SPIN_SANDWICH,
                g=0.0,
                a_uu=0.0,
                a_uv=a,
                a_vv=0.0,
                a2_uu=n_u * (n_u + 1.0),
                a2_uv=0.0,
                a2_vv=n_v * (n_v + 1.0),
                var_u=n_u * (n_u + 1.0),
                var_v=n_v * (n_v + 1.0),
                builder=_sandwich_builder(alpha, "x"),
            )
        )
    return gens


_RQFI_FAMILIES = (CatFamily.OMEGA, CatFamily.HCS, CatFamily.EVEN_CAT, CatFamily.ODD_CAT)


def _superposition_coeffs(state: CatStateSpec) -> tuple[complex, complex]:
    if state.family is CatFamily.ODD_CAT:
        return 1.0, -1.0
    return 1.0, 1.0


def _generators_for(state: CatStateSpec, family: GeneratorFamily) -> list[ModeGenerator]:
    if state.family is CatFamily.HCS:
        return _kitten_pair_generators(complex(state.alpha), family)
    return _coherent_pair_generators(complex(state.alpha), family)


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

def branch_dist_size(state: CatStateSpec, delta: float) -> MeasureResult:
    """Integer-mode distinguishability size N / n_eff.

    Delegates the interval enforcement and the ceiling to the closed forms;
    cross-checks the optimal success probability against the trace-norm
    oracle whenever a joint density of n_eff (capped at 2) modes fits.
    """
    _require_family(state, (CatFamily.OMEGA,))
    value = cat_size_C(delta, state.modes, state.alpha)
    n_int = n_eff_integer(delta, state.alpha)
    lo, hi = delta_validity_interval(state.modes, state.alpha)
    diagnostics = {
        "n_eff_real": n_eff_real(delta, state.alpha),
        "n_eff_integer": n_int,
        "validity_interval": (lo, hi),
        "success_at_n_eff": helstrom_success_n_modes(n_int, state.alpha),
    }
    method = Method.CLOSED_FORM
    cutoff = default_cutoff(state.alpha)
    for n_check in range(min(n_int, 2), 0, -1):
        if (cutoff + 1) ** n_check <= MAX_OPERATOR_DIM:
            diagnostics["oracle"] = _trace_norm_check(state.alpha, n_check, cutoff)
            method = Method.HYBRID
            break
    return MeasureResult(
        measure=MeasureKind.BRANCH_DIST_INT,
        value=value,
        params=MeasureParams(delta=delta),
        state=state,
        method=method,
        diagnostics=diagnostics,
    )


def _trace_norm_check(alpha, n_check: int, cutoff: int) -> dict:
    plus, _ = coherent_vector(alpha, cutoff)
    minus, _ = coherent_vector(-alpha, cutoff)
    rho_p = density(tensor(*([plus] * n_check)))
    rho_m = density(tensor(*([minus] * n_check)))
    diff = FockOperator(
        cutoff, n_check, rho_p.matrix - rho_m.matrix, hermitian_hint=True
    )
    numeric = 0.5 + 0.25 * trace_norm(diff)
    closed = helstrom_success_n_modes(n_check, alpha)
    return {
        "modes_checked": n_check,
        "cutoff": cutoff,
        "closed": closed,
        "numeric": numeric,
        "difference": abs(closed - numeric),
    }


def branch_dist_size_real(state: CatStateSpec, delta: float) -> MeasureResult:
    """Noninteger variant: the closed approximation with no interval clamp."""
    _require_family(state, (CatFamily.OMEGA, CatFamily.EVEN_CAT))
    value = cat_size_C_approx(delta, state.modes, state.alpha)
    diagnostics = {}
    if state.alpha != 0:
        n_real = n_eff_real(delta, state.alpha)
        diagnostics["n_eff_real"] = n_real
        diagnostics["integer_counterpart"] = state.modes / n_eff_integer(
            delta, state.alpha
        )
    return MeasureResult(
        measure=MeasureKind.BRANCH_DIST_REAL,
        value=value,
        params=MeasureParams(delta=delta),
        state=state,
        method=Method.CLOSED_FORM,
        diagnostics=diagnostics,
    )


def rqfi_size(
    state: CatStateSpec,
    family: GeneratorFamily,
    n_list=None,
    oracle_budget: int = 0,
) -> MeasureResult:
    """Fisher-information size: best family variance over the mean branch cap.

    The three capped kinds share the product-branch reference (per-mode
    information capped at the bounded-operator value, giving a unit
    denominator); the sandwich kind divides by the mean of the two branches'
    best per-mode variances.  Either way the value is a lower bound to the
    unrestricted maximization, and is exact for every mode count through the
    Gram reduction; ``oracle_budget`` > 0 additionally rebuilds the achieving
    generator in a truncated Fock space when the joint dimension fits.
    """
    _require_family(state, _RQFI_FAMILIES)
    if state.alpha == 0:
        raise DomainError("the branch pair degenerates at alpha = 0")
    if not isinstance(family, GeneratorFamily):
        raise DomainError("family must be a GeneratorFamily")
    if GeneratorKind.SPIN_SANDWICH in family.kinds and state.family is not CatFamily.HCS:
        raise DomainError(
            "sandwich generators act on the kitten pair; only the hidden "
            "superposition family supports them"
        )
    gens = _generators_for(state, family)
    c1, c2 = _superposition_coeffs(state)

    def evaluate(modes: int) -> tuple[float, ModeGenerator, float]:
        best_var = -math.inf
        best_gen = None
        for gen in gens:
            var = _two_branch_variance(gen, modes, c1, c2)
            if var > best_var:
                best_var, best_gen = var, gen
        if family.kinds == {GeneratorKind.SPIN_SANDWICH}:
            denom = 0.5 * max(g.var_u for g in gens) + 0.5 * max(
                g.var_v for g in gens
            )
        else:
            denom = 1.0
        return best_var / (modes * denom), best_gen, denom

    value, achieving, denominator = evaluate(state.modes)
    diagnostics = {
        "family": family.label(),
        "achieving_generator": achieving.label,
        "variance": value * state.modes * denominator,
        "denominator": denominator,
        "branch_variance_maxima": {
            "u": max(g.var_u for g in gens),
            "v": max(g.var_v for g in gens),
        },
    }
    if n_list:
        diagnostics["sweep"] = {
            str(n): evaluate(int(n))[0] for n in n_list
        }
    if oracle_budget > 0:
        diagnostics["oracle"] = _rqfi_oracle(state, achieving, oracle_budget)
    return MeasureResult(
        measure=MeasureKind.RQFI,
        value=value,
        params=MeasureParams(family=tuple(k for k in _KIND_ORDER if k in family.kinds)),
        state=state,
        method=Method.LOWER_BOUND,
        diagnostics=diagnostics,
    )


def _rqfi_oracle(state: CatStateSpec, gen: ModeGenerator, budget: int) -> dict:
    """Recompute the achieving variance on a truncated joint vector."""
    floor = default_cutoff(state.alpha)
    afford = int(budget ** (1.0 / state.modes)) - 1
    if afford < floor:
        return {
            "status": "skipped",
            "reason": f"budget {budget} allows cutoff {afford} < required {floor}",
        }
    cutoff = min(floor + 8, afford)
    vec, _ = build_state(state, cutoff=cutoff)
    vec = FockVector(
        cutoff=vec.cutoff, modes=vec.modes, amplitudes=vec.amplitudes / vec.norm()
    )
    mat = gen.builder(cutoff)
    if gen.kind is GeneratorKind.BOUNDED_LOCAL:
        top = float(np.linalg.norm(mat, 2))
        if top > 1.0 + 1e-9:
            raise DomainError(
                f"bounded generator has operator norm {top:.12f} > 1"
            )
    summed = np.zeros_like(vec.amplitudes)
    for mode in range(state.modes):
        summed = summed + apply_single_mode(mat, vec, mode).amplitudes
    e1 = float(np.vdot(vec.amplitudes, summed).real)
    e2 = float(np.vdot(summed, summed).real)
    numeric = e2 - e1 * e1
    c1, c2 = _superposition_coeffs(state)
    closed = _two_branch_variance(gen, state.modes, c1, c2)
    return {
        "status": "ok",
        "generator": gen.label,
        "cutoff": cutoff,
        "closed_variance": closed,
        "numeric_variance": numeric,
        "difference": abs(closed - numeric),
    }


def marquardt_size(
    state: CatStateSpec, numeric_check: bool = False, cutoff: int | None = None
) -> MeasureResult:
    """Mean of the Poissonian transfer distribution, s = N |alpha|^2.

    The numeric route conjugates the branch step by per-mode displacements:
    moving |-alpha>^N to |alpha>^N costs D(2 alpha) on every mode, and the
    photon distribution of the displaced product is the transfer pmf.  Any
    auxiliary vacuum mode factors out of that count and is ignored.
    """
    _require_family(state, (CatFamily.OMEGA,))
    s = marquardt_s(state.modes, state.alpha)
    diagnostics = {
        "distribution": "poisson",
        "mean": s,
        "variance": s,
        "route": "per-mode displacement by 2 alpha maps the lower branch "
        "onto the upper; the transfer count is the displaced photon total",
    }
    method = Method.CLOSED_FORM
    if numeric_check:
        shifted = complex(state.alpha) * 2.0
        use_cutoff = cutoff if cutoff is not None else default_cutoff(shifted)
        spec_big = CatStateSpec(
            family=CatFamily.PRODUCT_COHERENT, modes=state.modes, alpha=shifted
        )
        spec_branch = CatStateSpec(
            family=CatFamily.PRODUCT_COHERENT, modes=state.modes, alpha=state.alpha
        )
        vec_big, _ = build_state(spec_big, cutoff=use_cutoff)
        vec_branch, _ = build_state(spec_branch, cutoff=use_cutoff)
        pmf_big = total_photon_pmf(vec_big)
        pmf_branch = total_photon_pmf(vec_branch)
        grid = np.arange(pmf_big.size)
        ref_big = np.array(
            [marquardt_pd(int(d), state.modes, shifted) for d in grid]
        )
        ref_branch = np.array(
            [marquardt_pd(int(d), state.modes, state.alpha) for d in grid]
        )
        mean_branch = float(np.dot(grid, pmf_branch))
        diagnostics["numeric"] = {
            "cutoff": use_cutoff,
            "displaced_max_abs_diff": float(np.abs(pmf_big - ref_big).max()),
            "branch_max_abs_diff": float(np.abs(pmf_branch - ref_branch).max()),
            "branch_mean": mean_branch,
            "mean_abs_error": abs(mean_branch - s),
        }
        method = Method.HYBRID
    return MeasureResult(
        measure=MeasureKind.MARQUARDT,
        value=s,
        params=MeasureParams(),
        state=state,
        method=method,
        diagnostics=diagnostics,
    )


def distillation_size(state: CatStateSpec) -> MeasureResult:
    """Expected number of split outcomes from the mode-by-mode cascade."""
    _require_family(state, (CatFamily.OMEGA,))
    value = distill_expected_n(state.modes, state.alpha)
    a = abs2(state.alpha)
    s = state.modes * a
    head = {
        str(m): distill_pm(m, state.modes, state.alpha)
        for m in range(1, min(state.modes, 4) + 1)
    }
    return MeasureResult(
        measure=MeasureKind.DISTILLATION,
        value=value,
        params=MeasureParams(),
        state=state,
        method=Method.CLOSED_FORM,
        diagnostics={
            "success_probability": math.tanh(s),
            "first_split_head": head,
            "large_alpha_limit": float(state.modes),
        },
    )


def mode_loss_size(state: CatStateSpec, lam: float) -> MeasureResult:
    """Equivalent GHZ size M = 2 N |alpha|^2 under per-mode loss.

    The value itself does not depend on the loss rate; lambda enters the
    diagnostics, which compare the coherence decay of the state against the
    M-partite reference at that rate.
    """
    _require_family(state, (CatFamily.OMEGA,))
    params = MeasureParams(lam=lam)
    value = equivalent_ghz_size(state.modes, state.alpha)
    return MeasureResult(
        measure=MeasureKind.MODE_LOSS,
        value=value,
        params=params,
        state=state,
        method=Method.CLOSED_FORM,
        diagnostics={
            "omega_offdiag": mode_loss_offdiag(state.modes, state.alpha, lam),
            "omega_offdiag_mean": mode_loss_offdiag_mean(
                state.modes, state.alpha, lam
            ),
            "ghz_offdiag": ghz_mode_loss_offdiag(value, lam),
            "particle_trace_reference": rdm_particle_trace(state.modes, state.alpha),
        },
    )


def wigner_empirical_size(state: CatStateSpec, steps: int | None = None) -> MeasureResult:
    """Squared distance between the detected phase-space branch peaks.

    Scans a slice wide enough for both lobes on the documented default
    window; two-mode states are sliced through the real-real plane where the
    branch peaks sit.
    """
    if state.family is CatFamily.EVEN_CAT:
        pass
    elif state.family is CatFamily.OMEGA and state.modes <= 2:
        pass
    else:
        raise DomainError(
            "empirical peak detection covers the single-mode even state and "
            "the two-branch state with at most 2 modes"
        )
    lo, hi, default_steps = default_feature_window(state.alpha)
    count = steps if steps is not None else default_steps
    line = np.linspace(lo, hi, count)
    if state.modes == 1:
        grid = wigner_grid(state, {"re": line, "im": line})
    else:
        grid = wigner_grid(
            state, {"re1": line, "im1": 0.0, "re2": line, "im2": 0.0}
        )
    features = extract_features(grid)
    if features.peak_separation is None:
        raise ResolutionError(
            "peak detection found fewer than two significant extrema; "
            "widen or refine the grid"
        )
    sep = features.peak_separation
    mod = abs(complex(state.alpha))
    diagnostics = {
        "separation": sep,
        "reference_separation": 2.0 * math.sqrt(state.modes) * mod,
        "fringe_wavelength": features.fringe_wavelength,
        "fringe_axis": features.fringe_axis,
        "grid_step": float(line[1] - line[0]) if count > 1 else 0.0,
        "window": (lo, hi, count),
        "n_peaks": len(features.peak_values),
    }
    if mod > 0:
        diagnostics["reference_wavelength"] = math.pi / (2.0 * mod)
    return MeasureResult(
        measure=MeasureKind.WIGNER_EMPIRICAL,
        value=sep * sep,
        params=MeasureParams(),
        state=state,
        method=Method.ORACLE,
        diagnostics=diagnostics,
    )


def _require_family(state: CatStateSpec, allowed):
    if state.family not in allowed:
        names = ", ".join(f.value for f in allowed)
        raise DomainError(
            f"measure defined for {names}; got {state.family.value}"
        )
