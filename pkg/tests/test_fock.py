"""Truncated Fock-space infrastructure: states, operators, networks."""

import math

import numpy as np
import pytest

from catsize.closed_forms import (
    CatFamily,
    CatStateSpec,
    abs2,
    branch_overlap,
    helstrom_success_n_modes,
    marquardt_pd,
    omega_norm,
)
from catsize.errors import DomainError, SizingError, TruncationError
from catsize.fock import (
    MAX_JOINT_DIM,
    FockOperator,
    FockVector,
    apply_single_mode,
    apply_split_network,
    beamsplitter_op,
    build_state,
    cat_split_thetas,
    coherent_mixer,
    coherent_vector,
    default_cutoff,
    density,
    displacement_op,
    expectation,
    helstrom_povm,
    kitten_vectors,
    mode_ops,
    partial_trace,
    tensor,
    total_photon_pmf,
    trace_norm,
    variance,
)


def vacuum(cutoff: int) -> FockVector:
    amp = np.zeros(cutoff + 1, dtype=complex)
    amp[0] = 1.0
    return FockVector(cutoff=cutoff, modes=1, amplitudes=amp)


def fidelity(lhs: FockVector, rhs: FockVector) -> float:
    num = abs2(complex(np.vdot(lhs.amplitudes, rhs.amplitudes)))
    return num / (lhs.norm() ** 2 * rhs.norm() ** 2)


# ---------------------------------------------------------------------------
# single-mode states and operators
# ---------------------------------------------------------------------------

def test_coherent_vector_amplitudes():
    alpha = 0.7 - 0.4j
    vec, report = coherent_vector(alpha, 30)
    assert report.converged
    assert vec.norm() == pytest.approx(1.0, abs=1e-9)
    amp = math.exp(-abs2(alpha) / 2)
    expected = amp
    for n in range(5):
        assert vec.amplitudes[n] == pytest.approx(complex(expected), abs=1e-12)
        expected = expected * alpha / math.sqrt(n + 1)


def test_coherent_vector_truncation_error():
    with pytest.raises(TruncationError) as err:
        coherent_vector(3.0, 5)
    assert err.value.tail_mass > 0.5
    assert err.value.cutoff == 5


def test_default_cutoff_grows_with_amplitude():
    assert default_cutoff(0.0) == 20
    assert default_cutoff(1.0) == math.ceil(1 + 8 + 20)
    assert default_cutoff(2.0) > default_cutoff(1.0)


def test_mode_ops_algebra():
    ops = mode_ops(25)
    a = ops.annihilation.matrix
    adag = ops.creation.matrix
    comm = a @ adag - adag @ a
    # canonical commutator away from the truncation edge
    assert np.abs(comm[:-1, :-1] - np.eye(25)).max() < 1e-12
    assert np.abs(ops.number.matrix - adag @ a).max() < 1e-12
    parity = ops.parity.matrix
    assert np.abs(parity @ parity - np.eye(26)).max() < 1e-12
    x0 = ops.quadrature(0.0).matrix
    assert np.abs(x0 - (a + adag) / math.sqrt(2)).max() < 1e-12


def test_displacement_generates_coherent_state():
    alpha = 0.9 + 0.2j
    cutoff = 40
    disp = displacement_op(alpha, cutoff)
    target, _ = coherent_vector(alpha, cutoff)
    moved = disp.matrix @ vacuum(cutoff).amplitudes
    assert np.abs(moved - target.amplitudes).max() < 1e-10
    unitary = disp.matrix @ disp.matrix.conj().T
    assert np.abs(unitary[:30, :30] - np.eye(30)).max() < 1e-9


def test_kitten_vectors_are_orthonormal_ladder():
    alpha = 1.2
    even, odd = kitten_vectors(alpha, 40)
    assert even.norm() == pytest.approx(1.0, abs=1e-10)
    assert odd.norm() == pytest.approx(1.0, abs=1e-10)
    assert abs(np.vdot(even.amplitudes, odd.amplitudes)) < 1e-12
    t = math.sqrt(math.tanh(abs2(alpha)))
    a = mode_ops(40).annihilation.matrix
    assert np.abs(a @ even.amplitudes - alpha * t * odd.amplitudes).max() < 1e-12
    assert np.abs(a @ odd.amplitudes - (alpha / t) * even.amplitudes).max() < 1e-12


def test_expectation_and_variance():
    alpha = 1.1
    vec, _ = coherent_vector(alpha, 40)
    number = mode_ops(40).number
    assert complex(expectation(number, vec)).real == pytest.approx(abs2(alpha), rel=1e-10)
    assert variance(number, vec) == pytest.approx(abs2(alpha), rel=1e-9)


# ---------------------------------------------------------------------------
# composition, reduction, discrimination
# ---------------------------------------------------------------------------

def test_tensor_and_partial_trace_roundtrip():
    a, _ = coherent_vector(0.8, 12)
    b, _ = coherent_vector(-0.3, 12)
    joint = tensor(a, b)
    assert joint.modes == 2
    rho = density(joint)
    reduced = partial_trace(rho, keep=(0,))
    direct = density(a)
    assert np.abs(reduced.matrix - direct.matrix).max() < 1e-12
    assert complex(np.trace(reduced.matrix)).real == pytest.approx(1.0, abs=1e-12)


def test_partial_trace_of_entangled_state_is_mixed():
    spec = CatStateSpec(family=CatFamily.OMEGA, modes=2, alpha=1.0)
    vec, _ = build_state(spec)
    reduced = partial_trace(density(vec), keep=(1,))
    purity = complex(np.trace(reduced.matrix @ reduced.matrix)).real
    assert purity < 0.999
    assert complex(np.trace(reduced.matrix)).real == pytest.approx(1.0, abs=1e-10)


def test_trace_norm_of_known_difference():
    plus, _ = coherent_vector(1.0, 30)
    minus, _ = coherent_vector(-1.0, 30)
    diff = FockOperator(
        30,
        1,
        density(plus).matrix - density(minus).matrix,
        hermitian_hint=True,
    )
    w = branch_overlap(1.0)
    assert trace_norm(diff) == pytest.approx(2 * math.sqrt(1 - w * w), rel=1e-10)


def test_helstrom_povm_reaches_closed_form_success():
    plus, _ = coherent_vector(0.9, 30)
    minus, _ = coherent_vector(-0.9, 30)
    povm = helstrom_povm(density(plus), density(minus))
    assert povm.success_probability == pytest.approx(
        helstrom_success_n_modes(1, 0.9), abs=1e-10
    )
    closure = povm.plus.matrix + povm.minus.matrix
    assert np.abs(closure - np.eye(31)).max() < 1e-10


# ---------------------------------------------------------------------------
# state construction
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "family,modes",
    [
        (CatFamily.OMEGA, 1),
        (CatFamily.OMEGA, 3),
        (CatFamily.HCS, 2),
        (CatFamily.EVEN_CAT, 1),
        (CatFamily.ODD_CAT, 1),
        (CatFamily.PRODUCT_COHERENT, 2),
        (CatFamily.GHZ_DISTILLED, 2),
        (CatFamily.OMEGA_PRIME, 3),
    ],
)
def test_build_state_is_normalized(family, modes):
    spec = CatStateSpec(family=family, modes=modes, alpha=0.9)
    vec, report = build_state(spec)
    assert vec.modes == modes
    assert vec.norm() == pytest.approx(1.0, abs=1e-8)
    assert report.converged


def test_build_omega_matches_branch_sum():
    alpha, cutoff = 1.1, 35
    spec = CatStateSpec(family=CatFamily.OMEGA, modes=2, alpha=alpha)
    vec, _ = build_state(spec, cutoff=cutoff)
    plus, _ = coherent_vector(alpha, cutoff)
    minus, _ = coherent_vector(-alpha, cutoff)
    manual = (
        tensor(plus, plus).amplitudes + tensor(minus, minus).amplitudes
    ) * omega_norm(2, alpha)
    assert np.abs(vec.amplitudes - manual).max() < 1e-10


def test_build_state_sizing_guard():
    spec = CatStateSpec(family=CatFamily.OMEGA, modes=5, alpha=1.0)
    with pytest.raises(SizingError):
        build_state(spec, cutoff=40)
    assert (41) ** 5 > MAX_JOINT_DIM


def test_total_photon_pmf_of_product_is_poisson():
    alpha, modes = 0.8, 3
    spec = CatStateSpec(family=CatFamily.PRODUCT_COHERENT, modes=modes, alpha=alpha)
    vec, _ = build_state(spec, cutoff=24)
    pmf = total_photon_pmf(vec)
    for d in range(0, 20, 3):
        assert pmf[d] == pytest.approx(marquardt_pd(d, modes, alpha), abs=1e-10)


# ---------------------------------------------------------------------------
# splitting network
# ---------------------------------------------------------------------------

def test_mixer_splits_coherent_state_evenly():
    cutoff, b = 30, 0.8
    joint = tensor(coherent_vector(b, cutoff)[0], vacuum(cutoff))
    mixer = coherent_mixer(math.pi / 4, 0, 1, 2, cutoff)
    out = FockVector(cutoff=cutoff, modes=2, amplitudes=mixer.matrix @ joint.amplitudes)
    leaf, _ = coherent_vector(b / math.sqrt(2), cutoff)
    assert fidelity(out, tensor(leaf, leaf)) == pytest.approx(1.0, abs=1e-12)


def test_beamsplitter_conserves_photon_number():
    cutoff = 12
    op = beamsplitter_op(0.6, 0, 1, 2, cutoff)
    joint = tensor(coherent_vector(0.7, cutoff)[0], coherent_vector(0.4, cutoff)[0])
    before = total_photon_pmf(joint)
    after = total_photon_pmf(
        FockVector(cutoff=cutoff, modes=2, amplitudes=op.matrix @ joint.amplitudes)
    )
    assert np.abs(before - after).max() < 1e-10


def test_cat_split_thetas_recursion():
    thetas = cat_split_thetas(4)
    assert len(thetas) == 3
    assert thetas[-1] == pytest.approx(math.pi / 4, rel=1e-12)
    # each earlier angle solves tan(theta_q) = 1 / cos(theta_{q+1})
    for q in range(len(thetas) - 1):
        assert math.tan(thetas[q]) == pytest.approx(
            1.0 / math.cos(thetas[q + 1]), rel=1e-12
        )


@pytest.mark.parametrize("modes", [2, 3])
def test_split_network_fans_out_coherent_state(modes):
    alpha = 0.5
    cutoff = default_cutoff(math.sqrt(modes) * alpha)
    head, _ = coherent_vector(math.sqrt(modes) * alpha, cutoff)
    source = tensor(head, *([vacuum(cutoff)] * (modes - 1)))
    out = apply_split_network(source)
    leaf, _ = coherent_vector(alpha, cutoff)
    target = tensor(*([leaf] * modes))
    assert fidelity(out, target) >= 1.0 - 1e-8


def test_split_network_carries_superposition():
    modes, alpha = 3, 0.8
    cutoff = default_cutoff(math.sqrt(modes) * alpha)
    prime = CatStateSpec(family=CatFamily.OMEGA_PRIME, modes=modes, alpha=alpha)
    omega = CatStateSpec(family=CatFamily.OMEGA, modes=modes, alpha=alpha)
    source, _ = build_state(prime, cutoff=cutoff)
    target, _ = build_state(omega, cutoff=cutoff)
    assert fidelity(apply_split_network(source), target) >= 1.0 - 1e-8


def test_apply_single_mode_acts_on_named_mode_only():
    cutoff = 14
    a, _ = coherent_vector(0.6, cutoff)
    b, _ = coherent_vector(-0.9, cutoff)
    joint = tensor(a, b)
    number = mode_ops(cutoff).number.matrix
    bumped = apply_single_mode(number, joint, 1)
    val = complex(np.vdot(joint.amplitudes, bumped.amplitudes)).real
    assert val == pytest.approx(abs2(-0.9), rel=1e-9)
