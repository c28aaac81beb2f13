"""Monte Carlo simulation of the sequential measurement protocols.

Every state touched here lives in the two-dimensional span of one mode's
{|alpha>, |-alpha>}, so the protocols are simulated exactly in an orthonormal
frame for that span: |alpha> = (1, 0) and |-alpha> = (w, s) with
w = exp(-2|alpha|^2) and s = sqrt(1 - w^2).  Trajectories over many modes
never build a joint Fock space; mode counts in the hundreds are cheap.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .closed_forms import abs2, branch_overlap
from .errors import DomainError

SEED_SCHEME = "philox(key=(seed, trajectory_index))"


def _trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per trajectory, reproducible under any execution order."""
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class TrajectoryStats:
    """Aggregate of a batch of independent trajectories."""

    trials: int
    histogram: dict
    mean: float
    variance: float
    std_error: float
    seed: int
    seed_scheme: str = SEED_SCHEME
    extra: dict = field(default_factory=dict)


def _stats_fields(samples) -> tuple[float, float, float]:
    n = len(samples)
    mean = math.fsum(samples) / n
    if n > 1:
        var = math.fsum((x - mean) ** 2 for x in samples) / (n - 1)
    else:
        var = 0.0
    return mean, var, math.sqrt(var / n)


# ---------------------------------------------------------------------------
# distillation POVM
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistillationPOVM:
    """Per-mode two-outcome measurement that splits the branches apart.

    Coordinates are in the orthonormal frame {e1, e2} with e1 = |alpha> and
    e2 proportional to |-alpha> - w|alpha>.  E1 swaps the branches onto the
    orthonormal pair (up to the scale k s); E2 maps both branches to the same
    vector, postponing the split.
    """

    alpha: complex
    e1: np.ndarray
    e2: np.ndarray
    k: float
    E1: np.ndarray
    E2: np.ndarray


def build_distillation_povm(alpha) -> DistillationPOVM:
    """Solve for the scale k that makes the complementary effect rank one."""
    if alpha == 0:
        raise DomainError("the branch span degenerates at alpha = 0")
    w = branch_overlap(alpha)
    s = math.sqrt(1.0 - w * w)
    # |phi_-> is the vector in the span orthogonal to |-alpha>.
    phi_minus = np.array([s, -w])
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    raw = np.outer(e1, e2) + np.outer(e2, phi_minus)
    gram = raw.T @ raw
    k = 1.0 / math.sqrt(float(np.linalg.eigvalsh(gram)[-1]))
    effect_1 = k * raw
    residual = np.eye(2) - effect_1.T @ effect_1
    vals, vecs = np.linalg.eigh(residual)
    chi = vecs[:, -1]
    effect_2 = math.sqrt(max(float(vals[-1]), 0.0)) * np.outer(chi, chi)
    return DistillationPOVM(
        alpha=complex(alpha), e1=e1, e2=e2, k=k, E1=effect_1, E2=effect_2
    )


def distillation_outcome_distribution(modes: int, alpha) -> np.ndarray:
    """Exact probability of ending with n split outcomes, n = 0 .. N.

    Computed by dynamic programming over (mode index, split flag, count):
    before any split the split probability at a step with ``rem`` unmeasured
    modes is (1 - w)/(1 + w^rem); afterwards it is 1 - w independently.
    """
    if modes < 1:
        raise DomainError(f"modes must be >= 1, got {modes}")
    w = branch_overlap(alpha)
    # unsplit[j] = probability of no split in the first j modes
    probs = np.zeros(modes + 1)
    unsplit = 1.0
    first_at = np.zeros(modes + 1)
    for j in range(1, modes + 1):
        rem = modes - j + 1
        p_split = (1.0 - w) / (1.0 + w ** rem)
        first_at[j] = unsplit * p_split
        unsplit *= 1.0 - p_split
    probs[0] = unsplit
    # after a first split at mode m the remaining N - m modes split i.i.d.
    for m in range(1, modes + 1):
        rest = modes - m
        for extra in range(rest + 1):
            comb = math.comb(rest, extra)
            probs[1 + extra] += (
                first_at[m] * comb * (1.0 - w) ** extra * w ** (rest - extra)
            )
    return probs


def simulate_distillation(modes: int, alpha, trials: int, seed: int) -> TrajectoryStats:
    """Sample the mode-by-mode POVM cascade; outcome is the split count n.

    The two branch coefficients start equal and stay equal under both
    outcomes (each multiplies them by one common scalar), so the exact Born
    probabilities depend only on whether a split has happened yet and on the
    number of unmeasured modes; that is what each trajectory tracks.
    """
    _check_trials(trials)
    if modes < 1:
        raise DomainError(f"modes must be >= 1, got {modes}")
    if alpha == 0:
        raise DomainError("the branch span degenerates at alpha = 0")
    w = branch_overlap(alpha)
    counts: dict[int, int] = {}
    first_counts: dict[int, int] = {}
    samples = []
    for t in range(trials):
        draws = _trajectory_rng(seed, t).random(modes)
        split = False
        n = 0
        first = 0
        for j in range(modes):
            rem = modes - j
            p_split = (1.0 - w) if split else (1.0 - w) / (1.0 + w ** rem)
            if draws[j] < p_split:
                n += 1
                if not split:
                    first = j + 1
                split = True
        samples.append(n)
        counts[n] = counts.get(n, 0) + 1
        first_counts[first] = first_counts.get(first, 0) + 1
    mean, var, se = _stats_fields(samples)
    return TrajectoryStats(
        trials=trials,
        histogram=dict(sorted(counts.items())),
        mean=mean,
        variance=var,
        std_error=se,
        seed=seed,
        extra={
            # key 0 counts the all-E2 event with no split at all
            "first_split_histogram": dict(sorted(first_counts.items())),
        },
    )


# ---------------------------------------------------------------------------
# probabilistic mode loss
# ---------------------------------------------------------------------------

def simulate_mode_loss(
    modes: int, alpha, lam: float, trials: int, seed: int
) -> TrajectoryStats:
    """Sample the off-diagonal amplitude after each mode is lost w.p. lam.

    A trial losing k modes leaves the coherence amplitude
    exp(-2 k |alpha|^2) / (2 + 2 exp(-2 N |alpha|^2)).  The headline mean is
    the geometric mean over trials, the exponential of the mean log
    amplitude: its expectation replaces k by N lam in the exponent, which is
    the closed form mode_loss_offdiag.  variance and std_error describe that
    estimator through the delta method (scale the log spread by the mean), so
    std_error = sqrt(variance / trials) still holds.  The plain arithmetic
    mean and a paired reference sharing the same loss draws (coherence 1/2
    iff no mode is lost) are reported under ``extra``.
    """
    _check_trials(trials)
    if modes < 1:
        raise DomainError(f"modes must be >= 1, got {modes}")
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    a = abs2(alpha)
    big_w = math.exp(-2.0 * modes * a)
    log_norm = math.log(2.0 + 2.0 * big_w)
    counts: dict[int, int] = {}
    logs = []
    amps = []
    ghz = []
    for t in range(trials):
        lost = int(np.count_nonzero(_trajectory_rng(seed, t).random(modes) < lam))
        counts[lost] = counts.get(lost, 0) + 1
        log_amp = -2.0 * lost * a - log_norm
        logs.append(log_amp)
        amps.append(math.exp(log_amp))
        ghz.append(0.5 if lost == 0 else 0.0)
    log_mean, log_var, _ = _stats_fields(logs)
    mean = math.exp(log_mean)
    variance = mean * mean * log_var
    arith_mean, arith_var, arith_se = _stats_fields(amps)
    ghz_mean, ghz_var, ghz_se = _stats_fields(ghz)
    return TrajectoryStats(
        trials=trials,
        histogram=dict(sorted(counts.items())),
        mean=mean,
        variance=variance,
        std_error=math.sqrt(variance / trials),
        seed=seed,
        extra={
            "log_mean": log_mean,
            "log_variance": log_var,
            "arithmetic_mean": arith_mean,
            "arithmetic_variance": arith_var,
            "arithmetic_std_error": arith_se,
            "ghz_mean": ghz_mean,
            "ghz_variance": ghz_var,
            "ghz_std_error": ghz_se,
        },
    )


# ---------------------------------------------------------------------------
# branch collapse
# ---------------------------------------------------------------------------

class CollapseProblem(enum.Enum):
    BRANCH_VS_BRANCH = "branch-vs-branch"
    CAT_VS_MIXED = "cat-vs-mixed"
    CAT_VS_BRANCH = "cat-vs-branch"


def _span_frame(alpha):
    w = branch_overlap(alpha)
    s = math.sqrt(1.0 - w * w)
    ket_a = np.array([1.0, 0.0])
    ket_ma = np.array([w, s])
    a_plus = math.sqrt(2.0 + 2.0 * w)
    a_minus = math.sqrt(2.0 - 2.0 * w)
    psi_plus = (ket_a + ket_ma) / a_plus
    psi_minus = (ket_a - ket_ma) / a_minus
    return w, ket_a, ket_ma, psi_plus, psi_minus


def simulate_branch_collapse(
    alpha, trials: int, seed: int, problem: CollapseProblem
) -> TrajectoryStats:
    """Apply a two-outcome optimal discrimination measurement to the cat.

    The measurement projects onto the eigenvectors of the density difference
    of the two hypotheses.  For CAT_VS_BRANCH the trials whose first outcome
    favored the branch hypothesis continue to a projective measurement in the
    orthonormalized pair closest to {|alpha>, |-alpha>}; ``trials`` then
    counts those continued trajectories (the full tally of requested
    trajectories is under ``extra``) and the headline mean is the final
    |alpha> frequency among them.
    """
    _check_trials(trials)
    if alpha == 0:
        raise DomainError("the branch span degenerates at alpha = 0")
    problem = CollapseProblem(problem)
    w, ket_a, ket_ma, psi_plus, psi_minus = _span_frame(alpha)
    rho_cat = np.outer(psi_plus, psi_plus)
    rho_a = np.outer(ket_a, ket_a)
    rho_ma = np.outer(ket_ma, ket_ma)
    if problem is CollapseProblem.BRANCH_VS_BRANCH:
        delta = rho_a - rho_ma
        labels = ("xi_plus", "xi_minus")
    elif problem is CollapseProblem.CAT_VS_MIXED:
        delta = rho_cat - 0.5 * (rho_a + rho_ma)
        labels = ("cat", "mixed")
    else:
        delta = rho_cat - rho_a
        labels = ("cat", "branch")
    vals, vecs = np.linalg.eigh(delta)
    vec_minus, vec_plus = vecs[:, 0], vecs[:, 1]
    p_plus = float(np.dot(vec_plus, psi_plus) ** 2)

    if problem is not CollapseProblem.CAT_VS_BRANCH:
        counts = {labels[0]: 0, labels[1]: 0}
        for t in range(trials):
            u = _trajectory_rng(seed, t).random()
            counts[labels[0] if u < p_plus else labels[1]] += 1
        samples = [1.0] * counts[labels[0]] + [0.0] * counts[labels[1]]
        mean, var, se = _stats_fields(samples)
        extra = {
            "p_first_outcome_exact": p_plus,
            "fidelity_with_alpha": {
                labels[0]: float(np.dot(vec_plus, ket_a) ** 2),
                labels[1]: float(np.dot(vec_minus, ket_a) ** 2),
            },
            "fidelity_with_minus_alpha": {
                labels[0]: float(np.dot(vec_plus, ket_ma) ** 2),
                labels[1]: float(np.dot(vec_minus, ket_ma) ** 2),
            },
        }
        return TrajectoryStats(
            trials=trials,
            histogram=counts,
            mean=mean,
            variance=var,
            std_error=se,
            seed=seed,
            extra=extra,
        )

    # CAT_VS_BRANCH: a branch-favoring first outcome is followed by the
    # projective measurement in the orthonormalized branch pair.
    tilde_a = (psi_plus + psi_minus) / math.sqrt(2.0)
    p_branch = 1.0 - p_plus
    p_alpha_given_branch = float(np.dot(tilde_a, vec_minus) ** 2)
    p_alpha_given_cat = float(np.dot(tilde_a, vec_plus) ** 2)
    n_cat = 0
    n_alpha = 0
    n_other = 0
    for t in range(trials):
        u1, u2 = _trajectory_rng(seed, t).random(2)
        if u1 < p_plus:
            n_cat += 1
        elif u2 < p_alpha_given_branch:
            n_alpha += 1
        else:
            n_other += 1
    continued = n_alpha + n_other
    samples = [1.0] * n_alpha + [0.0] * n_other
    if continued == 0:
        mean, var, se = 0.0, 0.0, 0.0
    else:
        mean, var, se = _stats_fields(samples)
    return TrajectoryStats(
        trials=continued,
        histogram={"alpha": n_alpha, "minus_alpha": n_other},
        mean=mean,
        variance=var,
        std_error=se,
        seed=seed,
        extra={
            "requested_trials": trials,
            "joint_histogram": {
                "cat_outcome": n_cat,
                "branch_then_alpha": n_alpha,
                "branch_then_minus_alpha": n_other,
            },
            "p_branch_outcome_exact": p_branch,
            "p_alpha_given_branch_exact": p_alpha_given_branch,
            "p_alpha_given_cat_exact": p_alpha_given_cat,
            "p_alpha_unconditional_exact": (
                p_branch * p_alpha_given_branch + p_plus * p_alpha_given_cat
            ),
            "asymptote": 0.5 + 0.5 / math.sqrt(2.0),
        },
    )


def _check_trials(trials: int):
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
