"""
Stopping times of a projection and the recurrence / accessibility criteria.

For a projection e with complement e^⊥ the words

    τ_k   = e^⊥ ⊗ … ⊗ e^⊥ ⊗ e        (k complements, then e)
    τ^n_∞ = e^⊥ ⊗ … ⊗ e^⊥            (n+1 complements)

are evaluated at finite horizons. Limits n → ∞ are never formed
symbolically: every criterion produces a horizon series whose distance to
its target value is certified either directly (below ``decision_tol``) or
through a geometric ratio measured on the last horizons.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from oqrw import access_tol as default_access_tol
from oqrw import certification_window, ratio_spread_tol, theorem_tol
from oqrw import decision_tol as default_decision_tol
from oqrw import n_max as default_n_max
from oqrw.blocks import BlockObservable, BlockProjection, BlockState, SiteIndex
from oqrw.evolution import adjoint_apply, propagate
from oqrw.exceptions import InvalidParameterError, InvalidStateError, KindError, PreconditionError
from oqrw.qmc import (
    ExpectationKind,
    MarkovPair,
    _phi,
    _psi,
    nested_operator,
    qmc_evaluate,
    qmc_evaluate_nested,
    transition_expectation,
)
from oqrw.utils.math import as_matrix

logger = logging.getLogger(__name__)

# Values below this are treated as underflowed when measuring ratios.
_TINY = 1e-280
_EPS = np.finfo(np.float64).eps


class Criterion(str, Enum):
    PHI_RECURRENT = "phi_recurrent"
    PHI_COMPLETELY_ACCESSIBLE = "phi_completely_accessible"
    E_RECURRENT = "E_recurrent"
    E_COMPLETELY_ACCESSIBLE = "E_completely_accessible"

    @property
    def target(self) -> float:
        return 1.0 if self in (Criterion.PHI_RECURRENT, Criterion.E_RECURRENT) else 0.0


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class StoppingTimeSpec:
    projection: BlockProjection
    horizon: int = 0

    def __post_init__(self):
        if not isinstance(self.projection, BlockProjection):
            raise InvalidStateError("stopping times are defined for block projections only")
        if self.horizon < 0:
            raise InvalidParameterError(f"horizon must be non-negative, got {self.horizon}")

    @property
    def complement(self) -> BlockProjection:
        return self.projection.complement()

    def first_entry(self, k: int) -> list[BlockObservable]:
        """Word of τ_k."""
        return [self.complement] * k + [self.projection]

    def tail(self) -> list[BlockObservable]:
        """Word of τ^n_∞ with n = horizon."""
        return [self.complement] * (self.horizon + 1)

    def joint(self) -> list[BlockObservable]:
        """Word of J₀(e) ⊗ τ^{n-1}_∞: e followed by ``horizon`` complements."""
        return [self.projection] + [self.complement] * self.horizon


@dataclass(frozen=True)
class RecurrenceVerdict:
    criterion: Criterion
    series: tuple[float, ...]
    limit: float
    ratio: float | None
    verdict: Verdict
    n_max: int
    site_ratios: dict[SiteIndex, float] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def target(self) -> float:
        return self.criterion.target

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "limit": self.limit,
            "ratio": self.ratio,
            "verdict": self.verdict.value,
            "n_max": self.n_max,
            "site_ratios": {str(site): r for site, r in sorted(self.site_ratios.items())},
        }


# Horizon series


def _spec(e: BlockProjection, pair: MarkovPair) -> StoppingTimeSpec:
    e.check_shape(pair.h_dim, pair.n_sites)
    return StoppingTimeSpec(projection=e)


def _forward_constants(pair: MarkovPair, x: BlockObservable) -> dict[SiteIndex, float]:
    return {v: _psi(pair, v, x).real for v in pair.support}


def _dual_series(
    pair: MarkovPair, first: BlockObservable, repeated: BlockObservable, n_max: int
) -> tuple[np.ndarray, dict[SiteIndex, np.ndarray]]:
    """
    Values of the word first ⊗ repeated^{⊗n} for n = 0..n_max under a dual
    pair, with the per-site masses of the last letter.
    """
    weights = {j: _phi(pair, j, first).real * pair.state.block(j) for j in pair.support}
    repeat = {i: _phi(pair, i, repeated).real for i in pair.support}
    values = np.zeros(n_max + 1)
    per_site = {i: np.zeros(n_max + 1) for i in pair.support}
    for n in range(n_max + 1):
        if n > 0:
            moved = propagate(pair.restricted_family, weights)
            weights = {i: repeat[i] * block for i, block in moved.items() if i in pair.weights}
        for i, block in weights.items():
            per_site[i][n] = np.trace(block).real
        values[n] = sum(per_site[i][n] for i in weights)
    return values, per_site


def _tau_series(pair: MarkovPair, e: BlockProjection, n_max: int):
    complement = e.complement()
    if pair.kind is ExpectationKind.FORWARD:
        decay = _forward_constants(pair, complement)
        powers = np.arange(1, n_max + 2)
        per_site = {v: pair.weights[v] * decay[v] ** powers for v in pair.support}
        values = np.sum(list(per_site.values()), axis=0) if per_site else np.zeros(n_max + 1)
        return values, per_site
    return _dual_series(pair, complement, complement, n_max)


def _joint_series(pair: MarkovPair, e: BlockProjection, n_max: int):
    complement = e.complement()
    if pair.kind is ExpectationKind.FORWARD:
        entry = _forward_constants(pair, e)
        decay = _forward_constants(pair, complement)
        powers = np.arange(0, n_max + 1)
        per_site = {v: pair.weights[v] * entry[v] * decay[v] ** powers for v in pair.support}
        values = np.sum(list(per_site.values()), axis=0) if per_site else np.zeros(n_max + 1)
        return values, per_site
    return _dual_series(pair, e, complement, n_max)


def _e0_series(pair: MarkovPair, e: BlockProjection, n_max: int) -> list[BlockObservable]:
    complement = e.complement()
    current = transition_expectation(pair, complement, pair.identity())
    operators = [current]
    for _ in range(n_max):
        current = transition_expectation(pair, complement, current)
        operators.append(current)
    return operators


def tau_expectation(pair: MarkovPair, e: BlockProjection, n: int, method: str = "product") -> float:
    """φ(τ^n_∞) = φ(e^⊥ ⊗ … ⊗ e^⊥) with n+1 factors."""
    spec = StoppingTimeSpec(projection=e, horizon=n)
    return qmc_evaluate(pair, spec.tail(), method=method)


def joint_tau_expectation(pair: MarkovPair, e: BlockProjection, n: int, method: str = "product") -> float:
    """φ(e ⊗ e^⊥ ⊗ … ⊗ e^⊥) with n trailing complements."""
    spec = StoppingTimeSpec(projection=e, horizon=n)
    return qmc_evaluate(pair, spec.joint(), method=method)


def e0_tau(pair: MarkovPair, e: BlockProjection, n: int) -> BlockObservable:
    """E_{0]}(τ^n_∞) = 𝓔(e^⊥⊗𝓔(e^⊥⊗…𝓔(e^⊥⊗1)…)) with n+1 factors."""
    spec = StoppingTimeSpec(projection=e, horizon=n)
    return nested_operator(pair, spec.tail())


def e_tau_closed_forward(pair: MarkovPair, e: BlockProjection, n: int) -> BlockObservable:
    """𝓔(e ⊗ E_{0]}(τ^n_∞)) = Σ_v (M*e)_v ψ_v(e^⊥)^{n+1} for forward pairs."""
    if pair.kind is not ExpectationKind.FORWARD:
        raise KindError("the closed form of 𝓔(e⊗E(τ)) holds for forward pairs only")
    if n < 0:
        raise InvalidParameterError(f"horizon must be non-negative, got {n}")
    _spec(e, pair)
    lifted = adjoint_apply(pair.restricted_family, e)
    decay = _forward_constants(pair, e.complement())
    blocks = {v: lifted.block(v) * decay[v] ** (n + 1) for v in pair.support}
    return BlockObservable(h_dim=pair.h_dim, n_sites=pair.n_sites, diag_blocks=blocks, hermitian=True)


# Certification


def _site_ratios(per_site: dict[SiteIndex, np.ndarray]) -> dict[SiteIndex, float]:
    ratios = {}
    for site, values in per_site.items():
        alive = np.flatnonzero(np.abs(values) > _TINY)
        if alive.size < 2 or alive[-1] - alive[-2] != 1:
            continue
        last, previous = values[alive[-1]], values[alive[-2]]
        ratios[site] = float(last / previous)
    return ratios


def _ratio_estimate(deficits: np.ndarray) -> float | None:
    alive = np.flatnonzero(deficits > _TINY)
    if alive.size < 3:
        return None
    end = alive[-1] + 1
    tail = deficits[max(0, end - certification_window):end]
    diffs = tail[:-1] - tail[1:]
    if np.any(diffs <= 64 * _EPS * np.abs(tail).max()):
        return None
    ratios = diffs[1:] / diffs[:-1]
    if ratios.max() >= 1.0:
        return None
    return float(ratios[-1])


def certify(deficits: Sequence[float], decision_tol: float = default_decision_tol) -> tuple[Verdict, float, float | None]:
    """
    Decide whether a non-negative deficit series tends to 0.

    Returns the verdict, the extrapolated limit of the deficit and the
    measured geometric ratio (None when no ratio could be certified).
    """
    deficits = np.asarray(deficits, dtype=np.float64)
    last = float(deficits[-1])
    if last <= decision_tol:
        return Verdict.HOLDS, last, _ratio_estimate(deficits)
    if deficits.size < certification_window + 1:
        logger.warning(f"only {deficits.size} horizons available, verdict is inconclusive")
        return Verdict.INCONCLUSIVE, last, None

    tail = deficits[-certification_window:]
    diffs = tail[:-1] - tail[1:]
    noise = 64 * _EPS * np.abs(tail).max()
    if np.any(diffs < -noise):
        logger.warning("horizon series is not monotone over the certification window")
        return Verdict.INCONCLUSIVE, last, None

    significant = diffs > noise
    if not significant[-1]:
        # Settled to rounding level away from the target.
        logger.debug(f"series settled at deficit {last:.6g}")
        return Verdict.FAILS, last, None
    if not significant.all():
        return Verdict.INCONCLUSIVE, last, None

    ratios = diffs[1:] / diffs[:-1]
    logger.debug(f"difference ratios over the window: {ratios}")
    if ratios.max() >= 1.0 or ratios.max() - ratios.min() > ratio_spread_tol:
        logger.warning("no geometric decay could be certified over the window")
        return Verdict.INCONCLUSIVE, last, None
    ratio = float(ratios[-1])
    # One extrapolation per window position; a limit within their spread is not resolved from zero.
    limits = np.maximum(tail[2:] - diffs[1:] * ratios / (1.0 - ratios), 0.0)
    limit = float(limits[-1])
    spread = float(np.abs(limits - limit).max())
    if limit <= decision_tol + spread:
        return Verdict.HOLDS, limit, ratio
    # Mass the series still has to shed; a limit below it is extrapolation bias.
    remaining = float(diffs[-1] * ratio / (1.0 - ratio))
    if limit - spread <= remaining:
        logger.warning(f"extrapolated limit {limit:.3g} is not resolved from the remaining tail {remaining:.3g}")
        return Verdict.INCONCLUSIVE, limit, ratio
    return Verdict.FAILS, limit, ratio


def diagnose(
    pair: MarkovPair,
    e: BlockProjection,
    criterion: Criterion | str,
    n_max: int = default_n_max,
    decision_tol: float = default_decision_tol,
    access_tol: float = default_access_tol,
) -> RecurrenceVerdict:
    """
    Evaluate one recurrence or accessibility criterion up to ``n_max``.

    The returned series holds the criterion quantity at each horizon:
    φ(τ^n_∞), 1 − φ(e⊗τ^{n-1}_∞)/φ(J₀(e)), ‖E_{0]}(τ^n_∞)‖_F or
    1 − Tr(𝓔(e⊗E_{0]}(τ^n_∞)))/Tr(𝓔(e⊗1)).
    """
    criterion = Criterion(criterion)
    if n_max < 0:
        raise InvalidParameterError(f"n_max must be non-negative, got {n_max}")
    _spec(e, pair)

    if criterion is Criterion.PHI_COMPLETELY_ACCESSIBLE:
        deficits, per_site = _tau_series(pair, e, n_max)
    elif criterion is Criterion.PHI_RECURRENT:
        entry = qmc_evaluate(pair, [e])
        if entry <= access_tol:
            raise PreconditionError(f"φ(J₀(e)) = {entry:.3g}: e is not charged by the chain, φ-recurrence is undefined")
        joint, per_site = _joint_series(pair, e, n_max)
        deficits = joint / entry
    elif criterion is Criterion.E_COMPLETELY_ACCESSIBLE:
        operators = _e0_series(pair, e, n_max)
        deficits = np.array([y.frobenius_norm() for y in operators])
        per_site = {
            site: np.array([y.block_norms().get(site, 0.0) for y in operators]) for site in pair.support
        }
    else:
        deficits, per_site = _e_recurrence_deficits(pair, e, n_max, access_tol)

    deficits = np.clip(deficits, 0.0, None)
    verdict, deficit_limit, ratio = certify(deficits, decision_tol)
    if criterion is Criterion.PHI_COMPLETELY_ACCESSIBLE and verdict is not Verdict.HOLDS:
        # φ(τ^n_∞) ≤ max_j ‖E_{0]}(τ^n_∞)_j‖ ≤ ‖E_{0]}(τ^n_∞)‖_F at every horizon.
        bound = np.array([y.frobenius_norm() for y in _e0_series(pair, e, n_max)])
        bound_verdict, bound_limit, _ = certify(bound, decision_tol)
        if bound_verdict is Verdict.HOLDS:
            logger.debug("φ(τ^n_∞) certified through the dominating ‖E_{0]}(τ^n_∞)‖_F series")
            verdict, deficit_limit = Verdict.HOLDS, min(deficit_limit, bound_limit)
    target = criterion.target
    series = tuple(float(target - d) if target else float(d) for d in deficits)
    limit = target - deficit_limit if target else deficit_limit

    result = RecurrenceVerdict(
        criterion=criterion,
        series=series,
        limit=float(limit),
        ratio=ratio,
        verdict=verdict,
        n_max=n_max,
        site_ratios=_site_ratios(per_site),
    )
    logger.info(f"{criterion.value}: {verdict.value} (limit {limit:.6g}, ratio {ratio})")
    return result


def _e_recurrence_deficits(pair: MarkovPair, e: BlockProjection, n_max: int, access_tol: float):
    total = transition_expectation(pair, e, pair.identity()).trace().real
    if total <= access_tol:
        raise PreconditionError(f"Tr(𝓔(e⊗1)) = {total:.3g}: 𝓔-recurrence is undefined for this projection")

    if pair.kind is ExpectationKind.FORWARD:
        lifted = adjoint_apply(pair.restricted_family, e)
        decay = _forward_constants(pair, e.complement())
        powers = np.arange(1, n_max + 2)
        per_site = {v: np.trace(lifted.block(v)).real * decay[v] ** powers for v in pair.support}
    else:
        per_site = {v: np.zeros(n_max + 1) for v in pair.support}
        for n, y in enumerate(_e0_series(pair, e, n_max)):
            returned = transition_expectation(pair, e, y)
            for v, block in returned.diag_blocks.items():
                per_site[v][n] = np.trace(block).real
    values = np.sum(list(per_site.values()), axis=0) if per_site else np.zeros(n_max + 1)
    return values / total, {v: s / total for v, s in per_site.items()}


# Accessibility


class AccessResult(NamedTuple):
    accessible: bool
    witness: int | None


class AccessMode(str, Enum):
    PHI = "phi"
    E = "E"


def is_accessible(
    pair: MarkovPair,
    e: BlockProjection,
    f: BlockProjection,
    n_max: int = default_n_max,
    mode: AccessMode | str = AccessMode.PHI,
    access_tol: float = default_access_tol,
) -> AccessResult:
    """
    Smallest n ≤ n_max with a non-vanishing value of the word
    [e, 1, …, 1, f] (f at position n), or (False, None).
    """
    mode = AccessMode(mode)
    _spec(e, pair)
    _spec(f, pair)
    for n, value in enumerate(_access_values(pair, e, f, n_max, mode), start=1):
        if value > access_tol:
            logger.info(f"accessible at n={n} (value {value:.3e})")
            return AccessResult(True, n)
    return AccessResult(False, None)


def _access_values(pair: MarkovPair, e: BlockProjection, f: BlockProjection, n_max: int, mode: AccessMode):
    if mode is AccessMode.E:
        # E_{0]} of [e, 1, …, 1, f]: the suffix 1⊗…⊗1⊗f is built innermost first.
        suffix = transition_expectation(pair, f, pair.identity())
        identity = pair.identity()
        for _ in range(n_max):
            yield transition_expectation(pair, e, suffix).frobenius_norm()
            suffix = transition_expectation(pair, identity, suffix)
        return

    if pair.kind is ExpectationKind.FORWARD:
        entry = _forward_constants(pair, e)
        hit = _forward_constants(pair, f)
        unit = _forward_constants(pair, pair.identity())
        for n in range(1, n_max + 1):
            yield sum(pair.weights[v] * entry[v] * unit[v] ** (n - 1) * hit[v] for v in pair.support)
        return

    weights = {j: _phi(pair, j, e).real * pair.state.block(j) for j in pair.support}
    hit = {i: _phi(pair, i, f).real for i in pair.support}
    for _ in range(n_max):
        moved = propagate(pair.restricted_family, weights)
        weights = {i: block for i, block in moved.items() if i in pair.weights}
        yield sum(hit[i] * np.trace(block).real for i, block in weights.items())


def communicates(
    pair: MarkovPair,
    e: BlockProjection,
    f: BlockProjection,
    n_max: int = default_n_max,
    mode: AccessMode | str = AccessMode.PHI,
    access_tol: float = default_access_tol,
) -> bool:
    return (
        is_accessible(pair, e, f, n_max, mode, access_tol).accessible
        and is_accessible(pair, f, e, n_max, mode, access_tol).accessible
    )


# Finite-horizon identities


@dataclass(frozen=True)
class TheoremIRow:
    k: int
    lhs: float
    rhs: float
    never_charged: bool
    saturated: bool

    @property
    def violation(self) -> bool:
        return self.never_charged != self.saturated


@dataclass(frozen=True)
class TheoremIReport:
    """
    Rows k = 0..n_max comparing φ(J_k(e)) with φ(1^{⊗k} ⊗ e^⊥ ⊗ … ⊗ e^⊥).

    At every row the shifted stopping-time value equals the value of the
    identity word of the same length iff e is never charged from position k on.
    """

    rows: tuple[TheoremIRow, ...]
    tol: float

    @property
    def lhs_vanishes(self) -> bool:
        return all(row.never_charged for row in self.rows)

    @property
    def rhs_saturates(self) -> bool:
        return all(row.saturated for row in self.rows)

    @property
    def violations(self) -> list[int]:
        return [row.k for row in self.rows if row.violation]

    @property
    def consistent(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "consistent": self.consistent,
            "lhs_vanishes": self.lhs_vanishes,
            "rhs_saturates": self.rhs_saturates,
            "violations": self.violations,
            "rows": [{"k": r.k, "lhs": r.lhs, "rhs": r.rhs} for r in self.rows],
        }


def check_theorem_i(pair: MarkovPair, e: BlockProjection, n_max: int, tol: float = theorem_tol) -> TheoremIReport:
    """
    Finite-horizon form of: φ(J_m(e)) = 0 for all m iff φ(β^k(τ_∞)) = 1 for all k.
    """
    spec = _spec(e, pair)
    identity = pair.identity()
    lhs = [qmc_evaluate(pair, [identity] * k + [e]) for k in range(n_max + 1)]
    total = qmc_evaluate(pair, [identity] * (n_max + 1))
    rows = []
    for k in range(n_max + 1):
        rhs = qmc_evaluate(pair, [identity] * k + [spec.complement] * (n_max - k + 1))
        rows.append(
            TheoremIRow(
                k=k,
                lhs=lhs[k],
                rhs=rhs,
                never_charged=max(abs(v) for v in lhs[k:]) <= tol,
                saturated=abs(total - rhs) <= tol * (n_max - k + 1),
            )
        )
    report = TheoremIReport(rows=tuple(rows), tol=tol)
    if report.violations:
        logger.warning(f"stopping time equivalence violated at rows {report.violations}")
    return report


def first_entry_distribution(pair: MarkovPair, e: BlockProjection, n: int, method: str = "product") -> list[float]:
    """[φ(τ_0), …, φ(τ_n)]."""
    spec = _spec(e, pair)
    return [qmc_evaluate(pair, spec.first_entry(k), method=method) for k in range(n + 1)]


def stopping_time_balance(pair: MarkovPair, e: BlockProjection, n: int) -> float:
    """|Σ_{k≤n} φ(τ_k) + φ(τ^n_∞) − φ(1^{⊗(n+1)})|, zero by telescoping."""
    entries = first_entry_distribution(pair, e, n)
    total = qmc_evaluate(pair, [pair.identity()] * (n + 1))
    return abs(sum(entries) + tau_expectation(pair, e, n) - total)


def splitting_residual(pair: MarkovPair, e: BlockProjection, e_prime: BlockProjection, n: int) -> float:
    """|φ(e⊗1⊗τ^n) − φ(e⊗e'⊗τ^n) − φ(e⊗e'^⊥⊗τ^n)|."""
    spec = StoppingTimeSpec(projection=e, horizon=n)
    tail = spec.tail()
    whole = qmc_evaluate_nested(pair, [e, pair.identity()] + tail)
    inside = qmc_evaluate_nested(pair, [e, e_prime] + tail)
    outside = qmc_evaluate_nested(pair, [e, e_prime.complement()] + tail)
    return abs(whole - inside - outside)


# Closed forms of the worked examples


def _ring_rates(B, C, state: BlockState, q, k: int) -> tuple[int, int, float, float]:
    b = as_matrix(B, what="B")
    c = as_matrix(C, what="C")
    q = as_matrix(q, what="q")
    n = state.n_sites
    right, left = (k + 1) % n, (k - 1) % n
    from_right = np.trace(b @ state.block(right) @ b.conj().T @ q).real
    from_left = np.trace(c @ state.block(left) @ c.conj().T @ q).real
    return right, left, float(from_right), float(from_left)


def ring_psi_complement(B, C, state: BlockState, q, k: int) -> dict[SiteIndex, float]:
    """ψ_{k±1}(e^⊥) for e = q⊗|k⟩⟨k| on the ring: 1 − Tr(Bρ_{k+1}B*q)/Tr ρ_{k+1} and its C-analogue."""
    right, left, from_right, from_left = _ring_rates(B, C, state, q, k)
    return {
        right: 1.0 - from_right / state.trace(right),
        left: 1.0 - from_left / state.trace(left),
    }


def ring_return_operator(B, C, state: BlockState, q, k: int, m: int) -> BlockObservable:
    """B*qB ⊗ |k+1⟩⟨k+1| ψ_{k+1}(e^⊥)^m + C*qC ⊗ |k−1⟩⟨k−1| ψ_{k−1}(e^⊥)^m."""
    b, c, q = as_matrix(B), as_matrix(C), as_matrix(q)
    decay = ring_psi_complement(b, c, state, q, k)
    right, left = (k + 1) % state.n_sites, (k - 1) % state.n_sites
    blocks = {
        right: b.conj().T @ q @ b * decay[right] ** m,
        left: c.conj().T @ q @ c * decay[left] ** m,
    }
    return BlockObservable(h_dim=state.h_dim, n_sites=state.n_sites, diag_blocks=blocks, hermitian=True)


def ring_joint_tau(B, C, state: BlockState, q, k: int, n: int) -> float:
    """Tr(Bρ_{k+1}B*q) ψ_{k+1}(e^⊥)^n + Tr(Cρ_{k−1}C*q) ψ_{k−1}(e^⊥)^n."""
    right, left, from_right, from_left = _ring_rates(B, C, state, q, k)
    decay = ring_psi_complement(B, C, state, q, k)
    return from_right * decay[right] ** n + from_left * decay[left] ** n


def two_site_invariant_tau(phi_complement: float, n: int) -> float:
    """φ(τ^n_∞) under the invariant state diag(1,0)⊗|2⟩⟨2|."""
    return phi_complement ** (n + 1)


def two_site_invariant_e0(phi_complement: float, p: float, n: int):
    """Site-2 block of E_{0]}(τ^n_∞) for the dual pair of diag(1,0)⊗|2⟩⟨2|."""
    return phi_complement ** (n + 1) * np.diag([1.0, (1.0 - p) ** n])


def two_site_part2_tau(a: complex, t: float, n: int) -> float:
    """φ̃(τ^n_∞) for e^⊥ = P⊗|1⟩⟨1| with t = Tr(ρ₀P)."""
    return 0.5 * abs(a) ** (2 * n) * t ** (n + 1)


def two_site_part2_joint(a: complex, t: float, n: int) -> float:
    """φ̃(e ⊗ τ^{n-1}_∞) for e^⊥ = P⊗|1⟩⟨1|; the site-2 start only contributes at n = 0."""
    value = 0.5 * abs(a) ** (2 * n) * (1.0 - t) * t ** n
    return value + 0.5 if n == 0 else value


def two_site_part2_e0(a: complex, b: complex, t: float, n: int):
    """Site-1 block of E_{0]}(τ^n_∞) for e^⊥ = P⊗|1⟩⟨1|."""
    return t ** (n + 1) * np.diag([abs(a) ** (2 * n), abs(b) ** (2 * n)])


def two_site_part2_unaccessible_tau(t: float, n: int) -> float:
    """φ̃(τ^n_∞) for e = P⊗|1⟩⟨1| and a = 1; tends to 1/2."""
    return 0.5 * ((1.0 - t) ** (n + 1) + 1.0)
