"""Inequalities tying concealment to binding, and the trade-off scan.

Both bounds pivot on the reindexed Kraus gap, the operator norm of
sum_J (E0_J(V) - E1_J)^dagger (E0_J(V) - E1_J). A small gap for some
reindexing V forces the two channels close in diamond norm (so Bob learns
little) and simultaneously hands Alice a cheat whose worst-case payoff is
large. The scan walks a protocol family and records both sides so the
trade-off curve can be plotted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .binding import alice_cheat_prob, minimax_cheat
from .concealment import cb_lower_bound, cb_upper_bound, analyze_concealment
from .optimize import SolverTrace, ascend_params
from .protocol import (
    ProtocolSpec,
    align_families,
    kraus_gap_operator,
    require_valid,
    validate,
)

BOUND_TOL = 1e-9


def kraus_gap(spec: ProtocolSpec, cheat=None) -> float:
    """Operator norm of the summed squared differences of matched branches."""
    require_valid(spec)
    if cheat is None:
        cheat = np.eye(spec.cardinality)
    return linalg.operator_norm(kraus_gap_operator(spec, cheat))


@dataclass
class GapResult:
    """Outcome of minimizing the Kraus gap over reindexings."""

    value: float
    unitary: np.ndarray
    trace: SolverTrace


def minimize_kraus_gap(
    spec: ProtocolSpec,
    restarts: int = 8,
    seed: int = 0,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> GapResult:
    """Search for the reindexing that brings the two families closest.

    Gradient descent on the unitary's real parameters from the identity, the
    Procrustes alignment of the families, and seeded random unitaries. The
    descent is monotone from each start, so the result never exceeds the
    identity gap.
    """
    require_valid(spec)
    m = spec.cardinality
    e0 = spec.bit0.stack()
    e1 = spec.bit1.stack()

    def fun_grad(params):
        v = linalg.unitary_from_params(params)
        delta = np.einsum("jl,lab->jab", v, e0) - e1
        s = np.einsum("jax,jay->xy", delta.conj(), delta)
        vals, vecs = linalg.eigh_or_error(s)
        top = vecs[:, -1]
        du = np.einsum("jab,b->ja", delta, top)
        eu = np.einsum("lab,b->la", e0, top)
        grad_v = np.einsum("ja,la->jl", du, eu.conj())
        return -float(vals[-1]), linalg.unitary_param_gradient(params, -grad_v)

    trace = SolverTrace(
        seed=int(seed),
        restarts=int(restarts),
        extra_starts=0,
        tol=float(tol),
        max_iter=int(max_iter),
    )
    trace.notes.append("start 0: identity, start 1: Procrustes alignment")

    best = None  # (gap, params)
    for ridx in range(restarts):
        if ridx == 0:
            v0 = np.eye(m)
        elif ridx == 1:
            v0 = align_families(spec.bit0, spec.bit1)
        else:
            v0 = linalg.random_unitary(m, linalg.spawn_rng(seed, 6, ridx))
        params, value, iters, converged = ascend_params(
            fun_grad, linalg.params_from_unitary(v0), max_iter=max_iter, tol=tol
        )
        gap = -value
        trace.iterations.append(iters)
        trace.converged.append(converged)
        trace.values.append(gap)
        if best is None or gap < best[0]:
            best = (gap, params)
            trace.best_start = ridx

    gap, params = best
    return GapResult(
        value=float(max(gap, 0.0)),
        unitary=linalg.unitary_from_params(params),
        trace=trace,
    )


@dataclass
class BoundCheck:
    """One protocol, one reindexing: both inequalities and their margins.

    ``concealment_margin`` is half the square root of the gap minus a quarter
    of the norm's lower bound; ``binding_margin`` is the smallest sampled
    payoff minus the clamped payoff floor (1 - gap/2)^2. Nonnegative margins
    mean the inequalities held; any violation carries its full inputs.
    """

    label: str
    kraus_gap: float
    quarter_cb_lower: float
    half_sqrt_gap: float
    concealment_margin: float
    payoff_floor: float
    min_sampled_payoff: float
    binding_margin: float
    sampled_payoffs: list
    violations: list
    seed: int
    tol: float
    cheat_unitary: np.ndarray


def payoff_floor(gap: float) -> float:
    """Guaranteed worst-case payoff for the cheat realizing the given gap."""
    return max(0.0, 1.0 - gap / 2.0) ** 2


def check_bounds(
    spec: ProtocolSpec,
    cheat=None,
    n_states: int = 10,
    seed: int = 0,
    cb_lower: float | None = None,
    cb_restarts: int = 8,
    tol: float = BOUND_TOL,
) -> BoundCheck:
    """Test both inequalities on one protocol at one reindexing.

    The concealment side compares a quarter of the achieved norm lower bound
    against half the square root of the gap. The binding side evaluates
    Alice's payoff for the gap's own cheat on seeded random states and
    compares each against the payoff floor. Pass ``cb_lower`` to reuse an
    already computed norm bound.
    """
    require_valid(spec)
    if cheat is None:
        cheat = np.eye(spec.cardinality)
    cheat = linalg.require_unitary(cheat)
    gap = kraus_gap(spec, cheat)
    if cb_lower is None:
        cb_lower = cb_lower_bound(spec, restarts=cb_restarts, seed=seed).value
    quarter = cb_lower / 4.0
    half_sqrt = 0.5 * float(np.sqrt(gap))
    floor = payoff_floor(gap)

    payoffs = []
    violations = []
    for i in range(n_states):
        phi = linalg.random_state(spec.dim_in, linalg.spawn_rng(seed, 5, i))
        p = alice_cheat_prob(spec, cheat, phi)
        payoffs.append(p)
        if p < floor - tol:
            violations.append(
                {
                    "kind": "binding",
                    "label": spec.label,
                    "state_index": i,
                    "state": phi,
                    "payoff": p,
                    "floor": floor,
                    "kraus_gap": gap,
                    "cheat_unitary": cheat,
                    "seed": seed,
                }
            )
    if quarter > half_sqrt + tol:
        violations.append(
            {
                "kind": "concealment",
                "label": spec.label,
                "quarter_cb_lower": quarter,
                "half_sqrt_gap": half_sqrt,
                "kraus_gap": gap,
                "cheat_unitary": cheat,
                "seed": seed,
            }
        )

    return BoundCheck(
        label=spec.label,
        kraus_gap=float(gap),
        quarter_cb_lower=float(quarter),
        half_sqrt_gap=float(half_sqrt),
        concealment_margin=float(half_sqrt - quarter),
        payoff_floor=float(floor),
        min_sampled_payoff=float(min(payoffs)) if payoffs else float("nan"),
        binding_margin=float(min(payoffs) - floor) if payoffs else float("nan"),
        sampled_payoffs=payoffs,
        violations=violations,
        seed=int(seed),
        tol=float(tol),
        cheat_unitary=cheat,
    )


@dataclass
class ScanBudgets:
    """Solver budgets for one scan point; scans favor speed over polish."""

    cb_restarts: int = 8
    outer_restarts: int = 4
    outer_iters: int = 80
    inner_restarts: int = 8
    tol: float = 1e-7


@dataclass
class EpsilonDeltaPoint:
    """One protocol on the trade-off curve.

    ``eps_lo`` and ``eps_hi`` bracket the norm distinguishing the two
    channels; ``delta`` is one minus Alice's achieved worst-case payoff, so
    small delta means the protocol is close to unbinding.
    """

    param: float
    eps_lo: float
    eps_hi: float
    epsilon: float
    width: float
    delta: float
    minimax: float
    budget_outer: int
    budget_inner: int
    seed: int


@dataclass
class ScanResult:
    label: str
    points: list
    skipped: list
    seed: int
    budgets: ScanBudgets


SCAN_CSV_HEADER = "param,eps_lo,eps_hi,delta,minimax,budget_outer,budget_inner,seed"


def epsilon_delta_scan(
    family,
    params,
    budgets: ScanBudgets | None = None,
    seed: int = 0,
    label: str | None = None,
) -> ScanResult:
    """Walk a one-parameter protocol family and record both cheat sides.

    ``family`` maps a parameter value to a protocol. Parameters whose
    protocol fails to build or validate are recorded as skipped with the
    reason instead of aborting the scan.
    """
    if budgets is None:
        budgets = ScanBudgets()
    points = []
    skipped = []
    for param in params:
        try:
            spec = family(param)
            require_valid(spec)
        except Exception as exc:
            skipped.append((param, f"{type(exc).__name__}: {exc}"))
            continue
        lo = cb_lower_bound(
            spec, restarts=budgets.cb_restarts, seed=seed, tol=budgets.tol
        ).value
        hi, _ = cb_upper_bound(spec)
        lo = min(lo, hi)
        binding = minimax_cheat(
            spec,
            outer_restarts=budgets.outer_restarts,
            outer_iters=budgets.outer_iters,
            inner_restarts=budgets.inner_restarts,
            seed=seed,
            tol=budgets.tol,
            include_swapped=False,
        )
        est = binding.minimax_estimate
        points.append(
            EpsilonDeltaPoint(
                param=float(param),
                eps_lo=float(lo),
                eps_hi=float(hi),
                epsilon=float((lo + hi) / 2.0),
                width=float(hi - lo),
                delta=float(max(0.0, 1.0 - est)),
                minimax=float(est),
                budget_outer=int(budgets.outer_restarts),
                budget_inner=int(budgets.inner_restarts),
                seed=int(seed),
            )
        )
    return ScanResult(
        label=label if label is not None else "scan",
        points=points,
        skipped=skipped,
        seed=int(seed),
        budgets=budgets,
    )


def _csv_number(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def scan_to_csv(result: ScanResult) -> str:
    """Deterministic CSV rendering of a scan, one row per point."""
    lines = [SCAN_CSV_HEADER]
    for pt in result.points:
        lines.append(
            ",".join(
                [
                    _csv_number(pt.param),
                    _csv_number(pt.eps_lo),
                    _csv_number(pt.eps_hi),
                    _csv_number(pt.delta),
                    _csv_number(pt.minimax),
                    str(pt.budget_outer),
                    str(pt.budget_inner),
                    str(pt.seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"


@dataclass
class AnalysisReport:
    """Everything the one-shot analyzer measures about a protocol."""

    label: str
    validation: object
    concealment: object
    binding: object
    identity_check: BoundCheck
    minimized_check: BoundCheck
    minimized_gap: GapResult
    seed: int
    version: str


def full_analysis(
    spec: ProtocolSpec,
    seed: int = 0,
    cb_restarts: int = 16,
    outer_restarts: int = 8,
    outer_iters: int = 200,
    inner_restarts: int = 16,
    n_states: int = 10,
) -> AnalysisReport:
    """Validation, both cheat analyses, and both bound checks in one pass."""
    report = validate(spec)
    gap_min = minimize_kraus_gap(spec, restarts=max(2, cb_restarts // 2), seed=seed)
    concealment = analyze_concealment(
        spec, restarts=cb_restarts, seed=seed, cheat=gap_min.unitary
    )
    binding = minimax_cheat(
        spec,
        outer_restarts=outer_restarts,
        outer_iters=outer_iters,
        inner_restarts=inner_restarts,
        seed=seed,
    )
    identity_check = check_bounds(
        spec, n_states=n_states, seed=seed, cb_lower=concealment.cb_lower
    )
    minimized_check = check_bounds(
        spec,
        cheat=gap_min.unitary,
        n_states=n_states,
        seed=seed,
        cb_lower=concealment.cb_lower,
    )
    from . import __version__

    return AnalysisReport(
        label=spec.label,
        validation=report,
        concealment=concealment,
        binding=binding,
        identity_check=identity_check,
        minimized_check=minimized_check,
        minimized_gap=gap_min,
        seed=int(seed),
        version=__version__,
    )
