"""Multi-start projected gradient search on the complex unit sphere.

The engine below drives both the concealment maximizer and the binding
minimizer. Determinism contract: results are a pure function of the inputs
and the seed. Every restart derives its own generator from (seed, tags,
restart index), restarts run sequentially, and the reduction keeps the
earliest restart on ties, so adding restarts can only improve the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg

ARMIJO = 1e-4
MIN_STEP = 1e-14


@dataclass
class SolverTrace:
    """Reproducibility record attached to optimizer-backed reports."""

    seed: int
    restarts: int
    extra_starts: int
    tol: float
    max_iter: int
    iterations: list = field(default_factory=list)
    converged: list = field(default_factory=list)
    values: list = field(default_factory=list)
    best_start: int = -1
    notes: list = field(default_factory=list)


@dataclass
class SphereResult:
    value: float
    vector: np.ndarray
    trace: SolverTrace


def _project(psi: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Remove the radial component; the sphere tangent piece remains."""
    return grad - np.real(np.vdot(psi, grad)) * psi


def _fd_gradient(fun, psi: np.ndarray, h: float = 1e-7) -> np.ndarray:
    """Central finite differences over the real coordinates of psi.

    Fallback for points where the analytic subgradient stalls, e.g. near
    eigenvalue degeneracies of a trace-norm objective.
    """
    grad = np.zeros_like(psi)
    for i in range(psi.size):
        for unit in (1.0, 1.0j):
            bump = np.zeros_like(psi)
            bump[i] = unit * h
            fp = fun(linalg.normalize_state(psi + bump))
            fm = fun(linalg.normalize_state(psi - bump))
            delta = (fp - fm) / (2.0 * h)
            grad[i] += delta * unit / 2.0
    return grad


def search_sphere(
    fun_grad,
    dim: int,
    *,
    maximize: bool,
    restarts: int,
    seed: int,
    tol: float = 1e-8,
    max_iter: int = 500,
    extra_starts=(),
    polish=None,
    rng_tags=(),
    stall_tol: float = 1e-10,
    stall_limit: int = 8,
) -> SphereResult:
    """Best stationary value of ``fun_grad`` over unit vectors of ``dim``.

    ``fun_grad(psi)`` returns (value, d value / d conj(psi)). ``extra_starts``
    are deterministic starting vectors tried before the seeded random ones;
    ``polish`` may propose a candidate vector from the current iterate and is
    accepted only on strict improvement, keeping the search monotone. A run
    of ``stall_limit`` accepted steps each gaining less than ``stall_tol``
    ends the start early; near-flat regions are not worth crawling.
    """
    if restarts < 0:
        raise ValueError("restarts must be nonnegative")
    sgn = 1.0 if maximize else -1.0
    starts = [linalg.normalize_state(s) for s in extra_starts]
    for r in range(restarts):
        starts.append(linalg.random_state(dim, linalg.spawn_rng(seed, *rng_tags, r)))
    if not starts:
        raise ValueError("no starting points: need restarts or extra_starts")

    trace = SolverTrace(
        seed=int(seed),
        restarts=int(restarts),
        extra_starts=len(starts) - restarts,
        tol=float(tol),
        max_iter=int(max_iter),
    )
    best_val = None
    best_vec = None

    for start_idx, psi in enumerate(starts):
        f, g = fun_grad(psi)
        step = 1.0
        used_fd = False
        converged = False
        it = 0
        stalled = 0
        for it in range(1, max_iter + 1):
            if polish is not None:
                cand = polish(psi)
                if cand is not None:
                    cand = linalg.normalize_state(cand)
                    fc, gc = fun_grad(cand)
                    if sgn * (fc - f) > 1e-15:
                        stalled = stalled + 1 if sgn * (fc - f) < stall_tol else 0
                        psi, f, g = cand, fc, gc
            if stalled >= stall_limit:
                converged = True
                break
            r = _project(psi, g)
            gn = float(np.linalg.norm(r))
            if gn <= tol:
                converged = True
                break
            direction = sgn * r
            eta = min(step * 2.0, 1e3)
            accepted = False
            while eta > MIN_STEP:
                cand = linalg.normalize_state(psi + eta * direction)
                fc, gc = fun_grad(cand)
                if sgn * (fc - f) >= ARMIJO * eta * gn * gn:
                    # A bare Armijo pass can sit on a reflecting step that
                    # crosses a valley with almost no progress; probing
                    # smaller steps while they keep improving escapes that.
                    for _ in range(6):
                        half = linalg.normalize_state(psi + 0.5 * eta * direction)
                        fh, gh = fun_grad(half)
                        if sgn * (fh - fc) <= 0.0:
                            break
                        cand, fc, gc = half, fh, gh
                        eta *= 0.5
                    stalled = stalled + 1 if sgn * (fc - f) < stall_tol else 0
                    psi, f, g = cand, fc, gc
                    step = eta
                    accepted = True
                    break
                eta *= 0.5
            if accepted:
                continue
            if not used_fd:
                used_fd = True
                g = _fd_gradient(lambda v: fun_grad(v)[0], psi)
                step = 1.0
                continue
            # No ascent direction left within step resolution: stationary.
            converged = True
            break

        trace.iterations.append(it)
        trace.converged.append(converged)
        trace.values.append(float(f))
        if used_fd:
            trace.notes.append(f"start {start_idx}: finite-difference fallback used")
        if best_val is None or sgn * (f - best_val) > 0.0:
            best_val = float(f)
            best_vec = psi
            trace.best_start = start_idx

    return SphereResult(value=best_val, vector=best_vec, trace=trace)


def ascend_params(
    fun_grad,
    start: np.ndarray,
    *,
    max_iter: int,
    tol: float = 1e-7,
    stop_value: float | None = None,
    stall_tol: float = 1e-9,
    stall_limit: int = 12,
):
    """Backtracking gradient ascent on an unconstrained real parameter vector.

    ``fun_grad(p)`` returns (value, gradient). Stops on gradient norm, on
    step-size exhaustion, on ``stall_limit`` consecutive accepted steps that
    each improve by less than ``stall_tol`` (plateau crawling), or once
    ``stop_value`` is reached. Returns (params, value, iterations, converged).
    """
    p = np.array(start, dtype=float, copy=True)
    f, g = fun_grad(p)
    step = 1.0
    converged = False
    it = 0
    stalled = 0
    for it in range(1, max_iter + 1):
        if stop_value is not None and f >= stop_value:
            converged = True
            break
        gn = float(np.linalg.norm(g))
        if gn <= tol:
            converged = True
            break
        eta = min(step * 2.0, 1e2)
        accepted = False
        while eta > MIN_STEP:
            cand = p + eta * g
            fc, gc = fun_grad(cand)
            if fc - f >= ARMIJO * eta * gn * gn:
                # Same probe as on the sphere: shrink past a reflecting step
                # while smaller steps keep paying.
                for _ in range(6):
                    half = p + 0.5 * eta * g
                    fh, gh = fun_grad(half)
                    if fh <= fc:
                        break
                    cand, fc, gc = half, fh, gh
                    eta *= 0.5
                stalled = stalled + 1 if fc - f < stall_tol else 0
                p, f, g = cand, fc, gc
                step = eta
                accepted = True
                break
            eta *= 0.5
        if not accepted or stalled >= stall_limit:
            converged = True
            break
    return p, float(f), it, converged
