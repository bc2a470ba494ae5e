"""Phase solver for NB sequences A_0 B_phi2 ... B_phi(N-1) A_phiN.

Unknowns are the N-1 free phases.  Constraints:

* ``|U12(0)|^2 - p = 0``
* ``Re s_k = Im s_k = 0`` for the odd orders ``k = 1, 3, ..., N-3``, where
  ``s_k`` is the k-th eps-derivative of U12 at ``eps = 1``.

Even orders vanish identically at ``eps = 1`` for this pulse pattern, so the
system is square.  Derivatives are reported scaled by ``Omega**k`` with
``Omega = (N-1) pi / 2`` the bandwidth of U12(eps); by Bernstein's inequality
each scaled component is bounded by 1, which keeps the orders comparable.
Raw ``s_5`` for N = 8 is of order 1e5 and would dominate any norm.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import mpmath
import numpy as np

from .analysis import (excitation_profile, default_grid, hwhm_measured, nb_reference_profile,
                       symbolic_u12, u12_mp, u12_taylor_mp)
from .errors import (ConvergenceError, DimensionError, DomainError, SchemaError, UnsupportedLengthError)
from .sequences import check_probability, nb_sequence

TWO_PI = 2.0 * math.pi
MAX_N = 12
DEFAULT_SEED = 20200
TABLE_ENV_VAR = "CP_SYNTH_TABLE"
TABLE_SCHEMA_VERSION = 1

# widths quoted for N = 2, 4, 6, 8 (rounded to the printed digits)
QUOTED_HWHM = {2: 0.5, 4: 0.3, 6: 0.234, 8: 0.199}


@dataclass(frozen=True)
class NbProblem:
    n: int
    p: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2 or self.n % 2:
            raise UnsupportedLengthError(f"N must be an even integer >= 2, got {self.n!r}")
        check_probability(self.p, "p")

    @property
    def n_unknowns(self) -> int:
        return self.n - 1

    @property
    def derivative_orders(self) -> list:
        return list(range(1, self.n - 2, 2))

    @property
    def bandwidth(self) -> float:
        return 0.5 * (self.n - 1) * math.pi


def constraint_names(problem: NbProblem) -> list:
    names = ["probability"]
    for k in problem.derivative_orders:
        names += [f"re_s{k}", f"im_s{k}"]
    return names


def wrap_phases(phases) -> np.ndarray:
    x = np.mod(np.asarray(phases, dtype=float), TWO_PI)
    x[x >= TWO_PI] = 0.0
    return x


def circular_distance(x, y) -> float:
    """Largest per-phase distance on the circle, in radians."""
    d = np.mod(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), TWO_PI)
    return float(np.max(np.minimum(d, TWO_PI - d))) if d.size else 0.0


def residuals(problem: NbProblem, phases: Sequence[float]) -> np.ndarray:
    phases = list(phases)
    if len(phases) != problem.n_unknowns:
        raise DimensionError(f"N={problem.n} needs {problem.n_unknowns} phases, got {len(phases)}")
    u12 = symbolic_u12(nb_sequence(phases))
    out = [abs(u12(0.0)) ** 2 - problem.p]
    for k in problem.derivative_orders:
        s = u12.derivative(k, 1.0) / problem.bandwidth ** k
        out += [s.real, s.imag]
    return np.array(out, dtype=float)


def phase_relation(phases: Sequence[float]) -> float:
    """cos^2(sum_{k=2}^{N-1} (-1)^k phi_k + phi_N / 2); equals p on any solution."""
    phases = list(phases)
    alternating = sum((-1) ** k * f for k, f in enumerate(phases[:-1], start=2))
    return math.cos(alternating + 0.5 * phases[-1]) ** 2


@dataclass(frozen=True)
class NbSolution:
    problem: NbProblem
    phases: tuple
    residual_norm: float
    constraint_residuals: dict = field(default_factory=dict)

    @classmethod
    def from_phases(cls, problem: NbProblem, phases) -> "NbSolution":
        phases = tuple(wrap_phases(phases).tolist())
        r = residuals(problem, phases)
        return cls(problem, phases, float(np.linalg.norm(r)), dict(zip(constraint_names(problem), r.tolist())))

    @property
    def phases_pi(self) -> list:
        return [f / math.pi for f in self.phases]

    def sequence(self):
        return nb_sequence(self.phases)

    def negated(self) -> "NbSolution":
        return NbSolution.from_phases(self.problem, [-f for f in self.phases])

    def to_dict(self, source: str = "solved") -> dict:
        return {"N": self.problem.n, "p": self.problem.p, "phases_pi": self.phases_pi,
                "residual_norm": self.residual_norm, "source": source}


# closed forms ----------------------------------------------------------------

def p_prime(p: float) -> float:
    """Auxiliary probability feeding the N = 4 closed form."""
    c = p ** (1.0 / 3.0)
    root = math.sqrt(c * c + c + 1.0)
    return 0.25 * (math.sqrt(max(0.0, (1.0 - c) * (2.0 * root + c + 2.0))) + root + 1.0)


def analytic_phases(problem: NbProblem) -> list:
    if problem.n == 2:
        return [2.0 * math.acos(math.sqrt(problem.p))]
    if problem.n == 4:
        phi2 = 2.0 * math.acos(math.sqrt(min(1.0, p_prime(problem.p))))
        phi4 = math.pi + 2.0 * np.angle(1.0 + 2.0 * np.exp(1j * phi2))
        return [phi2, phi4 - phi2, phi4]
    raise UnsupportedLengthError(f"closed-form phases exist for N = 2 and N = 4 only, got N={problem.n}")


def solve_analytic(problem: NbProblem) -> NbSolution:
    return NbSolution.from_phases(problem, analytic_phases(problem))


# batched engine ---------------------------------------------------------------

def _jet_mul(x, y):
    """Product of truncated Taylor series stored along the last axis."""
    out = x[..., :1] * y
    for i in range(1, x.shape[-1]):
        out[..., i:] += x[..., i:i + 1] * y[..., :x.shape[-1] - i]
    return out


def _pair_mul(second, first):
    """(a, b) pair of ``second @ first`` for SU(2)-form matrices of jets."""
    a2, b2 = second
    a1, b1 = first
    return (_jet_mul(a2, a1) - _jet_mul(b2, np.conj(b1)),
            _jet_mul(a2, b1) + _jet_mul(b2, np.conj(a1)))


class _PointJets:
    """U12 of many NB phase vectors as Taylor jets at a single error value.

    Also returns the exact phase gradient of each jet coefficient, from
    prefix and suffix products of the pulse matrices.
    """

    def __init__(self, n: int, at: float, order: int):
        self.n = n
        self.width = order + 1
        half = [0.25 * np.pi] + [0.5 * np.pi] * (n - 2) + [0.25 * np.pi]
        j = np.arange(self.width)
        fact = np.array([math.factorial(int(i)) for i in j], dtype=float)
        self.cos = [np.cos(w * (1 + at) + 0.5 * np.pi * j) * w ** j / fact for w in half]
        self.sin = [np.sin(w * (1 + at) + 0.5 * np.pi * j) * w ** j / fact for w in half]

    def _pulses(self, phases):
        s = phases.shape[0]
        drives = np.concatenate([np.ones((s, 1)), np.exp(1j * phases)], axis=1)
        return [(np.broadcast_to(self.cos[k].astype(complex), (s, self.width)).copy(),
                 -1j * drives[:, k:k + 1] * self.sin[k]) for k in range(self.n)]

    def u12(self, phases):
        mats = self._pulses(phases)
        total = mats[0]
        for m in mats[1:]:
            total = _pair_mul(m, total)
        return total[1]

    def u12_with_gradient(self, phases):
        mats = self._pulses(phases)
        prefix = [mats[0]]
        for m in mats[1:]:
            prefix.append(_pair_mul(m, prefix[-1]))
        grads = []
        suffix = None
        for k in range(self.n - 1, 0, -1):
            a_k, b_k = mats[k]
            dk = (np.zeros_like(a_k), 1j * b_k)
            term = _pair_mul(dk, prefix[k - 1])
            if suffix is not None:
                term = _pair_mul(suffix, term)
            grads.append(term[1])
            suffix = mats[k] if suffix is None else _pair_mul(suffix, mats[k])
        return prefix[-1][1], np.stack(grads[::-1], axis=-1)


class BatchResiduals:
    """Residual vectors (and exact Jacobians) for a batch of phase vectors."""

    def __init__(self, problem: NbProblem):
        self.problem = problem
        self.orders = problem.derivative_orders
        self.center = _PointJets(problem.n, 0.0, 0)
        self.wing = _PointJets(problem.n, 1.0, self.orders[-1]) if self.orders else None
        self.scale = np.array([math.factorial(k) / problem.bandwidth ** k for k in self.orders])

    def __call__(self, phases: np.ndarray) -> np.ndarray:
        phases = np.atleast_2d(phases)
        out = np.empty((phases.shape[0], self.problem.n_unknowns))
        out[:, 0] = np.abs(self.center.u12(phases)[:, 0]) ** 2 - self.problem.p
        if self.orders:
            s = self.wing.u12(phases)[:, self.orders] * self.scale
            out[:, 1::2], out[:, 2::2] = s.real, s.imag
        return out

    def jacobian(self, phases: np.ndarray) -> np.ndarray:
        phases = np.atleast_2d(phases)
        jac = np.empty((phases.shape[0], self.problem.n_unknowns, self.problem.n_unknowns))
        v, dv = self.center.u12_with_gradient(phases)
        jac[:, 0, :] = 2.0 * np.real(np.conj(v[:, 0, None]) * dv[:, 0, :])
        if self.orders:
            _, ds = self.wing.u12_with_gradient(phases)
            ds = ds[:, self.orders, :] * self.scale[None, :, None]
            jac[:, 1::2, :], jac[:, 2::2, :] = ds.real, ds.imag
        return jac


def fd_jacobian(fun, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of a batched residual map."""
    s, n = x.shape
    steps = step * np.eye(n)
    stencil = np.concatenate([x[:, None, :] + steps, x[:, None, :] - steps], axis=1)
    rs = fun(stencil.reshape(-1, n)).reshape(s, 2 * n, -1)
    return np.transpose(rs[:, :n] - rs[:, n:], (0, 2, 1)) / (2.0 * step)


def levenberg_marquardt(fun, x0: np.ndarray, jac=None, max_iter: int = 200, fd_step: float = 1e-6,
                        tol: float = 1e-13, lam0: float = 1e-3):
    """Batched Levenberg-Marquardt on square or overdetermined systems.

    ``fun`` maps an ``(S, n)`` array of parameter vectors to ``(S, m)``
    residuals; ``jac`` maps it to ``(S, m, n)`` Jacobians and defaults to
    central differences with step ``fd_step``.  Each row has its own damping
    and only takes steps that lower its squared residual norm.  Returns the final parameters and residual
    norms.
    """
    x = np.array(x0, dtype=float, copy=True)
    r = fun(x)
    cost = np.einsum("ij,ij->i", r, r)
    lam = np.full(x.shape[0], lam0)
    active = cost > tol * tol
    n = x.shape[1]
    eye = np.eye(n)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        xa, ra = x[idx], r[idx]
        jac_a = jac(xa) if jac is not None else fd_jacobian(fun, xa, fd_step)
        jtj = np.einsum("sij,sik->sjk", jac_a, jac_a)
        grad = np.einsum("sij,si->sj", jac_a, ra)
        diag = np.einsum("sjj->sj", jtj)
        damp = lam[idx, None, None] * (diag[:, :, None] * eye + 1e-12 * eye)
        try:
            delta = -np.linalg.solve(jtj + damp, grad[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            delta = -np.einsum("sjk,sk->sj", np.linalg.pinv(jtj + damp), grad)
        trial = xa + delta
        rt = fun(trial)
        ct = np.einsum("ij,ij->i", rt, rt)
        better = ct < cost[idx]
        good = idx[better]
        x[good], r[good], cost[good] = trial[better], rt[better], ct[better]
        lam[good] *= 0.3
        lam[idx[~better]] *= 4.0
        stalled = (lam[idx] > 1e12) | (np.max(np.abs(delta), axis=1) < 1e-15)
        active[idx[stalled]] = False
        active[idx] &= cost[idx] > tol * tol
    return x, np.sqrt(cost)


# reference table -------------------------------------------------------------

def default_table_path() -> Path:
    override = os.environ.get(TABLE_ENV_VAR)
    if override:
        return Path(override)
    return Path(str(resources.files("cp_synth") / "data" / "nb_phase_table.json"))


def _validate_entry(entry) -> tuple:
    if not isinstance(entry, dict):
        raise SchemaError("table entries must be objects")
    missing = {"N", "p", "phases_pi", "residual_norm", "source"} - set(entry)
    if missing:
        raise SchemaError(f"table entry missing keys {sorted(missing)}")
    n, p, phases = entry["N"], entry["p"], entry["phases_pi"]
    if not isinstance(n, int) or n < 2 or n % 2:
        raise SchemaError(f"table entry has invalid N {n!r}")
    if not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
        raise SchemaError(f"table entry has invalid p {p!r}")
    if not isinstance(phases, list) or len(phases) != n - 1 or not all(isinstance(f, (int, float)) for f in phases):
        raise SchemaError(f"table entry (N={n}, p={p}) needs {n - 1} numeric phases")
    if entry["source"] not in ("table", "solved"):
        raise SchemaError(f"unknown source {entry['source']!r}")
    return (n, float(p)), [float(f) for f in phases]


def load_reference_table(path=None) -> dict:
    """Map ``(N, p)`` to tabulated phases in units of pi."""
    path = Path(path) if path is not None else default_table_path()
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read phase table {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema_version") != TABLE_SCHEMA_VERSION:
        raise SchemaError(f"phase table {path} lacks schema_version {TABLE_SCHEMA_VERSION}")
    entries = doc.get("entries")
    if not isinstance(entries, list) or not entries:
        raise SchemaError(f"phase table {path} has no entries")
    table = {}
    for entry in entries:
        key, phases = _validate_entry(entry)
        table[key] = phases
    return table


def table_phases(n: int, p: float, table: Optional[dict] = None) -> Optional[list]:
    table = load_reference_table() if table is None else table
    for (tn, tp), phases in table.items():
        if tn == n and abs(tp - p) < 1e-9:
            return [math.pi * f for f in phases]
    return None


def nearest_table_phases(n: int, p: float, table: Optional[dict] = None) -> Optional[list]:
    table = load_reference_table() if table is None else table
    rows = [(abs(tp - p), ph) for (tn, tp), ph in table.items() if tn == n]
    if not rows:
        return None
    return [math.pi * f for f in min(rows, key=lambda r: r[0])[1]]


# numeric solve -----------------------------------------------------------------

@dataclass(frozen=True)
class SolverOptions:
    n_starts: int = 256
    seed: int = DEFAULT_SEED
    max_iter: int = 200
    fd_step: float = 1e-6
    jacobian: str = "analytic"  # or "fd": central differences with fd_step
    accept_tol: float = 1e-10
    profile_tol: float = 1e-8
    profile_points: int = 1001
    continuation: bool = True
    threads: Optional[int] = None
    dedup_tol: float = 1e-6


def _profile_law_deviation(problem: NbProblem, phases, points: int) -> float:
    grid = default_grid(points)
    prof = excitation_profile(nb_sequence(phases), grid)
    return float(np.max(np.abs(prof.probabilities - nb_reference_profile(problem.p, problem.n, grid))))


def _seeds(problem: NbProblem, options: SolverOptions) -> np.ndarray:
    rng = np.random.default_rng(options.seed)
    seeds = [rng.uniform(0.0, TWO_PI, (options.n_starts, problem.n_unknowns))]
    if options.continuation:
        if problem.n <= 4:
            seeds.append(np.array([analytic_phases(problem)]))
        try:
            near = nearest_table_phases(problem.n, problem.p)
        except SchemaError:
            near = None
        if near is not None:
            seeds.append(np.array([near]))
    return np.concatenate(seeds, axis=0)


def _jacobian_for(engine, options):
    if options.jacobian == "analytic":
        return engine.jacobian
    if options.jacobian == "fd":
        return None
    raise ValueError(f"unknown jacobian mode {options.jacobian!r}")


def _run_batches(problem, seeds, options):
    engine = BatchResiduals(problem)
    threads = options.threads or os.cpu_count() or 1
    chunks = [c for c in np.array_split(seeds, max(1, min(threads, len(seeds)))) if len(c)]

    def run(chunk):
        return levenberg_marquardt(engine, chunk, jac=_jacobian_for(engine, options), max_iter=options.max_iter,
                                   fd_step=options.fd_step, tol=1e-2 * options.accept_tol)

    if len(chunks) == 1:
        results = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(run, chunks))
    return (np.concatenate([x for x, _ in results], axis=0),
            np.concatenate([c for _, c in results], axis=0))


def _accept(problem, phases, options) -> Optional[NbSolution]:
    sol = NbSolution.from_phases(problem, phases)
    if not sol.residual_norm < options.accept_tol:
        return None
    if _profile_law_deviation(problem, sol.phases, options.profile_points) >= options.profile_tol:
        return None
    return sol


def _deduplicate(solutions: list, tol: float) -> list:
    kept = []
    for sol in sorted(solutions, key=lambda s: s.residual_norm):
        x = np.array(sol.phases)
        if any(min(circular_distance(x, k.phases), circular_distance(-x, k.phases)) < tol for k in kept):
            continue
        kept.append(sol)
    return kept


def solve_nb(problem: NbProblem, options: SolverOptions = SolverOptions()) -> list:
    """All distinct accepted NB solutions found from the multi-start budget.

    Solutions related by negating every phase form one class; only one
    representative is returned.  Sorted by residual norm.
    """
    if problem.n > MAX_N:
        raise UnsupportedLengthError(f"supported range is N <= {MAX_N}, got {problem.n}")
    if problem.n == 2:
        return [solve_analytic(problem)]
    x, norms = _run_batches(problem, _seeds(problem, options), options)
    order = [i for i in np.argsort(norms, kind="stable") if norms[i] < 10.0 * options.accept_tol]
    reps = []
    for i in order:
        xi = x[i]
        if not any(min(circular_distance(xi, r), circular_distance(-xi, r)) < options.dedup_tol for r in reps):
            reps.append(xi)
    candidates = [sol for sol in (_accept(problem, r, options) for r in reps) if sol is not None]
    if not candidates:
        raise ConvergenceError(
            f"no solution for N={problem.n}, p={problem.p} within {len(x)} starts "
            f"(best residual {float(np.min(norms)):.3e})", float(np.min(norms)))
    return _deduplicate(candidates, options.dedup_tol)


def match_table(solutions: Sequence[NbSolution], reference_phases) -> tuple:
    """Solution closest to ``reference_phases`` (radians), allowing global negation.

    Returns ``(solution, distance)`` with the solution mapped onto the
    representative nearest the reference.
    """
    best, best_d, flip = None, math.inf, False
    ref = np.asarray(reference_phases, dtype=float)
    for sol in solutions:
        x = np.array(sol.phases)
        for negate in (False, True):
            d = circular_distance(-x if negate else x, ref)
            if d < best_d:
                best, best_d, flip = sol, d, negate
    if best is None:
        raise ConvergenceError("no solutions to match against the table")
    return (best.negated() if flip else best), best_d


def solve_matched(problem: NbProblem, options: SolverOptions = SolverOptions(), table=None) -> NbSolution:
    """Table-matched solution where the table has an entry, else the best one."""
    if problem.n <= 4:
        sol = solve_analytic(problem)
        ref = table_phases(problem.n, problem.p, table)
        if ref is not None:
            sol = match_table([sol], ref)[0]
        return sol
    sols = solve_nb(problem, options)
    ref = table_phases(problem.n, problem.p, table)
    return match_table(sols, ref)[0] if ref is not None else sols[0]


def continue_branch(solution: NbSolution, new_p: float, options: SolverOptions = SolverOptions()) -> NbSolution:
    """Follow a solution branch to a nearby target probability."""
    problem = NbProblem(solution.problem.n, new_p)
    engine = BatchResiduals(problem)
    x, _ = levenberg_marquardt(engine, np.array([solution.phases]), jac=_jacobian_for(engine, options),
                               max_iter=options.max_iter,
                               fd_step=options.fd_step, tol=1e-2 * options.accept_tol)
    sol = NbSolution.from_phases(problem, x[0])
    if not sol.residual_norm < options.accept_tol:
        raise ConvergenceError(f"continuation to p={new_p} failed", sol.residual_norm)
    return sol


def validate_half_pi(phases, tol: float = 1e-10) -> bool:
    """True when ``phases`` solve the NB system for p = 1/2."""
    problem = NbProblem(len(phases) + 1, 0.5)
    return bool(np.linalg.norm(residuals(problem, phases)) < tol)


# extended precision refinement ----------------------------------------------------

def residuals_mp(problem: NbProblem, phases) -> list:
    seq = nb_sequence(phases)
    target = mpmath.mpf(repr(float(problem.p)))
    out = [abs(u12_mp(seq, 0)) ** 2 - target]
    orders = problem.derivative_orders
    if orders:
        derivs = u12_taylor_mp(seq, 1, orders[-1])
        omega = (problem.n - 1) * mpmath.pi / 2
        for k in orders:
            s = derivs[k] / omega ** k
            out += [s.real, s.imag]
    return out


def refine(solution: NbSolution, dps: int = 60, max_iter: int = 12) -> tuple:
    """Newton-polish a solution to ``dps`` significant digits with mpmath.

    Needed for wing-suppression fits of long sequences, whose probabilities
    near eps = +-1 sit far below double-precision round-off.  Fails at the
    degenerate endpoints p = 0 and p = 1, where the probability constraint
    has a vanishing gradient.
    """
    problem = solution.problem
    with mpmath.workdps(dps + 15):
        x = mpmath.matrix([mpmath.mpf(f) for f in solution.phases])
        h = mpmath.mpf(10) ** (-(dps + 15) // 2)
        target = mpmath.mpf(10) ** (-dps)
        n = problem.n_unknowns
        for _ in range(max_iter):
            f = mpmath.matrix(residuals_mp(problem, list(x)))
            if mpmath.norm(f) < target:
                break
            jac = mpmath.matrix(n, n)
            for j in range(n):
                xp, xm = x.copy(), x.copy()
                xp[j] += h
                xm[j] -= h
                col = (mpmath.matrix(residuals_mp(problem, list(xp))) -
                       mpmath.matrix(residuals_mp(problem, list(xm)))) / (2 * h)
                for i in range(n):
                    jac[i, j] = col[i]
            try:
                x = x - mpmath.lu_solve(jac, f)
            except ZeroDivisionError as exc:
                raise ConvergenceError("singular Jacobian during refinement") from exc
        else:
            norm = mpmath.norm(mpmath.matrix(residuals_mp(problem, list(x))))
            if norm >= target:
                raise ConvergenceError(f"refinement stalled at residual {mpmath.nstr(norm, 5)}", float(norm))
        two_pi = 2 * mpmath.pi
        return tuple(+(xi % two_pi) for xi in x)


# table verification ----------------------------------------------------------------

@dataclass
class TableReport:
    entries: list
    residual_tol: float = 5e-4
    profile_tol: float = 1e-3
    hwhm_tol: float = 1e-3

    @property
    def passed(self) -> bool:
        return all(e["passed"] for e in self.entries)

    @property
    def n_passed(self) -> int:
        return sum(e["passed"] for e in self.entries)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "n_passed": self.n_passed, "n_entries": len(self.entries),
                "tolerances": {"residual": self.residual_tol, "profile": self.profile_tol, "hwhm": self.hwhm_tol},
                "entries": self.entries}

    def format(self) -> str:
        lines = [f"{'N':>2} {'p':>5} {'max_residual':>13} {'profile_dev':>12} {'hwhm':>7}  status"]
        for e in self.entries:
            lines.append(f"{e['N']:>2} {e['p']:>5.2f} {e['max_residual']:>13.3e} {e['profile_deviation']:>12.3e} "
                         f"{e['hwhm']:>7.4f}  {'pass' if e['passed'] else 'FAIL'}")
        lines.append(f"{self.n_passed}/{len(self.entries)} entries pass")
        return "\n".join(lines)


def verify_reference_table(table: Optional[dict] = None, points: int = 1001) -> TableReport:
    table = load_reference_table() if table is None else table
    report = TableReport([])
    grid = default_grid(points)
    for (n, p), phases_pi in sorted(table.items()):
        problem = NbProblem(n, p)
        phases = [math.pi * f for f in phases_pi]
        r = np.abs(residuals(problem, phases))
        prof = excitation_profile(nb_sequence(phases), grid)
        dev = float(np.max(np.abs(prof.probabilities - nb_reference_profile(p, n, grid))))
        width = hwhm_measured(prof)
        quoted = QUOTED_HWHM.get(n)
        width_ok = quoted is None or abs(width - quoted) < report.hwhm_tol
        entry = {"N": n, "p": p, "max_residual": float(r.max()), "profile_deviation": dev, "hwhm": width,
                 "passed": bool(r.max() < report.residual_tol and dev < report.profile_tol and width_ok)}
        report.entries.append(entry)
    return report
