"""Transfer operators on truncated shifts and their RPF data.

The operator of phi restricted to Sigma_N is discretized on depth-m
cylinders: the weight attached to (incoming symbol u, target cylinder w*)
is e**phi evaluated at the canonical representative u.w*.0-bar.  Leading
eigendata gives the pressure, the conformal measure (left vector) and the
invariant density (right vector).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .geometry import ExpMapModel, endpoint, pullback_array
from .potentials import PotentialSpec, phi_array, phi_symbolic
from .shift import (DEFAULT_STATE_CAP, Itinerary, StateCapError, ZERO,
                    cylinder_count, cylinder_index, prepend, representative)

EIGEN_TOL = 1e-13
RESIDUAL_TOL = 1e-10
MAX_POWER_ITER = 100_000


def state_cap() -> int:
    return int(os.environ.get("BOUQUET_STATE_CAP", DEFAULT_STATE_CAP))


class PowerIterationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TruncatedOperator:
    N: int
    m: int
    matrix: sp.csr_matrix  # (L g)(w*) = sum_u weight(u, w*) g(u . prefix(w*))
    rep_points: np.ndarray  # endpoint of w* . 0-bar per cylinder, lex order

    @property
    def state_count(self) -> int:
        return self.matrix.shape[0]

    def apply(self, g: np.ndarray) -> np.ndarray:
        return self.matrix @ g


@dataclass(frozen=True)
class PressureEstimate:
    value: float
    route: str  # "iterate" | "eigen"
    N: int
    m_or_n: int
    residual: float

    @property
    def theta(self) -> float:
        """e**pressure; the leading eigenvalue itself."""
        return math.exp(self.value)


@dataclass(frozen=True)
class CylinderMeasure:
    N: int
    m: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("measure must sum to 1")
        if (w < 0).any():
            raise ValueError("measure must be nonnegative")
        object.__setattr__(self, "weights", w)

    def mass_of_prefix(self, depth: int) -> np.ndarray:
        """Aggregate to cylinders of the given shallower depth."""
        K = 2 * self.N + 1
        return self.weights.reshape(K**depth, -1).sum(axis=1)


@dataclass(frozen=True)
class GibbsReport:
    P_used: float
    ratios: list  # (n, u*, s_text, ratio, R_hat)
    D_hat_by_n: dict

    def envelope_violation(self, C_prime: float) -> float:
        """Worst excess over C'**-1 R_hat <= ratio <= C'; <= 0 passes."""
        worst = -math.inf
        for _, _, _, ratio, r_hat in self.ratios:
            worst = max(worst, ratio - C_prime, r_hat / C_prime - ratio)
        return worst


def all_words(N: int, m: int) -> np.ndarray:
    """(2N+1)**m x m array of words in lexicographic order."""
    K = 2 * N + 1
    grids = np.meshgrid(*([np.arange(-N, N + 1)] * m), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def word_indices(words: np.ndarray, N: int) -> np.ndarray:
    K = 2 * N + 1
    powers = K ** np.arange(words.shape[1] - 1, -1, -1)
    return (words + N) @ powers


def build_operator(model: ExpMapModel, spec: PotentialSpec, N: int,
                   m: int) -> TruncatedOperator:
    if m < 1 or N < 1:
        raise ValueError("need N >= 1 and m >= 1")
    n_states = cylinder_count(N, m)
    if n_states > state_cap():
        raise StateCapError(
            f"(2N+1)^m = {n_states} exceeds state cap {state_cap()}")
    p = endpoint(model, ZERO).point
    ext = all_words(N, m + 1)  # extended words x = u . w*
    z = pullback_array(model, ext, p)
    if not np.all(np.isfinite(z)):
        bad = ext[~np.isfinite(z)][0]
        raise RuntimeError(f"representative endpoint failed for {tuple(bad)}")
    weights = np.exp(phi_array(model, spec, z, ext[:, 0]))
    rows = word_indices(ext[:, 1:], N)    # target cylinder w*
    cols = word_indices(ext[:, :m], N)    # source cylinder u . prefix(w*)
    matrix = sp.csr_matrix((weights, (rows, cols)),
                           shape=(n_states, n_states))
    rep_points = pullback_array(model, all_words(N, m), p)
    return TruncatedOperator(N=N, m=m, matrix=matrix, rep_points=rep_points)


def _power_iteration(matrix, n: int) -> tuple[float, np.ndarray, float]:
    """Leading eigenpair of a positive matrix from the all-ones start."""
    v = np.ones(n)
    lam_prev = math.inf
    for _ in range(MAX_POWER_ITER):
        w = matrix @ v
        lam = float(w @ v) / float(v @ v)
        v = w / np.linalg.norm(w)
        if abs(lam - lam_prev) < EIGEN_TOL * abs(lam):
            w = matrix @ v
            residual = float(np.abs(w - lam * v).max()) / lam
            if residual < RESIDUAL_TOL:
                return lam, v, residual
        lam_prev = lam
    raise PowerIterationError(
        f"power iteration did not converge in {MAX_POWER_ITER} steps")


def pressure_eigen(op: TruncatedOperator) -> PressureEstimate:
    lam, _, residual = _power_iteration(op.matrix, op.state_count)
    return PressureEstimate(value=math.log(lam), route="eigen", N=op.N,
                            m_or_n=op.m, residual=residual)


def conformal_measure(op: TruncatedOperator) -> CylinderMeasure:
    """Left leading eigenvector, normalized to a probability vector."""
    _, v, _ = _power_iteration(op.matrix.T.tocsr(), op.state_count)
    v = np.abs(v)
    return CylinderMeasure(N=op.N, m=op.m, weights=v / v.sum())


def conformality_residual(op: TruncatedOperator, nu: CylinderMeasure,
                          theta: float) -> float:
    """Worst cylinder defect of nu(sigma A) = theta * int_A e**-phi d nu,
    expressed through the left-eigenvector identity."""
    lhs = op.matrix.T @ nu.weights
    return float(np.abs(lhs / theta - nu.weights).max())


def density(op: TruncatedOperator) -> np.ndarray:
    """Right eigenvector h, normalized so that max h = 1."""
    _, h, _ = _power_iteration(op.matrix, op.state_count)
    h = np.abs(h)
    return h / h.max()


def invariance_residual(mu: CylinderMeasure) -> float:
    """Worst defect of mu(sigma**-1 [w]) = mu([w]) over depth-(m-1) words."""
    K = 2 * mu.N + 1
    n = mu.weights.size
    pulled = mu.weights.reshape(K, n // K).sum(axis=0)   # sum over first symbol
    pushed = mu.weights.reshape(n // K, K).sum(axis=1)   # sum over last symbol
    return float(np.abs(pulled - pushed).max())


@dataclass(frozen=True)
class InvariantResult:
    measure: CylinderMeasure
    density: np.ndarray
    cesaro_tv: float          # total-variation gap to the Cesaro surrogate
    cesaro_tv_by_M: list
    converged: bool


def pullback_sequence(op: TruncatedOperator, nu: CylinderMeasure,
                      theta: float, M: int) -> list[np.ndarray]:
    """nu o sigma**-n at cylinder resolution for n = 0..M-1.

    Conformality turns the pullback into theta**-n (L**n 1) weighted by nu,
    which is how the terms are computed here.
    """
    terms = []
    g = np.ones(op.state_count)
    for _ in range(M):
        term = g * nu.weights
        terms.append(term / term.sum())
        g = op.apply(g) / theta
    return terms


def invariant_measure(op: TruncatedOperator, nu: CylinderMeasure,
                      M_max: int = 32,
                      tv_tol: float = 1e-6) -> InvariantResult:
    """mu = h * nu renormalized, cross-checked against Cesaro averages of
    the pullbacks nu o sigma**-n (the computable Banach-limit surrogate).

    Plain Cesaro averages converge only like 1/M, so the surrogate limit is
    taken as the tail-window average over n in [M/2, M), which inherits the
    spectral-gap rate; the full-average trajectory is reported alongside.
    """
    h = density(op)
    w = h * nu.weights
    mu = CylinderMeasure(N=op.N, m=op.m, weights=w / w.sum())
    terms = pullback_sequence(op, nu, math.exp(pressure_eigen(op).value),
                              M_max)
    tv_by_M = []
    acc = np.zeros(op.state_count)
    for n, term in enumerate(terms):
        acc += term
        avg = acc / (n + 1)
        tv_by_M.append(0.5 * float(np.abs(avg - mu.weights).sum()))
    tail = np.mean(terms[M_max // 2:], axis=0)
    tail /= tail.sum()
    cesaro_tv = 0.5 * float(np.abs(tail - mu.weights).sum())
    return InvariantResult(measure=mu, density=h, cesaro_tv=cesaro_tv,
                           cesaro_tv_by_M=tv_by_M,
                           converged=cesaro_tv <= tv_tol)


# ---------------------------------------------------------------------------
# brute-force route


def iterate_L_one(model: ExpMapModel, spec: PotentialSpec, N: int,
                  s: Itinerary, n_max: int,
                  cap: int | None = None) -> list[float]:
    """L**n 1 (s) for n = 1..n_max by explicit sums over words in the
    alphabet of Sigma_N; the exhaustive cross-check for the eigen route."""
    cap = cap or state_cap()
    K = 2 * N + 1
    z = np.array([endpoint(model, s).point])
    acc = np.array([0.0])
    symbols = np.arange(-N, N + 1)
    values = []
    for n in range(1, n_max + 1):
        if z.size * K > cap:
            break
        z = np.repeat(z, K)
        acc = np.repeat(acc, K)
        ks = np.tile(symbols, z.size // K)
        v = z / model.lam
        z = np.log(np.abs(v)) + 1j * (np.angle(v) + 2.0 * np.pi * ks)
        acc = acc + phi_array(model, spec, z, ks)
        values.append(float(np.exp(acc).sum()))
    return values


def pressure_iterate(model: ExpMapModel, spec: PotentialSpec, N: int,
                     s: Itinerary, n_max: int) -> list[PressureEstimate]:
    out = []
    for n, Ln in enumerate(iterate_L_one(model, spec, N, s, n_max), start=1):
        out.append(PressureEstimate(value=math.log(Ln) / n, route="iterate",
                                    N=N, m_or_n=n, residual=float("nan")))
    return out


# ---------------------------------------------------------------------------
# reports


def gibbs_check(op: TruncatedOperator, measure: CylinderMeasure, P: float,
                samples: int = 40, seed: int = 0,
                n_list: tuple[int, ...] | None = None) -> GibbsReport:
    """Ratios nu(u* . [w]) / exp(S_n phi(u* s) - n P) against the Gibbs
    envelope, with the depth-(m-n) cylinder [w] standing in for the
    delta-ball at its representative s = w . 0-bar."""
    rng = np.random.default_rng(seed)
    N, m = op.N, op.m
    n_list = n_list or tuple(range(1, m))
    ratios = []
    D_hat_by_n = {}
    for n in n_list:
        base_depth = m - n
        base_mass = measure.mass_of_prefix(base_depth)
        worst = 1.0
        for _ in range(samples):
            w = tuple(int(x) for x in rng.integers(-N, N + 1, size=base_depth))
            u = tuple(int(x) for x in rng.integers(-N, N + 1, size=n))
            s = representative(w)
            idx = cylinder_index(u + w, N)
            r_hat = float(base_mass[cylinder_index(w, N)])
            S_n = _birkhoff_prefix(op, u, s)
            ratio = float(measure.weights[idx]) / math.exp(S_n - n * P)
            ratios.append((n, u, str(s), ratio, r_hat))
            worst = max(worst, ratio, r_hat / ratio if ratio > 0 else math.inf)
        D_hat_by_n[n] = worst
    return GibbsReport(P_used=P, ratios=ratios, D_hat_by_n=D_hat_by_n)


_BIRKHOFF_CACHE: dict = {}


def _birkhoff_prefix(op: TruncatedOperator, u: tuple, s: Itinerary) -> float:
    key = (id(op), u, s)
    got = _BIRKHOFF_CACHE.get(key)
    if got is not None:
        return got
    model, spec = op._context  # attached by build context helpers
    val = sum(phi_symbolic(model, spec, prepend(u[j:], s))
              for j in range(len(u)))
    _BIRKHOFF_CACHE[key] = val
    return val


def tightness_report(model: ExpMapModel, spec: PotentialSpec,
                     N_list: tuple[int, ...], R_list: tuple[float, ...],
                     m: int = 4, seed: int = 0) -> list[dict]:
    """Measured tail mass of nu_N outside B(endpoint(0-bar), R) against the
    pressure-weighted sum of inflated sampled sups, per (N, R)."""
    from .potentials import sup_phi_tail
    if any(b <= a for a, b in zip(N_list, N_list[1:])) or \
       any(b <= a for a, b in zip(R_list, R_list[1:])):
        raise ValueError("N_list and R_list must be increasing")
    rng = np.random.default_rng(seed)
    z0 = endpoint(model, ZERO).point
    rows = []
    for N in N_list:
        op = attach_context(build_operator(model, spec, N, m), model, spec)
        P = pressure_eigen(op).value
        nu = conformal_measure(op)
        dist = np.abs(op.rep_points - z0)
        for R in R_list:
            measured = float(nu.weights[dist > R].sum())
            total = 0.0
            for k in range(0, 4 * N + 8):
                term = sup_phi_tail(model, spec, k, R, rng)
                if k > 0:
                    term += sup_phi_tail(model, spec, -k, R, rng)
                total += term
                if k > N + 2 and term < 1e-14 * max(total, 1e-300):
                    break
            bound = math.exp(-P) * total
            rows.append({"N": N, "R": R, "measured": measured,
                         "bound": bound, "sup_mode": "sampled"})
    return rows


def normalized_iterate_bounds(op: TruncatedOperator, R: float,
                              n_max: int = 16) -> dict:
    """min/max of theta**-n L**n 1 over cylinders inside B(0-bar, R)."""
    theta = pressure_eigen(op).theta
    model, _ = op._context
    z0 = endpoint(model, ZERO).point
    inside = np.abs(op.rep_points - z0) < R
    if not inside.any():
        raise ValueError(f"no cylinder representatives inside radius {R}")
    g = np.ones(op.state_count)
    mins, maxs = [], []
    for _ in range(n_max + 1):
        mins.append(float(g[inside].min()))
        maxs.append(float(g[inside].max()))
        g = op.apply(g) / theta
    stable = (mins[n_max] >= 0.9 * mins[n_max // 2]
              and mins[n_max] <= 1.1 * mins[n_max // 2])
    bounded = mins[-1] > 0 and math.isfinite(maxs[-1])
    return {"min": mins, "max": maxs, "passed": bool(stable and bounded)}


def attach_context(op: TruncatedOperator, model: ExpMapModel,
                   spec: PotentialSpec) -> TruncatedOperator:
    """Record the (model, spec) pair the operator was built from; several
    reports need phi evaluations beyond the stored weights."""
    object.__setattr__(op, "_context", (model, spec))
    return op


def build(model: ExpMapModel, spec: PotentialSpec, N: int,
          m: int) -> TruncatedOperator:
    """build_operator plus context attachment; the usual entry point."""
    return attach_context(build_operator(model, spec, N, m), model, spec)
