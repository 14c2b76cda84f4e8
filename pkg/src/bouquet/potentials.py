"""Potentials phi(z) = log(c(z) |z|**-t) on the symbolic space.

The per-strip factor c is symmetric (c_k = c_{-k}) and must decay faster
than any power of k; the gaussian law exp(-|k|**beta), beta > 1, is the
default.  Admissibility is established numerically: summability, bounded
on balls, rapid decrease, and weak-Hoelder variation decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .geometry import ExpMapModel, endpoint, induced_metric, random_itinerary
from .shift import Itinerary, ZERO, prepend, representative, shift

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"


class CLaw:
    def log_c(self, k: int) -> float:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianLaw(CLaw):
    """c_k = exp(-|k|**beta), beta > 1; log c_k / log k -> -inf."""
    beta: float = 2.0

    def __post_init__(self):
        if self.beta <= 1.0:
            raise ValueError("gaussian law needs beta > 1")

    def log_c(self, k: int) -> float:
        return -abs(k) ** self.beta

    def to_json(self) -> dict:
        return {"kind": "gaussian", "beta": self.beta}


@dataclass(frozen=True)
class UnitLaw(CLaw):
    """c_k = 1; kept as a negative control for the admissibility checks."""

    def log_c(self, k: int) -> float:
        return 0.0

    def to_json(self) -> dict:
        return {"kind": "unit"}


@dataclass(frozen=True)
class TableLaw(CLaw):
    """Explicit c_k for |k| < len(values), gaussian tail beyond."""
    values: tuple[float, ...]
    tail_beta: float = 2.0

    def __post_init__(self):
        if not self.values or any(v <= 0 for v in self.values):
            raise ValueError("table values must be positive")
        if self.tail_beta <= 1.0:
            raise ValueError("table tail needs beta > 1")

    def log_c(self, k: int) -> float:
        k = abs(k)
        if k < len(self.values):
            return math.log(self.values[k])
        return -float(k) ** self.tail_beta

    def to_json(self) -> dict:
        return {"kind": "table", "values": list(self.values),
                "tail_beta": self.tail_beta}


def law_from_json(obj: dict) -> CLaw:
    kind = obj.get("kind")
    if kind == "gaussian":
        return GaussianLaw(beta=float(obj.get("beta", 2.0)))
    if kind == "unit":
        return UnitLaw()
    if kind == "table":
        return TableLaw(values=tuple(float(v) for v in obj["values"]),
                        tail_beta=float(obj.get("tail_beta", 2.0)))
    raise ValueError(f"unknown c-law kind {kind!r}")


def law_from_text(text: str) -> CLaw:
    """Parse CLI form: 'unit', 'gaussian:BETA' or 'gaussian'."""
    parts = text.split(":")
    if parts[0] == "unit":
        return UnitLaw()
    if parts[0] == "gaussian":
        return GaussianLaw(beta=float(parts[1]) if len(parts) > 1 else 2.0)
    raise ValueError(f"unknown c-law {text!r}")


@dataclass(frozen=True)
class PotentialSpec:
    t: float
    c_law: CLaw = field(default_factory=GaussianLaw)
    tau: float = 1.0
    strict: bool = True  # enforce t > 1/tau at construction

    def __post_init__(self):
        if self.t <= 0 and self.strict:
            raise ValueError("exponent t must be positive")
        if self.strict and self.t <= 1.0 / self.tau:
            raise ValueError(
                f"t = {self.t} violates t > 1/tau = {1.0 / self.tau}")

    def to_json(self) -> dict:
        return {"t": self.t, "c_law": self.c_law.to_json()}


def default_spec() -> PotentialSpec:
    return PotentialSpec(t=2.0, c_law=GaussianLaw(2.0))


def phi_point(model: ExpMapModel, spec: PotentialSpec, z: complex) -> float:
    """phi at a plane point; the strip index supplies c(z)."""
    z = complex(z)
    if z == 0:
        raise ValueError("phi undefined at 0")
    if z.real < model.tract_boundary - 1e-12:
        raise ValueError(f"{z} lies outside every fundamental domain")
    k = model.strip_index(z)
    return spec.c_law.log_c(k) - spec.t * math.log(abs(z))


def phi_array(model: ExpMapModel, spec: PotentialSpec, z: np.ndarray,
              k: np.ndarray) -> np.ndarray:
    """Vectorized phi with the strip indices supplied by the caller."""
    log_c = np.array([spec.c_law.log_c(int(kk)) for kk in k])
    return log_c - spec.t * np.log(np.abs(z))


def phi_symbolic(model: ExpMapModel, spec: PotentialSpec,
                 s: Itinerary) -> float:
    return phi_point(model, spec, endpoint(model, s).point)


def birkhoff_sum(model: ExpMapModel, spec: PotentialSpec, s: Itinerary,
                 n: int) -> float:
    if n < 0:
        raise ValueError("n must be >= 0")
    total = 0.0
    cur = s
    for _ in range(n):
        total += phi_symbolic(model, spec, cur)
        cur = shift(cur)
    return total


# ---------------------------------------------------------------------------
# admissibility checks


@dataclass(frozen=True)
class CheckReport:
    name: str
    verdict: str
    detail: dict

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def summability_check(model: ExpMapModel, spec: PotentialSpec,
                      N_max: int = 50, sample_s: tuple[Itinerary, ...] = (),
                      seed: int = 0) -> CheckReport:
    """Partial sums over |u| <= K of e**phi(u s); PASS on geometric tails."""
    if not sample_s:
        rng = np.random.default_rng(seed)
        sample_s = (ZERO,) + tuple(random_itinerary(rng, 2) for _ in range(4))
    series = {}
    verdicts = []
    for s in sample_s:
        incs = []
        for K in range(0, N_max + 1):
            inc = 0.0
            us = [K] if K == 0 else [K, -K]
            for u in us:
                inc += math.exp(phi_symbolic(model, spec, prepend((u,), s)))
            incs.append(inc)
        partial = np.cumsum(incs)
        series[str(s)] = partial
        tail = incs[-6:]
        if max(tail) <= 1e-15 * partial[-1]:
            # increments underflowed to zero: the series already converged
            verdicts.append(True)
            continue
        ratios = [b / a for a, b in zip(tail, tail[1:]) if a > 0]
        geometric = bool(ratios) and max(ratios) < 0.9
        if geometric:
            q = max(ratios)
            projected = tail[-1] * q / (1.0 - q)
            ok = projected < 1e-9 * partial[-1] + 1e-12
        else:
            ok = False
        verdicts.append(ok)
    verdict = PASS if all(verdicts) else FAIL
    sup = max(float(v[-1]) for v in series.values())
    return CheckReport("summability", verdict,
                       {"sup_partial_sum": sup, "series": series})


def _far_candidates(model: ExpMapModel, u: int, rng: np.random.Generator,
                    N_tail: int = 2, n_random: int = 20) -> list[complex]:
    """Sampled endpoints in the cylinder [u], reaching far from the origin.

    Tails with huge second symbols push Re z to ln-scale infinity, so every
    radius is reachable.
    """
    pts = []
    for k1 in [0, 1, 2, 5, 10, 10**2, 10**3, 10**4, 10**6, 10**8, 10**10,
               10**12]:
        for sgn in ((1, -1) if k1 else (1,)):
            tail = prepend((sgn * k1,), ZERO)
            z = endpoint(model, prepend((u,), tail)).point
            pts.append(z)
    for _ in range(n_random):
        tail = random_itinerary(rng, N_tail)
        pts.append(endpoint(model, prepend((u,), tail)).point)
    return pts


def sup_phi_tail(model: ExpMapModel, spec: PotentialSpec, u: int, R: float,
                 rng: np.random.Generator, inflation: float = 0.1) -> float:
    """Sampled sup of phi over [u] minus the closed R-ball around 0-bar.

    Returns the inflated exp-scale term exp(sup)*(1+inflation); the sup over
    the non-compact set is not computable, the inflation biases the bound
    upward.
    """
    z0 = endpoint(model, ZERO).point
    best = -math.inf
    for z in _far_candidates(model, u, rng):
        if abs(z - z0) > R:
            best = max(best, phi_point(model, spec, z))
    if best == -math.inf:
        return 0.0
    return (1.0 + inflation) * math.exp(best)


def rapid_decrease_check(model: ExpMapModel, spec: PotentialSpec,
                         R_list: tuple[float, ...] = (5.0, 10.0, 20.0),
                         N_max: int = 40, seed: int = 0) -> CheckReport:
    """Tail sums over u of exp(sup phi | [u] outside the R-ball), per R."""
    if any(b <= a for a, b in zip(R_list, R_list[1:])):
        raise ValueError("R_list must be increasing")
    rng = np.random.default_rng(seed)
    sums = []
    for R in R_list:
        total = 0.0
        for u in range(0, N_max + 1):
            term = sup_phi_tail(model, spec, u, R, rng)
            if u > 0:
                term += sup_phi_tail(model, spec, -u, R, rng)
            total += term
            if u > 3 and term < 1e-14 * max(total, 1e-300):
                break
        sums.append(total)
    decreasing = all(b <= a for a, b in zip(sums, sums[1:]))
    strictly = all(b < a for a, b in zip(sums, sums[1:]) if a > 0)
    if decreasing and sums[-1] < 0.5 * sums[0]:
        verdict = PASS
    elif decreasing and strictly:
        verdict = INCONCLUSIVE
    else:
        verdict = FAIL
    return CheckReport("rapid_decrease", verdict,
                       {"R": list(R_list), "tail_sum": sums})


def bounded_on_balls_check(model: ExpMapModel, spec: PotentialSpec, R: float,
                           samples: int = 400, seed: int = 0) -> CheckReport:
    """Running sup of |phi| over sampled itineraries inside the R-ball."""
    if R <= 0:
        raise ValueError("R must be positive")
    rng = np.random.default_rng(seed)
    z0 = endpoint(model, ZERO).point
    K = int(math.ceil((R + abs(z0)) / (2.0 * math.pi))) + 1
    sups = []
    cur = 0.0
    kept = 0
    for _ in range(samples):
        s = random_itinerary(rng, K)
        z = endpoint(model, s).point
        if abs(z - z0) >= R:
            continue
        kept += 1
        cur = max(cur, abs(phi_point(model, spec, z)))
        sups.append(cur)
    if kept < 20:
        return CheckReport("bounded_on_balls", INCONCLUSIVE,
                           {"R": R, "kept": kept})
    half = sups[len(sups) // 2]
    stable = math.isfinite(sups[-1]) and sups[-1] <= half * 1.5 + 1.0
    return CheckReport("bounded_on_balls", PASS if stable else FAIL,
                       {"R": R, "kept": kept, "sup_abs_phi": sups[-1],
                        "sup_at_half": half})


# ---------------------------------------------------------------------------
# weak-Hoelder variation


@dataclass(frozen=True)
class VariationReport:
    n_values: list[int]
    var_n: list[float]
    fitted_C: float
    fitted_r: float
    r_squared: float

    @property
    def W_r(self) -> float:
        """sup over n >= 1 of Var_n / r**n for the fitted r."""
        vals = [v / self.fitted_r**n
                for n, v in zip(self.n_values, self.var_n) if n >= 1]
        return max(vals) if vals else 0.0


class VariationFitError(RuntimeError):
    pass


def _ball_member(model: ExpMapModel, t: Itinerary, s: Itinerary, n: int,
                 delta: float) -> bool:
    """t in B_n(s, delta): symbols agree through n, shifted distances < delta."""
    st, ss = t, s
    for j in range(n + 1):
        if st[0] != ss[0]:
            return False
        if induced_metric(model, st, ss) >= delta:
            return False
        st, ss = shift(st), shift(ss)
    return True


def variation_samples(model: ExpMapModel, spec: PotentialSpec, delta: float,
                      n: int, samples: int, rng: np.random.Generator,
                      N: int = 2) -> list[float]:
    """|phi(t) - phi(u)| over sampled pairs in a common B_n(s, delta)."""
    diffs = []
    attempts = 0
    while len(diffs) < samples and attempts < 60 * samples:
        attempts += 1
        w = tuple(int(x) for x in rng.integers(-N, N + 1, size=n + 1))
        s = representative(w)
        t = prepend(w, random_itinerary(rng, N))
        u = prepend(w, random_itinerary(rng, N))
        if not (_ball_member(model, t, s, n, delta)
                and _ball_member(model, u, s, n, delta)):
            continue
        diffs.append(abs(phi_symbolic(model, spec, t)
                         - phi_symbolic(model, spec, u)))
    return diffs


def variation_exhaustive(model: ExpMapModel, spec: PotentialSpec, delta: float,
                         n: int, N: int = 1, tail_depth: int = 3) -> float:
    """Brute-force Var_n over all cylinder-representative tails; the oracle
    for the Monte-Carlo estimator at small N."""
    from .shift import cylinders
    tails = [representative(w) for w in cylinders(N, tail_depth)]
    best = 0.0
    for w in cylinders(N, n + 1):
        s = representative(w)
        members = [prepend(w, tl) for tl in tails]
        vals = [phi_symbolic(model, spec, m) for m in members
                if _ball_member(model, m, s, n, delta)]
        if len(vals) >= 2:
            best = max(best, max(vals) - min(vals))
    return best


def variation_report(model: ExpMapModel, spec: PotentialSpec, delta: float,
                     n_max: int = 8, samples: int = 60, seed: int = 0,
                     N: int = 2) -> VariationReport:
    rng = np.random.default_rng(seed)
    n_values, var_n = [], []
    for n in range(n_max + 1):
        diffs = variation_samples(model, spec, delta, n, samples, rng, N)
        if len(diffs) < 10:
            raise VariationFitError(
                f"only {len(diffs)} valid pairs at depth {n}")
        n_values.append(n)
        var_n.append(max(diffs))
    xs = np.array([n for n, v in zip(n_values, var_n) if v > 0], dtype=float)
    ys = np.log([v for v in var_n if v > 0])
    if len(xs) < 3:
        raise VariationFitError("too few nonzero variations to fit")
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (intercept + slope * xs)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    return VariationReport(n_values=n_values, var_n=var_n,
                           fitted_C=float(math.exp(intercept)),
                           fitted_r=float(math.exp(slope)), r_squared=r2)
