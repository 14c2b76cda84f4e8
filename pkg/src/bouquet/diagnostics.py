"""Property audits for the induced metric space: contraction axiom,
mixing, chaining, density of the truncated shifts, compactness proxy.

Verdicts are PASS / FAIL / INCONCLUSIVE; compactness can only be proxied
by sampling, and the output says so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (ExpMapModel, ShrinkingConstants, endpoint,
                       induced_metric, random_itinerary,
                       validate_shrinking_constants)
from .potentials import FAIL, INCONCLUSIVE, PASS
from .shift import Itinerary, ZERO, natural_metric, prepend, shift


@dataclass(frozen=True)
class AuditResult:
    axiom: str
    samples: int
    worst_violation: float
    verdict: str
    notes: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


_SLACK = 1e-9


def _verdict(worst: float) -> str:
    return PASS if worst <= _SLACK else FAIL


def audit_B1(model: ExpMapModel, N: int, consts: ShrinkingConstants,
             samples: int = 500, seed: int = 1) -> AuditResult:
    """Fresh-sample validation of the prepend contraction bound."""
    worst = validate_shrinking_constants(model, N, consts, samples, seed)
    worst = math.exp(worst) - 1.0 if math.isfinite(worst) else worst
    return AuditResult(axiom="B1", samples=samples, worst_violation=worst,
                       verdict=_verdict(worst),
                       notes=f"C_E={consts.C_E:.4g} lambda_E={consts.lambda_E:.4g}")


def audit_B1_natural(theta: float = 0.5, samples: int = 200,
                     seed: int = 1) -> AuditResult:
    """The natural shift metric satisfies the bound with equality."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(samples):
        s = random_itinerary(rng, 3)
        t = random_itinerary(rng, 3)
        n = int(rng.integers(1, 9))
        u = tuple(int(x) for x in rng.integers(-3, 4, size=n))
        d = natural_metric(s, t, theta)
        d_p = natural_metric(prepend(u, s), prepend(u, t), theta)
        worst = max(worst, abs(d_p - theta**n * d))
    return AuditResult(axiom="B1", samples=samples, worst_violation=worst,
                       verdict=_verdict(worst), notes="natural metric, exact")


def audit_B2_mixing(model: ExpMapModel, N: int, delta_0: float,
                    pairs: int = 50, R: float = 5.0, n_cap: int = 8,
                    seed: int = 2) -> AuditResult:
    """For targets near 0-bar and arbitrary sources, find a word pulling
    the target into the delta_0-ball of the source."""
    rng = np.random.default_rng(seed)
    z0 = endpoint(model, ZERO).point
    found = 0
    tried = 0
    max_n = 0
    while tried < pairs:
        t = random_itinerary(rng, N)
        if abs(endpoint(model, t).point - z0) >= R:
            continue
        s = random_itinerary(rng, N)
        tried += 1
        for n in range(n_cap + 1):
            u = s.prefix(n)
            if induced_metric(model, prepend(u, t), s) < delta_0:
                found += 1
                max_n = max(max_n, n)
                break
    if found == tried:
        return AuditResult(axiom="B2", samples=tried, worst_violation=0.0,
                           verdict=PASS, notes=f"max n = {max_n}")
    return AuditResult(axiom="B2", samples=tried,
                       worst_violation=float(tried - found),
                       verdict=INCONCLUSIVE,
                       notes=f"{tried - found} pairs hit the n cap")


def snap_to_itinerary(model: ExpMapModel, z: complex,
                      depth_cap: int = 60) -> Itinerary | None:
    """Nearest resolvable itinerary to a plane point, by reading strip
    indices along the forward orbit until it leaves the tract."""
    symbols = []
    cur = z
    for _ in range(depth_cap):
        if cur.real <= model.tract_boundary:
            break
        symbols.append(model.strip_index(cur))
        if cur.real > 600.0:  # exp overflow guard; itinerary is resolved
            break
        cur = model.apply(cur)
    if not symbols:
        return None
    return Itinerary(tuple(symbols), (0,))


def audit_B3_chaining(model: ExpMapModel, N: int, delta: float,
                      C_E: float, samples: int = 100, ell_cap: int = 64,
                      seed: int = 3) -> AuditResult:
    """Chains with steps < delta' between pairs in a common ball, built by
    midpoint subdivision of the endpoint segment with snapping."""
    rng = np.random.default_rng(seed)
    delta_p = min(delta, delta / C_E)
    done = 0
    max_ell = 0
    failures = 0
    while done < samples:
        t = random_itinerary(rng, N)
        u = Itinerary((t[0],) + random_itinerary(rng, N).preperiod,
                      random_itinerary(rng, N).period)
        if t[0] != u[0] or induced_metric(model, t, u) >= delta:
            continue
        done += 1
        chain = _build_chain(model, t, u, delta_p, ell_cap)
        if chain is None:
            failures += 1
        else:
            max_ell = max(max_ell, len(chain) - 1)
    if failures == 0:
        return AuditResult(axiom="B3", samples=done, worst_violation=0.0,
                           verdict=PASS, notes=f"max ell = {max_ell}")
    return AuditResult(axiom="B3", samples=done,
                       worst_violation=float(failures),
                       verdict=INCONCLUSIVE,
                       notes=f"{failures} pairs failed to snap")


def _build_chain(model: ExpMapModel, t: Itinerary, u: Itinerary,
                 delta_p: float, ell_cap: int) -> list[Itinerary] | None:
    chain = [t, u]
    for _ in range(16):  # each round subdivides every too-long step
        pts = [endpoint(model, s).point for s in chain]
        gaps = [abs(a - b) for a, b in zip(pts, pts[1:])]
        if all(g < delta_p for g in gaps):
            return chain
        if len(chain) > ell_cap:
            return None
        new_chain = [chain[0]]
        for i, g in enumerate(gaps):
            if g >= delta_p:
                mid = 0.5 * (pts[i] + pts[i + 1])
                snapped = snap_to_itinerary(model, mid)
                if snapped is None:
                    return None
                new_chain.append(snapped)
            new_chain.append(chain[i + 1])
        if len(new_chain) == len(chain):
            return None
        chain = new_chain
    return None


def audit_density(model: ExpMapModel, N_max: int = 6, probes: int = 50,
                  depth_cap: int = 40, seed: int = 4) -> AuditResult:
    """Truncating an itinerary at growing depth approaches it in rho."""
    rng = np.random.default_rng(seed)
    unresolved = 0
    used_N = 0
    for _ in range(probes):
        s = random_itinerary(rng, N_max)
        eps = 10.0 ** rng.uniform(-8, -1)
        ok = False
        for d in range(1, depth_cap + 1):
            w = s.prefix(d)
            if induced_metric(model, s, Itinerary(w, (0,))) < eps:
                used_N = max(used_N, max((abs(x) for x in w), default=0))
                ok = True
                break
        if not ok:
            unresolved += 1
    if unresolved == 0:
        return AuditResult(axiom="density", samples=probes,
                           worst_violation=0.0, verdict=PASS,
                           notes=f"max N used = {used_N}")
    return AuditResult(axiom="density", samples=probes,
                       worst_violation=float(unresolved),
                       verdict=INCONCLUSIVE,
                       notes=f"{unresolved} probes hit the depth cap")


def audit_compactness(model: ExpMapModel, N: int, samples: int = 10_000,
                      seed: int = 5) -> AuditResult:
    """Proxy: the running sup of |endpoint| over Sigma_N stabilizes."""
    rng = np.random.default_rng(seed)
    sup = 0.0
    history = []
    for _ in range(samples):
        s = random_itinerary(rng, N)
        sup = max(sup, abs(endpoint(model, s).point))
        history.append(sup)
    growth = history[-1] - history[len(history) // 2]
    verdict = PASS if growth < 1e-6 else INCONCLUSIVE
    return AuditResult(axiom="compactness", samples=samples,
                       worst_violation=growth, verdict=verdict,
                       notes=f"proxy: sup |endpoint| = {sup:.6f}")


def run_all(model: ExpMapModel, N: int, consts: ShrinkingConstants,
            seed: int = 0) -> list[AuditResult]:
    return [
        audit_B1(model, N, consts, seed=seed + 1),
        audit_B2_mixing(model, N, consts.delta_0, seed=seed + 2),
        audit_B3_chaining(model, N, consts.delta_0, consts.C_E,
                          seed=seed + 3),
        audit_density(model, seed=seed + 4),
        audit_compactness(model, N, samples=2000, seed=seed + 5),
    ]
