"""Scenario generators and the Monte Carlo engine for empirical size and power.

Every replication draws from its own counter-based Philox stream keyed by
(master_seed, replication index), so results do not depend on scheduling
or on the number of worker threads.
"""
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .nullspec import NullSpec

GAUSSIAN = "gaussian"
GAMMA = "gamma"
FAMILIES = (GAUSSIAN, GAMMA)
NULL = "null"
ALT1 = "alt1"
ALT2 = "alt2"
HYPOTHESES = (NULL, ALT1, ALT2)

GAMMA_SHAPE = 4.0
GAMMA_SCALE = 0.5
ALT1_VARIANCE = 2.0
WILSON_Z = 1.959963984540054
SEED_BITS = 64
THREADS_ENV = "COVTEST_THREADS"


@dataclass(frozen=True)
class ScenarioSpec:
    family: str = GAUSSIAN
    n: int = 159
    p: int = 320
    hypothesis: str = NULL
    v0: float = 0.0
    mu0: float = 2.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.hypothesis not in HYPOTHESES:
            raise ValueError(f"hypothesis must be one of {HYPOTHESES}, got {self.hypothesis!r}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be an integer >= 1, got {self.p}")
        if not 0.0 <= self.v0 <= 1.0:
            raise ValueError(f"v0 must lie in [0, 1], got {self.v0}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "v0", float(self.v0))
        object.__setattr__(self, "mu0", float(self.mu0))

    @property
    def n_modified(self):
        """Number of leading components that differ from the null, [v0 p].

        Integer truncation; the tiny guard absorbs binary representation
        error such as 0.29 * 100 = 28.999999999999996.
        """
        if self.hypothesis == NULL:
            return 0
        return int(math.floor(self.v0 * self.p + 1e-9))

    @property
    def alt2_inflation(self):
        return 1.0 + 20.0 / math.sqrt(self.n * self.p)

    def variances(self):
        """Diagonal of the population covariance matrix."""
        var = np.ones(self.p)
        k = self.n_modified
        if self.hypothesis == ALT1:
            var[:k] = ALT1_VARIANCE  # Gamma(2, 1) also has variance 2
        elif self.hypothesis == ALT2:
            var[:k] = self.alt2_inflation
        return var


def split_seed(master_seed, rep):
    """128-bit Philox key for replication ``rep`` of ``master_seed``."""
    if not 0 <= master_seed < 1 << SEED_BITS:
        raise ValueError(f"master seed must be a {SEED_BITS}-bit unsigned integer")
    if rep < 0 or rep >= 1 << 64:
        raise ValueError("replication index out of range")
    return (int(master_seed) << 64) | int(rep)


def rng_for(rep_seed):
    return np.random.Generator(np.random.Philox(key=rep_seed))


def generate_sample(spec, rep_seed):
    """Draw one p x n sample for ``spec`` from the stream keyed by ``rep_seed``."""
    rng = rep_seed if isinstance(rep_seed, np.random.Generator) else rng_for(rep_seed)
    p, n, k = spec.p, spec.n, spec.n_modified
    if spec.family == GAUSSIAN:
        sd = np.sqrt(spec.variances())
        return spec.mu0 + sd[:, None] * rng.standard_normal((p, n))

    X = np.empty((p, n))
    if k:
        if spec.hypothesis == ALT1:
            X[:k] = rng.gamma(2.0, 1.0, (k, n))
        else:
            c = spec.alt2_inflation
            X[:k] = rng.gamma(GAMMA_SHAPE / c, c * GAMMA_SCALE, (k, n))
    X[k:] = rng.gamma(GAMMA_SHAPE, GAMMA_SCALE, (p - k, n))
    return X


def wilson_interval(successes, trials, z=WILSON_Z):
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def worker_count(workers=None):
    """Resolve the thread count: explicit argument, then $COVTEST_THREADS
    (0 meaning one per CPU), then 1."""
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        workers = int(raw) if raw else 1
    if workers < 0:
        raise ValueError("worker count must be >= 0")
    if workers == 0:
        workers = os.cpu_count() or 1
    return workers


@dataclass(frozen=True)
class SimulationReport:
    spec: ScenarioSpec
    test_name: str
    alpha: float
    replications: int
    rejections: int
    rate: float
    ci95: tuple
    master_seed: int
    elapsed: float

    CSV_HEADER = ("test", "family", "hypothesis", "n", "p", "v0", "alpha", "reps",
                  "rejections", "rate", "ci_low", "ci_high", "seed", "elapsed_s")

    def csv_row(self, timing=True):
        s = self.spec
        return (
            self.test_name, s.family, s.hypothesis, s.n, s.p, repr(s.v0), repr(self.alpha),
            self.replications, self.rejections, repr(self.rate), repr(self.ci95[0]),
            repr(self.ci95[1]), self.master_seed, f"{self.elapsed if timing else 0.0:.3f}",
        )


def _run_chunk(spec, test, null, master_seed, reps):
    out = []
    for r in reps:
        X = generate_sample(spec, split_seed(master_seed, r))
        out.append(test.compute(X, null))
    return out


def replicate(spec, test, reps, master_seed, null=None, workers=None):
    """Results of ``test`` on ``reps`` independent samples, in replication order."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    null = NullSpec.identity() if null is None else null
    workers = min(worker_count(workers), reps)
    if workers == 1:
        return _run_chunk(spec, test, null, master_seed, range(reps))
    bounds = np.linspace(0, reps, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_chunk, spec, test, null, master_seed, range(lo, hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
        ]
        results = []
        for fut in futures:
            results.extend(fut.result())
    return results


def run_monte_carlo(spec, test, alpha=0.05, reps=10_000, master_seed=0, null=None,
                    workers=None):
    """Empirical rejection rate of ``test`` at level ``alpha`` under ``spec``."""
    start = time.perf_counter()
    results = replicate(spec, test, reps, master_seed, null, workers)
    rejections = sum(1 for res in results if res.reject_at(alpha))
    return SimulationReport(
        spec=spec,
        test_name=test.name,
        alpha=float(alpha),
        replications=reps,
        rejections=rejections,
        rate=rejections / reps,
        ci95=wilson_interval(rejections, reps),
        master_seed=master_seed,
        elapsed=time.perf_counter() - start,
    )


def power_curve(spec, test, v0_grid, alpha=0.05, reps=10_000, master_seed=0, null=None,
                workers=None):
    """One report per v0 in ``v0_grid``; v0 = 0 reproduces the empirical size."""
    grid = list(v0_grid)
    if not grid:
        raise ValueError("v0 grid must be non-empty")
    if spec.hypothesis == NULL:
        raise ValueError("power curves need an alternative hypothesis (alt1 or alt2)")
    return [
        run_monte_carlo(replace(spec, v0=v0), test, alpha, reps, master_seed, null, workers)
        for v0 in grid
    ]
