"""Bounded-box minimisation of the tracking index over the four servo gains.

Two seeded, fully deterministic optimizers:

* :func:`fwa_minimize` - fireworks algorithm.  Each generation every firework
  emits explosion sparks whose count grows and amplitude shrinks with fitness
  quality, plus a handful of Gaussian mutation sparks; out-of-bounds
  coordinates are folded back by the mapping rule and the next generation is
  the best candidate plus a random fill (elite random selection).
* :func:`ga_minimize` - binary-coded genetic algorithm with roulette-wheel
  selection on rank weights, single-point crossover, per-bit mutation and
  one-elitism.

Both accept a :class:`~feeddrive.controller.GainBounds` or a plain sequence
of (lo, hi) pairs, and call the objective with a parameter vector.

RNG consumption order is fixed (initialisation draw, then per generation:
explosion draws in firework order, Gaussian draws, selection draw), so results
depend only on the seed, never on evaluation scheduling.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .controller import GainBounds

SELECTION_MODES = ("uniform", "distance")


def _bound_arrays(bounds) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(bounds, GainBounds):
        pairs = bounds.as_pairs()
    else:
        pairs = [(float(lo), float(hi)) for lo, hi in bounds]
    lo = np.array([p[0] for p in pairs])
    hi = np.array([p[1] for p in pairs])
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo <= hi)):
        raise ValueError(f"invalid bounds: lo={lo}, hi={hi}")
    return lo, hi


@dataclass(frozen=True)
class FwaConfig:
    """Fireworks settings; the defaults are the published parameter set
    (50 generations, 20 explosion sparks, 5 mutation sparks, 6 fireworks,
    amplitude 5)."""

    generations: int = 50
    n_fireworks: int = 6
    total_sparks: int = 20
    gauss_sparks: int = 5
    amplitude_max: float = 5.0
    spark_floor_frac: float = 0.04
    spark_ceil_frac: float = 0.8
    epsilon: float = 1e-12
    seed: int = 0
    selection: str = "uniform"

    def __post_init__(self):
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.n_fireworks < 2:
            raise ValueError("n_fireworks must be >= 2")
        if self.total_sparks < self.n_fireworks:
            raise ValueError("total_sparks must be >= n_fireworks")
        if not (0.0 < self.spark_floor_frac < self.spark_ceil_frac <= 1.0):
            raise ValueError("need 0 < spark_floor_frac < spark_ceil_frac <= 1")
        if self.gauss_sparks < 0 or self.amplitude_max <= 0 or self.epsilon <= 0:
            raise ValueError("gauss_sparks >= 0, amplitude_max > 0, epsilon > 0 required")
        if self.selection not in SELECTION_MODES:
            raise ValueError(f"selection must be one of {SELECTION_MODES}")


@dataclass(frozen=True)
class GaConfig:
    """Genetic-algorithm settings; defaults follow the published budget
    (50 generations, population 20, 10-bit genes)."""

    generations: int = 50
    population: int = 20
    gene_length_bits: int = 10
    crossover_rate: float = 0.8
    mutation_rate: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.population < 2 or self.population % 2:
            raise ValueError("population must be even and >= 2")
        if self.gene_length_bits < 1:
            raise ValueError("gene_length_bits must be >= 1")
        if not (0.0 <= self.crossover_rate <= 1.0 and 0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("rates must lie in [0, 1]")


@dataclass
class OptResult:
    """Best point found, its objective value, per-generation history and budget."""

    best_params: np.ndarray
    best_W: float
    history: list[float]
    evaluations: int
    seed: int
    algorithm: str
    config: dict = field(default_factory=dict)

    def to_json(self, param_names=("K_p", "K_vp", "K_vi", "K_fv")) -> str:
        payload = {
            "algorithm": self.algorithm,
            "best_W": self.best_W,
            "evaluations": self.evaluations,
            "seed": self.seed,
            "history": list(self.history),
            "config": self.config,
        }
        if len(self.best_params) == len(param_names):
            payload["gains"] = {n: float(v) for n, v in zip(param_names, self.best_params)}
        payload["best_params"] = [float(v) for v in self.best_params]
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _map_into_bounds(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Mapping rule: fold out-of-bounds coordinates as lo + |x - lo| mod (hi - lo)."""
    out = x.copy()
    span = hi - lo
    for d in range(x.shape[0]):
        if out[d] < lo[d] or out[d] > hi[d]:
            if span[d] == 0.0:
                out[d] = lo[d]
            else:
                out[d] = lo[d] + math.fmod(abs(out[d] - lo[d]), span[d])
    return out


def fwa_minimize(objective, bounds, cfg: FwaConfig = FwaConfig()) -> OptResult:
    """Minimise ``objective`` over the box with the fireworks algorithm.

    The objective must be total: every in-bounds vector yields a finite value
    (divergence penalties included).  Per generation, firework i with fitness
    f_i gets ``s_i ~ total_sparks * (worst - f_i + eps) / sum(...)`` explosion
    sparks (clamped to the floor/ceil fractions) of amplitude
    ``amplitude_max * (f_i - best + eps) / sum(...)``, scaled per dimension by
    that dimension's range; each spark displaces a random nonempty subset of
    dimensions by one shared U(-1, 1) draw of the scaled amplitude.  Gaussian
    sparks multiply a random dimension subset of a random firework by a single
    N(1, 1) draw.
    """
    lo, hi = _bound_arrays(bounds)
    dim = lo.shape[0]
    rng = np.random.default_rng(cfg.seed)
    evaluations = 0

    def ask(x: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        return float(objective(x))

    span = hi - lo
    range_max = float(np.max(span))
    dim_scale = span / range_max if range_max > 0 else np.ones(dim)

    fireworks = rng.uniform(lo, hi, size=(cfg.n_fireworks, dim))
    fitness = np.array([ask(fireworks[i]) for i in range(cfg.n_fireworks)])

    s_floor = int(round(cfg.spark_floor_frac * cfg.total_sparks))
    s_ceil = int(round(cfg.spark_ceil_frac * cfg.total_sparks))
    s_floor = max(s_floor, 1)

    history: list[float] = []
    for _ in range(cfg.generations):
        f_best = float(np.min(fitness))
        f_worst = float(np.max(fitness))
        gap_best = np.sum(fitness - f_best) + cfg.epsilon
        gap_worst = np.sum(f_worst - fitness) + cfg.epsilon

        candidates = [fireworks[i] for i in range(cfg.n_fireworks)]
        cand_fit = [float(fitness[i]) for i in range(cfg.n_fireworks)]

        for i in range(cfg.n_fireworks):
            s_i = cfg.total_sparks * (f_worst - fitness[i] + cfg.epsilon) / gap_worst
            s_i = int(round(min(max(s_i, s_floor), s_ceil)))
            A_i = cfg.amplitude_max * (fitness[i] - f_best + cfg.epsilon) / gap_best
            amp = A_i * dim_scale
            for _ in range(s_i):
                z = int(rng.integers(1, dim + 1))
                dims = rng.choice(dim, size=z, replace=False)
                u = rng.uniform(-1.0, 1.0)
                spark = fireworks[i].copy()
                spark[dims] += amp[dims] * u
                spark = _map_into_bounds(spark, lo, hi)
                candidates.append(spark)
                cand_fit.append(ask(spark))

        for _ in range(cfg.gauss_sparks):
            j = int(rng.integers(0, cfg.n_fireworks))
            z = int(rng.integers(1, dim + 1))
            dims = rng.choice(dim, size=z, replace=False)
            g = rng.normal(1.0, 1.0)
            spark = fireworks[j].copy()
            spark[dims] *= g
            spark = _map_into_bounds(spark, lo, hi)
            candidates.append(spark)
            cand_fit.append(ask(spark))

        # elite random selection: keep the best, fill the rest at random
        cand_fit_arr = np.array(cand_fit)
        elite = int(np.argmin(cand_fit_arr))
        if cfg.selection == "uniform":
            fill = rng.choice(len(candidates), size=cfg.n_fireworks - 1, replace=False)
        else:
            pts = np.array(candidates)
            dist = np.sum(np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2), axis=1)
            total = float(np.sum(dist))
            probs = dist / total if total > 0 else np.full(len(candidates), 1.0 / len(candidates))
            fill = rng.choice(len(candidates), size=cfg.n_fireworks - 1, replace=False, p=probs)

        keep = [elite] + [int(k) for k in fill]
        fireworks = np.array([candidates[k] for k in keep])
        fitness = cand_fit_arr[keep]
        history.append(float(cand_fit_arr[elite]))

    best = int(np.argmin(fitness))
    return OptResult(fireworks[best].copy(), float(fitness[best]), history,
                     evaluations, cfg.seed, "fwa", asdict(cfg))


def decode_chromosome(bits: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                      bits_per_param: int) -> np.ndarray:
    """MSB-first binary decode; all-zero bits map to ``lo``, all-one to ``hi``."""
    dim = lo.shape[0]
    denom = float(2 ** bits_per_param - 1)
    values = np.empty(dim)
    for d in range(dim):
        chunk = bits[d * bits_per_param:(d + 1) * bits_per_param]
        code = 0
        for b in chunk:
            code = (code << 1) | int(b)
        values[d] = lo[d] + (code / denom) * (hi[d] - lo[d])
    return values


def ga_minimize(objective, bounds, cfg: GaConfig = GaConfig()) -> OptResult:
    """Minimise ``objective`` with the binary-coded genetic algorithm."""
    lo, hi = _bound_arrays(bounds)
    dim = lo.shape[0]
    L = dim * cfg.gene_length_bits
    rng = np.random.default_rng(cfg.seed)
    evaluations = 0

    def ask(bits: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        return float(objective(decode_chromosome(bits, lo, hi, cfg.gene_length_bits)))

    pop = rng.integers(0, 2, size=(cfg.population, L), dtype=np.uint8)
    fit = np.array([ask(pop[i]) for i in range(cfg.population)])

    best_bits = pop[int(np.argmin(fit))].copy()
    best_W = float(np.min(fit))
    history: list[float] = []

    for _ in range(cfg.generations):
        # roulette wheel on rank weights: best rank gets weight = population
        order = np.argsort(fit, kind="stable")
        weights = np.empty(cfg.population)
        weights[order] = np.arange(cfg.population, 0, -1)
        probs = weights / weights.sum()

        children = [best_bits.copy()]  # one-elitism
        while len(children) < cfg.population:
            pa = pop[int(rng.choice(cfg.population, p=probs))].copy()
            pb = pop[int(rng.choice(cfg.population, p=probs))].copy()
            if rng.uniform() < cfg.crossover_rate:
                point = int(rng.integers(1, L))
                pa[point:], pb[point:] = pb[point:].copy(), pa[point:].copy()
            for child in (pa, pb):
                flips = rng.uniform(size=L) < cfg.mutation_rate
                child[flips] ^= 1
                if len(children) < cfg.population:
                    children.append(child)

        pop = np.array(children, dtype=np.uint8)
        fit = np.array([ask(pop[i]) for i in range(cfg.population)])
        gen_best = int(np.argmin(fit))
        if float(fit[gen_best]) < best_W:
            best_W = float(fit[gen_best])
            best_bits = pop[gen_best].copy()
        history.append(best_W)

    best_params = decode_chromosome(best_bits, lo, hi, cfg.gene_length_bits)
    return OptResult(best_params, best_W, history, evaluations, cfg.seed, "ga", asdict(cfg))


@dataclass(frozen=True)
class StabilityResult:
    """Best-W values over repeated seeded runs plus spread statistics."""

    values: tuple[float, ...]
    spread: float
    rel_spread: float

    @classmethod
    def from_values(cls, values) -> "StabilityResult":
        v = tuple(float(x) for x in values)
        spread = max(v) - min(v)
        mean = sum(v) / len(v)
        rel = spread / mean if mean != 0 else 0.0
        return cls(v, spread, rel)


def stability_trial(objective, bounds, algo: str = "fwa", repeats: int = 6,
                    base_seed: int = 0, fwa_cfg: FwaConfig = FwaConfig(),
                    ga_cfg: GaConfig = GaConfig()) -> StabilityResult:
    """Run the chosen optimizer ``repeats`` times with seeds base_seed + i
    and report the best-W spread across the runs."""
    if repeats < 2:
        raise ValueError("repeats must be >= 2")
    values = []
    for i in range(repeats):
        seed = base_seed + i
        if algo == "fwa":
            res = fwa_minimize(objective, bounds,
                               FwaConfig(**{**asdict(fwa_cfg), "seed": seed}))
        elif algo == "ga":
            res = ga_minimize(objective, bounds,
                              GaConfig(**{**asdict(ga_cfg), "seed": seed}))
        else:
            raise ValueError(f"unknown algorithm {algo!r}")
        values.append(res.best_W)
    return StabilityResult.from_values(values)
