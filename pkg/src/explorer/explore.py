# src/explorer/explore.py

"""
Exploration de l'ensemble de Pareto en largeur d'abord

    x*_0 ← ParetoOptimize(x_0) ; q ← [x*_0]
    tant que |output| < N :
        x* ← q.pop()
        pour i = 1..K :
            v_i ← ParetoExpand(x*) ; x_i ← x* + s v_i
            x*_i ← ParetoOptimize(x_i)
            si aucun point de output ne domine x*_i : q ← x*_i ; output ← x*_i

Les coûts sont comptés par étape (expand / optimize).
"""

from __future__ import annotations

import queue
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from loguru import logger

from src.config.exploration import ExplorationConfig
from src.core.dominance import dominates, nondominated_filter
from src.core.exceptions import DegenerateSampleError, StalledError
from src.core.types import CostCounters, ParetoRecord, Stage, as_param_vector
from src.expansion.tangent import (
    BetaStrategy, MAX_RESAMPLES, expand_with_resampling, orient_direction,
)
from src.solvers.simplex import min_norm_alpha, project_simplex
from .optimizers import pareto_optimize_mgda, weighted_sum_gd

EXPAND = 'expand'
OPTIMIZE = 'optimize'


@dataclass(frozen=True)
class ExpandedPoint:
    """Point x* + s v avant ré-optimisation"""

    parent_id: int
    x: np.ndarray
    f: np.ndarray
    target_task: int
    child_id: Optional[int] = None


@dataclass
class ExplorationResult:
    records: list = field(default_factory=list)
    filtered: list = field(default_factory=list)
    expanded_points: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)
    expansions: int = 0
    rejected: int = 0
    stalled: int = 0
    partial: bool = False
    wall_time: float = 0.0


@dataclass
class _Outcome:
    child: Optional[ParetoRecord]
    expanded: ExpandedPoint
    target: int
    expand_counters: CostCounters
    optimize_counters: CostCounters


class ParetoExplorer:
    """
    Boucle d'exploration (file FIFO, budget N)

    Avec workers > 1, les K directions d'un nœud sont traitées dans un pool
    de threads ; chaque worker possède sa propre copie du problème.
    """

    def __init__(self, problem, config: ExplorationConfig = None):
        self.problem = problem
        self.config = config if config is not None else ExplorationConfig()
        self._seeds = np.random.SeedSequence(self.config.rng_seed)

    # ----- ParetoOptimize -----

    def optimize(self, problem, x, parent_id=None, f0=None) -> ParetoRecord:
        cfg = self.config
        if cfg.optimizer == 'weighted_sum_gd':
            trajectory = weighted_sum_gd(problem, x, cfg.weights, cfg.lr0, cfg.ws_iters, parent_id=parent_id)
            return replace(trajectory[-1], parent_id=parent_id)
        return pareto_optimize_mgda(problem, x, cfg.mgda_tol, cfg.mgda_max_iters, parent_id=parent_id, f0=f0)

    # ----- ParetoExpand -----

    def _tangent_step(self, problem, node, target, rng) -> np.ndarray:
        cfg = self.config
        grads = problem.gradients(node.x)
        alpha = min_norm_alpha(grads)
        strategy = BetaStrategy(cfg.beta_strategy)
        index = target if strategy is BetaStrategy.ONE_HOT else None
        direction = expand_with_resampling(problem, node.x, alpha, strategy, rng, cfg.k, cfg.use_correction,
                                           grads=grads, index=index, tol=cfg.minres_tol)
        direction = orient_direction(direction, grads, target)
        if direction.neutral:
            logger.debug(f"Direction neutre pour la tâche {target + 1} au nœud {node.id}")
        return node.x + cfg.s * direction.v

    def _weighted_sum_step(self, problem, node, target, rng) -> np.ndarray:
        """Baseline : α perturbé puis un pas de gradient sur Σ α'_i f_i"""
        cfg = self.config
        grads = problem.gradients(node.x)
        alpha = min_norm_alpha(grads).alpha
        for _ in range(MAX_RESAMPLES):
            perturbed = project_simplex(alpha + cfg.perturb_sigma * rng.standard_normal(problem.m))
            d = perturbed @ grads
            norm = np.linalg.norm(d)
            if norm > 0.0:
                return node.x - cfg.s * d / norm
        logger.error(f"❌ Direction WeightedSum nulle au nœud {node.id}")
        raise DegenerateSampleError("Combinaison de gradients nulle")

    def _direction_task(self, problem, node, target, seed_seq) -> _Outcome:
        rng = np.random.default_rng(seed_seq)
        expand_counters = CostCounters()
        optimize_counters = CostCounters()

        with problem.metered(expand_counters):
            if self.config.expansion == 'weighted_sum':
                x_child = self._weighted_sum_step(problem, node, target, rng)
            else:
                x_child = self._tangent_step(problem, node, target, rng)

        child = None
        with problem.metered(optimize_counters):
            f_child = problem.evaluate(x_child)
            try:
                child = self.optimize(problem, x_child, parent_id=node.id, f0=f_child)
            except StalledError as error:
                logger.warning(f"⚠️ Enfant du nœud {node.id} abandonné : {error}")

        expanded = ExpandedPoint(parent_id=node.id, x=x_child, f=f_child, target_task=target)
        return _Outcome(child, expanded, target, expand_counters, optimize_counters)

    # ----- boucle principale -----

    def run(self, x0) -> ExplorationResult:
        """
        Lance l'exploration depuis x0

        Returns:
            ExplorationResult (sortie brute, sortie filtrée, compteurs par étape)
        """
        cfg = self.config
        problem = self.problem
        start_time = time.perf_counter()
        x0 = as_param_vector(x0, problem.n)
        result = ExplorationResult(counters={EXPAND: CostCounters(), OPTIMIZE: CostCounters()})

        logger.info(f"🔄 Exploration de {problem.name} : s={cfg.s}, k={cfg.k}, K={cfg.K}, N={cfg.N}, "
                    f"expansion={cfg.expansion}")
        with problem.metered(result.counters[OPTIMIZE]):
            seed = self.optimize(problem, x0)
        seed = replace(seed, id=0, parent_id=None, stage=Stage.SEED)
        logger.success(f"✅ Graine optimisée : f = {np.round(seed.f, 6)}, résidu {seed.residual:.2e}")

        output = [seed]
        targets = {seed.id: 0}
        pending = deque([seed])
        pool = self._worker_pool()

        try:
            while pending and len(output) < cfg.N:
                node = pending.popleft()
                jobs = [((targets[node.id] + j) % problem.m, self._seeds.spawn(1)[0]) for j in range(cfg.K)]
                for outcome in self._run_jobs(pool, node, jobs):
                    result.expansions += 1
                    result.counters[EXPAND].absorb(outcome.expand_counters)
                    result.counters[OPTIMIZE].absorb(outcome.optimize_counters)
                    expanded = outcome.expanded

                    if outcome.child is None:
                        result.stalled += 1
                    elif len(output) >= cfg.N:
                        pass
                    elif any(dominates(record.f, outcome.child.f) for record in output):
                        result.rejected += 1
                        logger.info(f"📊 Enfant de {node.id} dominé : rejeté")
                    else:
                        child = replace(outcome.child, id=len(output), stage=Stage.OPTIMIZED)
                        output.append(child)
                        pending.append(child)
                        targets[child.id] = outcome.target
                        expanded = replace(expanded, child_id=child.id)
                        logger.info(f"📊 Enfant {child.id} (parent {node.id}) accepté : f = {np.round(child.f, 6)}")
                    result.expanded_points.append(expanded)
        finally:
            if pool is not None:
                pool.shutdown(wait=True)

        if len(output) < cfg.N:
            result.partial = True
            logger.warning(f"⚠️ File épuisée : {len(output)}/{cfg.N} solutions (résultat partiel)")

        result.records = output
        keep = nondominated_filter([record.f for record in output])
        result.filtered = [output[i] for i in keep]
        if len(keep) < len(output):
            logger.info(f"📊 Passe finale de dominance : {len(output) - len(keep)} solution(s) retirée(s)")

        result.wall_time = time.perf_counter() - start_time
        logger.success(f"✅ Exploration terminée : {len(output)} solutions, {result.expansions} expansions "
                       f"en {result.wall_time:.2f}s")
        return result

    # ----- parallélisme -----

    def _worker_pool(self):
        if self.config.workers <= 1:
            return None
        clones = queue.Queue()
        for _ in range(self.config.workers):
            clones.put(self.problem.spawn())
        self._clones = clones
        return ThreadPoolExecutor(max_workers=self.config.workers)

    def _run_jobs(self, pool, node, jobs) -> list:
        if pool is None:
            return [self._direction_task(self.problem, node, target, seed_seq) for target, seed_seq in jobs]

        def _job(target, seed_seq):
            clone = self._clones.get()
            try:
                return self._direction_task(clone, node, target, seed_seq)
            finally:
                self._clones.put(clone)

        futures = [pool.submit(_job, target, seed_seq) for target, seed_seq in jobs]
        return [future.result() for future in futures]


def explore(problem, x0, config: ExplorationConfig = None) -> list:
    """
    Exploration de Pareto depuis x0

    Returns:
        list de ParetoRecord (sortie brute dans l'ordre d'acceptation)
    """
    return ParetoExplorer(problem, config).run(x0).records
