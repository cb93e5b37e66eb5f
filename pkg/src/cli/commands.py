# src/cli/commands.py

"""
Ligne de commande : optimize, explore, front, hv

Codes de sortie : 0 succès, 1 échec numérique, 2 erreur d'usage / de validation.
Chaque commande écrit son manifeste (partial = true) avant les données,
puis le réécrit à la fin.
"""

import argparse
import itertools
import os
import sys
import time

import numpy as np
from loguru import logger

from src.benchmarks.registry import BENCHMARKS, build_benchmark
from src.config import settings
from src.config.exploration import EXPANSIONS, ExplorationConfig
from src.core.dominance import nondominated_filter
from src.core.exceptions import NumericError, StalledError, UsageError, ValidationError
from src.expansion.tangent import BetaStrategy
from src.explorer.explore import OPTIMIZE, ParetoExplorer
from src.explorer.front import (
    DEFAULT_GRID, PATCH_STEPS, StitchedFront, build_chain, build_patch, sample_patch, stitch_fronts,
)
from src.explorer.optimizers import pareto_optimize_mgda, weighted_sum_gd
from src.metrics.cost_report import cost_report
from src.metrics.hypervolume import MODES, MONTE_CARLO, HvConfig, default_reference, hv_monte_carlo, hypervolume
from . import io


def configure_logging(level=None):
    logger.remove()
    logger.add(sys.stderr, level=(level or settings.LOG_LEVEL).upper())


# ============================================
# PARSING
# ============================================

def parse_floats(text, label) -> list:
    try:
        return [float(value) for value in text.split(',') if value.strip()]
    except ValueError:
        raise UsageError(f"{label} : liste de nombres attendue, reçu '{text}'") from None


def parse_ints(text, label) -> list:
    try:
        return [int(value) for value in text.split(',') if value.strip()]
    except ValueError:
        raise UsageError(f"{label} : liste d'entiers attendue, reçu '{text}'") from None


def parse_weights(text, m) -> tuple:
    weights = parse_floats(text, '--w')
    if len(weights) != m:
        raise UsageError(f"--w : {m} poids attendus, reçu {len(weights)}")
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
        raise UsageError(f"--w : poids hors du simplexe {weights}")
    return tuple(weights)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='pareto', description="Exploration continue de fronts de Pareto")
    parser.add_argument('--log-level', default=None, help="Niveau de log (défaut : PARETO_LOG_LEVEL)")
    parser.add_argument('--out', default=None, help="Dossier de sortie (défaut : PARETO_OUTPUT_DIR)")
    subparsers = parser.add_subparsers(dest='command', required=True)

    def _common(sub):
        sub.add_argument('--bench', required=True, help=f"Benchmark ({', '.join(BENCHMARKS)})")
        sub.add_argument('--seed', type=int, default=0, help="Graine unique du run")

    optimize = subparsers.add_parser('optimize', help="ParetoOptimize depuis un point aléatoire")
    _common(optimize)
    optimize.add_argument('--opt', choices=['mgda', 'ws'], default='mgda')
    optimize.add_argument('--tol', type=float, default=1e-6)
    optimize.add_argument('--max-iters', type=int, default=5000)
    optimize.add_argument('--w', default=None, help="Poids de la somme pondérée, ex. 1,0")
    optimize.add_argument('--lr', type=float, default=0.005)
    optimize.add_argument('--iters', type=int, default=50)

    explore = subparsers.add_parser('explore', help="Exploration de l'ensemble de Pareto")
    _common(explore)
    explore.add_argument('--config', default=None, help="Fichier YAML d'ExplorationConfig")
    explore.add_argument('--s', default=None, help="Pas d'expansion (liste séparée par des virgules)")
    explore.add_argument('--k', default=None, help="Itérations MINRES (liste séparée par des virgules)")
    explore.add_argument('--K', type=int, default=None, help="Directions par nœud")
    explore.add_argument('--N', type=int, default=None, help="Nombre de solutions")
    explore.add_argument('--beta', choices=[s.value for s in BetaStrategy], default=None)
    explore.add_argument('--correct', action='store_true', default=None, help="Correction des gradients")
    explore.add_argument('--expansion', choices=list(EXPANSIONS), default=None)
    explore.add_argument('--workers', type=int, default=None)

    front = subparsers.add_parser('front', help="Paramétrisation continue et couture")
    front.add_argument('runs', nargs='+', help="Dossiers de run ou fichiers records.csv")
    front.add_argument('--stitch', action='store_true')
    front.add_argument('--grid', type=int, default=DEFAULT_GRID)
    front.add_argument('--evaluate', action='store_true', help="Évalue f(x(t)) avec l'oracle du benchmark")
    front.add_argument('--patch', type=int, default=None, metavar='CENTER_ID',
                       help="Patch du record CENTER_ID et de ses enfants (un seul run)")
    front.add_argument('--patch-steps', type=int, default=PATCH_STEPS, help="Pas 1/steps de la grille en r")

    hv = subparsers.add_parser('hv', help="Hypervolume d'un run")
    hv.add_argument('run', help="Dossier de run ou fichier records.csv")
    hv.add_argument('--ref', default=None, help="Point de référence, ex. 1.1,11")
    hv.add_argument('--mode', choices=list(MODES), default=None)
    hv.add_argument('--samples', type=int, default=1_000_000)
    hv.add_argument('--mc-seed', type=int, default=0)
    hv.add_argument('--seed-only', action='store_true', help="Hypervolume de la graine seule")
    hv.add_argument('--filtered', action='store_true', help="Ne garder que les records non dominés")

    return parser


# ============================================
# COMMANDES
# ============================================

def _start_run(args, command, benchmark, seed, config, suffix=''):
    run_id, run_dir = io.create_run_dir(command, benchmark, seed, args.out, suffix)
    manifest = io.RunManifest(run_id=run_id, command=' '.join(args.argv), benchmark=benchmark, seed=seed,
                              config=config)
    io.write_manifest(run_dir, manifest)
    return manifest, run_dir


def cmd_optimize(args) -> int:
    problem = build_benchmark(args.bench, args.seed)
    weights = None
    if args.opt == 'ws':
        if args.w is None:
            raise UsageError("--opt ws demande --w")
        weights = parse_weights(args.w, problem.m)
    config = {'opt': args.opt, 'tol': args.tol, 'max_iters': args.max_iters,
              'weights': list(weights) if weights else None, 'lr0': args.lr, 'iters': args.iters}

    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    x0 = problem.initial_point(rng)
    manifest, run_dir = _start_run(args, 'optimize', args.bench, args.seed, config)

    start = time.perf_counter()
    if args.opt == 'mgda':
        try:
            records = [pareto_optimize_mgda(problem, x0, args.tol, args.max_iters)]
        except StalledError as error:
            io.save_records(run_dir, [error.best], manifest.run_id)
            raise
    else:
        records = weighted_sum_gd(problem, x0, weights, args.lr, args.iters)

    io.save_records(run_dir, records, manifest.run_id)
    manifest.counters = {OPTIMIZE: problem.counters.as_dict()}
    manifest.wall_time = time.perf_counter() - start
    manifest.partial = False
    manifest.extra = {'problem': problem.describe(), 'final_residual': records[-1].residual}
    io.write_manifest(run_dir, manifest)
    logger.success(f"✅ Optimisation terminée : f = {np.round(records[-1].f, 6)}, "
                   f"résidu {records[-1].residual:.2e} ({run_dir})")
    return 0


def _exploration_config(args, k, s) -> ExplorationConfig:
    overrides = {'k': k, 's': s, 'K': args.K, 'N': args.N, 'beta_strategy': args.beta,
                 'use_correction': args.correct, 'expansion': args.expansion, 'workers': args.workers,
                 'rng_seed': args.seed}
    path = args.config
    if path is None and os.path.exists(settings.DEFAULT_CONFIG_PATH):
        path = settings.DEFAULT_CONFIG_PATH
    if path is not None:
        if not os.path.exists(path):
            raise UsageError(f"Configuration introuvable : {path}")
        return ExplorationConfig.from_yaml(path, **overrides)
    return ExplorationConfig().with_overrides(**overrides)


def cmd_explore(args) -> int:
    problem = build_benchmark(args.bench, args.seed)
    k_values = parse_ints(args.k, '--k') if args.k else [None]
    s_values = parse_floats(args.s, '--s') if args.s else [None]
    configs = [_exploration_config(args, k, s) for k, s in itertools.product(k_values, s_values)]
    sweep = len(configs) > 1

    for cfg in configs:
        suffix = f"_k{cfg.k}_s{cfg.s}" if sweep else ''
        manifest, run_dir = _start_run(args, 'explore', args.bench, args.seed, cfg.to_dict(), suffix)
        rng = np.random.default_rng(np.random.SeedSequence(args.seed))
        x0 = problem.initial_point(rng)

        explorer = ParetoExplorer(problem, cfg)
        try:
            result = explorer.run(x0)
        except StalledError as error:
            if error.best is not None:
                io.save_records(run_dir, [error.best], manifest.run_id)
            raise

        io.save_records(run_dir, result.records, manifest.run_id)
        io.save_expanded(run_dir, result.expanded_points)
        report = cost_report(result.counters)
        manifest.counters = report.to_dict()
        manifest.wall_time = result.wall_time
        manifest.partial = result.partial
        manifest.extra = {
            'problem': problem.describe(),
            'expansions': result.expansions,
            'rejected': result.rejected,
            'stalled': result.stalled,
            'filtered_ids': [record.id for record in result.filtered],
        }
        io.write_manifest(run_dir, manifest)
        logger.info(f"📊 Coûts par étape :\n{report.to_text()}")
        logger.success(f"✅ Run {manifest.run_id} : {len(result.records)} solution(s)")
    return 0


def _front_patch(args, records, benchmark, seed, problem) -> int:
    patch = build_patch(records, args.patch)
    r_grid, samples = sample_patch(patch, args.patch_steps, problem)

    manifest, run_dir = _start_run(args, 'front', benchmark, seed, {'patch': args.patch,
                                                                    'patch_steps': args.patch_steps,
                                                                    'evaluate': args.evaluate,
                                                                    'runs': list(args.runs)})
    io.patch_samples_frame(r_grid, samples).to_csv(os.path.join(run_dir, 'samples.csv'), index=False)
    io.save_json(run_dir, 'parametrization.json', {'segments': [patch.to_dict()],
                                                   'patch_steps': args.patch_steps})
    manifest.partial = False
    manifest.extra = {'segments': 1, 'children': len(patch.child_ids), 'samples': len(r_grid)}
    if problem is not None:
        manifest.counters = {'evaluate': problem.counters.as_dict()}
    io.write_manifest(run_dir, manifest)
    logger.success(f"✅ Patch {args.patch} : {len(r_grid)} échantillon(s) sauvegardé(s) ({run_dir})")
    return 0


def cmd_front(args) -> int:
    runs = [io.load_records(path) for path in args.runs]
    benchmarks = {manifest['benchmark'] for _, manifest in runs}
    if len(benchmarks) > 1:
        raise UsageError(f"Runs de benchmarks différents : {sorted(benchmarks)}")
    benchmark = benchmarks.pop()
    seed = runs[0][1].get('seed', 0)
    problem = build_benchmark(benchmark, seed) if args.evaluate else None

    if args.patch is not None:
        if len(runs) != 1:
            raise UsageError("--patch attend un seul run")
        return _front_patch(args, runs[0][0], benchmark, seed, problem)

    fronts = []
    for records, _ in runs:
        fronts.append(build_chain(records))

    if args.stitch:
        stitched = stitch_fronts(fronts, args.grid, problem)
    else:
        stitched = StitchedFront(segments=fronts)
        for front in fronts:
            single = stitch_fronts([front], args.grid, problem)
            stitched.t_grids += single.t_grids
            stitched.samples += single.samples
            stitched.retained += single.retained
            stitched.crop_log += single.crop_log

    manifest, run_dir = _start_run(args, 'front', benchmark, seed, {'stitch': args.stitch, 'grid': args.grid,
                                                                    'evaluate': args.evaluate,
                                                                    'runs': list(args.runs)})
    samples = io.samples_frame(stitched)
    samples.to_csv(os.path.join(run_dir, 'samples.csv'), index=False)
    io.save_json(run_dir, 'parametrization.json', {
        'segments': [front.to_dict() for front in fronts],
        'stitch_points': [vars(point) for point in stitched.stitch_points],
        'crop_log': [vars(entry) for entry in stitched.crop_log],
        'retained_measure': [stitched.retained_measure(i) for i in range(len(fronts))],
    })
    manifest.partial = False
    manifest.extra = {'segments': len(fronts), 'stitch_points': len(stitched.stitch_points)}
    if problem is not None:
        manifest.counters = {'evaluate': problem.counters.as_dict()}
    io.write_manifest(run_dir, manifest)
    logger.success(f"✅ {len(samples)} échantillon(s) de front sauvegardé(s) ({run_dir})")
    return 0


def cmd_hv(args) -> int:
    records, source = io.load_records(args.run)
    benchmark = source['benchmark']
    m = records[0].f.size
    if args.ref is not None:
        reference = parse_floats(args.ref, '--ref')
        if len(reference) != m:
            raise UsageError(f"--ref : {m} composantes attendues, reçu {len(reference)}")
    else:
        reference = list(default_reference(benchmark))
        logger.info(f"📊 Référence par défaut pour {benchmark} : {reference}")

    if args.seed_only:
        records = [record for record in records if record.parent_id is None]
    if args.filtered:
        records = [records[i] for i in nondominated_filter([record.f for record in records])]

    cfg = HvConfig(reference=tuple(reference), mode=args.mode, samples=args.samples, seed=args.mc_seed)
    manifest, run_dir = _start_run(args, 'hv', benchmark, source.get('seed', 0), {
        'run': args.run, 'reference': list(cfg.reference), 'mode': cfg.mode, 'seed_only': args.seed_only})

    points = [record.f for record in records]
    payload = {'mode': cfg.mode, 'reference': list(cfg.reference), 'points': len(points)}
    if cfg.mode == MONTE_CARLO:
        estimate = hv_monte_carlo(points, cfg.reference, cfg.samples, cfg.seed)
        value = estimate.value
        payload['std_error'] = estimate.std_error
    else:
        value = hypervolume(points, cfg)
    payload['hypervolume'] = value
    io.save_json(run_dir, 'hv.json', payload)
    manifest.partial = False
    manifest.extra = payload
    io.write_manifest(run_dir, manifest)
    print(f"{value:.12g}")
    return 0


COMMANDS = {
    'optimize': cmd_optimize,
    'explore': cmd_explore,
    'front': cmd_front,
    'hv': cmd_hv,
}


def main(argv=None) -> int:
    """
    Point d'entrée de la ligne de commande

    Returns:
        int: code de sortie (0, 1 ou 2)
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    args.argv = ['pareto'] + argv
    configure_logging(args.log_level)

    try:
        return COMMANDS[args.command](args)
    except ValidationError as error:
        logger.error(f"❌ {error}")
        return 2
    except NumericError as error:
        logger.error(f"❌ Échec numérique : {error}")
        return 1
