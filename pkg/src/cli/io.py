# src/cli/io.py

"""
Lecture / écriture des sorties de run

- records.csv : une ligne par ParetoRecord (schéma pareto-records/v1)
- parameters.npz : vecteurs x par record (x_<id>)
- expanded.csv : points x* + s v avant ré-optimisation (schéma pareto-expanded/v1)
- samples.csv : échantillons de fronts (schéma pareto-samples/v1, ou pareto-patch-samples/v1 pour un patch)
- manifest.json : configuration, graine, compteurs, drapeau partial
"""

import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime

import numpy as np
import pandas as pd
from loguru import logger

from src.config import settings
from src.core.exceptions import UsageError
from src.core.types import ParetoRecord, Stage

RECORDS_SCHEMA = 'pareto-records/v1'
SAMPLES_SCHEMA = 'pareto-samples/v1'
PATCH_SAMPLES_SCHEMA = 'pareto-patch-samples/v1'
EXPANDED_SCHEMA = 'pareto-expanded/v1'
RECORDS_FILE = 'records.csv'
PARAMETERS_FILE = 'parameters.npz'
EXPANDED_FILE = 'expanded.csv'
MANIFEST_FILE = 'manifest.json'


@dataclass
class RunManifest:
    run_id: str
    command: str
    benchmark: str
    seed: int
    config: dict = field(default_factory=dict)
    version: str = settings.VERSION
    counters: dict = field(default_factory=dict)
    wall_time: float = 0.0
    partial: bool = True
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def create_run_dir(command, benchmark, seed, output_dir=None, suffix='') -> tuple:
    """
    Crée le dossier du run (nom horodaté, unique)

    Returns:
        tuple: (run_id, chemin du dossier)
    """
    output_dir = output_dir or settings.output_dir()
    date_str = datetime.now().strftime('%Y-%m-%d_%H-%M-%S')
    base = f"{command}_{benchmark}_seed{seed}{suffix}_{date_str}"
    run_id = base
    counter = 1
    while os.path.exists(os.path.join(output_dir, run_id)):
        run_id = f"{base}_{counter}"
        counter += 1
    run_dir = os.path.join(output_dir, run_id)
    os.makedirs(run_dir)
    return run_id, run_dir


def write_manifest(run_dir, manifest: RunManifest) -> str:
    filepath = os.path.join(run_dir, MANIFEST_FILE)
    with open(filepath, 'w', encoding='utf-8') as handle:
        json.dump(manifest.to_dict(), handle, indent=2, ensure_ascii=False)
    return filepath


def read_manifest(run_dir) -> dict:
    filepath = os.path.join(run_dir, MANIFEST_FILE)
    if not os.path.exists(filepath):
        raise UsageError(f"Manifeste introuvable : {filepath}")
    with open(filepath, 'r', encoding='utf-8') as handle:
        return json.load(handle)


def records_frame(records, run_id) -> pd.DataFrame:
    if not records:
        return pd.DataFrame(columns=['schema', 'run_id', 'record_id', 'parent_id', 'stage', 'residual'])
    m = records[0].f.size
    df = pd.DataFrame({
        'schema': RECORDS_SCHEMA,
        'run_id': run_id,
        'record_id': [record.id for record in records],
        'parent_id': pd.array([record.parent_id for record in records], dtype='Int64'),
        'stage': [Stage(record.stage).value for record in records],
        'residual': [record.residual for record in records],
    })
    for i in range(m):
        df[f"f_{i + 1}"] = [record.f[i] for record in records]
    return df


def save_records(run_dir, records, run_id) -> str:
    """
    Sauvegarde records.csv et parameters.npz

    Returns:
        str: Chemin du CSV
    """
    filepath = os.path.join(run_dir, RECORDS_FILE)
    df = records_frame(records, run_id)
    df.to_csv(filepath, index=False)
    np.savez(os.path.join(run_dir, PARAMETERS_FILE), **{f"x_{record.id}": record.x for record in records})
    logger.success(f"✅ {len(df)} record(s) sauvegardé(s): {filepath}")
    return filepath


def save_expanded(run_dir, expanded_points) -> str:
    if not expanded_points:
        return None
    m = expanded_points[0].f.size
    df = pd.DataFrame({
        'schema': EXPANDED_SCHEMA,
        'parent_id': [point.parent_id for point in expanded_points],
        'child_id': pd.array([point.child_id for point in expanded_points], dtype='Int64'),
        'target_task': [point.target_task + 1 for point in expanded_points],
    })
    for i in range(m):
        df[f"f_{i + 1}"] = [point.f[i] for point in expanded_points]
    filepath = os.path.join(run_dir, EXPANDED_FILE)
    df.to_csv(filepath, index=False)
    return filepath


def resolve_records_path(path) -> str:
    """Accepte un dossier de run ou un chemin vers records.csv"""
    if os.path.isdir(path):
        path = os.path.join(path, RECORDS_FILE)
    if not os.path.exists(path):
        raise UsageError(f"Fichier introuvable : {path}")
    return path


def load_records(path) -> tuple:
    """
    Relit un run : records (avec x depuis parameters.npz) et manifeste

    Returns:
        tuple: (liste de ParetoRecord, manifeste dict)
    """
    csv_path = resolve_records_path(path)
    run_dir = os.path.dirname(csv_path)
    try:
        df = pd.read_csv(csv_path)
    except pd.errors.EmptyDataError:
        raise UsageError(f"CSV vide : {csv_path}") from None
    if df.empty:
        raise UsageError(f"Aucun record dans {csv_path}")
    if 'schema' not in df.columns or (df['schema'] != RECORDS_SCHEMA).any():
        raise UsageError(f"Schéma inattendu dans {csv_path} (attendu {RECORDS_SCHEMA})")

    f_columns = sorted((c for c in df.columns if c.startswith('f_')), key=lambda c: int(c[2:]))
    params_path = os.path.join(run_dir, PARAMETERS_FILE)
    if not os.path.exists(params_path):
        raise UsageError(f"Paramètres introuvables : {params_path}")

    records = []
    with np.load(params_path) as params:
        for row in df.itertuples(index=False):
            parent = getattr(row, 'parent_id')
            records.append(ParetoRecord(
                id=int(row.record_id),
                x=params[f"x_{int(row.record_id)}"],
                f=np.array([getattr(row, c) for c in f_columns], dtype=np.float64),
                parent_id=None if pd.isna(parent) else int(parent),
                stage=row.stage,
            ))
    logger.info(f"📥 {len(records)} record(s) chargé(s) depuis {csv_path}")
    return records, read_manifest(run_dir)


def samples_frame(stitched) -> pd.DataFrame:
    """Échantillons d'un StitchedFront (segment, t, retained, f_1..f_m)"""
    frames = []
    for segment, (t_grid, samples, mask) in enumerate(zip(stitched.t_grids, stitched.samples, stitched.retained)):
        df = pd.DataFrame(samples, columns=[f"f_{i + 1}" for i in range(samples.shape[1])])
        df.insert(0, 'retained', mask)
        df.insert(0, 't', t_grid)
        df.insert(0, 'segment', segment)
        frames.append(df)
    df = pd.concat(frames, ignore_index=True)
    df.insert(0, 'schema', SAMPLES_SCHEMA)
    return df


def patch_samples_frame(r_grid, samples) -> pd.DataFrame:
    """Échantillons d'un patch (r_1..r_k, f_1..f_m)"""
    df = pd.DataFrame(r_grid, columns=[f"r_{j + 1}" for j in range(r_grid.shape[1])])
    for i in range(samples.shape[1]):
        df[f"f_{i + 1}"] = samples[:, i]
    df.insert(0, 'schema', PATCH_SAMPLES_SCHEMA)
    return df


def save_json(run_dir, filename, data) -> str:
    filepath = os.path.join(run_dir, filename)
    with open(filepath, 'w', encoding='utf-8') as handle:
        json.dump(data, handle, indent=2, ensure_ascii=False)
    return filepath
