# src/metrics/cost_report.py

"""
Tableau des coûts d'évaluation par étape (#f, #∇f, #∇²f)
"""

import json

import pandas as pd

from src.core.types import CostCounters

COLUMNS = ['#f', '#∇f', '#∇²f']


def merge_stage_counters(*maps) -> dict:
    """Somme étape par étape de plusieurs dictionnaires étape → CostCounters"""
    merged = {}
    for counters_by_stage in maps:
        for stage, counters in counters_by_stage.items():
            merged[stage] = merged[stage] + counters if stage in merged else counters.snapshot()
    return merged


class CostReport:
    """Vue tabulaire (pandas) des compteurs par étape"""

    def __init__(self, counters_by_stage: dict):
        self.counters = {stage: counters.snapshot() for stage, counters in counters_by_stage.items()}
        rows = [[c.n_f, c.n_grad, c.n_hvp] for c in self.counters.values()]
        self.table = pd.DataFrame(rows, index=pd.Index(list(self.counters), name='stage'), columns=COLUMNS)

    @property
    def empty(self) -> bool:
        return self.table.empty

    def total(self) -> CostCounters:
        total = CostCounters()
        for counters in self.counters.values():
            total = total + counters
        return total

    def to_text(self) -> str:
        if self.empty:
            return '(aucune étape)'
        return self.table.to_string()

    def to_dict(self) -> dict:
        return {stage: counters.as_dict() for stage, counters in self.counters.items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def cost_report(counters_by_stage: dict) -> CostReport:
    """
    Construit le tableau étape × (#f, #∇f, #∇²f)

    Args:
        counters_by_stage: dict étape → CostCounters

    Returns:
        CostReport
    """
    return CostReport(counters_by_stage)
