"""DIMACS CNF parsing and instance-level features."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import ClauseCountMismatch, EmptyClause, EmptyInput, LiteralOutOfRange, NoHeader


@dataclass(frozen=True)
class CnfInstance:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


@dataclass(frozen=True)
class InstanceFeatures:
    num_vars: int
    num_clauses: int
    density: float
    clause_len_min: float
    clause_len_q1: float
    clause_len_median: float
    clause_len_q3: float
    clause_len_max: float
    total_literal_occurrences: int
    clause_len_fractions: dict[int, float]
    mean_literal_occurrence: float

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["clause_len_fractions"] = {str(k): v for k, v in sorted(self.clause_len_fractions.items())}
        return d


def parse_dimacs(text: str) -> CnfInstance:
    num_vars = declared = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):  # SATLIB end marker
            break
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf" or num_vars is not None:
                raise NoHeader(f"bad problem line: {line!r}")
            num_vars, declared = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise NoHeader("clause data before 'p cnf' header")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                if not current:
                    raise EmptyClause(len(clauses))
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > num_vars:
                raise LiteralOutOfRange(lit)
            else:
                current.append(lit)
    if num_vars is None:
        raise NoHeader("missing 'p cnf' header")
    if current:  # tolerate a missing final 0
        clauses.append(tuple(current))
    if len(clauses) != declared:
        raise ClauseCountMismatch(declared, len(clauses))
    return CnfInstance(num_vars, tuple(clauses))


def quartiles(values) -> tuple[float, float, float, float, float]:
    """(min, q1, median, q3, max) using linear interpolation between closest ranks."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptyInput("quartiles of an empty list")
    q = np.percentile(arr, [0, 25, 50, 75, 100], method="linear")
    return tuple(float(x) for x in q)


def mean_literal_occurrence(total_occurrences: int, num_vars: int) -> float:
    # averaged over the 2*L signed literals
    return total_occurrences / (2 * num_vars)


def instance_features(inst: CnfInstance) -> InstanceFeatures:
    lengths = [len(c) for c in inst.clauses]
    n = len(lengths)
    lo, q1, med, q3, hi = quartiles(lengths)
    total = sum(lengths)
    counts = Counter(lengths)
    return InstanceFeatures(
        num_vars=inst.num_vars,
        num_clauses=n,
        density=n / inst.num_vars,
        clause_len_min=lo,
        clause_len_q1=q1,
        clause_len_median=med,
        clause_len_q3=q3,
        clause_len_max=hi,
        total_literal_occurrences=total,
        clause_len_fractions={k: c / n for k, c in sorted(counts.items())},
        mean_literal_occurrence=mean_literal_occurrence(total, inst.num_vars),
    )
