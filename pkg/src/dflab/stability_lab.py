"""Bounded search for destabilizing flag ideals.

The search space is every chain of monomial ideals drawn from a bounded
generator pool (degree and generator-count caps, chain length cap),
evaluated at each requested exponent.  Every record carries the exact
invariant or a diagnosis of why the pair (ideal, r) could not be decided;
pipeline mismatches are collected separately and are expected to be empty.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from multiprocessing import get_context

from .errors import (
    ConsistencyError,
    ExponentTooSmall,
    InvalidInput,
    NotStabilized,
)
from .monomial_algebra import MonomialIdeal, minimalize, validate_flag_ideal
from .weight_engine import FitOptions, evaluate


@dataclass(frozen=True)
class SearchBounds:
    n_max: int          # longest chain
    d_max: int          # max total degree of a generator
    g_max: int          # max number of generators per ideal
    r_list: tuple       # exponents to try
    mode: str = "chart"

    @staticmethod
    def from_json(obj):
        return SearchBounds(
            n_max=int(obj["N_max"]),
            d_max=int(obj["d_max"]),
            g_max=int(obj["g_max"]),
            r_list=tuple(int(r) for r in obj["r_list"]),
            mode=obj.get("mode", "chart"),
        )

    def to_json_dict(self):
        return {
            "N_max": self.n_max,
            "d_max": self.d_max,
            "g_max": self.g_max,
            "r_list": list(self.r_list),
            "mode": self.mode,
        }


def _exponent_vectors(nvars, d_max):
    out = []

    def rec(prefix, left):
        if len(prefix) == nvars:
            if any(prefix):
                out.append(tuple(prefix))
            return
        for x in range(left + 1):
            rec(prefix + [x], left - x)

    rec([], d_max)
    return sorted(out, key=lambda v: (sum(v), v))


def _point_supported(gens, nvars):
    for i in range(nvars):
        if not any(g[i] > 0 and all(g[j] == 0 for j in range(nvars) if j != i)
                   for g in gens):
            return False
    return True


def candidate_ideals(nvars, bounds):
    """All candidate monomial ideals inside the bounds, smallest first.

    Candidates are antichains (minimal generating sets) of nonzero
    exponent vectors.  In chart mode only point-supported ideals are kept,
    because only those define a finite-colength chart subscheme that the
    counting pipeline can consume.
    """
    vectors = _exponent_vectors(nvars, bounds.d_max)
    out = []
    for size in range(1, bounds.g_max + 1):
        for combo in combinations(vectors, size):
            if minimalize(combo) != tuple(sorted(combo, key=lambda g: (sum(g), g))):
                continue
            if bounds.mode == "chart" and not _point_supported(combo, nvars):
                continue
            out.append(MonomialIdeal.make(nvars, combo))
    # dedupe (different combos can minimalize to the same antichain, though
    # the antichain filter above already prevents that) and fix the order
    uniq = sorted(set(out), key=lambda i: (len(i.gens), i.gens))
    return uniq


def enumerate_flag_ideals(variety, bounds):
    """Every increasing chain of candidates with length up to N_max."""
    nvars = variety.dim if bounds.mode == "chart" else len(variety.polytope.facets)
    cands = candidate_ideals(nvars, bounds)
    chains = []

    def extend(chain):
        if chain:
            chains.append(tuple(chain))
        if len(chain) == bounds.n_max:
            return
        last = chain[-1] if chain else None
        for c in cands:
            if last is None or c.includes(last):
                extend(chain + [c])

    extend([])
    return chains


def search_space_size(variety, bounds):
    """Number of (chain, exponent) pairs the bounds span."""
    nvars = variety.dim if bounds.mode == "chart" else len(variety.polytope.facets)
    cands = candidate_ideals(nvars, bounds)
    m = len(cands)
    incl = [[cands[j].includes(cands[i]) for j in range(m)] for i in range(m)]
    # chains[k][i] = number of increasing chains of length k+1 ending at i
    prev = [1] * m
    total = m
    for _ in range(1, bounds.n_max):
        cur = [0] * m
        for i in range(m):
            for j in range(m):
                if incl[j][i]:
                    cur[j] += prev[i]
        prev = cur
        total += sum(cur)
    return total * len(bounds.r_list)


def preset_normal_cone(ideal):
    """Chain for the deformation to the normal cone of V(ideal)."""
    if ideal.is_zero or ideal.is_unit:
        raise InvalidInput("normal cone preset needs a proper nonzero ideal")
    return (ideal,)


# ---------------------------------------------------------------------------
# search driver

def record_key(mode, chain_gens, r, variety):
    payload = json.dumps({
        "mode": mode,
        "chain": [[list(g) for g in gens] for gens in chain_gens],
        "r": r,
        "vertices": [list(v) for v in variety.polytope.vertices],
        "chart": list(variety.chart_vertex),
    }, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _evaluate_task(task):
    """One search record; module level so worker processes can import it."""
    variety, mode, chain_gens, r, options = task
    nvars = variety.dim if mode == "chart" else len(variety.polytope.facets)
    chain = [MonomialIdeal.make(nvars, gens) for gens in chain_gens]
    key = record_key(mode, chain_gens, r, variety)
    rec = {
        "key": key,
        "mode": mode,
        "chain": [[list(g) for g in gens] for gens in chain_gens],
        "r": r,
        "status": "ok",
        "DF": None,
        "DF_intersection": None,
        "consistent": None,
        "trivial": False,
        "diagnosis": None,
    }
    try:
        flag = validate_flag_ideal(
            chain, mode=mode, variety=variety if mode == "cox" else None)
        report = evaluate(variety, flag, r, pipeline="both", options=options)
    except NotStabilized as exc:
        rec["status"] = "undecided"
        if exc.hint == "quasi_polynomial":
            rec["diagnosis"] = (
                "weights follow a period-%d quasi-polynomial; the exponent "
                "r=%d is too small for this ideal" % (exc.quasi_period, r))
        else:
            rec["diagnosis"] = "weights did not stabilize inside the sample cap"
        return rec
    except ExponentTooSmall as exc:
        rec["status"] = "undecided"
        rec["diagnosis"] = str(exc)
        return rec
    except ConsistencyError as exc:
        rec["status"] = "mismatch"
        rec["diagnosis"] = str(exc)
        return rec
    rec["trivial"] = report.trivial
    rec["DF"] = str(report.df)
    if report.decomposition is not None:
        rec["DF_intersection"] = str(report.decomposition.df)
    rec["consistent"] = report.consistent
    if report.notes:
        rec["diagnosis"] = "; ".join(report.notes)
    return rec


@dataclass
class SearchReport:
    bounds: SearchBounds
    records: list = field(default_factory=list)
    total: int = 0

    @property
    def decided(self):
        return [r for r in self.records if r["status"] == "ok"]

    @property
    def undecided(self):
        return [r for r in self.records if r["status"] == "undecided"]

    @property
    def mismatches(self):
        return [r for r in self.records if r["status"] == "mismatch"]

    @property
    def minimum(self):
        vals = [Fraction(r["DF"]) for r in self.decided]
        return min(vals) if vals else None

    @property
    def witness(self):
        best = None
        for r in self.decided:
            if best is None or Fraction(r["DF"]) < Fraction(best["DF"]):
                best = r
        return best

    @property
    def destabilizers(self):
        return [r for r in self.decided if Fraction(r["DF"]) < 0]

    def to_json_dict(self):
        out = {
            "bounds": self.bounds.to_json_dict(),
            "total": self.total,
            "records": self.records,
            "decided": len(self.decided),
            "undecided": len(self.undecided),
            "mismatches": len(self.mismatches),
            "minimum": str(self.minimum) if self.minimum is not None else None,
            "witness": self.witness,
            "destabilizers": [r["key"] for r in self.destabilizers],
        }
        return out


def search_destabilizers(variety, bounds, options=None, workers=1,
                         stream_path=None):
    """Evaluate every chain within bounds at every exponent in r_list.

    Results come back in a deterministic order regardless of worker count.
    With stream_path set, records are appended to a JSONL file as they
    finish, and existing records in the file are reused instead of being
    recomputed (resume semantics keyed by the content hash).
    """
    options = options or FitOptions()
    chains = enumerate_flag_ideals(variety, bounds)
    tasks = []
    for chain in chains:
        gens = tuple(i.gens for i in chain)
        for r in bounds.r_list:
            tasks.append((variety, bounds.mode, gens, r, options))

    done = {}
    if stream_path and os.path.exists(stream_path):
        with open(stream_path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                done[rec["key"]] = rec

    todo = []
    keys = []
    for task in tasks:
        key = record_key(task[1], task[2], task[3], task[0])
        keys.append(key)
        if key not in done:
            todo.append(task)

    stream = open(stream_path, "a") if stream_path else None
    try:
        if workers and workers > 1 and len(todo) > 1:
            ctx = get_context("fork")
            with ctx.Pool(workers) as pool:
                for rec in pool.imap(_evaluate_task, todo):
                    done[rec["key"]] = rec
                    if stream:
                        stream.write(json.dumps(rec, sort_keys=True) + "\n")
                        stream.flush()
        else:
            for task in todo:
                rec = _evaluate_task(task)
                done[rec["key"]] = rec
                if stream:
                    stream.write(json.dumps(rec, sort_keys=True) + "\n")
                    stream.flush()
    finally:
        if stream:
            stream.close()

    report = SearchReport(bounds=bounds, total=len(tasks))
    for key in keys:
        report.records.append(done[key])
    return report
