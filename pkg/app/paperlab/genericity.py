"""
Randomized check that bisector triples are generically transversal.

Triples of enumerated elements that do not lie in one cyclic subgroup
should give a full-rank B(x) at almost every x. Separately, the fixed point
of each Cartan involution J should lie on Bis(x, Jx) and on no other
enumerated bisector.
"""
import itertools
import logging
import time
import uuid
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.errors import BasePointFixed
from app.geometry.bisector import b_map, numeric_rank, q_p_locus
from app.geometry.isometry import classify, is_cartan_involution
from app.geometry.lorentz import lorentz_form, random_points_on_H
from app.groups.diagnostics import class_K_audit
from app.groups.group import GeneratedGroup, GroupElement, enumerate_elements
from app.models.reports import ScanReport, ScanWitness
from app.utils.tracer import ScanTracer

logger = logging.getLogger(__name__)

TRIPLE_POOL_CAP = 50_000


def _close(M: np.ndarray, N: np.ndarray, tol: float) -> bool:
    return bool(np.max(np.abs(M - N)) <= tol * max(1.0, float(np.max(np.abs(M))), float(np.max(np.abs(N)))))


class CyclicScreen:
    """
    Decide whether a tuple of elements lies in a single cyclic subgroup.

    A tuple passes the screen when its members commute pairwise and are all
    powers g^k, 0 < |k| <= max_power, of one enumerated element g commuting
    with them.
    """

    def __init__(self, elements: Sequence[GroupElement], max_power: int = 8, tol: float = 1e-8):
        self.elements = [e for e in elements if not e.is_identity]
        self.max_power = max_power
        self.tol = tol
        self._powers: Dict[int, List[np.ndarray]] = {}

    def _powers_of(self, i: int) -> List[np.ndarray]:
        if i not in self._powers:
            M = self.elements[i].matrix
            M_inv = np.linalg.inv(M)
            powers, forward, backward = [], np.eye(M.shape[0]), np.eye(M.shape[0])
            for _ in range(self.max_power):
                forward, backward = forward @ M, backward @ M_inv
                powers.extend([forward, backward])
            self._powers[i] = powers
        return self._powers[i]

    def commute(self, M: np.ndarray, N: np.ndarray) -> bool:
        return _close(M @ N, N @ M, self.tol)

    def is_cyclic(self, members: Sequence[np.ndarray]) -> bool:
        if not all(self.commute(M, N) for M, N in itertools.combinations(members, 2)):
            return False
        for i, g in enumerate(self.elements):
            if not all(self.commute(g.matrix, M) for M in members):
                continue
            powers = self._powers_of(i)
            if all(any(_close(P, M, self.tol) for P in powers) for M in members):
                return True
        return False


def _triple_pool(rng: np.random.Generator, elements: Sequence[GroupElement], screen: CyclicScreen,
                 budget: int) -> Tuple[List[Tuple[int, int, int]], int]:
    """Up to budget non-cyclic index triples, and the number of cyclic triples screened out."""
    m = len(elements)
    if m < 3:
        return [], 0
    mats = [e.matrix for e in elements]
    if comb(m, 3) <= TRIPLE_POOL_CAP:
        all_triples = list(itertools.combinations(range(m), 3))
        pool = [t for t in all_triples if not screen.is_cyclic([mats[i] for i in t])]
        screened = len(all_triples) - len(pool)
        if not pool:
            return [], screened
        picks = rng.integers(0, len(pool), size=budget)
        return [pool[i] for i in picks], screened

    triples: List[Tuple[int, int, int]] = []
    screened = 0
    for _ in range(20 * budget):
        if len(triples) == budget:
            break
        t = tuple(sorted(int(i) for i in rng.choice(m, 3, replace=False)))
        if screen.is_cyclic([mats[i] for i in t]):
            screened += 1
            continue
        triples.append(t)
    return triples, screened


def _cartan_clause(elements: Sequence[GroupElement], points: np.ndarray, tol: float) -> Tuple[bool, List[dict]]:
    """
    For every Cartan involution J, its fixed point p lies on no enumerated bisector but Bis(x, Jx).

    J fixes p, so p is on Bis(x, Jx) for every x; any other element fixing p
    is a violation on its own.
    """
    records: List[dict] = []
    passed = True
    for J in elements:
        if J.is_identity or not is_cartan_involution(J.isometry(), tol):
            continue
        p = classify(J.isometry(), tol).fixed_point.coords
        violations: List[dict] = []
        for gamma in elements:
            if gamma.is_identity:
                continue
            try:
                normal = q_p_locus(gamma.matrix, p).normal.coords
            except BasePointFixed:
                if gamma is not J:
                    violations.append({'word': gamma.word, 'reason': 'fixes p'})
                continue
            values = np.abs(points @ lorentz_form(p.size) @ normal)
            scale = np.linalg.norm(points, axis=1) * np.linalg.norm(normal)
            on_locus = np.flatnonzero(values <= 1e-9 * scale)
            if len(on_locus):
                violations.append({'word': gamma.word, 'reason': 'p on a foreign bisector',
                                   'samples': on_locus.tolist()})
        passed &= not violations
        records.append({'word': J.word, 'fixed_point': p.tolist(), 'violations': violations})
    return passed, records


def genericity_scan(G: GeneratedGroup, max_len: int = 3, triples_budget: int = 1000, x_budget: int = 1,
                    seed: int = 0, tol: float = 1e-8, cartan_points: int = 100, klein_radius: float = 0.95,
                    max_witnesses: int = 5, tracer: Optional[ScanTracer] = None) -> ScanReport:
    """
    Sample (triple, x) pairs and count rank-deficient B(x).

    Args:
        G: Generated group
        max_len: Word length of the enumerated elements
        triples_budget: Number of non-cyclic triples sampled (with repetition)
        x_budget: Base points sampled per triple
        seed: Seed of the scan
        tol: Relative rank tolerance
        cartan_points: Base points for the Cartan clause
        klein_radius: Sampling radius in the Klein chart
        max_witnesses: Deficient samples kept as witnesses
        tracer: Optional JSON-lines tracer

    Returns:
        ScanReport whose hits are rank-deficient samples; details carry the
        full-rank fraction, the screened cyclic triples and the Cartan clause
    """
    if triples_budget < 1 or x_budget < 1:
        raise ValueError(f"Budgets must be >= 1, got {triples_budget}, {x_budget}")
    scan_id = str(uuid.uuid4())
    if tracer:
        tracer.trace_scan(scan_id, 'genericity', {'max_len': max_len, 'triples': triples_budget,
                                                  'points': x_budget, 'seed': seed})
    start = time.perf_counter()
    rng = np.random.default_rng(seed)

    elements = enumerate_elements(G, max_len)
    audit = class_K_audit(G, max_len, elements=elements)
    nontrivial = [e for e in elements if not e.is_identity]
    screen = CyclicScreen(nontrivial, max_power=3 * max_len, tol=tol)
    triples, screened = _triple_pool(rng, nontrivial, screen, triples_budget)

    witnesses: List[ScanWitness] = []
    deficient = 0
    trials = 0
    for triple in triples:
        mats = [nontrivial[i].matrix for i in triple]
        for x in random_points_on_H(rng, G.n, x_budget, klein_radius):
            trials += 1
            rank = numeric_rank(b_map(mats, x), tol)
            if rank < 3:
                deficient += 1
                if len(witnesses) < max_witnesses:
                    witnesses.append(ScanWitness(x=x.tolist(), value=float(rank),
                                                 words=[nontrivial[i].word for i in triple]))
    if not triples:
        logger.info("No non-cyclic triples among the enumerated elements; the triple scan is vacuous")

    cartan_passed, cartan = _cartan_clause(elements, random_points_on_H(rng, G.n, cartan_points, klein_radius), tol)
    duration_ms = (time.perf_counter() - start) * 1000
    logger.info(f"Genericity scan: {deficient}/{trials} rank-deficient samples, {screened} cyclic triples "
                f"screened, Cartan clause {'passed' if cartan_passed else 'failed'}")
    report = ScanReport(kind='genericity', trials=trials, hits=deficient, witnesses=witnesses, seed=seed,
                        duration_ms=duration_ms,
                        details={'max_len': max_len, 'element_count': len(elements),
                                 'full_rank_fraction': (trials - deficient) / trials if trials else None,
                                 'cyclic_screened': screened, 'class_k_passed': audit.passed,
                                 'cartan_passed': cartan_passed, 'cartan': cartan})
    if tracer:
        tracer.trace_results(scan_id, trials, deficient, duration_ms, witnesses)
    return report
