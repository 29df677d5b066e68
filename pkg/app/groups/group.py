"""
Finitely generated subgroups of O(n,1)↑ and reduced-word enumeration.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.errors import DimensionMismatch, EnumerationBudgetExceeded
from app.geometry.isometry import Isometry, validate
from app.geometry.lorentz import LorentzVec, VectorLike, _coords, check_on_H

logger = logging.getLogger(__name__)

IDENTITY_WORD = '1'
BUCKET_WIDTH = 1e-3


@dataclass(frozen=True)
class Letter:
    label: str
    matrix: np.ndarray
    inverse: int


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A group element with the shortest reduced word found for it."""
    word: str
    letters: Tuple[int, ...]
    matrix: np.ndarray

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def isometry(self) -> Isometry:
        return Isometry.unchecked(self.matrix, self.word)

    def apply(self, v: VectorLike) -> np.ndarray:
        return self.matrix @ _coords(v)


class GeneratedGroup:
    """
    Subgroup of O(n,1)↑ given by labeled generators.

    Inverse letters are added automatically with labels `label^-1`; an
    involutive generator is its own inverse letter.
    """

    def __init__(self, generators: Sequence[Union[Isometry, Tuple[str, np.ndarray]]],
                 tol: float = 1e-9):
        gens: List[Isometry] = []
        for i, g in enumerate(generators):
            if isinstance(g, Isometry):
                iso = g if g.label else Isometry(g.matrix, g.residual, f'g{i}')
            else:
                label, matrix = g
                iso = validate(matrix, tol=tol, label=label)
            gens.append(iso)
        if not gens:
            raise ValueError("A group needs at least one generator")
        labels = [g.label for g in gens]
        if len(set(labels)) != len(labels):
            raise ValueError(f"Generator labels must be unique, got {labels}")
        sizes = {g.size for g in gens}
        if len(sizes) != 1:
            raise DimensionMismatch(f"Generators have mixed sizes {sorted(sizes)}")
        self.generators = gens
        self.size = gens[0].size
        self.n = self.size - 1
        self.letters = self._build_letters(gens)

    @staticmethod
    def _build_letters(gens: List[Isometry]) -> List[Letter]:
        letters: List[Letter] = []
        for g in gens:
            M = g.matrix
            idx = len(letters)
            if np.max(np.abs(M @ M - np.eye(M.shape[0]))) <= 1e-9 * max(1.0, np.max(np.abs(M))) ** 2:
                letters.append(Letter(g.label, M, idx))
            else:
                inv = g.inverse().matrix
                letters.append(Letter(g.label, M, idx + 1))
                letters.append(Letter(f'{g.label}^-1', inv, idx))
        return letters

    @classmethod
    def from_definition(cls, definition, tol: float = 1e-9) -> 'GeneratedGroup':
        """Build a group from a validated GroupDefinition."""
        return cls([(gen.label, np.asarray(gen.matrix, dtype=float)) for gen in definition.generators], tol=tol)

    def conjugate(self, g: np.ndarray) -> 'GeneratedGroup':
        """The group g G g^-1 with the same labels."""
        g_inv = np.linalg.inv(g)
        return GeneratedGroup([Isometry.unchecked(g @ h.matrix @ g_inv, h.label) for h in self.generators])

    def word_matrix(self, word: str) -> np.ndarray:
        """Evaluate a '*'-separated word such as 'a*b^-1'."""
        M = np.eye(self.size)
        if word == IDENTITY_WORD:
            return M
        by_label = {letter.label: letter.matrix for letter in self.letters}
        for part in word.split('*'):
            if part not in by_label:
                raise ValueError(f"Unknown letter {part!r} in word {word!r}")
            M = M @ by_label[part]
        return M

    def element_table(self, max_len: int, dedup_tol: float = 1e-9, element_cap: int = 200_000) -> 'WordEnumerator':
        """An enumerator already extended to max_len; extend it further with extend_to."""
        table = WordEnumerator(self, dedup_tol, element_cap)
        table.extend_to(max_len)
        return table

    def __repr__(self) -> str:
        return f"GeneratedGroup(n={self.n}, generators={[g.label for g in self.generators]})"


class WordEnumerator:
    """
    Breadth-first enumeration of reduced words with matrix deduplication.

    Words are extended on the right; only elements not already present are
    extended further, which still reaches every element at its shortest
    length. Elements are identified when their matrices agree within
    dedup_tol·max(1, L)·max(1, |M|max).
    """

    def __init__(self, group: GeneratedGroup, dedup_tol: float = 1e-9, element_cap: int = 200_000):
        self.group = group
        self.dedup_tol = dedup_tol
        self.element_cap = element_cap
        identity = GroupElement(IDENTITY_WORD, (), np.eye(group.size))
        self.elements: List[GroupElement] = [identity]
        self.frontier: List[GroupElement] = [identity]
        self.length = 0
        self._buckets: Dict[Tuple[int, int], List[int]] = defaultdict(list)
        self._buckets[self._bucket_key(identity.matrix)].append(0)

    @property
    def exhausted(self) -> bool:
        """True once a length step produced no new element: the group is finite and fully listed."""
        return not self.frontier

    @staticmethod
    def _bucket_key(M: np.ndarray) -> Tuple[int, int]:
        return (int(np.floor(np.log(max(M[0, 0], 1.0)) / BUCKET_WIDTH)),
                int(np.floor(np.arcsinh(M[0, 1]) / BUCKET_WIDTH)))

    def find(self, M: np.ndarray, length: Optional[int] = None) -> Optional[GroupElement]:
        """Return the stored element equal to M within the dedup tolerance, if any."""
        L = self.length if length is None else length
        tol = self.dedup_tol * max(1, L) * max(1.0, float(np.max(np.abs(M))))
        k0, k1 = self._bucket_key(M)
        for d0 in (-1, 0, 1):
            for d1 in (-1, 0, 1):
                for idx in self._buckets.get((k0 + d0, k1 + d1), ()):
                    candidate = self.elements[idx]
                    if np.max(np.abs(candidate.matrix - M)) <= tol:
                        return candidate
        return None

    def extend_to(self, max_len: int) -> List[GroupElement]:
        """
        Enumerate words up to max_len and return the elements added by this call.

        Raises:
            EnumerationBudgetExceeded: If more than element_cap elements are produced
        """
        if max_len < 0:
            raise ValueError(f"max_len must be non-negative, got {max_len}")
        added: List[GroupElement] = []
        letters = self.group.letters
        while self.length < max_len and self.frontier:
            next_length = self.length + 1
            new_frontier: List[GroupElement] = []
            for element in self.frontier:
                last = element.letters[-1] if element.letters else None
                for i, letter in enumerate(letters):
                    if last is not None and letters[last].inverse == i:
                        continue
                    M = element.matrix @ letter.matrix
                    if self.find(M, next_length) is not None:
                        continue
                    letters_new = element.letters + (i,)
                    word = '*'.join(letters[j].label for j in letters_new)
                    new = GroupElement(word, letters_new, M)
                    self._buckets[self._bucket_key(M)].append(len(self.elements))
                    self.elements.append(new)
                    new_frontier.append(new)
                    added.append(new)
                    if len(self.elements) > self.element_cap:
                        raise EnumerationBudgetExceeded(
                            f"Word enumeration exceeded {self.element_cap} elements at length {next_length}"
                        )
            self.frontier = new_frontier
            self.length = next_length
            logger.debug(f"Length {next_length}: {len(new_frontier)} new elements, {len(self.elements)} total")
        return added


def enumerate_elements(G: GeneratedGroup, max_len: int, dedup_tol: float = 1e-9,
                       element_cap: int = 200_000) -> List[GroupElement]:
    """
    All distinct elements with reduced words of length <= max_len, identity first.

    Args:
        G: Generated group
        max_len: Maximum word length, at least 1
        dedup_tol: Base tolerance for identifying matrices
        element_cap: Budget on the number of elements

    Returns:
        Elements in breadth-first order, each with its shortest word

    Raises:
        ValueError: If max_len < 1
        EnumerationBudgetExceeded: If the cap is exceeded
    """
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    return list(G.element_table(max_len, dedup_tol, element_cap).elements)


def orbit(G: GeneratedGroup, x: VectorLike, max_len: int, dedup_tol: float = 1e-9,
          element_cap: int = 200_000) -> List[Tuple[GroupElement, LorentzVec]]:
    """
    Orbit points γx for enumerated γ, one pair per distinct point.

    Raises:
        NotOnHyperboloid: If x is off H
    """
    base = check_on_H(x, name='base point')
    pairs: List[Tuple[GroupElement, LorentzVec]] = []
    points: List[np.ndarray] = []
    for element in enumerate_elements(G, max_len, dedup_tol, element_cap):
        y = element.matrix @ base
        tol = dedup_tol * max(1, element.length) * max(1.0, float(np.max(np.abs(y))))
        if any(np.max(np.abs(y - p)) <= tol for p in points):
            continue
        points.append(y)
        pairs.append((element, LorentzVec(y)))
    return pairs
