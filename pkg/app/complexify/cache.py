import time
from typing import Any, Dict, Hashable, Iterable, Optional, Tuple


class CacheEntry:
    """
    A cached intersection result.
    """
    def __init__(self, operands: Tuple[Hashable, ...], result: Any):
        """
        Initialize a new cache entry.

        Args:
            operands: Canonical keys of the intersected subspaces
            result: The intersection
        """
        self.operands = operands
        self.result = result
        self.hits = 0
        self.last_accessed = time.monotonic()

    def update_access_time(self) -> None:
        self.hits += 1
        self.last_accessed = time.monotonic()


class IntersectionCache:
    """
    Cache of subspace intersections with LRU eviction.

    Intersection is commutative, so operands are keyed as a sorted tuple of
    canonical keys; the same set of subspaces in any order hits one entry.
    """
    def __init__(self, max_size: int = 4096):
        """
        Initialize the intersection cache.

        Args:
            max_size: Maximum number of entries to keep
        """
        self.cache: Dict[Tuple[Hashable, ...], CacheEntry] = {}
        self.max_size = max_size
        self.misses = 0

    def get(self, keys: Iterable[Hashable]) -> Optional[Any]:
        """
        Cached intersection of the subspaces with the given canonical keys.

        Returns:
            The cached subspace, or None
        """
        entry = self.cache.get(self._make_key(keys))
        if entry is None:
            self.misses += 1
            return None
        entry.update_access_time()
        return entry.result

    def set(self, keys: Iterable[Hashable], result: Any) -> None:
        """
        Store an intersection, evicting the least recently used entry when full.
        """
        cache_key = self._make_key(keys)
        self.cache[cache_key] = CacheEntry(cache_key, result)
        if len(self.cache) > self.max_size:
            self._evict_lru()

    def _evict_lru(self) -> None:
        if not self.cache:
            return
        lru_key = min(self.cache.keys(), key=lambda k: self.cache[k].last_accessed)
        del self.cache[lru_key]

    def _make_key(self, keys: Iterable[Hashable]) -> Tuple[Hashable, ...]:
        # exact and float keys never mix within one tuple, repr orders both
        return tuple(sorted(set(keys), key=repr))

    @property
    def hits(self) -> int:
        return sum(entry.hits for entry in self.cache.values())

    def clear(self) -> None:
        """
        Clear all entries from the cache.
        """
        self.cache = {}
        self.misses = 0

    def __len__(self) -> int:
        return len(self.cache)
