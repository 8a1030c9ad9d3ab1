import sys
from functools import lru_cache
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from boxops import graphs


@lru_cache(maxsize=None)
def family_members(tag: str, n: int, k: int, lo: int = 1):
    """Session-cached family enumeration, key-ascending."""
    return tuple(graphs.enumerate_family(graphs.Family(tag, lo), n, k))
