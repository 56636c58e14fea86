import json
import os

import pytest

from diracbox import assemble, build_grid, lambda1_2d

GOLDEN_PATH = os.path.join(os.path.dirname(__file__), "golden.json")


@pytest.fixture(scope="session")
def golden():
    with open(GOLDEN_PATH, encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def fm_cache():
    """One assembly per grid size for the whole session."""
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = assemble(build_grid(n))
        return cache[n]

    return get


@pytest.fixture(scope="session")
def solve_memo(fm_cache):
    """Memoized single-point solves shared across test modules."""
    memo = {}

    def solve(a, b, m, n, k=1, tol=1e-10, seed=0):
        key = (a, b, m, n, k, tol, seed)
        if key not in memo:
            memo[key] = lambda1_2d(a, b, m, n, tol, k=k, seed=seed,
                                   fm=fm_cache(n))
        return memo[key]

    return solve


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    """Keep CLI result caches out of the user's home directory."""
    monkeypatch.setenv("DIRACBOX_CACHE_DIR", str(tmp_path / "diracbox-cache"))
