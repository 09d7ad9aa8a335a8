import os
from dataclasses import dataclass, field


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    return int(raw)


@dataclass(frozen=True)
class Config:
    # cap on backtracking nodes visited by the brute-force enumerators
    brute_bound: int = field(default_factory=lambda: _env_int("MB_BRUTE_BOUND", 5_000_000))
    # exhaustive matroid separation scans 2^m subsets
    separation_bound: int = 20
    # exhaustive odd-set separation scans 2^n node subsets
    odd_set_bound: int = 14
    max_cut_rounds: int = 2000


DEFAULT = Config()


def default_config():
    # re-read the environment so MB_BRUTE_BOUND set after import is honoured
    return Config()
