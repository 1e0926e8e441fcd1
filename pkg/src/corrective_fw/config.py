"""Declarative run configuration: a flat key=value file plus overrides."""

import math
from dataclasses import dataclass, fields

PROBLEMS = (
    "KSparseRegression",
    "BirkhoffProjection",
    "SplitBirkhoffBall",
    "AlmIntersection",
    "LogisticSocgs",
    "Custom",
)
ALGORITHMS = ("CFW", "LCFW", "SCG", "ALM", "SOCGS")
CORRECTORS = ("Pairwise", "QcLp", "QcMnp")

# Which algorithms make sense for which problem.
_COMPATIBLE = {
    "KSparseRegression": ("CFW", "LCFW"),
    "BirkhoffProjection": ("CFW", "LCFW"),
    "SplitBirkhoffBall": ("SCG",),
    "AlmIntersection": ("ALM",),
    "LogisticSocgs": ("SOCGS",),
    "Custom": (),
}


@dataclass
class RunConfig:
    """Everything a benchmark run needs; see README for the file schema."""

    problem: str = "KSparseRegression"
    algorithm: str = "CFW"
    corrector: str = "Pairwise"
    seed: int = 0
    n: int = 50
    m: int = 500
    k: int = 5
    tau: float = 1.0
    c: float = 0.9
    q: float = 0.1
    r: float = 1.0
    qc_interval: int = 10
    qc_warmup: int = 0
    qc_min_active_set: int = 2
    laziness_j: float = 2.0
    max_iterations: int = 1000
    time_limit_s: float = math.inf
    gap_tolerance: float = 1e-8
    inner_iterations: int = 100
    socgs_qc_warmup: int = 25
    block_update: str = "corrective"
    output_path: str = "trace.csv"

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_file(cls, path, overrides=()):
        config = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                config._assign(key.strip(), value.strip(), f"{path}:{lineno}")
        for item in overrides:
            key, _, value = item.partition("=")
            if not _:
                raise ValueError(f"override {item!r} is not key=value")
            config._assign(key.strip(), value.strip(), "override")
        return config

    def _assign(self, key, value, where):
        if key not in self.field_names():
            raise ValueError(f"{where}: unknown configuration key {key!r}")
        current = getattr(self, key)
        if isinstance(current, bool):
            parsed = value.lower() in ("1", "true", "yes")
        elif isinstance(current, int):
            parsed = int(value)
        elif isinstance(current, float):
            parsed = float(value)
        else:
            parsed = value
        setattr(self, key, parsed)

    def validate(self):
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.corrector not in CORRECTORS:
            raise ValueError(f"unknown corrector {self.corrector!r}")
        allowed = _COMPATIBLE[self.problem]
        if self.algorithm not in allowed:
            raise ValueError(
                f"algorithm {self.algorithm} does not run problem {self.problem}"
                + (f" (use one of {allowed})" if allowed else " (library API only)")
            )
        for name in ("n", "m", "k", "max_iterations", "inner_iterations", "seed"):
            if getattr(self, name) < 0 or (name != "seed" and getattr(self, name) == 0):
                raise ValueError(f"{name} must be positive")
        if self.k > self.n:
            raise ValueError("k must be <= n")
        if not 0.0 < self.q < 1.0:
            raise ValueError("q must lie in (0, 1)")
        if self.c < 0 or self.r <= 0 or self.tau <= 0:
            raise ValueError("c must be >= 0; r and tau must be > 0")
        if self.laziness_j < 1.0:
            raise ValueError("laziness_j must be >= 1")
        if self.block_update not in ("fw", "corrective"):
            raise ValueError("block_update must be 'fw' or 'corrective'")
        if self.gap_tolerance < 0 or self.time_limit_s <= 0:
            raise ValueError("gap_tolerance must be >= 0 and time_limit_s > 0")
        return self
