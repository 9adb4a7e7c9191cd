"""Job-shop instances: parsing, serialization, generation and bounds.

Two text formats are supported:

* ORLib: ``n m`` header, then one line per job with ``machine duration``
  pairs (machines 0-indexed).
* Taillard: ``n m`` header (optionally preceded by a descriptor line), an
  ``n x m`` duration matrix, then an ``n x m`` matrix of 1-indexed machines.

Internally machines are always 0-indexed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterator

import numpy as np

log = logging.getLogger(__name__)

# (job, position-in-route)
Op = tuple[int, int]


class InstanceFormatError(ValueError):
    """Malformed instance text; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Instance:
    name: str
    num_jobs: int
    num_machines: int
    # routes[j][k] = (machine, duration) of job j's k-th operation
    routes: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self) -> None:
        if self.num_jobs < 1 or self.num_machines < 1:
            raise ValueError("instance needs at least one job and one machine")
        if len(self.routes) != self.num_jobs:
            raise ValueError(f"expected {self.num_jobs} routes, got {len(self.routes)}")
        for j, route in enumerate(self.routes):
            if not route:
                raise ValueError(f"job {j} has no operations")
            for machine, duration in route:
                if not 0 <= machine < self.num_machines:
                    raise ValueError(f"job {j}: machine {machine} outside [0, {self.num_machines})")
                if duration < 1:
                    raise ValueError(f"job {j}: duration {duration} < 1")
            machines = [mc for mc, _ in route]
            if len(set(machines)) != len(machines):
                log.warning("%s: job %d visits a machine more than once", self.name, j)

    @property
    def n(self) -> int:
        return self.num_jobs

    @property
    def m(self) -> int:
        return self.num_machines

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        """Flat index of each job's first operation (job-major numbering)."""
        out, k = [], 0
        for route in self.routes:
            out.append(k)
            k += len(route)
        return tuple(out)

    @property
    def num_ops(self) -> int:
        return sum(len(r) for r in self.routes)

    def ops(self) -> Iterator[Op]:
        for j, route in enumerate(self.routes):
            for k in range(len(route)):
                yield (j, k)

    def index(self, op: Op) -> int:
        return self.offsets[op[0]] + op[1]

    def op_at(self, idx: int) -> Op:
        j = int(np.searchsorted(self.offsets, idx, side="right")) - 1
        return (j, idx - self.offsets[j])

    def machine(self, op: Op) -> int:
        return self.routes[op[0]][op[1]][0]

    def duration(self, op: Op) -> int:
        return self.routes[op[0]][op[1]][1]

    @cached_property
    def arrays(self) -> "InstanceArrays":
        return InstanceArrays.build(self)


@dataclass(frozen=True)
class InstanceArrays:
    """Flat int64 views of an instance used by the compiled kernels."""

    dur: np.ndarray
    mach: np.ndarray
    jprev: np.ndarray
    jnext: np.ndarray
    # ops per machine
    mcount: np.ndarray

    @classmethod
    def build(cls, inst: Instance) -> "InstanceArrays":
        n_ops = inst.num_ops
        dur = np.empty(n_ops, np.int64)
        mach = np.empty(n_ops, np.int64)
        jprev = np.full(n_ops, -1, np.int64)
        jnext = np.full(n_ops, -1, np.int64)
        i = 0
        for route in inst.routes:
            for k, (mc, p) in enumerate(route):
                dur[i], mach[i] = p, mc
                if k > 0:
                    jprev[i] = i - 1
                    jnext[i - 1] = i
                i += 1
        mcount = np.bincount(mach, minlength=inst.num_machines).astype(np.int64)
        for a in (dur, mach, jprev, jnext, mcount):
            a.setflags(write=False)
        return cls(dur, mach, jprev, jnext, mcount)


@dataclass
class KnownBounds:
    """Instance name -> (lower bound, best-known upper bound)."""

    entries: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, (lb, ub) in self.entries.items():
            if lb > ub:
                raise ValueError(f"{name}: LB {lb} > UB {ub}")

    def __contains__(self, name: str) -> bool:
        return name.lower() in self.entries

    def __getitem__(self, name: str) -> tuple[int, int]:
        return self.entries[name.lower()]

    def get(self, name: str) -> tuple[int, int] | None:
        return self.entries.get(name.lower())

    def lb(self, name: str) -> int | None:
        e = self.get(name)
        return None if e is None else e[0]

    def ub(self, name: str) -> int | None:
        e = self.get(name)
        return None if e is None else e[1]

    @classmethod
    def parse(cls, text: str) -> "KnownBounds":
        entries = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            tokens = line.split("#", 1)[0].split()
            if not tokens:
                continue
            if len(tokens) != 3:
                raise InstanceFormatError("bounds line must be 'name LB UB'", lineno)
            try:
                lb, ub = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise InstanceFormatError("bounds must be integers", lineno) from None
            if lb > ub:
                raise InstanceFormatError(f"LB {lb} > UB {ub}", lineno)
            entries[tokens[0].lower()] = (lb, ub)
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path) -> "KnownBounds":
        return cls.parse(Path(path).read_text())


def _content_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        out.append((lineno, stripped.split()))
    return out


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise InstanceFormatError(f"non-integer token in {' '.join(tokens)!r}", lineno) from None


def _header(tokens: list[str], lineno: int) -> tuple[int, int]:
    if len(tokens) != 2:
        raise InstanceFormatError("header must be 'n m'", lineno)
    n, m = _ints(tokens, lineno)
    if n < 1 or m < 1:
        raise InstanceFormatError("header values must be positive", lineno)
    return n, m


def parse_orlib(text: str, name: str = "instance", *, drop_trailing_zeros: bool = False) -> Instance:
    """Parse OR-Library layout: ``n m`` then one line of ``machine duration`` pairs per job.

    ``drop_trailing_zeros`` accepts zero durations at the end of a job and drops
    those operations (they can always run last at no cost, so the optimum is
    unchanged).  One published benchmark file needs this.
    """
    lines = _content_lines(text)
    if not lines:
        raise InstanceFormatError("empty instance", None)
    lineno, tokens = lines[0]
    n, m = _header(tokens, lineno)
    if len(lines) - 1 < n:
        raise InstanceFormatError(f"expected {n} job lines, found {len(lines) - 1}", lines[-1][0])
    routes = []
    for lineno, tokens in lines[1 : n + 1]:
        values = _ints(tokens, lineno)
        if len(values) != 2 * m:
            raise InstanceFormatError(
                f"expected {m} 'machine duration' pairs, got {len(values)} values", lineno
            )
        route = []
        for mc, p in zip(values[::2], values[1::2]):
            if not 0 <= mc < m:
                raise InstanceFormatError(f"machine {mc} outside [0, {m})", lineno)
            if p < 0 or (p == 0 and not drop_trailing_zeros):
                raise InstanceFormatError(f"duration {p} <= 0", lineno)
            route.append((mc, p))
        while drop_trailing_zeros and route and route[-1][1] == 0:
            route.pop()
        if any(p == 0 for _, p in route):
            raise InstanceFormatError("zero duration before the end of a job", lineno)
        routes.append(tuple(route))
    if len(lines) - 1 > n:
        raise InstanceFormatError("trailing data after job lines", lines[n + 1][0])
    return Instance(name, n, m, tuple(routes))


def parse_taillard(text: str, name: str = "instance") -> Instance:
    lines = _content_lines(text)
    start = None
    for i, (_, tokens) in enumerate(lines):
        if len(tokens) == 2 and all(t.isdigit() for t in tokens):
            start = i
            break
    if start is None:
        raise InstanceFormatError("missing 'n m' header", None)
    n, m = _header(lines[start][1], lines[start][0])
    values: list[int] = []
    last_line = lines[start][0]
    for lineno, tokens in lines[start + 1 :]:
        values.extend(_ints(tokens, lineno))
        last_line = lineno
    if len(values) < 2 * n * m:
        raise InstanceFormatError(
            f"expected {2 * n * m} matrix entries, found {len(values)}", last_line
        )
    if len(values) > 2 * n * m:
        raise InstanceFormatError("trailing data after machine matrix", last_line)
    durations = np.array(values[: n * m]).reshape(n, m)
    machines = np.array(values[n * m :]).reshape(n, m)
    if (durations <= 0).any():
        raise InstanceFormatError("duration <= 0 in duration matrix", None)
    if (machines < 1).any() or (machines > m).any():
        raise InstanceFormatError(f"machine number outside [1, {m}]", None)
    routes = tuple(
        tuple((int(machines[j, k]) - 1, int(durations[j, k])) for k in range(m)) for j in range(n)
    )
    return Instance(name, n, m, routes)


def to_orlib(inst: Instance) -> str:
    lines = [f"# {inst.name}", f"{inst.num_jobs} {inst.num_machines}"]
    for route in inst.routes:
        lines.append("  ".join(f"{mc} {p}" for mc, p in route))
    return "\n".join(lines) + "\n"


def to_taillard(inst: Instance) -> str:
    if any(len(r) != inst.num_machines for r in inst.routes):
        raise ValueError("Taillard format needs every job to have exactly m operations")
    lines = [f"# {inst.name}", f"{inst.num_jobs} {inst.num_machines}"]
    lines += [" ".join(str(p) for _, p in r) for r in inst.routes]
    lines += [" ".join(str(mc + 1) for mc, _ in r) for r in inst.routes]
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path, fmt: str = "auto") -> Instance:
    path = Path(path)
    text = path.read_text()
    if fmt == "auto":
        fmt = "taillard" if path.stem.lower().startswith("ta") else "orlib"
    if fmt == "orlib":
        return parse_orlib(text, path.stem)
    if fmt == "taillard":
        return parse_taillard(text, path.stem)
    raise ValueError(f"unknown instance format {fmt!r}")


def benchmark_names() -> list[str]:
    folder = resources.files("jsp_tabu") / "data" / "instances"
    return sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".txt"))


def load_benchmark(name: str) -> Instance:
    """Load a bundled benchmark (``ft10``, ``la01``, ``ta01``, ...)."""
    name = name.lower()
    res = resources.files("jsp_tabu") / "data" / "instances" / f"{name}.txt"
    if not res.is_file():
        raise FileNotFoundError(f"no bundled benchmark named {name!r}")
    text = res.read_text()
    if name.startswith("ta"):
        return parse_taillard(text, name)
    return parse_orlib(text, name, drop_trailing_zeros=True)


def bundled_bounds() -> KnownBounds:
    return KnownBounds.parse((resources.files("jsp_tabu") / "data" / "bounds.txt").read_text())


def builtin_example() -> Instance:
    """The 3-job, 3-machine textbook example (machines re-encoded 0-indexed)."""
    return Instance(
        "example3x3",
        3,
        3,
        (
            ((0, 2), (1, 1), (2, 3)),
            ((0, 1), (2, 2), (1, 2)),
            ((1, 5), (0, 2), (2, 1)),
        ),
    )


def random_instance(
    num_jobs: int,
    num_machines: int,
    rng: np.random.Generator,
    max_duration: int = 20,
    name: str | None = None,
) -> Instance:
    """Uniform random instance; every job visits every machine once."""
    routes = []
    for _ in range(num_jobs):
        order = rng.permutation(num_machines)
        durs = rng.integers(1, max_duration + 1, size=num_machines)
        routes.append(tuple((int(mc), int(p)) for mc, p in zip(order, durs)))
    return Instance(name or f"rand{num_jobs}x{num_machines}", num_jobs, num_machines, tuple(routes))


def simple_lower_bound(inst: Instance) -> int:
    job_bound = max(sum(p for _, p in r) for r in inst.routes)
    loads = [0] * inst.num_machines
    for route in inst.routes:
        for mc, p in route:
            loads[mc] += p
    return max(job_bound, max(loads))
