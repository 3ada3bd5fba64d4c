"""Seeded ensemble experiments, presets and CSV output.

Every sample is an independent task keyed by ``(alpha, size, sample index)``.
Random couplings depend only on the seed, the sample index and the pair of
sites, so results do not depend on how tasks are spread over worker
processes; aggregation always runs in sample-index order.
"""
import csv
import hashlib
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import bounds, ed, gaussian, negativity
from .errors import CapacityError, ValidationError
from .lattice import Lattice, bipartition, half_bipartition
from .models import CouplingSpec, heisenberg_couplings, hopping_matrix

KINDS = ("clustering", "mutual-info", "negativity", "tfd", "bounds", "oracle-check")
MODELS = ("fermion", "heisenberg")
CSV_HEADER = "experiment,alpha,N,samples,observable,x,mean,stderr,seconds"
# dense work beyond this many bytes is refused before any computation starts
MEMORY_BUDGET = 4 * 2 ** 30

PRESETS = {
    "fig2a": dict(kind="clustering", dimension=1, sizes=(1000,), samples=1000,
                  alphas=(0.5, 1.0, 1.5, 2.0, 2.5, 3.0)),
    "fig2b": dict(kind="clustering", dimension=2, sizes=(40,), samples=1000,
                  alphas=(0.5, 1.0, 1.5, 2.0, 2.5, 3.0)),
    "fig2c": dict(kind="mutual-info", dimension=1, sizes=(100, 200, 400, 600, 800, 1000),
                  samples=1000, alphas=(0.5, 1.0, 1.5, 2.0, 2.5, 3.0)),
    "fig2d": dict(kind="mutual-info", dimension=2, sizes=(8, 16, 24, 32, 40),
                  samples=1000, alphas=(0.5, 1.0, 1.5, 2.0, 2.5, 3.0)),
    "fig4a": dict(kind="negativity", dimension=1, sizes=(100, 200, 400, 600, 800, 1000),
                  samples=1000, alphas=(0.5, 1.0, 1.5, 2.0, 2.5, 3.0)),
    "fig4b": dict(kind="negativity", dimension=2, sizes=(8, 12, 16, 20, 24),
                  samples=1000, alphas=(0.5, 1.0, 1.5, 2.0, 2.5, 3.0)),
    "figS5": dict(kind="mutual-info", model="heisenberg", dimension=1, sizes=(4, 6, 8, 10),
                  samples=2000, alphas=(0.5, 1.0, 1.5, 2.0, 2.5)),
}


def _parse_floats(text):
    return tuple(float(v) for v in str(text).replace(" ", "").split(",") if v)


def _parse_ints(text):
    out = []
    for v in str(text).replace(" ", "").split(","):
        if not v:
            continue
        f = float(v)
        if f != int(f):
            raise ValidationError(f"expected an integer, got {v}")
        out.append(int(f))
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved description of one experiment.

    ``sizes`` are chain lengths in 1D and side lengths in 2D. ``amplitude``
    is the interval of the random coupling amplitudes. ``workers`` only
    changes how the work is scheduled, never the numbers produced.
    """
    kind: str
    alphas: tuple = (1.5,)
    sizes: tuple = (64,)
    dimension: int = 1
    model: str = "fermion"
    beta: float = 2.0
    samples: int = 10
    seed: int = 0
    amplitude: tuple = (0.0, 1.0)
    metric: str = "manhattan"
    u_variant: str = "lemma"
    out: str = None
    workers: int = 1
    preset: str = None
    scale: float = 1.0
    experiment: str = None

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        if self.kind not in KINDS:
            raise ValidationError(f"unknown experiment kind {self.kind!r}; choose from {KINDS}")
        if self.model not in MODELS:
            raise ValidationError(f"model must be one of {MODELS}, got {self.model!r}")
        alphas = _parse_floats(self.alphas) if isinstance(self.alphas, str) else tuple(
            float(a) for a in np.atleast_1d(self.alphas))
        sizes = _parse_ints(self.sizes) if isinstance(self.sizes, str) else tuple(
            int(s) for s in np.atleast_1d(self.sizes))
        if not alphas or any(not (np.isfinite(a) and a > 0) for a in alphas):
            raise ValidationError(f"alphas must be positive, got {alphas}")
        if not sizes or any(s < 2 for s in sizes):
            raise ValidationError(f"sizes must be integers >= 2, got {sizes}")
        set_("alphas", alphas)
        set_("sizes", sizes)
        if self.dimension not in (1, 2):
            raise ValidationError(f"dimension must be 1 or 2, got {self.dimension}")
        if self.model == "heisenberg" and self.dimension != 1:
            raise ValidationError("the Heisenberg model is implemented for chains only")
        if self.kind == "tfd" and self.model != "heisenberg":
            set_("model", "heisenberg")
        if self.kind == "tfd" and self.dimension != 1:
            raise ValidationError("tfd runs on Heisenberg chains only")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValidationError(f"beta must be positive and finite, got {self.beta}")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValidationError(f"samples must be a positive integer, got {self.samples}")
        set_("samples", int(self.samples))
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValidationError(f"seed must be a non-negative integer, got {self.seed}")
        set_("seed", int(self.seed))
        amp = _parse_floats(self.amplitude) if isinstance(self.amplitude, str) else tuple(
            float(a) for a in self.amplitude)
        if len(amp) != 2 or amp[0] > amp[1]:
            raise ValidationError(f"amplitude must be an interval lo,hi, got {self.amplitude}")
        set_("amplitude", amp)
        if self.metric not in ("manhattan", "euclidean"):
            raise ValidationError(f"metric must be manhattan or euclidean, got {self.metric!r}")
        if self.u_variant not in bounds.U_VARIANTS:
            raise ValidationError(f"u variant must be one of {bounds.U_VARIANTS}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ValidationError(f"workers must be a positive integer, got {self.workers}")
        set_("workers", int(self.workers))
        if not (np.isfinite(self.scale) and 0 < self.scale <= 1):
            raise ValidationError(f"scale must lie in (0, 1], got {self.scale}")
        if self.experiment is None:
            set_("experiment", self.preset or self.kind)
        self._check_sizes()

    def _check_sizes(self):
        for s in self.sizes:
            if self.kind in ("mutual-info", "negativity", "tfd", "bounds") and s % 2:
                raise ValidationError(f"half bipartitions need even sizes, got {s}")

    def lattice(self, size):
        return Lattice(self.dimension, size, self.metric)

    def coupling(self, alpha, sample=0):
        return CouplingSpec(alpha, self.amplitude, self.seed, sample)

    def to_text(self):
        """Flat ``key = value`` rendering; :meth:`from_text` reads it back."""
        lines = ["# resolved experiment configuration"]
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(x) if isinstance(x, float) else str(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {'' if v is None else v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, **overrides):
        raw = parse_config_text(text)
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**_coerce(raw))


def parse_config_text(text):
    """Parse flat ``key = value`` text; ``#`` starts a comment, blank values mean unset."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_NAMES:
            raise ValidationError(f"config line {lineno}: unknown key {key!r}")
        if value:
            out[key] = value
    return out


_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}
_INT_FIELDS = {"dimension", "samples", "seed", "workers"}
_FLOAT_FIELDS = {"beta", "scale"}


def _coerce(raw):
    out = {}
    for k, v in raw.items():
        if isinstance(v, str):
            try:
                if k in _INT_FIELDS:
                    f = float(v)
                    v = int(f) if f == int(f) else f
                elif k in _FLOAT_FIELDS:
                    v = float(v)
            except ValueError as exc:
                raise ValidationError(f"bad value for {k}: {v!r}") from exc
        out[k] = v
    return out


def _scale_size(size, scale, even):
    s = max(2, int(round(size * scale)))
    if even and s % 2:
        s += 1
    return s


def resolve_preset(name, scale=1.0, **overrides):
    """Config of a named preset with sizes and sample counts shrunk by ``scale``.

    Heisenberg presets keep their sizes (they are already exact-diagonalization
    sized) and only shrink the sample count.
    """
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    if not (np.isfinite(scale) and 0 < scale <= 1):
        raise ValidationError(f"scale must lie in (0, 1], got {scale}")
    base = dict(PRESETS[name])
    even = base["kind"] != "clustering"
    if base.get("model", "fermion") == "fermion":
        base["sizes"] = tuple(
            _scale_size(s, scale, even) for s in base["sizes"])
    base["samples"] = max(1, int(round(base["samples"] * scale)))
    base.update(beta=2.0, amplitude=(0.0, 1.0), preset=name, scale=float(scale))
    base.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**base)


# ------------------------------------------------------------ resources

def _dense_bytes(config, size):
    lat_sites = size ** config.dimension
    if config.model == "heisenberg" or config.kind == "tfd":
        return 6 * 16 * 4 ** lat_sites
    if config.kind == "oracle-check":
        return 8 * 16 * 4 ** lat_sites
    if config.kind == "negativity":
        return 40 * 16 * (2 * lat_sites) ** 2
    return 10 * 16 * lat_sites ** 2


def check_capacity(config):
    """Reject configurations that cannot run, with a resource estimate."""
    for size in config.sizes:
        n = size ** config.dimension
        if config.model == "heisenberg" or config.kind == "tfd":
            cap = ed.MAX_TFD if config.kind == "tfd" else ed.MAX_DENSE_STATE
            if n > cap:
                raise CapacityError(
                    f"{config.kind} on {n} spins exceeds the exact-diagonalization cap "
                    f"of {cap} (needs about {_dense_bytes(config, size) / 2 ** 30:.1f} GiB)")
        elif config.kind == "oracle-check":
            if n > ed.MAX_PTR:
                raise CapacityError(
                    f"oracle-check on {n} modes exceeds the dense partial-transpose cap "
                    f"of {ed.MAX_PTR} (map has {4 ** n:,} entries)")
        need = _dense_bytes(config, size)
        if need > MEMORY_BUDGET:
            raise CapacityError(
                f"{config.kind} at size {size} needs about {need / 2 ** 30:.1f} GiB "
                f"of dense matrices; budget is {MEMORY_BUDGET / 2 ** 30:.0f} GiB")


# ------------------------------------------------------------ per-sample work

def _clustering_geometry(lattice):
    side = lattice.extent
    if lattice.dimension == 1:
        origin = side // 4
        rmax = min(side - origin - 1, int(round(0.6 * side)))
        return origin, [(r,) for r in range(1, rmax + 1)]
    o = side // 4
    return (o, o), [(r, r) for r in range(1, side - o)]


def _sample_fermion(config, alpha, size, sample):
    lat = config.lattice(size)
    h = hopping_matrix(lat, config.coupling(alpha, sample))
    corr = gaussian.thermal_correlation_matrix(h, config.beta)
    out = []
    if config.kind == "clustering":
        origin, disp = _clustering_geometry(lat)
        for p in gaussian.two_point_sweep(corr, lat, origin, disp, alpha):
            r = float(p.displacement[0])
            out.append(("abs_corr", r, p.magnitude))
            out.append(("scaled_corr", r, p.scaled))
        return out
    part = half_bipartition(lat)
    if config.kind == "mutual-info":
        value, name = gaussian.gaussian_mutual_information(corr, part), "mutual_information"
    else:
        value, name = negativity.ssr_negativity(corr, part), "ssr_negativity"
    out.append((name, float(size), value))
    if config.dimension == 2:
        out.append((name + "_per_side", float(size), value / size))
    return out


def _sample_heisenberg(config, alpha, size, sample):
    lat = Lattice(1, size)
    couplings = heisenberg_couplings(lat, config.coupling(alpha, sample))
    h = ed.heisenberg_dense(couplings)
    part = half_bipartition(lat)
    mi = ed.mutual_information_ed(ed.gibbs_state(h, config.beta), part)
    out = [("mutual_information", float(size), mi)]
    if config.kind == "tfd":
        e = ed.tfd_entanglement_entropy(h, config.beta, part)
        out += [("tfd_entropy", float(size), e), ("tfd_slack", float(size), 2 * e - mi)]
    return out


def _sample_oracle(config, alpha, size, sample):
    lat = Lattice(1, size, config.metric)
    h = hopping_matrix(lat, config.coupling(alpha, sample))
    part = bipartition(lat, range(size // 2))
    corr = gaussian.thermal_correlation_matrix(h, config.beta)
    mi = gaussian.mutual_information_terms(corr, part).raw
    mi_fock = ed.fermion_fock_oracle(h, config.beta, part=part).mutual_information
    e = negativity.ssr_negativity_details(corr, part).raw
    e_dense = ed.dense_ssr_negativity(h.matrix, config.beta, part.subset_a)
    return [("delta_mi", float(size), abs(mi - mi_fock)),
            ("delta_ssr", float(size), abs(e - e_dense))]


def _sample_bounds(config, alpha, size, sample):
    lat = config.lattice(size)
    part = half_bipartition(lat)
    model = hopping_matrix(lat, config.coupling(alpha, sample))
    w = bounds.wolf_rhs(model, part, config.beta)
    return [("wolf_rhs_exact", float(size), w.exact),
            ("wolf_rhs_triangle", float(size), w.triangle)]


def _run_sample(task):
    config, alpha, size, sample = task
    t0 = time.perf_counter()
    if config.kind == "oracle-check":
        out = _sample_oracle(config, alpha, size, sample)
    elif config.kind == "bounds":
        out = _sample_bounds(config, alpha, size, sample)
    elif config.model == "heisenberg" or config.kind == "tfd":
        out = _sample_heisenberg(config, alpha, size, sample)
    else:
        out = _sample_fermion(config, alpha, size, sample)
    return out, time.perf_counter() - t0


def _deterministic_bounds(config, alpha, size):
    lat = config.lattice(size)
    params = bounds.BoundParams(alpha=alpha, beta=config.beta)
    u = bounds.u_factor(lat, alpha, variant=config.u_variant)
    bc = bounds.beta_c(params, u.value)
    t1 = bounds.theorem1_rhs(lat, half_bipartition(lat), params)
    pl = bounds.product_lemma_check(lat, alpha, params.g)
    x = float(size)
    return [("u", x, u.value), ("beta_c_simple", x, bc.simple),
            ("beta_c_lambert", x, bc.lambert), ("theorem1_rhs", x, t1.value),
            ("product_lemma_ratio", x, pl.max_ratio)]


# ------------------------------------------------------------ aggregation

@dataclass(frozen=True)
class ExperimentRow:
    experiment: str
    alpha: float
    N: int
    samples: int
    observable: str
    x: float
    mean: float
    stderr: float
    seconds: float

    def sort_key(self):
        return (self.alpha, self.x, self.N, self.observable)


@dataclass
class ExperimentResult:
    rows: list
    summary: dict = field(default_factory=dict)
    config: ExperimentConfig = None


def _stats(values):
    v = np.asarray(values, dtype=float)
    mean = float(np.mean(v))
    err = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return mean, err


def run_experiment(config):
    """Run every ``(alpha, size, sample)`` task and aggregate per observable.

    Returns an :class:`ExperimentResult` whose rows are sorted by
    ``(alpha, x)``; the summary carries kind-specific extremes (largest oracle
    discrepancy, smallest bound slack) and the total compute time.
    """
    check_capacity(config)
    groups = [(a, s) for a in config.alphas for s in config.sizes]
    tasks = [(config, a, s, k) for a, s in groups for k in range(config.samples)]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunk = max(1, len(tasks) // (4 * config.workers))
            results = list(pool.map(_run_sample, tasks, chunksize=chunk))
    else:
        results = [_run_sample(t) for t in tasks]

    rows = []
    summary = {"total_seconds": 0.0}
    for g, (alpha, size) in enumerate(groups):
        chunk = results[g * config.samples:(g + 1) * config.samples]
        seconds = float(sum(t for _, t in chunk))
        summary["total_seconds"] += seconds
        per_key = {}
        for out, _ in chunk:
            for name, x, value in out:
                per_key.setdefault((name, x), []).append(value)
        for (name, x), values in per_key.items():
            mean, err = _stats(values)
            rows.append(ExperimentRow(config.experiment, alpha, size, len(values),
                                      name, x, mean, err, seconds))
            if name.startswith("delta_"):
                key = "max_" + name
                summary[key] = max(summary.get(key, 0.0), float(np.max(values)))
            elif name.endswith("_slack"):
                key = "min_" + name
                summary[key] = min(summary.get(key, np.inf), float(np.min(values)))
        if config.kind == "bounds":
            t0 = time.perf_counter()
            det = _deterministic_bounds(config, alpha, size)
            dt = time.perf_counter() - t0
            rows += [ExperimentRow(config.experiment, alpha, size, 1, name, x, v, 0.0, dt)
                     for name, x, v in det]
    rows.sort(key=ExperimentRow.sort_key)
    return ExperimentResult(rows, summary, config)


# ------------------------------------------------------------ output

def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def format_csv(rows):
    buf = io.StringIO(newline="")
    buf.write(CSV_HEADER + "\n")
    for r in rows:
        buf.write(",".join(_fmt(getattr(r, f.name)) for f in fields(ExperimentRow)) + "\n")
    return buf.getvalue()


def emit_csv(rows, path):
    """Write rows as UTF-8 CSV with LF endings and 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_csv(rows))
    return path


def read_csv(path):
    """Read a file written by :func:`emit_csv` back into rows."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER.split(","):
            raise ValidationError(f"unexpected CSV header {reader.fieldnames}")
        return [ExperimentRow(r["experiment"], float(r["alpha"]), int(r["N"]),
                              int(r["samples"]), r["observable"], float(r["x"]),
                              float(r["mean"]), float(r["stderr"]), float(r["seconds"]))
                for r in reader]


def determinism_digest(rows):
    """SHA-256 of the CSV rendering with the wall-time column blanked."""
    blank = [replace(r, seconds=0.0) for r in rows]
    return hashlib.sha256(format_csv(blank).encode("utf-8")).hexdigest()


def write_outputs(result, path):
    """Write ``path`` (CSV) and ``path.config`` (resolved configuration echo)."""
    emit_csv(result.rows, path)
    with open(str(path) + ".config", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(result.config.to_text())
