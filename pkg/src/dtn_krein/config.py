"""Run configuration: plain-text ``key = value`` lines with dotted sections.

Example::

    # 16x16 anisotropic grid
    model.preset = anisotropic
    grid.nx = 16
    grid.ny = 16
    lambda.points = i, 2+i, -1, 0.5+0.25i
    tol.krein = 1e-10

Complex numbers accept either ``i`` or ``j`` as the imaginary unit.
"""
from dataclasses import dataclass, field, fields, replace
import re

from .errors import ConfigError

GRID_PRESETS = ("laplacian", "anisotropic", "affine", "table")
MATRIX_PRESETS = ("toy", "path3", "random", "decoupled", "rankdef")
RANDOM_PRESETS = ("random", "decoupled", "rankdef")
ALL_PRESETS = GRID_PRESETS + MATRIX_PRESETS

SUITES = ("identity", "representation", "gamma", "derivative", "nevanlinna",
          "stieltjes", "krein", "trace", "rank", "real_axis", "coupled")


@dataclass(frozen=True)
class Tolerances:
    krein: float = 1e-10
    trace: float = 1e-9
    identity: float = 1e-10
    singular: float = 1e-10
    symmetry: float = 1e-12
    positivity: float = 1e-12
    stieltjes: float = 1e-9
    gamma: float = 1e-10
    additivity: float = 1e-12
    flux: float = 1e-12


@dataclass(frozen=True)
class Sweep:
    re_min: float = -5.0
    re_max: float = 5.0
    re_count: int = 21
    im_min: float = 0.1
    im_max: float = 5.0
    im_count: int = 11
    real_count: int = 11


@dataclass(frozen=True)
class RunConfig:
    preset: str = "laplacian"
    a0: float = 0.0
    nx: int = 8
    ny: int = 8
    h: float | None = None
    layout: str = "bounded"
    inner: tuple | None = None
    table: str | None = None
    random_count: int = 3
    n_interior: int = 30
    n_boundary: int = 6
    complex_entries: bool = True
    points: tuple = (1j, 2 + 1j, -1 + 0j, 0.5 + 0.25j)
    anchor: complex = 2j
    eta: tuple = (1e2, 1e4, 1e6)
    sweep: Sweep = field(default_factory=Sweep)
    tol: Tolerances = field(default_factory=Tolerances)
    seed: int | None = None
    out_dir: str = "out"
    suites: frozenset = frozenset(SUITES)

    def validate(self):
        if self.preset not in ALL_PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {ALL_PRESETS}")
        for f in fields(Tolerances):
            v = getattr(self.tol, f.name)
            if not v > 0:
                raise ConfigError(f"tol.{f.name} must be > 0, got {v}")
        for name in ("re_count", "im_count", "real_count"):
            if getattr(self.sweep, name) < 1:
                raise ConfigError(f"sweep.{name} must be >= 1")
        if self.preset in RANDOM_PRESETS and self.seed is None:
            raise ConfigError(f"preset {self.preset!r} draws random models and needs a seed")
        if self.seed is not None and not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.preset == "table" and not self.table:
            raise ConfigError("preset 'table' needs coeffs.table")
        if self.random_count < 1 or self.n_interior < 1 or self.n_boundary < 1:
            raise ConfigError("random.count, random.n_interior, random.n_boundary must be >= 1")
        if not self.points:
            raise ConfigError("lambda.points must not be empty")
        if self.anchor.imag == 0:
            raise ConfigError("lambda.anchor must be nonreal")
        if any(e <= 0 for e in self.eta) or list(self.eta) != sorted(self.eta):
            raise ConfigError("characterize.eta must be positive and ascending")
        return self

    def canonical(self):
        """JSON-ready dict with a fixed key order."""
        def c(z):
            return {"re": z.real, "im": z.imag}
        return {
            "preset": self.preset, "a0": self.a0,
            "grid": {"nx": self.nx, "ny": self.ny, "h": self.h, "layout": self.layout,
                     "inner": list(self.inner) if self.inner else None},
            "table": self.table,
            "random": {"count": self.random_count, "n_interior": self.n_interior,
                       "n_boundary": self.n_boundary, "complex": self.complex_entries},
            "points": [c(z) for z in self.points],
            "anchor": c(self.anchor),
            "eta": list(self.eta),
            "sweep": {f.name: getattr(self.sweep, f.name) for f in fields(Sweep)},
            "tol": {f.name: getattr(self.tol, f.name) for f in fields(Tolerances)},
            "seed": self.seed,
            "suites": sorted(self.suites),
        }


_COMPLEX_RE = re.compile(r"^[0-9eE.+\-ij]+$")


def parse_complex(text):
    s = text.strip().replace(" ", "")
    if not s or not _COMPLEX_RE.match(s):
        raise ConfigError(f"not a complex number: {text!r}")
    s = s.replace("i", "j")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    s = re.sub(r"(?<=[+\-])j", "1j", s)
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"not a complex number: {text!r}") from None


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _list(text, conv):
    return tuple(conv(p) for p in text.split(",") if p.strip())


def _num(conv):
    def f(text):
        try:
            return conv(text.strip())
        except ValueError:
            raise ConfigError(f"bad number {text!r}") from None
    return f


_TOP = {
    "model.preset": ("preset", str.strip),
    "model.a0": ("a0", _num(float)),
    "grid.nx": ("nx", _num(int)),
    "grid.ny": ("ny", _num(int)),
    "grid.h": ("h", _num(float)),
    "grid.layout": ("layout", str.strip),
    "grid.inner": ("inner", lambda t: _list(t, _num(int))),
    "coeffs.table": ("table", str.strip),
    "random.count": ("random_count", _num(int)),
    "random.n_interior": ("n_interior", _num(int)),
    "random.n_boundary": ("n_boundary", _num(int)),
    "random.complex": ("complex_entries", _bool),
    "lambda.points": ("points", lambda t: _list(t, parse_complex)),
    "lambda.anchor": ("anchor", parse_complex),
    "characterize.eta": ("eta", lambda t: _list(t, _num(float))),
    "seed": ("seed", _num(int)),
    "output.dir": ("out_dir", str.strip),
}


def parse_config(text, base=None):
    """Parse config text into a validated :class:`RunConfig`."""
    cfg = base or RunConfig()
    top, sweep, tol = {}, {}, {}
    suites = set(cfg.suites)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in _TOP:
            name, conv = _TOP[key]
            top[name] = conv(value)
        elif key.startswith("sweep."):
            name = key[len("sweep."):]
            if name not in {f.name for f in fields(Sweep)}:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            sweep[name] = _num(int if name.endswith("_count") else float)(value)
        elif key.startswith("tol."):
            name = key[len("tol."):]
            if name not in {f.name for f in fields(Tolerances)}:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            tol[name] = _num(float)(value)
        elif key.startswith("suite."):
            name = key[len("suite."):]
            if name not in SUITES:
                raise ConfigError(f"line {lineno}: unknown suite {name!r}")
            (suites.add if _bool(value) else suites.discard)(name)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    cfg = replace(cfg, **top, sweep=replace(cfg.sweep, **sweep), tol=replace(cfg.tol, **tol),
                  suites=frozenset(suites))
    return cfg


def load_config(path=None, preset=None, seed=None, out_dir=None):
    """Read a config file (optional) and apply command-line overrides."""
    cfg = RunConfig()
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        cfg = parse_config(text, cfg)
    over = {}
    if preset is not None:
        over["preset"] = preset
    if seed is not None:
        over["seed"] = seed
    if out_dir is not None:
        over["out_dir"] = out_dir
    return replace(cfg, **over).validate()
