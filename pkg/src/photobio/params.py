"""Run parameters: validation, config-file parsing, serialization.

The configuration format is plain ``key = value`` text, one pair per
line, with ``#`` comments.  Keys match the SimParams field names; the
aspect ratio is spelled ``lambda`` in files but stored as ``lam``.

Two pairs of keys are mutually exclusive: the photoresponse shape is
set by ``beta`` or by a target ``I_c`` (the other is derived), and the
Rayleigh number is set absolutely by ``R`` or as a multiple ``R_mult``
of the critical value.  ``lambda`` may be the keyword ``critical``.
R_mult and critical-lambda leave fields unresolved until the onset
problem has been solved; see ``needs_onset`` and ``with_onset``.
"""

import dataclasses
from dataclasses import dataclass, field

from .photoresponse import Photoresponse, calibrate_beta

_DEFAULTS = {
    "Sc": 20.0,
    "I_t": 0.8,
    "epsilon": 1e-5,
    "Nx": 128,
    "Nz": 64,
    "dt": 1e-3,
    "t_max": 5.0,
    "steady_tol": 1e-8,
    "sample_interval": 0.01,
    "snapshot_interval": 0.0,
}

_INT_KEYS = {"Nx", "Nz"}
_FLOAT_KEYS = {
    "Sc", "Vc", "kappa", "R", "R_mult", "I_t", "beta", "I_c",
    "epsilon", "dt", "t_max", "steady_tol", "sample_interval",
    "snapshot_interval",
}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | {"lambda"}


class ConfigError(ValueError):
    """Malformed configuration text or a parameter outside its bounds."""


@dataclass(frozen=True)
class SimParams:
    """All nondimensional control parameters plus numerical settings.

    Immutable; both members of each exclusive pair are stored once
    resolved (beta and I_c always, R and lam possibly None until the
    onset solve supplies R_c and lambda_c).
    """

    Vc: float
    kappa: float
    beta: float
    I_c: float
    Sc: float = _DEFAULTS["Sc"]
    I_t: float = _DEFAULTS["I_t"]
    R: float = None
    R_mult: float = None
    lam: float = None
    lam_critical: bool = False
    epsilon: float = _DEFAULTS["epsilon"]
    Nx: int = _DEFAULTS["Nx"]
    Nz: int = _DEFAULTS["Nz"]
    dt: float = _DEFAULTS["dt"]
    t_max: float = _DEFAULTS["t_max"]
    steady_tol: float = _DEFAULTS["steady_tol"]
    sample_interval: float = _DEFAULTS["sample_interval"]
    snapshot_interval: float = _DEFAULTS["snapshot_interval"]
    # keys the user actually supplied; everything else took a default
    given: frozenset = field(default=frozenset(), compare=False, repr=False)

    def __post_init__(self):
        _require(self.Sc > 0, "Sc", "must be > 0", self.Sc)
        _require(self.Vc >= 0, "Vc", "must be >= 0", self.Vc)
        _require(self.kappa >= 0, "kappa", "must be >= 0", self.kappa)
        _require(self.I_t > 0, "I_t", "must be > 0", self.I_t)
        _require(0 < self.I_c < self.I_t, "I_c", f"must lie in (0, I_t={self.I_t})", self.I_c)
        if self.R is not None:
            _require(self.R >= 0, "R", "must be >= 0", self.R)
        if self.R_mult is not None:
            _require(self.R_mult > 0, "R_mult", "must be > 0", self.R_mult)
        if self.lam is not None:
            _require(self.lam > 0, "lambda", "must be > 0", self.lam)
        _require(self.epsilon >= 0, "epsilon", "must be >= 0", self.epsilon)
        _require(self.Nx >= 8, "Nx", "grid too coarse, need >= 8", self.Nx)
        _require(self.Nz >= 8, "Nz", "grid too coarse, need >= 8", self.Nz)
        _require(self.dt > 0, "dt", "must be > 0", self.dt)
        _require(self.t_max > 0, "t_max", "must be > 0", self.t_max)
        _require(self.steady_tol > 0, "steady_tol", "must be > 0", self.steady_tol)
        _require(self.sample_interval > 0, "sample_interval", "must be > 0", self.sample_interval)
        _require(self.snapshot_interval >= 0, "snapshot_interval", "must be >= 0", self.snapshot_interval)

    @property
    def needs_onset(self):
        """True if R or lambda is still expressed relative to the onset point."""
        return self.R is None or self.lam is None

    def with_onset(self, R_c, lam_c):
        """Resolve R_mult and critical lambda against a computed onset point."""
        R = self.R if self.R is not None else self.R_mult * R_c
        lam = self.lam if self.lam is not None else lam_c
        return dataclasses.replace(self, R=R, lam=lam)

    def photoresponse(self):
        return Photoresponse(beta=self.beta, I_c=self.I_c)

    def defaulted_fields(self):
        """Config keys that fell back to defaults, for output metadata."""
        return sorted(k for k in _DEFAULTS if k not in self.given)


def _require(ok, name, rule, value):
    if not ok:
        raise ConfigError(f"{name} {rule} (got {value!r})")


def _parse_pairs(text):
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not val:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        pairs[key] = val
    return pairs


def _convert(key, val):
    if key in _INT_KEYS:
        try:
            return int(val)
        except ValueError:
            raise ConfigError(f"{key} must be an integer (got {val!r})") from None
    try:
        return float(val)
    except ValueError:
        raise ConfigError(f"{key} must be a number (got {val!r})") from None


def load_config(text, overrides=None):
    """Parse configuration text into a validated SimParams.

    ``overrides`` is an optional {key: value-string} mapping applied on
    top of the file contents (command-line flags take precedence).
    """
    pairs = _parse_pairs(text)
    for key, val in (overrides or {}).items():
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown override key {key!r}")
        pairs[key] = str(val)

    if "beta" in pairs and "I_c" in pairs:
        raise ConfigError("over-specified photoresponse: give beta or I_c, not both")
    if "beta" not in pairs and "I_c" not in pairs:
        raise ConfigError("photoresponse unspecified: give beta or I_c")
    if "R" in pairs and "R_mult" in pairs:
        raise ConfigError("over-specified Rayleigh number: give R or R_mult, not both")
    if "R" not in pairs and "R_mult" not in pairs:
        raise ConfigError("Rayleigh number unspecified: give R or R_mult")
    for key in ("Vc", "kappa"):
        if key not in pairs:
            raise ConfigError(f"required key {key!r} missing")

    kw = {}
    for key, val in pairs.items():
        if key == "lambda":
            continue
        name = key
        kw[name] = _convert(key, val)

    lam_raw = pairs.get("lambda", "critical")
    if lam_raw == "critical":
        kw["lam"], kw["lam_critical"] = None, True
    else:
        try:
            kw["lam"] = float(lam_raw)
        except ValueError:
            raise ConfigError(
                f"lambda must be a number or 'critical' (got {lam_raw!r})"
            ) from None

    # resolve the photoresponse pair; I_t enters the I_c bound check
    I_t = kw.get("I_t", _DEFAULTS["I_t"])
    if "I_c" in kw:
        _require(0 < kw["I_c"] < I_t, "I_c", f"must lie in (0, I_t={I_t})", kw["I_c"])
        kw["beta"] = calibrate_beta(kw["I_c"])
    else:
        kw["I_c"] = Photoresponse(beta=kw["beta"]).I_c

    return SimParams(given=frozenset(pairs), **kw)


def serialize(p):
    """Canonical config text; load_config(serialize(p)) == p.

    Emits the member of each exclusive pair that determines the state
    (the user-supplied one where that is recorded).
    """
    lines = []
    if "beta" in p.given or "I_c" not in p.given:
        lines.append(f"beta = {p.beta!r}")
    else:
        lines.append(f"I_c = {p.I_c!r}")
    # prefer resolved absolute values; fall back to the relative spelling
    if p.R is not None:
        lines.append(f"R = {p.R!r}")
    else:
        lines.append(f"R_mult = {p.R_mult!r}")
    if p.lam is not None:
        lines.append(f"lambda = {p.lam!r}")
    else:
        lines.append("lambda = critical")
    for key in ("Vc", "kappa", "Sc", "I_t", "epsilon", "Nx", "Nz", "dt",
                "t_max", "steady_tol", "sample_interval", "snapshot_interval"):
        lines.append(f"{key} = {getattr(p, key)!r}")
    return "\n".join(lines) + "\n"
