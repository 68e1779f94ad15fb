"""Flat ``section.key=value`` configuration files and the experiment config."""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping

from .core import ValidationError
from .sampler import DEFAULT_B, SamplerConfig
from .simulate import DEFAULT_BURN_IN, DEFAULT_GAUSSIAN_SIGMA, DEFAULT_UNIFORM_A, STUDY_MODELS, InnovationSpec

INNOVATION_KINDS = ("uniform", "gaussian")
# yw: Yule-Walker path as in R's ar(); ols: conditional least squares on a common residual range
BASELINE_ESTIMATORS = ("yw", "ols")


def parse_kv(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment, blank lines are skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValidationError(f"line {lineno}: empty key")
        out[key] = value
    return out


def load_kv(path: str | Path) -> dict[str, str]:
    return parse_kv(Path(path).read_text())


def parse_list(value: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in value.split(",") if s.strip())


def parse_float(value: str) -> float:
    if "/" in value:
        num, den = value.split("/", 1)
        return float(num) / float(den)
    return float(value)


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"not a boolean: {value!r}")


_SAMPLER_KEYS = {
    "n_iter": int,
    "n_burn": int,
    "update_step": parse_float,
    "birth_proposal_scale": parse_float,
    "thin": int,
    "k_max": int,
    "move_probs": lambda v: tuple(parse_float(x) for x in parse_list(v)),
}


def sampler_overrides(kv: Mapping[str, str]) -> dict:
    out = {}
    for key, value in kv.items():
        if not key.startswith("sampler."):
            continue
        name = key.split(".", 1)[1]
        if name not in _SAMPLER_KEYS:
            raise ValidationError(f"unknown sampler option {key!r}")
        try:
            out[name] = _SAMPLER_KEYS[name](value)
        except ValueError as exc:
            raise ValidationError(f"{key}: {exc}") from None
    return out


def make_sampler_config(lam: float, b: float, overrides: Mapping, seed: int) -> SamplerConfig:
    return SamplerConfig(lam=lam, b=b, seed=seed, **dict(overrides))


@dataclass(frozen=True)
class ExperimentConfig:
    models: tuple[str, ...] = ("align1", "align2", "align3")
    innovations: tuple[str, ...] = INNOVATION_KINDS
    n_values: tuple[int, ...] = (100, 1000)
    replications: int = 20
    q: int = 20
    b: float = DEFAULT_B
    master_seed: int = 0
    a: float = DEFAULT_UNIFORM_A
    sigma: float = DEFAULT_GAUSSIAN_SIGMA
    burn_in: int = DEFAULT_BURN_IN
    timing: bool = False
    baseline: str = "yw"
    sampler: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.replications < 1:
            raise ValidationError("replications must be >= 1")
        for m in self.models:
            if m not in STUDY_MODELS:
                raise ValidationError(f"unknown model {m!r}")
        for i in self.innovations:
            if i not in INNOVATION_KINDS:
                raise ValidationError(f"unknown innovation {i!r}")
        if self.baseline not in BASELINE_ESTIMATORS:
            raise ValidationError(f"baseline must be one of {BASELINE_ESTIMATORS}, got {self.baseline!r}")
        if not self.models or not self.innovations or not self.n_values:
            raise ValidationError("models, innovations and n_values must be nonempty")
        for n in self.n_values:
            if n <= self.q + 1:
                raise ValidationError(f"n={n} too small for q={self.q}")
        self.innovation("uniform")
        self.innovation("gaussian")
        # validates the overrides
        make_sampler_config(1.0, self.b, self.sampler, 0)

    def innovation(self, kind: str) -> InnovationSpec:
        if kind == "uniform":
            return InnovationSpec("uniform", a=self.a)
        return InnovationSpec("gaussian", sigma=self.sigma)

    @classmethod
    def from_mapping(cls, kv: Mapping[str, str]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        args: dict = {}
        conv = {
            "models": parse_list, "innovations": parse_list,
            "n_values": lambda v: tuple(int(x) for x in parse_list(v)),
            "replications": int, "q": int, "master_seed": int, "burn_in": int,
            "b": parse_float, "a": parse_float, "sigma": parse_float, "timing": _bool, "baseline": str,
        }
        aliases = {"gibbs.b": "b", "innovation.a": "a", "innovation.sigma": "sigma",
                   "simulate.burn_in": "burn_in"}
        for key, value in kv.items():
            if key.startswith("sampler."):
                continue
            name = aliases.get(key)
            if name is None and key.startswith("experiment."):
                name = key.split(".", 1)[1]
            if name is None:
                continue
            if name not in known or name == "sampler":
                raise ValidationError(f"unknown experiment option {key!r}")
            try:
                args[name] = conv[name](value)
            except ValueError as exc:
                raise ValidationError(f"{key}: {exc}") from None
        args["sampler"] = sampler_overrides(kv)
        return cls(**args)
