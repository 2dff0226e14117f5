"""Scenario description: arrays, targets, powers, budgets, seed.

The config file is YAML with nested sections (see configs/ for an annotated
reference).  Per-antenna SNR convention: p_max * E|gain|^2 / noise_power is
the linear SNR, with p_max normalized to 1 in the reference scenario; the
convention string is echoed into every emitted report so it can be revised
without touching code.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .priors import GainPrior, VonMisesPrior
from .ula import UlaSpec

__all__ = [
    "ConfigError",
    "MonteCarloBudgets",
    "TargetModel",
    "ScenarioConfig",
    "load_config",
    "save_config",
    "scenario_hash",
    "SNR_CONVENTION",
]

SNR_CONVENTION = "snr_linear = p_max * gain_second_moment / noise_power"


class ConfigError(ValueError):
    """Configuration problem; carries the offending field name."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field '{field_name}': {message}")
        self.field_name = field_name


@dataclass(frozen=True)
class MonteCarloBudgets:
    """Per-expectation sample/quadrature counts."""

    quad_points: int = 400
    sensing_draws: int = 10_000
    comm_draws: int = 1_000
    gauss_draws: int = 10_000
    saa_draws: int = 2_000

    def scaled(self, factor: float) -> "MonteCarloBudgets":
        """Multiply the Monte Carlo budgets (quadrature stays put), with
        floors that keep every consumer above its minimum sample count."""
        if not (factor > 0):
            raise ValueError("scale factor must be > 0")

        def s(n: int, floor: int) -> int:
            return max(floor, int(round(n * factor)))

        return MonteCarloBudgets(
            quad_points=self.quad_points,
            sensing_draws=s(self.sensing_draws, 100),
            comm_draws=s(self.comm_draws, 100),
            gauss_draws=s(self.gauss_draws, 100),
            saa_draws=s(self.saa_draws, 1_000),
        )


@dataclass(frozen=True)
class TargetModel:
    """One sensing target: angle prior, reflection-gain prior, comm flag."""

    angle_prior: VonMisesPrior
    gain_prior: GainPrior
    is_comm_user: bool = False


@dataclass(frozen=True)
class ScenarioConfig:
    tx: UlaSpec
    rx: UlaSpec
    ue: UlaSpec
    targets: tuple[TargetModel, ...]
    comm_gain: GainPrior
    sigma_s_sq: float
    sigma_c_sq: float
    p_max: float
    coherence_time: int
    budgets: MonteCarloBudgets = field(default_factory=MonteCarloBudgets)
    base_seed: int = 0
    rate_log_base: float = 2.0
    reference_kappa_post: float | None = None

    def __post_init__(self):
        if not self.targets:
            raise ValueError("at least one target is required")
        if self.coherence_time < 1:
            raise ValueError("coherence_time must be >= 1")
        for name, value in (
            ("sigma_s_sq", self.sigma_s_sq),
            ("sigma_c_sq", self.sigma_c_sq),
            ("p_max", self.p_max),
        ):
            if not (value > 0):
                raise ValueError(f"{name} must be > 0")
        if self.rate_log_base <= 1.0:
            raise ValueError("rate_log_base must be > 1")
        n_comm = sum(t.is_comm_user for t in self.targets)
        if n_comm != 1:
            raise ValueError("exactly one target must have is_comm_user = true")

    @property
    def num_targets(self) -> int:
        return len(self.targets)

    @property
    def comm_index(self) -> int:
        return next(i for i, t in enumerate(self.targets) if t.is_comm_user)

    @property
    def comm_target(self) -> TargetModel:
        return self.targets[self.comm_index]

    def with_comm_kappa(self, kappa: float) -> "ScenarioConfig":
        """Copy of the scenario with the comm target's concentration replaced."""
        targets = list(self.targets)
        t = targets[self.comm_index]
        prior = VonMisesPrior(t.angle_prior.mean_direction, kappa)
        targets[self.comm_index] = replace(t, angle_prior=prior)
        return replace(self, targets=tuple(targets))


def _require(section: dict, key: str, path: str):
    if key not in section:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return section[key]


def _to_dict(raw, path: str) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(path or "<root>", "expected a mapping")
    return raw


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse a scenario YAML file; raises ConfigError naming the bad field."""
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML: {exc}") from exc
    raw = _to_dict(raw, "")

    arr = _to_dict(_require(raw, "array", ""), "array")
    spacing = float(arr.get("spacing", 0.5))
    try:
        tx = UlaSpec(int(_require(arr, "tx_elements", "array")), spacing)
        rx = UlaSpec(int(_require(arr, "rx_elements", "array")), spacing)
        ue = UlaSpec(int(arr.get("ue_elements", 1)), spacing)
    except ValueError as exc:
        raise ConfigError("array", str(exc)) from exc

    ch = _to_dict(_require(raw, "channel", ""), "channel")
    sigma_s_sq = float(_require(ch, "sigma_s_sq", "channel"))
    sigma_c_sq = float(_require(ch, "sigma_c_sq", "channel"))
    p_max = float(_require(ch, "p_max", "channel"))
    for name, value in (("sigma_s_sq", sigma_s_sq), ("sigma_c_sq", sigma_c_sq), ("p_max", p_max)):
        if not (value > 0):
            raise ConfigError(f"channel.{name}", "must be > 0")
    coherence_time = int(_require(ch, "coherence_time", "channel"))
    if coherence_time < 1:
        raise ConfigError("channel.coherence_time", "must be >= 1")
    sensing_snr_db = float(_require(ch, "sensing_snr_db", "channel"))
    comm_snr_db = float(_require(ch, "comm_snr_db", "channel"))
    # per-antenna SNR convention (see SNR_CONVENTION)
    beta_second_moment = 10.0 ** (sensing_snr_db / 10.0) * sigma_s_sq / p_max
    alpha_second_moment = 10.0 ** (comm_snr_db / 10.0) * sigma_c_sq / p_max

    targets_raw = _require(raw, "targets", "")
    if not isinstance(targets_raw, list) or not targets_raw:
        raise ConfigError("targets", "expected a non-empty list")
    targets = []
    for i, entry in enumerate(targets_raw):
        entry = _to_dict(entry, f"targets[{i}]")
        mean_deg = float(_require(entry, "mean_direction_deg", f"targets[{i}]"))
        kappa = float(_require(entry, "kappa", f"targets[{i}]"))
        if kappa < 0:
            raise ConfigError(f"targets[{i}].kappa", "must be >= 0")
        second_moment = float(entry.get("gain_second_moment", beta_second_moment))
        targets.append(
            TargetModel(
                angle_prior=VonMisesPrior(np.deg2rad(mean_deg), kappa),
                gain_prior=GainPrior(second_moment),
                is_comm_user=bool(entry.get("is_comm_user", False)),
            )
        )
    if sum(t.is_comm_user for t in targets) != 1:
        raise ConfigError("targets", "exactly one entry must set is_comm_user: true")

    mc = _to_dict(raw.get("mc", {}), "mc")
    budgets = MonteCarloBudgets(
        quad_points=int(mc.get("quad_points", 400)),
        sensing_draws=int(mc.get("sensing_draws", 10_000)),
        comm_draws=int(mc.get("comm_draws", 1_000)),
        gauss_draws=int(mc.get("gauss_draws", 10_000)),
        saa_draws=int(mc.get("saa_draws", 2_000)),
    )
    if budgets.quad_points < 64:
        raise ConfigError("mc.quad_points", "must be >= 64")

    acq = _to_dict(raw.get("acquisition", {}), "acquisition")
    reference = acq.get("reference_kappa_post")

    try:
        return ScenarioConfig(
            tx=tx,
            rx=rx,
            ue=ue,
            targets=tuple(targets),
            comm_gain=GainPrior(alpha_second_moment),
            sigma_s_sq=sigma_s_sq,
            sigma_c_sq=sigma_c_sq,
            p_max=p_max,
            coherence_time=coherence_time,
            budgets=budgets,
            base_seed=int(raw.get("seed", 0)),
            rate_log_base=float(raw.get("rate_log_base", 2.0)),
            reference_kappa_post=None if reference is None else float(reference),
        )
    except ValueError as exc:
        raise ConfigError("<root>", str(exc)) from exc


def _scenario_to_raw(sc: ScenarioConfig) -> dict:
    targets = []
    for t in sc.targets:
        targets.append(
            {
                "mean_direction_deg": float(np.rad2deg(t.angle_prior.mean_direction)),
                "kappa": float(t.angle_prior.kappa),
                "gain_second_moment": float(t.gain_prior.second_moment),
                "is_comm_user": bool(t.is_comm_user),
            }
        )
    raw = {
        "array": {
            "tx_elements": sc.tx.num_elements,
            "rx_elements": sc.rx.num_elements,
            "ue_elements": sc.ue.num_elements,
            "spacing": sc.tx.spacing,
        },
        "channel": {
            "sigma_s_sq": sc.sigma_s_sq,
            "sigma_c_sq": sc.sigma_c_sq,
            "p_max": sc.p_max,
            "coherence_time": sc.coherence_time,
            # gains are written explicitly per target, so the derived SNR
            # fields only document the convention on round trips
            "sensing_snr_db": float(
                10.0 * np.log10(sc.targets[0].gain_prior.second_moment * sc.p_max / sc.sigma_s_sq)
            ),
            "comm_snr_db": float(
                10.0 * np.log10(sc.comm_gain.second_moment * sc.p_max / sc.sigma_c_sq)
            ),
        },
        "targets": targets,
        "mc": {
            "quad_points": sc.budgets.quad_points,
            "sensing_draws": sc.budgets.sensing_draws,
            "comm_draws": sc.budgets.comm_draws,
            "gauss_draws": sc.budgets.gauss_draws,
            "saa_draws": sc.budgets.saa_draws,
        },
        "seed": sc.base_seed,
        "rate_log_base": sc.rate_log_base,
    }
    if sc.reference_kappa_post is not None:
        raw["acquisition"] = {"reference_kappa_post": sc.reference_kappa_post}
    return raw


def save_config(sc: ScenarioConfig, path: str | Path) -> None:
    """Write the scenario back out as YAML (used by the acquire command)."""
    Path(path).write_text(yaml.safe_dump(_scenario_to_raw(sc), sort_keys=True))


def scenario_hash(sc: ScenarioConfig) -> str:
    """Stable content hash of the scenario for cache validation."""
    canonical = json.dumps(_scenario_to_raw(sc), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()
