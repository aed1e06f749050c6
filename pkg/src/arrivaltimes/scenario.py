"""Scenario files: a JSON description of one packet-plus-laser run.

A scenario resolves to SI model parameters, a list of Gaussian packets,
a time grid, a momentum-grid policy, and the set of requested output
curves.  Lab-friendly units are allowed in the file (cm/s, um, us) and
are converted here, once.

Example:

    {
      "model": "two-channel",
      "gamma_over_gamma_cs": 10.0,
      "omega_over_gamma": 0.33,
      "packets": [{"v_mean_cm_s": 0.9, "dx_um": 0.106, "t_focus_us": 150.0}],
      "time_grid": {"start_us": 0.0, "stop_us": 320.0, "n": 3200},
      "momentum_grid": {"n_nodes": 512},
      "outputs": ["Pi", "Pi_ON", "Pi_K"]
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from ._version import __version__
from .errors import ValidationError
from .packets import GaussianPacket
from .params import (
    GAMMA_CESIUM,
    HBAR,
    MASS_CESIUM,
    AbsorbingStepParams,
    LaserAtomParams,
    sigma_k_from_position_spread,
    sigma_k_from_velocity_spread,
    wavenumber_from_velocity,
)

MODELS = ("two-channel", "complex-potential")
SCENARIO_OUTPUTS = ("Pi", "Pi_ON", "Pi_K", "J", "Pi_J", "Pi_id")

_TOP_KEYS = {
    "name",
    "model",
    "gamma",
    "gamma_over_gamma_cs",
    "omega",
    "omega_over_gamma",
    "v0",
    "mass",
    "packets",
    "time_grid",
    "momentum_grid",
    "outputs",
    "deconvolve",
    "pad_factor",
    "window_fraction",
}
_PACKET_KEYS = {
    "weight",
    "v_mean_cm_s",
    "k_mean",
    "dv_cm_s",
    "dx_um",
    "sigma_k",
    "x0_um",
    "t_focus_us",
}
_TIME_KEYS = {"start_us", "stop_us", "n"}
_MOMENTUM_KEYS = {"n_nodes", "support_sigmas"}


@dataclass(frozen=True)
class Scenario:
    """A fully resolved run description, SI units throughout.

    ``params`` is always the two-channel parameter set when one can be
    formed; for the complex-potential model with a directly specified
    absorber strength it is None and only ``step`` is set.
    """

    name: str
    model: str
    params: LaserAtomParams | None
    step: AbsorbingStepParams | None
    packets: tuple[GaussianPacket, ...]
    times: np.ndarray
    n_nodes: int
    support_sigmas: float
    outputs: tuple[str, ...]
    deconvolve: bool = False
    pad_factor: int = 4
    window_fraction: float = 0.0
    v0_source: str | None = None
    source: dict = field(default_factory=dict, repr=False)

    @property
    def mass(self) -> float:
        obj = self.params if self.params is not None else self.step
        return obj.mass

    @property
    def hbar(self) -> float:
        obj = self.params if self.params is not None else self.step
        return obj.hbar


def _require_mapping(obj: Any, where: str) -> Mapping:
    if not isinstance(obj, Mapping):
        raise ValidationError(f"{where} must be a JSON object, got {type(obj).__name__}")
    return obj


def _unknown_keys(data: Mapping, allowed: set, where: str) -> None:
    extra = sorted(set(data) - allowed)
    if extra:
        raise ValidationError(f"unknown {where} key(s): {', '.join(extra)}")


def _number(data: Mapping, key: str, where: str) -> float:
    val = data[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ValidationError(f"{where}.{key} must be a number, got {val!r}")
    if not math.isfinite(float(val)):
        raise ValidationError(f"{where}.{key} must be finite, got {val!r}")
    return float(val)


def _exactly_one(data: Mapping, keys: Sequence[str], where: str, optional: bool = False) -> str | None:
    present = [key for key in keys if key in data]
    if len(present) > 1:
        raise ValidationError(f"{where}: give only one of {', '.join(keys)}")
    if not present:
        if optional:
            return None
        raise ValidationError(f"{where}: one of {', '.join(keys)} is required")
    return present[0]


def _resolve_packet(raw: Any, index: int) -> GaussianPacket:
    where = f"packets[{index}]"
    data = _require_mapping(raw, where)
    _unknown_keys(data, _PACKET_KEYS, where)

    vel_key = _exactly_one(data, ("v_mean_cm_s", "k_mean"), where)
    if vel_key == "v_mean_cm_s":
        k_mean = wavenumber_from_velocity(_number(data, vel_key, where) * 1e-2)
    else:
        k_mean = _number(data, vel_key, where)

    spread_key = _exactly_one(data, ("dv_cm_s", "dx_um", "sigma_k"), where)
    if spread_key == "dv_cm_s":
        sigma_k = sigma_k_from_velocity_spread(_number(data, spread_key, where) * 1e-2)
    elif spread_key == "dx_um":
        sigma_k = sigma_k_from_position_spread(_number(data, spread_key, where) * 1e-6)
    else:
        sigma_k = _number(data, spread_key, where)

    weight = _number(data, "weight", where) if "weight" in data else 1.0
    x0 = _number(data, "x0_um", where) * 1e-6 if "x0_um" in data else 0.0
    t_focus = _number(data, "t_focus_us", where) * 1e-6 if "t_focus_us" in data else 0.0
    return GaussianPacket(
        k_mean=k_mean, sigma_k=sigma_k, x0=x0, t_focus=t_focus, weight=weight
    )


def scenario_from_mapping(raw: Any, name: str = "<inline>") -> Scenario:
    """Validate and resolve a parsed scenario mapping.

    Raises ValidationError naming the offending field on any problem.
    """
    data = _require_mapping(raw, "scenario")
    _unknown_keys(data, _TOP_KEYS, "scenario")
    name = str(data.get("name", name))

    model = data.get("model", "two-channel")
    if model not in MODELS:
        raise ValidationError(f"model must be one of {MODELS}, got {model!r}")

    mass = _number(data, "mass", "scenario") if "mass" in data else MASS_CESIUM

    gamma_key = _exactly_one(
        data, ("gamma", "gamma_over_gamma_cs"), "scenario",
        optional=(model == "complex-potential"),
    )
    gamma = None
    if gamma_key == "gamma":
        gamma = _number(data, "gamma", "scenario")
    elif gamma_key == "gamma_over_gamma_cs":
        gamma = _number(data, "gamma_over_gamma_cs", "scenario") * GAMMA_CESIUM

    omega_key = _exactly_one(
        data, ("omega", "omega_over_gamma"), "scenario",
        optional=(model == "complex-potential"),
    )
    omega = None
    if omega_key == "omega":
        omega = _number(data, "omega", "scenario")
    elif omega_key == "omega_over_gamma":
        if gamma is None:
            raise ValidationError("omega_over_gamma requires gamma or gamma_over_gamma_cs")
        omega = _number(data, "omega_over_gamma", "scenario") * gamma

    params = None
    step = None
    v0_source = None
    if model == "two-channel":
        if "v0" in data:
            raise ValidationError("v0 only applies to the complex-potential model")
        if gamma is None or omega is None:
            raise ValidationError("two-channel model requires gamma and omega")
        params = LaserAtomParams(gamma=gamma, omega=omega, mass=mass)
    else:
        if "v0" in data:
            if gamma is not None or omega is not None:
                raise ValidationError(
                    "complex-potential model: give v0 or the (gamma, omega) pair, not both"
                )
            step = AbsorbingStepParams(v0=_number(data, "v0", "scenario"), mass=mass)
            v0_source = "direct"
        else:
            if gamma is None or omega is None:
                raise ValidationError(
                    "complex-potential model requires v0 or the (gamma, omega) pair"
                )
            params = LaserAtomParams(gamma=gamma, omega=omega, mass=mass)
            step = params.to_one_channel()
            v0_source = "derived"

    if "packets" not in data or not isinstance(data["packets"], Sequence) or not data["packets"]:
        raise ValidationError("packets must be a non-empty list")
    packets = tuple(_resolve_packet(p, i) for i, p in enumerate(data["packets"]))

    tg = _require_mapping(data.get("time_grid"), "time_grid")
    _unknown_keys(tg, _TIME_KEYS, "time_grid")
    for key in _TIME_KEYS:
        if key not in tg:
            raise ValidationError(f"time_grid.{key} is required")
    t_start = _number(tg, "start_us", "time_grid") * 1e-6
    t_stop = _number(tg, "stop_us", "time_grid") * 1e-6
    n_t = tg["n"]
    if not isinstance(n_t, int) or isinstance(n_t, bool) or n_t < 2:
        raise ValidationError(f"time_grid.n must be an integer >= 2, got {n_t!r}")
    if not t_stop > t_start:
        raise ValidationError("time_grid.stop_us must exceed start_us")
    times = np.linspace(t_start, t_stop, n_t)

    mg = _require_mapping(data.get("momentum_grid", {}), "momentum_grid")
    _unknown_keys(mg, _MOMENTUM_KEYS, "momentum_grid")
    n_nodes = mg.get("n_nodes", 512)
    if not isinstance(n_nodes, int) or isinstance(n_nodes, bool) or n_nodes < 16:
        raise ValidationError(f"momentum_grid.n_nodes must be an integer >= 16, got {n_nodes!r}")
    support_sigmas = _number(mg, "support_sigmas", "momentum_grid") if "support_sigmas" in mg else 8.0
    if support_sigmas <= 0.0:
        raise ValidationError("momentum_grid.support_sigmas must be positive")

    if "outputs" not in data or not isinstance(data["outputs"], Sequence) or isinstance(data["outputs"], str):
        raise ValidationError("outputs must be a list of curve names")
    outputs = tuple(data["outputs"])
    if not outputs:
        raise ValidationError(f"outputs must name at least one of {SCENARIO_OUTPUTS}")
    for out in outputs:
        if out not in SCENARIO_OUTPUTS:
            raise ValidationError(f"unknown output {out!r}; choose from {SCENARIO_OUTPUTS}")
    if len(set(outputs)) != len(outputs):
        raise ValidationError("outputs contains duplicates")

    deconvolve = data.get("deconvolve", False)
    if not isinstance(deconvolve, bool):
        raise ValidationError("deconvolve must be true or false")
    if "Pi_id" in outputs:
        deconvolve = True
        if "Pi_ON" not in outputs:
            raise ValidationError("Pi_id is deconvolved from Pi_ON; add Pi_ON to outputs")
        if params is None:
            raise ValidationError(
                "Pi_id needs two-channel rates for the emission response; "
                "the complex-potential model with direct v0 has none"
            )

    pad_factor = data.get("pad_factor", 4)
    if not isinstance(pad_factor, int) or isinstance(pad_factor, bool) or pad_factor < 1:
        raise ValidationError(f"pad_factor must be an integer >= 1, got {pad_factor!r}")
    window_fraction = (
        _number(data, "window_fraction", "scenario") if "window_fraction" in data else 0.0
    )
    if not 0.0 <= window_fraction <= 0.5:
        raise ValidationError("window_fraction must lie in [0, 0.5]")

    return Scenario(
        name=name,
        model=model,
        params=params,
        step=step,
        packets=packets,
        times=times,
        n_nodes=n_nodes,
        support_sigmas=support_sigmas,
        outputs=outputs,
        deconvolve=deconvolve,
        pad_factor=pad_factor,
        window_fraction=window_fraction,
        v0_source=v0_source,
        source=dict(data),
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"scenario file {path} is not valid JSON: {exc}") from exc
    return scenario_from_mapping(raw, name=path.stem)


def metadata(scenario: Scenario) -> dict:
    """Sidecar dictionary: every number needed to reproduce the CSV.

    Invariant-check results are appended by the runner under "checks".
    No timestamps: identical inputs must give identical sidecars.
    """
    meta: dict = {
        "library_version": __version__,
        "scenario_name": scenario.name,
        "model": scenario.model,
        "hbar_J_s": scenario.hbar,
        "mass_kg": scenario.mass,
        "outputs": list(scenario.outputs),
        "time_grid": {
            "t_start_s": float(scenario.times[0]),
            "t_stop_s": float(scenario.times[-1]),
            "n": int(scenario.times.size),
        },
        "momentum_grid": {
            "n_nodes": scenario.n_nodes,
            "support_sigmas": scenario.support_sigmas,
        },
        "packets": [
            {
                "weight": p.weight,
                "k_mean_rad_per_m": p.k_mean,
                "sigma_k_rad_per_m": p.sigma_k,
                "x0_m": p.x0,
                "t_focus_s": p.t_focus,
            }
            for p in scenario.packets
        ],
        "checks": {},
    }
    if scenario.params is not None:
        meta["gamma_per_s"] = scenario.params.gamma
        meta["omega_per_s"] = scenario.params.omega
        meta["alpha"] = _complex_to_pair(scenario.params.alpha)
        meta["kappa0_rad_per_m"] = scenario.params.kappa0
    if scenario.step is not None:
        meta["v0_J"] = scenario.step.v0
        meta["absorption_rate_per_s"] = scenario.step.absorption_rate
        meta["v0_source"] = scenario.v0_source
    if scenario.deconvolve:
        meta["deconvolution"] = {
            "pad_factor": scenario.pad_factor,
            "window_fraction": scenario.window_fraction,
        }
    return meta


def _complex_to_pair(z: complex) -> list:
    return [z.real, z.imag]
