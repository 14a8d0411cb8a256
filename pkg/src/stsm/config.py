"""Run configuration: schema, file parsing, canonical hashing, presets.

The file format is INI-style sections of key = value pairs.  Unknown
sections or keys are hard errors: silent typos in physics parameters are
the dominant user failure mode.  Every artifact file carries the sha256
hash of the canonicalised effective configuration.
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import c as C_LIGHT

from .biphoton import PumpLowGain
from .dispersion import BBO, CrystalConfig, SellmeierSet
from .errors import ConfigError
from .grid import GridSpec
from .highgain import GainCalibration, PumpHighGain

__all__ = [
    "RunConfig",
    "desk_grid",
    "desk_pump",
    "desk_crystal",
    "DESK",
    "FULL_SCALE",
]

# Desk-scale reference point: full-scale crystal and pump wavelength with
# the waist, bandwidth and windows shrunk so a 12-16 point grid resolves
# the state and the brute-force oracle stays tractable.
_DESK = {
    "q_max": 2.0e5,            # rad/m
    "omega_half_width": 2.0e14,  # rad/s
    "w_p": 9e-6,               # m
    "delta_lambda_p": 4e-9,    # m
    "lambda_p0": 355e-9,       # m
    "theta_p_deg": 32.914,
    "length": 2e-3,            # m
}


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"expected a list of numbers, got {text!r}") from exc


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


@dataclass(frozen=True)
class RunConfig:
    """Flat, validated view of one run configuration.

    Defaults reproduce the desk-scale low-gain run.  The full-scale
    parameter set (480 um waist, 0.5 nm bandwidth, N ~ 300 grids) ships
    as configs/fullscale.cfg; it is a config change only.
    """

    # [run]
    regime: str = "low-gain"
    workers: int = 1
    output: str = "out"
    # [grid]
    n_q: int = 12
    n_omega: int = 12
    n_phi: int = 16
    q_max: float = _DESK["q_max"]
    omega_half_width: float = _DESK["omega_half_width"]
    # [pump]
    lambda_p0: float = _DESK["lambda_p0"]
    w_p: float = _DESK["w_p"]
    delta_lambda_p: float = _DESK["delta_lambda_p"]
    # [crystal]
    theta_p_deg: float = _DESK["theta_p_deg"]
    length: float = _DESK["length"]
    sellmeier_o: tuple = BBO.ordinary
    sellmeier_e: tuple = BBO.extraordinary
    sellmeier_band: tuple = BBO.band_um
    # [truncation]
    l_max: int = 7
    m_max: int = 100
    tol: float = 1e-6
    # [sweep]
    axis: str = "w_p"
    values: tuple = ()
    fast: bool = True
    # [highgain]
    g: float = 1.0
    delta_t: float = 2.4e-14
    c2_eff: float = 0.0          # 0 means "calibrate from crystal length"
    n_rho: int = 64
    n_t: int = 64

    _SECTIONS = {
        "run": {"regime": str, "workers": int, "output": str},
        "grid": {"n_q": int, "n_omega": int, "n_phi": int,
                 "q_max": float, "omega_half_width": float},
        "pump": {"lambda_p0": float, "w_p": float, "delta_lambda_p": float},
        "crystal": {"theta_p_deg": float, "length": float,
                    "sellmeier_o": _float_list, "sellmeier_e": _float_list,
                    "sellmeier_band": _float_list},
        "truncation": {"l_max": int, "m_max": int, "tol": float},
        "sweep": {"axis": str, "values": _float_list, "fast": _bool},
        "highgain": {"g": float, "delta_t": float, "c2_eff": float,
                     "n_rho": int, "n_t": int},
    }

    def __post_init__(self):
        if self.regime not in ("low-gain", "high-gain"):
            raise ConfigError(f"regime must be low-gain or high-gain, got {self.regime!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.axis not in ("w_p", "L", "delta_lambda_p", "theta_p", "g"):
            raise ConfigError(f"unknown sweep axis {self.axis!r}")

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            with open(path, "r", encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file {path}: {exc}") from exc
        updates = {}
        for section in parser.sections():
            if section not in cls._SECTIONS:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in cls._SECTIONS[section]:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                conv = cls._SECTIONS[section][key]
                try:
                    val = conv(raw)
                except ConfigError:
                    raise
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc
                updates[key] = tuple(val) if isinstance(val, list) else val
        return cls(**updates)

    def with_overrides(self, pairs: dict) -> "RunConfig":
        """Apply {key: value} overrides (already typed) onto this config."""
        return replace(self, **pairs)

    # -- canonical form and provenance hash ------------------------------

    def canonical_text(self) -> str:
        out = io.StringIO()
        for section in sorted(self._SECTIONS):
            out.write(f"[{section}]\n")
            for key in sorted(self._SECTIONS[section]):
                val = getattr(self, key)
                if isinstance(val, tuple):
                    text = ",".join(repr(float(v)) for v in val)
                elif isinstance(val, float):
                    text = repr(val)
                else:
                    text = str(val)
                out.write(f"{key} = {text}\n")
        return out.getvalue()

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    # -- physics object factories ----------------------------------------

    @property
    def omega_p0(self) -> float:
        return 2.0 * np.pi * C_LIGHT / self.lambda_p0

    def make_grid(self, q_scale: float = 1.0) -> GridSpec:
        return GridSpec.make(
            n_q=max(1, round(self.n_q * q_scale)),
            q_max=self.q_max * q_scale,
            n_omega=self.n_omega,
            omega_center=self.omega_p0 / 2.0,
            omega_half_width=self.omega_half_width,
            n_phi=self.n_phi,
        )

    def make_pump(self) -> PumpLowGain:
        return PumpLowGain(self.lambda_p0, self.w_p, self.delta_lambda_p)

    def make_crystal(self) -> CrystalConfig:
        sell = SellmeierSet(
            ordinary=tuple(self.sellmeier_o),
            extraordinary=tuple(self.sellmeier_e),
            band_um=tuple(self.sellmeier_band),
        )
        return CrystalConfig(
            theta_p=np.deg2rad(self.theta_p_deg), length=self.length, sellmeier=sell
        )

    def make_highgain_pump(self) -> PumpHighGain:
        return PumpHighGain(self.g, self.w_p, self.delta_t, self.lambda_p0)

    def make_calibration(self) -> GainCalibration:
        if self.c2_eff > 0.0:
            return GainCalibration(self.c2_eff)
        return GainCalibration.for_crystal(self.make_crystal())


DESK = RunConfig()

#: Full-scale production parameters; a cluster-class run, not a test target.
FULL_SCALE = RunConfig(
    n_q=300, n_omega=300, n_phi=256,
    q_max=2.5e5, omega_half_width=2.0e14,
    w_p=480e-6, delta_lambda_p=0.5e-9,
    l_max=100, m_max=100,
)


def desk_grid(n_q: int | None = None, n_omega: int | None = None,
              n_phi: int | None = None) -> GridSpec:
    """Desk-scale grid, optionally resized per axis."""
    cfg = DESK
    return GridSpec.make(
        n_q=n_q or cfg.n_q,
        q_max=cfg.q_max,
        n_omega=n_omega or cfg.n_omega,
        omega_center=cfg.omega_p0 / 2.0,
        omega_half_width=cfg.omega_half_width,
        n_phi=n_phi or cfg.n_phi,
    )


def desk_pump() -> PumpLowGain:
    return DESK.make_pump()


def desk_crystal() -> CrystalConfig:
    return DESK.make_crystal()
