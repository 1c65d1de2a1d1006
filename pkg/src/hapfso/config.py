"""Run configuration: an INI document with unit-suffixed keys.

Sections are [geometry], [atmosphere], [transceiver], [jitter],
[turbulence] and [simulation]. Every physical key names its unit
(``zenith_deg``, ``wavelength_nm``, ``sigma_d_m``, ``p_t_dbm``...). Unknown
sections or keys are rejected; missing keys take the built-in "table1"
profile value and are logged.
"""

from __future__ import annotations

import configparser
import hashlib
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .atmosphere import AtmosphereProfile, LinkGeometry, QuadratureSpec
from .channel import ReceiverElectronics
from .montecarlo import SimConfig, SimConfigError
from .scenario import LinkDesign

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending section.key."""


# section -> key -> default, as text so hashing sees exactly what is parsed
TABLE1: dict[str, dict[str, str]] = {
    "geometry": {
        "path_length_m": "20000",
        "hap_altitude_m": "",
        "zenith_deg": "40",
        "tx_altitude_m": "0",
    },
    "atmosphere": {
        "rms_wind_speed_mps": "21",
        "ground_cn2_m_neg2_3": "1.7e-13",
        "attenuation_per_m": "0",
    },
    "transceiver": {
        "wavelength_nm": "1550",
        "aperture_radius_m": "0.05",
        "w_z_m": "1.0",
        "theta_fov_mrad": "75",
        "focal_length_m": "0.1",
        "p_t_dbm": "5",
        "snr_threshold_db": "10",
        "responsivity_a_per_w": "0.9",
        "electrical_bandwidth_hz": "1e9",
        "optical_bandwidth_nm": "10",
        "background_radiance_w_per_cm2_m_sr": "1e-3",
        "electron_charge_c": "1.6e-19",
    },
    "jitter": {
        "sigma_d_m": "0.4",
        "sigma_o_mrad": "10",
        "sigma_b_m": "auto",
    },
    "turbulence": {
        "model": "gg",
        "coherence_form": "printed",
        "quad_relative_tolerance": "1e-8",
        "quad_max_subdivisions": "200",
    },
    "simulation": {
        "trials": "4000000",
        "seed": "0",
        "aoa_mode": "gate",
        "histogram_bins": "64",
        "batch_size": "262144",
        "workers": "1",
    },
}

PROFILES = {"table1": TABLE1}


@dataclass(frozen=True)
class RunConfig:
    design: LinkDesign
    sim: SimConfig
    values: dict = field(default_factory=dict)
    defaulted: tuple = ()

    @property
    def config_hash(self) -> str:
        """SHA-256 of the fully resolved key/value set, order independent."""
        lines = [f"{s}.{k}={v}" for s in sorted(self.values) for k, v in sorted(self.values[s].items())]
        return hashlib.sha256("\n".join(lines).encode()).hexdigest()[:16]

    def with_overrides(self, seed: Optional[int] = None, trials: Optional[int] = None) -> "RunConfig":
        vals = {s: dict(kv) for s, kv in self.values.items()}
        if seed is not None:
            vals["simulation"]["seed"] = str(seed)
        if trials is not None:
            vals["simulation"]["trials"] = str(trials)
        return build(vals, self.defaulted)


def _num(section: str, key: str, text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {text!r} is not a number") from None
    if not math.isfinite(val):
        raise ConfigError(f"[{section}] {key} must be finite")
    return val


def _int(section: str, key: str, text: str) -> int:
    val = _num(section, key, text)
    if val != int(val):
        raise ConfigError(f"[{section}] {key} = {text!r} is not an integer")
    return int(val)


def load(path: Optional[str | Path] = None, profile: str = "table1",
         text: Optional[str] = None) -> RunConfig:
    """Parse a config file (or string) on top of a named default profile."""
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}")
    base = PROFILES[profile]
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        if path is not None:
            with open(path) as fh:
                parser.read_file(fh)
        if text is not None:
            parser.read_string(text)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    values = {s: {} for s in base}
    defaulted = []
    for section in parser.sections():
        if section not in base:
            raise ConfigError(f"unknown section [{section}]; expected one of {sorted(base)}")
        for key, val in parser.items(section):
            if key not in base[section]:
                raise ConfigError(f"unknown key [{section}] {key}; expected one of "
                                  f"{sorted(base[section])}")
            values[section][key] = val.strip()
    for section, keys in base.items():
        for key, default in keys.items():
            if key not in values[section]:
                values[section][key] = default
                defaulted.append(f"{section}.{key}")
                log.info("config: [%s] %s defaulted to %r (%s)", section, key, default, profile)
    return build(values, tuple(defaulted))


def build(values: dict, defaulted: tuple = ()) -> RunConfig:
    g, a, t, j, tu, sm = (values[s] for s in ("geometry", "atmosphere", "transceiver", "jitter",
                                             "turbulence", "simulation"))
    def section(name, fn):
        try:
            return fn()
        except ConfigError:
            raise
        except (ValueError, SimConfigError) as exc:
            raise ConfigError(f"[{name}] {exc}") from None

    def geometry():
        zenith = math.radians(_num("geometry", "zenith_deg", g["zenith_deg"]))
        h0 = _num("geometry", "tx_altitude_m", g["tx_altitude_m"])
        if g["hap_altitude_m"]:
            return LinkGeometry(_num("geometry", "hap_altitude_m", g["hap_altitude_m"]), h0, zenith)
        return LinkGeometry.from_path_length(
            _num("geometry", "path_length_m", g["path_length_m"]), zenith, h0)

    geom = section("geometry", geometry)
    atmos = section("atmosphere", lambda: AtmosphereProfile(
        _num("atmosphere", "rms_wind_speed_mps", a["rms_wind_speed_mps"]),
        _num("atmosphere", "ground_cn2_m_neg2_3", a["ground_cn2_m_neg2_3"]),
        _num("atmosphere", "attenuation_per_m", a["attenuation_per_m"])))
    rx = section("transceiver", lambda: ReceiverElectronics(
        responsivity=_num("transceiver", "responsivity_a_per_w", t["responsivity_a_per_w"]),
        electrical_bandwidth_hz=_num("transceiver", "electrical_bandwidth_hz",
                                    t["electrical_bandwidth_hz"]),
        optical_bandwidth_m=_num("transceiver", "optical_bandwidth_nm", t["optical_bandwidth_nm"]) / 1e9,
        background_radiance=ReceiverElectronics.radiance_from_w_per_cm2_m_sr(
            _num("transceiver", "background_radiance_w_per_cm2_m_sr",
                 t["background_radiance_w_per_cm2_m_sr"])),
        electron_charge=_num("transceiver", "electron_charge_c", t["electron_charge_c"])))
    quad = section("turbulence", lambda: QuadratureSpec(
        _num("turbulence", "quad_relative_tolerance", tu["quad_relative_tolerance"]),
        _int("turbulence", "quad_max_subdivisions", tu["quad_max_subdivisions"])))
    sigma_b = None if j["sigma_b_m"].lower() == "auto" else _num("jitter", "sigma_b_m", j["sigma_b_m"])
    if sigma_b is not None and sigma_b < 0:
        raise ConfigError("[jitter] sigma_b_m must be non-negative or 'auto'")
    for key in ("sigma_d_m", "sigma_o_mrad"):
        if _num("jitter", key, j[key]) < 0:
            raise ConfigError(f"[jitter] {key} must be non-negative")
    if tu["model"] not in ("gg", "ln"):
        raise ConfigError(f"[turbulence] model = {tu['model']!r}; expected 'gg' or 'ln'")
    if tu["coherence_form"] not in ("printed", "standard"):
        raise ConfigError(f"[turbulence] coherence_form = {tu['coherence_form']!r}; "
                          "expected 'printed' or 'standard'")
    design = section("transceiver", lambda: LinkDesign(
        geometry=geom,
        atmosphere=atmos,
        rx=rx,
        wavelength_m=_num("transceiver", "wavelength_nm", t["wavelength_nm"]) / 1e9,
        aperture_radius_m=_num("transceiver", "aperture_radius_m", t["aperture_radius_m"]),
        w_z_m=_num("transceiver", "w_z_m", t["w_z_m"]),
        theta_fov_rad=_num("transceiver", "theta_fov_mrad", t["theta_fov_mrad"]) / 1e3,
        focal_length_m=_num("transceiver", "focal_length_m", t["focal_length_m"]),
        sigma_d_m=_num("jitter", "sigma_d_m", j["sigma_d_m"]),
        sigma_o_rad=_num("jitter", "sigma_o_mrad", j["sigma_o_mrad"]) / 1e3,
        sigma_b_m=sigma_b,
        turbulence_kind=tu["model"],
        p_t_dbm=_num("transceiver", "p_t_dbm", t["p_t_dbm"]),
        snr_threshold_db=_num("transceiver", "snr_threshold_db", t["snr_threshold_db"]),
        coherence_form=tu["coherence_form"],
        quad=quad))
    sim = section("simulation", lambda: SimConfig(
        n_trials=_int("simulation", "trials", sm["trials"]),
        seed=_int("simulation", "seed", sm["seed"]),
        aoa_mode=sm["aoa_mode"],
        histogram_bins=_int("simulation", "histogram_bins", sm["histogram_bins"]),
        batch_size=_int("simulation", "batch_size", sm["batch_size"]),
        workers=_int("simulation", "workers", sm["workers"])))
    return RunConfig(design, sim, values, defaulted)


def dump(cfg: RunConfig) -> str:
    """Resolved configuration as INI text (round-trips through ``load``)."""
    out = []
    for section, keys in cfg.values.items():
        out.append(f"[{section}]")
        out += [f"{k} = {v}" for k, v in keys.items()]
        out.append("")
    return "\n".join(out)
