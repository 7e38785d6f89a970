"""Flat key-value configuration files and their resolution to typed settings.

Format: one `key = value` pair per line, `#` starts a comment. Every key
has a default, so an absent file resolves to a fully usable configuration;
reports echo the resolved values to keep physical constants traceable.
"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .engine import SimConfig
from .physics import MODULATIONS_BY_NAME, XtParams
from .rl_env import ACTION_MODES, REWARD_FEATURES, EpisodeConfig
from .traffic import TrafficConfig


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_str_list(text: str) -> Tuple[str, ...]:
    return tuple(item.strip() for item in text.split(",") if item.strip())


def _parse_partitions(text: str) -> Tuple[Tuple[float, int, int], ...]:
    """Partitions as `bitrate_ub:slot_lo:slot_hi` triples, comma separated."""
    parts = []
    for chunk in text.split(","):
        pieces = chunk.strip().split(":")
        if len(pieces) != 3:
            raise ValueError(f"expected bitrate_ub:slot_lo:slot_hi, got {chunk!r}")
        parts.append((float(pieces[0]), int(pieces[1]), int(pieces[2])))
    return tuple(parts)


# key -> (parser, default)
SCHEMA = {
    "topology": (str, "nsfnet"),
    "slots": (int, 100),
    "slot_ghz": (float, 12.5),
    "guard_slots": (int, 1),
    "routes.k": (int, 5),
    "modulation.enabled": (_parse_str_list, ("BPSK", "QPSK", "8QAM", "16QAM")),
    "xt.k": (float, 4.0e-4),
    "xt.r": (float, 0.05),
    "xt.beta": (float, 4.0e6),
    "xt.pitch": (float, 4.0e-5),
    "xt.occupancy_aware": (_parse_bool, False),
    "traffic.load_erlang": (float, 250.0),
    "traffic.mean_holding": (float, 1.0),
    "traffic.seed": (int, 0),
    "traffic.bitrate_min": (float, 25.0),
    "traffic.bitrate_max": (float, 100.0),
    "traffic.discrete_step": (float, 0.0),
    "engine.window_size": (int, 1000),
    "policy.seed": (int, 12345),
    "scma.partitions": (_parse_partitions, ((62.5, 0, 50), (100.0, 50, 100))),
    "rl.requests_per_episode": (int, 50),
    "rl.reset_state_on_episode": (_parse_bool, True),
    "rl.action_mode": (str, "block_index"),
    "rl.blocks_per_pair": (int, 1),
    "rl.features_per_block": (int, 3),
    "rl.reward_feature": (str, "previous"),
}


def defaults() -> Dict:
    return {key: default for key, (_, default) in SCHEMA.items()}


def load_config(path: Optional[Union[str, Path]] = None) -> Dict:
    """Resolve a config file against the schema; raises on the first error."""
    resolved, errors = validate_config(path)
    if errors:
        raise ConfigError("; ".join(errors))
    return resolved


def validate_config(
    path: Optional[Union[str, Path]] = None,
) -> Tuple[Dict, List[str]]:
    """Parse and sanity-check a config file.

    Returns the resolved key/value map (defaults filled in) and a list of
    diagnostics, each naming the offending key.
    """
    resolved = defaults()
    errors: List[str] = []
    if path is not None:
        try:
            lines = Path(path).read_text().splitlines()
        except OSError as exc:
            return resolved, [f"config: cannot read {path}: {exc}"]
        for lineno, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                errors.append(f"config line {lineno}: expected `key = value`, got {raw!r}")
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in SCHEMA:
                errors.append(f"{key}: unknown configuration key")
                continue
            parser, _ = SCHEMA[key]
            try:
                resolved[key] = parser(value.strip())
            except ValueError as exc:
                errors.append(f"{key}: {exc}")

    errors.extend(_semantic_errors(resolved))
    return resolved, errors


def _semantic_errors(cfg: Dict) -> List[str]:
    errors = []
    if cfg["slots"] < 0:
        errors.append(f"slots: must be >= 0, got {cfg['slots']}")
    if cfg["slot_ghz"] <= 0:
        errors.append(f"slot_ghz: must be > 0, got {cfg['slot_ghz']}")
    if cfg["guard_slots"] < 0:
        errors.append(f"guard_slots: must be >= 0, got {cfg['guard_slots']}")
    if cfg["routes.k"] < 1:
        errors.append(f"routes.k: must be >= 1, got {cfg['routes.k']}")
    for key in ("xt.k", "xt.r", "xt.beta", "xt.pitch"):
        if cfg[key] <= 0:
            errors.append(f"{key}: must be > 0, got {cfg[key]}")
    for name in cfg["modulation.enabled"]:
        if name not in MODULATIONS_BY_NAME:
            errors.append(
                f"modulation.enabled: unknown format {name!r} "
                f"(known: {', '.join(MODULATIONS_BY_NAME)})"
            )
    if cfg["traffic.load_erlang"] <= 0:
        errors.append(f"traffic.load_erlang: must be > 0, got {cfg['traffic.load_erlang']}")
    if cfg["traffic.mean_holding"] <= 0:
        errors.append(
            f"traffic.mean_holding: must be > 0, got {cfg['traffic.mean_holding']}"
        )
    if not (0 < cfg["traffic.bitrate_min"] <= cfg["traffic.bitrate_max"]):
        errors.append(
            "traffic.bitrate_min/max: need 0 < min <= max, got "
            f"[{cfg['traffic.bitrate_min']}, {cfg['traffic.bitrate_max']}]"
        )
    if cfg["traffic.discrete_step"] < 0:
        errors.append(
            f"traffic.discrete_step: must be >= 0, got {cfg['traffic.discrete_step']}"
        )
    if cfg["engine.window_size"] < 1:
        errors.append(f"engine.window_size: must be >= 1, got {cfg['engine.window_size']}")
    slots = cfg["slots"]
    expected_lo = 0
    for ub, lo, hi in sorted(cfg["scma.partitions"]):
        if lo != expected_lo or hi <= lo:
            errors.append(
                f"scma.partitions: regions must tile [0, {slots}) in order, "
                f"bad region [{lo}, {hi})"
            )
            break
        expected_lo = hi
    else:
        if expected_lo != slots:
            errors.append(
                f"scma.partitions: regions cover [0, {expected_lo}) "
                f"but the grid has {slots} slots"
            )
    if cfg["rl.requests_per_episode"] < 1:
        errors.append(
            f"rl.requests_per_episode: must be >= 1, got {cfg['rl.requests_per_episode']}"
        )
    if cfg["rl.action_mode"] not in ACTION_MODES:
        errors.append(
            f"rl.action_mode: must be one of {', '.join(ACTION_MODES)}, "
            f"got {cfg['rl.action_mode']!r}"
        )
    if cfg["rl.blocks_per_pair"] < 1:
        errors.append(f"rl.blocks_per_pair: must be >= 1, got {cfg['rl.blocks_per_pair']}")
    if cfg["rl.features_per_block"] not in (1, 3):
        errors.append(
            f"rl.features_per_block: must be 1 or 3, got {cfg['rl.features_per_block']}"
        )
    if cfg["rl.reward_feature"] not in REWARD_FEATURES:
        errors.append(
            f"rl.reward_feature: must be one of {', '.join(REWARD_FEATURES)}, "
            f"got {cfg['rl.reward_feature']!r}"
        )
    return errors


# -- typed builders ---------------------------------------------------------


def xt_params(cfg: Dict) -> XtParams:
    return XtParams(
        coupling_coefficient=cfg["xt.k"],
        bend_radius=cfg["xt.r"],
        propagation_constant=cfg["xt.beta"],
        core_pitch=cfg["xt.pitch"],
        occupancy_aware=cfg["xt.occupancy_aware"],
    )


def sim_config(cfg: Dict) -> SimConfig:
    return SimConfig(
        slots=cfg["slots"],
        guard_slots=cfg["guard_slots"],
        slot_ghz=cfg["slot_ghz"],
        enabled_modulations=cfg["modulation.enabled"],
        xt=xt_params(cfg),
        window_size=cfg["engine.window_size"],
    )


def traffic_config(
    cfg: Dict, load_erlang: Optional[float] = None, seed: Optional[int] = None
) -> TrafficConfig:
    return TrafficConfig(
        load_erlang=cfg["traffic.load_erlang"] if load_erlang is None else load_erlang,
        mean_holding=cfg["traffic.mean_holding"],
        seed=cfg["traffic.seed"] if seed is None else seed,
        bitrate_min=cfg["traffic.bitrate_min"],
        bitrate_max=cfg["traffic.bitrate_max"],
        discrete_step=cfg["traffic.discrete_step"],
    )


def episode_config(cfg: Dict) -> EpisodeConfig:
    return EpisodeConfig(
        requests_per_episode=cfg["rl.requests_per_episode"],
        reset_state_on_episode=cfg["rl.reset_state_on_episode"],
        action_mode=cfg["rl.action_mode"],
        blocks_per_pair=cfg["rl.blocks_per_pair"],
        features_per_block=cfg["rl.features_per_block"],
        reward_feature=cfg["rl.reward_feature"],
    )
