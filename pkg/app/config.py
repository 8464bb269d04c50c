from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple

from dotenv import dotenv_values, load_dotenv
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.exceptions import ConfigurationError
from app.schemas.network import NetworkConfig
from app.schemas.training import TrainConfig

load_dotenv()


class Settings(BaseSettings):
    log_level: str = "INFO"
    threads: int = 1
    compute_dtype: Literal["float64", "float32"] = "float64"
    score_log_base: Literal["natural", "log10", "log2"] = "natural"
    psnr_peak: float = 1.0
    mse_floor: float = 1e-10
    psnr_floor: float = 1e-3

    model_config = SettingsConfigDict(
        env_prefix="DVP_",
        env_file=None,
        case_sensitive=False,  # allow uppercase env vars
        extra="ignore",
    )


@lru_cache()
def get_settings():
    return Settings()


_LIST_FIELDS = {"encoder_channels", "loss_layer_weights"}


def _coerce(key: str, raw: Optional[str]) -> Any:
    if raw is None:
        raise ConfigurationError(f"Config key '{key}' has no value")
    if key in _LIST_FIELDS:
        return [item.strip() for item in raw.split(",") if item.strip()]
    return raw.strip()


def load_run_config(
    path: Optional[Path],
    overrides: Optional[Dict[str, Any]] = None,
) -> Tuple[NetworkConfig, TrainConfig]:
    """
    Read a flat ``key = value`` file into a (NetworkConfig, TrainConfig) pair.

    Keys are routed by field name; anything that is not a field of either
    model is rejected. ``overrides`` (e.g. CLI flags) win over file values.
    """
    network_fields = set(NetworkConfig.model_fields)
    train_fields = set(TrainConfig.model_fields)

    values: Dict[str, Any] = {}
    if path is not None:
        if not Path(path).is_file():
            raise ConfigurationError(f"Config file not found: {path}")
        for key, raw in dotenv_values(path).items():
            key = key.strip().lower()
            if key not in network_fields | train_fields:
                raise ConfigurationError(f"Unknown config key '{key}' in {path}")
            values[key] = _coerce(key, raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    try:
        net_cfg = NetworkConfig(**{k: v for k, v in values.items() if k in network_fields})
        train_cfg = TrainConfig(**{k: v for k, v in values.items() if k in train_fields})
    except ValidationError as exc:
        raise ConfigurationError(str(exc)) from exc
    return net_cfg, train_cfg
