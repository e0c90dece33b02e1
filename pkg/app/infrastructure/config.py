import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Iterable, Optional

from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.domain.autodiff.rng import Rng
from app.domain.exceptions import ConfigurationError
from app.schemas.baselines import TifuConfig
from app.schemas.evaluation import EvalConfig
from app.schemas.ingest import DataConfig
from app.schemas.model import ModelConfig
from app.schemas.synth import SynthSpec
from app.schemas.training import TrainConfig

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_NAME = "run_config.json"
SEED_STREAMS = ("split", "init", "shuffle", "dropout", "synth", "bench")


class RunConfig(BaseSettings):
    """All tunables, namespaced per module. Environment: CASE_<SECTION>__<KEY>."""
    seed: int = Field(0, ge=0, lt=2**64)
    threads: int = Field(1, ge=1, description="cap on worker threads used by evaluation and baselines")

    data: DataConfig = Field(default_factory=DataConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    tifu: TifuConfig = Field(default_factory=TifuConfig)
    synth: SynthSpec = Field(default_factory=SynthSpec)
    eval: EvalConfig = Field(default_factory=EvalConfig)

    model_config = SettingsConfigDict(
        env_prefix="CASE_",
        env_nested_delimiter="__",
        extra="forbid",
        frozen=True,
        protected_namespaces=(),
    )

    def rng(self, stream: str) -> Rng:
        """Named child of the root seed; train.seed / synth.seed override their streams."""
        if stream in ("shuffle", "dropout", "init") and self.train.seed is not None:
            return Rng(self.train.seed).child(stream)
        if stream == "synth" and self.synth.seed is not None:
            return Rng(self.synth.seed).child(stream)
        return Rng(self.seed).child(stream)

    def seed_tree(self) -> dict[str, str]:
        return {stream: repr(self.rng(stream)) for stream in SEED_STREAMS}


def _read_file(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise ConfigurationError(f"config file {path} does not exist")
    try:
        if path.suffix == ".toml":
            with path.open("rb") as fh:
                return tomllib.load(fh)
        if path.suffix == ".json":
            return json.loads(path.read_text(encoding="utf-8"))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot parse config file {path}: {e}")
    raise ConfigurationError(f"config file {path} must be .toml or .json")


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _assign(values: dict[str, Any], dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = values
    for key in keys[:-1]:
        child = node.setdefault(key, {})
        if not isinstance(child, dict):
            raise ConfigurationError(f"override {dotted}: {key} is not a section")
        node = child
    node[keys[-1]] = value


def parse_overrides(pairs: Iterable[str]) -> dict[str, Any]:
    """Turn ``section.key=value`` strings into a nested dict; values are JSON when they parse."""
    values: dict[str, Any] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigurationError(f"override '{pair}' must look like section.key=value")
        key, raw = pair.split("=", 1)
        _assign(values, key.strip(), _parse_value(raw.strip()))
    return values


def merge_values(base: dict[str, Any], extra: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_values(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: Optional[Path] = None, overrides: Optional[dict[str, Any]] = None) -> RunConfig:
    """
    Resolve the run configuration.

    Priority, lowest first: defaults, CASE_* environment variables, config file,
    CLI overrides.
    """
    values = _read_file(Path(path)) if path else {}
    if overrides:
        values = merge_values(values, overrides)
    try:
        config = RunConfig(**values)
    except ValidationError as e:
        raise ConfigurationError(f"invalid configuration: {e}")
    logger.info("Seed tree: %s", config.seed_tree())
    return config


def write_resolved_config(config: RunConfig, directory: Path) -> Path:
    """Write the fully-resolved config next to an output artifact."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / RESOLVED_CONFIG_NAME
    target.write_text(config.model_dump_json(indent=2, by_alias=True), encoding="utf-8")
    return target

