"""Plain-text key=value experiment configuration."""

from dataclasses import dataclass, fields

from .propagation import PropagationParams
from .scene import SceneConfig

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = stripped.split("=", 1)
        out[key.strip()] = value.strip()
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Scene generation plus channel parameters for one experiment run.

    Every key has a default matching the reference urban setup: a 256 m
    area on a 64 x 64 grid, frequencies 900/1500/1800/2100 MHz with
    1800 MHz as the unobserved target.
    """

    scene: SceneConfig = SceneConfig()
    channel: PropagationParams = PropagationParams()
    noise_sigma_db: float = 0.0  # receiver measurement noise, off by default

    @classmethod
    def from_mapping(cls, values: dict[str, str]) -> "ExperimentConfig":
        scene_kwargs = {}
        channel_kwargs = {}
        noise_sigma_db = 0.0
        scene_fields = {f.name: f for f in fields(SceneConfig)}
        channel_fields = {f.name: f for f in fields(PropagationParams)}
        for key, raw in values.items():
            if key in scene_fields:
                if key == "frequencies_mhz":
                    scene_kwargs[key] = tuple(float(v) for v in raw.split(","))
                elif key == "broadband":
                    scene_kwargs[key] = _parse_bool(raw)
                elif key in ("cells_per_side", "min_buildings", "max_buildings",
                             "min_transmitters", "max_transmitters"):
                    scene_kwargs[key] = int(raw)
                else:
                    scene_kwargs[key] = float(raw)
            elif key in channel_fields:
                channel_kwargs[key] = float(raw)
            elif key == "noise_sigma_db":
                noise_sigma_db = float(raw)
            else:
                raise ValueError(f"unknown configuration key: {key}")
        return cls(
            scene=SceneConfig(**scene_kwargs),
            channel=PropagationParams(**channel_kwargs),
            noise_sigma_db=noise_sigma_db,
        )

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_mapping(parse_key_values(fh.read()))

    def describe(self) -> dict[str, str]:
        """Flat view of every resolved value, for run manifests."""
        out = {}
        for f in fields(SceneConfig):
            value = getattr(self.scene, f.name)
            if f.name == "frequencies_mhz":
                value = ",".join(str(v) for v in value)
            out[f.name] = str(value)
        for f in fields(PropagationParams):
            out[f.name] = str(getattr(self.channel, f.name))
        out["noise_sigma_db"] = str(self.noise_sigma_db)
        return out
