"""TOML deployment configuration.

One file describes one election deployment: the election itself (threshold
schedule, rate caps, response mode), roster and seed file paths, the scorer
provider, the store root, a default source, and service settings. All paths
are resolved relative to the config file's directory so a deployment folder
can be moved around as a unit.
"""

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib  # Python 3.11+
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .common import parse_rfc3339
from .errors import ParityError
from .ingest import LiveSpec, ReplaySpec, SourceSpec, SyntheticSpec
from .roster import Election, RateCaps, ResponseMode, ThresholdPhase

DEFAULT_RATE_CAPS = {"per_day": 100, "window_seconds": 900, "window_cap": 15}


def _timestamp(value, where: str) -> dt.datetime:
    if isinstance(value, dt.datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=dt.timezone.utc)
        return value
    if isinstance(value, dt.date):
        return dt.datetime(value.year, value.month, value.day, tzinfo=dt.timezone.utc)
    if isinstance(value, str):
        return parse_rfc3339(value)
    raise ParityError("CONFIG_INVALID", f"{where}: expected a timestamp, got {value!r}")


@dataclass(frozen=True)
class ScorerConfig:
    provider: str = "lexicon"  # "lexicon" | "http"
    lexicon_path: Path | None = None  # term -> weight JSON map
    floor: float = 0.01
    base_url: str | None = None  # http provider; falls back to SCORER_BASE_URL


@dataclass(frozen=True)
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    page_size_default: int = 50
    cors_origins: tuple[str, ...] = ()


@dataclass(frozen=True)
class AppConfig:
    path: Path
    election: Election
    roster_path: Path
    seed_files: tuple[Path, ...]
    library_snapshot: Path | None
    scorer: ScorerConfig
    store_root: Path
    source: SourceSpec | None
    run_seed: int
    decisions_path: Path | None
    manifest_path: Path | None
    api: ApiConfig
    lexicon_path: Path | None
    study_path: Path | None
    labels_path: Path | None


def parse_source_spec(text: str, base_dir: Path) -> SourceSpec:
    """Parse a source argument: replay:<path>, synthetic:key=value[,...],
    or live:<endpoint>."""
    kind, sep, rest = text.partition(":")
    if not sep:
        raise ParityError("CONFIG_INVALID", f"source {text!r} must look like kind:details")
    if kind == "replay":
        return ReplaySpec(path=_resolve(base_dir, rest))
    if kind == "live":
        return LiveSpec(endpoint=rest)
    if kind == "synthetic":
        params: dict[str, str] = {}
        for part in rest.split(","):
            if not part:
                continue
            key, eq, value = part.partition("=")
            if not eq:
                raise ParityError("CONFIG_INVALID", f"synthetic source part {part!r} is not key=value")
            params[key.strip()] = value.strip()
        try:
            return SyntheticSpec(
                seed=int(params.get("seed", "0")),
                volume=int(params.get("volume", "100")),
                toxic_fraction=float(params.get("toxic_fraction", "0")),
                mention_handles=tuple(
                    h for h in params.get("mentions", "candidate_one").split("+") if h
                ),
            )
        except ValueError as exc:
            raise ParityError("CONFIG_INVALID", f"synthetic source: {exc}") from exc
    raise ParityError("CONFIG_INVALID", f"unknown source kind {kind!r}")


def _resolve(base: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else (base / p).resolve()


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    if not path.exists():
        raise ParityError("CONFIG_INVALID", f"config file not found: {path}")
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ParityError("CONFIG_INVALID", f"{path}: {exc}") from exc
    base = path.parent.resolve()

    try:
        e = data["election"]
        schedule = tuple(
            ThresholdPhase(
                effective_from=_timestamp(p["effective_from"], "threshold_phase"),
                live_threshold=float(p["live_threshold"]),
            )
            for p in e["threshold_phase"]
        )
        caps_data = {**DEFAULT_RATE_CAPS, **e.get("rate_caps", {})}
        election = Election(
            id=e["id"],
            name=e.get("name", e["id"]),
            country=e.get("country", ""),
            start_at=_timestamp(e["start_at"], "election.start_at"),
            end_at=_timestamp(e["end_at"], "election.end_at"),
            threshold_schedule=schedule,
            analysis_threshold_default=float(e.get("analysis_threshold", 0.9)),
            response_mode=ResponseMode(e.get("response_mode", "OWN_TIMELINE")),
            rate_caps=RateCaps(
                per_day=int(caps_data["per_day"]),
                window_seconds=int(caps_data["window_seconds"]),
                window_cap=int(caps_data["window_cap"]),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParityError("CONFIG_INVALID", f"{path}: [election] section: {exc}") from exc

    roster = data.get("roster", {})
    if "path" not in roster:
        raise ParityError("CONFIG_INVALID", f"{path}: [roster] needs a path")

    library = data.get("library", {})
    scorer_data = data.get("scorer", {})
    provider = scorer_data.get("provider", "lexicon")
    if provider not in ("lexicon", "http"):
        raise ParityError("CONFIG_INVALID", f"{path}: unknown scorer provider {provider!r}")
    scorer = ScorerConfig(
        provider=provider,
        lexicon_path=(
            _resolve(base, scorer_data["lexicon_path"]) if "lexicon_path" in scorer_data else None
        ),
        floor=float(scorer_data.get("floor", 0.01)),
        base_url=scorer_data.get("base_url"),
    )

    source_data = data.get("source", {})
    source: SourceSpec | None = None
    if "spec" in source_data:
        source = parse_source_spec(source_data["spec"], base)

    run = data.get("run", {})
    api_data = data.get("api", {})
    api = ApiConfig(
        host=api_data.get("host", "127.0.0.1"),
        port=int(api_data.get("port", 8000)),
        page_size_default=int(api_data.get("page_size", 50)),
        cors_origins=tuple(api_data.get("cors_origins", [])),
    )
    annotation = data.get("annotation", {})
    lexicon = data.get("lexicon", {})

    return AppConfig(
        path=path.resolve(),
        election=election,
        roster_path=_resolve(base, roster["path"]),
        seed_files=tuple(_resolve(base, s) for s in library.get("seed_files", [])),
        library_snapshot=(
            _resolve(base, library["snapshot"]) if "snapshot" in library else None
        ),
        scorer=scorer,
        store_root=_resolve(base, data.get("store", {}).get("root", "data")),
        source=source,
        run_seed=int(run.get("seed", 0)),
        decisions_path=_resolve(base, run["decisions"]) if "decisions" in run else None,
        manifest_path=_resolve(base, run["manifest"]) if "manifest" in run else None,
        api=api,
        lexicon_path=_resolve(base, lexicon["path"]) if "path" in lexicon else None,
        study_path=_resolve(base, annotation["study"]) if "study" in annotation else None,
        labels_path=_resolve(base, annotation["labels"]) if "labels" in annotation else None,
    )
