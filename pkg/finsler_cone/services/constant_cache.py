import json
import logging
from pathlib import Path
from typing import Callable, Dict, Optional

from pydantic import BaseModel

from finsler_cone.core.config import settings

logger = logging.getLogger(__name__)


class CachedConstant(BaseModel):
    name: str
    value: float


class ConstantCache:
    """Storage for memoized catalog constants (JSON file at FINSLER_CONE_CACHE)."""

    _instance: Optional["ConstantCache"] = None

    def __init__(self, storage_path: Optional[str] = None):
        self.storage_path = Path(storage_path) if storage_path else None
        self.constants: Dict[str, CachedConstant] = {}
        self._load_constants()

    @classmethod
    def get_cache(cls) -> "ConstantCache":
        if cls._instance is None:
            cls._instance = ConstantCache(settings.CACHE)
        return cls._instance

    @classmethod
    def reset(cls, storage_path: Optional[str] = None) -> "ConstantCache":
        cls._instance = ConstantCache(storage_path)
        return cls._instance

    def _load_constants(self) -> None:
        if self.storage_path is None or not self.storage_path.exists():
            return
        try:
            data = json.loads(self.storage_path.read_text())
            for name, entry in data.items():
                self.constants[name] = CachedConstant(**entry)
        except Exception as e:
            logger.warning(f"Ignoring unreadable constant cache {self.storage_path}: {e}")

    def save_constants(self) -> None:
        if self.storage_path is None:
            return
        try:
            self.storage_path.parent.mkdir(parents=True, exist_ok=True)
            data = {name: c.model_dump() for name, c in sorted(self.constants.items())}
            self.storage_path.write_text(json.dumps(data, indent=2, sort_keys=True))
        except Exception as e:
            logger.error(f"Error saving constant cache {self.storage_path}: {e}", exc_info=True)

    def get(self, name: str) -> Optional[float]:
        entry = self.constants.get(name)
        return entry.value if entry else None

    def put(self, name: str, value: float) -> None:
        self.constants[name] = CachedConstant(name=name, value=float(value))
        self.save_constants()

    def get_or_compute(self, name: str, compute: Callable[[], float]) -> float:
        cached = self.get(name)
        if cached is not None:
            return cached
        value = float(compute())
        logger.debug(f"Computed constant {name} = {value!r}")
        self.put(name, value)
        return value
