import json
import os
import shutil
from collections import Counter
from typing import Optional

from ..logging import logger
from . import canonical_json, sha256_digest


class ComplexCache:
    """One JSON document per (rule digest, level) under ``root``.

    Entries carry a checksum of their payload; an entry that fails to parse or
    to verify is reported as a miss and overwritten by the next store.
    """

    def __init__(self, root: str):
        self.root = root
        self.counters = Counter()

    def path(self, digest: str, level: int) -> str:
        return os.path.join(self.root, digest.removeprefix("0x")[:32], f"level-{level}.json")

    def load(self, digest: str, level: int):
        from ..complex import CellComplex

        path = self.path(digest, level)
        if not os.path.exists(path):
            self.counters["misses"] += 1
            return None
        try:
            with open(path, "r", encoding="utf-8") as f:
                entry = json.load(f)
            payload = entry["payload"]
            if sha256_digest(canonical_json(payload)) != entry["checksum"]:
                raise ValueError("checksum mismatch")
            cx = CellComplex.from_dict(payload)
            if cx.level != level:
                raise ValueError(f"entry holds level {cx.level}")
        except (ValueError, KeyError, TypeError) as e:
            logger.warning(f"corrupted cache entry {path} ({e}), rebuilding")
            self.counters["rebuilds"] += 1
            return None
        self.counters["hits"] += 1
        logger.debug(f"cache hit: level {level} from {path}")
        return cx

    def store(self, digest: str, cx) -> str:
        path = self.path(digest, cx.level)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        payload = cx.to_dict()
        entry = {"checksum": sha256_digest(canonical_json(payload)), "payload": payload}
        tmp = f"{path}.tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            f.write(canonical_json(entry))
        os.replace(tmp, path)
        self.counters["stores"] += 1
        return path

    def entries(self) -> list[str]:
        if not os.path.isdir(self.root):
            return []
        found = []
        for dirpath, _, files in os.walk(self.root):
            found.extend(os.path.join(dirpath, f) for f in files if f.endswith(".json"))
        return sorted(found)

    def clear(self) -> int:
        removed = len(self.entries())
        if os.path.isdir(self.root):
            shutil.rmtree(self.root)
        logger.info(f"cleared {removed} cache entries from {self.root}")
        return removed


def open_cache(root: Optional[str]) -> Optional[ComplexCache]:
    return ComplexCache(root) if root else None
