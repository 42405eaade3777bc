import hashlib
import json

from .general import *


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def sha256_digest(text: str) -> str:
    hash_sha256 = hashlib.sha256()
    hash_sha256.update(text.encode("utf-8"))
    return f"0x{hash_sha256.hexdigest()}"
