# --------------------------------------------------
# src/utils/fingerprint.py
# --------------------------------------------------
# Serialização determinística + hash SHA-256
# - json.dumps com sort_keys=True: a ordem das chaves não afeta o hash
# - mesma configuração resolvida → mesmo fingerprint → relatórios byte a byte iguais

import hashlib
import json
from typing import Any


def canonical_json(body: Any, *, indent: int | None = None) -> str:
    """JSON estável (chaves ordenadas, sem NaN)."""
    return json.dumps(body, sort_keys=True, ensure_ascii=False, indent=indent, allow_nan=False)


def body_hash(body: Any) -> str:
    """SHA-256 do JSON canônico de `body`."""
    raw = canonical_json(body).encode("utf-8")
    return hashlib.sha256(raw).hexdigest()
