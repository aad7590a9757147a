"""Read-only Tezos RPC client: fetch the code of a deployed contract."""
from __future__ import annotations

import json
import os
import re
import urllib.error
import urllib.request

from .errors import FetchError

DEFAULT_RPC = "https://mainnet.api.tez.ie"
RPC_ENV = "TEZLA_RPC_URL"
_ADDRESS = re.compile(r"(KT1|tz1|tz2|tz3)[1-9A-HJ-NP-Za-km-z]{33}")


def default_rpc() -> str:
    return os.environ.get(RPC_ENV, DEFAULT_RPC)


def valid_address(address: str) -> bool:
    return bool(_ADDRESS.fullmatch(address))


def script_url(rpc_url: str, address: str) -> str:
    return f"{rpc_url.rstrip('/')}/chains/main/blocks/head/context/contracts/{address}/script"


def fetch_contract(rpc_url: str, address: str, timeout: float = 20.0) -> str:
    """GET the contract script and return its ``code`` member as Micheline JSON text."""
    if not valid_address(address):
        raise ValueError(f"not a contract address: {address!r}")
    req = urllib.request.Request(script_url(rpc_url, address), headers={"Accept": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            body = resp.read().decode("utf-8")
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode("utf-8", "replace").strip()
        raise FetchError(f"RPC answered HTTP {exc.code} for {address}: {detail or exc.reason}") from None
    except (urllib.error.URLError, OSError) as exc:
        raise FetchError(f"cannot reach {rpc_url}: {getattr(exc, 'reason', exc)}") from None
    try:
        doc = json.loads(body)
    except json.JSONDecodeError:
        raise FetchError(f"RPC returned non-JSON for {address}") from None
    if not isinstance(doc, dict) or "code" not in doc:
        raise FetchError(f"no script at {address}: {body[:200]}")
    return json.dumps(doc["code"])
