# borsuk/certificates.py
"""
Certificate JSON codec and independent re-verification.

Field order is fixed (claim, n, p, subset, value, exhaustive, checksum) so
the serialized text, and any hash taken over it, is reproducible.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, List

from .fw_polynomials import alpha, is_prime
from .ortho_graph import (
    Certificate,
    Claim,
    build_graph,
    is_ortho_free,
    members_of,
    parts_lower_bound,
    search_max_independent,
    subset_checksum,
)
from .hypercube_core import build_M, check_construction_dimension

logger = logging.getLogger(__name__)

FIELD_ORDER = ("claim", "n", "p", "subset", "value", "exhaustive", "checksum")
# the exhaustive search is re-run during recheck up to this dimension
RESEARCH_LIMIT = 8


def certificate_to_dict(cert: Certificate) -> Dict[str, Any]:
    return {
        "claim": cert.claim.value,
        "n": cert.n,
        "p": cert.p,
        "subset": list(cert.subset),
        "value": str(cert.value),
        "exhaustive": cert.exhaustive,
        "checksum": cert.checksum,
    }


def certificate_to_json(cert: Certificate) -> str:
    return json.dumps(certificate_to_dict(cert), indent=2) + "\n"


def certificate_from_json(text: str) -> Certificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"certificate is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ValueError("certificate must be a JSON object")
    missing = [k for k in FIELD_ORDER if k not in data]
    if missing:
        raise ValueError(f"certificate is missing fields: {', '.join(missing)}")
    try:
        claim = Claim(data["claim"])
    except ValueError:
        raise ValueError(f"unknown claim {data['claim']!r}") from None
    subset = data["subset"]
    if not isinstance(subset, list) or not all(isinstance(m, int) and not isinstance(m, bool) for m in subset):
        raise ValueError("subset must be an array of integers")
    if not isinstance(data["value"], str) or not data["value"].isdigit():
        raise ValueError("value must be a decimal string")
    if not isinstance(data["exhaustive"], bool):
        raise ValueError("exhaustive must be a boolean")
    for key in ("n", "p"):
        if not isinstance(data[key], int) or isinstance(data[key], bool):
            raise ValueError(f"{key} must be an integer")
    return Certificate(
        claim=claim,
        n=data["n"],
        p=data["p"],
        subset=tuple(subset),
        value=int(data["value"]),
        exhaustive=data["exhaustive"],
        checksum=str(data["checksum"]),
    )


@dataclass(frozen=True)
class RecheckItem:
    check: str
    passed: bool
    detail: str


def recheck_certificate(cert: Certificate) -> List[RecheckItem]:
    """Re-derive every statement the certificate makes; nothing is taken on trust."""
    items: List[RecheckItem] = []

    def record(check: str, passed: bool, detail: str = "") -> None:
        items.append(RecheckItem(check, bool(passed), detail))
        log = logger.info if passed else logger.error
        log(f"recheck {check}: {'ok' if passed else 'FAILED'} {detail}".rstrip())

    try:
        check_construction_dimension(cert.n)
    except ValueError as e:
        record("parameters", False, str(e))
        return items
    record("parameters", cert.p == cert.n // 4, f"n={cert.n}, p={cert.p}")
    expected = subset_checksum(cert.n, cert.subset)
    record("checksum", cert.checksum == expected, expected)
    record("ordering", list(cert.subset) == sorted(set(cert.subset)), "subset ascending and duplicate-free")

    if cert.claim is Claim.PART_COUNT_LOWER_BOUND:
        try:
            bound = parts_lower_bound(cert.n)
        except ValueError as e:
            record("parts_bound", False, str(e))
        else:
            record("parts_bound", cert.value == bound and not cert.subset, f"ceil(2^(n-2)/alpha(n)) = {bound}")
        return items

    try:
        members = members_of(cert.n, cert.subset)
    except ValueError as e:
        record("membership", False, str(e))
        return items
    record("membership", True, f"{len(members)} members of M({cert.n})")
    record("ortho_free", is_ortho_free(members), "no pair with zero dot product")
    record("value", cert.value == len(members), f"value {cert.value}, subset size {len(members)}")

    if cert.claim is Claim.MAX_ORTHO_FREE:
        record("exhaustive_flag", cert.exhaustive, "MAX_ORTHO_FREE requires an exhaustive search")
        if is_prime(cert.p):
            cap = alpha(cert.n)
            record("alpha_cap", cert.value <= cap, f"value {cert.value} <= alpha({cert.n}) = {cap}")
        if cert.n <= RESEARCH_LIMIT:
            result = search_max_independent(build_graph(build_M(cert.n)).adjacency)
            record("maximum", result.exhaustive and len(result.members) == cert.value, f"re-searched maximum {len(result.members)}")
    return items


def recheck_passed(items: List[RecheckItem]) -> bool:
    return bool(items) and all(i.passed for i in items)
