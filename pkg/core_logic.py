# core_logic.py
"""
Orchestration for every subcommand. Each *_core function returns a dict
with "status" ("success" | "failed" | "error"), "message" and its payload;
exceptions are logged and turned into status "error", never raised.
Rendering to json / csv / markdown / pdf happens in render_* below.
"""

import json
import logging
import random
import time
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from borsuk import report_gen
from borsuk.bound_engine import ScanLimitExceeded, scan_thresholds
from borsuk.certificates import certificate_from_json, certificate_to_json, recheck_certificate, recheck_passed
from borsuk.fw_polynomials import (
    alpha,
    check_nondivisibility,
    dimension_bound_check,
    evaluation_matrix,
    g_eval,
    independence_rank,
    is_prime,
    monomial_basis,
    monomial_label,
    nondivisibility_witness,
    substitution_mismatches,
)
from borsuk.hypercube_core import (
    QuadVertex,
    all_vertices,
    build_M,
    dist_sq,
    dot,
    dot_matrix,
    embed_f,
    image_diameter_sq,
    quad_dist_sq,
    quad_dot,
    sign_matrix,
)
from borsuk.ortho_graph import (
    build_graph,
    check_observation,
    greedy_coloring,
    grow_ortho_free,
    max_ortho_free,
    members_of,
    parts_certificate,
)
from utils import markdown_table, safe_read, sha256_file

logger = logging.getLogger(__name__)

TOOL_VERSION = "v1.0.0"
# largest n for which verify and embed scan every pair of M
EXHAUSTIVE_LIMIT = 12
# full E_2^n pair scans with the scalar functions
SCALAR_CUBE_LIMIT = 8
SUBSTITUTION_SAMPLE = 1000
SCALAR_SAMPLE = 2000
RANDOM_COLORINGS = 3
# p above this has |M| >= 2^18; the graph is not built
GRAPH_PRIME_LIMIT = 3
# fraction of the lemma budget spent growing the family above GRAPH_PRIME_LIMIT
GROWTH_SHARE = 0.5

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass(frozen=True)
class CheckResult:
    check: str
    status: str
    detail: str


def build_metadata(**params) -> Dict[str, str]:
    """Run metadata for reports; deterministic (no clock, host or user)."""
    meta = {"Tool Version": TOOL_VERSION}
    for k, v in params.items():
        if v is not None:
            meta[k] = str(v)
    return meta


# ---------------------------
# verify
# ---------------------------

def _pairs_sample(rng: random.Random, size: int, count: int) -> List[Tuple[int, int]]:
    return [(rng.randrange(size), rng.randrange(size)) for _ in range(count)]


def _check_metric(n, m, rng) -> CheckResult:
    cube = all_vertices(n)
    if n <= SCALAR_CUBE_LIMIT:
        pairs = [(i, j) for i in range(len(cube)) for j in range(len(cube))]
        scope = f"all {len(pairs)} ordered pairs of E_2^{n}"
    else:
        pairs = _pairs_sample(rng, len(cube), SCALAR_SAMPLE)
        scope = f"{SCALAR_SAMPLE} seeded pairs of E_2^{n}"
    coords = [v.coords() for v in cube]
    for i, j in pairs:
        direct = sum((a - b) ** 2 for a, b in zip(coords[i], coords[j]))
        if not (dist_sq(cube[i], cube[j]) == direct == 2 * n - 2 * dot(cube[i], cube[j])):
            return CheckResult("metric_identity", FAIL, f"mismatch at masks {cube[i].neg_mask:#x}, {cube[j].neg_mask:#x}")
    # bulk: every pair of M, coordinate sums against 2n - 2 x.y
    x = sign_matrix(m.members)
    d = x @ x.T
    for i in range(len(m)):
        if not np.array_equal(((x - x[i]) ** 2).sum(axis=1), 2 * n - 2 * d[i]):
            return CheckResult("metric_identity", FAIL, f"bulk mismatch in row {i}")
    return CheckResult("metric_identity", PASS, f"|x,y|^2 = sum (x_i-y_i)^2 = 2n - 2x.y on {scope} and all pairs of M")


def _check_embedding(n, m) -> Tuple[CheckResult, Optional[np.ndarray]]:
    tables = []
    for v in m:
        fx = embed_f(v)
        if fx != embed_f(-v):
            return CheckResult("embedding_tables", FAIL, f"f(x) != f(-x) at {v.neg_mask:#x}"), None
        tables.append(fx)
    if len(set(tables)) != len(m):
        return CheckResult("embedding_tables", FAIL, "f is not injective on M"), None
    flat = np.stack([t.flat() for t in tables])
    return CheckResult("embedding_tables", PASS, f"unit diagonal, symmetric, f(x) = f(-x), injective on {len(m)} members"), flat


def _check_antipodal_fibres(n) -> CheckResult:
    # f(x) = f(y) => y = +-x, over the whole cube
    cube = all_vertices(n)
    seen: Dict[QuadVertex, List[int]] = {}
    for v in cube:
        seen.setdefault(embed_f(v), []).append(v.neg_mask)
    full = (1 << n) - 1
    for masks in seen.values():
        if len(masks) != 2 or masks[0] ^ masks[1] != full:
            return CheckResult("embedding_fibres", FAIL, f"fibre {masks} is not an antipodal pair")
    return CheckResult("embedding_fibres", PASS, f"every fibre of f on E_2^{n} is {{x, -x}}")


def _check_quad_identities(n, m, flat, rng) -> List[CheckResult]:
    d = dot_matrix(m.members)
    gram = flat @ flat.T
    results = []
    sample = _pairs_sample(rng, len(m), SCALAR_SAMPLE)
    scalar_ok = all(quad_dot(m[i], m[j]) == int(gram[i, j]) for i, j in sample)
    if np.array_equal(gram, d * d) and scalar_ok:
        results.append(CheckResult("quad_dot_identity", PASS, "f(x).f(y) = (x.y)^2 on all pairs of M"))
    else:
        results.append(CheckResult("quad_dot_identity", FAIL, "f(x).f(y) differs from (x.y)^2"))

    full = 2 * n * n
    formula = full - 2 * d * d
    for i in range(len(m)):
        if not np.array_equal(((flat - flat[i]) ** 2).sum(axis=1), formula[i]):
            results.append(CheckResult("quad_distance_identity", FAIL, f"row {i} differs from 2n^2 - 2(x.y)^2"))
            break
    else:
        scalar_ok = all(quad_dist_sq(m[i], m[j]) == int(formula[i, j]) for i, j in sample)
        at_max = formula == full
        iff = np.array_equal(at_max, d == 0)
        diameter, pair = image_diameter_sq(m)
        ok = scalar_ok and iff and diameter == full and pair is not None
        detail = f"max |f(x),f(y)|^2 = {diameter} = 2n^2, attained exactly at orthogonal pairs (e.g. indices {pair})"
        results.append(CheckResult("quad_distance_identity", PASS if ok else FAIL, detail))
    return results


def _check_counts(n, m) -> List[CheckResult]:
    masks = m.masks()
    count_ok = len(m) == 1 << (n - 2)
    members_ok = all(not (x & 1) and x.bit_count() % 2 == 0 for x in masks) and masks == sorted(masks)
    out = [CheckResult("vertex_count", PASS if count_ok and members_ok else FAIL, f"|M| = {len(m)} = 2^{n - 2}, ascending, x_1 = +1, even minus count")]
    d = dot_matrix(m.members)
    out.append(CheckResult("dot_divisible_by_4", PASS if bool(np.all(d % 4 == 0)) else FAIL, "every x.y in M is a multiple of 4"))
    return out


def _check_polynomials(n, m, graph, rng) -> List[CheckResult]:
    p = n // 4
    if not is_prime(p):
        return [CheckResult("polynomial_checks", SKIP, f"n/4 = {p} is not prime")]
    out = []

    window = range(0, 6 * p + 1)
    g_ok = all((g_eval(t, p) == 0) == (t % p != 0) for t in window)
    out.append(CheckResult("g_divisibility", PASS if g_ok else FAIL, f"G(t) = 0 mod {p} iff {p} does not divide t, t in 0..{6 * p}"))

    basis = monomial_basis(n, p)
    enumerated = sum(1 for mask in range(1 << (n - 1)) if mask.bit_count() < n // 4)
    count_ok = len(basis) == alpha(n) == enumerated
    out.append(CheckResult("monomial_count", PASS if count_ok else FAIL, f"{len(basis)} square-free monomials of degree <= {p - 1} = alpha({n}) = {alpha(n)}"))

    if p == 2:
        pairs = [(a, b) for a in m for b in m]
        scope = f"all {len(pairs)} pairs"
    else:
        pairs = [(m[i], m[j]) for i, j in _pairs_sample(rng, len(m), SUBSTITUTION_SAMPLE)]
        scope = f"{len(pairs)} seeded pairs"
    bad = substitution_mismatches(pairs, p)
    out.append(CheckResult("substitution_identity", FAIL if bad else PASS, f"Fa~(b) = G(a.b) mod {p} on {scope}" + (f"; first mismatch {bad[0]}" if bad else "")))

    if p == 2:
        w = nondivisibility_witness(m, p)
        out.append(CheckResult("nondivisibility", SKIP, f"needs odd p: a.b = {w[2] if w else '?'} = ±2p for members {w[:2] if w else '?'}"))
        out.append(CheckResult("lemma_ranks", SKIP, "at p = 2 every Fa~ is sum x_i mod 2; the evaluation matrix is all ones"))
    else:
        ok = check_nondivisibility(m, p)
        out.append(CheckResult("nondivisibility", PASS if ok else FAIL, f"distinct non-orthogonal a, b in M: {p} does not divide a.b"))
        family = [m[i] for i in _first_fit(graph)]
        report = independence_rank(family, p)
        e = evaluation_matrix(family, p)
        diagonal = bool(np.all(np.diag(e) != 0)) and bool(np.all(e[~np.eye(len(family), dtype=bool)] == 0))
        ranks_ok = report.independent and report.evaluation_rank == report.family_size and diagonal
        out.append(CheckResult("lemma_ranks", PASS if ranks_ok else FAIL,
                               f"first-fit ortho-free family of {report.family_size}: coefficient rank {report.coefficient_rank}, "
                               f"evaluation rank {report.evaluation_rank}, evaluation matrix diagonal"))
        out.append(CheckResult("dimension_bound", PASS if dimension_bound_check(report.coefficient_rank, n) else FAIL,
                               f"rank {report.coefficient_rank} <= alpha({n}) = {alpha(n)}"))
    return out


def _first_fit(graph) -> List[int]:
    chosen, taken = [], 0
    for i in range(len(graph)):
        if not graph.adjacency[i] & taken:
            chosen.append(i)
            taken |= 1 << i
    return chosen


def _check_observation(graph, rng) -> CheckResult:
    colorings = [("greedy", greedy_coloring(graph))]
    k = max(colorings[0][1]) + 1
    for r in range(RANDOM_COLORINGS):
        colorings.append((f"random#{r}", [rng.randrange(k) for _ in range(len(graph))]))
    parts = 0
    for name, coloring in colorings:
        checks = check_observation(graph, coloring)
        parts += len(checks)
        bad = [c for c in checks if not c.consistent]
        if bad:
            return CheckResult("observation", FAIL, f"{name} coloring, part {bad[0].part}: ortho_free={bad[0].ortho_free}, diameter^2={bad[0].image_diameter_sq}")
    return CheckResult("observation", PASS, f"{len(colorings)} partitions ({parts} parts, greedy uses {k} colors): ortho-free iff image diameter^2 < 2n^2")


def run_verify_core(n: int, seed: int = 0) -> Dict[str, Any]:
    """Run the invariant suite for dimension n."""
    logger.info(f"Starting verification suite for n={n}, seed={seed}")
    rng = random.Random(seed)
    try:
        m = build_M(n)
        checks: List[CheckResult] = []
        checks.extend(_check_counts(n, m))
        checks.append(_check_metric(n, m, rng))
        emb, flat = _check_embedding(n, m)
        checks.append(emb)
        if n <= SCALAR_CUBE_LIMIT:
            checks.append(_check_antipodal_fibres(n))
        if flat is not None:
            checks.extend(_check_quad_identities(n, m, flat, rng))
        graph = build_graph(m)
        checks.extend(_check_polynomials(n, m, graph, rng))
        checks.append(_check_observation(graph, rng))
    except Exception as e:
        logger.error(f"Verification for n={n} aborted: {e}")
        return {"status": "error", "message": f"Verification aborted: {e}", "checks": []}

    for c in checks:
        log = logger.error if c.status == FAIL else logger.info
        log(f"[{c.status}] {c.check}: {c.detail}")
    failed = [c.check for c in checks if c.status == FAIL]
    status = "failed" if failed else "success"
    message = f"{len(checks) - len(failed)}/{len(checks)} checks passed or skipped" + (f"; failed: {', '.join(failed)}" if failed else "")
    return {"status": status, "message": message, "checks": [asdict(c) for c in checks],
            "metadata": build_metadata(n=n, seed=seed)}


# ---------------------------
# lemma
# ---------------------------

def _show(value) -> str:
    return "n/c" if value is None else str(value)


def _rank_text(rank) -> str:
    return f"{_show(rank.coefficient_rank)}/{_show(rank.evaluation_rank)}"


def run_lemma_core(p: int, budget_secs: float, node_limit: Optional[int] = None) -> Dict[str, Any]:
    """Largest ortho-free subset found for n = 4p, with its rank report."""
    n = 4 * p
    logger.info(f"Starting lemma run for p={p} (n={n}), budget {budget_secs}s")
    try:
        if p <= GRAPH_PRIME_LIMIT:
            cert = max_ortho_free(build_graph(build_M(n)), budget_secs, node_limit)
            deadline = None
        else:
            # growth and the rank stage share one wall-clock budget
            deadline = time.monotonic() + budget_secs
            cert = grow_ortho_free(n, budget_secs * GROWTH_SHARE, max_size=node_limit)
        family = members_of(n, cert.subset)
        rank = independence_rank(family, p, deadline)
    except Exception as e:
        logger.error(f"Lemma run for p={p} failed: {e}")
        return {"status": "error", "message": f"Lemma run failed: {e}"}

    cap = alpha(n)
    problems = []
    if cert.exhaustive and cert.value > cap:
        problems.append(f"maximum {cert.value} exceeds alpha({n}) = {cap}")
    if p > 2 and rank.independent is False:
        problems.append(f"Fa~ family of {rank.family_size} has ranks {_rank_text(rank)}")
    for r in (rank.coefficient_rank, rank.evaluation_rank):
        if r is not None and not dimension_bound_check(r, n):
            problems.append(f"rank {r} exceeds alpha({n})")

    kind = "exact maximum" if cert.exhaustive else "best found"
    message = f"p={p}: {kind} ortho-free subset of size {cert.value} (alpha({n}) = {cap}); ranks {_rank_text(rank)}"
    if p == 2 and rank.family_size > 1:
        message += "; at p = 2 the Fa~ coincide, the cap rests on the exhaustive search"
    if rank.coefficient_rank is None or rank.evaluation_rank is None:
        message += "; ranks marked n/c were not computed (basis too wide or budget spent)"
    if problems:
        logger.error("; ".join(problems))
    return {
        "status": "failed" if problems else "success",
        "message": message + ("; " + "; ".join(problems) if problems else ""),
        "certificate": cert,
        "rank": rank,
        "alpha": cap,
        "parts": parts_certificate(n),
        "metadata": build_metadata(p=p, n=n, budget_secs=budget_secs, node_limit=node_limit),
    }


# ---------------------------
# bound
# ---------------------------

def run_bound_core(limit: int) -> Dict[str, Any]:
    logger.info(f"Scanning primes up to {limit} for the first counterexample")
    try:
        reports = scan_thresholds(limit)
    except ScanLimitExceeded as e:
        logger.error(str(e))
        return {"status": "error", "message": str(e), "reports": []}
    except Exception as e:
        logger.error(f"Threshold scan failed: {e}")
        return {"status": "error", "message": f"Threshold scan failed: {e}", "reports": []}
    final = reports[-1]
    return {"status": "success", "message": report_gen.final_line(final), "reports": reports,
            "metadata": build_metadata(limit=limit)}


# ---------------------------
# embed
# ---------------------------

def run_embed_core(n: int) -> Dict[str, Any]:
    """Histogram of |f(x), f(y)|^2 over unordered pairs of M."""
    logger.info(f"Building distance histogram for f(M({n}))")
    try:
        m = build_M(n)
        d = dot_matrix(m.members)
        upper = d[np.triu_indices(len(m), k=1)]
        values = 2 * n * n - 2 * upper * upper
        counts = pd.Series(values).value_counts().sort_index()
        hist = pd.DataFrame({"quad_dist_sq": counts.index.astype(np.int64), "pairs": counts.values.astype(np.int64)})
    except Exception as e:
        logger.error(f"Histogram for n={n} failed: {e}")
        return {"status": "error", "message": f"Histogram failed: {e}"}

    expected_pairs = len(m) * (len(m) - 1) // 2
    top = int(hist["quad_dist_sq"].max())
    ok = int(hist["pairs"].sum()) == expected_pairs and top == 2 * n * n
    message = f"{expected_pairs} pairs, maximum key {top} (2n^2 = {2 * n * n}), {int(hist['pairs'].iloc[-1])} pairs at the maximum"
    return {"status": "success" if ok else "failed", "message": message, "histogram": hist,
            "metadata": build_metadata(n=n)}


# ---------------------------
# recheck-certificate
# ---------------------------

def recheck_certificate_core(path: str) -> Dict[str, Any]:
    text = safe_read(path)
    if text is None:
        return {"status": "error", "message": f"Cannot read certificate: {path}", "checks": []}
    try:
        cert = certificate_from_json(text)
        items = recheck_certificate(cert)
    except Exception as e:
        logger.error(f"Certificate recheck failed: {e}")
        return {"status": "error", "message": f"Certificate recheck failed: {e}", "checks": []}
    checks = [CheckResult(i.check, PASS if i.passed else FAIL, i.detail) for i in items]
    ok = recheck_passed(items)
    return {"status": "success" if ok else "failed",
            "message": f"{cert.claim.value} certificate for n={cert.n}: {'verified' if ok else 'REJECTED'}",
            "checks": [asdict(c) for c in checks],
            "metadata": build_metadata(certificate=path, sha256=sha256_file(path), claim=cert.claim.value)}


# ---------------------------
# Rendering
# ---------------------------

def _json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def render_checks(title: str, result: Dict[str, Any], fmt: str) -> Union[str, bytes]:
    meta = dict(result.get("metadata", {}))
    checks = result.get("checks", [])
    if fmt == "json":
        return _json({"title": title, "status": result["status"], "message": result["message"], "metadata": meta, "checks": checks})
    if fmt == "csv":
        return report_gen.frame_to_csv(report_gen.checks_frame(checks))
    if fmt == "pdf":
        return report_gen.generate_verification_pdf(title, {**meta, "Result": result["message"]}, checks)
    return report_gen.render_checks_markdown(title, {**meta, "Result": result["message"]}, checks)


def render_lemma(result: Dict[str, Any], fmt: str) -> str:
    cert = result["certificate"]
    if fmt == "json":
        return certificate_to_json(cert)
    rank = result["rank"]
    if fmt == "csv":
        if rank.coefficients is None:
            logger.warning("Coefficient rows were not computed; the csv lists the family only")
            df = pd.DataFrame(index=list(cert.subset))
        else:
            columns = [monomial_label(b) for b in rank.basis]
            df = pd.DataFrame(rank.coefficients, index=list(cert.subset), columns=columns)
        df.index.name = "neg_mask"
        return df.to_csv()
    rows = [
        ["claim", cert.claim.value], ["n", cert.n], ["p", cert.p], ["value", cert.value],
        ["exhaustive", cert.exhaustive], ["alpha(n)", result["alpha"]],
        ["coefficient_rank", _show(rank.coefficient_rank)], ["evaluation_rank", _show(rank.evaluation_rank)],
        ["independent", _show(rank.independent)], ["parts_lower_bound", result["parts"].value],
        ["checksum", cert.checksum],
    ]
    return f"# Ortho-free subset, p = {cert.p}\n\n" + markdown_table(["field", "value"], rows) + f"\n{result['message']}\n"


def render_bound(result: Dict[str, Any], fmt: str) -> Union[str, bytes]:
    reports = result["reports"]
    if fmt == "json":
        return _json({"reports": [r.to_dict() for r in reports], "final": report_gen.final_line(reports[-1])})
    if fmt == "csv":
        return report_gen.frame_to_csv(report_gen.threshold_frame(reports))
    if fmt == "pdf":
        return report_gen.generate_threshold_pdf(result.get("metadata", {}), reports)
    return report_gen.render_threshold_markdown(reports)


def render_embed(result: Dict[str, Any], fmt: str) -> str:
    hist = result["histogram"]
    if fmt == "json":
        return _json({"message": result["message"], "histogram": [{"quad_dist_sq": int(k), "pairs": int(v)} for k, v in zip(hist["quad_dist_sq"], hist["pairs"])]})
    if fmt == "markdown":
        return markdown_table(["quad_dist_sq", "pairs"], hist.values.tolist()) + f"\n{result['message']}\n"
    return hist.to_csv(index=False)
