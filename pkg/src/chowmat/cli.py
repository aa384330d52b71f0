"""Command-line surface: matroid ingestion, computations, verification suites.

All output is JSON with deterministic key order and no floating point;
rationals appear as {"num": ..., "den": ...}.  Exit codes: 0 ok, 1
verification failure, 2 input error.
"""

from __future__ import annotations

import json
import os
import sys
from fractions import Fraction

import click
import numpy as np

from . import _linalg, bergman, hodge, quotients
from .chow import ring_for
from .errors import ChowmatError, NotAFlat, ParseError
from .matroid import Matroid, bits, graphic, mask_of, matroid_from_bases, uniform

DEFAULT_MAX_GROUND = 12
KAHLER_SAMPLES = 25


def rational_json(q: Fraction) -> object:
    """Serialize an exact rational: plain int when integral, else num/den."""
    if q.denominator == 1:
        return int(q)
    return {"num": q.numerator, "den": q.denominator}


def _subset(mask: int) -> list[int]:
    return sorted(bits(mask))


def load_matroid(path: str, max_ground: int) -> Matroid:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "type" not in doc:
        raise ParseError('spec must be an object with a "type" field')
    kind = doc["type"]
    try:
        if kind == "uniform":
            m = uniform(int(doc["r"]), int(doc["n"]))
        elif kind == "bases":
            ground = int(doc["ground"])
            m = matroid_from_bases(ground, [mask_of(map(int, b)) for b in doc["bases"]])
        elif kind == "graphic":
            m = graphic(int(doc["vertices"]), [tuple(map(int, e)) for e in doc["edges"]])
        else:
            raise ParseError(f"unknown matroid type {kind!r}")
    except KeyError as exc:
        raise ParseError(f"missing field {exc} for type {kind!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid spec: {exc}") from exc
    if m.n_elements > max_ground:
        raise ParseError(
            f"ground set of size {m.n_elements} exceeds the cap {max_ground} "
            "(raise with --max-ground or CHOWMAT_MAX_GROUND)"
        )
    return m


def matroid_summary(m: Matroid) -> dict:
    lattice = m.lattice()
    return {
        "ground": m.n_elements,
        "rank": m.rank_full,
        "flats_by_rank": [len(lattice.by_rank[r]) for r in range(m.rank_full + 1)],
        "loopless": m.is_loopless(),
    }


def emit(doc: dict, pretty: bool) -> None:
    if pretty:
        click.echo(json.dumps(doc, indent=2))
    else:
        click.echo(json.dumps(doc, separators=(",", ":")))


def _max_ground_option(f):
    f = click.option(
        "--max-ground",
        type=int,
        default=None,
        help=f"Ground-set size cap (default {DEFAULT_MAX_GROUND}, env CHOWMAT_MAX_GROUND).",
    )(f)
    f = click.option("--pretty", is_flag=True, help="Indent the JSON output.")(f)
    return f


def _resolve_cap(max_ground: int | None) -> int:
    if max_ground is not None:
        return max_ground
    env = os.environ.get("CHOWMAT_MAX_GROUND")
    return int(env) if env else DEFAULT_MAX_GROUND


def _run(command: str, spec_file: str, max_ground: int | None, pretty: bool, worker) -> None:
    try:
        m = load_matroid(spec_file, _resolve_cap(max_ground))
    except ChowmatError as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
        sys.exit(2)
    try:
        payload, ok = worker(m)
    except ChowmatError as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
        sys.exit(2)
    doc = {"command": command, "matroid": matroid_summary(m), "result": payload}
    emit(doc, pretty)
    sys.exit(0 if ok else 1)


@click.group()
def main() -> None:
    """Exact Chow-ring computations for matroids."""


@main.command()
@click.argument("spec_file")
@_max_ground_option
def info(spec_file: str, pretty: bool, max_ground: int | None) -> None:
    """Ground set, rank, flats by rank, looplessness, Hilbert function."""

    def worker(m: Matroid):
        payload = {}
        if m.is_loopless():
            payload["hilbert"] = ring_for(m).hilbert_function()
        else:
            payload["hilbert"] = None
        return payload, True

    _run("info", spec_file, max_ground, pretty, worker)


@main.command()
@click.argument("spec_file")
@click.option("--flats", "flats_arg", required=True, help='Semicolon-separated subsets, e.g. "0,1;0,2".')
@_max_ground_option
def degree(spec_file: str, flats_arg: str, pretty: bool, max_ground: int | None) -> None:
    """DHR degree of a product of simplicial generators, plus the Groebner value."""

    def worker(m: Matroid):
        try:
            masks = [mask_of(int(x) for x in part.split(",")) for part in flats_arg.split(";")]
        except ValueError as exc:
            raise ParseError(f"cannot parse --flats: {exc}") from exc
        for f in masks:
            if not m.is_flat(f):
                raise NotAFlat(f"{_subset(f)} is not a flat")
        dhr = hodge.dhr_degree(m, masks)
        ring = ring_for(m)
        groebner = int(ring.h_monomial_degree(masks))
        chain = 1 if hodge.chain_terminates_loopless(m, masks) else 0
        agree = dhr == groebner == chain
        payload = {
            "flats": [_subset(f) for f in masks],
            "dhr": dhr,
            "groebner": groebner,
            "chain": chain,
            "agree": agree,
        }
        return payload, agree

    _run("degree", spec_file, max_ground, pretty, worker)


@main.command()
@click.argument("spec_file")
@_max_ground_option
def volume(spec_file: str, pretty: bool, max_ground: int | None) -> None:
    """The volume polynomial as a sorted multinomial term list."""

    def worker(m: Matroid):
        vp = hodge.volume_polynomial(m)
        terms = [
            {"flats": [_subset(f) for f in mono], "coeff": coeff}
            for mono, coeff in sorted(vp.terms.items())
        ]
        return {"degree": vp.degree, "terms": terms}, True

    _run("volume", spec_file, max_ground, pretty, worker)


@main.command()
@click.argument("spec_file")
@_max_ground_option
def charpoly(spec_file: str, pretty: bool, max_ground: int | None) -> None:
    """Reduced characteristic polynomial; mu vector via both routes."""

    def worker(m: Matroid):
        cp = hodge.char_poly(m)
        via_chow = hodge.mu_via_degrees(m)
        concave = hodge.log_concavity_report(cp.mu)
        agree = cp.mu == via_chow
        payload = {
            "reduced_coeffs": cp.reduced_coeffs,
            "mu_moebius": cp.mu,
            "mu_chow": via_chow,
            "routes_agree": agree,
            "log_concave": concave,
        }
        return payload, agree and concave

    _run("charpoly", spec_file, max_ground, pretty, worker)


@main.command()
@click.argument("spec_file")
@click.option("--corank", type=int, required=True)
@_max_ground_option
def nested(spec_file: str, corank: int, pretty: bool, max_ground: int | None) -> None:
    """Nested-basis monomials of one degree, paired with their quotients."""

    def worker(m: Matroid):
        chains = quotients.nested_exponent_chains(m, corank)
        pairs = []
        for chain in chains:
            quotient = quotients.apply_exponent_chain(m, chain)
            pairs.append(
                {
                    "monomial": [{"flat": _subset(f), "power": a} for f, a in chain],
                    "quotient_bases": sorted(_subset(b) for b in quotient.bases),
                }
            )
        distinct = len({tuple(map(tuple, p["quotient_bases"])) for p in pairs}) == len(pairs)
        return {"corank": corank, "count": len(pairs), "pairs": pairs, "distinct": distinct}, distinct

    _run("nested", spec_file, max_ground, pretty, worker)


SUITES = ("poincare", "lorentzian", "kahler", "nested", "balance", "all")


@main.command()
@click.argument("spec_file")
@click.option("--suite", type=click.Choice(SUITES), default="all")
@click.option("--seed", type=int, default=0, help="Seed for the randomized Kähler sweep.")
@_max_ground_option
def verify(spec_file: str, suite: str, seed: int, pretty: bool, max_ground: int | None) -> None:
    """Run the verification suites; nonzero exit on any failure."""

    def worker(m: Matroid):
        wanted = SUITES[:-1] if suite == "all" else (suite,)
        results = {}
        ok = True
        for name in wanted:
            outcome = _SUITE_RUNNERS[name](m, seed)
            results[name] = outcome
            ok = ok and outcome["passed"]
        return {"suites": results, "passed": ok}, ok

    _run("verify", spec_file, max_ground, pretty, worker)


def _suite_balance(m: Matroid, seed: int) -> dict:
    weight = bergman.bergman_class(m)
    balanced = bergman.check_balanced(weight)
    return {"passed": balanced, "cones": len(weight.weights)}


def _suite_poincare(m: Matroid, seed: int) -> dict:
    ring = ring_for(m)
    hilbert = ring.hilbert_function()
    palindromic = hilbert == hilbert[::-1]
    full = True
    for k in range(ring.d + 1):
        pairing = ring.poincare_pairing(k)
        mat = np.array([[int(v) for v in row] for row in pairing], dtype=np.int64)
        if not _linalg.is_full_rank(mat):
            full = False
            break
    return {"passed": palindromic and full, "hilbert": hilbert, "palindromic": palindromic, "pairings_full_rank": full}


def _suite_lorentzian(m: Matroid, seed: int) -> dict:
    report = hodge.lorentzian_check(m, seed=seed)
    return {
        "passed": report.ok,
        "mconvex": report.mconvex,
        "mconvex_mode": report.mconvex_mode,
        "support": report.support_size,
        "hessians": report.hessians_checked,
    }


def _suite_kahler(m: Matroid, seed: int) -> dict:
    ring = ring_for(m)
    vacuous = ring.d < 2
    samples = [ring.sample_ample().x_form]
    samples += hodge.sample_nabla_cone(m, KAHLER_SAMPLES, seed)
    ok = True
    signatures = []
    ample_top = None
    for ell in samples:
        report = hodge.kahler_check(m, ell)
        ok = ok and report.ok
        if ample_top is None:
            ample_top = rational_json(report.top_power)
        signatures.append(list(report.q1_signature) if report.q1_signature else None)
    out = {"passed": ok, "samples": len(samples), "ample_top_power": ample_top}
    if vacuous:
        out["note"] = "vacuous degree 1"
    else:
        out["q1_signatures"] = sorted({tuple(s) for s in signatures if s})
        out["q1_signatures"] = [list(s) for s in out["q1_signatures"]]
    return out


def _suite_nested(m: Matroid, seed: int) -> dict:
    ring = ring_for(m)
    counts_ok = True
    bijection_ok = True
    for c in range(ring.d + 1):
        chains = quotients.nested_exponent_chains(m, c)
        if len(chains) != len(ring.nested[c]):
            counts_ok = False
            break
        seen = set()
        for chain in chains:
            q = quotients.apply_exponent_chain(m, chain)
            seen.add(q.bases)
            witness = quotients.is_quotient(q, m)
            if witness is None or not quotients.is_relative_nested(witness):
                bijection_ok = False
        if len(seen) != len(chains):
            bijection_ok = False
    passed = counts_ok and bijection_ok
    return {"passed": passed, "counts_match": counts_ok, "quotients_nested_and_distinct": bijection_ok}


_SUITE_RUNNERS = {
    "balance": _suite_balance,
    "poincare": _suite_poincare,
    "lorentzian": _suite_lorentzian,
    "kahler": _suite_kahler,
    "nested": _suite_nested,
}


if __name__ == "__main__":
    main()
