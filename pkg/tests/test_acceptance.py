"""Acceptance criteria, all at zero tolerance.

Each test prints one ``PASS``/``FAIL`` line (visible even under output
capture) and then asserts both exactness and its time limit.
"""

import io
import os
import subprocess
import sys
import time

import pytest

from residuekit import cli, koszul
from residuekit.exactnum import Field
from residuekit.polyring import PolyTower
from residuekit.suites import run_suite

SEED = 20240601


@pytest.fixture
def report(capsys):
    def _report(number, label, ok, elapsed, limit=None):
        within = limit is None or elapsed < limit
        verdict = "PASS" if ok and within else "FAIL"
        budget = f" (limit {limit:.0f}s)" if limit is not None else ""
        with capsys.disabled():
            print(f"\n{verdict} criterion {number}: {label} [{elapsed:.2f}s{budget}]")
        assert ok, label
        assert within, f"{label}: {elapsed:.2f}s over {limit}s"
    return _report


def _timed_suite(name, count):
    t0 = time.perf_counter()
    results = run_suite(name, SEED, count)
    return results, time.perf_counter() - t0


def _summary(results):
    good = sum(r.passed for r in results)
    return good == len(results), f"{good}/{len(results)}"


def test_criterion_01_koszul_exactness(report):
    results, dt = _timed_suite("koszul", 20)
    ok, frac = _summary(results)
    kinds = {r.instance["kind"] for r in results}
    report(1, f"Koszul cohomology up to degree 8 matches R/(t), {frac}, kinds {sorted(kinds)}",
           ok and kinds == {"monomial", "linear"}, dt, 10)


def test_criterion_02_determinant_law(report):
    results, dt = _timed_suite("denom", 100)
    ok, frac = _summary(results)
    report(2, f"determinant law res[det(U) nu; Ug] = res[nu; g], {frac}", ok, dt, 30)


def test_criterion_03_fubini(report):
    results, dt = _timed_suite("fubini", 100)
    ok, frac = _summary(results)
    series, dt2 = _timed_suite("fubini-series", 20)
    ok2, frac2 = _summary(series)
    report(3, f"iterated residue identity {frac}, truncated series variant {frac2}",
           ok and ok2, dt + dt2, 60)


def test_criterion_04_sign_conventions(report):
    t0 = time.perf_counter()
    results = run_suite("signs", SEED, 30)
    ok, frac = _summary(results)
    covered = {r.instance["r"] for r in results}
    # shift composites for every pair of shifts in {1, 2, 3}
    tower = PolyTower([[], ["x"]], Field(0))
    composites = all(
        koszul.is_identity_map(c) and c.commutes()
        for e in (1, 2, 3) for d in (1, 2, 3)
        for c in [koszul.module_shift_composite(koszul.module_complex(tower, 1),
                                                koszul.module_complex(tower, 2), e, d)])
    dt = time.perf_counter() - t0
    report(4, f"sign conventions {frac} over r in {sorted(covered)}, shift composites {composites}",
           ok and covered == {1, 2, 3} and composites, dt, 1)


def test_criterion_05_leray_round_trip(report):
    results, dt = _timed_suite("leray", 50)
    ok, frac = _summary(results)
    report(5, f"Leray round trip and cocycle chase sign, {frac}", ok, dt, 10)


def test_criterion_06_base_change(report):
    results, dt = _timed_suite("basechange", 50)
    ok, frac = _summary(results)
    report(6, f"sigma(res) = res(sigma) for s -> c, {frac}", ok, dt, 20)


def test_criterion_07_local_duality(report):
    results, dt = _timed_suite("duality", 10)
    ok, frac = _summary(results)
    report(7, f"trace pairing perfect on complete intersections, {frac}", ok, dt, 20)


def test_criterion_08_path_independence(report):
    results, dt = _timed_suite("path", 50)
    ok, frac = _summary(results)
    report(8, f"distinct monic targets give identical residues, {frac}", ok, dt, 30)


def test_criterion_09_fraction_calculus(report):
    results, dt = _timed_suite("fraction", 200)
    ok, frac = _summary(results)
    report(9, f"multiplication rule and vanishing iff membership, {frac}", ok, dt, 30)


def _cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(argv, out=out, err=err)
    return code, out.getvalue().encode()


def test_criterion_10_cli_determinism(report):
    t0 = time.perf_counter()
    runs = []
    for suite in ("denom", "fubini", "signs", "leray", "fraction"):
        for fmt in ("text", "json"):
            argv = ["verify", suite, "--seed", "7", "--count", "10", "--format", fmt]
            first, second = _cli(argv), _cli(argv)
            runs.append(first == second and first[0] == 0)
    # separate interpreters with different hash seeds must agree as well
    argv = [sys.executable, "-m", "residuekit.cli", "verify", "fubini", "--seed", "7", "--count", "10"]
    outputs = [subprocess.run(argv, capture_output=True, env={**os.environ, "PYTHONHASHSEED": h}).stdout
               for h in ("1", "2")]
    runs.append(outputs[0] == outputs[1] and b"failed: 0" in outputs[0])
    dt = time.perf_counter() - t0
    report(10, f"verify reports byte-identical across two runs, {sum(runs)}/{len(runs)}", all(runs), dt)
