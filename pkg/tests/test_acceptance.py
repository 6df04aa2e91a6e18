"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Monte Carlo tolerances are the stated statistical bounds at the stated trial
counts and seeds; exact criteria (oracle equivalence, determinism, Galois
invariance) admit no slack.
"""

import math
import random
import time

import pytest

from coklab.domains import ZZ, factor_rational_prime, int_elem
from coklab.errors import IndeterminateCokernelError
from coklab.experiments import (
    emit_report,
    parse_config,
    run_distribution_experiment,
    run_galois_demo,
    run_moment_experiment,
)
from coklab.modules import (
    brute_force_count,
    count_aut_local,
    count_hom_local,
    count_sur_local,
    partitions_in_box,
)
from coklab.snf import cokernel_local_type, integer_snf_oracle, p_part_of_divisors
from coklab.theory import partial_sum

P2 = factor_rational_prime(ZZ, 2)[0]
P3 = factor_rational_prime(ZZ, 3)[0]
P5 = factor_rational_prime(ZZ, 5)[0]

# frozen targets, independently derived from 40-digit unit-product evaluation
LIMIT_Q2 = 0.2887880950866024
LIMIT_Q2_TYPE2 = 0.1443940475433012
LIMIT_Q2_U1 = 0.5775761901732048
LIMIT_Q5 = 0.7603327958712324

# per-pair enumeration cutoff: keeps the full sweep inside the runtime bound
# while still oracle-verifying thousands of pairs per residue size
ORACLE_PAIR_BUDGET = 60_000


def _report(criterion: int, ok: bool, detail: str):
    print(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def _freqs(summary, n):
    block = next(s for s in summary.per_n if s.n == n)
    return {b.type_string: b.frequency for b in block.buckets}, block


@pytest.fixture(scope="module")
def c3_run():
    cfg = parse_config({
        "domain": "Z", "primes": [{"p": 2}], "u": 0, "n": [48], "trials": 20000,
        "distribution": {"builtin": "bernoulli01", "params": {"q": 0.5}},
        "seed": 1,
    })
    return cfg, run_distribution_experiment(cfg, threads=1)


@pytest.fixture(scope="module")
def c4_run():
    cfg = parse_config({
        "domain": "Z", "primes": [{"p": 2}], "u": 1, "n": [48], "trials": 20000,
        "distribution": {"builtin": "bernoulli01", "params": {"q": 0.5}},
        "seed": 1,
    })
    return cfg, run_distribution_experiment(cfg, threads=1)


def test_criterion_1_counting_oracle_equivalence():
    t0 = time.perf_counter()
    verified = 0
    for q in (2, 3, 4, 5):
        cap = int(math.log(256, q))
        parts = [lam for lam in partitions_in_box(cap, cap) if q ** sum(lam) <= 256]
        for lam in parts:
            for mu in parts:
                hom = count_hom_local(lam, mu, q)
                sur = count_sur_local(lam, mu, q)
                assert 0 <= sur <= hom
                assert hom == count_hom_local(mu, lam, q)
                if lam == mu:
                    assert sur == count_aut_local(lam, q)
                candidates = 1
                for li in lam:
                    candidates *= q ** sum(min(li, mj) for mj in mu)
                if candidates > ORACLE_PAIR_BUDGET:
                    continue
                assert hom == brute_force_count(lam, mu, q, "hom", ORACLE_PAIR_BUDGET)
                assert sur == brute_force_count(lam, mu, q, "sur", ORACLE_PAIR_BUDGET)
                if lam == mu:
                    assert count_aut_local(lam, q) == brute_force_count(
                        lam, mu, q, "aut", ORACLE_PAIR_BUDGET)
                verified += 1
    elapsed = time.perf_counter() - t0
    _report(1, verified > 2000 and elapsed < 60,
            f"{verified} pairs oracle-verified across q in {{2,3,4,5}} in {elapsed:.1f}s")


def test_criterion_2_snf_oracle_equivalence():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    checked = 0
    for _ in range(1000):
        n = rng.randrange(1, 7)
        M = [[rng.randrange(-9, 10) for _ in range(n)] for _ in range(n)]
        divisors = integer_snf_oracle(M)
        elems = [[int_elem(x) for x in row] for row in M]
        for prime in (P2, P3, P5):
            expected = p_part_of_divisors(divisors, prime.p)
            if expected is None:
                with pytest.raises(IndeterminateCokernelError):
                    cokernel_local_type(elems, prime)
            else:
                assert cokernel_local_type(elems, prime) == expected
            checked += 1
    elapsed = time.perf_counter() - t0
    _report(2, checked == 3000 and elapsed < 30,
            f"1000 matrices x 3 primes agree with the integer SNF oracle in {elapsed:.1f}s")


def test_criterion_3_eq1_reproduction_over_Z(c3_run):
    cfg, summary = c3_run
    freqs, _ = _freqs(summary, 48)
    ok = (abs(freqs.get("∅", 0) - LIMIT_Q2) <= 0.015
          and abs(freqs.get("2:(1)", 0) - LIMIT_Q2) <= 0.015
          and abs(freqs.get("2:(2)", 0) - LIMIT_Q2_TYPE2) <= 0.012
          and summary.wall_seconds < 300)
    _report(3, ok,
            f"n=48, 20000 trials: trivial {freqs.get('∅', 0):.4f} vs {LIMIT_Q2:.4f}, "
            f"(1) {freqs.get('2:(1)', 0):.4f}, (2) {freqs.get('2:(2)', 0):.4f} "
            f"({summary.wall_seconds:.0f}s single-threaded)")


def test_criterion_4_rectangular_u1(c4_run):
    _, summary = c4_run
    freqs, _ = _freqs(summary, 48)
    ok = abs(freqs.get("∅", 0) - LIMIT_Q2_U1) <= 0.015
    _report(4, ok, f"u=1 trivial frequency {freqs.get('∅', 0):.4f} vs {LIMIT_Q2_U1:.4f}")


def test_criterion_5_moment_convergence():
    cfg = parse_config({
        "domain": "Z", "primes": [{"p": 3}], "u": 0, "n": [12, 24, 48],
        "trials": 10000,
        "distribution": {"builtin": "bernoulli01", "params": {"q": 0.5}},
        "seed": 2, "targets": ["3:(1)"],
    })
    summary = run_moment_experiment(cfg, threads=1)
    rows = {r.n: r for r in summary.rows}
    devs = {n: abs(rows[n].estimate - 1.0) for n in (12, 24, 48)}
    ok = devs[48] <= 0.05
    for a, b in [(12, 24), (24, 48)]:
        slack = 2 * math.hypot(rows[a].stderr, rows[b].stderr)
        ok = ok and devs[b] <= devs[a] + slack
    _report(5, ok,
            "E#Sur estimates "
            + ", ".join(f"n={n}: {rows[n].estimate:.4f}±{rows[n].stderr:.4f}"
                        for n in (12, 24, 48)))


def test_criterion_6_gaussian_split_prime():
    cfg = parse_config({
        "domain": "Z[i]", "primes": [{"p": 5, "index": 0}], "u": 0,
        "n": [32], "trials": 10000,
        "distribution": {"builtin": "gaussian-basis"},
        "seed": 3,
    })
    summary = run_distribution_experiment(cfg, threads=1)
    freqs, _ = _freqs(summary, 32)
    eps5 = next(b["epsilon"] for b in summary.balance if b["ideal"] == "(5)")
    ok = abs(freqs.get("∅", 0) - LIMIT_Q5) <= 0.02 and eps5 == "1/3"
    _report(6, ok,
            f"(2+i) trivial frequency {freqs.get('∅', 0):.4f} vs {LIMIT_Q5:.4f}, "
            f"audited epsilon at (5) = {eps5}")


def test_criterion_7_function_field():
    cfg = parse_config({
        "domain": "Fp[x]", "char": 2, "primes": [{"generator": "0,1"}], "u": 0,
        "n": [48], "trials": 20000,
        "distribution": {"builtin": "poly-powers", "params": {"p": 2, "m": 3}},
        "seed": 4,
    })
    summary = run_distribution_experiment(cfg, threads=1)
    freqs, _ = _freqs(summary, 48)
    ok = (abs(freqs.get("∅", 0) - LIMIT_Q2) <= 0.015
          and abs(freqs.get("x:(1)", 0) - LIMIT_Q2) <= 0.015
          and abs(freqs.get("x:(2)", 0) - LIMIT_Q2_TYPE2) <= 0.015)
    _report(7, ok,
            f"F_2[x] at (x): trivial {freqs.get('∅', 0):.4f}, "
            f"(1) {freqs.get('x:(1)', 0):.4f}, (2) {freqs.get('x:(2)', 0):.4f} "
            f"vs q=2 predictions")


def test_criterion_8_galois_obstruction():
    cfg = parse_config({
        "domain": "Z[i]", "primes": [{"p": 5, "index": 0}], "u": 0,
        "n": [20], "trials": 1000,
        "distribution": {"support": ["0", "1"], "weights": [0.5, 0.5]},
        "seed": 5, "strict_balance": False,
    })
    summary = run_galois_demo(cfg, threads=1)
    eps5 = next(b["epsilon"] for b in summary.balance if b["ideal"] == "(5)")
    ok = (summary.equal_fraction == 1.0
          and summary.asymmetric_rows == ()
          and eps5 == "0")
    _report(8, ok,
            f"conjugate partitions equal in fraction {summary.equal_fraction} of trials, "
            f"{len(summary.asymmetric_rows)} asymmetric types, epsilon at (5) = {eps5}")


def test_criterion_9_sum_to_one(c4_run):
    values = [float(partial_sum([P2], 0, c, c).value)
              for c in (0, 1, 2, 4, 8, 14, 20)]
    monotone = all(a <= b + 1e-15 for a, b in zip(values, values[1:]))
    big = values[-1]
    cfg = parse_config({
        "domain": "Z", "primes": [{"p": 2}], "u": 1, "n": [16], "trials": 5000,
        "distribution": {"builtin": "bernoulli01", "params": {"q": 0.5}},
        "seed": 6,
    })
    block = run_distribution_experiment(cfg, threads=1).per_n[0]
    indet_16 = block.indeterminate_count / block.trials
    c4_block = c4_run[1].per_n[0]
    indet_48 = c4_block.indeterminate_count / c4_block.trials
    ok = monotone and big > 0.999 and indet_16 < 0.01 and indet_48 < 0.01
    _report(9, ok,
            f"partial sums monotone up to {big:.6f} at caps (20,20); "
            f"u=1 indeterminate rate {indet_16:.4%} (n=16), {indet_48:.4%} (n=48)")


def test_criterion_10_worker_determinism(c3_run, tmp_path):
    cfg, summary = c3_run
    blobs = []
    paths = emit_report(summary, ("csv",), str(tmp_path / "w1"))
    blobs.append(open(paths[0], "rb").read())
    for workers in (4, 8):
        s = run_distribution_experiment(cfg, threads=workers)
        paths = emit_report(s, ("csv",), str(tmp_path / f"w{workers}"))
        blobs.append(open(paths[0], "rb").read())
    ok = blobs[0] == blobs[1] == blobs[2]
    _report(10, ok, "criterion-3 CSV byte-identical across 1, 4, and 8 workers")
