"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest summary.
"""

import math
import random
import time
from fractions import Fraction as F

import pytest

from esc.cli import EXIT_FAIL, main
from esc.coding import build_code, length_bound_holds
from esc.config import dump_family
from esc.family import BitWord, FamilySpec, Pmf, bernoulli_pmf, build_shtarkov, ratio_check, uniform
from esc.padding import RandomSource, delta_gap, delta_gap_mass, fiber, induced_pmf, min_entropy
from esc.sbcipher import Key, Mode, build_space, ceil_log2, decrypt, encrypt, plan_params
from esc.verify import (
    bias_spectrum,
    distance_to_uniform,
    exact_cipher_distribution,
    exact_cipher_distribution_direct,
)

from .conftest import ACCEPTANCE_RESULTS, two_bernoulli
from .oracles import is_prefix_free_pairwise

N_RANDOM_FAMILIES = 1000


def record(name, ok, detail):
    ACCEPTANCE_RESULTS.append((name, ok, detail))
    assert ok, f"{name}: {detail}"


def _random_families():
    rng = random.Random(20261016)
    fams = []
    for _ in range(N_RANDOM_FAMILIES):
        n = rng.randint(1, 6)
        members = []
        for _ in range(rng.randint(1, 8)):
            w = [0 if rng.random() < 0.1 else rng.randint(1, 40) for _ in range(1 << n)]
            if not any(w):
                w[rng.randrange(1 << n)] = 1
            members.append(Pmf(n, [F(x, sum(w)) for x in w]))
        fams.append(FamilySpec.explicit(members))
    return fams


@pytest.fixture(scope="module")
def random_models():
    out = []
    for fam in _random_families():
        model = build_shtarkov(fam)
        out.append((fam, model, build_code(model)))
    return out


def test_01_worked_example_reproduction():
    t0 = time.perf_counter()
    p = Pmf(2, [F(1, 2), F(1, 4), F(1, 8), F(1, 8)])
    fam = FamilySpec.explicit([p])
    table = build_code(build_shtarkov(fam))
    codes = [str(table.codeword(table.rank[u])) for u in range(4)]
    fib = sorted(str(v) for v in fiber(table, BitWord.from_str("00")))
    pi = induced_pmf(table, p)
    elapsed = time.perf_counter() - t0
    ok = (
        codes == ["0", "10", "110", "111"]
        and table.n_star == 3
        and fib == ["000", "001", "010", "011"]
        and pi.probs == (F(1, 8),) * 8
        and min_entropy(pi) == 3
        and delta_gap(table, fam) == 0
        and elapsed < 1.0
    )
    record("1 worked example", ok, f"code={codes} n_star={table.n_star} pi uniform={set(pi.probs) == {F(1, 8)}} t={elapsed:.3f}s")


def test_02_shtarkov_bounds(random_models):
    violations = 0
    for fam, model, _ in random_models:
        if not (1 <= model.s_p <= len(fam.members)):
            violations += 1
        if sum(model.q.probs) != 1:
            violations += 1
        violations += sum(not ratio_check(model, p).ok for p in fam.members)
    record("2 Shtarkov bounds", violations == 0, f"{len(random_models)} families, {violations} violations")


def test_03_code_length_and_prefix_freeness(random_models):
    violations = 0
    for _, _, table in random_models:
        violations += sum(not length_bound_holds(l, q) for l, q in zip(table.lengths, table.probs))
        strs = [str(table.codeword(i)) for i in range(len(table.order))]
        violations += not is_prefix_free_pairwise(strs)
        violations += table.kraft_sum() > 1
    record("3 code length / prefix-free / Kraft", violations == 0, f"{len(random_models)} tables, {violations} violations")


def test_04_delta_bound(random_models):
    violations = 0
    worst = -math.inf
    for fam, model, table in random_models:
        bound = ceil_log2(model.s_p) + 2
        mass = delta_gap_mass(table, fam)
        # gap = n_star + log2(mass) <= bound, compared exactly
        violations += F(mass) > F(2) ** (bound - table.n_star)
        worst = max(worst, delta_gap(table, fam) - bound)
    record("4 delta gap <= ceil(log2 S_P) + 2", violations == 0, f"{violations} violations, max(gap - bound) = {worst:.4f}")


def test_05_exact_indistinguishability():
    t0 = time.perf_counter()
    fam = two_bernoulli(4)
    model = build_shtarkov(fam)
    table = build_code(model)
    params = plan_params(model.s_p, table.n_star, 0.25, n=4)
    space = build_space(params)
    sds, agree = [], True
    for p in fam.members:
        fast = exact_cipher_distribution(table, space, p)
        direct = exact_cipher_distribution_direct(table, space, p)
        agree &= fast == direct
        sds.append(distance_to_uniform(fast))
    elapsed = time.perf_counter() - t0
    worst = max(sds)
    ok = worst <= F(1, 4) and agree and elapsed < 300
    record("5 exact indistinguishability", ok, f"ell={params.ell} max SD={float(worst):.6g} <= 0.25, oracles agree={agree}, t={elapsed:.1f}s")


def test_06_bias_certification():
    violations, checked, worst = 0, 0, 0.0
    for ell in range(1, 11):
        for n_star in range(1, 13):
            corr, _ = bias_spectrum(build_space(ell=ell, n_star=n_star))
            checked += 1
            violations += corr > F(n_star, 1 << ell)
            worst = max(worst, float(corr) * 2**ell / n_star)
    record("6 bias certification", violations == 0, f"{checked} (ell, n_star) pairs, {violations} violations, max bias/bound = {worst:.4f}")


def test_07_perfect_pad_limit():
    fams = [
        FamilySpec.explicit([Pmf(2, [F(1, 2), F(1, 4), F(1, 8), F(1, 8)])]),
        FamilySpec.explicit([uniform(3)]),
        two_bernoulli(2),
        two_bernoulli(4),
        FamilySpec.bernoulli_nml(3, grid=8),
    ]
    fams += [f for f in _random_families()[:200] if build_code(build_shtarkov(f)).n_star <= 12]
    nonzero = 0
    for fam in fams:
        table = build_code(build_shtarkov(fam))
        ones = [1] * (1 << table.n_star)
        for p in fam.enumerate_members():
            nonzero += distance_to_uniform(exact_cipher_distribution(table, None, p, pad=ones)) != 0
    record("7 perfect-pad limit", nonzero == 0, f"{len(fams)} families, {nonzero} with SD != 0")


def test_08_key_length_accounting():
    problems = []
    for n_star in (3, 6, 12, 40):
        for mode in Mode:
            a = plan_params(1, n_star, 0.25, mode)
            b = plan_params(1, n_star, 0.125, mode)
            if b.k_theory - a.k_theory != 2:
                problems.append(f"halving eps n_star={n_star}")
            for p in (a, b):
                if p.k_actual - p.k_theory > 2 * math.ceil(math.log2(n_star)) + 4:
                    problems.append(f"slack n_star={n_star}")
    for f in (2, 3, 5, 8):
        fam = FamilySpec.explicit([bernoulli_pmf(3, F(j + 1, f + 2)) for j in range(f)])
        model = build_shtarkov(fam)
        single = plan_params(1, 5, 0.25)
        multi = plan_params(model.s_p, 5, 0.25)
        if multi.delta_hat - single.delta_hat != ceil_log2(model.s_p):
            problems.append(f"delta_hat f={f}")
    record("8 key-length accounting", not problems, "ok" if not problems else ", ".join(problems))


def test_09_round_trip():
    fam = two_bernoulli(4)
    model = build_shtarkov(fam)
    table = build_code(model)
    params = plan_params(model.s_p, table.n_star, 0.25, n=4)
    space = build_space(params)
    keys_rng = RandomSource(seed=99)
    keys = [Key.generate(space.ell, keys_rng) for _ in range(64)]
    total = ok = 0
    for key in keys:
        for tape_seed in range(16):
            for u in range(16):
                m = BitWord(4, u)
                c = encrypt(table, params, space, key, m, RandomSource(seed=tape_seed * 1000 + u))
                total += 1
                ok += decrypt(table, params, space, key, c) == m
    record("9 round trip", ok == total == 16 * 64 * 16, f"{ok}/{total} messages restored")


def test_10_negative_control(tmp_path, capsys):
    fam = two_bernoulli(4)
    path = tmp_path / "fam.yaml"
    path.write_text(dump_family(fam))
    planned = plan_params(build_shtarkov(fam).s_p, build_code(build_shtarkov(fam)).n_star, 0.25).ell
    failed_at = [ell for ell in (1, 2) if main(["verify", "--family", str(path), "--epsilon", "0.25", "--ell", str(ell)]) == EXIT_FAIL]
    out = capsys.readouterr().out
    ok = bool(failed_at) and all(e < planned for e in failed_at) and "check indistinguishability = FAIL" in out
    record("10 negative control", ok, f"planner ell={planned}; verify fails at ell={failed_at}")
