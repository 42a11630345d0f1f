"""Acceptance criteria 1-10, one test each.

Every criterion prints a single PASS/FAIL line (collected again in the
terminal summary). Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import itertools
import time

import numpy as np
from scipy.stats import unitary_group

from preservability import belldiag, channels, holevo, monotones, preorder, weyl
from preservability.channels import ChannelSpec

RESULTS = {}


def report(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


# --- 1 ---------------------------------------------------------------------------


def _family_rule(pair, x, y):
    """(expected verdict, distance to the boundary) for the qubit family pairs."""
    if pair == ("depolarizing", "depolarizing") or pair == ("dephasing", "dephasing"):
        return y <= x, abs(y - x)
    if pair == ("dephasing", "depolarizing"):
        b = x / (2 - x)
        return y <= b, abs(y - b)
    return x == 1.0, abs(1.0 - x)


def test_criterion_01_family_boundaries():
    grid = np.linspace(0.0, 1.0, 101)
    pairs = [
        ("depolarizing", "depolarizing"),
        ("dephasing", "dephasing"),
        ("dephasing", "depolarizing"),
        ("depolarizing", "dephasing"),
    ]
    t0 = time.perf_counter()
    bad, banded = 0, 0
    for sf, tf in pairs:
        targets = [ChannelSpec.named(tf, y) for y in grid]
        for x in grid:
            src = ChannelSpec.named(sf, x)
            for y, tgt in zip(grid, targets):
                got = preorder.convertible(src, tgt).feasible
                want, dist = _family_rule((sf, tf), x, y)
                if dist <= 1e-7 and not (sf, tf) == ("depolarizing", "dephasing"):
                    banded += 1
                    continue
                bad += got != want
    elapsed = time.perf_counter() - t0
    report(1, bad == 0 and elapsed < 10.0, f"{bad} disagreements on 4x101x101 grids ({banded} in band), {elapsed:.2f} s")


# --- 2 ---------------------------------------------------------------------------


def test_criterion_02_weight_certificates():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(200):
        s = rng.uniform(0.01, 1.0)
        t = rng.uniform(0.0, s)
        v = preorder.convertible(ChannelSpec.named("depolarizing", s), ChannelSpec.named("depolarizing", t))
        r = t / s
        expected = np.array([0.25 * (3 * r + 1)] + [0.25 * (1 - r)] * 3)
        worst = max(worst, float(np.max(np.abs(v.weight_table(2).ravel() - expected))) if v.feasible else np.inf)
    report(2, worst <= 1e-8, f"max weight deviation {worst:.2e} over 200 pairs")


# --- 3 ---------------------------------------------------------------------------


def test_criterion_03_diagonalization():
    rng = np.random.default_rng(3)
    worst_off, worst_eig = 0.0, 0.0
    for _ in range(1000):
        J = channels.choi(channels.random_channel(2, "qubit_unital", rng)).matrix
        diag = belldiag.diagonalize(J)
        off = channels.bell_offdiag_defect(diag.conjugated(J), 2)
        worst_off = max(worst_off, off, diag.offdiag_defect)
        eig = np.max(np.abs(np.sort(diag.eigenvalues.values) - np.linalg.eigvalsh(J)))
        worst_eig = max(worst_eig, float(eig))
    ok = worst_off <= 1e-9 and worst_eig <= 1e-9
    report(3, ok, f"max off-diagonal {worst_off:.2e}, max eigenvalue mismatch {worst_eig:.2e}")


# --- 4 ---------------------------------------------------------------------------


def test_criterion_04_product_bell_decomposition():
    rng = np.random.default_rng(4)
    failures, worst = 0, 0.0
    for _ in range(500):
        U = unitary_group.rvs(2, random_state=rng)
        V = unitary_group.rvs(2, random_state=rng)
        c, residual = preorder.local_permutation_decomposition(preorder.product_bell_matrix(U, V))
        defect = max(residual, max(0.0, -float(c.min())), abs(float(c.sum()) - 1.0))
        worst = max(worst, defect)
        failures += defect > 1e-9
    report(4, failures == 0, f"{failures}/500 matrices not a convex mix of local permutations (worst defect {worst:.3f})")


# --- 5 ---------------------------------------------------------------------------


def test_criterion_05_cyclic_permutation_identity():
    worst = 0.0
    for d in range(2, 6):
        X = weyl.shift_matrix(d)
        for c, e, f, g in itertools.product(range(d), repeat=4):
            M = weyl.product_weyl_overlaps(weyl.WeylIndex(c, e, d), weyl.WeylIndex(f, g, d))
            P = np.kron(np.linalg.matrix_power(X, (f - c) % d), np.linalg.matrix_power(X, (e + g) % d))
            worst = max(worst, float(np.max(np.abs(M - P))))
    report(5, worst <= 1e-12, f"max deviation {worst:.1e} for d=2..5")


# --- 6 ---------------------------------------------------------------------------


def _pair(d, rng):
    lam = channels.random_probs(d * d, rng)
    if rng.random() < 0.5:
        mu = channels.random_probs(d * d, rng) @ preorder.permuted_vertices(lam, d)
    else:
        mu = channels.random_probs(d * d, rng)
    return lam, mu


def test_criterion_06_monotone_completeness():
    rng = np.random.default_rng(6)
    bad, skipped = 0, 0
    for d, n in ((2, 1000), (3, 300)):
        done = 0
        while done < n:
            lam, mu = _pair(d, rng)
            fs = monotones.facet_system(monotones.vertex_set(lam))
            if fs.degenerate:
                continue
            done += 1
            ok, margins = monotones.check_monotones(fs, mu)
            if np.min(np.abs(margins)) <= 1e-7:
                skipped += 1
                continue
            bad += ok != preorder.decide(lam, mu, d).feasible
    report(6, bad == 0, f"{bad} disagreements on 1000 (d=2) + 300 (d=3) pairs ({skipped} within margin band)")


# --- 7 ---------------------------------------------------------------------------


def test_criterion_07_game_equivalence():
    rng = np.random.default_rng(7)
    mismatches, worst_identity, banded = 0, 0.0, 0
    for _ in range(500):
        src = channels.random_channel(2, "weyl_mixture", rng)
        if rng.random() < 0.5:
            tgt = channels.apply_superchannel(channels.random_superchannel(2, "weyl_mixture", rng), src)
        else:
            tgt = channels.random_channel(2, "weyl_mixture", rng)
        gs = monotones.game_states(src)
        worst_identity = max(worst_identity, float(np.max(np.abs(gs.source_success - gs.expected_source_success()))))
        cand, game = monotones.play_game(gs, tgt)
        if np.min(np.abs(cand - gs.source_success)) <= 1e-7:
            banded += 1
            continue
        mismatches += game != preorder.convertible(src, tgt).feasible
    ok = mismatches == 0 and worst_identity <= 1e-9
    report(
        7,
        ok,
        f"game/convert verdict mismatches {mismatches}/500 ({banded} banded); per-facet identity max error {worst_identity:.1e}",
    )


# --- 8 ---------------------------------------------------------------------------


def test_criterion_08_closure_and_purity():
    rng = np.random.default_rng(8)
    closure_fail, purity_fail, worst_gain = 0, 0, -np.inf
    for i in range(500):
        d = 2 if i % 2 == 0 else 3
        spec = channels.random_channel(d, "weyl_mixture", rng)
        sample = channels.random_superchannel(d, "weyl_mixture", rng)
        out = channels.apply_superchannel(sample, spec)
        closure_fail += not preorder.convertible(spec, out).feasible
        gain = channels.choi(out).purity() - channels.choi(spec).purity()
        worst_gain = max(worst_gain, gain)
        purity_fail += gain > 1e-9
    report(
        8,
        closure_fail == 0 and purity_fail == 0,
        f"closure failures {closure_fail}/500, purity increases {purity_fail}/500 (max change {worst_gain:.2e})",
    )


# --- 9 ---------------------------------------------------------------------------


def _grid_min_entropy(spec, n=10_000, rounds=40):
    """Fibonacci-sphere grid over pure inputs, then repeated 5x5 local grids in (theta, phi)."""

    def entropy(theta, phi):
        psi = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
        w = np.clip(np.linalg.eigvalsh(channels.apply_linear(spec, np.outer(psi, psi.conj()))), 1e-300, None)
        return float(-np.sum(w * np.log(w)))

    i = np.arange(n) + 0.5
    thetas = np.arccos(1 - 2 * i / n)
    phis = (np.pi * (1 + 5**0.5) * i) % (2 * np.pi)
    vals = [entropy(t, p) for t, p in zip(thetas, phis)]
    k = int(np.argmin(vals))
    best, t0, p0 = vals[k], thetas[k], phis[k]
    step = 0.05
    for _ in range(rounds):
        for dt, dp in itertools.product(np.linspace(-step, step, 5), repeat=2):
            e = entropy(t0 + dt, p0 + dp)
            if e < best:
                best, t1, p1 = e, t0 + dt, p0 + dp
                t0, p0 = t1, p1
        step *= 0.6
    return best


def test_criterion_09_holevo_monotone():
    rng = np.random.default_rng(9)
    violations, worst_gain = 0, -np.inf
    for i in range(500):
        d = 2 if i % 2 == 0 else 3
        spec = channels.random_channel(d, "weyl_mixture", rng)
        sample = channels.random_superchannel(d, "weyl_mixture", rng)
        before, after, holds = holevo.capacity_monotonicity_trial(spec, sample, seed=i)
        violations += not holds
        worst_gain = max(worst_gain, after - before)
    grid_err = 0.0
    for seed in range(5):
        spec = channels.random_channel(2, "qubit_unital", seed=900 + seed)
        rep = holevo.holevo_capacity(spec)
        grid_chi = np.log(2) - _grid_min_entropy(spec)
        grid_err = max(grid_err, abs(rep.chi - grid_chi))
    report(
        9,
        violations == 0 and grid_err <= 1e-6,
        f"monotonicity violations {violations}/500 (max change {worst_gain:.2e}); closed form vs grid {grid_err:.1e}",
    )


# --- 10 ---------------------------------------------------------------------------


def test_criterion_10_weyl_algebra():
    worst = 0.0
    for d in range(2, 7):
        w = weyl.omega(d)
        for a, b in itertools.product(range(d), repeat=2):
            W = weyl.weyl_operator(a, b, d)
            worst = max(worst, float(np.max(np.abs(W.T - w ** (-a * b) * weyl.weyl_operator(-a, b, d)))))
            worst = max(worst, float(np.max(np.abs(W.conj().T - w ** (a * b) * weyl.weyl_operator(-a, -b, d)))))
            x = weyl.WeylIndex(a, b, d)
            for c, e in itertools.product(range(d), repeat=2):
                y = weyl.WeylIndex(c, e, d)
                phase, z = weyl.weyl_compose(x, y)
                lhs = W @ weyl.weyl_operator(c, e, d)
                worst = max(worst, float(np.max(np.abs(lhs - w**phase * weyl.weyl_operator(z)))))
    report(10, worst <= 1e-12, f"max deviation {worst:.1e} for d=2..6")
