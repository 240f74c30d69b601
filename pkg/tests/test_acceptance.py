"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines.
"""
import os
import time

import numpy as np
import pytest

from mtprior import (
    ALGORITHMS,
    PriorBuildConfig,
    PriorMatrix,
    ProblemInstance,
    RegularizationParams,
    SolverConfig,
    TaskData,
    build_natural,
    check_lemma1,
    check_lemma2,
    check_lemma3,
    check_linear_bound,
    check_sublinear_bound,
    compute_constants,
    estimate_optimum,
    eval_smooth,
    grad_smooth,
    nmse,
    prox_of_point,
    prox_step,
    roc_auc,
    solve,
    solve_fista_backtracking,
    validate_instance,
    variance_explained,
)
from mtprior.cli import main

from helpers import fd_gradient, random_instance, solve_smooth_exactly


def _report(number, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"criterion {number:02d} [{status}] {name}{suffix}")
    assert ok, f"criterion {number} {name}{suffix}"


# ---------------------------------------------------------------------------
# Criteria 4 / 5 / 6 / 7 / 12 share one batch of solver runs


@pytest.fixture(scope="module")
def agreement_runs():
    build_start = time.time()
    batch = []
    for seed in range(20):
        instance = random_instance(seed=100 + seed, d=20, m=5, n=60,
                                   lam=1.0, theta=1.0, eps=1.0, s=5)
        constants = compute_constants(instance)
        reference = estimate_optimum(instance)
        results = {}
        for algo in ALGORITHMS:
            config = SolverConfig(
                algorithm=algo, max_iterations=100_000, objective_tolerance=1e-11,
                constants=constants, record_iterates=(algo == "linear-momentum" and seed < 5),
            )
            results[algo] = solve(instance, config)
        batch.append({
            "seed": seed,
            "instance": instance,
            "constants": constants,
            "reference": reference,
            "results": results,
        })
    batch[0]["build_seconds"] = time.time() - build_start
    return batch


def test_criterion_1_gradient_check():
    start = time.time()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for trial in range(100):
        d = int(rng.integers(2, 21))
        m = int(rng.integers(1, 6))
        n = int(rng.integers(3, 26))
        theta = float(rng.choice([0.0, 1.0, 10.0]))
        eps = float(rng.choice([0.0, 1.0, 10.0]))
        s = int(rng.integers(0, min(d, 4)))
        instance = random_instance(seed=5000 + trial, d=d, m=m, n=n,
                                   lam=0.0, theta=theta, eps=eps, s=s,
                                   dense_prior=bool(s))
        P = rng.standard_normal((d, m))
        grad = grad_smooth(instance, P)
        fd = fd_gradient(instance, P, eval_smooth)
        rel = float(np.abs(grad - fd).max() / max(1.0, np.abs(fd).max()))
        worst = max(worst, rel)
    elapsed = time.time() - start
    _report(1, "gradient vs central differences", worst <= 1e-6 and elapsed < 10.0,
            f"max rel err {worst:.2e}, {elapsed:.1f}s")


def test_criterion_2_lemma_suite():
    start = time.time()
    rng = np.random.default_rng(77)
    lemma1_ok = lemma2_ok = 0
    trials_per_instance = 50
    for seed in range(10):
        instance = random_instance(seed=300 + seed, d=6, m=3, n=25,
                                   lam=1.0, theta=1.0, eps=1.0, s=3)
        L = compute_constants(instance).L_safe
        for _ in range(trials_per_instance):
            A = rng.standard_normal((6, 3)) * 2.0
            P = rng.standard_normal((6, 3)) * 2.0
            lemma1_ok += check_lemma1(instance, A, P, L).holds
            lemma2_ok += check_lemma2(instance, A, P, L).holds
    lemma3_ok = 0
    for _ in range(10_000):
        a = rng.standard_normal(5)
        b = rng.standard_normal(5)
        beta = float(rng.uniform(-5.0, 1.0 - 1e-12))
        lemma3_ok += check_lemma3(a, b, beta).holds
    elapsed = time.time() - start
    ok = lemma1_ok == 500 and lemma2_ok == 500 and lemma3_ok == 10_000 and elapsed < 30.0
    _report(2, "descent-lemma suite",
            ok, f"lemma1 {lemma1_ok}/500, lemma2 {lemma2_ok}/500, lemma3 {lemma3_ok}/10000, {elapsed:.1f}s")


def test_criterion_3_prox_optimality():
    rng = np.random.default_rng(88)
    checked = 0
    nonexpansive = True
    for seed in range(10):
        instance = random_instance(seed=400 + seed, d=8, m=4, n=30,
                                   lam=1.5, theta=1.0, eps=1.0, s=4)
        lam = instance.params.lam
        eta = compute_constants(instance).L_safe
        for _ in range(100):
            A = rng.standard_normal((8, 4)) * 2.0
            U = A - grad_smooth(instance, A) / eta
            P = prox_step(instance, A, eta)
            for row_P, row_U in zip(P, U):
                norm = float(np.linalg.norm(row_P))
                if norm > 0.0:
                    residual = eta * (row_P - row_U) + lam * row_P / norm
                    assert np.abs(residual).max() <= 1e-10
                else:
                    assert eta * float(np.linalg.norm(row_U)) <= lam + 1e-10
            checked += 1
            U2 = rng.standard_normal((8, 4)) * 2.0
            lhs = np.linalg.norm(prox_of_point(instance.params, U, eta)
                                 - prox_of_point(instance.params, U2, eta))
            rhs = np.linalg.norm(U - U2)
            nonexpansive &= lhs <= rhs + 1e-12 * (1.0 + rhs)
    _report(3, "prox subgradient optimality + non-expansiveness",
            checked == 1000 and nonexpansive, f"{checked} prox steps")


def test_criterion_4_solver_agreement(agreement_runs):
    worst = 0.0
    for entry in agreement_runs:
        F_ref = entry["reference"].objective
        for algo, result in entry["results"].items():
            rel = abs(result.objective_trace[-1] - F_ref) / abs(F_ref)
            worst = max(worst, rel)
    build_seconds = agreement_runs[0]["build_seconds"]
    _report(4, "five solvers agree with the accelerated reference",
            worst <= 1e-5 and build_seconds < 120.0,
            f"worst rel gap {worst:.2e}, runs took {build_seconds:.1f}s")


def test_criterion_5_closed_form(agreement_runs):
    worst = 0.0
    for entry in agreement_runs[:20]:
        base = entry["instance"]
        instance = validate_instance(ProblemInstance(
            tasks=base.tasks, prior=base.prior,
            params=RegularizationParams(0.0, 1.0, 1.0),
        ))
        expected = solve_smooth_exactly(instance)
        scale = np.linalg.norm(expected)
        constants = compute_constants(instance)
        for algo in ALGORITHMS:
            config = SolverConfig(algorithm=algo, max_iterations=50_000,
                                  objective_tolerance=1e-13, constants=constants)
            result = solve(instance, config)
            rel = float(np.linalg.norm(result.final_P - expected)) / scale
            worst = max(worst, rel)
    _report(5, "lam=0 solutions match the dense linear solve", worst <= 1e-6,
            f"worst Frobenius-relative {worst:.2e}")


def test_criterion_6_sublinear_bound(agreement_runs):
    satisfied = 0
    worst = -np.inf
    for entry in agreement_runs:
        result = entry["results"]["ista-modified"]
        cert = check_sublinear_bound(result, entry["reference"], result.lipschitz_used)
        satisfied += cert.satisfied
        worst = max(worst, cert.max_violation / cert.slack)
    _report(6, "O(1/k) trace bound for the reverse-search solver",
            satisfied == len(agreement_runs),
            f"{satisfied}/{len(agreement_runs)} certificates, worst violation {worst:.2f}x slack")


def test_criterion_7_linear_bound(agreement_runs):
    satisfied = 0
    lyapunov_count = 0
    for entry in agreement_runs:
        consts = entry["constants"]
        assert consts.sigma_safe > 0.0  # n = 3d keeps every instance strongly convex
        result = entry["results"]["linear-momentum"]
        cert = check_linear_bound(result, entry["reference"], consts.L_safe, consts.sigma_safe)
        satisfied += cert.satisfied
        lyapunov_count += cert.lyapunov_checked
    _report(7, "geometric trace bound for the momentum solver",
            satisfied == len(agreement_runs) and lyapunov_count >= 5,
            f"{satisfied}/{len(agreement_runs)} certificates, {lyapunov_count} with the Lyapunov variant")


def _conditioned_instance(seed, d=50, m=10, n=100, cond=100.0, k=10):
    """Synthetic instance whose downscaled last column carries real signal, so
    the realized Hessian conditioning governs every solver's convergence."""
    rng = np.random.default_rng(seed)
    scales = np.ones(d)
    scales[-1] = 1.0 / np.sqrt(cond)
    active = np.concatenate([rng.choice(d - 1, size=k - 1, replace=False), [d - 1]])
    P = np.zeros((d, m))
    P[active, 0] = rng.standard_normal(k)
    P[d - 1, 0] = 3.0 + rng.uniform()
    for j in range(1, m):
        P[active, j] = P[active, j - 1] + 0.1 * rng.standard_normal(k)
    tasks = []
    for i in range(m):
        X = rng.standard_normal((n, d)) * scales
        y = X @ P[:, i] + 0.1 * rng.standard_normal(n)
        tasks.append(TaskData(X, y, i))
    return validate_instance(ProblemInstance(
        tuple(tasks), PriorMatrix.empty(d), RegularizationParams(1.0, 1.0, 1.0)
    ))


def _iterations_to(trace, target, gap):
    for k, value in enumerate(trace):
        if value - target <= gap:
            return k
    return len(trace)  # never reached: worst rank


def test_criterion_8_five_algorithm_ordering():
    start = time.time()
    counts = {algo: [] for algo in ALGORITHMS}
    for seed in range(10):
        instance = _conditioned_instance(seed)
        constants = compute_constants(instance)
        assert constants.condition_c >= 100.0
        reference = estimate_optimum(instance)
        for algo in ALGORITHMS:
            config = SolverConfig(algorithm=algo, max_iterations=40_000,
                                  objective_tolerance=1e-10, constants=constants)
            result = solve(instance, config)
            counts[algo].append(_iterations_to(result.objective_trace,
                                               reference.objective, 1e-6))
    medians = {algo: float(np.median(counts[algo])) for algo in ALGORITHMS}
    expected_order = ["linear-momentum", "fista-backtracking", "ista-modified",
                      "ista-backtracking", "gd-constant"]
    ok = all(medians[expected_order[i]] <= medians[expected_order[i + 1]]
             for i in range(len(expected_order) - 1))
    elapsed = time.time() - start
    detail = ", ".join(f"{a}={medians[a]:.0f}" for a in expected_order)
    _report(8, "median iteration counts order as expected", ok, f"{detail}, {elapsed:.1f}s")


def _theta_benefit(seed, d_base=30, n_dup=10, m=5, n_test=300,
                   dup_noise=0.3, y_noise=1.0, lam=2.0, eps=0.1, coef_scale=3.0):
    """Test nMSE with and without the correlation-derived prior; training uses
    n = d/2 samples per task and duplicated-feature coefficients share values."""
    rng = np.random.default_rng(seed)
    d = d_base + n_dup
    n_train = d // 2
    P = np.zeros((d, m))
    base_coefs = rng.standard_normal(n_dup) * coef_scale
    P[:n_dup, 0] = base_coefs
    P[d_base:, 0] = base_coefs
    for j in range(1, m):
        step = 0.1 * rng.standard_normal(n_dup)
        P[:n_dup, j] = P[:n_dup, j - 1] + step
        P[d_base:, j] = P[d_base:, j - 1] + step

    def make_tasks(n):
        tasks = []
        for i in range(m):
            Z = rng.standard_normal((n, d_base))
            dup = Z[:, :n_dup] + dup_noise * rng.standard_normal((n, n_dup))
            X = np.hstack([Z, dup])
            y = X @ P[:, i] + y_noise * rng.standard_normal(n)
            tasks.append(TaskData(X, y, i))
        return tasks

    train = make_tasks(n_train)
    test = make_tasks(n_test)
    prior = build_natural(train, PriorBuildConfig(correlation_threshold=0.9,
                                                  max_constraints=d))
    scores = {}
    for theta in (0.0, 1.0):
        instance = validate_instance(ProblemInstance(
            tuple(train), prior, RegularizationParams(lam, theta, eps)))
        result = solve_fista_backtracking(instance, SolverConfig(
            algorithm="fista-backtracking", max_iterations=20_000,
            objective_tolerance=1e-10))
        truths = [t.responses for t in test]
        preds = [t.features @ result.final_P[:, i] for i, t in enumerate(test)]
        scores[theta] = nmse(truths, preds)
        ve = variance_explained(truths, preds)
        assert ve + scores[theta] == 1.0  # exact by construction
    return scores


def test_criterion_9_informative_prior_helps():
    wins = 0
    for seed in range(10):
        scores = _theta_benefit(seed)
        wins += scores[1.0] < scores[0.0]
    _report(9, "natural prior lowers test nMSE (theta=1 vs 0)", wins >= 8, f"{wins}/10 seeds")


def test_criterion_10_auc_oracle():
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(4, 201))
        scores = np.round(rng.standard_normal(n), 1)
        labels = (rng.uniform(size=n) < 0.5).astype(int)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        curve = roc_auc(scores, labels)
        pos = scores[labels == 1][:, None]
        neg = scores[labels == 0][None, :]
        pairs = (pos > neg).sum() + 0.5 * (pos == neg).sum()
        oracle = float(pairs) / (pos.shape[0] * neg.shape[1])
        worst = max(worst, abs(curve.auc - oracle))
    four_point = roc_auc([0.9, 0.8, 0.3, 0.2], [1, 0, 1, 0]).auc
    ok = worst <= 1e-12 and abs(four_point - 0.75) <= 1e-12
    _report(10, "AUC equals pair counting", ok, f"max |diff| {worst:.1e}, 4-point {four_point}")


def test_criterion_11_cli_determinism(tmp_path):
    def snapshot(directory):
        return {name: (directory / name).read_bytes()
                for name in sorted(os.listdir(directory))}

    def rerun_identical(argv, directory):
        assert main(argv) == 0
        first = snapshot(directory)
        assert main(argv) == 0
        return snapshot(directory) == first

    data = tmp_path / "data"
    gen_argv = ["gen", "--d", "10", "--m", "3", "--n", "40", "--k", "3",
                "--seed", "3", "--out", str(data)]
    results = {"gen": rerun_identical(gen_argv, data)}
    tasks = [str(data / f"task_{i}.csv") for i in (1, 2, 3)]

    prior_dir = tmp_path / "prior"
    results["prior"] = rerun_identical(
        ["prior", "--tasks", *tasks, "--mode", "artificial", "--fraction", "0.2",
         "--seed", "1", "--out", str(prior_dir)], prior_dir)

    run_dir = tmp_path / "run"
    results["solve"] = rerun_identical(
        ["solve", "--tasks", *tasks, "--algo", "linear-momentum", "--out", str(run_dir)],
        run_dir)

    cmp_dir = tmp_path / "cmp"
    results["compare"] = rerun_identical(
        ["compare", "--synthetic", "d=10,m=3,n=40,k=3,cond=50,seed=7",
         "--tolerance", "1e-8", "--out", str(cmp_dir)], cmp_dir)

    eval_dir = tmp_path / "eval"
    results["eval"] = rerun_identical(
        ["eval", "--kind", "regression", "--tasks", *tasks,
         "--model", str(run_dir / "coefficients.csv"), "--out", str(eval_dir)],
        eval_dir)

    ok = all(results.values())
    _report(11, "CLI reruns are byte-identical", ok,
            ", ".join(f"{k}={'ok' if v else 'DIFFERS'}" for k, v in results.items()))


def test_criterion_12_monotone_descent(agreement_runs):
    monotone = {"gd-constant": True, "ista-modified": True, "ista-backtracking": True}
    for entry in agreement_runs:
        scale = 1.0 + abs(entry["results"]["gd-constant"].objective_trace[0])
        for algo in monotone:
            trace = entry["results"][algo].objective_trace
            increase = float(np.diff(trace).max(initial=-np.inf))
            monotone[algo] &= increase <= 1e-12 * scale
    ok = all(monotone.values())
    _report(12, "monotone traces for the descent solvers", ok,
            ", ".join(f"{k}={'ok' if v else 'VIOLATED'}" for k, v in monotone.items()))
