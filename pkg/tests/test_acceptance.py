"""Acceptance suite: one test per shipping criterion.

Each test exercises its criterion end to end at the stated tolerance and
prints a single PASS line on success (run with -v or -s to see them).
"""

import itertools
import json
import math
import time

import numpy as np
import pytest
from conftest import ScriptedJudge

from claimkit.backends import DecodingParams, MemoryCache
from claimkit.cli import dispatch
from claimkit.corpus import ClaimRecord, Label, write_claims
from claimkit.funnel import (
    FunnelReport,
    MinHasher,
    allocate_budgets,
    decontaminate,
    dedup_minhash,
    dedup_semantic,
    estimate_jaccard,
    exact_jaccard,
    facility_location_value,
    lazy_greedy,
    naive_greedy,
    shingle_set,
)
from claimkit.metrics import balanced_accuracy
from claimkit.mock import HashEmbeddingBackend, HashJudgeBackend
from claimkit.rewards import (
    Labeled,
    RewardBackends,
    Unlabeled,
    coverage_reward,
    group_advantages,
    joint_quality_reward,
    necessity_reward,
    partition_supervision,
    pseudo_label,
    question_count_reward,
    total_reward,
)
from claimkit.synthetic import dedup_corpus, funnel_corpus, holdout_corpus

S, R = Label.SUPPORTED, Label.REFUTED


def _passed(line: str) -> None:
    print(f"ACCEPTANCE PASS: {line}")


def _random_trace(rng) -> str:
    """A trace of varying wellformedness: valid, truncated, or scrambled."""
    n = int(rng.integers(1, 5))
    parts = ["<think>initial analysis</think>"]
    for i in range(n):
        parts.append(f"<question>Is sub-fact {i} number {rng.integers(100)} stated?</question>")
        answer = "I don't know" if rng.random() < 0.2 else f"Yes, fact {i} is stated."
        parts.append(f"<answer>{answer}</answer>")
    verdict = rng.choice(["Supported", "Refuted", "Maybe"])
    parts.append(f"<verification>{verdict}</verification>")
    roll = rng.random()
    if roll < 0.15:
        parts = parts[: int(rng.integers(1, len(parts)))]  # truncation
    elif roll < 0.25:
        rng.shuffle(parts)  # scrambled structure
    elif roll < 0.3:
        parts.append("trailing commentary")
    return "\n".join(parts)


class TestAcceptance:
    def test_c01_reward_bounds_and_additivity(self):
        rng = np.random.default_rng(101)
        bk = RewardBackends(HashJudgeBackend(), HashEmbeddingBackend(),
                            MemoryCache(), DecodingParams())
        record = ClaimRecord(id="acc", claim="Alice moved to Paris in 1921.",
                             evidence=["Alice moved to Paris in 1921."],
                             source="acc", label=S, silver_question_count=3)
        start = time.monotonic()
        for i in range(1000):
            trace = _random_trace(rng)
            mode = Labeled(S) if i % 2 == 0 else Unlabeled(
                [S, R, None][i % 3])
            b = total_reward(record, trace, mode, bk)
            assert 0.0 <= b.fmt <= 1.0
            assert b.ver in (0.0, 1.0)
            assert 0.0 <= b.qc <= 1.0
            assert -1.0 <= b.div <= 0.0
            assert b.cov in (0.0, 1.0)
            assert b.nec in (-1.0, 0.0, 0.5, 1.0)
            assert 0.0 <= b.joint <= 1.0
            assert b.total == b.fmt + b.ver + b.qc + b.div + b.cov + b.nec + b.joint
            assert -2.0 <= b.total <= 6.0
        elapsed = time.monotonic() - start
        assert elapsed < 60.0
        _passed(f"reward bounds + exact additivity, 1000 randomized traces "
                f"({elapsed:.1f}s)")

    def test_c02_question_count_kernel_grid(self):
        worst = 0.0
        for n in range(1, 101):
            for n_star in range(1, 101):
                r = n / n_star
                expected = max(0.0, 1.0 - abs(r - 1.0))
                worst = max(worst, abs(question_count_reward(n, n_star) - expected))
        assert worst <= 1e-12
        _passed(f"question-count kernel on 10,000-point grid, max err {worst:.2e}")

    def test_c03_necessity_matrix(self):
        def cov(answers):
            if any("poison" in a for a in answers):
                return "Refuted"
            return "Supported" if any("key" in a for a in answers) else "Refuted"

        bk = RewardBackends(ScriptedJudge(coverage=cov), HashEmbeddingBackend(),
                            MemoryCache(), DecodingParams())
        # necessary (+1) and redundant (+0.5)
        scores, trace = necessity_reward("c", ["key fact", "filler"], S, bk)
        assert scores == [1.0, 0.5]
        # neutral (0)
        scores, _ = necessity_reward("c", ["filler", "filler two"], S, bk)
        assert scores == [0.0, 0.0]
        # harmful (-1), and min-aggregation forfeits the trace
        scores, trace = necessity_reward("c", ["key fact", "also key", "poison"], S, bk)
        assert scores[2] == -1.0 and trace == -1.0
        _passed("necessity matrix reproduces {+1, +0.5, 0, -1}; min forfeits on harm")

    def test_c04_worked_trace_joint_and_necessity(self):
        # Two-cycle trace: question 1 is load-bearing, question 2 is
        # redundant support; its answer abstains. All quality factors pass.
        def cov(answers):
            return "Supported" if any("capital" in a for a in answers) else "Refuted"

        judge = ScriptedJudge(coverage=cov)
        bk = RewardBackends(judge, HashEmbeddingBackend(), MemoryCache(),
                            DecodingParams())
        answers = ["The capital fact is stated verbatim.",
                   "I don't know, the founding date is not given."]
        pairs = [("Is the capital fact stated?", answers[0]),
                 ("Is the founding date given?", answers[1])]
        per_q, joint = joint_quality_reward("claim", "doc", pairs, bk)
        assert joint == 1.0 and per_q == [1.0, 1.0]
        nec_scores, _ = necessity_reward("claim", answers, S, bk)
        assert nec_scores == [1.0, 0.5]
        _passed("worked 2-cycle trace: R_joint = 1.0, necessity (+1, +0.5)")

    def test_c05_facility_location_contracts(self):
        start = time.monotonic()
        rng = np.random.default_rng(202)
        for _ in range(200):
            n = int(rng.integers(2, 65))
            k = int(rng.integers(1, min(n, 8) + 1))
            X = rng.standard_normal((n, 6))
            X /= np.linalg.norm(X, axis=1, keepdims=True)
            assert lazy_greedy(X, k) == naive_greedy(X, k)
        bound = 1.0 - 1.0 / math.e
        for _ in range(50):
            n = int(rng.integers(4, 13))
            k = int(rng.integers(1, 5))
            X = np.abs(rng.standard_normal((n, 4)))  # non-negative cosines
            X /= np.linalg.norm(X, axis=1, keepdims=True)
            greedy_val = facility_location_value(X, lazy_greedy(X, k))
            opt = max(facility_location_value(X, list(combo))
                      for combo in itertools.combinations(range(n), k))
            assert greedy_val >= bound * opt - 1e-9
        elapsed = time.monotonic() - start
        assert elapsed < 120.0
        _passed(f"lazy==naive on 200 instances; greedy >= (1-1/e)*OPT on 50 "
                f"brute-forced ({elapsed:.1f}s)")

    def test_c06_minhash_estimator_concentration(self):
        rng = np.random.default_rng(303)
        hasher = MinHasher(seed=7)
        words = [f"w{i}" for i in range(60)]
        within = 0
        for _ in range(100):
            size = int(rng.integers(10, 40))
            base = list(rng.choice(words, size=size, replace=False))
            flips = int(rng.integers(0, size // 2 + 1))
            other = list(base)
            for pos in rng.choice(size, size=flips, replace=False):
                other[pos] = f"x{int(rng.integers(1000))}"
            a, b = shingle_set(" ".join(base)), shingle_set(" ".join(other))
            est = estimate_jaccard(hasher.signature(a), hasher.signature(b))
            if abs(est - exact_jaccard(a, b)) <= 0.1:
                within += 1
        assert within >= 95
        _passed(f"minhash estimate within 0.1 of exact Jaccard for {within}/100 pairs")

    def test_c07_dedup_decontamination_postconditions(self):
        records = dedup_corpus()
        assert len(records) == 500
        embedding = HashEmbeddingBackend()
        cache = MemoryCache()
        kept, _ = dedup_minhash(records)
        kept, _ = dedup_semantic(kept, embedding, cache)
        holdout = holdout_corpus(records, seed=99, collisions=15, fresh=15)
        train, removed = decontaminate(kept, holdout, embedding, cache)
        assert removed  # planted collisions were caught

        shingles = {r.id: shingle_set(r.claim) for r in train + holdout}
        from claimkit.backends import embed
        train_vecs = embed([r.claim for r in train], embedding, cache)
        hold_vecs = embed([r.claim for r in holdout], embedding, cache)
        for i, a in enumerate(train):
            for j in range(i + 1, len(train)):
                b = train[j]
                assert exact_jaccard(shingles[a.id], shingles[b.id]) < 0.7
                assert float(train_vecs[i] @ train_vecs[j]) < 0.70
        for i, a in enumerate(train):
            for j, h in enumerate(holdout):
                assert exact_jaccard(shingles[a.id], shingles[h.id]) < 0.7
                assert float(train_vecs[i] @ hold_vecs[j]) < 0.90

        again, r1 = dedup_minhash(train)
        again, r2 = dedup_semantic(again, embedding, cache)
        again, r3 = decontaminate(again, holdout, embedding, cache)
        assert [r.id for r in again] == [r.id for r in train]
        assert r1 == r2 == r3 == []
        _passed("dedup/decontamination post-conditions exhaustively verified; "
                "both stages idempotent")

    def test_c08_budget_allocation(self):
        pool = []
        i = 0
        for label in (S, R):
            for source, size in (("small", 100), ("large", 400)):
                for _ in range(size):
                    pool.append(ClaimRecord(id=f"b{i}", claim=f"c{i}",
                                            evidence=["e"], source=source,
                                            label=label))
                    i += 1
        budget = allocate_budgets(pool, 60)
        for label in (S, R):
            small = budget.for_cell(label, "small")
            large = budget.for_cell(label, "large")
            assert (small, large) == (10, 20)  # sqrt(100):sqrt(400) = 1:2
        odd = allocate_budgets(pool, 61)
        supported = sum(v for (lbl, _), v in odd.per_cell.items() if lbl is S)
        assert abs(supported - (61 - supported)) <= 1
        _passed("budgets: 100/400 sources split 1:2 per label; halves differ <= 1")

    def test_c09_pseudo_label_exhaustive(self):
        def cov(answers):
            return answers[0].split(":", 1)[1]

        bk = RewardBackends(ScriptedJudge(coverage=cov), HashEmbeddingBackend(),
                            MemoryCache(), DecodingParams())
        for bits in itertools.product((S, R), repeat=8):
            supported = sum(1 for b in bits if b is S)
            expected = S if supported > 4 else (R if supported < 4 else None)
            label_hat = pseudo_label(list(bits))
            assert label_hat is expected
            if label_hat is None:
                continue
            coverages = [
                coverage_reward("c", [f"verdict:{b.value}"], label_hat, bk)
                for b in bits
            ]
            agreement = sum(1 for b in bits if b is label_hat) / 8
            assert sum(coverages) / 8 == agreement
        assert pseudo_label([S, None, None, R, R, None, None, None]) is R
        _passed("pseudo-label matches brute-force majority over all 2^8 patterns; "
                "mean coverage equals agreement fraction")

    def test_c10_group_advantages(self):
        rng = np.random.default_rng(404)
        eps = 1e-6
        for _ in range(1000):
            g = int(rng.integers(2, 17))
            totals = rng.normal(size=g)
            # rescale to a guaranteed std in [1, 4] plus an arbitrary shift
            totals = totals / totals.std() * rng.uniform(1.0, 4.0)
            totals += rng.normal()
            adv = np.asarray(group_advantages(totals.tolist()))
            assert abs(adv.mean()) <= 1e-12
            sigma = totals.std()
            if sigma > eps:
                # the (std + eps) divisor makes adv.std = sigma/(sigma + eps);
                # at these scales that sits within 1e-6 of 1
                assert abs(adv.std() - 1.0) <= 1e-6
                assert abs(adv.std() - sigma / (sigma + eps)) <= 1e-12
        assert group_advantages([2.5] * 8) == [0.0] * 8
        _passed("advantages: mean 0 (<=1e-12), std within 1e-6 of 1, "
                "constant groups -> zeros, 1000 groups")

    def test_c11_balanced_accuracy(self):
        golds = [S] * 5 + [R] * 5
        preds = [S, S, S, S, R] + [R, R, R, S, S]
        assert abs(balanced_accuracy(preds, golds) - 0.7) <= 1e-12
        assert abs(balanced_accuracy(golds, golds) - 1.0) <= 1e-12
        mixes = [[S, R], [S, S, R], [S] * 9 + [R]]
        for golds in mixes:
            assert balanced_accuracy([S] * len(golds), golds) == 0.5
            assert balanced_accuracy([R] * len(golds), golds) == 0.5
        _passed("balanced accuracy matches hand-computed fixtures to 1e-12; "
                "constant predictor scores exactly 0.5")

    def test_c12_funnel_end_to_end_determinism(self, tmp_path):
        records = funnel_corpus()
        assert len(records) == 200
        holdout = holdout_corpus(records)
        write_claims(records, tmp_path / "claims.jsonl")
        write_claims(holdout, tmp_path / "holdout.jsonl")
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "inputs": [str(tmp_path / "claims.jsonl")],
            "holdouts": [str(tmp_path / "holdout.jsonl")],
            "budget": 10, "seed": 3,
            "cache_dir": str(tmp_path / "cache"),
        }))
        blobs = []
        for workers in ("1", "8"):
            out = tmp_path / f"out-{workers}.jsonl"
            report = tmp_path / f"report-{workers}.json"
            code = dispatch(["funnel", "run", "--config", str(cfg),
                             "--out", str(out), "--report", str(report),
                             "--workers", workers])
            assert code == 0
            blobs.append((out.read_bytes(), report.read_bytes()))
        assert blobs[0] == blobs[1]
        report = FunnelReport.from_json_obj(
            json.loads(blobs[0][1].decode("utf-8")))
        report.validate_chain()
        for stage in report.stages[:-1]:
            assert stage.output_count <= stage.input_count
        _passed("funnel run byte-identical for --workers 1 vs 8; report chain "
                "consistent, counts non-increasing until augmentation")

    def test_c13_supervision_partition(self):
        ids = [f"claim-{i:05d}" for i in range(10_000)]
        for s in (0.0, 0.1, 0.5, 1.0):
            assignment = partition_supervision(ids, s, seed=77)
            fraction = sum(v == "labeled" for v in assignment.values()) / len(ids)
            assert abs(fraction - s) <= 0.02, (s, fraction)
        rng = np.random.default_rng(505)
        shuffled = list(ids)
        rng.shuffle(shuffled)
        assert partition_supervision(ids, 0.5, seed=77) == \
            partition_supervision(shuffled, 0.5, seed=77)
        _passed("supervision partition within +/-0.02 of s for "
                "s in {0, 0.1, 0.5, 1.0}; permutation-invariant")
