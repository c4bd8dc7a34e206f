#!/usr/bin/env python3
"""Compare the four transition policies on a simulated benchmark.

Runs the debate engine over the committed QA fixture with a deterministic
role-aware judge (see simulated_agents.py) and prints accuracy, recall,
precision, and F1 per policy. Entirely offline; fixed seed means fixed
output.

Usage:
    python scripts/compare_policies.py [--seed N] [--min-rounds N] [--n N]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from simulated_agents import SimulatedJudge

from factdebate.engine import run_debate
from factdebate.evaluation import (
    DatasetFormat,
    compute_metrics,
    load_dataset,
    sample_balanced,
)
from factdebate.gateway import CallBudget, Gateway
from factdebate.model import (
    Claim,
    DebateConfig,
    EvidenceSnippet,
    EvidenceSource,
    TaskKind,
    TransitionPolicy,
)

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "halueval_qa.jsonl"


def qa_claim(labeled) -> Claim:
    return Claim(
        id=f"{labeled.sample.response_id}/c1",
        text=f"{labeled.sample.question} {labeled.sample.response_text}",
        source_response_id=labeled.sample.response_id,
        task_kind=TaskKind.QA,
    )


def evaluate_policy(policy: TransitionPolicy, samples, min_rounds: int, seed: int):
    config = DebateConfig(policy=policy, min_rounds=min_rounds, max_rounds=5)
    claims = [qa_claim(labeled) for labeled in samples]
    golds = {c.text: not labeled.positive for c, labeled in zip(claims, samples)}
    judge = Gateway(SimulatedJudge(seed, golds), budget=CallBudget(None))
    predictions = []
    for claim, labeled in zip(claims, samples):
        evidence = [
            EvidenceSnippet(
                text=labeled.sample.provided_knowledge,
                source=EvidenceSource.PROVIDED_KNOWLEDGE,
                rank=1,
            )
        ]
        verdict = run_debate(claim, evidence, config, judge)
        predictions.append(not verdict.factual)
    return compute_metrics(predictions, [labeled.positive for labeled in samples])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--min-rounds", type=int, default=2)
    parser.add_argument("--n", type=int, default=20, help="samples drawn from the fixture")
    args = parser.parse_args()

    dataset = load_dataset(FIXTURE, DatasetFormat.HALUEVAL_QA)
    samples = sample_balanced(dataset, min(args.n, len(dataset)), p=0.5, seed=args.seed)

    print(f"policy comparison on {len(samples)} simulated QA samples "
          f"(seed={args.seed}, min_rounds={args.min_rounds})\n")
    print(f"{'policy':<18} {'Acc.':>8} {'R':>8} {'P':>8} {'F1':>8}")
    for policy in TransitionPolicy:
        report = evaluate_policy(policy, samples, args.min_rounds, args.seed)
        print(
            f"{policy.value:<18} {report.accuracy * 100:>7.2f}% {report.recall * 100:>7.2f}% "
            f"{report.precision * 100:>7.2f}% {report.f1 * 100:>7.2f}%"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
