#!/usr/bin/env python3
"""Sweep the minimum debate rounds from 0 to 3 on a simulated benchmark.

Uses the default true-to-skeptic policy with a deterministic role-aware
judge and prints accuracy per floor value, alongside the mean rounds each
setting actually executed and its completion cost. Offline; fixed seed
means fixed output.

Usage:
    python scripts/sweep_min_rounds.py [--seed N] [--n N]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from simulated_agents import SimulatedJudge

from factdebate.engine import run_debate
from factdebate.evaluation import DatasetFormat, compute_metrics, load_dataset, sample_balanced
from factdebate.gateway import CallBudget, Gateway
from factdebate.model import Claim, DebateConfig, EvidenceSnippet, EvidenceSource, TaskKind

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "halueval_qa.jsonl"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n", type=int, default=20, help="samples drawn from the fixture")
    args = parser.parse_args()

    dataset = load_dataset(FIXTURE, DatasetFormat.HALUEVAL_QA)
    samples = sample_balanced(dataset, min(args.n, len(dataset)), p=0.5, seed=args.seed)

    print(f"minimum-round sweep on {len(samples)} simulated QA samples (seed={args.seed})\n")
    print(f"{'min_rounds':>10} {'Acc.':>8} {'mean rounds':>12} {'completions':>12}")
    for min_rounds in range(4):
        config = DebateConfig(min_rounds=min_rounds, max_rounds=5)
        claims = [
            Claim(
                id=f"{labeled.sample.response_id}/c1",
                text=f"{labeled.sample.question} {labeled.sample.response_text}",
                source_response_id=labeled.sample.response_id,
                task_kind=TaskKind.QA,
            )
            for labeled in samples
        ]
        golds = {c.text: not labeled.positive for c, labeled in zip(claims, samples)}
        judge = SimulatedJudge(args.seed, golds)
        gateway = Gateway(judge, budget=CallBudget(None))
        predictions, rounds_run = [], 0
        for claim, labeled in zip(claims, samples):
            evidence = [
                EvidenceSnippet(
                    text=labeled.sample.provided_knowledge,
                    source=EvidenceSource.PROVIDED_KNOWLEDGE,
                    rank=1,
                )
            ]
            verdict = run_debate(claim, evidence, config, gateway)
            predictions.append(not verdict.factual)
            rounds_run += len(verdict.transcript.rounds)
        report = compute_metrics(predictions, [labeled.positive for labeled in samples])
        print(
            f"{min_rounds:>10} {report.accuracy * 100:>7.2f}% "
            f"{rounds_run / len(samples):>12.2f} {judge.calls:>12}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
