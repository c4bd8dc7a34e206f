#!/usr/bin/env python3
"""Record a debate session to replay fixtures, then reproduce it offline.

Demonstrates the record/replay workflow on the bundled dog-breed QA
session: a scripted backend stands in for a live provider, every exchange
is captured as one fixture file per prompt digest, and a second run uses
only those fixtures. The two transcripts must match byte for byte.

Usage:
    python scripts/record_replay_session.py [--fixtures-dir DIR]
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path

from factdebate.engine import run_debate
from factdebate.gateway import Gateway, RecordingBackend, ReplayBackend, ScriptedBackend
from factdebate.model import (
    Claim,
    DebateConfig,
    EvidenceSnippet,
    EvidenceSource,
    TaskKind,
    TransitionPolicy,
)
from factdebate.transcripts import serialize_claim_verdict

SESSION_FILE = (
    Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "landseer_session.json"
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--fixtures-dir", help="where to store fixtures (default: a temp dir)")
    args = parser.parse_args()

    session = json.loads(SESSION_FILE.read_text(encoding="utf-8"))
    claim = Claim(
        id="session/c1",
        text=f"{session['question']} {session['answer']}",
        source_response_id="session",
        task_kind=TaskKind.QA,
    )
    evidence = [
        EvidenceSnippet(
            text=session["evidence"], source=EvidenceSource.PROVIDED_KNOWLEDGE, rank=1
        )
    ]
    config = DebateConfig(policy=TransitionPolicy.TRUE_TO_SKEPTIC, min_rounds=1, max_rounds=5)

    fixtures_dir = Path(args.fixtures_dir) if args.fixtures_dir else Path(
        tempfile.mkdtemp(prefix="replay-session-")
    )

    outputs = session["outputs"]
    live = Gateway(
        RecordingBackend(
            ScriptedBackend(
                [outputs["initial"], outputs["skeptic"], outputs["trust"], outputs["leader"]]
            ),
            fixtures_dir,
        )
    )
    recorded = run_debate(claim, evidence, config, live)
    print(f"recorded {len(list(fixtures_dir.glob('*.json')))} exchanges -> {fixtures_dir}")

    replayed = run_debate(claim, evidence, config, Gateway(ReplayBackend(fixtures_dir)))
    recorded_doc = serialize_claim_verdict(recorded)
    replayed_doc = serialize_claim_verdict(replayed)
    assert recorded_doc == replayed_doc, "replayed transcript diverged from the recording"

    sys.stdout.write(replayed_doc)
    print(
        f"\nreplay matches the recording: verdict factual={replayed.factual}, "
        f"severity={replayed.severity}, stop={replayed.transcript.stop_reason.value}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
