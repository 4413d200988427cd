"""Pairwise human evaluation: blind A/B sessions with 1 / 0.5 / 0 scoring.

Automatic metrics do not settle which of two systems people prefer, so the
toolkit ships an evaluation service: annotators see a source sentence and
two unlabeled candidates in seeded random order and pick the better one or
declare a tie.  A win is worth one point, a tie half a point to each side.

This demo drives the store in process; `sitesmt serve-eval --log
events.jsonl` exposes the same operations over HTTP for the browser UI in
frontend/.
"""

import os
import random
import tempfile

from sitesmt.evalsvc import EvalStore

log_path = os.path.join(tempfile.mkdtemp(), "events.jsonl")
store = EvalStore(log_path)

items = [("source sentence %d" % i, "engine output %d" % i,
          "web service output %d" % i) for i in range(20)]
sid = store.create_session("site-engine", "web-service", items, seed=9)
session = store.sessions[sid]
print("session %s with %d items; system A is on the left %d times"
      % (sid, len(items), sum(session.a_left)))

item = store.next_item(sid, "annotator-1")
print("\nwhat an annotator sees (no system labels anywhere):")
for key, value in item.items():
    print("  %-6s %s" % (key, value))

rnd = random.Random(4)
for annotator in ("annotator-1", "annotator-2"):
    while (item := store.next_item(sid, annotator)) is not None:
        choice = rnd.choices(("first", "second", "tie"), (0.45, 0.35, 0.2))[0]
        store.submit_judgment(sid, item["index"], annotator, choice)

tally = store.tally(sid)
print("\ntally over %d judgments: A %.1f points, B %.1f points"
      % (tally.count, tally.points_a, tally.points_b))
print("conservation: %.1f + %.1f == %d" % (tally.points_a, tally.points_b,
                                           tally.count))

replayed = EvalStore.replay(log_path)
print("\nreplaying the append-only log reproduces the tally:",
      replayed.tally(sid) == tally)
