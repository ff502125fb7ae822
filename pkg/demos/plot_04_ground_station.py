"""
Ground station: wire format, ingestion and the online loop
==========================================================

Telemetry arrives as length-prefixed binary frames. The ground station
decodes them, skips corrupt frames, and runs detection as the stream
flows in.
"""

from swarmguard.detection import ThresholdConfig
from swarmguard.experiment import run_scenario
from swarmguard.gcs.codec import Ingestor, encode, encode_stream, frame
from swarmguard.gcs.loop import DetectionLoop, run_detection_loop
from swarmguard.gcs.messages import RangingReport
from swarmguard.presets import hover_formation, identical_signal_attack

# A ranging report is 17 bytes on the wire; a position report is 31.
print(encode(RangingReport(1, 2, 0, 0)).hex(" "))

cfg = hover_formation(3, duration_s=30, topology="all-pairs")
sim = run_scenario(cfg, identical_signal_attack(window=(10_000, 20_000)))
stream = encode_stream(sim.messages())

# Splice in a corrupt frame after the first one: ingestion counts it and
# carries on.
cut = stream[0] + 1
stream = stream[:cut] + frame(b"\x09" + bytes(16)) + stream[cut:]
ingestor = Ingestor()
messages = list(ingestor.iter_messages(stream))
print(f"decoded {len(messages)} messages, errors {dict(ingestor.errors)}")

# The online loop emits verdicts once every message that could affect an
# epoch must have arrived.
loop = DetectionLoop(cfg.n_uavs, ThresholdConfig.preset("safe"), cfg.topology)
emitted, reported = 0, False
for i, msg in enumerate(messages):
    for v in loop.feed(msg):
        emitted += 1
        if v.attack_detected and not reported:
            print(f"message #{i} (t={msg.time_ms} ms) released the first spoofing verdict, for t={v.time_ms} ms")
            reported = True
emitted += len(loop.close())
print(f"{emitted} verdicts in total")

# run_detection_loop wraps this and builds the JSONL log with a latched
# fail_safe flag.
result = run_detection_loop(messages, ThresholdConfig.preset("safe"), cfg.topology, cfg.n_uavs)
print(result.log.dumps().splitlines()[0])
