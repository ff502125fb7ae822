"""Ground-station side: telemetry messages, wire codec, ranging schedule
and the online detection loop (:mod:`swarmguard.gcs.loop`)."""
