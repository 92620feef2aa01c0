"""
Crossbar model with flit-level output occupancy.

Only output ports are contended. A message holds its output for
ceil(bytes / flit_bytes) cycles and arrives ``hop_latency`` cycles after
its last flit leaves. Messages that ask for the same output in the same
cycle are granted in round-robin order starting at that output's pointer
(single-iteration iSLIP without virtual channels).
"""

from __future__ import annotations

from typing import Any, Callable, NamedTuple, Optional


class Message(NamedTuple):
    src: int
    dst: int
    nbytes: int
    seq: int
    payload: Any


class Crossbar:
    def __init__(self, name: str, inputs: int, outputs: int, hop_latency: int, flit_bytes: int):
        self.name = name
        self.inputs = inputs
        self.outputs = outputs
        self.hop_latency = hop_latency
        self.flit_bytes = flit_bytes
        self.busy_until = [0] * outputs
        self.rr_pointer = [0] * outputs
        self.port_flits = [0] * outputs
        self.flits = 0
        self.messages = 0
        self._pending: list[Message] = []
        self._seq = 0

    def flits_for(self, nbytes: int) -> int:
        return max(1, -(-nbytes // self.flit_bytes))

    def send(self, src: int, dst: int, nbytes: int, now: int) -> int:
        """Transmit one message immediately; return its delivery cycle."""
        if not (0 <= src < self.inputs and 0 <= dst < self.outputs):
            raise IndexError(f"{self.name}: bad port {src}->{dst}")
        occupancy = self.flits_for(nbytes)
        busy = self.busy_until[dst]
        start = now if now >= busy else busy
        self.busy_until[dst] = start + occupancy
        self.port_flits[dst] += occupancy
        self.flits += occupancy
        self.messages += 1
        return start + occupancy + self.hop_latency

    def submit(self, src: int, dst: int, nbytes: int, payload: Any = None) -> None:
        """Queue a message for this cycle's arbitration."""
        self._pending.append(Message(src, dst, nbytes, self._seq, payload))
        self._seq += 1

    @property
    def has_pending(self) -> bool:
        return bool(self._pending)

    def arbitrate(self, now: int) -> list[tuple[int, Message]]:
        """Grant all messages submitted this cycle; return (delivery, message)
        in grant order."""
        pending, self._pending = self._pending, []
        return self.schedule(pending, now)

    def schedule(self, messages: list[Message], now: int) -> list[tuple[int, Message]]:
        if len(messages) == 1:
            m = messages[0]
            self.rr_pointer[m.dst] = (m.src + 1) % self.inputs
            return [(self.send(m.src, m.dst, m.nbytes, now), m)]
        by_output: dict[int, list[Message]] = {}
        for m in messages:
            by_output.setdefault(m.dst, []).append(m)
        out = []
        for dst in sorted(by_output):
            group = by_output[dst]
            ptr = self.rr_pointer[dst]
            n = self.inputs
            group.sort(key=lambda m: ((m.src - ptr) % n, m.seq))
            for m in group:
                out.append((self.send(m.src, m.dst, m.nbytes, now), m))
            self.rr_pointer[dst] = (group[0].src + 1) % n
        return out

    def utilization(self, cycles: int) -> list[float]:
        if cycles <= 0:
            return [0.0] * self.outputs
        return [f / cycles for f in self.port_flits]


def send(xbar: Crossbar, src: int, dst: int, message_bytes: int, now: int) -> int:
    return xbar.send(src, dst, message_bytes, now)


def arbitrate_batch(
    xbar: Crossbar, senders: list[tuple[int, int, int]], now: int,
    on_grant: Optional[Callable[[int, Message], None]] = None,
) -> list[int]:
    """Schedule same-cycle (src, dst, bytes) messages; deliveries aligned with input."""
    msgs = [Message(s, d, b, i, i) for i, (s, d, b) in enumerate(senders)]
    result = [0] * len(msgs)
    for delivery, m in xbar.schedule(msgs, now):
        result[m.payload] = delivery
        if on_grant:
            on_grant(delivery, m)
    return result
