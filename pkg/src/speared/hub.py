"""Topic fan-out with retained snapshots and bounded per-subscription queues.

Every topic keeps its latest payload; a new subscriber immediately gets
that snapshot as its first event, then every subsequent change in
publication order. Ordering is preserved per connection because all
publications happen on the single owner thread/loop and each connection
drains one FIFO.

A subscription that falls more than ``queue_limit`` frames behind is
closed: it is dropped from the topic and receives one final event with an
``{"error": "overflow", "closed": true}`` payload.
"""
from __future__ import annotations

from typing import Optional, Protocol

from .protocol import event_frame


class FrameSink(Protocol):
    """One client connection; ``enqueue`` must be safe to call from the owner loop."""

    def enqueue(self, text: str, subscription: Optional["Subscription"]) -> None: ...


class Subscription:
    __slots__ = ("sub_id", "channel", "sink", "pending", "closed")

    def __init__(self, sub_id: str, channel: str, sink: FrameSink) -> None:
        self.sub_id = sub_id
        self.channel = channel
        self.sink = sink
        self.pending = 0  # frames enqueued but not yet written
        self.closed = False


class TopicHub:
    def __init__(self, channels, queue_limit: int = 1024) -> None:
        self._subscribers: dict[str, list[Subscription]] = {c: [] for c in channels}
        self._retained: dict[str, dict] = {}
        self._queue_limit = queue_limit

    def channels(self) -> set[str]:
        return set(self._subscribers)

    def retained(self, channel: str) -> Optional[dict]:
        return self._retained.get(channel)

    def set_retained(self, channel: str, payload: dict) -> None:
        """Seed a topic's snapshot without notifying anyone (startup state)."""
        self._retained[channel] = payload

    def subscribe(self, channel: str, sub_id: str, sink: FrameSink) -> Subscription:
        """Register and immediately deliver the current snapshot."""
        subscription = Subscription(sub_id, channel, sink)
        self._subscribers[channel].append(subscription)
        self._deliver(subscription, self._retained.get(channel, {}))
        return subscription

    def publish(self, channel: str, payload: dict) -> None:
        self._retained[channel] = payload
        for subscription in list(self._subscribers[channel]):
            if subscription.pending >= self._queue_limit:
                self._close_overflowed(subscription)
                continue
            self._deliver(subscription, payload)

    def drop_sink(self, sink: FrameSink) -> None:
        """Remove every subscription owned by a disconnecting client."""
        for subs in self._subscribers.values():
            for subscription in [s for s in subs if s.sink is sink]:
                subscription.closed = True
                subs.remove(subscription)

    def _deliver(self, subscription: Subscription, payload: dict) -> None:
        subscription.pending += 1
        subscription.sink.enqueue(
            event_frame(subscription.sub_id, subscription.channel, payload), subscription
        )

    def _close_overflowed(self, subscription: Subscription) -> None:
        subscription.closed = True
        self._subscribers[subscription.channel].remove(subscription)
        subscription.sink.enqueue(
            event_frame(
                subscription.sub_id,
                subscription.channel,
                {"error": "overflow", "closed": True},
            ),
            None,
        )
