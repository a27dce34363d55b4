"""Fixed-capacity FIFO replay memory with uniform sampling (with replacement).

Because draws are with replacement a batch may exceed the number of stored
transitions; only an empty buffer refuses to sample.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np


class Transition(NamedTuple):
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    done: bool


class Batch(NamedTuple):
    states: np.ndarray       # (n, state_dim)
    actions: np.ndarray      # (n, action_dim)
    rewards: np.ndarray      # (n,)
    next_states: np.ndarray  # (n, state_dim)
    dones: np.ndarray        # (n,) float 0/1


class UnderfullBufferError(ValueError):
    pass


class ReplayBuffer:
    def __init__(self, capacity=100_000, state_dim=6, action_dim=2, seed=None):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self._rng = np.random.default_rng(seed)
        self._s = np.zeros((self.capacity, state_dim))
        self._a = np.zeros((self.capacity, action_dim))
        self._r = np.zeros(self.capacity)
        self._s2 = np.zeros((self.capacity, state_dim))
        self._d = np.zeros(self.capacity)
        self._cursor = 0
        self._size = 0

    def __len__(self):
        return self._size

    def push(self, t: Transition):
        i = self._cursor
        self._s[i] = t.state
        self._a[i] = t.action
        self._r[i] = t.reward
        self._s2[i] = t.next_state
        self._d[i] = float(bool(t.done))
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def _indices(self, n):
        if n < 1:
            raise ValueError("batch size must be positive")
        if self._size == 0:
            raise UnderfullBufferError("cannot sample from an empty buffer")
        return self._rng.integers(0, self._size, size=n)

    def _get(self, i) -> Transition:
        return Transition(self._s[i].copy(), self._a[i].copy(), float(self._r[i]),
                          self._s2[i].copy(), bool(self._d[i]))

    def sample(self, n) -> list:
        return [self._get(i) for i in self._indices(n)]

    def sample_batch(self, n) -> Batch:
        """Same draw as ``sample`` but stacked into arrays."""
        idx = self._indices(n)
        return Batch(self._s[idx], self._a[idx], self._r[idx], self._s2[idx], self._d[idx])

    def contents(self) -> list:
        """Stored transitions, oldest first."""
        start = self._cursor if self._size == self.capacity else 0
        return [self._get((start + k) % self.capacity) for k in range(self._size)]


def stack(transitions) -> Batch:
    return Batch(
        np.array([t.state for t in transitions], dtype=float),
        np.array([t.action for t in transitions], dtype=float),
        np.array([t.reward for t in transitions], dtype=float),
        np.array([t.next_state for t in transitions], dtype=float),
        np.array([float(t.done) for t in transitions]),
    )
