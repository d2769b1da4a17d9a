"""Reverse-mode autodiff on a flat, define-by-run tape.

Networks here are tiny (<= ~1e5 parameters), so the graph is rebuilt each
forward pass and the backward sweep is a single reverse walk over the
append-only node list (parents always precede children, so creation order
is a topological order).

Values are float64 numpy arrays of any shape; broadcasting is supported for
add/sub/mul with the usual sum-over-broadcast-axes adjoint rule.
"""

from __future__ import annotations

import numpy as np


class _Node:
    __slots__ = ("value", "parents", "vjps")

    def __init__(self, value, parents=(), vjps=()):
        self.value = value
        self.parents = parents  # tuple of node indices (always < own index)
        self.vjps = vjps        # tuple of callables adjoint -> parent contribution


class Var:
    """Handle to a node on a tape."""

    __slots__ = ("tape", "idx")
    __array_ufunc__ = None  # force numpy to defer to our reflected operators

    def __init__(self, tape: "Tape", idx: int):
        self.tape = tape
        self.idx = idx

    @property
    def value(self) -> np.ndarray:
        return self.tape.nodes[self.idx].value

    @property
    def shape(self):
        return self.tape.nodes[self.idx].value.shape

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)


class Tape:
    def __init__(self):
        self.nodes: list[_Node] = []
        self.leaf_idx: list[int] = []

    def _record(self, value, parents=(), vjps=()) -> Var:
        value = np.asarray(value, dtype=np.float64)
        for p in parents:
            if p >= len(self.nodes):
                raise ValueError("parent recorded after child; tape order violated")
        self.nodes.append(_Node(value, parents, vjps))
        return Var(self, len(self.nodes) - 1)

    def leaf(self, value) -> Var:
        """Register a differentiable leaf (parameter)."""
        v = self._record(value)
        self.leaf_idx.append(v.idx)
        return v

    def constant(self, value) -> Var:
        return self._record(value)

    def leaves(self, value_list) -> list[Var]:
        return [self.leaf(v) for v in value_list]


def _as_var(tape: Tape, x) -> Var:
    if isinstance(x, Var):
        if x.tape is not tape:
            raise ValueError("operands live on different tapes")
        return x
    return tape.constant(x)


def _tape_of(*xs) -> Tape | None:
    """Tape of the first Var operand; None means pure-numpy fast path.

    Every op below accepts either Vars (recorded on the tape) or plain
    arrays/scalars (evaluated eagerly), so network forward passes share one
    implementation between sampling (no tape) and gradient computation.
    """
    for x in xs:
        if isinstance(x, Var):
            return x.tape
    return None


def _unbroadcast(g: np.ndarray, shape) -> np.ndarray:
    """Sum adjoint g down to `shape` (inverse of numpy broadcasting)."""
    if g.shape == tuple(shape):
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


def add(a, b) -> Var:
    t = _tape_of(a, b)
    if t is None:
        return np.asarray(a) + np.asarray(b)
    a, b = _as_var(t, a), _as_var(t, b)
    av, bv = a.value, b.value
    return t._record(av + bv, (a.idx, b.idx),
                     (lambda g: _unbroadcast(g, av.shape),
                      lambda g: _unbroadcast(g, bv.shape)))


def sub(a, b) -> Var:
    t = _tape_of(a, b)
    if t is None:
        return np.asarray(a) - np.asarray(b)
    a, b = _as_var(t, a), _as_var(t, b)
    av, bv = a.value, b.value
    return t._record(av - bv, (a.idx, b.idx),
                     (lambda g: _unbroadcast(g, av.shape),
                      lambda g: _unbroadcast(-g, bv.shape)))


def mul(a, b) -> Var:
    t = _tape_of(a, b)
    if t is None:
        return np.asarray(a) * np.asarray(b)
    a, b = _as_var(t, a), _as_var(t, b)
    av, bv = a.value, b.value
    return t._record(av * bv, (a.idx, b.idx),
                     (lambda g: _unbroadcast(g * bv, av.shape),
                      lambda g: _unbroadcast(g * av, bv.shape)))


def matmul(a, b) -> Var:
    t = _tape_of(a, b)
    if t is None:
        return np.asarray(a) @ np.asarray(b)
    a, b = _as_var(t, a), _as_var(t, b)
    av, bv = a.value, b.value
    return t._record(av @ bv, (a.idx, b.idx),
                     (lambda g: g @ bv.T, lambda g: av.T @ g))


def tanh(a) -> Var:
    t = _tape_of(a)
    if t is None:
        return np.tanh(a)
    a = _as_var(t, a)
    y = np.tanh(a.value)
    return t._record(y, (a.idx,), (lambda g: g * (1.0 - y * y),))


def sigmoid_np(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function on raw arrays."""
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softplus_np(x: np.ndarray) -> np.ndarray:
    """Numerically stable log(1 + e^x) on raw arrays."""
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def sigmoid(a) -> Var:
    t = _tape_of(a)
    a = _as_var(t, a)
    y = sigmoid_np(a.value)
    return t._record(y, (a.idx,), (lambda g: g * y * (1.0 - y),))


def softplus(a) -> Var:
    t = _tape_of(a)
    a = _as_var(t, a)
    av = a.value
    return t._record(softplus_np(av), (a.idx,), (lambda g: g * sigmoid_np(av),))


def exp(a) -> Var:
    t = _tape_of(a)
    a = _as_var(t, a)
    y = np.exp(a.value)
    return t._record(y, (a.idx,), (lambda g: g * y,))


def log(a) -> Var:
    t = _tape_of(a)
    a = _as_var(t, a)
    av = a.value
    return t._record(np.log(av), (a.idx,), (lambda g: g / av,))


def square(a) -> Var:
    t = _tape_of(a)
    a = _as_var(t, a)
    av = a.value
    return t._record(av * av, (a.idx,), (lambda g: g * 2.0 * av,))


def clip(a, lo: float, hi: float) -> Var:
    """Clamp with pass-through gradient inside [lo, hi], zero outside."""
    t = _tape_of(a)
    a = _as_var(t, a)
    av = a.value
    inside = ((av >= lo) & (av <= hi)).astype(np.float64)
    return t._record(np.clip(av, lo, hi), (a.idx,), (lambda g: g * inside,))


def vsum(a, axis=None, keepdims: bool = False) -> Var:
    t = _tape_of(a)
    a = _as_var(t, a)
    av = a.value
    y = av.sum(axis=axis, keepdims=keepdims)

    def vjp(g):
        if axis is None:
            return np.broadcast_to(g, av.shape).copy()
        gg = g if keepdims else np.expand_dims(g, axis)
        return np.broadcast_to(gg, av.shape).copy()

    return t._record(y, (a.idx,), (vjp,))


def softmax(a, axis: int = -1) -> Var:
    t = _tape_of(a)
    a = _as_var(t, a)
    av = a.value
    shifted = av - av.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def vjp(g):
        return y * (g - (g * y).sum(axis=axis, keepdims=True))

    return t._record(y, (a.idx,), (vjp,))


def concat(parts, axis: int = -1) -> Var:
    t = _tape_of(*parts)
    parts = [_as_var(t, p) for p in parts]
    vals = [p.value for p in parts]
    y = np.concatenate(vals, axis=axis)
    sizes = [v.shape[axis] for v in vals]
    offsets = np.cumsum([0] + sizes)

    def make_vjp(i):
        sl = [slice(None)] * y.ndim
        sl[axis] = slice(offsets[i], offsets[i + 1])
        sl = tuple(sl)
        return lambda g: g[sl]

    return t._record(y, tuple(p.idx for p in parts),
                     tuple(make_vjp(i) for i in range(len(parts))))


def take_cols(a, j0: int, j1: int) -> Var:
    """Contiguous column slice a[:, j0:j1] of a 2-D value."""
    t = _tape_of(a)
    a = _as_var(t, a)
    av = a.value

    def vjp(g):
        out = np.zeros_like(av)
        out[:, j0:j1] = g
        return out

    return t._record(av[:, j0:j1], (a.idx,), (vjp,))


def backward(tape: Tape, out: Var) -> list[np.ndarray]:
    """Gradients of the scalar `out` w.r.t. all leaves, in registration order.

    Unvisited nodes keep zero adjoints; each node's vjp runs exactly once.
    """
    if out.tape is not tape:
        raise ValueError("output is not on this tape")
    if np.asarray(out.value).size != 1:
        raise ValueError(f"backward requires a scalar output, got shape {out.shape}")
    adj: list = [None] * len(tape.nodes)
    adj[out.idx] = np.ones_like(tape.nodes[out.idx].value)
    for i in range(out.idx, -1, -1):
        g = adj[i]
        if g is None:
            continue
        node = tape.nodes[i]
        for p, vjp in zip(node.parents, node.vjps):
            contrib = vjp(g)
            if adj[p] is None:
                adj[p] = np.array(contrib, dtype=np.float64, copy=True)
            else:
                adj[p] += contrib
    grads = []
    for li in tape.leaf_idx:
        g = adj[li]
        grads.append(np.zeros_like(tape.nodes[li].value) if g is None else g)
    return grads


def backward_flat(tape: Tape, out: Var) -> np.ndarray:
    """Flat concatenation of `backward` in leaf registration order."""
    return np.concatenate([g.ravel() for g in backward(tape, out)])


class ParamLayout:
    """Named (shape) slots mapping a flat vector to structured arrays."""

    def __init__(self, shapes: list[tuple[str, tuple]]):
        self.names = [n for n, _ in shapes]
        self.shapes = [tuple(s) for _, s in shapes]
        self.sizes = [int(np.prod(s)) if s else 1 for s in self.shapes]
        self.offsets = np.cumsum([0] + self.sizes)
        self.size = int(self.offsets[-1])

    def unpack(self, flat: np.ndarray) -> dict[str, np.ndarray]:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.size,):
            raise ValueError(f"expected flat vector of length {self.size}, got {flat.shape}")
        out = {}
        for name, shape, o0, o1 in zip(self.names, self.shapes,
                                       self.offsets[:-1], self.offsets[1:]):
            out[name] = flat[o0:o1].reshape(shape)
        return out

    def pack(self, arrays: dict[str, np.ndarray]) -> np.ndarray:
        return np.concatenate([np.asarray(arrays[n], dtype=np.float64).ravel()
                               for n in self.names])
