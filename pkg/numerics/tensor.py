# numerics/tensor.py
"""
Dense float64 tensors with tape-based reverse-mode differentiation.

A :class:`Tensor` wraps an immutable ``numpy`` array.  Operations from
:mod:`numerics.ops` append a record to the innermost active
:class:`GradientTape` whenever one of their inputs requires gradients;
:func:`backward` replays the tape in reverse to accumulate adjoints.

Usage
-----
>>> x = Tensor([1.0, 2.0, 3.0], requires_grad=True)
>>> with GradientTape() as tape:
...     loss = ops.sum(x)
>>> grads = backward(loss, tape)
>>> grads[x]
array([1., 1., 1.])
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from utils.errors import ContractError

VjpFn = Callable[[np.ndarray], Sequence["np.ndarray | None"]]


class Tensor:
    """Immutable n-dimensional float64 array that may take part in autodiff."""

    __slots__ = ("_data", "requires_grad", "name")
    __array_ufunc__ = None  # ndarray <op> Tensor defers to the reflected Tensor op

    def __init__(self, data, requires_grad: bool = False, name: str = "") -> None:
        arr = np.array(data, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        self._data = arr
        self.requires_grad = bool(requires_grad)
        self.name = name

    @classmethod
    def _wrap(cls, arr: np.ndarray, requires_grad: bool) -> "Tensor":
        """Adopt *arr* without copying (internal; arr must not be shared)."""
        out = cls.__new__(cls)
        arr = np.asarray(arr, dtype=np.float64)
        arr.setflags(write=False)
        out._data = arr
        out.requires_grad = requires_grad
        out.name = ""
        return out

    # ── Array protocol ────────────────────────────────────────────────────────
    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return self._data.size

    def numpy(self) -> np.ndarray:
        """Writable copy of the underlying values."""
        return self._data.copy()

    def item(self) -> float:
        if self._data.size != 1:
            raise ContractError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self._data.reshape(()))

    def detach(self) -> "Tensor":
        """Same values, cut from any tape."""
        return Tensor._wrap(self._data, False)

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor({self._data!r}{flag})"

    def __len__(self) -> int:
        return len(self._data)

    # ── Operator sugar (delegates to numerics.ops) ────────────────────────────
    def __add__(self, other):
        from numerics import ops
        return ops.add(self, other)

    def __radd__(self, other):
        from numerics import ops
        return ops.add(other, self)

    def __sub__(self, other):
        from numerics import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from numerics import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from numerics import ops
        return ops.mul(self, other)

    def __rmul__(self, other):
        from numerics import ops
        return ops.mul(other, self)

    def __truediv__(self, other):
        from numerics import ops
        return ops.div(self, other)

    def __rtruediv__(self, other):
        from numerics import ops
        return ops.div(other, self)

    def __neg__(self):
        from numerics import ops
        return ops.neg(self)

    def __matmul__(self, other):
        from numerics import ops
        return ops.matmul(self, other)

    def __rmatmul__(self, other):
        from numerics import ops
        return ops.matmul(other, self)

    def __getitem__(self, key):
        from numerics import ops
        return ops.index(self, key)

    @property
    def T(self) -> "Tensor":
        from numerics import ops
        return ops.transpose(self)

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        from numerics import ops
        return ops.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        from numerics import ops
        return ops.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape) -> "Tensor":
        from numerics import ops
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)


def as_tensor(value) -> Tensor:
    """Return *value* unchanged if it is a Tensor, else a constant Tensor."""
    return value if isinstance(value, Tensor) else Tensor(value)


def as_array(value) -> np.ndarray:
    """Read-only float64 view of a Tensor or array-like."""
    if isinstance(value, Tensor):
        return value.data
    return np.asarray(value, dtype=np.float64)


@dataclass
class _Record:
    output: Tensor
    parents: tuple[Tensor, ...]
    vjp: VjpFn


class GradientTape:
    """Ordered record of differentiable operations.

    Tapes nest; operations record onto the innermost active tape.  A tape
    belongs to one thread of training; independent runs use independent
    tapes.
    """

    _stack: list["GradientTape"] = []

    def __init__(self) -> None:
        self._records: list[_Record] = []
        self._produced: set[int] = set()

    def __enter__(self) -> "GradientTape":
        GradientTape._stack.append(self)
        return self

    def __exit__(self, *exc) -> None:
        GradientTape._stack.remove(self)

    @classmethod
    def current(cls) -> "GradientTape | None":
        return cls._stack[-1] if cls._stack else None

    def __len__(self) -> int:
        return len(self._records)

    def record(self, output: Tensor, parents: Sequence[Tensor], vjp: VjpFn) -> None:
        self._records.append(_Record(output, tuple(parents), vjp))
        self._produced.add(id(output))

    def is_recorded(self, tensor: Tensor) -> bool:
        return id(tensor) in self._produced

    def clear(self) -> None:
        self._records.clear()
        self._produced.clear()

    def gradient(self, loss: Tensor, sources: Iterable[Tensor] | None = None) -> dict[Tensor, np.ndarray]:
        """Adjoints of *loss* w.r.t. every leaf that requires gradients.

        Leaves listed in *sources* that the loss does not depend on receive an
        exact zero adjoint.  The tape is cleared afterwards.
        """
        if loss.size != 1:
            raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
        if not self.is_recorded(loss) and not loss.requires_grad:
            raise ContractError("loss was not recorded on this tape")

        adjoints: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        leaves: dict[int, Tensor] = {}
        if loss.requires_grad and not self.is_recorded(loss):
            leaves[id(loss)] = loss

        for rec in reversed(self._records):
            grad_out = adjoints.pop(id(rec.output), None)
            if grad_out is None:
                continue
            parent_grads = rec.vjp(grad_out)
            for parent, g in zip(rec.parents, parent_grads):
                if g is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in adjoints:
                    adjoints[key] = adjoints[key] + g
                else:
                    adjoints[key] = np.asarray(g, dtype=np.float64)
                if not self.is_recorded(parent):
                    leaves[key] = parent

        result: dict[Tensor, np.ndarray] = {}
        for key, leaf in leaves.items():
            result[leaf] = adjoints.get(key, np.zeros_like(leaf.data)).reshape(leaf.shape)
        if sources is not None:
            for src in sources:
                if src not in result:
                    result[src] = np.zeros_like(src.data)
        self.clear()
        return result


def backward(loss: Tensor, tape: GradientTape | None = None,
             sources: Iterable[Tensor] | None = None) -> dict[Tensor, np.ndarray]:
    """Reverse pass over *tape* (default: the innermost active tape)."""
    if tape is None:
        tape = GradientTape.current()
    if tape is None:
        raise ContractError("backward called with no gradient tape")
    return tape.gradient(loss, sources)
