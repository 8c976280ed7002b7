# numerics/ops.py
"""
Differentiable operations on :class:`numerics.tensor.Tensor`.

Every op computes its forward value with numpy and, when an input requires
gradients and a tape is active, records a vector-Jacobian product closure.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import log_softmax, softmax

from .tensor import GradientTape, Tensor, VjpFn, as_tensor
from utils.errors import ConditioningError, DimensionError, LabelError


def _result(value: np.ndarray, parents: Sequence[Tensor], vjp: VjpFn) -> Tensor:
    tape = GradientTape.current()
    needs_grad = tape is not None and any(p.requires_grad for p in parents)
    out = Tensor._wrap(value, needs_grad)
    if needs_grad:
        tape.record(out, parents, vjp)
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum *grad* down to *shape*, undoing numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_broadcast(a: np.ndarray, b: np.ndarray, op: str) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError as e:
        raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from e


# ── Elementwise arithmetic ────────────────────────────────────────────────────
def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.data, b.data, "add")
    return _result(a.data + b.data, (a, b),
                   lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.data, b.data, "sub")
    return _result(a.data - b.data, (a, b),
                   lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.data, b.data, "mul")
    return _result(a.data * b.data, (a, b),
                   lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)))


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.data, b.data, "div")
    out = a.data / b.data

    def vjp(g):
        return (_unbroadcast(g / b.data, a.shape),
                _unbroadcast(-g * out / b.data, b.shape))

    return _result(out, (a, b), vjp)


def neg(a) -> Tensor:
    a = as_tensor(a)
    return _result(-a.data, (a,), lambda g: (-g,))


def sqrt(a) -> Tensor:
    a = as_tensor(a)
    out = np.sqrt(a.data)
    return _result(out, (a,), lambda g: (g / (2.0 * out),))


def relu(a) -> Tensor:
    a = as_tensor(a)
    mask = a.data > 0
    return _result(np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,))


def stop_gradient(a) -> Tensor:
    """Forward identity; no adjoint flows back to *a*."""
    return as_tensor(a).detach()


# ── Linear algebra ────────────────────────────────────────────────────────────
def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"matmul expects 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul inner extents differ: {a.shape} @ {b.shape}")
    return _result(a.data @ b.data, (a, b),
                   lambda g: (g @ b.data.T, a.data.T @ g))


def transpose(a, axes: Sequence[int] | None = None) -> Tensor:
    a = as_tensor(a)
    if axes is None:
        axes = tuple(reversed(range(a.ndim)))
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    return _result(np.transpose(a.data, axes), (a,), lambda g: (np.transpose(g, inverse),))


def reshape(a, shape: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    try:
        out = a.data.reshape(tuple(shape))
    except ValueError as e:
        raise DimensionError(f"cannot reshape {a.shape} into {tuple(shape)}") from e
    return _result(out, (a,), lambda g: (g.reshape(a.shape),))


def trace(a) -> Tensor:
    a = as_tensor(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"trace needs a square matrix, got {a.shape}")
    eye = np.eye(a.shape[0])
    return _result(np.trace(a.data), (a,), lambda g: (g * eye,))


# ── Reductions / indexing ─────────────────────────────────────────────────────
def _expand_reduced(g: np.ndarray, shape: tuple[int, ...], axis, keepdims: bool) -> np.ndarray:
    if axis is not None and not keepdims:
        axes = (axis,) if isinstance(axis, int) else tuple(axis)
        axes = tuple(ax % len(shape) for ax in axes)
        g = np.expand_dims(g, axes)
    return np.broadcast_to(g, shape)


def sum(a, axis=None, keepdims: bool = False) -> Tensor:  # noqa: A001 - mirrors numpy
    a = as_tensor(a)
    out = np.sum(a.data, axis=axis, keepdims=keepdims)
    return _result(out, (a,), lambda g: (_expand_reduced(g, a.shape, axis, keepdims).copy(),))


def mean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    out = np.mean(a.data, axis=axis, keepdims=keepdims)
    count = a.size // max(np.size(out), 1)
    return _result(out, (a,), lambda g: (_expand_reduced(g, a.shape, axis, keepdims) / count,))


def index(a, key) -> Tensor:
    a = as_tensor(a)
    out = np.array(a.data[key])

    def vjp(g):
        grad = np.zeros_like(a.data)
        np.add.at(grad, key, g)
        return (grad,)

    return _result(out, (a,), vjp)


# ── Convolutional primitives ──────────────────────────────────────────────────
def conv2d(x, weight, bias=None, stride: int = 1, padding: int = 0) -> Tensor:
    """Cross-correlation of an NCHW batch with an (out, in, kh, kw) kernel."""
    x, weight = as_tensor(x), as_tensor(weight)
    if x.ndim != 4 or weight.ndim != 4:
        raise DimensionError(f"conv2d expects NCHW input and OIHW kernel, got {x.shape}, {weight.shape}")
    n, c, h, w = x.shape
    o, c_w, kh, kw = weight.shape
    if c != c_w:
        raise DimensionError(f"conv2d channel mismatch: input {c}, kernel {c_w}")
    if stride < 1 or padding < 0:
        raise DimensionError(f"conv2d stride must be >= 1 and padding >= 0 (got {stride}, {padding})")
    hp, wp = h + 2 * padding, w + 2 * padding
    if kh > hp or kw > wp:
        raise DimensionError(f"conv2d kernel {kh}x{kw} larger than padded input {hp}x{wp}")

    xp = np.pad(x.data, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    ho, wo = windows.shape[2], windows.shape[3]
    out = np.einsum("nchwij,ocij->nohw", windows, weight.data, optimize=False)
    parents: list[Tensor] = [x, weight]
    if bias is not None:
        bias = as_tensor(bias)
        if bias.shape != (o,):
            raise DimensionError(f"conv2d bias must have shape ({o},), got {bias.shape}")
        out = out + bias.data[None, :, None, None]
        parents.append(bias)

    def vjp(g):
        grad_w = np.einsum("nchwij,nohw->ocij", windows, g, optimize=False)
        cols = np.einsum("nohw,ocij->nchwij", g, weight.data, optimize=False)
        grad_xp = np.zeros_like(xp)
        for i in range(kh):
            for j in range(kw):
                grad_xp[:, :, i:i + stride * ho:stride, j:j + stride * wo:stride] += cols[..., i, j]
        grad_x = grad_xp[:, :, padding:padding + h, padding:padding + w]
        grads = [grad_x, grad_w]
        if bias is not None:
            grads.append(g.sum(axis=(0, 2, 3)))
        return grads

    return _result(out, parents, vjp)


def pooled_extent(extent: int, size: int, stride: int) -> int:
    """Output length of a ceil-mode pooling window sweep."""
    if size > extent:
        raise DimensionError(f"pool window {size} larger than input extent {extent}")
    count = math.ceil((extent - size) / stride) + 1
    if (count - 1) * stride >= extent:
        count -= 1
    return count


def maxpool2d(x, size: int = 2, stride: int | None = None) -> Tensor:
    """Max pooling over the last two axes of an NCHW tensor, ceil mode.

    Windows hanging over the border are padded with -inf so they never win.
    Adjoints route to the first maximal cell of each window.
    """
    x = as_tensor(x)
    if x.ndim != 4:
        raise DimensionError(f"maxpool2d expects NCHW input, got {x.shape}")
    if size < 1:
        raise DimensionError(f"pool size must be positive, got {size}")
    stride = stride or size
    n, c, h, w = x.shape
    ho, wo = pooled_extent(h, size, stride), pooled_extent(w, size, stride)
    pad_h = max((ho - 1) * stride + size - h, 0)
    pad_w = max((wo - 1) * stride + size - w, 0)
    xp = np.pad(x.data, ((0, 0), (0, 0), (0, pad_h), (0, pad_w)), constant_values=-np.inf)
    windows = sliding_window_view(xp, (size, size), axis=(2, 3))[:, :, ::stride, ::stride][:, :, :ho, :wo]
    flat = windows.reshape(n, c, ho, wo, size * size)
    winner = flat.argmax(axis=-1)
    out = np.take_along_axis(flat, winner[..., None], axis=-1)[..., 0]

    def vjp(g):
        grad_p = np.zeros_like(xp)
        ni, ci, ri, cj = np.indices((n, c, ho, wo))
        rows = ri * stride + winner // size
        cols = cj * stride + winner % size
        np.add.at(grad_p, (ni, ci, rows, cols), g)
        return (grad_p[:, :, :h, :w],)

    return _result(out, (x,), vjp)


# ── Losses ────────────────────────────────────────────────────────────────────
def softmax_cross_entropy(logits, labels) -> Tensor:
    """Mean cross entropy of integer *labels* under softmax(*logits*), logits n×C."""
    logits = as_tensor(logits)
    labels = np.asarray(labels)
    if logits.ndim != 2:
        raise DimensionError(f"logits must be n x C, got {logits.shape}")
    n, n_classes = logits.shape
    if labels.shape != (n,):
        raise DimensionError(f"expected {n} labels, got shape {labels.shape}")
    labels = labels.astype(np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise LabelError(f"labels must lie in [0, {n_classes}), got range [{labels.min()}, {labels.max()}]")

    log_p = log_softmax(logits.data, axis=1)
    rows = np.arange(n)
    loss = -log_p[rows, labels].mean()

    def vjp(g):
        grad = softmax(logits.data, axis=1)
        grad[rows, labels] -= 1.0
        return (g * grad / n,)

    return _result(np.asarray(loss), (logits,), vjp)


# ── Spectral ──────────────────────────────────────────────────────────────────
def sym_inv_sqrt(s) -> Tensor:
    """Inverse principal square root D Λ^{-1/2} Dᵀ of a symmetric PD matrix.

    The adjoint assumes symmetric perturbations of *s*, which is the case for
    covariance matrices built from data.
    """
    s = as_tensor(s)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionError(f"sym_inv_sqrt needs a square matrix, got {s.shape}")
    lam, vecs = np.linalg.eigh(s.data)
    if lam.min() <= 0:
        raise ConditioningError(f"matrix is not positive definite (min eigenvalue {lam.min():.3e})")
    root = np.sqrt(lam)
    out = (vecs / root) @ vecs.T
    # divided differences of λ -> λ^{-1/2}; the diagonal is the derivative
    kernel = -1.0 / (np.outer(root, root) * (root[:, None] + root[None, :]))

    def vjp(g):
        g_sym = 0.5 * (g + g.T)
        inner = vecs.T @ g_sym @ vecs
        return (vecs @ (kernel * inner) @ vecs.T,)

    return _result(out, (s,), vjp)
