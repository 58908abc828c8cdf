"""Shallow Fourier networks with exact lattice bookkeeping.

A :class:`FourierNet` is ``x -> Σ_s u_s exp(i (Σ_j s_j W_j)·x)`` where the
``W_j`` form a declared generating set (the basis) and every atom is keyed by
its integer multi-index ``s``.  Sums, products, powers and polynomial
compositions therefore merge atoms by integer keys, never by comparing
floating-point frequencies.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any

import numpy as np
import numpy.typing as npt

from aumai_depthsep.errors import BudgetExceededError, DomainError, ShapeError
from aumai_depthsep.uniapprox import TrigPoly, UniPoly

__all__ = [
    "DEFAULT_ATOM_CAP",
    "FourierNet",
    "TrigPair",
    "fn_eval",
    "fn_pow",
    "fn_multiply",
    "fn_compose_poly",
    "fn_compose_poly_pruned",
    "fn_prune",
    "fn_linear_combine",
    "fn_from_trigpoly",
    "fn_to_trig_pair",
    "load_fn",
    "dump_fn",
]

logger = logging.getLogger(__name__)

DEFAULT_ATOM_CAP = 1_000_000

IntArray = npt.NDArray[np.int64]
FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

# Scratch size (atoms x points or pair rows) per vectorised block.
_BLOCK = 1 << 21


def _canonical(indices: IntArray, coeffs: ComplexArray) -> tuple[IntArray, ComplexArray]:
    """Merge duplicate multi-indices, drop exact zeros, sort lexicographically."""
    if indices.shape[0] == 0:
        return indices.reshape(0, indices.shape[1]), coeffs.reshape(0)
    width = indices.shape[1]
    if width == 0:
        total = coeffs.sum()
        if total == 0:
            return np.zeros((0, 0), dtype=np.int64), np.zeros(0, dtype=complex)
        return np.zeros((1, 0), dtype=np.int64), np.array([total])
    lo = indices.min(axis=0)
    spans = indices.max(axis=0) - lo + 1
    if float(np.prod(spans.astype(float))) < 2.0**62:
        # Mixed-radix key with the first column most significant.
        strides = np.ones(width, dtype=np.int64)
        for j in range(width - 2, -1, -1):
            strides[j] = strides[j + 1] * spans[j + 1]
        keys = (indices - lo) @ strides
        uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        rows = indices[first]
    else:
        rows, inverse = np.unique(indices, axis=0, return_inverse=True)
        uniq = rows
    inverse = inverse.reshape(-1)
    re = np.bincount(inverse, weights=coeffs.real, minlength=len(uniq))
    im = np.bincount(inverse, weights=coeffs.imag, minlength=len(uniq))
    merged = re + 1j * im
    keep = merged != 0
    return rows[keep].astype(np.int64), merged[keep]


class FourierNet:
    """Immutable shallow Fourier network.

    Args:
        basis: Generating frequencies, shape ``(n_basis, d)``.
        indices: Integer multi-indices over the basis, shape ``(atoms, n_basis)``.
        coeffs: Complex coefficient per atom.
    """

    __slots__ = ("_basis", "_indices", "_coeffs")

    def __init__(
        self,
        basis: npt.ArrayLike,
        indices: npt.ArrayLike,
        coeffs: npt.ArrayLike,
    ) -> None:
        b = np.array(basis, dtype=float, ndmin=2)
        idx = np.array(indices, dtype=np.int64, ndmin=2)
        c = np.array(coeffs, dtype=complex, ndmin=1)
        if idx.size == 0:
            # Over an empty basis every coefficient sits on the empty multi-index.
            rows = c.shape[0] if b.shape[0] == 0 else 0
            idx = np.zeros((rows, b.shape[0]), dtype=np.int64)
        if idx.shape[1] != b.shape[0]:
            raise ShapeError(f"indices have {idx.shape[1]} columns for {b.shape[0]} basis vectors")
        if idx.shape[0] != c.shape[0]:
            raise ShapeError(f"{idx.shape[0]} multi-indices for {c.shape[0]} coefficients")
        idx, c = _canonical(idx, c)
        for arr in (b, idx, c):
            arr.setflags(write=False)
        self._basis, self._indices, self._coeffs = b, idx, c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, d: int) -> FourierNet:
        return cls(np.zeros((0, d)), np.zeros((0, 0), dtype=np.int64), np.zeros(0))

    @classmethod
    def constant(cls, value: complex, d: int) -> FourierNet:
        return cls(np.zeros((0, d)), np.zeros((1, 0), dtype=np.int64), [value])

    def with_basis(self, basis: FloatArray, columns: npt.NDArray[np.intp]) -> FourierNet:
        """Re-express over a larger basis; ``columns[j]`` is the new slot of basis row j."""
        idx = np.zeros((self.atom_count, basis.shape[0]), dtype=np.int64)
        idx[:, columns] = self._indices
        return FourierNet(basis, idx, self._coeffs)

    # -- accessors ---------------------------------------------------------

    @property
    def d(self) -> int:
        return int(self._basis.shape[1])

    @property
    def basis(self) -> FloatArray:
        return self._basis

    @property
    def indices(self) -> IntArray:
        return self._indices

    @property
    def coeffs(self) -> ComplexArray:
        return self._coeffs

    @property
    def atom_count(self) -> int:
        return int(self._coeffs.shape[0])

    @property
    def frequencies(self) -> FloatArray:
        """Frequency vector of every atom, shape ``(atoms, d)``."""
        return self._indices.astype(float) @ self._basis

    @property
    def mass(self) -> float:
        """``Σ|u_s|``, an upper bound on the sup norm."""
        return float(np.abs(self._coeffs).sum())

    def constant_term(self) -> complex:
        zero_rows = ~self._indices.any(axis=1)
        return complex(self._coeffs[zero_rows].sum())

    def __len__(self) -> int:
        return self.atom_count

    def __repr__(self) -> str:
        return f"FourierNet(d={self.d}, basis={self._basis.shape[0]}, atoms={self.atom_count})"

    def __call__(self, x: npt.ArrayLike) -> complex | ComplexArray:
        return fn_eval(self, x)


# ---------------------------------------------------------------------------
# Basis alignment
# ---------------------------------------------------------------------------


def _union_basis(nets: Sequence[FourierNet]) -> tuple[FloatArray, list[npt.NDArray[np.intp]]]:
    """Union of the generating sets with exact row deduplication."""
    d = nets[0].d
    rows: dict[tuple[float, ...], int] = {}
    columns: list[npt.NDArray[np.intp]] = []
    for net in nets:
        if net.d != d:
            raise ShapeError(f"ambient dimensions differ: {net.d} != {d}")
        cols = []
        for row in net.basis:
            key = tuple(float(v) for v in row)
            cols.append(rows.setdefault(key, len(rows)))
        columns.append(np.asarray(cols, dtype=np.intp))
    basis = np.array(list(rows), dtype=float).reshape(len(rows), d)
    return basis, columns


def _aligned(nets: Sequence[FourierNet]) -> list[FourierNet]:
    first = nets[0].basis
    if all(n.basis.shape == first.shape and np.array_equal(n.basis, first) for n in nets):
        return list(nets)
    basis, columns = _union_basis(nets)
    return [net.with_basis(basis, cols) for net, cols in zip(nets, columns, strict=True)]


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def fn_eval(fn: FourierNet, x: npt.ArrayLike) -> complex | ComplexArray:
    """Evaluate at a point ``(d,)`` or a batch ``(n, d)``.

    Raises:
        ShapeError: If the trailing dimension differs from ``fn.d``.
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    batch = arr.reshape(1, -1) if single else arr
    if batch.ndim != 2 or batch.shape[1] != fn.d:
        raise ShapeError(f"expected input of dimension {fn.d}, got shape {arr.shape}")
    out = np.zeros(batch.shape[0], dtype=complex)
    if fn.atom_count:
        freqs = fn.frequencies
        step = max(1, _BLOCK // fn.atom_count)
        for start in range(0, batch.shape[0], step):
            phases = batch[start : start + step] @ freqs.T
            out[start : start + step] = np.exp(1j * phases) @ fn.coeffs
    if single:
        return complex(out[0])
    return out


def fn_multiply(
    a: FourierNet, b: FourierNet, *, atom_cap: int = DEFAULT_ATOM_CAP
) -> FourierNet:
    """Pointwise product, computed as a lattice convolution.

    Raises:
        BudgetExceededError: If the merged product has more than *atom_cap* atoms.
    """
    a, b = _aligned([a, b])
    if a.atom_count == 0 or b.atom_count == 0:
        return FourierNet(a.basis, np.zeros((0, a.basis.shape[0]), dtype=np.int64), [])
    width = a.basis.shape[0]
    step = max(1, _BLOCK // b.atom_count)
    merged_idx = np.zeros((0, width), dtype=np.int64)
    merged_c = np.zeros(0, dtype=complex)
    for start in range(0, a.atom_count, step):
        ia = a.indices[start : start + step]
        ca = a.coeffs[start : start + step]
        pair_idx = (ia[:, None, :] + b.indices[None, :, :]).reshape(-1, width)
        pair_c = (ca[:, None] * b.coeffs[None, :]).reshape(-1)
        merged_idx, merged_c = _canonical(
            np.concatenate([merged_idx, pair_idx]), np.concatenate([merged_c, pair_c])
        )
        if merged_c.size > atom_cap:
            raise BudgetExceededError(
                f"product has more than {atom_cap} atoms ({merged_c.size} so far)"
            )
    return FourierNet(a.basis, merged_idx, merged_c)


def _power_terms(
    indices: IntArray, coeffs: ComplexArray, combos: IntArray, k: int
) -> tuple[IntArray, ComplexArray]:
    idx = indices[combos].sum(axis=1)
    prod = coeffs[combos].prod(axis=1)
    # Rows of combos are non-decreasing, so runs of equal entries give Π m_i!.
    repeats = np.ones(combos.shape[0])
    run = np.ones(combos.shape[0])
    for j in range(1, k):
        run = np.where(combos[:, j] == combos[:, j - 1], run + 1.0, 1.0)
        repeats *= run
    return _canonical(idx, prod * (math.factorial(k) / repeats))


def fn_pow(
    fn: FourierNet,
    k: int,
    *,
    atom_cap: int = DEFAULT_ATOM_CAP,
    shards: int = 1,
) -> FourierNet:
    """``fn(x)**k`` by the multinomial formula.

    Multisets of atoms are enumerated in lexicographic order and merged by
    multi-index.  With ``shards > 1`` the enumeration is split into
    contiguous blocks expanded on a thread pool and merged in block order.

    Raises:
        DomainError: If ``k < 0``.
        BudgetExceededError: If ``binom(n + k − 1, k)`` exceeds *atom_cap*.
    """
    if k < 0:
        raise DomainError(f"exponent must be >= 0, got {k}")
    width = fn.basis.shape[0]
    if k == 0:
        return FourierNet(fn.basis, np.zeros((1, width), dtype=np.int64), [1.0])
    n = fn.atom_count
    if n == 0:
        return fn
    projected = math.comb(n + k - 1, k)
    if projected > atom_cap:
        raise BudgetExceededError(
            f"power {k} of a {n}-atom net may need {projected} atoms (cap {atom_cap})"
        )
    combos = np.array(
        list(itertools.combinations_with_replacement(range(n), k)), dtype=np.intp
    ).reshape(projected, k)
    if shards <= 1 or projected < 2 * shards:
        idx, c = _power_terms(fn.indices, fn.coeffs, combos, k)
    else:
        blocks = np.array_split(combos, shards)
        with ThreadPoolExecutor(max_workers=shards) as pool:
            parts = list(
                pool.map(lambda blk: _power_terms(fn.indices, fn.coeffs, blk, k), blocks)
            )
        idx, c = _canonical(
            np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
        )
    logger.debug("fn_pow k=%d: %d atoms -> %d atoms", k, n, c.size)
    return FourierNet(fn.basis, idx, c)


def fn_prune(fn: FourierNet, budget: float) -> tuple[FourierNet, float]:
    """Drop the smallest atoms whose total modulus stays within *budget*.

    Returns:
        The pruned net and the dropped mass, an upper bound on the sup-norm
        change.
    """
    if budget <= 0.0 or fn.atom_count == 0:
        return fn, 0.0
    mags = np.abs(fn.coeffs)
    order = np.argsort(mags, kind="stable")
    cumulative = np.cumsum(mags[order])
    cut = int(np.searchsorted(cumulative, budget, side="right"))
    if cut == 0:
        return fn, 0.0
    keep = np.sort(order[cut:])
    dropped = float(cumulative[cut - 1])
    return FourierNet(fn.basis, fn.indices[keep], fn.coeffs[keep]), dropped


def fn_linear_combine(coeffs: Sequence[complex], nets: Sequence[FourierNet]) -> FourierNet:
    """``Σ coeffs[i]·nets[i]`` over the union of the generating sets.

    Raises:
        ShapeError: On length or ambient-dimension mismatch.
    """
    if len(coeffs) != len(nets):
        raise ShapeError(f"{len(coeffs)} coefficients for {len(nets)} nets")
    if not nets:
        raise ShapeError("need at least one net to fix the ambient dimension")
    aligned = _aligned(nets)
    idx = np.concatenate([net.indices for net in aligned])
    c = np.concatenate(
        [complex(w) * net.coeffs for w, net in zip(coeffs, aligned, strict=True)]
    )
    return FourierNet(aligned[0].basis, idx, c)


def _add_constant(fn: FourierNet, value: complex) -> FourierNet:
    if value == 0:
        return fn
    width = fn.basis.shape[0]
    idx = np.concatenate([fn.indices, np.zeros((1, width), dtype=np.int64)])
    return FourierNet(fn.basis, idx, np.concatenate([fn.coeffs, [value]]))


def _scale(fn: FourierNet, factor: complex) -> FourierNet:
    return FourierNet(fn.basis, fn.indices, complex(factor) * fn.coeffs)


def fn_compose_poly_pruned(
    p: UniPoly,
    fn: FourierNet,
    *,
    prune_budget: float = 0.0,
    atom_cap: int = DEFAULT_ATOM_CAP,
) -> tuple[FourierNet, float]:
    """``p(fn(x))`` with optional pruning of intermediate results.

    Monomial polynomials use Horner's scheme.  Chebyshev (and Bernstein, via
    their Chebyshev form) use the Clenshaw recurrence on the affine image of
    ``fn`` in ``[−1, 1]``; pruning ``b_k`` then perturbs the coefficient of
    ``T_k`` only, so the error is at most the dropped mass wherever ``fn``
    stays inside the Chebyshev domain.

    Returns:
        The composed net and the total dropped mass.
    """
    dropped = 0.0
    if p.basis == "monomial":
        coeffs = [complex(c) for c in p.coeffs]
        share = prune_budget / max(len(coeffs) - 1, 1)
        result = FourierNet.constant(coeffs[-1], fn.d)
        for c in reversed(coeffs[:-1]):
            result = _add_constant(fn_multiply(result, fn, atom_cap=atom_cap), c)
            result, lost = fn_prune(result, share)
            dropped += lost
        return result, dropped

    cheb, (lo, hi) = p.to_chebyshev()
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
    s = _add_constant(_scale(fn, 1.0 / half), -mid / half)
    degree = cheb.size - 1
    if degree == 0:
        return FourierNet.constant(complex(cheb[0]), fn.d), 0.0
    share = prune_budget / degree
    b_next = FourierNet.zero(fn.d)
    b_curr = FourierNet.constant(complex(cheb[degree]), fn.d)
    for k in range(degree - 1, 0, -1):
        two_s_b = _scale(fn_multiply(s, b_curr, atom_cap=atom_cap), 2.0)
        b_new = _add_constant(fn_linear_combine([1.0, -1.0], [two_s_b, b_next]), complex(cheb[k]))
        b_new, lost = fn_prune(b_new, share)
        dropped += lost
        b_next, b_curr = b_curr, b_new
    result = fn_linear_combine([1.0, -1.0], [fn_multiply(s, b_curr, atom_cap=atom_cap), b_next])
    result = _add_constant(result, complex(cheb[0]))
    if result.atom_count > atom_cap:
        raise BudgetExceededError(f"composition has {result.atom_count} atoms (cap {atom_cap})")
    return result, dropped


def fn_compose_poly(
    p: UniPoly, fn: FourierNet, *, atom_cap: int = DEFAULT_ATOM_CAP
) -> FourierNet:
    """``p(fn(x))`` exactly (no pruning)."""
    result, _ = fn_compose_poly_pruned(p, fn, atom_cap=atom_cap)
    return result


def fn_from_trigpoly(
    q: TrigPoly, direction: npt.ArrayLike, offset: float = 0.0
) -> FourierNet:
    """``x -> q(u·x + offset)`` with generating frequency ``ω₀·u``."""
    u = np.asarray(direction, dtype=float).reshape(-1)
    ks = np.arange(-q.degree, q.degree + 1, dtype=np.int64)
    coeffs = q.coefficients * np.exp(1j * q.base_frequency * ks * offset)
    if q.base_frequency == 0.0 or not u.any():
        return FourierNet.constant(complex(coeffs.sum()), u.size)
    basis = (q.base_frequency * u)[None, :]
    return FourierNet(basis, ks[:, None], coeffs)


class TrigPair:
    """Real decomposition ``fn(x) = Σ C_s cos(v_s·x) + Σ S_s sin(v_s·x)``.

    Each ``±s`` pair of atoms is stored once (first non-zero entry of ``s``
    positive) with ``C = u_s + u_{−s}`` and ``S = i(u_s − u_{−s})``.
    """

    __slots__ = ("basis", "indices", "cos_coeffs", "sin_coeffs")

    def __init__(
        self,
        basis: FloatArray,
        indices: IntArray,
        cos_coeffs: ComplexArray,
        sin_coeffs: ComplexArray,
    ) -> None:
        self.basis = basis
        self.indices = indices
        self.cos_coeffs = cos_coeffs
        self.sin_coeffs = sin_coeffs

    @property
    def frequencies(self) -> FloatArray:
        return self.indices.astype(float) @ self.basis

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    def cos_part(self, x: npt.ArrayLike) -> ComplexArray:
        phases = np.atleast_2d(np.asarray(x, dtype=float)) @ self.frequencies.T
        return np.asarray(np.cos(phases) @ self.cos_coeffs)

    def sin_part(self, x: npt.ArrayLike) -> ComplexArray:
        phases = np.atleast_2d(np.asarray(x, dtype=float)) @ self.frequencies.T
        return np.asarray(np.sin(phases) @ self.sin_coeffs)

    def recombine(self, x: npt.ArrayLike) -> ComplexArray:
        return self.cos_part(x) + self.sin_part(x)


def fn_to_trig_pair(fn: FourierNet) -> TrigPair:
    """Split *fn* into cosine and sine atoms over half the lattice."""
    idx, c = fn.indices, fn.coeffs
    lookup = {tuple(row): i for i, row in enumerate(idx.tolist())}
    half_idx: list[list[int]] = []
    cos_c: list[complex] = []
    sin_c: list[complex] = []
    for row, u in zip(idx.tolist(), c, strict=True):
        nonzero = [v for v in row if v]
        if nonzero and nonzero[0] < 0:
            if tuple(-v for v in row) in lookup:
                continue
            # Lone negative atom: u e^{-iθ} = u cos θ − i u sin θ.
            half_idx.append([-v for v in row])
            cos_c.append(complex(u))
            sin_c.append(-1j * complex(u))
            continue
        mirror = lookup.get(tuple(-v for v in row)) if nonzero else None
        u_neg = complex(c[mirror]) if mirror is not None else 0j
        half_idx.append(row)
        cos_c.append(complex(u) + u_neg)
        sin_c.append(1j * (complex(u) - u_neg) if nonzero else 0j)
    width = fn.basis.shape[0]
    return TrigPair(
        fn.basis,
        np.asarray(half_idx, dtype=np.int64).reshape(len(half_idx), width),
        np.asarray(cos_c, dtype=complex),
        np.asarray(sin_c, dtype=complex),
    )


def dump_fn(fn: FourierNet) -> str:
    """Serialise as ``{"basis": [[...]], "atoms": [{"s", "re", "im"}]}``."""
    payload: dict[str, Any] = {
        "d": fn.d,
        "basis": fn.basis.tolist(),
        "atoms": [
            {"s": [int(v) for v in row], "re": float(u.real), "im": float(u.imag)}
            for row, u in zip(fn.indices, fn.coeffs, strict=True)
        ],
    }
    return json.dumps(payload, sort_keys=True)


def load_fn(text: str) -> FourierNet:
    """Parse a Fourier-net JSON document.

    Raises:
        ShapeError: If the document is structurally inconsistent.
    """
    try:
        payload = json.loads(text)
        basis = np.asarray(payload["basis"], dtype=float)
        d = int(payload.get("d", basis.shape[1] if basis.ndim == 2 else 0))
        basis = basis.reshape(-1, d)
        atoms = payload["atoms"]
        idx = np.asarray([a["s"] for a in atoms], dtype=np.int64)
        idx = idx.reshape(len(atoms), basis.shape[0])
        coeffs = np.asarray([complex(a["re"], a["im"]) for a in atoms], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"malformed Fourier-net document: {exc}") from exc
    return FourierNet(basis, idx, coeffs)
