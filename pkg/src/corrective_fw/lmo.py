"""Linear minimization oracles over the feasible regions used by the solvers.

Each oracle maps a gradient direction to an extreme point (an :class:`Atom`).
Tie-breaking is lowest index / first found everywhere so that runs are
bit-reproducible for a fixed seed.
"""

import numpy as np

from .errors import InvalidKError, NonFiniteInputError, NotSquareError


def _require_finite(name, arr):
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError(f"{name} contains NaN or Inf entries")


class Atom:
    """An extreme point stored in canonical form.

    Sparse atoms (simplex vertices, signed unit vectors, permutation
    matrices) keep sorted index/value pairs; boundary points of balls are
    stored densely.  Two atoms are equal iff their canonical keys are equal.
    """

    __slots__ = ("dim", "indices", "values", "key")

    def __init__(self, dim, indices, values, key):
        self.dim = dim
        self.indices = indices
        self.values = values
        self.key = key

    @classmethod
    def from_sparse(cls, dim, indices, values):
        indices = np.asarray(indices, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        order = np.argsort(indices, kind="stable")
        indices = np.ascontiguousarray(indices[order])
        values = np.ascontiguousarray(values[order])
        key = ("s", int(dim), indices.tobytes(), values.tobytes())
        return cls(int(dim), indices, values, key)

    @classmethod
    def from_dense(cls, values):
        values = np.ascontiguousarray(np.asarray(values, dtype=float))
        key = ("d", values.shape[0], values.tobytes())
        return cls(values.shape[0], None, values, key)

    @classmethod
    def unit(cls, dim, index, value=1.0):
        return cls.from_sparse(dim, [index], [value])

    @property
    def is_sparse(self):
        return self.indices is not None

    def to_dense(self):
        if self.indices is None:
            return self.values.copy()
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def dot(self, vector):
        if self.indices is None:
            return float(self.values @ vector)
        return float(self.values @ vector[self.indices])

    def add_scaled_into(self, out, alpha):
        if self.indices is None:
            out += alpha * self.values
        else:
            np.add.at(out, self.indices, alpha * self.values)

    def __eq__(self, other):
        return isinstance(other, Atom) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"Atom({kind}, dim={self.dim})"

    @staticmethod
    def concat(atoms, dims):
        """Concatenate per-block atoms into one atom over the product space."""
        if all(a.is_sparse for a in atoms):
            offset = 0
            idx, val = [], []
            for atom, dim in zip(atoms, dims):
                idx.append(atom.indices + offset)
                val.append(atom.values)
                offset += dim
            return Atom.from_sparse(offset, np.concatenate(idx), np.concatenate(val))
        return Atom.from_dense(np.concatenate([a.to_dense() for a in atoms]))


class LinearMinimizationOracle:
    """Interface: ``minimize(direction) -> Atom`` plus a diameter bound."""

    dim = None

    def minimize(self, direction):
        raise NotImplementedError

    def diameter_sq_upper_bound(self):
        raise NotImplementedError

    def contains(self, x, tol=1e-9):
        raise NotImplementedError


class SimplexLMO(LinearMinimizationOracle):
    """Probability simplex; vertices are the standard basis vectors."""

    def __init__(self, dim):
        self.dim = int(dim)

    def minimize(self, direction):
        direction = np.asarray(direction, dtype=float)
        _require_finite("direction", direction)
        return Atom.unit(self.dim, int(np.argmin(direction)))

    def diameter_sq_upper_bound(self):
        return 2.0

    def contains(self, x, tol=1e-9):
        return x.min(initial=0.0) >= -tol and abs(x.sum() - 1.0) <= tol


class L1BallLMO(LinearMinimizationOracle):
    """l1 ball of a given radius; vertices are signed scaled unit vectors."""

    def __init__(self, dim, radius=1.0):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.dim = int(dim)
        self.radius = float(radius)

    def minimize(self, direction):
        direction = np.asarray(direction, dtype=float)
        _require_finite("direction", direction)
        j = int(np.argmax(np.abs(direction)))
        sign = 1.0 if direction[j] >= 0.0 else -1.0
        return Atom.unit(self.dim, j, -self.radius * sign)

    def diameter_sq_upper_bound(self):
        return 4.0 * self.radius**2

    def contains(self, x, tol=1e-9):
        return np.abs(x).sum() <= self.radius + tol


class KSparseLMO(LinearMinimizationOracle):
    """Intersection of the l1 ball of radius tau*k and the box of radius tau.

    Vertices carry exactly k entries of magnitude tau.  Selection of the k
    largest-magnitude coordinates is stable (lowest index first on ties).
    """

    def __init__(self, dim, k, tau=1.0):
        if not 1 <= k <= dim:
            raise InvalidKError(f"k={k} outside [1, {dim}]")
        if tau <= 0:
            raise ValueError("tau must be positive")
        self.dim = int(dim)
        self.k = int(k)
        self.tau = float(tau)

    def minimize(self, direction):
        direction = np.asarray(direction, dtype=float)
        _require_finite("direction", direction)
        support = np.argsort(-np.abs(direction), kind="stable")[: self.k]
        signs = np.where(direction[support] >= 0.0, 1.0, -1.0)
        return Atom.from_sparse(self.dim, support, -self.tau * signs)

    def diameter_sq_upper_bound(self):
        return 4.0 * self.tau**2 * self.k

    def contains(self, x, tol=1e-9):
        return (
            np.abs(x).sum() <= self.tau * self.k + tol
            and np.abs(x).max(initial=0.0) <= self.tau + tol
        )


def hungarian_min_assignment(cost):
    """Minimum-cost perfect assignment of an n x n matrix in O(n^3).

    Returns ``col_of_row`` with row i assigned to column col_of_row[i].
    Potentials-based shortest augmenting path; deterministic for a fixed
    input (strict comparisons, lowest index wins ties).
    """
    c = np.asarray(cost, dtype=float)
    n = c.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    row_of_col = np.zeros(n + 1, dtype=np.int64)  # 0 means unassigned
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        row_of_col[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = row_of_col[j0]
            free = ~used
            free[0] = False
            idx = np.nonzero(free)[0]
            cur = c[i0 - 1, idx - 1] - u[i0] - v[idx]
            better = cur < minv[idx]
            sel = idx[better]
            minv[sel] = cur[better]
            way[sel] = j0
            k = int(np.argmin(minv[idx]))
            j1 = int(idx[k])
            delta = minv[j1]
            used_cols = np.nonzero(used)[0]
            u[row_of_col[used_cols]] += delta
            v[used_cols] -= delta
            minv[idx] -= delta
            j0 = j1
            if row_of_col[j0] == 0:
                break
        while j0 != 0:
            j1 = int(way[j0])
            row_of_col[j0] = row_of_col[j1]
            j0 = j1
    col_of_row = np.zeros(n, dtype=np.int64)
    for j in range(1, n + 1):
        col_of_row[row_of_col[j] - 1] = j - 1
    return col_of_row


class BirkhoffLMO(LinearMinimizationOracle):
    """Doubly stochastic matrices, vectorized row-major to length n^2.

    Vertices are permutation matrices; each call solves an assignment
    problem on the (reshaped) direction.
    """

    def __init__(self, n):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = int(n)
        self.dim = self.n * self.n

    def minimize(self, direction):
        direction = np.asarray(direction, dtype=float)
        _require_finite("direction", direction)
        if direction.ndim == 1:
            if direction.shape[0] != self.dim:
                raise NotSquareError("direction length is not n^2")
            cost = direction.reshape(self.n, self.n)
        else:
            if direction.shape != (self.n, self.n):
                raise NotSquareError(f"expected {self.n}x{self.n} direction")
            cost = direction
        cols = hungarian_min_assignment(cost)
        rows = np.arange(self.n, dtype=np.int64)
        return Atom.from_sparse(self.dim, rows * self.n + cols, np.ones(self.n))

    def diameter_sq_upper_bound(self):
        return 2.0 * self.n

    def contains(self, x, tol=1e-9):
        m = np.asarray(x).reshape(self.n, self.n)
        return (
            m.min() >= -tol
            and np.abs(m.sum(axis=0) - 1.0).max() <= tol
            and np.abs(m.sum(axis=1) - 1.0).max() <= tol
        )


class BoxLMO(LinearMinimizationOracle):
    """Axis-aligned box [lower, upper]; vertices pick a corner per coordinate.

    Zero direction coefficients take the lower corner (deterministic tie rule).
    """

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if self.lower.shape != self.upper.shape or np.any(self.lower > self.upper):
            raise ValueError("box bounds must satisfy lower <= upper elementwise")
        self.dim = self.lower.shape[0]

    def minimize(self, direction):
        direction = np.asarray(direction, dtype=float)
        _require_finite("direction", direction)
        return Atom.from_dense(np.where(direction >= 0.0, self.lower, self.upper))

    def diameter_sq_upper_bound(self):
        return float(np.sum((self.upper - self.lower) ** 2))

    def contains(self, x, tol=1e-9):
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))


class L2BallLMO(LinearMinimizationOracle):
    """Euclidean ball; the oracle returns boundary points, not vertices.

    The active set treats these boundary atoms like any other atom.
    """

    def __init__(self, center, radius):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.dim = self.center.shape[0]

    def minimize(self, direction):
        direction = np.asarray(direction, dtype=float)
        _require_finite("direction", direction)
        norm = float(np.linalg.norm(direction))
        if norm <= 1e-14:
            return Atom.from_dense(self.center)
        return Atom.from_dense(self.center - self.radius * direction / norm)

    def diameter_sq_upper_bound(self):
        return 4.0 * self.radius**2

    def contains(self, x, tol=1e-9):
        return float(np.linalg.norm(x - self.center)) <= self.radius + tol


class ProductLMO(LinearMinimizationOracle):
    """Oracle over a finite product of domains, one block per inner oracle."""

    def __init__(self, oracles):
        self.oracles = list(oracles)
        self.dims = [o.dim for o in self.oracles]
        self.dim = sum(self.dims)

    def _split(self, x):
        out = []
        offset = 0
        for d in self.dims:
            out.append(x[offset : offset + d])
            offset += d
        return out

    def minimize(self, direction):
        direction = np.asarray(direction, dtype=float)
        if direction.shape[0] != self.dim:
            raise ValueError(f"direction length {direction.shape[0]} != product dim {self.dim}")
        atoms = [o.minimize(block) for o, block in zip(self.oracles, self._split(direction))]
        return Atom.concat(atoms, self.dims)

    def diameter_sq_upper_bound(self):
        return sum(o.diameter_sq_upper_bound() for o in self.oracles)

    def contains(self, x, tol=1e-9):
        return all(
            o.contains(block, tol) for o, block in zip(self.oracles, self._split(np.asarray(x)))
        )
