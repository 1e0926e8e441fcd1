"""Convex-combination representation of the iterate with cached quadratic products.

The iterate is recomputed from the weights after every update rather than
patched incrementally; this costs O(|S| n) per operation but keeps the
representation drift-free, which matters once corrections start operating at
the level of numerical precision.
"""

import numpy as np

from .errors import EmptyActiveSetError, WeightValidationError

WEIGHT_PRUNE_THRESHOLD = 1e-14


class ActiveSet:
    """Atoms, their convex weights, and the represented iterate.

    A dense (|S| x dim) copy of the atoms is kept for vectorized inner
    products.  For quadratic objectives the Gram products <v_i, A v_j> and
    <b, v_i> are cached and maintained across adds and drops; the cache is
    rebuilt whenever a different objective object is attached.
    """

    def __init__(self, atoms, weights, quad=None, gram=None, lin=None):
        self.atoms = list(atoms)
        self.weights = np.asarray(weights, dtype=float)
        self.dense = np.vstack([a.to_dense() for a in self.atoms])
        self._quad = quad
        self.gram = gram
        self.lin = lin
        self.iterate = self.weights @ self.dense

    @classmethod
    def from_atom(cls, atom):
        return cls([atom], np.array([1.0]))

    def __len__(self):
        return len(self.atoms)

    @property
    def dim(self):
        return self.dense.shape[1]

    def copy(self):
        out = ActiveSet.__new__(ActiveSet)
        out.atoms = list(self.atoms)
        out.weights = self.weights.copy()
        out.dense = self.dense.copy()
        out._quad = self._quad
        out.gram = None if self.gram is None else self.gram.copy()
        out.lin = None if self.lin is None else self.lin.copy()
        out.iterate = self.iterate.copy()
        return out

    def index_of(self, atom):
        for i, a in enumerate(self.atoms):
            if a.key == atom.key:
                return i
        return None

    def extreme_atoms(self, gradient):
        """Indices of the away atom (max <g, v>) and local FW atom (min <g, v>).

        Only positive-weight atoms qualify as the away atom; after pruning
        every stored atom has positive weight, so the scan covers all of them.
        Lowest index wins ties.
        """
        if not self.atoms:
            raise EmptyActiveSetError("active set is empty")
        scores = self.dense @ gradient
        return int(np.argmax(scores)), int(np.argmin(scores))

    def _recompute(self):
        self.iterate = self.weights @ self.dense

    def _set_weights(self, weights):
        keep = weights > WEIGHT_PRUNE_THRESHOLD
        if not np.any(keep):
            raise WeightValidationError("all weights would be pruned")
        if not np.all(keep):
            self.atoms = [a for a, k in zip(self.atoms, keep) if k]
            self.dense = self.dense[keep]
            weights = weights[keep]
            if self.gram is not None:
                self.gram = self.gram[np.ix_(keep, keep)]
                self.lin = self.lin[keep]
        self.weights = weights / weights.sum()
        self._recompute()

    def apply_weights(self, new_weights):
        """Replace the weight vector, prune tiny entries, rebuild the iterate."""
        w = np.asarray(new_weights, dtype=float)
        if w.shape[0] != len(self.atoms):
            raise WeightValidationError(
                f"weight length {w.shape[0]} != active set size {len(self.atoms)}"
            )
        if abs(w.sum() - 1.0) > 1e-8:
            raise WeightValidationError(f"weights sum to {w.sum()!r}, expected 1")
        if w.min() < -1e-10:
            raise WeightValidationError(f"negative weight {w.min()!r}")
        self._set_weights(np.clip(w, 0.0, 1.0))

    def _append_atom(self, atom, weight):
        self.atoms.append(atom)
        self.dense = np.vstack([self.dense, atom.to_dense()[None, :]])
        self.weights = np.append(self.weights, weight)
        if self.gram is not None:
            applied = self._quad.apply_quad(self.dense[-1])
            col = self.dense @ applied
            m = len(self.atoms)
            gram = np.empty((m, m))
            gram[:-1, :-1] = self.gram
            gram[-1, :] = col
            gram[:, -1] = col
            self.gram = gram
            self.lin = np.append(self.lin, float(self._quad.linear @ self.dense[-1]))

    def add_atom_fw(self, atom, gamma):
        """Frank-Wolfe update x <- (1-gamma) x + gamma v, merging duplicates.

        Returns True when the atom was not previously in the set and received
        positive weight.
        """
        if not 0.0 <= gamma <= 1.0:
            raise WeightValidationError(f"gamma {gamma!r} outside [0, 1]")
        idx = self.index_of(atom)
        weights = self.weights * (1.0 - gamma)
        if idx is None:
            self._append_atom(atom, gamma)
            weights = np.append(weights, gamma)
            added = gamma > WEIGHT_PRUNE_THRESHOLD
        else:
            weights[idx] += gamma
            added = False
        self._set_weights(weights)
        return added

    def append_zero(self, atom):
        """Append an atom with zero weight (weight mass must follow at once)."""
        self._append_atom(atom, 0.0)
        return len(self.atoms) - 1

    def ensure_gram(self, quad):
        """Populate the <v_i, A v_j> / <b, v_i> cache for the given quadratic."""
        if self.gram is not None and self._quad is quad:
            return
        applied = np.vstack([quad.apply_quad(row) for row in self.dense])
        self.gram = self.dense @ applied.T
        self.lin = self.dense @ quad.linear
        self._quad = quad

    def invalidate_gram(self):
        self.gram = None
        self.lin = None
        self._quad = None

    def reconstruction_error(self):
        return float(np.abs(self.iterate - self.weights @ self.dense).max())
