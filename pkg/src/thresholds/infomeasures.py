"""Entropy functionals on distributions over finite alphabets.

Everything is computed with natural logs internally and converted to the
requested base at the boundary; probability-zero mass contributes nothing
(the 0 * log(1/0) = 0 convention is applied by filtering, not by nan-patching).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, MissingAxisError

# ---------------------------------------------------------------------------
# closed-form alphabet entropies


def _check_base_q(q: int) -> None:
    if q < 2:
        raise DomainError(f"alphabet size must be >= 2, got {q}")


def hq(q: int, rho: float) -> float:
    """Entropy of the radius-rho sphere-uniform distribution, in base-q units.

    hq(q, rho) = rho * log_q((q-1)/rho) + (1-rho) * log_q(1/(1-rho)),
    with the endpoint conventions hq(q, 0) = 0 and hq(q, 1) = log_q(q-1).
    """
    _check_base_q(q)
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    lq = math.log(q)
    out = 0.0
    if rho > 0.0:
        out += rho * math.log((q - 1) / rho)
    if rho < 1.0:
        out += (1.0 - rho) * math.log(1.0 / (1.0 - rho))
    return out / lq


def hql(q: int, ell: int, rho: float) -> float:
    """Generalization of hq with an ell-element "inside" set.

    hql(q, ell, rho) = rho * log_q((q-ell)/rho) + (1-rho) * log_q(ell/(1-rho));
    hql(q, 1, rho) == hq(q, rho) and hql(q, ell, 0) == log_q(ell).
    """
    _check_base_q(q)
    if not 1 <= ell < q:
        raise DomainError(f"need 1 <= ell < q, got ell={ell}, q={q}")
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    lq = math.log(q)
    out = 0.0
    if rho > 0.0:
        out += rho * math.log((q - ell) / rho)
    if rho < 1.0:
        out += (1.0 - rho) * math.log(ell / (1.0 - rho))
    return out / lq


def hq_multi(q: int, xs) -> float:
    """Entropy, in base q, of the distribution (x_1, ..., x_t, 1 - sum x_i).

    The xs are the masses of t distinguished outcomes; the remainder goes to a
    single residual outcome.  Accepts any t >= 1.
    """
    _check_base_q(q)
    xs = [float(x) for x in xs]
    if any(x < -1e-15 for x in xs):
        raise DomainError(f"negative mass in {xs}")
    xs = [max(x, 0.0) for x in xs]
    s = sum(xs)
    if s > 1.0 + 1e-12:
        raise DomainError(f"masses sum to {s} > 1")
    rest = max(1.0 - s, 0.0)
    out = 0.0
    for x in xs + [rest]:
        if x > 0.0:
            out -= x * math.log(x)
    return out / math.log(q)


# ---------------------------------------------------------------------------
# validated distribution containers


@dataclass
class ProbVector:
    """A probability vector with an explicit validation tolerance."""

    masses: np.ndarray
    tol: float = 1e-12

    def __post_init__(self):
        self.masses = np.asarray(self.masses, dtype=np.float64)
        if self.masses.ndim != 1:
            raise DomainError("ProbVector needs a one-dimensional mass array")
        if np.any(self.masses < -self.tol):
            raise DomainError("negative probability mass")
        self.masses = np.clip(self.masses, 0.0, None)
        total = float(self.masses.sum())
        if abs(total - 1.0) > self.tol:
            raise DomainError(f"masses sum to {total}, outside 1 +- {self.tol}")

    def __len__(self):
        return len(self.masses)


def _entropy_nats(masses: np.ndarray) -> float:
    m = np.asarray(masses, dtype=np.float64).ravel()
    m = m[m > 0.0]
    if m.size == 0:
        return 0.0
    return float(-(m * np.log(m)).sum())


def dist_entropy(p, base: float | None = None) -> float:
    """Shannon entropy of a ProbVector or raw mass array; nats unless base given."""
    masses = p.masses if isinstance(p, ProbVector) else np.asarray(p, dtype=np.float64)
    h = _entropy_nats(masses)
    if base is None:
        return h
    if base <= 1:
        raise DomainError(f"log base must exceed 1, got {base}")
    return h / math.log(base)


@dataclass
class JointTable:
    """Joint distribution over two or three named axes ('x', 'y'[, 'z'])."""

    masses: np.ndarray
    tol: float = 1e-12
    axes: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        self.masses = np.asarray(self.masses, dtype=np.float64)
        if self.masses.ndim not in (2, 3):
            raise DomainError("JointTable needs a 2- or 3-axis mass array")
        if np.any(self.masses < -self.tol):
            raise DomainError("negative probability mass")
        self.masses = np.clip(self.masses, 0.0, None)
        total = float(self.masses.sum())
        if abs(total - 1.0) > self.tol:
            raise DomainError(f"masses sum to {total}, outside 1 +- {self.tol}")
        self.axes = ("x", "y", "z")[: self.masses.ndim]

    def marginal(self, *keep: str) -> np.ndarray:
        for a in keep:
            if a not in self.axes:
                raise MissingAxisError(f"axis {a!r} not present in {self.axes}")
        drop = tuple(i for i, a in enumerate(self.axes) if a not in keep)
        return self.masses.sum(axis=drop) if drop else self.masses


def joint_measures(jt: JointTable, base: float | None = None) -> dict[str, float]:
    """Entropies, conditionals, and mutual informations of a joint table.

    Returns H(x), H(y), H(x,y), H(x|y), H(y|x), I(x;y); with a third axis also
    H(z), H(x,y,z), H(x|y,z), I(x;y|z).  Conditional quantities are computed by
    entropy differences, so the chain rule holds exactly up to float rounding.
    """
    conv = 1.0 if base is None else math.log(base)
    if base is not None and base <= 1:
        raise DomainError(f"log base must exceed 1, got {base}")

    def ent(arr):
        return _entropy_nats(arr) / conv

    out = {
        "H_x": ent(jt.marginal("x")),
        "H_y": ent(jt.marginal("y")),
        "H_xy": ent(jt.marginal("x", "y")),
    }
    out["H_x_given_y"] = out["H_xy"] - out["H_y"]
    out["H_y_given_x"] = out["H_xy"] - out["H_x"]
    out["I_xy"] = out["H_x"] + out["H_y"] - out["H_xy"]
    if len(jt.axes) == 3:
        out["H_z"] = ent(jt.marginal("z"))
        out["H_xyz"] = ent(jt.masses)
        out["H_xz"] = ent(jt.marginal("x", "z"))
        out["H_yz"] = ent(jt.marginal("y", "z"))
        out["H_x_given_yz"] = out["H_xyz"] - out["H_yz"]
        out["I_xy_given_z"] = out["H_xz"] + out["H_yz"] - out["H_z"] - out["H_xyz"]
    return out


def conditional_mi(jt: JointTable, base: float | None = None) -> float:
    """I(x;y|z); raises MissingAxisError on a two-axis table."""
    if len(jt.axes) != 3:
        raise MissingAxisError("conditional mutual information needs a z axis")
    return joint_measures(jt, base)["I_xy_given_z"]


def fano_bound(p_err: float, M: int, base: float = 2.0) -> float:
    """Upper bound h(p_err) + p_err * log(M-1) on a conditional entropy, given
    error probability p_err against M candidate values."""
    if not 0.0 <= p_err <= 1.0:
        raise DomainError(f"p_err must lie in [0, 1], got {p_err}")
    if M < 2:
        raise DomainError(f"need at least 2 candidate values, got M={M}")
    if base <= 1:
        raise DomainError(f"log base must exceed 1, got {base}")
    lb = math.log(base)
    out = 0.0
    if 0.0 < p_err < 1.0:
        out -= p_err * math.log(p_err) + (1 - p_err) * math.log(1 - p_err)
    out += p_err * math.log(M - 1)
    return out / lb


def ball_volume(q: int, n: int, r: int) -> int:
    """Exact number of length-n q-ary words within Hamming distance r of a point."""
    _check_base_q(q)
    if n < 0 or r < 0:
        raise DomainError("n and r must be nonnegative")
    r = min(r, n)
    return sum(math.comb(n, i) * (q - 1) ** i for i in range(r + 1))
