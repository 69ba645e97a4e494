"""Dilations ``chi^m -> chi^{cm}`` acting on weight pieces, and their colimits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import lattice as lt
from .cones import Cone
from .forms import (
    FormsError,
    GradedSubspace,
    hochschild_weight_oracle,
    omega_image_weight,
    omega_image_witnesses,
    tilde_omega_weight,
)

DEFAULT_SEQUENCE = (2, 2, 2, 2, 2, 2)


class WeightOutsideDual(FormsError):
    pass


class NotStabilized(FormsError):
    pass


class ScalingLawViolation(FormsError):
    pass


def _check_weight(sigma: Cone, m) -> tuple:
    m = lt.vec(m)
    if not sigma.in_dual(m):
        raise WeightOutsideDual(f"{m} is not in the dual of {sigma}")
    return m


def _check_sequence(seq) -> tuple:
    seq = tuple(int(c) for c in seq)
    if any(c < 2 for c in seq):
        raise ValueError("dilation factors must be at least 2")
    return seq


def theta_pairs(sigma: Cone, m: Sequence[int], p: int, c: int) -> tuple:
    """``(direct, scaled)`` vectors for every spanning form at ``m``.

    ``direct`` is the wedge of the dilated monoid elements ``c*u_i`` and
    ``scaled`` is ``c^p`` times the original wedge.
    """
    n = sigma.ambient_rank
    out = []
    for w in omega_image_witnesses(sigma, m, p):
        us = w[1:]
        direct = lt.wedge([lt.scale(c, u) for u in us], n)
        scaled = lt.scale(c ** p, lt.wedge(us, n))
        out.append((direct, scaled))
    return tuple(out)


def scaling_law_check(sigma: Cone, m: Sequence[int], p: int, c: int) -> bool:
    m = _check_weight(sigma, m)
    return all(a == b for a, b in theta_pairs(sigma, m, p, c))


def theta_image(sigma: Cone, m: Sequence[int], p: int, c: int) -> GradedSubspace:
    """Image of the Kähler piece at ``m`` under the ``c``-th dilation, tagged ``c*m``."""
    if c < 1:
        raise ValueError("dilation factor must be positive")
    m = _check_weight(sigma, m)
    pairs = theta_pairs(sigma, m, p, c)
    if any(a != b for a, b in pairs):
        raise ScalingLawViolation(f"dilation by {c} at {m} breaks the c^p scaling")
    img = GradedSubspace.span(lt.scale(c, m), p, sigma.ambient_rank, [a for a, _ in pairs])
    if not omega_image_weight(sigma, lt.scale(c, m), p).contains(img):
        raise ScalingLawViolation(f"dilated forms at {m} leave the Kähler piece at {c}*m")
    return img


def tilde_theta_iso_check(sigma: Cone, m: Sequence[int], p: int, c: int) -> bool:
    if c < 1:
        raise ValueError("dilation factor must be positive")
    m = lt.vec(m)
    return tilde_omega_weight(sigma, m, p).same_space(tilde_omega_weight(sigma, lt.scale(c, m), p))


@dataclass(frozen=True)
class DilationTrace:
    cone: Cone
    weight: tuple
    degree: int
    sequence: tuple
    chain: tuple
    target: GradedSubspace
    stabilized_at: int | None

    @property
    def dims(self) -> tuple:
        return tuple(S.dim for S in self.chain)

    @property
    def weights(self) -> tuple:
        return tuple(S.weight for S in self.chain)

    @property
    def colimit_dim(self) -> int | None:
        return None if self.stabilized_at is None else self.chain[self.stabilized_at].dim

    def is_increasing(self) -> bool:
        return all(a <= b for a, b in zip(self.chain, self.chain[1:]))


def _weights_along(m: tuple, seq: tuple):
    w = m
    yield w
    for c in seq:
        w = lt.scale(c, w)
        yield w


def colimit_trace(sigma: Cone, m: Sequence[int], p: int, seq: Sequence[int] = DEFAULT_SEQUENCE,
                  strict: bool = True) -> DilationTrace:
    """Kähler pieces along ``m, c1 m, c1 c2 m, ...`` until they settle on the Danilov piece.

    The chain stops at the first index ``i`` where pieces ``i`` and ``i+1``
    coincide with the Danilov piece.  Running out of factors first raises
    :class:`NotStabilized` unless ``strict`` is false, in which case the
    trace is returned with ``stabilized_at=None``.
    """
    m = _check_weight(sigma, m)
    seq = _check_sequence(seq)
    target = tilde_omega_weight(sigma, m, p)
    chain = []
    found = None
    for w in _weights_along(m, seq):
        chain.append(omega_image_weight(sigma, w, p))
        if len(chain) >= 2 and chain[-2].same_space(target) and chain[-1].same_space(target):
            found = len(chain) - 2
            break
    trace = DilationTrace(sigma, m, p, seq, tuple(chain), target, found)
    if found is None and strict:
        raise NotStabilized(f"no stabilization at {m} within {len(seq)} dilations")
    return trace


@dataclass(frozen=True)
class HHColimitReport:
    cone: Cone
    weight: tuple
    degree: int
    weights: tuple
    hh_dims: tuple
    image_dims: tuple
    target_dim: int
    stabilized_at: int | None

    @property
    def excess(self) -> tuple:
        """Hochschild dimension beyond the Kähler image at each step."""
        return tuple(h - i for h, i in zip(self.hh_dims, self.image_dims))

    @property
    def ok(self) -> bool:
        return self.stabilized_at is not None and self.excess[-1] == 0


def hh_colimit_check(sigma: Cone, m: Sequence[int], q: int, seq: Sequence[int] = DEFAULT_SEQUENCE,
                     budget: int = 10**6, strict: bool = True) -> HHColimitReport:
    """Track ``dim HH_q`` along the dilation chain against the Danilov dimension."""
    m = _check_weight(sigma, m)
    seq = _check_sequence(seq)
    target = tilde_omega_weight(sigma, m, q).dim
    weights, hh, img = [], [], []
    found = None
    for w in _weights_along(m, seq):
        weights.append(w)
        hh.append(hochschild_weight_oracle(sigma, w, q, budget)[q])
        img.append(omega_image_weight(sigma, w, q).dim)
        if len(hh) >= 2 and hh[-2] == hh[-1] == target:
            found = len(hh) - 2
            break
    rep = HHColimitReport(sigma, m, q, tuple(weights), tuple(hh), tuple(img), target, found)
    if found is None and strict:
        raise NotStabilized(f"HH_{q} at {m} did not settle within {len(seq)} dilations")
    return rep
