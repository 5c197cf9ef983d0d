"""Point interactions at graph vertices and their scattering matrices.

Every vertex of a metric graph acts as a zero-range scatterer.  Its effect
on plane waves of wavenumber ``k`` is summarised by an ``N x N`` matrix
``S(k)`` whose diagonal holds reflection amplitudes and whose entry
``S[s, r]`` is the amplitude to go from channel ``r`` into channel ``s``.

All closed forms are written for ``hbar = mu = 1`` and continue analytically
to complex ``k`` (bound states live on the positive imaginary axis).
Evaluation is vectorised: ``k`` may be a scalar or any numpy array, and the
result has shape ``k.shape + (N, N)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateK, InvalidABCD, VariantDegreeMismatch

_DEN_TOL = 1e-13


def _as_k(k):
    return np.asarray(k, dtype=complex)


def _check_den(den, k):
    bad = np.abs(den) <= _DEN_TOL * (1.0 + np.abs(k))
    if np.any(bad):
        kk = np.broadcast_to(k, np.shape(bad))[bad].ravel()[0]
        raise DegenerateK(f"closed-form amplitude has a pole at k={complex(kk)!r}")


def _fill(r, t, n):
    """Matrix with ``r`` on the diagonal and ``t`` elsewhere, batched over k."""
    r = np.asarray(r)
    t = np.asarray(t)
    out = np.empty(r.shape + (n, n), dtype=complex)
    out[...] = t[..., None, None]
    idx = np.arange(n)
    out[..., idx, idx] = r[..., None]
    return out


class PointInteraction:
    """Base class for vertex scattering models."""

    #: whether the model satisfies S S^dagger = 1 on the real axis
    flux_conserving = True
    #: whether the matching oracle knows an equivalent boundary condition
    has_boundary_condition = True

    def check_degree(self, n: int) -> None:
        if n < 1:
            raise VariantDegreeMismatch(f"{type(self).__name__} needs at least one channel")

    def smatrix(self, k, n: int) -> np.ndarray:
        raise NotImplementedError

    def descriptor(self) -> dict:
        """JSON-serialisable description, inverse of :func:`interaction_from_descriptor`."""
        raise NotImplementedError


@dataclass(frozen=True)
class GeneralizedDelta(PointInteraction):
    """Generalised delta interaction of strength ``gamma``.

    Continuity of the wavefunction plus ``sum of outgoing derivatives =
    2 * gamma * psi(V)``.  For ``N`` channels

        r = (2 gamma - (N - 2) i k) / (N i k - 2 gamma)
        t = 2 i k / (N i k - 2 gamma)

    and ``1 + r = t`` holds identically.
    """

    gamma: float

    def amplitudes(self, k, n: int):
        k = _as_k(k)
        den = n * 1j * k - 2.0 * self.gamma
        _check_den(den, k)
        r = (2.0 * self.gamma - (n - 2) * 1j * k) / den
        t = 2j * k / den
        return r, t

    def smatrix(self, k, n):
        self.check_degree(n)
        r, t = self.amplitudes(k, n)
        return _fill(r, t, n)

    def descriptor(self):
        return {"type": "delta", "gamma": float(self.gamma)}


@dataclass(frozen=True)
class NeumannKirchhoff(PointInteraction):
    """Free (Kirchhoff) coupling: ``r = 2/N - 1``, ``t = 2/N`` for every k."""

    def amplitudes(self, k, n: int):
        k = _as_k(k)
        r = np.full(k.shape, 2.0 / n - 1.0, dtype=complex)
        t = np.full(k.shape, 2.0 / n, dtype=complex)
        return r, t

    def smatrix(self, k, n):
        self.check_degree(n)
        r, t = self.amplitudes(k, n)
        return _fill(r, t, n)

    def descriptor(self):
        return {"type": "neumann_kirchhoff"}


@dataclass(frozen=True)
class Dirichlet(PointInteraction):
    """Hard wall on every channel: ``S = -1`` (no transmission)."""

    def amplitudes(self, k, n: int):
        k = _as_k(k)
        return -np.ones(k.shape, dtype=complex), np.zeros(k.shape, dtype=complex)

    def smatrix(self, k, n):
        self.check_degree(n)
        r, t = self.amplitudes(k, n)
        return _fill(r, t, n)

    def descriptor(self):
        return {"type": "dirichlet"}


@dataclass(frozen=True)
class DeadEnd(PointInteraction):
    """Degree-one vertex with Robin condition ``psi'_out = lam * psi``.

    ``r = (i k + lam) / (i k - lam)``; ``lam = 0`` is a Neumann wall.
    """

    lam: float

    def check_degree(self, n):
        if n != 1:
            raise VariantDegreeMismatch(f"dead end needs degree 1, got {n}")

    def reflection(self, k):
        k = _as_k(k)
        den = 1j * k - self.lam
        _check_den(den, k)
        return (1j * k + self.lam) / den

    def smatrix(self, k, n):
        self.check_degree(n)
        r = self.reflection(k)
        return r[..., None, None]

    def descriptor(self):
        return {"type": "dead_end", "lambda": float(self.lam)}


@dataclass(frozen=True)
class LineABCD(PointInteraction):
    """Most general flux-conserving point interaction between two channels.

    The boundary condition is ``Phi(0+) = omega [[a, b], [c, d]] Phi(0-)`` with
    ``Phi = (psi, psi')``, real ``a, b, c, d``, ``ad - bc = 1`` and ``|omega| = 1``.
    Channel 0 is the ``0-`` side and channel 1 the ``0+`` side, so
    ``S = [[R+, T-], [T+, R-]]``: the ``+`` amplitudes describe propagation
    from the lower-indexed channel to the higher one.
    """

    a: float
    b: float
    c: float
    d: float
    omega: complex = 1.0

    def __post_init__(self):
        if abs(self.a * self.d - self.b * self.c - 1.0) > 1e-10:
            raise InvalidABCD(f"ad - bc = {self.a * self.d - self.b * self.c!r}, expected 1")
        if abs(abs(self.omega) - 1.0) > 1e-12:
            raise InvalidABCD(f"|omega| = {abs(self.omega)!r}, expected 1")

    def check_degree(self, n):
        if n != 2:
            raise VariantDegreeMismatch(f"ABCD interaction needs degree 2, got {n}")

    def smatrix(self, k, n):
        self.check_degree(n)
        rp, rm, tp, tm = abcd_amplitudes(self.a, self.b, self.c, self.d, self.omega, k)
        out = np.empty(np.shape(rp) + (2, 2), dtype=complex)
        out[..., 0, 0] = rp
        out[..., 1, 0] = tp
        out[..., 0, 1] = tm
        out[..., 1, 1] = rm
        return out

    def mirrored(self) -> "LineABCD":
        """The same interaction seen with the two sides exchanged."""
        return LineABCD(self.d, self.b, self.c, self.a, complex(self.omega).conjugate())

    def descriptor(self):
        return {"type": "abcd", "a": self.a, "b": self.b, "c": self.c, "d": self.d,
                "omega_phase": float(cmath.phase(self.omega))}


@dataclass(frozen=True)
class CustomMatrix(PointInteraction):
    """User supplied ``k -> S(k)`` provider.

    Parameters
    ----------
    provider : callable
        Maps a scalar complex ``k`` to an ``N x N`` complex matrix.
    flux_conserving : bool
        Declared property; pole-based spectral analysis refuses graphs that
        contain a non-conserving custom vertex.
    """

    provider: Callable[[complex], np.ndarray]
    flux_conserving: bool = True
    has_boundary_condition = False

    def smatrix(self, k, n):
        self.check_degree(n)
        k = _as_k(k)
        flat = k.ravel()
        out = np.empty((flat.size, n, n), dtype=complex)
        for i, kk in enumerate(flat):
            m = np.asarray(self.provider(complex(kk)), dtype=complex)
            if m.shape != (n, n):
                raise VariantDegreeMismatch(f"custom matrix has shape {m.shape}, vertex degree is {n}")
            out[i] = m
        return out.reshape(k.shape + (n, n))

    def descriptor(self):
        raise TypeError("custom matrices cannot be serialised")


# ---------------------------------------------------------------------------

def scattering_matrix(pi: PointInteraction, n: int, k) -> np.ndarray:
    """Vertex scattering matrix of ``pi`` with ``n`` channels at wavenumber ``k``.

    Returns an array of shape ``np.shape(k) + (n, n)``.

    Raises
    ------
    DegenerateK
        ``k`` is a pole of the closed form (for instance ``N i k = 2 gamma``).
    VariantDegreeMismatch
        The interaction cannot be placed on a vertex of degree ``n``.
    """
    return pi.smatrix(k, n)


def abcd_amplitudes(a, b, c, d, omega, k):
    """Reflection and transmission amplitudes of a general line point interaction.

    Returns
    -------
    R_plus, R_minus, T_plus, T_minus : complex or ndarray
        ``+`` for incidence from the ``0-`` side.
    """
    if abs(a * d - b * c - 1.0) > 1e-10:
        raise InvalidABCD(f"ad - bc = {a * d - b * c!r}, expected 1")
    if abs(abs(omega) - 1.0) > 1e-12:
        raise InvalidABCD(f"|omega| = {abs(omega)!r}, expected 1")
    k = _as_k(k)
    den = -c + 1j * k * (d + a) + b * k ** 2
    _check_den(den, k)
    r_plus = (c + 1j * k * (d - a) + b * k ** 2) / den
    r_minus = (c - 1j * k * (d - a) + b * k ** 2) / den
    t_plus = 2j * k * omega / den
    t_minus = 2j * k / omega / den
    if r_plus.ndim == 0:
        return complex(r_plus), complex(r_minus), complex(t_plus), complex(t_minus)
    return r_plus, r_minus, t_plus, t_minus


@dataclass
class FluxReport:
    """Maximum violations of the two self-adjointness constraints over a k grid."""

    unitarity: float
    inversion: float
    tolerance: float = 1e-12
    worst_k: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.unitarity <= self.tolerance and self.inversion <= self.tolerance


def verify_flux_conservation(pi: PointInteraction, n: int, ks, tolerance: float = 1e-12) -> FluxReport:
    """Measure ``max ||S S^+ - 1||`` and ``max ||S(k) - S^+(-k)||`` on real ``ks``."""
    ks = np.asarray(ks, dtype=float)
    s = pi.smatrix(ks, n)
    s_neg = pi.smatrix(-ks, n)
    eye = np.eye(n)
    unit = np.linalg.norm(s @ np.conj(np.swapaxes(s, -1, -2)) - eye, ord=2, axis=(-2, -1))
    inv = np.linalg.norm(s - np.conj(np.swapaxes(s_neg, -1, -2)), ord=2, axis=(-2, -1))
    return FluxReport(
        unitarity=float(unit.max(initial=0.0)),
        inversion=float(inv.max(initial=0.0)),
        tolerance=tolerance,
        worst_k={"unitarity": float(ks[np.argmax(unit)]) if ks.size else math.nan,
                 "inversion": float(ks[np.argmax(inv)]) if ks.size else math.nan},
    )


def interaction_from_descriptor(desc) -> PointInteraction:
    """Build an interaction from its JSON descriptor (see module docs)."""
    if isinstance(desc, PointInteraction):
        return desc
    try:
        kind = desc["type"]
    except (TypeError, KeyError):
        raise ValueError(f"interaction descriptor needs a 'type': {desc!r}") from None
    if kind == "delta":
        return GeneralizedDelta(float(desc.get("gamma", 0.0)))
    if kind == "neumann_kirchhoff":
        return NeumannKirchhoff()
    if kind == "dirichlet":
        return Dirichlet()
    if kind == "dead_end":
        return DeadEnd(float(desc.get("lambda", 0.0)))
    if kind == "abcd":
        phase = float(desc.get("omega_phase", 0.0))
        return LineABCD(float(desc["a"]), float(desc["b"]), float(desc["c"]), float(desc["d"]),
                        cmath.exp(1j * phase))
    raise ValueError(f"unknown interaction type {kind!r}")
