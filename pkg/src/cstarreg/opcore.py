"""Dense complex linear algebra: adjoints, norms, eigendecompositions,
canonical polar decompositions, functional calculus, spectral projections
and cut-downs.

Matrices are plain complex numpy arrays (row-major, finite entries).
Everything here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadOrdering, EigenvalueTooCloseToCut, MissingGapCertificate, NotHermitian

# Tolerances (relative, see module notes):
#   TAU_RANK   decides which singular values count as zero in polar parts
#   TAU_HERM   hermiticity acceptance for inputs built from products a*a
#   ETA_SEP    guard band separating spectral-projection cuts from eigenvalues
TAU_RANK = 1e-9
TAU_HERM = 1e-8
ETA_SEP_BASE = 1e-8


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got ndim={a.ndim}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError("matrix entries must be finite")
    return a


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def op_norm(a) -> float:
    a = as_matrix(a)
    if a.size == 0 or not a.any():
        return 0.0
    return float(np.linalg.norm(a, 2))


def eta_sep(h) -> float:
    return ETA_SEP_BASE * (1.0 + op_norm(h))


@dataclass(frozen=True)
class SpectralData:
    """Ascending eigenvalues with an orthonormal eigenvector frame."""

    values: np.ndarray  # real, ascending
    frame: np.ndarray  # unitary, columns are eigenvectors

    def reconstruct(self) -> np.ndarray:
        return (self.frame * self.values) @ self.frame.conj().T


@dataclass(frozen=True)
class PolarParts:
    """Canonical polar decomposition a = v |a| with support projections."""

    v: np.ndarray  # partial isometry, vanishes on ker |a|
    abs_a: np.ndarray  # positive square root of a* a
    supp_right: np.ndarray  # v* v, support projection of |a|
    supp_left: np.ndarray  # v v*, support projection of |a*|


@dataclass(frozen=True)
class ScalarFunction:
    """A continuous real->real map used in functional calculus, given as a
    tagged description so reports stay serializable."""

    tag: str
    params: tuple = ()

    @property
    def needs_gap(self) -> bool:
        return self.tag == "pseudoinverse-g"

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.tag == "identity":
            return t
        if self.tag == "pseudoinverse-g":
            # 0 at 0, 1/t for t > 0; only valid on a gapped spectrum.
            zero_level = self.params[0] if self.params else 0.0
            out = np.zeros_like(t)
            pos = t > zero_level
            out[pos] = 1.0 / t[pos]
            return out
        if self.tag == "proof-f":
            (gamma,) = self.params
            return np.where(t <= gamma, 1.0 / gamma, 1.0 / np.maximum(t, gamma))
        if self.tag == "proof-g":
            (gamma,) = self.params
            return np.where(t <= gamma, t / gamma**2, 1.0 / np.maximum(t, gamma))
        if self.tag == "ramp-cutdown":
            (delta,) = self.params
            return np.maximum(t - delta, 0.0)
        if self.tag == "bump-h1":
            gamma, mu1 = self.params
            return np.clip((mu1 - t) / (mu1 - gamma), 0.0, 1.0)
        if self.tag == "bump-h2":
            mu1, delta = self.params
            return np.clip((delta - t) / (delta - mu1), 0.0, 1.0)
        if self.tag == "piecewise-linear":
            (knots,) = self.params
            xs = np.array([k[0] for k in knots])
            ys = np.array([k[1] for k in knots])
            return np.interp(t, xs, ys)
        if self.tag == "product":
            f, g = self.params
            return f(t) * g(t)
        raise ValueError(f"unknown scalar function tag {self.tag!r}")


def identity_fn() -> ScalarFunction:
    return ScalarFunction("identity")


def pseudoinverse_g(zero_level: float = 0.0) -> ScalarFunction:
    return ScalarFunction("pseudoinverse-g", (zero_level,))


def proof_f(gamma: float) -> ScalarFunction:
    return ScalarFunction("proof-f", (gamma,))


def proof_g(gamma: float) -> ScalarFunction:
    return ScalarFunction("proof-g", (gamma,))


def ramp_cutdown(delta: float) -> ScalarFunction:
    return ScalarFunction("ramp-cutdown", (delta,))


def piecewise_linear(knots) -> ScalarFunction:
    return ScalarFunction("piecewise-linear", (tuple(tuple(k) for k in knots),))


def fn_product(f: ScalarFunction, g: ScalarFunction) -> ScalarFunction:
    return ScalarFunction("product", (f, g))


def check_hermitian(h, tau: float = TAU_HERM) -> np.ndarray:
    h = as_matrix(h)
    scale = 1.0 + op_norm(h)
    dev = op_norm(h - h.conj().T)
    if dev > tau * scale:
        raise NotHermitian(f"||h - h*|| = {dev:.3g} exceeds {tau:.1g}*(1+||h||)")
    return 0.5 * (h + h.conj().T)


def hermitian_eig(h) -> SpectralData:
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues.

    LAPACK's divide-and-conquer path is deterministic for identical input
    bytes, which is what report reproducibility needs.
    """
    h = check_hermitian(h)
    values, frame = np.linalg.eigh(h)
    return SpectralData(values=values, frame=frame)


def abs_of(a) -> np.ndarray:
    """|a| = (a* a)^(1/2), a positive semidefinite square matrix of size cols."""
    a = as_matrix(a)
    sd = hermitian_eig(a.conj().T @ a)
    roots = np.sqrt(np.maximum(sd.values, 0.0))
    return (sd.frame * roots) @ sd.frame.conj().T


def svd(a):
    a = as_matrix(a)
    u, s, vh = np.linalg.svd(a)
    return u, s, vh


def polar(a, rank_tol: float = TAU_RANK) -> PolarParts:
    """Canonical polar decomposition a = v |a|.

    v is the partial isometry summing u_i w_i* over singular triples whose
    singular value exceeds rank_tol * ||a||, so v vanishes on ker |a| and
    v*v, vv* are the support projections of |a| and |a*|.
    """
    a = as_matrix(a)
    m, n = a.shape
    u, s, vh = svd(a)
    k = len(s)
    cut = rank_tol * (s[0] if k else 0.0)
    keep = s > cut
    ur = u[:, :k][:, keep]
    wr = vh[:k, :][keep].conj().T
    v = ur @ wr.conj().T
    s_full = np.zeros(n)
    s_full[:k] = s
    abs_a = (vh.conj().T * s_full) @ vh
    supp_right = wr @ wr.conj().T
    supp_left = ur @ ur.conj().T
    return PolarParts(v=v, abs_a=abs_a, supp_right=supp_right, supp_left=supp_left)


def apply_function(h, fn: ScalarFunction, gap=None) -> np.ndarray:
    """Functional calculus: frame * diag(fn(values)) * frame^*.

    The discontinuous pseudoinverse function requires a spectral gap
    certificate (see regularity.GapCertificate) and is applied with the
    certificate's zero threshold.
    """
    if fn.needs_gap:
        if gap is None:
            raise MissingGapCertificate(
                "pseudoinverse-g needs a spectral gap certificate"
            )
        sd = hermitian_eig(h)
        zero_level = float(np.sqrt(max(gap.zero_tol, 0.0)))
        vals = pseudoinverse_g(zero_level)(sd.values)
        return (sd.frame * vals) @ sd.frame.conj().T
    sd = hermitian_eig(h)
    return (sd.frame * fn(sd.values)) @ sd.frame.conj().T


def spectral_projection(h, delta: float, eta: float | None = None) -> np.ndarray:
    """Spectral projection of a Hermitian PSD matrix onto (delta, inf).

    Raises EigenvalueTooCloseToCut when an eigenvalue sits within the guard
    band around delta; sweeping callers perturb delta by 2*eta and retry.
    """
    sd = hermitian_eig(h)
    if eta is None:
        eta = eta_sep(h)
    close = np.abs(sd.values - delta) <= eta
    if np.any(close):
        bad = float(sd.values[close][0])
        raise EigenvalueTooCloseToCut(delta, bad, eta)
    keep = sd.values > delta
    cols = sd.frame[:, keep]
    return cols @ cols.conj().T


def cutdown(a, delta: float) -> np.ndarray:
    """delta-cut-down v (|a| - delta)_+ using the canonical polar part."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    a = as_matrix(a)
    u, s, vh = svd(a)
    k = len(s)
    shaved = np.maximum(s - delta, 0.0)
    return (u[:, :k] * shaved) @ vh[:k, :]


def make_h_pair(gamma: float, mu1: float, delta: float):
    """Decreasing piecewise-linear bump pair: h1 = 1 on [0, gamma], 0 from mu1;
    h2 = 1 on [0, mu1], 0 from delta. Supports nest so h1 h2 = h1."""
    if not (0.0 < gamma < mu1 < delta):
        raise BadOrdering(f"need 0 < gamma < mu1 < delta, got {gamma}, {mu1}, {delta}")
    h1 = ScalarFunction("bump-h1", (gamma, mu1))
    h2 = ScalarFunction("bump-h2", (mu1, delta))
    return h1, h2
