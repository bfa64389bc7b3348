"""Jones calculus over the (H, V) basis.

Vectors are length-2 complex arrays, operators are 2x2 complex arrays, with
index 0 = horizontal and index 1 = vertical.  A retarder with retardance
``delta`` (half the total phase split between fast and slow axis) and fast
axis at ``alpha`` from horizontal is

    retarder(delta, alpha) = rotator(alpha) @ diag(e^{i delta}, e^{-i delta}) @ rotator(-alpha)

so ``delta = pi/2`` is a half-wave plate.  The Faraday mirror is the fixed
matrix [[0, -1], [-1, 0]]; combined with the transposition convention of
``backward`` it cancels any unitary acquired on the forward pass.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import PreconditionError

# Construction-level checks use ATOL_CONSTRUCT; identities built from several
# matrix products are held to the looser ATOL_COMPOSED.
ATOL_CONSTRUCT = 1e-12
ATOL_COMPOSED = 1e-10

_SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
_FARADAY = np.array([[0.0, -1.0], [-1.0, 0.0]], dtype=complex)


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite angle {v!r}")


def jones_vector(h: complex, v: complex, normalized: bool = True) -> np.ndarray:
    """Column vector (h, v); by default scaled to unit norm."""
    vec = np.array([h, v], dtype=complex)
    if not np.all(np.isfinite(vec.view(float))):
        raise ValueError("non-finite Jones vector component")
    if normalized:
        n = np.linalg.norm(vec)
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        vec = vec / n
    return vec


def analyzer_vector(theta: float) -> np.ndarray:
    """Unit vector transmitted by a linear analyzer at angle theta from H."""
    _check_finite(theta)
    return np.array([math.cos(theta), math.sin(theta)], dtype=complex)


def rotator(theta: float) -> np.ndarray:
    """Rotation of the polarization plane by theta."""
    _check_finite(theta)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class RetarderSpec:
    """Retardance and fast-axis angle, canonicalized to [0, pi) x [0, pi).

    Shifting either angle by pi changes the Jones matrix by at most a global
    sign, so the canonical ranges lose nothing physical.
    """

    delta: float
    alpha: float

    def __post_init__(self) -> None:
        _check_finite(self.delta, self.alpha)
        object.__setattr__(self, "delta", self.delta % math.pi)
        object.__setattr__(self, "alpha", self.alpha % math.pi)

    def matrix(self) -> np.ndarray:
        return retarder(self.delta, self.alpha)


def retarder(delta: float, alpha: float) -> np.ndarray:
    """Jones matrix of a retarder: phases e^{+-i delta} on axes at alpha."""
    _check_finite(delta, alpha)
    phase = np.diag([np.exp(1j * delta), np.exp(-1j * delta)])
    return rotator(alpha) @ phase @ rotator(-alpha)


def faraday_mirror() -> np.ndarray:
    """Mirror plus 45-degree Faraday rotation seen by the returning photon."""
    return _FARADAY.copy()


def backward(u: np.ndarray) -> np.ndarray:
    """Operator for traversing the element described by ``u`` in reverse.

    Reciprocal propagation reverses the element order and flips the
    handedness of the transverse frame, giving sigma_z @ u.T @ sigma_z.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got shape {u.shape}")
    if not np.all(np.isfinite(u.view(float))):
        raise ValueError("non-finite operator entry")
    return _SIGMA_Z @ u.T @ _SIGMA_Z


def is_unitary(u: np.ndarray, atol: float = ATOL_COMPOSED) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not np.all(np.isfinite(u.view(float))):
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(2))) <= atol)


def round_trip(u: np.ndarray) -> np.ndarray:
    """Forward pass ``u``, Faraday mirror, then the same path in reverse.

    For unitary ``u`` this collapses to det(u) * faraday_mirror(): the fiber
    birefringence drops out of the round trip no matter what ``u`` is.
    """
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, atol=ATOL_COMPOSED):
        raise PreconditionError("round_trip requires a unitary operator")
    return backward(u) @ _FARADAY @ u


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max entrywise distance between a and b after fitting a global phase.

    The fitted phase maximizes |trace(a^H b)|; arrays of equal shape only.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("shape mismatch")
    t = np.sum(a.conj() * b)
    if abs(t) == 0.0:
        # No phase preferred; any unit scalar gives the same norm.
        return float(np.max(np.abs(a - b)))
    c = t / abs(t)
    return float(np.max(np.abs(c * a - b)))


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed U(2) sample (QR of a complex Ginibre matrix)."""
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
