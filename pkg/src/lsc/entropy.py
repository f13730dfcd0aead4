"""Von Neumann entropy of the electronic mixture left before emission.

The molecular state is sum_{l,m} c[l, m] Xi_l (x) Phi_{l,m}; tracing out the
nuclear label m leaves the electronic density matrix Sigma.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TOL = 1e-12
EIGEN_CLIP = 1e-14


@dataclass(frozen=True)
class SuperpositionCoeffs:
    c: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.c, dtype=complex))
        if c.ndim != 2 or c.size == 0:
            raise DomainError("coefficients must form a non-empty 2-D matrix")
        norm = float(np.sum(np.abs(c) ** 2))
        if abs(norm - 1.0) > TOL:
            raise DomainError(f"coefficients not normalised: sum |c|^2 = {norm!r}")
        object.__setattr__(self, "c", c)

    @classmethod
    def normalized(cls, c):
        c = np.asarray(c, dtype=complex)
        norm = np.sqrt(np.sum(np.abs(c) ** 2))
        if norm == 0:
            raise DomainError("all coefficients are zero")
        return cls(c / norm)

    @property
    def shape(self):
        return self.c.shape


@dataclass(frozen=True)
class DensityMatrix:
    sigma: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=complex)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise DomainError("density matrix must be square")
        if not np.allclose(s, s.conj().T, rtol=0, atol=TOL):
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(s).real - 1.0) > TOL:
            raise DomainError("density matrix trace differs from 1")
        if np.min(np.linalg.eigvalsh(s)) < -TOL:
            raise DomainError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "sigma", s)

    @property
    def dim(self):
        return self.sigma.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.sigma)

    def purity(self):
        return float(np.real(np.trace(self.sigma @ self.sigma)))


def reduce_density_matrix(coeffs, nuclear_overlap=None):
    """Sigma[l, l'] = sum_m c[l, m] conj(c[l', m]) * O[l', l].

    ``nuclear_overlap`` O[l, l'] = <Phi_{l,m}|Phi_{l',m}> (same for every m,
    orthogonal across m). The default, all entries equal to one, is the plain
    partial trace over the nuclear label.
    """
    if not isinstance(coeffs, SuperpositionCoeffs):
        coeffs = SuperpositionCoeffs(coeffs)
    c = coeffs.c
    sigma = c @ c.conj().T
    if nuclear_overlap is not None:
        O = np.asarray(nuclear_overlap, dtype=complex)
        d = c.shape[0]
        if O.shape != (d, d):
            raise DomainError(f"nuclear overlap must be {d}x{d}")
        if not np.allclose(np.diag(O), 1.0, atol=TOL) or not np.allclose(O, O.conj().T, atol=TOL):
            raise DomainError("nuclear overlap must be Hermitian with unit diagonal")
        if np.min(np.linalg.eigvalsh(O)) < -TOL:
            raise DomainError("nuclear overlap must be positive semidefinite")
        sigma = sigma * O.T
    sigma = 0.5 * (sigma + sigma.conj().T)
    return DensityMatrix(sigma)


def von_neumann_entropy(dm):
    """S = -sum lambda ln lambda in nats, with 0 ln 0 = 0."""
    if not isinstance(dm, DensityMatrix):
        dm = DensityMatrix(dm)
    lam = dm.eigenvalues()
    if lam[-1] > 1.0 - EIGEN_CLIP:
        return 0.0  # pure up to round-off
    lam = lam[lam > EIGEN_CLIP]
    return float(max(-np.sum(lam * np.log(lam)), 0.0))


def emission_entropy_gain(coeffs, nuclear_overlap=None):
    """Entropy of the pre-emission mixture, measured from a pure absorbing state."""
    return von_neumann_entropy(reduce_density_matrix(coeffs, nuclear_overlap))


def parse_coefficients(text):
    """Read a coefficient matrix from text.

    One line per electronic label l. Each line holds 2*d_n numbers, the real
    and imaginary parts of c[l, 0], c[l, 1], ... separated by commas and/or
    whitespace. Blank lines and text after ``#`` are ignored.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        try:
            values = [float(tok) for tok in line.split()]
        except ValueError as exc:
            raise DomainError(f"line {lineno}: {exc}") from None
        if len(values) % 2:
            raise DomainError(f"line {lineno}: expected (re, im) pairs, got {len(values)} numbers")
        rows.append([complex(re, im) for re, im in zip(values[::2], values[1::2])])
    if not rows:
        raise DomainError("no coefficients found")
    if len({len(r) for r in rows}) != 1:
        raise DomainError("all rows must have the same number of nuclear amplitudes")
    return np.array(rows, dtype=complex)


def format_coefficients(c):
    lines = []
    for row in np.atleast_2d(c):
        lines.append(", ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"
