"""Multivariate polynomial maps: basis, least-squares fit, analytic Jacobian.

The basis is the dense total-degree monomial basis (all exponent
multi-indices with sum <= degree). Inputs are affinely normalized to
[-1, 1] per dimension from the sample bounding box before any fitting or
evaluation, which keeps Vandermonde conditioning sane and makes the fitted
coefficients invariant under affine rescaling of the raw inputs.

Fitting solves the normalized Vandermonde system by orthogonal
factorization (SVD via lstsq), never by normal equations; a tiny ridge
term (1e-10) is added only when the plain system is ill-conditioned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import IllConditioned, IntegrityError, Underdetermined
from .textio import FieldReader, fmt, fmt_seq

CONDITION_LIMIT = 1e12
RIDGE = 1e-10


def total_degree_exponents(in_dim: int, degree: int) -> np.ndarray:
    """All multi-indices with total degree <= degree, graded-lex ordered."""
    exps = [e for e in itertools.product(range(degree + 1), repeat=in_dim) if sum(e) <= degree]
    exps.sort(key=lambda e: (sum(e), e))
    return np.array(exps, dtype=np.int64)


def n_terms(in_dim: int, degree: int) -> int:
    return comb(in_dim + degree, degree)


@dataclass(frozen=True)
class FitReport:
    rms_residual: float
    max_residual: float
    condition_estimate: float
    n_samples: int


class PolyModel:
    """Polynomial map R^in_dim -> R^out_dim with analytic Jacobian."""

    def __init__(
        self,
        in_dim: int,
        out_dim: int,
        degree: int,
        input_lo: np.ndarray,
        input_hi: np.ndarray,
        coeffs: np.ndarray,
        exponents: np.ndarray | None = None,
    ):
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self.degree = int(degree)
        self.input_lo = np.asarray(input_lo, dtype=np.float64).reshape(self.in_dim)
        self.input_hi = np.asarray(input_hi, dtype=np.float64).reshape(self.in_dim)
        if np.any(self.input_hi <= self.input_lo):
            raise ValueError("input box must satisfy lo < hi per dimension")
        self.exponents = (
            total_degree_exponents(in_dim, degree) if exponents is None
            else np.asarray(exponents, dtype=np.int64)
        )
        if self.exponents.shape != (n_terms(in_dim, degree), in_dim):
            raise ValueError("exponent table does not match in_dim/degree")
        self.coeffs = np.asarray(coeffs, dtype=np.float64).reshape(
            self.out_dim, self.exponents.shape[0]
        )
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")
        self._dims = np.arange(self.in_dim)

    # -- evaluation -----------------------------------------------------------

    def _normalize(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * (x - self.input_lo) / (self.input_hi - self.input_lo) - 1.0

    def _design(self, xn: np.ndarray) -> np.ndarray:
        """Monomial matrix for normalized points xn of shape (N, in_dim)."""
        return np.prod(xn[:, None, :] ** self.exponents[None, :, :], axis=2)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Polynomial value at x; accepts (in_dim,) or (N, in_dim)."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            xn = self._normalize(x)
            pt = np.vander(xn, self.degree + 1, increasing=True)
            mono = np.prod(pt[self._dims, self.exponents], axis=1)
            return self.coeffs @ mono
        return self._design(self._normalize(x)) @ self.coeffs.T

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """Analytic d(output)/d(raw input), shape (out_dim, in_dim).

        Includes the chain rule through the [-1, 1] input normalization.
        """
        x = np.asarray(x, dtype=np.float64).reshape(self.in_dim)
        xn = self._normalize(x)
        pt = np.vander(xn, self.degree + 1, increasing=True)
        mono_factors = pt[self._dims, self.exponents]          # (T, in_dim)
        jac_n = np.empty((self.out_dim, self.in_dim))
        for k in range(self.in_dim):
            e_k = self.exponents[:, k]
            dfac = e_k * pt[k, np.maximum(e_k - 1, 0)]
            others = np.prod(np.delete(mono_factors, k, axis=1), axis=1)
            jac_n[:, k] = self.coeffs @ (dfac * others)
        return jac_n * (2.0 / (self.input_hi - self.input_lo))

    def extrapolates(self, x: np.ndarray) -> np.ndarray | bool:
        """True where x lies outside the fitted input box (per row if batched)."""
        x = np.asarray(x, dtype=np.float64)
        out = np.any((x < self.input_lo) | (x > self.input_hi), axis=-1)
        return bool(out) if out.ndim == 0 else out

    # -- persistence ------------------------------------------------------------

    def write_block(self, lines: list[str]) -> None:
        lines.append("polymodel")
        lines.append(f"dims {self.in_dim} {self.out_dim} {self.degree}")
        lines.append("input_lo " + fmt_seq(self.input_lo))
        lines.append("input_hi " + fmt_seq(self.input_hi))
        lines.append(f"n_terms {self.exponents.shape[0]}")
        for e in self.exponents:
            lines.append("exp " + " ".join(str(int(k)) for k in e))
        for row in self.coeffs:
            lines.append("coef " + fmt_seq(row))
        lines.append("end_polymodel")

    @classmethod
    def read_block(cls, reader: FieldReader) -> "PolyModel":
        reader.expect("polymodel")
        in_dim, out_dim, degree = (int(t) for t in reader.expect("dims"))
        lo = reader.floats("input_lo", in_dim)
        hi = reader.floats("input_hi", in_dim)
        nt = int(reader.expect("n_terms")[0])
        exps = np.array([[int(t) for t in reader.expect("exp")] for _ in range(nt)])
        coeffs = np.array([reader.floats("coef", nt) for _ in range(out_dim)])
        reader.expect("end_polymodel")
        return cls(in_dim, out_dim, degree, lo, hi, coeffs, exponents=exps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyModel):
            return NotImplemented
        return (
            (self.in_dim, self.out_dim, self.degree) == (other.in_dim, other.out_dim, other.degree)
            and np.array_equal(self.input_lo, other.input_lo)
            and np.array_equal(self.input_hi, other.input_hi)
            and np.array_equal(self.exponents, other.exponents)
            and np.array_equal(self.coeffs, other.coeffs)
        )


def fit(
    x: np.ndarray, y: np.ndarray, degree: int, in_dim: int | None = None, out_dim: int | None = None
) -> tuple[PolyModel, FitReport]:
    """Least-squares polynomial fit of y ~ p(x).

    x: (N, in_dim) raw inputs; y: (N, out_dim) targets. The input box is
    the sample bounding box. Raises Underdetermined when N < n_terms, when
    the design is rank deficient, or when the samples span a degenerate
    box; raises IllConditioned when even the ridge fallback stays above
    the 1e12 condition limit.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1:
        y = y[:, None]
    if in_dim is not None and x.shape[1] != in_dim:
        raise ValueError(f"expected in_dim={in_dim}, got {x.shape[1]}")
    if out_dim is not None and y.shape[1] != out_dim:
        raise ValueError(f"expected out_dim={out_dim}, got {y.shape[1]}")
    n, in_dim = x.shape
    out_dim = y.shape[1]
    nt = n_terms(in_dim, degree)
    if n < nt:
        raise Underdetermined(f"{n} samples for {nt} basis terms")
    lo, hi = x.min(axis=0), x.max(axis=0)
    if np.any(hi - lo <= 0.0):
        raise Underdetermined("samples span a degenerate input box")

    model = PolyModel(in_dim, out_dim, degree, lo, hi, np.zeros((out_dim, nt)))
    design = model._design(model._normalize(x))
    coeffs, _, rank, sv = np.linalg.lstsq(design, y, rcond=None)
    if rank < nt:
        raise Underdetermined(f"design matrix rank {rank} < {nt} basis terms")
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    if cond > CONDITION_LIMIT:
        # ridge fallback: augment with sqrt(RIDGE) * identity rows
        aug = np.vstack([design, np.sqrt(RIDGE) * np.eye(nt)])
        rhs = np.vstack([y, np.zeros((nt, out_dim))])
        coeffs, _, _, sv_r = np.linalg.lstsq(aug, rhs, rcond=None)
        cond_r = float(sv_r[0] / sv_r[-1]) if sv_r[-1] > 0 else np.inf
        if cond_r > CONDITION_LIMIT or not np.all(np.isfinite(coeffs)):
            raise IllConditioned(f"condition estimate {cond:.3g} (ridge {cond_r:.3g})")

    model.coeffs = np.ascontiguousarray(coeffs.T)
    resid = design @ coeffs - y
    report = FitReport(
        rms_residual=float(np.sqrt(np.mean(resid**2))),
        max_residual=float(np.max(np.abs(resid))) if resid.size else 0.0,
        condition_estimate=cond,
        n_samples=n,
    )
    return model, report
