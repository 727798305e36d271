"""Closed-form moments of the random agreement value over G(n, p).

Everything here is exact double-precision arithmetic on (n, p, x0); no
sampling. Notation used throughout:

  d          out-degree of one node, Binomial(n - 1, p), q = 1 - p
  w_ii       self-weight 1/(d_i + 1) of the update matrix
  w_ij       neighbor weight a_ij/(d_i + 1), i != j
  rho, delta coefficients of the variance law, see variance_coefficients

The agreed value x* of the averaging dynamics is random (the graph
sequence is random). Its mean is the plain average of the initial states;
its variance is (1 - rho)/delta times the unnormalized dispersion
sum_i (x_i(0) - mean(x0))^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .graphs import ModelParams

__all__ = [
    "DENSE_KRON_LIMIT",
    "PatternMap",
    "VarianceReport",
    "WeightSecondMoments",
    "consensus_mean",
    "consensus_variance",
    "expected_kron_matrix",
    "expected_neighbor_weight",
    "expected_self_weight",
    "expected_self_weight_sq",
    "expected_weight_matrix",
    "kron_apply_left",
    "kron_left_eigenvector",
    "kron_row_sums",
    "pattern_map",
    "peak_size",
    "second_moments",
    "self_weight_sq_series",
    "variance_coefficients",
    "variance_factor",
]

# n^4 dense entries; 60^4 = 1.3e7 doubles is the cap for full assembly.
DENSE_KRON_LIMIT = 60


def _one_minus_q_pow(p: float, n: int) -> float:
    """1 - (1-p)^n without cancellation for small p."""
    if p >= 1.0:
        return 1.0
    return -math.expm1(n * math.log1p(-p))


def _inv_square_binomial_moment(p: float, trials: int, shift: int) -> float:
    """E[1/(X + shift)^2] for X ~ Binomial(trials, p).

    All-positive pmf sum; the pmf itself comes from the log-gamma form,
    so there is no underflow cascade even for large trial counts.
    """
    k = np.arange(trials + 1)
    pmf = stats.binom.pmf(k, trials, p)
    return float(np.sum(pmf / (k + shift) ** 2))


def expected_self_weight(params: ModelParams) -> float:
    """E[w_ii] = E[1/(d+1)] = (1 - q^n) / (n p)."""
    return _one_minus_q_pow(params.p, params.n) / (params.n * params.p)


def expected_neighbor_weight(params: ModelParams) -> float:
    """E[w_ij] for i != j; row-stochasticity forces (1 - E[w_ii])/(n-1)."""
    return (1.0 - expected_self_weight(params)) / (params.n - 1)


def expected_self_weight_sq(params: ModelParams) -> float:
    """E[w_ii^2] = E[1/(d+1)^2], the second moment of the self-weight.

    Computed as a binomial-pmf sum with summands in (0, 1]; the
    equivalent power-series form (see self_weight_sq_series) multiplies a
    huge series by a vanishing q^(n-1) and is kept out of the hot path.
    """
    return _inv_square_binomial_moment(params.p, params.n - 1, 1)


def self_weight_sq_series(p: float, n: int) -> float:
    """Series form of the squared-self-weight moment.

    Returns sum_k (k+1)^-2 binom(n-1, k) (p/q)^k, whose product with
    q^(n-1) equals E[w_ii^2]. Exposed only for unit-testing the series
    identity; needs p < 1 and n small enough for q^(n-1) to be
    representable.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"series form needs 0 <= p < 1, got {p}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _inv_square_binomial_moment(p, n - 1, 1) / (1.0 - p) ** (n - 1)


@dataclass(frozen=True)
class WeightSecondMoments:
    """The six entry-product expectations E[w_ij w_rs] of one graph draw.

    With i, j, r, s pairwise distinct, every product of two entries of W
    falls into one of six classes:

      self_sq                  E[w_ii^2]
      self_self                E[w_ii w_rr]          (independent rows)
      self_neighbor_same_row   E[w_ii w_is] = E[w_ij w_ii] = E[w_ij^2]
      self_neighbor_cross_row  E[w_ii w_ri] = E[w_ii w_rs]
      neighbor_pair_same_row   E[w_ij w_is]; None at n = 2, where one row
                               cannot hold two distinct neighbor weights
      neighbor_pair_cross_row  E[w_ij w_ji] = E[w_ij w_js] = E[w_ij w_ri]
                               = E[w_ij w_rj] = E[w_ij w_rs]

    Rows of W are independent, so cross-row classes factor into products
    of first moments; same-row classes carry the joint degree dependence.
    """

    mean_self: float
    mean_neighbor: float
    self_sq: float
    self_self: float
    self_neighbor_same_row: float
    self_neighbor_cross_row: float
    neighbor_pair_same_row: float | None
    neighbor_pair_cross_row: float


def second_moments(params: ModelParams) -> WeightSecondMoments:
    """All six second-moment classes from the two diagonal moments."""
    n = params.n
    f1 = expected_self_weight(params)
    g2 = expected_self_weight_sq(params)
    off = (1.0 - f1) / (n - 1)
    same = (f1 - g2) / (n - 1)
    pair_same = None
    if n >= 3:
        pair_same = (1.0 + 2.0 * g2 - 3.0 * f1) / ((n - 1) * (n - 2))
    return WeightSecondMoments(
        mean_self=f1,
        mean_neighbor=off,
        self_sq=g2,
        self_self=f1 * f1,
        self_neighbor_same_row=same,
        self_neighbor_cross_row=f1 * off,
        neighbor_pair_same_row=pair_same,
        neighbor_pair_cross_row=off * off,
    )


def expected_weight_matrix(params: ModelParams) -> np.ndarray:
    """E[W]: expected self-weight on the diagonal, uniform off-diagonal.

    Row-stochastic and symmetric, so its left unit eigenvector is the
    uniform distribution, which is what makes the mean of the agreed
    value the plain average of x(0).
    """
    n = params.n
    f1 = expected_self_weight(params)
    m = np.full((n, n), (1.0 - f1) / (n - 1))
    np.fill_diagonal(m, f1)
    return m


def _kron_index_values(params: ModelParams) -> tuple[WeightSecondMoments, float]:
    m = second_moments(params)
    pair_same = 0.0 if m.neighbor_pair_same_row is None else m.neighbor_pair_same_row
    return m, pair_same


def expected_kron_matrix(params: ModelParams) -> np.ndarray:
    """Dense E[W (x) W], the n^2 x n^2 matrix of entries E[w_ij w_rs].

    Row (i, r) = i*n + r, column (j, s) = j*n + s. Block (i, r) holds the
    cross-row classes for i != r and the same-row classes for i == r; at
    n = 2 the same-row blocks never reach the two-distinct-neighbors
    class, so its absence is harmless. Rejected above DENSE_KRON_LIMIT;
    use kron_apply_left / kron_row_sums there.
    """
    n = params.n
    if n > DENSE_KRON_LIMIT:
        raise ValueError(f"dense assembly capped at n <= {DENSE_KRON_LIMIT}, got {n}")
    m, pair_same = _kron_index_values(params)
    out = np.empty((n * n, n * n))
    idx = np.arange(n)
    for i in range(n):
        for r in range(n):
            block = out[i * n + r].reshape(n, n)
            if i == r:
                block[:] = pair_same
                block[idx, idx] = m.self_neighbor_same_row
                block[i, :] = m.self_neighbor_same_row
                block[:, i] = m.self_neighbor_same_row
                block[i, i] = m.self_sq
            else:
                block[:] = m.neighbor_pair_cross_row
                block[i, :] = m.self_neighbor_cross_row
                block[:, r] = m.self_neighbor_cross_row
                block[i, r] = m.self_self
    return out


def kron_row_sums(params: ModelParams) -> np.ndarray:
    """Row sums of E[W (x) W] from the entry-class counts, any n.

    A same-row block row holds the squared class once, the mixed class
    3(n-1) times and the two-neighbor class (n-1)(n-2) times; a cross-row
    block row holds its three classes 1, 2(n-1) and (n-1)^2 times. Both
    sums collapse to 1 algebraically; this computes them the literal way
    so tests can watch the identity survive floating point.
    """
    n = params.n
    m, pair_same = _kron_index_values(params)
    same_row = (
        m.self_sq
        + 3.0 * (n - 1) * m.self_neighbor_same_row
        + (n - 1) * (n - 2) * pair_same
    )
    cross_row = (
        m.self_self
        + 2.0 * (n - 1) * m.self_neighbor_cross_row
        + (n - 1) ** 2 * m.neighbor_pair_cross_row
    )
    out = np.full(n * n, cross_row)
    out[np.arange(n) * (n + 1)] = same_row
    return out


def kron_apply_left(v: np.ndarray, params: ModelParams) -> np.ndarray:
    """v^T M for M = E[W (x) W] in O(n^2), without forming M.

    v is indexed like the dense assembly's rows: component (i, r) sits at
    i*n + r. Aggregates (total, trace, row and column sums of v viewed as
    an n x n array) pin down how much mass multiplies each entry class.
    """
    n = params.n
    v = np.asarray(v, dtype=float)
    if v.shape != (n * n,):
        raise ValueError(f"v must have length n^2 = {n * n}, got shape {v.shape}")
    m, pair_same = _kron_index_values(params)
    q1, q2 = m.self_sq, m.self_self
    q3, q4 = m.self_neighbor_same_row, m.self_neighbor_cross_row
    q6 = m.neighbor_pair_cross_row

    V = v.reshape(n, n)
    diag = V.diagonal().copy()
    row = V.sum(axis=1)
    col = V.sum(axis=0)
    total = float(V.sum())
    trace = float(diag.sum())

    d_j = diag[:, None]
    d_s = diag[None, :]
    out = (
        q3 * (d_j + d_s)
        + pair_same * (trace - d_j - d_s)
        + q2 * V
        + q4 * ((row[:, None] - d_j - V) + (col[None, :] - d_s - V))
        + q6 * (total - trace - row[:, None] - col[None, :] + d_j + d_s + V)
    )
    out_diag = (
        q1 * diag
        + q3 * (trace - diag)
        + q4 * (row + col - 2.0 * diag)
        + q6 * (total - trace - row - col + 2.0 * diag)
    )
    out[np.arange(n), np.arange(n)] = out_diag
    return out.reshape(n * n)


@dataclass(frozen=True)
class PatternMap:
    """Coefficients of the 2x2 map E[W (x) W] induces on pattern vectors.

    A pattern vector holds one value alpha on every (i, r) position with
    i != r and another value beta on the n positions with i == r. Left
    multiplication preserves the pattern:

        alpha' = a * alpha + b * beta
        beta'  = c * alpha + d * beta

    b*c = (1-a)(1-d) holds identically, which is exactly what gives the
    map a unit eigenvalue and the second-moment matrix its closed-form
    left eigenvector with ratio alpha/beta = b/(1-a).
    """

    a: float
    b: float
    c: float
    d: float


def pattern_map(params: ModelParams) -> PatternMap:
    """The four pattern-map coefficients in terms of the mean self-weight.

    With f1 = E[w_ii] and s = (n f1 + n - 2)(1 - f1)/(n - 1):
    a = 1 - s/(n-1), b = (1 - f1)/(n-1), c = s, d = f1. Note a < 1; the
    empirical map extracted from the enumerated second-moment matrix
    fixes this sign (tests cover it), and b/(1-a) then reproduces rho.
    """
    n = params.n
    f1 = expected_self_weight(params)
    scale = (n * f1 + n - 2.0) * (1.0 - f1) / (n - 1.0)
    return PatternMap(
        a=1.0 - scale / (n - 1.0),
        b=(1.0 - f1) / (n - 1.0),
        c=scale,
        d=f1,
    )


def variance_coefficients(params: ModelParams) -> tuple[float, float]:
    """The pair (rho, delta) parameterizing the variance law.

    rho = p(n-1) / (p(n-2) + 1 - q^n) is the ratio of off-pattern to
    diagonal-pattern mass in the Perron vector of E[W (x) W]; delta =
    n + n(n-1) rho normalizes that vector to a probability distribution.
    0 < rho <= 1, with rho = 1 exactly at p = 1 (zero variance). The
    1 - q^n term is evaluated cancellation-safely, which matters for the
    fixed-expected-degree sweeps where p = c/n gets small.
    """
    n, p = params.n, params.p
    rho = p * (n - 1) / (p * (n - 2) + _one_minus_q_pow(p, n))
    delta = n + n * (n - 1) * rho
    return rho, delta


def kron_left_eigenvector(params: ModelParams) -> np.ndarray:
    """Closed-form left unit (Perron) eigenvector of E[W (x) W].

    Every component equals rho/delta except the n positions i*(n+1)
    (pattern positions (i, i)), which equal 1/delta; components sum to 1.
    """
    n = params.n
    rho, delta = variance_coefficients(params)
    v = np.full(n * n, rho / delta)
    v[np.arange(n) * (n + 1)] = 1.0 / delta
    return v


def consensus_mean(x0) -> float:
    """Expected agreement value: the plain average of the initial states."""
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1 or x0.size == 0:
        raise ValueError("x0 must be a non-empty vector")
    return float(x0.mean())


@dataclass(frozen=True)
class VarianceReport:
    """Closed-form mean/variance of the agreed value for one (n, p, x0).

    x0_dispersion is the unnormalized sum of squares around the mean,
    the quantity the variance law scales by (1 - rho)/delta.
    """

    mean: float
    variance: float
    rho: float
    delta: float
    factor: float
    x0_dispersion: float


def consensus_variance(params: ModelParams, x0) -> VarianceReport:
    """var(x*) = (1 - rho)/delta * sum_i (x_i(0) - mean(x0))^2.

    Zero exactly when p = 1 (rho = 1: the one-step average is
    deterministic) or when x0 is constant. Agrees with the spectral form
    [x0 (x) x0]^T v1(E[W (x) W]) - (mean x0)^2 to rounding; the oracle
    module checks that equality against enumerated moments.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (params.n,):
        raise ValueError(f"x0 must be a length-{params.n} vector, got shape {x0.shape}")
    rho, delta = variance_coefficients(params)
    mean = float(x0.mean())
    dispersion = float(np.sum((x0 - mean) ** 2))
    return VarianceReport(
        mean=mean,
        variance=(1.0 - rho) / delta * dispersion,
        rho=rho,
        delta=delta,
        factor=params.n * (1.0 - rho) / delta,
        x0_dispersion=dispersion,
    )


def variance_factor(params: ModelParams) -> float:
    """n (1 - rho)/delta: variance per unit of normalized x0 dispersion.

    var(x*) = factor * (dispersion / n). Lives in [0, 1), equals 0 at
    p = 1, and for fixed expected degree c (p = c/n) rises steeply just
    above n = c, peaks, then decays like 1/n.
    """
    rho, delta = variance_coefficients(params)
    return params.n * (1.0 - rho) / delta


def peak_size(c: float, n_max: int) -> int:
    """Network size in (c, n_max] maximizing the closed-form variance for
    p = c/n under the ramp initial condition x_i(0) = i/n.

    The ramp's dispersion is (n^2 - 1)/(12 n), so the scanned objective
    is (1 - rho)/delta * (n^2 - 1)/(12 n). Ties break toward smaller n.
    Because the ramp's own dispersion grows with n, this peak sits
    slightly to the right of the peak of the x0-independent factor
    n(1 - rho)/delta (e.g. sizes 10 vs 9 for c = 5).
    """
    if c < 1:
        raise ValueError(f"c must be >= 1, got {c}")
    n_start = math.floor(c) + 1
    if n_max < n_start:
        raise ValueError(f"n_max must exceed c = {c}, got {n_max}")
    best_n = n_start
    best_value = -math.inf
    for n in range(n_start, n_max + 1):
        rho, delta = variance_coefficients(ModelParams(n, c / n))
        value = (1.0 - rho) / delta * (n * n - 1) / (12.0 * n)
        if value > best_value:
            best_n, best_value = n, value
    return best_n
