"""Reference moments of |Tr g|^(2k) over compact classical groups.

The moment table is exact in the stated ranges:

  special unitary SU(n):        k!        for 0 <= k <= n   (else <= k!)
  unitary symplectic USp(n):    (2k-1)!!  for 1 <= k <= n/2 (else <= (2k-1)!!)

A Haar Monte Carlo sampler provides the independent numerical oracle.
SU(n) sampling: complex Ginibre, QR, diagonal phase correction (making the
factorization unique hence the distribution Haar), then division by the
n-th root of the determinant, which pushes Haar on U(n) onto Haar on SU(n)
by left-invariance.  USp(n) sampling: quaternionic Ginibre orthonormalized
with quaternion Gram-Schmidt, embedded as 2x2 complex blocks; the output
satisfies U*U = I and U^T J U = J for the standard symplectic form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

FAMILY_SU = "special_unitary"
FAMILY_USP = "unitary_symplectic"


@dataclass(frozen=True)
class GroupSpec:
    family: str
    n: int  # matrix dimension

    def __post_init__(self):
        if self.family not in (FAMILY_SU, FAMILY_USP):
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.family == FAMILY_USP and self.n % 2 != 0:
            raise ValueError("symplectic dimension must be even")


def _double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def reference_moment(spec: GroupSpec, k: int) -> tuple[int, bool]:
    """(value, exact) for the 2k-th absolute trace moment.

    Outside the exact range the returned value is only an upper bound and
    the flag is False.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return (1, True)
    if spec.family == FAMILY_SU:
        return (math.factorial(k), k <= spec.n)
    return (_double_factorial(2 * k - 1), 2 * k <= spec.n)


def symplectic_form(n: int) -> np.ndarray:
    """J = [[0, I], [-I, 0]] for even n."""
    m = n // 2
    j = np.zeros((n, n))
    j[:m, m:] = np.eye(m)
    j[m:, :m] = -np.eye(m)
    return j


def _su_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    z = (
        rng.standard_normal((count, n, n))
        + 1j * rng.standard_normal((count, n, n))
    ) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.einsum("...ii->...i", r)
    q = q * (diag / np.abs(diag))[:, None, :]
    det = np.linalg.det(q)
    # divide by any fixed n-th root of det: left-invariance under SU(n)
    # is preserved, so the image measure is Haar on SU(n)
    root = np.exp(1j * np.angle(det) / n)
    return q / root[:, None, None]


def _quat_mul(a, b):
    """(alpha, beta) pairs: (a0,a1)(b0,b1) = (a0 b0 - a1 conj(b1), a0 b1 + a1 conj(b0))."""
    return (
        a[0] * b[0] - a[1] * np.conj(b[1]),
        a[0] * b[1] + a[1] * np.conj(b[0]),
    )


def _quat_conj(a):
    return (np.conj(a[0]), -a[1])


def _usp_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Haar matrices in USp(n) as 2x2-block complex embeddings."""
    m = n // 2
    # quaternionic Ginibre: entries alpha + beta j with complex Gaussians
    alpha = (
        rng.standard_normal((count, m, m))
        + 1j * rng.standard_normal((count, m, m))
    ) / math.sqrt(2)
    beta = (
        rng.standard_normal((count, m, m))
        + 1j * rng.standard_normal((count, m, m))
    ) / math.sqrt(2)
    cols_a = [alpha[:, :, j].copy() for j in range(m)]
    cols_b = [beta[:, :, j].copy() for j in range(m)]
    for j in range(m):
        vj = (cols_a[j], cols_b[j])
        for i in range(j):
            ui = (cols_a[i], cols_b[i])
            # proj = <u_i, v_j> (quaternion), conjugate-linear in u_i
            proj = (
                np.einsum("sk,sk->s", np.conj(ui[0]), vj[0])
                + np.einsum("sk,sk->s", ui[1], np.conj(vj[1])),
                np.einsum("sk,sk->s", np.conj(ui[0]), vj[1])
                - np.einsum("sk,sk->s", ui[1], np.conj(vj[0])),
            )
            # v_j -= u_i * proj (right multiplication by the quaternion)
            sub = _quat_mul((ui[0], ui[1]), (proj[0][:, None], proj[1][:, None]))
            vj = (vj[0] - sub[0], vj[1] - sub[1])
        norm = np.sqrt(
            np.einsum("sk,sk->s", np.abs(vj[0]), np.abs(vj[0]))
            + np.einsum("sk,sk->s", np.abs(vj[1]), np.abs(vj[1]))
        )
        cols_a[j] = vj[0] / norm[:, None]
        cols_b[j] = vj[1] / norm[:, None]
    a = np.stack(cols_a, axis=2)
    b = np.stack(cols_b, axis=2)
    # 2x2 block embedding q = alpha + beta j -> [[alpha, beta], [-conj beta, conj alpha]]
    out = np.zeros((count, n, n), dtype=np.complex128)
    out[:, 0::2, 0::2] = a
    out[:, 0::2, 1::2] = b
    out[:, 1::2, 0::2] = -np.conj(b)
    out[:, 1::2, 1::2] = np.conj(a)
    # permute interleaved rows/cols onto the standard [[0,I],[-I,0]] form
    perm = list(range(0, n, 2)) + list(range(1, n, 2))
    return out[:, perm][:, :, perm]


def haar_sample(spec: GroupSpec, seed: int = 0) -> np.ndarray:
    """One Haar-distributed matrix from the group."""
    rng = np.random.default_rng(seed)
    if spec.family == FAMILY_SU:
        return _su_batch(spec.n, 1, rng)[0]
    return _usp_batch(spec.n, 1, rng)[0]


def _trace_batches(
    spec: GroupSpec, samples: int, seed: int, batch: int = 20_000
) -> Iterator[np.ndarray]:
    seq = np.random.SeedSequence(seed)
    children = seq.spawn((samples + batch - 1) // batch)
    remaining = samples
    for child in children:
        take = min(batch, remaining)
        rng = np.random.default_rng(child)
        if spec.family == FAMILY_SU:
            mats = _su_batch(spec.n, take, rng)
        else:
            mats = _usp_batch(spec.n, take, rng)
        yield np.einsum("...ii->...", mats)
        remaining -= take


def mc_trace_moment(
    spec: GroupSpec, k: int, samples: int, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo (mean, jackknife standard error) of |Tr g|^(2k).

    Sampling is batched with spawned seeds, so the estimate depends only on
    (samples, seed), not on how batches are scheduled.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    vals = np.concatenate(
        [np.abs(t) ** (2 * k) for t in _trace_batches(spec, samples, seed)]
    )
    n = len(vals)
    mean = float(vals.mean())
    # jackknife over leave-one-out means; equals s/sqrt(n) for the mean
    jk = (vals.sum() - vals) / (n - 1)
    se = math.sqrt((n - 1) / n * float(((jk - mean) ** 2).sum()))
    return mean, se
