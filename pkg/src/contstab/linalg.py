"""One-sided Jacobi singular values.

Used on the scaled pivoted-Cholesky factor ``G`` of a kernel matrix
(``A = G G^H``).  Jacobi on a factor whose column-scaled version is well
conditioned resolves every singular value to high *relative* accuracy, which
a dense Hermitian eigensolver on ``A`` itself cannot do below
``eps_mach * ||A||``.
"""

import numpy as np

from .exceptions import ConditioningError


def round_robin(n: int):
    """Tournament schedule: ``n - 1`` rounds (``n`` padded to even) of disjoint pairs."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(p, q) for p, q in pairs if p < n and q < n]
        rounds.append((np.array([min(p) for p in pairs], dtype=int),
                       np.array([max(p) for p in pairs], dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_singular_values(G, tol=1e-14, max_sweeps=100):
    """Singular values of ``G`` (descending) by cyclic one-sided Jacobi.

    Column pairs ``(p, q)`` are rotated until ``|g_p^H g_q| <= tol ||g_p|| ||g_q||``
    for every pair; each round of the round-robin schedule is applied to
    disjoint pairs at once.

    Raises
    ------
    ConditioningError
        If the sweeps do not converge within ``max_sweeps``.
    """
    G = np.array(G, dtype=complex, copy=True)
    if G.ndim != 2:
        raise ValueError("expected a matrix")
    n = G.shape[1]
    if n == 0:
        return np.zeros(0)
    if G.shape[0] > n:
        # same singular values, smaller rotations
        G = np.linalg.qr(G, mode="r")
    rounds = round_robin(n)
    for _ in range(max_sweeps):
        rotated = False
        for P, Q in rounds:
            gp, gq = G[:, P], G[:, Q]
            a = np.einsum("ij,ij->j", gp.conj(), gp).real
            b = np.einsum("ij,ij->j", gq.conj(), gq).real
            c = np.einsum("ij,ij->j", gp.conj(), gq)
            mod = np.abs(c)
            active = mod > tol * np.sqrt(a * b)
            if not np.any(active):
                continue
            rotated = True
            P, Q = P[active], Q[active]
            gp, gq = gp[:, active], gq[:, active]
            a, b, c, mod = a[active], b[active], c[active], mod[active]
            ph = c / mod
            zeta = (b - a) / (2.0 * mod)
            sign = np.where(zeta >= 0.0, 1.0, -1.0)
            t = sign / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            cs = 1.0 / np.sqrt(1.0 + t * t)
            sn = cs * t
            G[:, P] = cs * gp - (sn * ph.conj()) * gq
            G[:, Q] = (sn * ph) * gp + cs * gq
        if not rotated:
            return np.sort(np.linalg.norm(G, axis=0))[::-1]
    raise ConditioningError(f"one-sided Jacobi did not converge in {max_sweeps} sweeps")
