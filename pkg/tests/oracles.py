"""Brute-force density-matrix reference for the purification circuits.

Shares no code with the package: gates are embedded with explicit Kronecker
products over the full register and noise is applied as a superoperator.
"""
import numpy as np

I = np.eye(2)
Zm = np.diag([1.0, -1.0])
Hm = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])


def ad_kraus(gamma):
    return [np.array([[1, 0], [0, np.sqrt(1 - gamma)]]), np.array([[0, np.sqrt(gamma)], [0, 0]])]


def embed(op, q, n):
    mats = [I] * n
    mats[q] = op
    out = np.array([[1.0]])
    for m in mats:
        out = np.kron(out, m)
    return out


def cz(a, b, n):
    # CZ = |0><0|_a x I + |1><1|_a x Z_b
    return embed(P0, a, n) + embed(P1, a, n) @ embed(Zm, b, n)


def ad_superop(rho, gamma, q, n):
    return sum(embed(k, q, n) @ rho @ embed(k, q, n).conj().T for k in ad_kraus(gamma))


def partial_trace_front(rho, n_front, n):
    d_front = 2**n_front
    d_rest = 2 ** (n - n_front)
    r = rho.reshape(d_front, d_rest, d_front, d_rest)
    return np.einsum("iaib->ab", r)


def run_circuit(psi, gamma, couplings):
    """Returns ({label: (probability, data density matrix)}, noisy data density matrix)."""
    psi = np.asarray(psi, dtype=complex)
    n_data = int(np.log2(psi.size))
    n_anc = len(couplings)
    n = n_anc + n_data

    rho_data = np.outer(psi, psi.conj())
    noisy = rho_data
    for q in range(n_data):
        noisy = ad_superop(noisy, gamma, q, n_data)

    plus = np.ones(2) / np.sqrt(2)
    full = psi
    for _ in range(n_anc):
        full = np.kron(plus, full)
    rho = np.outer(full, full.conj())
    layer = np.eye(2**n)
    for a, watched in enumerate(couplings):
        for d in watched:
            layer = cz(a, n_anc + d, n) @ layer
    rho = layer @ rho @ layer.conj().T
    for q in range(n_data):
        rho = ad_superop(rho, gamma, n_anc + q, n)
    rho = layer @ rho @ layer.conj().T
    for a in range(n_anc):
        h = embed(Hm, a, n)
        rho = h @ rho @ h.conj().T

    out = {}
    for idx in range(2**n_anc):
        label = format(idx, f"0{n_anc}b") if n_anc else ""
        proj = np.eye(1)
        for bit in label:
            proj = np.kron(proj, P0 if bit == "0" else P1)
        proj = np.kron(proj, np.eye(2**n_data))
        sub = proj @ rho @ proj
        prob = float(np.trace(sub).real)
        data = partial_trace_front(sub, n_anc, n)
        out[label] = (prob, data / prob if prob > 1e-15 else None)
    return out, noisy


def fidelity(psi, rho):
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(psi.conj() @ rho @ psi))
