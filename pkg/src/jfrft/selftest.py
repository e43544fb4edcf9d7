"""Quick invariant checks behind ``jfrft selftest``.

Each check returns ``(name, passed, detail)``. They run in a few seconds
and cover the properties the rest of the package relies on.
"""
from __future__ import annotations

import numpy as np

from . import numkit
from .filtering import CorrelationModel, wiener_solve
from .fracops import dft_matrix, make_graph_fracop, make_time_fracop
from .graphs import gft_factorize, random_weighted_graph, shift_operator
from .learn import chain_loss_and_grads
from .signals import make_rng
from .transform import JointTransform


def _rel(a, b) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def _setup(n=6, t=5, seed=0):
    g = random_weighted_graph(n, seed)
    return make_graph_fracop(gft_factorize(shift_operator(g, "adjacency"))), make_time_fracop(t)


def check_dft():
    worst = max(_rel(make_time_fracop(n).power(1.0), dft_matrix(n)) for n in range(2, 17))
    return "time order 1 equals the unitary DFT", worst < 1e-10, f"max rel err {worst:.1e}"


def check_index_rules():
    gop, top = _setup()
    rng = make_rng(1)
    worst = 0.0
    for _ in range(10):
        a1, b1, a2, b2 = rng.uniform(-2, 2, 4)
        j1 = JointTransform(a1, b1, gop, top).matrix()
        j2 = JointTransform(a2, b2, gop, top).matrix()
        j12 = JointTransform(a1 + a2, b1 + b2, gop, top).matrix()
        inv = JointTransform(-a1, -b1, gop, top).matrix()
        worst = max(worst, _rel(j1 @ j2, j12), _rel(j1 @ inv, np.eye(j1.shape[0])))
    ident = _rel(JointTransform(0, 0, gop, top).matrix(), np.eye(30))
    ok = worst < 1e-8 and ident < 1e-12
    return "index additivity, reversibility, identity", ok, f"max rel err {max(worst, ident):.1e}"


def check_unitarity():
    top = make_time_fracop(7)
    worst = max(_rel(top.power(b).conj().T @ top.power(b), np.eye(7)) for b in np.linspace(-2, 2, 17))
    return "time operator unitary for all orders", worst < 1e-10, f"max rel err {worst:.1e}"


def check_vec():
    gop, top = _setup()
    x = make_rng(2).standard_normal((6, 5))
    jt = JointTransform(0.3, -0.8, gop, top)
    err = _rel(numkit.vec(jt.forward(x)), jt.matrix() @ numkit.vec(x))
    return "vec(A X B^T) = (B kron A) vec(X)", err < 1e-10, f"rel err {err:.1e}"


def check_gradients():
    gop, top = _setup(4, 3, seed=3)
    rng = make_rng(4)
    y = rng.standard_normal((2, 4, 3))
    x = rng.standard_normal((2, 4, 3))
    hm = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    a, b = 0.4, -0.6
    _, _, da, db, dh = chain_loss_and_grads(gop, top, a, b, hm, y, x)

    def loss(a_, b_, h_):
        return chain_loss_and_grads(gop, top, a_, b_, h_, y, x, with_grads=False)[0]

    e = 1e-6
    fd = [(loss(a + e, b, hm) - loss(a - e, b, hm)) / (2 * e), (loss(a, b + e, hm) - loss(a, b - e, hm)) / (2 * e)]
    bump = np.zeros_like(hm)
    bump[1, 2] = e
    fd_re = (loss(a, b, hm + bump) - loss(a, b, hm - bump)) / (2 * e)
    fd_im = (loss(a, b, hm + 1j * bump) - loss(a, b, hm - 1j * bump)) / (2 * e)
    got = np.array([da, db, dh[1, 2].real, dh[1, 2].imag])
    want = np.array(fd + [fd_re, fd_im])
    err = float(np.max(np.abs(got - want) / np.maximum(np.abs(want), 1e-8)))
    return "closed-form gradients match finite differences", err < 1e-5, f"max rel err {err:.1e}"


def check_wiener_noiseless():
    gop, top = _setup(3, 2, seed=5)
    a = make_rng(6).standard_normal((6, 6))
    corr = CorrelationModel(a @ a.T, np.zeros((6, 6)))
    h = wiener_solve(JointTransform(0.7, 0.2, gop, top), corr).coeffs
    err = float(np.max(np.abs(h - 1)))
    return "noiseless Wiener filter is all ones", err < 1e-8, f"max |h - 1| {err:.1e}"


CHECKS = (check_dft, check_index_rules, check_unitarity, check_vec, check_gradients, check_wiener_noiseless)


def run_checks():
    return [check() for check in CHECKS]
