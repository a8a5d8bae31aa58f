"""Cached heavy computations shared by several test modules."""

from functools import lru_cache

from photoatom.amplitude import scattered_field, spontaneous_field, transmitted_field
from photoatom.moments import ratio_R
from photoatom.params import ControlParams, default_grid
from photoatom.schmidt import schmidt_decompose


@lru_cache(maxsize=None)
def field(kind, eta, tau, n=1000, g_c=0.0):
    ctrl = ControlParams(eta, tau, g_c=g_c)
    grid = default_grid(ctrl, n)
    if kind == "scattered":
        return scattered_field(ctrl, grid)
    if kind == "spontaneous":
        return spontaneous_field(eta, grid)
    return transmitted_field(eta, ctrl, grid)


@lru_cache(maxsize=None)
def K(kind, eta, tau, n=1000, g_c=0.0):
    return schmidt_decompose(field(kind, eta, tau, n, g_c), n_modes=0).K


@lru_cache(maxsize=None)
def spectrum(kind, eta, tau, n=1000, g_c=0.0, n_modes=10):
    return schmidt_decompose(field(kind, eta, tau, n, g_c), n_modes=n_modes)


@lru_cache(maxsize=None)
def R(kind, eta, tau, n=1000, g_c=0.0, axis="q"):
    return ratio_R(field(kind, eta, tau, n, g_c), axis).ratio


# criterion id -> (passed, one-line detail); printed by conftest at session end
ACCEPTANCE = {}


def record(cid, passed, detail):
    ACCEPTANCE[cid] = (bool(passed), detail)
    assert passed, f"{cid}: {detail}"
