"""Uplink energy model for deadline-constrained model uploads.

A client that is scheduled in a round gets a share b of the system bandwidth B
and must push its model update (L bits) within the round deadline tau. The
transmit power that makes the upload finish exactly at the deadline follows
from inverting the Shannon rate, and the resulting round energy is

    E(b, h2) = (tau * N0 * B * b / h2) * (2^(L / (tau * B * b)) - 1)

where h2 is the channel power gain. Everything here is expressed through the
kernel

    f(x) = x * (2^(beta / x) - 1),   x > 0, beta = L / tau,

evaluated at x = b * B. f is strictly decreasing and strictly convex, which is
what makes the per-round allocation problem well behaved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw

LN2 = math.log(2.0)


@dataclass(frozen=True)
class NetworkParams:
    """Static system parameters shared by all rounds.

    bandwidth_hz: total system bandwidth B in Hz.
    noise_watt: noise power N0 in W.
    deadline_s: per-round upload deadline tau in seconds.
    model_bits: size L of one model update in bits.
    b_min: minimum bandwidth share a scheduled client may receive.
    num_clients: number of clients K.
    """

    bandwidth_hz: float
    noise_watt: float
    deadline_s: float
    model_bits: float
    b_min: float
    num_clients: int

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")
        if self.noise_watt <= 0:
            raise ValueError("noise_watt must be positive")
        if self.deadline_s <= 0:
            raise ValueError("deadline_s must be positive")
        if self.model_bits <= 0:
            raise ValueError("model_bits must be positive")
        if self.num_clients < 1:
            raise ValueError("num_clients must be at least 1")
        # every client must be schedulable at once: K * b_min <= 1
        if not 0.0 < self.b_min <= 1.0 / self.num_clients:
            raise ValueError(
                "b_min must lie in (0, 1/num_clients]; got "
                f"b_min={self.b_min}, num_clients={self.num_clients}"
            )

    @property
    def beta(self) -> float:
        """Kernel constant beta = model_bits / deadline_s (bits per second)."""
        return self.model_bits / self.deadline_s


def kernel_f(x, beta):
    """f(x) = x * (2^(beta/x) - 1). Strictly decreasing, strictly convex.

    Accepts scalars or arrays. Overflow of the exponential propagates as inf,
    which callers treat as an un-servable client.
    """
    x = np.asarray(x, dtype=float)
    b = np.asarray(beta, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("kernel_f requires x > 0")
    if np.any(b <= 0.0):
        raise ValueError("kernel_f requires beta > 0")
    with np.errstate(over="ignore"):
        out = x * np.expm1(LN2 * b / x)
    return out if out.ndim else float(out)


def kernel_f_prime(x, beta):
    """f'(x) = 2^(beta/x) * (1 - ln2 * beta/x) - 1, negative on x > 0."""
    x = np.asarray(x, dtype=float)
    b = np.asarray(beta, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("kernel_f_prime requires x > 0")
    if np.any(b <= 0.0):
        raise ValueError("kernel_f_prime requires beta > 0")
    y = LN2 * b / x
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.exp(y) * (1.0 - y) - 1.0
    return out if out.ndim else float(out)


def kernel_f_prime_inv(target, beta):
    """Solve f'(x) = target for x, with target < 0.

    Substituting u = ln2 * beta / x turns f'(x) = target into
    (u - 1) * e^(u - 1) = -(1 + target) / e, i.e. u = 1 + W0(-(1+target)/e).
    f' is a strictly increasing bijection from (0, inf) onto (-inf, 0), so the
    solution exists and is unique; target -> 0- maps to x -> inf.
    """
    t = np.asarray(target, dtype=float)
    b = np.asarray(beta, dtype=float)
    if np.any(t >= 0.0):
        raise ValueError("kernel_f_prime_inv requires target < 0")
    if np.any(b <= 0.0):
        raise ValueError("kernel_f_prime_inv requires beta > 0")
    arg = -(1.0 + t) / math.e
    # rounding can push arg a hair below the branch point -1/e
    arg = np.maximum(arg, -1.0 / math.e)
    u = 1.0 + np.real(lambertw(arg, k=0))
    with np.errstate(divide="ignore"):
        out = np.where(u > 0.0, LN2 * b / np.maximum(u, 1e-300), np.inf)
    return out if out.ndim else float(out)


def required_power(b, h_squared, params: NetworkParams):
    """Transmit power (W per Hz of allocated band) that meets the deadline.

    p = (N0 / h2) * (2^(L / (tau * B * b)) - 1); the round energy is then
    tau * (b * B) * p.
    """
    b = np.asarray(b, dtype=float)
    h2 = np.asarray(h_squared, dtype=float)
    if np.any(h2 <= 0.0):
        raise ValueError("required_power requires h_squared > 0")
    if np.any(b < params.b_min - 1e-12):
        raise ValueError("required_power requires b >= b_min")
    expo = params.model_bits / (params.deadline_s * params.bandwidth_hz * b)
    with np.errstate(over="ignore"):
        out = params.noise_watt / h2 * np.expm1(LN2 * expo)
    return out if out.ndim else float(out)


def tx_energy(selected, b, h_squared, params: NetworkParams):
    """Round transmission energy in Joules.

    E = (tau * N0 / h2) * f(b * B) when selected, else 0 (b is ignored for
    unselected clients). Selected shares must satisfy b_min <= b <= 1.
    Works elementwise on arrays.
    """
    sel = np.asarray(selected)
    b = np.asarray(b, dtype=float)
    h2 = np.asarray(h_squared, dtype=float)
    if np.any(h2 <= 0.0):
        raise ValueError("tx_energy requires h_squared > 0")
    mask = sel.astype(bool)
    if np.any(mask & ((b < params.b_min - 1e-12) | (b > 1.0 + 1e-12))):
        raise ValueError("tx_energy requires b_min <= b <= 1 for selected clients")
    scale = params.deadline_s * params.noise_watt / h2
    # keep unselected entries out of kernel_f's domain check
    x = np.where(mask, b, params.b_min) * params.bandwidth_hz
    energy = np.where(mask, scale * kernel_f(x, params.beta), 0.0)
    return energy if energy.ndim else float(energy)


def energy_max(params: NetworkParams, h_squared_min: float) -> float:
    """Largest per-round energy any scheduled client can incur.

    Attained at the minimum share (f is decreasing) and the worst admissible
    gain (energy scales with 1/h2): E_max = tx_energy(1, b_min, h2_min).
    """
    if h_squared_min <= 0.0:
        raise ValueError("energy_max requires h_squared_min > 0")
    return tx_energy(1, params.b_min, h_squared_min, params)
