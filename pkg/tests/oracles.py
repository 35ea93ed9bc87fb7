"""Independent reference computations used by several test modules."""

import math


def statz_scalar(beta, u_t, lam, alpha, u_gs, u_ds):
    if u_gs <= u_t:
        return 0.0
    return beta * (u_gs - u_t) ** 2 * (1 + lam * u_ds) * math.tanh(alpha * u_ds)


def self_bias_bisection(beta, u_t, lam, alpha, supply, r_s, r_d, tol=1e-16):
    """Drain current of a grounded-gate FET with source resistor r_s and drain feed r_d.

    Solves i = I_d(-i r_s, supply - i (r_s + r_d)) by bisection on i; the
    right side decreases in i while the left increases, so the root is unique.
    Returns (i, v_source, v_drain).
    """
    lo, hi = 0.0, supply / (r_s + r_d)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        f = statz_scalar(beta, u_t, lam, alpha, -mid * r_s, supply - mid * (r_s + r_d)) - mid
        if f > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    i = 0.5 * (lo + hi)
    return i, i * r_s, supply - i * r_d


def self_bias_netlist(supply, r_s, r_d, beta=0.08, u_t=-0.46, lam=0.0, alpha=2.0):
    drain = "vdd" if r_d == 0 else "d"
    lines = [
        f".model M STATZ beta={beta!r} vto={u_t!r} lambda={lam!r} alpha={alpha!r} cin=0 rin=1e9",
        f"V1 vdd 0 DC {supply!r}",
        f"J1 {drain} 0 s M",
        f"RS s 0 {r_s!r}",
    ]
    if r_d:
        lines.append(f"RD vdd d {r_d!r}")
    return "\n".join(lines)
