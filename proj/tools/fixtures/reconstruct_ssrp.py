#!/usr/bin/env python3
"""Reconstructs the SSRP correlation-scale fixture from published summaries.

Only rounded summary values (c, d, Q, minimum Bayes factors, sceptical
p-values, replication Bayes factors) are publicly printed, so the underlying
z-values are recovered by a feasibility search: find (z_o, z_r) such that
every displayed column reproduces the published string, then back out (r, n)
pairs on the correlation scale. Sample sizes are fixed per study so that the
variance ratio c = (n_r - 3)/(n_o - 3) matches the published value.

The search maximises the minimum distance to any display-rounding boundary,
which keeps the reconstruction stable against floating-point differences
between this script and the C++ implementation.

Usage: python3 tools/fixtures/reconstruct_ssrp.py [--out data/ssrp.csv]
"""

import argparse
import math

import numpy as np
from scipy.special import lambertw

# ----------------------------------------------------------------------------
# Display conventions (mirror of include/repbayes/format.hpp)
# ----------------------------------------------------------------------------


def _round_half_away(v: float) -> float:
    return math.floor(v + 0.5) if v >= 0 else math.ceil(v - 0.5)


def fmt_fixed(v: float, decimals: int) -> str:
    # printf-style correct rounding of the binary value, mirroring %.*f
    return f"{v:.{decimals}f}"


def _bf_magnitude(x: float) -> str:
    if x < 10.0:
        r = _round_half_away(x * 10.0) / 10.0
        if r < 10.0:
            s = f"{r:.1f}"
            return s[:-2] if s.endswith(".0") else s
    return f"{_round_half_away(x):.0f}"


def format_bf(log_bf, exists=True) -> str:
    if not exists:
        return ""
    if log_bf >= 0.0:
        v = math.exp(log_bf)
        if not v < 1000.0 or _round_half_away(v) >= 1000.0:
            return "> 1000"
        return _bf_magnitude(v)
    x = math.exp(-log_bf)
    if not x < 1000.0 or _round_half_away(x) >= 1000.0:
        return "< 1/1000"
    m = _bf_magnitude(x)
    return "1" if m == "1" else "1/" + m


def format_p(p: float) -> str:
    if p <= 0.0:
        return "< 0.0001"
    if _round_half_away(p * 1e4) / 1e4 < 0.0001:
        return "< 0.0001"
    dec_2sf = 1 - math.floor(math.log10(p))
    cap = 3 if p >= 0.001 else 4
    dec = min(dec_2sf, cap)
    s = fmt_fixed(p, dec)
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s


# ----------------------------------------------------------------------------
# Normal-model mirror (include/repbayes/normal_model.hpp)
# ----------------------------------------------------------------------------

PHI = (1.0 + math.sqrt(5.0)) / 2.0


def gaussian_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def log_min_bf(z):
    az = abs(z)
    return 0.0 if az <= 1.0 else math.log(az) - 0.5 * z * z + 0.5


def invert_min_bf(gamma):
    q = lambertw(-math.exp(2.0 * math.log(gamma) - 1.0), -1).real
    return math.sqrt(-q)


def g_gamma(z_o, gamma):
    zo2 = z_o * z_o
    if zo2 == 0.0 or log_min_bf(z_o) > math.log(gamma):
        return None
    arg = 2.0 * math.log(zo2) / 2.0 - zo2 - 2.0 * math.log(gamma)
    if arg > -1.0:
        return None
    q = lambertw(-math.exp(arg), -1).real
    ratio = -zo2 / q
    return ratio - 1.0 if ratio >= 1.0 else None


def log_bf_0s(z_o, g):
    return 0.5 * math.log1p(g) - 0.5 * (g / (1.0 + g)) * z_o * z_o


def log_bf_sa(z_o, z_r, c, g):
    d = z_r / (z_o * math.sqrt(c))
    ic = 1.0 / c
    return 0.5 * (math.log(ic + 1.0) - math.log(ic + g)) - 0.5 * z_o * z_o * (
        d * d / (ic + g) - (d - 1.0) ** 2 / (ic + 1.0)
    )


def log_replication_bf(z_o, z_r, c):
    shifted = z_r - z_o * math.sqrt(c)
    return 0.5 * math.log1p(c) - 0.5 * (z_r * z_r - shifted * shifted / (1.0 + c))


def sceptical_bf(z_o, z_r, c):
    """Returns (log_bf, exists); scan mirror of the C++ intersection search."""
    g_mb = max(0.0, z_o * z_o - 1.0)
    lmb = log_min_bf(z_o)

    def residual(g):
        return log_bf_sa(z_o, z_r, c, g) - log_bf_0s(z_o, g)

    if g_mb == 0.0:
        return (0.0, True) if residual(0.0) <= 0.0 else (float("nan"), False)
    if residual(g_mb) < 1e-12:
        return (lmb, True)
    g_lo = g_mb * 1e-12
    grid = np.exp(np.linspace(math.log(g_lo), math.log(g_mb), 401))
    res = np.array([residual(g) for g in grid])
    root = None
    for i in range(1, len(grid)):
        if (res[i - 1] <= 0.0) != (res[i] <= 0.0):
            from scipy.optimize import brentq

            root = brentq(residual, grid[i - 1], grid[i], xtol=1e-14)
    if root is None:
        r0 = residual(0.0)
        if (r0 <= 0.0) != (res[0] <= 0.0):
            from scipy.optimize import brentq

            root = brentq(residual, 0.0, g_lo, xtol=1e-16)
    if root is None:
        return (float("nan"), False)
    return (log_bf_0s(z_o, root), True)


def min_scan_residual(z_o, z_r, c):
    g_mb = max(0.0, z_o * z_o - 1.0)
    if g_mb == 0.0:
        return log_replication_bf(z_o, z_r, c)
    grid = np.exp(np.linspace(math.log(g_mb * 1e-12), math.log(g_mb), 401))
    return min(log_bf_sa(z_o, z_r, c, g) - log_bf_0s(z_o, g) for g in grid)


def sceptical_p_tilde(z_o, z_r, c):
    zo2, zr2 = z_o * z_o, z_r * z_r
    zh2 = 2.0 / (1.0 / zo2 + 1.0 / zr2)
    if abs(c - 1.0) < 1e-9:
        zs2 = 0.5 * zh2
    else:
        za2 = 0.5 * (zo2 + zr2)
        zs2 = (math.sqrt(za2 * (za2 + (c - 1.0) * zh2)) - za2) / (c - 1.0)
    zs = math.sqrt(zs2) * math.sqrt(PHI)
    return gaussian_cdf(-zs) if z_o * z_r > 0.0 else gaussian_cdf(zs)


def q_stat(z_o, z_r, c):
    d = z_r / (z_o * math.sqrt(c))
    return z_o * z_o * (d - 1.0) ** 2 / (1.0 / c + 1.0)


# ----------------------------------------------------------------------------
# Published table rows
# ----------------------------------------------------------------------------

# study, (n_o, n_r), c, d, Q, minBF_o, minBF_r, p~S, BF_S, BF_R
ROWS = [
    ("Hauser et al. (2014)", (105, 55), "0.51", "1.04", "0.03", "< 1/1000", "< 1/1000", "< 0.0001", "< 1/1000", "< 1/1000"),
    ("Aviezer et al. (2012)", (15, 14), "0.92", "0.60", "3.49", "< 1/1000", "1/347", "< 0.0001", "1/78", "1/284"),
    ("Wilson et al. (2014)", (30, 39), "1.33", "0.83", "0.28", "< 1/1000", "1/659", "0.0001", "1/45", "< 1/1000"),
    ("Derex et al. (2013)", (52, 66), "1.29", "0.65", "1.14", "1/520", "1/17", "0.002", "1/8.5", "1/31"),
    ("Gneezy et al. (2014)", (103, 234), "2.31", "0.81", "0.22", "1/18", "1/157", "0.004", "1/6.9", "1/474"),
    ("Karpicke and Blunt (2011)", (40, 49), "1.24", "0.58", "1.75", "< 1/1000", "1/9.6", "0.002", "1/5.6", "1/12"),
    ("Morewedge et al. (2010)", (35, 98), "2.97", "0.76", "0.30", "1/7.3", "1/65", "0.011", "1/3.9", "1/160"),
    ("Kovacs et al. (2010)", (24, 95), "4.38", "1.38", "0.59", "1/3.2", "< 1/1000", "0.009", "1/3.2", "< 1/1000"),
    ("Duncan et al. (2012)", (53, 374), "7.42", "0.57", "1.29", "1/12", "< 1/1000", "0.011", "1/3.1", "< 1/1000"),
    ("Nishi et al. (2015)", (103, 245), "2.42", "0.57", "1.05", "1/12", "1/6.1", "0.016", "1/2.5", "1/8.2"),
    ("Janssen et al. (2010)", (63, 42), "0.65", "0.48", "3.51", "< 1/1000", "1/3.3", "0.003", "1/1.6", "1/1.6"),
    ("Balafoutas and Sutter (2012)", (72, 243), "3.48", "0.52", "1.02", "1/4.2", "1/3.6", "0.04", "1/1.6", "1/3.9"),
    ("Pyc and Rawson (2010)", (36, 306), "9.18", "0.38", "1.79", "1/3.5", "1/7.3", "0.061", "1/1.2", "1/4"),
    ("Rand et al. (2012)", (343, 2136), "6.27", "0.18", "3.96", "1/7.1", "1", "0.13", "", "9.6"),
    ("Ackerman et al. (2010)", (54, 599), "11.69", "0.23", "2.15", "1/2.2", "1/1.3", "0.15", "", "3.2"),
    ("Sparrow et al. (2011)", (69, 234), "3.50", "0.13", "5.80", "1/26", "1", "0.19", "", "29"),
    ("Shah et al. (2012)", (56, 619), "11.62", "-0.05", "4.08", "1/2.2", "1", "0.66", "", "25"),
    ("Kidd and Castano (2013)", (86, 714), "8.57", "-0.10", "6.83", "1/5.7", "1", "0.77", "", "72"),
    ("Gervais and Norenzayan (2012)", (57, 531), "9.78", "-0.12", "5.44", "1/3", "1", "0.78", "", "36"),
    ("Lee and Schwarz (2010)", (40, 286), "7.65", "-0.11", "6.80", "1/5.4", "1", "0.79", "", "65"),
    ("Ramirez and Beilock (2011)", (20, 79), "4.47", "-0.09", "19.29", "< 1/1000", "1", "0.85", "", "> 1000"),
]


# ----------------------------------------------------------------------------
# Feasibility search
# ----------------------------------------------------------------------------


def margin_of(value, fmt, target, safety):
    """Distance from value to the nearest formatting boundary in units of the
    absolute safety scale, capped at 1; <= 0 when the target string is not
    met. A margin of 1 means the value sits at least one safety unit away
    from every display-rounding edge."""
    if fmt(value) != target:
        return -1.0

    cap = 1000.0 * safety

    def edge(direction):
        h = safety * 1e-6
        while h < cap and fmt(value + direction * h) == target:
            h *= 2.0
        if h >= cap:
            return cap
        lo, hi = h / 2.0, h
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if fmt(value + direction * mid) == target:
                lo = mid
            else:
                hi = mid
        return lo

    return min(1.0, min(edge(-1.0), edge(1.0)) / safety)


def row_margin(z_o, z_r, c, row, with_bfs=True):
    _, _, c_s, d_s, q_s, mbo_s, mbr_s, p_s, bfs_s, bfr_s = row
    d = z_r / (z_o * math.sqrt(c))
    checks = []
    checks.append(margin_of(d, lambda v: fmt_fixed(v, 2), d_s, 5e-4))
    checks.append(margin_of(q_stat(z_o, z_r, c), lambda v: fmt_fixed(v, 2), q_s, 5e-4))
    checks.append(margin_of(log_min_bf(z_o), format_bf, mbo_s, 3e-4))
    checks.append(margin_of(log_min_bf(z_r), format_bf, mbr_s, 3e-4))
    checks.append(margin_of(sceptical_p_tilde(z_o, z_r, c), format_p, p_s, 2e-5))
    checks.append(margin_of(log_replication_bf(z_o, z_r, c), format_bf, bfr_s, 3e-4))
    m = min(checks)
    if m <= 0.0 or not with_bfs:
        return m
    if bfs_s == "":
        slack = min_scan_residual(z_o, z_r, c)
        checks.append(min(1.0, slack / 0.02) if slack > 1e-9 else -1.0)
    else:
        lb, exists = sceptical_bf(z_o, z_r, c)
        if not exists:
            checks.append(-1.0)
        else:
            checks.append(margin_of(lb, format_bf, bfs_s, 3e-4))
    return min(checks)


def bf_bin_z(target):
    """z interval (z > 1) reproducing the printed minimum Bayes factor."""
    x = float(target[2:]) if target.startswith("1/") else float(target)
    if x < 10.0:
        lo_x, hi_x = x - 0.05, x + 0.05
    else:
        lo_x, hi_x = x - 0.5, x + 0.5
    # smaller BF (larger x) <-> larger z
    z_lo = invert_min_bf(1.0 / lo_x)
    z_hi = invert_min_bf(1.0 / hi_x)
    return min(z_lo, z_hi), max(z_lo, z_hi)


def candidate_pairs(row, c):
    """(z_o, z_r) candidates honouring the tight display bins."""
    _, _, _, d_s, q_s, mbo_s, mbr_s, *_ = row
    d_mid = float(d_s)
    d_bin = np.linspace(d_mid - 0.00495, d_mid + 0.00495, 41)
    sq_c = math.sqrt(c)
    out = []
    n = 41
    shrink = 0.98  # stay off the exact bin edges
    if mbo_s.startswith("1/") and mbr_s.startswith("1/"):
        zo_lo, zo_hi = bf_bin_z(mbo_s)
        zr_lo, zr_hi = bf_bin_z(mbr_s)
        for zo in np.linspace(*_shrink(zo_lo, zo_hi, shrink), n):
            for zr in np.linspace(*_shrink(zr_lo, zr_hi, shrink), n):
                out.append((zo, math.copysign(zr, d_mid)))
    elif mbr_s.startswith("1/"):  # z_r pinned, z_o via d
        zr_lo, zr_hi = bf_bin_z(mbr_s)
        for zr in np.linspace(*_shrink(zr_lo, zr_hi, shrink), n):
            for d in d_bin:
                out.append((zr / (abs(d) * sq_c), math.copysign(zr, d_mid)))
    elif mbo_s.startswith("1/"):  # z_o pinned, z_r via d
        zo_lo, zo_hi = bf_bin_z(mbo_s)
        for zo in np.linspace(*_shrink(zo_lo, zo_hi, shrink), n):
            for d in d_bin:
                out.append((zo, d * zo * sq_c))
    else:  # both unbounded: use the d and Q bins
        q_mid = float(q_s)
        for q in np.linspace(q_mid - 0.00495, q_mid + 0.00495, n):
            for d in d_bin:
                zo = math.sqrt(q * (1.0 / c + 1.0)) / abs(d - 1.0)
                out.append((zo, d * zo * sq_c))
    return out


def _shrink(lo, hi, f):
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return mid - f * half, mid + f * half


def sample_size_candidates(row):
    """(n_o, n_r) pairs whose c lands in the printed bin, seed first."""
    name, seed, c_s, *_ = row
    target = float(c_s)
    pairs = [seed]
    for n_o in list(range(12, 400, 1)):
        n_r = round(3 + target * (n_o - 3))
        for nr in (n_r, n_r + 1, n_r - 1):
            if nr < 4:
                continue
            c = (nr - 3.0) / (n_o - 3.0)
            if fmt_fixed(c, 2) == c_s and (n_o, nr) not in pairs:
                pairs.append((n_o, nr))
    return pairs


def search_row(row):
    for n_o, n_r in sample_size_candidates(row)[:40]:
        c = (n_r - 3.0) / (n_o - 3.0)
        if fmt_fixed(c, 2) != row[2]:
            continue
        best = None
        for zo, zr in candidate_pairs(row, c):
            m = row_margin(zo, zr, c, row, with_bfs=False)
            if m <= 0.0:
                continue
            if best is not None and m <= best[0]:
                continue
            m = row_margin(zo, zr, c, row, with_bfs=True)
            if m > 0.0 and (best is None or m > best[0]):
                best = (m, zo, zr)
        if best is not None and best[0] > 0.05:
            return best, (n_o, n_r), c
    raise SystemExit(f"{row[0]}: no feasible reconstruction found")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/ssrp.csv")
    args = ap.parse_args()

    lines = [
        "# Social Sciences Replication Project study pairs on the correlation scale.",
        "# Reconstructed from published summary statistics: the underlying z-values",
        "# were recovered so that every displayed column of the published results",
        "# table reproduces exactly; sample sizes match the published variance",
        "# ratios. Tag: reconstructed, not the raw study data.",
        "id,r_o,n_o,r_r,n_r",
    ]
    for row in ROWS:
        (m, z_o, z_r), (n_o, n_r), c = search_row(row)
        r_o = math.tanh(z_o / math.sqrt(n_o - 3.0))
        r_r = math.tanh(z_r / math.sqrt(n_r - 3.0))
        # verify after the 8-decimal rounding used in the file
        r_o8, r_r8 = round(r_o, 8), round(r_r, 8)
        z_o8 = math.atanh(r_o8) * math.sqrt(n_o - 3.0)
        z_r8 = math.atanh(r_r8) * math.sqrt(n_r - 3.0)
        m8 = row_margin(z_o8, z_r8, c, row)
        print(f"{row[0]:34s} n=({n_o},{n_r}) margin={m:.3f} rounded={m8:.3f} "
              f"z_o={z_o8:.4f} z_r={z_r8:.4f}")
        if m8 <= 0.0:
            raise SystemExit(f"{row[0]}: rounding to 8 decimals broke feasibility")
        lines.append(f"{row[0]},{r_o8:.8f},{n_o},{r_r8:.8f},{n_r}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
