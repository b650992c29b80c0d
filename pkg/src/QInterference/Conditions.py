import itertools
import logging
import math
import numpy as np
import pandas as pd
from QInterference import Entropy

logger = logging.getLogger(__name__)

HOLD_TOL = 1e-9


class ConditionReport:
    def __init__(self, mode, holds, min_slack, argmin, grid_step, refined, method, evaluated):
        """Outcome of a numerical interference-condition check.
        holds is min_slack >= -1e-9; argmin is the pair of input distributions (p1, p2) reaching min_slack.
        The check certifies the condition only up to the resolution of the search recorded in method, grid_step
        and refined."""
        self.mode = mode
        self.holds = holds
        self.min_slack = min_slack
        self.argmin = argmin
        self.grid_step = grid_step
        self.refined = refined
        self.method = method
        self.evaluated = evaluated

    def to_dict(self):
        return {
            "mode": self.mode,
            "holds": bool(self.holds),
            "min_slack": float(self.min_slack),
            "argmin": [[float(x) for x in p] for p in self.argmin],
            "grid_step": self.grid_step,
            "refined": self.refined,
            "method": self.method,
            "evaluated": int(self.evaluated),
        }

    def __repr__(self):
        return "ConditionReport(" + self.mode + ", holds=" + str(self.holds) + ", min_slack=" \
            + repr(self.min_slack) + ")"


def _informations(ch, P1, P2):
    e1 = Entropy.product_grid_entropies(ch.reduced_states(1), P1, P2)
    e2 = Entropy.product_grid_entropies(ch.reduced_states(2), P1, P2)
    return {
        "I(X1;B1|X2)": e1["H|2"] - e1["H|12"],
        "I(X2;B1|X1)": e1["H|1"] - e1["H|12"],
        "I(X2;B1)": e1["H"] - e1["H|2"],
        "I(X2;B2|X1)": e2["H|1"] - e2["H|12"],
        "I(X1;B2|X2)": e2["H|2"] - e2["H|12"],
        "I(X1;B2)": e2["H"] - e2["H|1"],
    }


def very_strong_slack(ch, P1, P2):
    """min of I(X1;B2) - I(X1;B1|X2) and I(X2;B1) - I(X2;B2|X1) over a (G1, G2) grid of product inputs."""
    i = _informations(ch, P1, P2)
    return np.minimum(i["I(X1;B2)"] - i["I(X1;B1|X2)"], i["I(X2;B1)"] - i["I(X2;B2|X1)"])


def strong_slack(ch, P1, P2):
    """min of I(X1;B2|X2) - I(X1;B1|X2) and I(X2;B1|X1) - I(X2;B2|X1) over a (G1, G2) grid of product inputs."""
    i = _informations(ch, P1, P2)
    return np.minimum(i["I(X1;B2|X2)"] - i["I(X1;B1|X2)"], i["I(X2;B1|X1)"] - i["I(X2;B2|X1)"])


SLACKS = {"very-strong": very_strong_slack, "strong": strong_slack}


def check_very_strong(ch, grid_step=0.02, refine=True, samples=10000, seed=0):
    return check_condition(ch, "very-strong", grid_step, refine, samples, seed)


def check_strong(ch, grid_step=0.02, refine=True, samples=10000, seed=0):
    return check_condition(ch, "strong", grid_step, refine, samples, seed)


def check_condition(ch, mode, grid_step=0.02, refine=True, samples=10000, seed=0):
    """Searches all product input distributions for the smallest slack of the chosen condition.
    Binary senders are gridded at grid_step, then the grid minimum is refined on a step/10 grid within one step
    of it. Larger alphabets use every two-symbol edge of the simplex on the same grid plus about samples
    Dirichlet pairs (sqrt(samples) draws per sender, all pairs taken)."""
    if mode not in SLACKS:
        raise ValueError("Unknown interference condition " + str(mode))
    if not 0 < grid_step <= 0.5:
        raise ValueError("grid_step must lie in (0, 0.5], got " + str(grid_step))
    slack_fn = SLACKS[mode]
    binary = all(a == 2 for a in ch.alphabets)

    if binary:
        P1 = _binary_rows(_line(grid_step))
        P2 = P1
        method = "grid"
    else:
        rng = np.random.default_rng(seed)
        draws = int(math.ceil(math.sqrt(samples)))
        P1 = np.vstack([_edge_grid(ch.alphabets[0], grid_step), rng.dirichlet(np.ones(ch.alphabets[0]), draws)])
        P2 = np.vstack([_edge_grid(ch.alphabets[1], grid_step), rng.dirichlet(np.ones(ch.alphabets[1]), draws)])
        method = "grid+dirichlet"

    slack = slack_fn(ch, P1, P2)
    evaluated = slack.size
    g, h = np.unravel_index(int(np.argmin(slack)), slack.shape)
    best = float(slack[g, h])
    argmin = (P1[g], P2[h])

    refined = False
    if refine and binary:
        fine = grid_step / 10
        Q1 = _binary_rows(_window(P1[g][0], grid_step, fine))
        Q2 = _binary_rows(_window(P2[h][0], grid_step, fine))
        local = slack_fn(ch, Q1, Q2)
        evaluated += local.size
        k, m = np.unravel_index(int(np.argmin(local)), local.shape)
        if local[k, m] < best:
            best = float(local[k, m])
            argmin = (Q1[k], Q2[m])
        refined = True

    report = ConditionReport(mode, best >= -HOLD_TOL, best, argmin, grid_step, refined, method, evaluated)
    logger.info("%s check on %r: %r after %d distributions", mode, ch, report, evaluated)
    return report


def _line(step):
    return np.unique(np.round(np.append(np.arange(0.0, 1.0, step), 1.0), 12))


def _window(center, width, step):
    n = int(round(width / step))
    pts = np.round(center + np.arange(-n, n + 1) * step, 12)
    pts = pts[(pts >= -1e-12) & (pts <= 1 + 1e-12)]
    return np.clip(np.unique(pts), 0.0, 1.0)


def _binary_rows(p0):
    return np.stack([p0, 1.0 - p0], axis=1)


def _edge_grid(size, step):
    rows = []
    for i, j in itertools.combinations(range(size), 2):
        for p in _line(step):
            row = np.zeros(size)
            row[i] = p
            row[j] = 1.0 - p
            rows.append(row)
    if not rows:
        rows.append(np.ones(size))
    return np.unique(np.array(rows), axis=0)


def theta_swap_entropies(theta, p1, p2):
    """Closed-form output entropies of the theta-SWAP channel for inputs with P(X1 = 0) = p1, P(X2 = 0) = p2.
    Returns H(B1|X1X2), H(B1), H(B2), H(B2|X1), H(B1|X2), H(B2|X1X2) in that order. Every output state is
    diagonal in the computational basis, so each entropy is a binary entropy."""
    for name, p in (("p1", p1), ("p2", p2)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(name + " must lie in [0, 1], got " + str(p))
    h2 = Entropy.binary_entropy
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    q1 = 1.0 - p1
    q2 = 1.0 - p2
    mixed = p1 * q2 + q1 * p2
    return (
        mixed * h2(c2),
        h2(_unit(p1 * p2 + p1 * q2 * c2 + q1 * p2 * s2)),
        h2(_unit(p1 * p2 + p1 * q2 * s2 + q1 * p2 * c2)),
        p1 * h2(_unit(p2 + q2 * s2)) + q1 * h2(_unit(p2 * c2)),
        p2 * h2(_unit(p1 + q1 * s2)) + q2 * h2(_unit(p1 * c2)),
        mixed * h2(c2),
    )


def _unit(p):
    return min(1.0, max(0.0, p))


THETA_ENTROPY_LABELS = ("H(B1|X1X2)", "H(B1)", "H(B2)", "H(B2|X1)", "H(B1|X2)", "H(B2|X1X2)")


def theta_scan(thetas, channel_fn, mode="very-strong", grid_step=0.02, refine=True):
    """Condition check for every theta; channel_fn(theta) builds the channel. Returns a frame with columns
    theta, holds, min_slack."""
    rows = []
    for theta in thetas:
        report = check_condition(channel_fn(theta), mode, grid_step, refine)
        rows.append({"theta": float(theta), "holds": bool(report.holds), "min_slack": report.min_slack})
    return pd.DataFrame(rows, columns=["theta", "holds", "min_slack"])


def crossings(scan):
    """Interval ends of a theta scan: the first theta of every run where the condition holds, and the last theta
    of that run. Returns a list of (theta, "enter" | "leave")."""
    out = []
    holds = list(scan["holds"])
    thetas = list(scan["theta"])
    for k in range(len(holds)):
        if holds[k] and (k == 0 or not holds[k - 1]):
            out.append((thetas[k], "enter"))
        if holds[k] and (k == len(holds) - 1 or not holds[k + 1]):
            out.append((thetas[k], "leave"))
    return out
