import itertools
import logging
import math
import numpy as np
from QInterference import Channels
from QInterference import Conditions
from QInterference import DistSampler
from QInterference import Entropy
from QInterference import Errors
from QInterference import Geometry
from QInterference import Parallel
from QInterference.Channels import HkInput

logger = logging.getLogger(__name__)

COMMUTE_TOL = 1e-9
RATE_VARS = ["R1", "R2"]


class RatePoint:
    def __init__(self, label, r1, r2):
        """Achievable rate pair in bits per channel use. Round-off below -1e-9 is clipped to 0."""
        if r1 < -Geometry.CONTAINS_TOL or r2 < -Geometry.CONTAINS_TOL:
            raise ValueError("Rate point " + str(label) + " has a negative rate (" + str(r1) + ", " + str(r2) + ")")
        self.label = label
        self.r1 = max(float(r1), 0.0)
        self.r2 = max(float(r2), 0.0)

    @property
    def coords(self):
        return self.r1, self.r2

    def to_dict(self):
        return {"label": self.label, "R1": self.r1, "R2": self.r2}

    def __repr__(self):
        return "RatePoint(" + str(self.label) + ", " + repr(self.r1) + ", " + repr(self.r2) + ")"


def pentagon(r1_max, r2_max, sum_max):
    return Geometry.HalfspaceSystem(RATE_VARS, [((1, 0), r1_max), ((0, 1), r2_max), ((1, 1), sum_max)])


def mac2_system(mac, p1, p2):
    """R1 <= I(X;B|Y), R2 <= I(Y;B|X), R1 + R2 <= I(XY;B) for the two-sender MAC at inputs p1, p2."""
    x, y = mac.names
    ens = mac.ensemble(p1, p2)
    return pentagon(Entropy.mutual_info(ens, x, [y]), Entropy.mutual_info(ens, y, [x]),
                    Entropy.mutual_info(ens, [x, y]))


def mac2_corner_points(mac, p1, p2):
    """The two successive-decoding corners of the two-sender MAC: decode X first, then Y with X known, and the
    reverse order."""
    x, y = mac.names
    ens = mac.ensemble(p1, p2)
    return [
        RatePoint(x + " first", Entropy.mutual_info(ens, x), Entropy.mutual_info(ens, y, [x])),
        RatePoint(y + " first", Entropy.mutual_info(ens, x, [y]), Entropy.mutual_info(ens, y)),
    ]


MAC3_ROWS = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)]


def mac3_system(mac, pX, pY, pZ):
    """The seven rows R_S <= I(S;B|complement of S) of the three-sender MAC, in the order R1, R2, R3, R1+R2,
    R2+R3, R1+R3, R1+R2+R3."""
    ens = mac.ensemble(pX, pY, pZ)
    names = list(mac.names)
    rows = []
    for coeffs in MAC3_ROWS:
        subject = [n for n, c in zip(names, coeffs) if c]
        cond = [n for n, c in zip(names, coeffs) if not c]
        rows.append((coeffs, Entropy.mutual_info(ens, subject, cond)))
    return Geometry.HalfspaceSystem(["R1", "R2", "R3"], rows)


def minentropy3_system(mac, pX, pY, pZ, perm=None):
    """Three-sender region with min-entropy bounds:
    R_X <= Hmin(B|ZY) - H(B|XYZ), R_Y <= Hmin(B|XZ) - H(B|XYZ), R_Z <= I(Z;B|XY),
    R_X + R_Y <= Hmin(B|Z) - H(B|XYZ), R_Y + R_Z <= Hmin(B|X) - H(B|XYZ), R_X + R_Z <= I(XZ;B|Y),
    R_X + R_Y + R_Z <= I(XYZ;B).
    perm names the registers playing the roles X, Y, Z (default the channel order); rows keep this order and
    their coefficients land on the rate of the register in each role. Min-entropy rows may be negative."""
    names = list(mac.names)
    perm = names if perm is None else list(perm)
    if sorted(perm) != sorted(names):
        raise ValueError("perm must be a permutation of " + str(names) + ", got " + str(perm))
    x, y, z = perm
    ens = mac.ensemble(pX, pY, pZ)
    h_all = Entropy.cond_entropy(ens, names)

    def coeffs(*roles):
        return tuple(1 if n in roles else 0 for n in names)

    rows = [
        (coeffs(x), Entropy.cond_min_entropy(ens, [z, y]) - h_all),
        (coeffs(y), Entropy.cond_min_entropy(ens, [x, z]) - h_all),
        (coeffs(z), Entropy.mutual_info(ens, [z], [x, y])),
        (coeffs(x, y), Entropy.cond_min_entropy(ens, [z]) - h_all),
        (coeffs(y, z), Entropy.cond_min_entropy(ens, [x]) - h_all),
        (coeffs(x, z), Entropy.mutual_info(ens, [x, z], [y])),
        (coeffs(x, y, z), Entropy.mutual_info(ens, [x, y, z])),
    ]
    return Geometry.HalfspaceSystem(["R1", "R2", "R3"], rows)


def commuting_case_system(mac, pX, pY, pZ, tol=COMMUTE_TOL):
    """Conjectured seven-row region, returned only when the pairwise averaged states commute:
    [rho_xz, rho_yz] = [rho_xy, rho_yz] = [rho_xy, rho_xz] = 0 for all x, y, z. Otherwise PreconditionError."""
    ens = mac.ensemble(pX, pY, pZ)
    x, y, z = mac.names
    rho_xy = ens.averaged_states([x, y])[0]
    rho_xz = ens.averaged_states([x, z])[0]
    rho_yz = ens.averaged_states([y, z])[0]
    worst = max(
        _max_commutator(rho_xz[:, None, :], rho_yz[None, :, :]),
        _max_commutator(rho_xy[:, :, None], rho_yz[None, :, :]),
        _max_commutator(rho_xy[:, :, None], rho_xz[:, None, :]),
    )
    if worst > tol:
        raise Errors.PreconditionError("Averaged output states do not commute (largest commutator "
                                       + repr(worst) + ")")
    return mac3_system(mac, pX, pY, pZ)


def _max_commutator(a, b):
    # a, b broadcast over (x, y, z)
    comm = a @ b - b @ a
    return float(np.max(np.abs(comm)))


def channel_terms(ch, p1, p2):
    """Every single-letter information quantity of an interference channel the region builders use, keyed
    "I(X1;B1|X2)" and the like; "I(X1X2;B1B2)" uses the joint output."""
    e1 = ch.ensemble(p1, p2, receiver=1)
    e2 = ch.ensemble(p1, p2, receiver=2)
    joint = ch.ensemble(p1, p2)
    mi = Entropy.mutual_info
    return {
        "I(X1;B1|X2)": mi(e1, "X1", ["X2"]),
        "I(X2;B1|X1)": mi(e1, "X2", ["X1"]),
        "I(X1;B1)": mi(e1, "X1"),
        "I(X2;B1)": mi(e1, "X2"),
        "I(X1X2;B1)": mi(e1, ["X1", "X2"]),
        "I(X1;B2|X2)": mi(e2, "X1", ["X2"]),
        "I(X2;B2|X1)": mi(e2, "X2", ["X1"]),
        "I(X1;B2)": mi(e2, "X1"),
        "I(X2;B2)": mi(e2, "X2"),
        "I(X1X2;B2)": mi(e2, ["X1", "X2"]),
        "I(X1X2;B1B2)": mi(joint, ["X1", "X2"]),
    }


def _union(ch, sampler, build, label):
    samples = sampler.samples(ch.alphabets)
    regions = Parallel.pmap(lambda p: build(p[0], p[1]), samples)
    meta = {"region": label, "sampler": sampler.describe(), "samples": len(samples), "time_sharing": "hull"}
    logger.debug("%s: hull over %d distributions", label, len(samples))
    return Geometry.union_hull(regions, meta)


def sim_inner_bound(ch, sampler):
    """Hull over sampled inputs of the intersection of the two receivers' MAC pentagons (simultaneous decoding
    of both messages at both receivers)."""
    mac1 = Channels.induced_mac(ch, 1)
    mac2 = Channels.induced_mac(ch, 2)

    def build(p1, p2):
        return Geometry.intersect(Geometry.to_region2d(mac2_system(mac1, p1, p2)),
                                  Geometry.to_region2d(mac2_system(mac2, p1, p2)))

    return _union(ch, sampler, build, "sim-inner")


def vsi_capacity(ch, sampler, report=None, grid_step=0.02):
    """Capacity region under very strong interference: hull of the rectangles [0, I(X1;B1|X2)] x [0, I(X2;B2|X1)].
    Raises PreconditionError (carrying the report) if the channel fails the very strong condition."""
    if report is None:
        report = Conditions.check_very_strong(ch, grid_step)
    if not report.holds:
        raise Errors.PreconditionError("Channel does not satisfy very strong interference (min slack "
                                       + repr(report.min_slack) + ")", report)

    def build(p1, p2):
        t = channel_terms(ch, p1, p2)
        return Geometry.RateRegion2D.from_points([(t["I(X1;B1|X2)"], t["I(X2;B2|X1)"])])

    region = _union(ch, sampler, build, "vsi")
    region.metadata["condition"] = report.to_dict()
    return region


def strong_capacity(ch, sampler, report=None, grid_step=0.02):
    """Capacity region under strong interference: hull of the pentagons R1 <= I(X1;B1|X2), R2 <= I(X2;B2|X1),
    R1 + R2 <= min(I(X1X2;B1), I(X1X2;B2))."""
    if report is None:
        report = Conditions.check_strong(ch, grid_step)
    if not report.holds:
        raise Errors.PreconditionError("Channel does not satisfy strong interference (min slack "
                                       + repr(report.min_slack) + ")", report)

    def build(p1, p2):
        t = channel_terms(ch, p1, p2)
        return Geometry.to_region2d(pentagon(t["I(X1;B1|X2)"], t["I(X2;B2|X1)"],
                                             min(t["I(X1X2;B1)"], t["I(X1X2;B2)"])))

    region = _union(ch, sampler, build, "strong")
    region.metadata["condition"] = report.to_dict()
    return region


def sato_outer(ch, sampler):
    """Outer bound: hull of R1 <= I(X1;B1|X2), R2 <= I(X2;B2|X1), R1 + R2 <= I(X1X2;B1B2) on the joint output."""

    def build(p1, p2):
        t = channel_terms(ch, p1, p2)
        return Geometry.to_region2d(pentagon(t["I(X1;B1|X2)"], t["I(X2;B2|X1)"], t["I(X1X2;B1B2)"]))

    return _union(ch, sampler, build, "sato")


def _sd_from_terms(t):
    return [
        RatePoint("P1", t["I(X1;B1|X2)"], min(t["I(X2;B1)"], t["I(X2;B2)"])),
        RatePoint("P2", min(t["I(X1;B1|X2)"], t["I(X1;B2)"]), min(t["I(X2;B1)"], t["I(X2;B2|X1)"])),
        RatePoint("P3", min(t["I(X1;B1)"], t["I(X1;B2)"]), t["I(X2;B2|X1)"]),
        RatePoint("P4", t["I(X1;B1)"], t["I(X2;B2)"]),
    ]


def sd_points(ch, p1, p2):
    """The four successive-decoding rate points, one per pair of decoding orders at the two receivers."""
    return _sd_from_terms(channel_terms(ch, p1, p2))


# HK rows: (coefficients over S1, T1, S2, T2, receiver, subject streams, conditioning streams)
HK_VARS = ["S1", "T1", "S2", "T2"]
HK_ROWS = [
    ((1, 0, 0, 0), 1, ["U1"], ["W1", "W2"]),
    ((0, 1, 0, 0), 1, ["W1"], ["U1", "W2"]),
    ((0, 0, 0, 1), 1, ["W2"], ["U1", "W1"]),
    ((1, 1, 0, 0), 1, ["U1", "W1"], ["W2"]),
    ((1, 0, 0, 1), 1, ["U1", "W2"], ["W1"]),
    ((0, 1, 0, 1), 1, ["W1", "W2"], ["U1"]),
    ((1, 1, 0, 1), 1, ["U1", "W1", "W2"], []),
    ((0, 0, 1, 0), 2, ["U2"], ["W1", "W2"]),
    ((0, 1, 0, 0), 2, ["W1"], ["U2", "W2"]),
    ((0, 0, 0, 1), 2, ["W2"], ["U2", "W1"]),
    ((0, 1, 1, 0), 2, ["U2", "W1"], ["W2"]),
    ((0, 0, 1, 1), 2, ["U2", "W2"], ["W1"]),
    ((0, 1, 0, 1), 2, ["W1", "W2"], ["U2"]),
    ((0, 1, 1, 1), 2, ["U2", "W1", "W2"], []),
]


def hk_system(mi):
    """The fourteen Han-Kobayashi rows over (S1, T1, S2, T2). mi(receiver, subject, conditioning) evaluates
    I(subject; B_receiver | conditioning) over the streams U1, W1, U2, W2."""
    rows = [(coeffs, mi(rx, subject, cond)) for coeffs, rx, subject, cond in HK_ROWS]
    return Geometry.HalfspaceSystem(HK_VARS, rows)


def project_hk(sys, metadata=None):
    """Rate pairs (S1 + T1, S2 + T2): substitute S_i = R_i - T_i and eliminate T1, T2."""
    sys = sys.substitute("S1", {"R1": 1.0, "T1": -1.0})
    sys = sys.substitute("S2", {"R2": 1.0, "T2": -1.0})
    sys = Geometry.fm_eliminate(sys, "T1")
    sys = Geometry.fm_eliminate(sys, "T2")
    order = [sys.index_of("R1"), sys.index_of("R2")]
    sys = Geometry.HalfspaceSystem(RATE_VARS, zip(sys.A[:, order], sys.b))
    return Geometry.to_region2d(sys, metadata)


def hk_ensembles(ch, hk):
    """cq ensembles over registers U1, W1, U2, W2 with output B1 and B2, where the channel input is
    (f1(u1, w1), f2(u2, w2))."""
    hk.check_alphabets(ch.alphabets)
    f1 = hk.f[0][:, :, None, None]
    f2 = hk.f[1][None, None, :, :]
    registers = [("U1", hk.pu[0].size, hk.pu[0]), ("W1", hk.pw[0].size, hk.pw[0]),
                 ("U2", hk.pu[1].size, hk.pu[1]), ("W2", hk.pw[1].size, hk.pw[1])]
    out = {}
    for rx in (1, 2):
        states = ch.reduced_states(rx)[f1, f2]
        out[rx] = Entropy.CqEnsemble(registers, states, check=False)
    return out


def hk_region(ch, hk):
    ens = hk_ensembles(ch, hk)

    def mi(rx, subject, cond):
        return Entropy.mutual_info(ens[rx], subject, cond)

    return project_hk(hk_system(mi))


def hk_inputs(ch, sampler, random_inputs=4, seed=0):
    """For every sampled (p1, p2): the four pure splits plus random_inputs random splits."""
    out = []
    for k, (p1, p2) in enumerate(sampler.samples(ch.alphabets)):
        out.extend(HkInput.pure_splits(p1, p2))
        rng = np.random.default_rng([seed, k])
        out.extend(HkInput.random(ch.alphabets, rng) for _ in range(random_inputs))
    return out


def hk_inner_bound(ch, sampler, random_inputs=4, seed=0):
    """Hull of hk_region over hk_inputs(ch, sampler, random_inputs, seed)."""
    inputs = hk_inputs(ch, sampler, random_inputs, seed)
    regions = Parallel.pmap(lambda hk: hk_region(ch, hk), inputs)
    meta = {"region": "hk", "sampler": sampler.describe(), "random_inputs": random_inputs, "seed": seed,
            "hk_inputs": len(inputs), "time_sharing": "hull"}
    return Geometry.union_hull(regions, meta)


def split_grid(step=0.1):
    return [float(x) for x in np.unique(np.round(np.append(np.arange(0.0, 1.0, step), 1.0), 12))]


def gaussian_mac_regions(ic):
    """Pentagons of the MACs each receiver sees with full power Gaussian inputs (MAC1, MAC2)."""
    g = Channels.gauss_mi
    mac1 = Geometry.to_region2d(pentagon(g(ic, "I11_given2"), g(ic, "I21_given1"), g(ic, "I_sum1")),
                                {"region": "MAC1"})
    mac2 = Geometry.to_region2d(pentagon(g(ic, "I12_given2"), g(ic, "I22_given1"), g(ic, "I_sum2")),
                                {"region": "MAC2"})
    return mac1, mac2


def gaussian_terms(ic):
    g = Channels.gauss_mi
    return {
        "I(X1;B1|X2)": g(ic, "I11_given2"),
        "I(X2;B1|X1)": g(ic, "I21_given1"),
        "I(X1;B1)": g(ic, "I11"),
        "I(X2;B1)": g(ic, "I21"),
        "I(X1X2;B1)": g(ic, "I_sum1"),
        "I(X1;B2|X2)": g(ic, "I12_given2"),
        "I(X2;B2|X1)": g(ic, "I22_given1"),
        "I(X1;B2)": g(ic, "I12"),
        "I(X2;B2)": g(ic, "I22"),
        "I(X1X2;B2)": g(ic, "I_sum2"),
    }


def gaussian_sd_points(ic):
    return _sd_from_terms(gaussian_terms(ic))


def _decode_rates(powers, order):
    """Successive decoding: each stream is decoded knowing the ones before it, with the rest as noise."""
    rates = {}
    for k, stream in enumerate(order):
        rates[stream] = Channels.gauss_stream_mi(powers, [stream], list(order[:k]))
    return rates


def gaussian_sd_rs(ic, splits=None):
    """Successive decoding with rate splitting. For every (lambda1, lambda2) in splits (lambda_i is the common
    power fraction of sender i) and every pair of decoding orders of the three streams each receiver decodes
    (its own personal stream and both common streams), the personal rates come from their receiver and each
    common rate is the smaller of the two receivers' rates."""
    if splits is None:
        grid = split_grid(0.1)
        splits = [(a, b) for a in grid for b in grid]
    points = []
    for lam1, lam2 in splits:
        pw1 = ic.powers(1, (lam1, lam2))
        pw2 = ic.powers(2, (lam1, lam2))
        orders1 = list(itertools.permutations(["U1", "W1", "W2"]))
        orders2 = list(itertools.permutations(["U2", "W1", "W2"]))
        rates1 = [_decode_rates(pw1, o) for o in orders1]
        rates2 = [_decode_rates(pw2, o) for o in orders2]
        for o1, r1 in zip(orders1, rates1):
            for o2, r2 in zip(orders2, rates2):
                w1 = min(r1["W1"], r2["W1"])
                w2 = min(r1["W2"], r2["W2"])
                label = "l1=" + format(lam1, "g") + " l2=" + format(lam2, "g") + " rx1=" + "".join(o1) \
                    + " rx2=" + "".join(o2)
                points.append(RatePoint(label, r1["U1"] + w1, r2["U2"] + w2))
    return points


def gaussian_hk(ic, splits=None):
    """Hull over power splits of the Han-Kobayashi region with Gaussian streams (no time-sharing variable)."""
    if splits is None:
        grid = split_grid(0.1)
        splits = [(a, b) for a in grid for b in grid]
    regions = []
    for lam1, lam2 in splits:
        powers = {1: ic.powers(1, (lam1, lam2)), 2: ic.powers(2, (lam1, lam2))}

        def mi(rx, subject, cond):
            return Channels.gauss_stream_mi(powers[rx], subject, cond)

        regions.append(project_hk(hk_system(mi)))
    meta = {"region": "gauss-hk", "splits": len(splits), "time_sharing": "none within a split, hull across splits"}
    return Geometry.union_hull(regions, meta)


def frontier_gap(outer, inner, directions=181):
    """Largest support-function gap max_r <d, r> over outer minus the same over inner, for unit directions d in the
    positive quadrant. Zero when the frontiers coincide."""
    gap = 0.0
    for angle in np.linspace(0.0, math.pi / 2, directions):
        d = (math.cos(angle), math.sin(angle))
        gap = max(gap, outer.support(d) - inner.support(d))
    return gap


def nesting_report(ch, sampler, random_inputs=2, seed=0, tol=1e-7):
    """Checks sd_points within hull(HK), sim_inner_bound within hull(HK) within sato_outer, and the all-common
    HK split against the pentagon intersection. The Sato hull is taken over the sampled inputs and the input
    marginals the random HK splits induce. Returns a dict of booleans and worst distances."""
    samples = sampler.samples(ch.alphabets)
    inputs = hk_inputs(ch, sampler, random_inputs, seed)
    hk = Geometry.union_hull([hk_region(ch, h) for h in inputs])
    sim = sim_inner_bound(ch, sampler)
    induced = [(h.input_marginal(1, ch.alphabets[0]), h.input_marginal(2, ch.alphabets[1])) for h in inputs]
    sato = sato_outer(ch, DistSampler.ExplicitSampler(list(samples) + induced))

    sd_worst = 0.0
    common_worst = 0.0
    mac1 = Channels.induced_mac(ch, 1)
    mac2 = Channels.induced_mac(ch, 2)
    for p1, p2 in samples:
        for point in sd_points(ch, p1, p2):
            sd_worst = max(sd_worst, hk.distance_to(point.coords))
        common = HkInput.pure_splits(p1, p2)[3]
        pent = Geometry.intersect(Geometry.to_region2d(mac2_system(mac1, p1, p2)),
                                  Geometry.to_region2d(mac2_system(mac2, p1, p2)))
        common_worst = max(common_worst, hk_region(ch, common).vertex_distance(pent))
    sim_worst = max((hk.distance_to(v) for v in sim.vertices), default=0.0)
    hk_worst = max((sato.distance_to(v) for v in hk.vertices), default=0.0)
    return {
        "sd_in_hk": sd_worst <= tol, "sd_distance": sd_worst,
        "sim_in_hk": sim_worst <= tol, "sim_distance": sim_worst,
        "hk_in_sato": hk_worst <= tol, "hk_distance": hk_worst,
        "common_split_matches": common_worst <= 1e-9, "common_split_distance": common_worst,
    }
