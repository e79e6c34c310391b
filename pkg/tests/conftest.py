import pytest

from incentives import Alternative, Individual, Instance


def build_instance(data, metadata=None):
    """data: iterable of (ind_id, [(alt_id, utility, social), ...])."""
    return Instance(
        tuple(
            Individual(i, tuple(Alternative(a, float(u), float(s))
                                for a, u, s in alts))
            for i, alts in data
        ),
        metadata or {},
    )


@pytest.fixture
def desk_instance():
    # two individuals whose hulls are {(0,0),(1,5),(3,9)} and {(0,0),(2,8)}
    return build_instance([
        (1, [(0, 5.0, 0.0), (1, 4.0, 5.0), (2, 2.0, 9.0)]),
        (2, [(0, 3.0, 2.0), (1, 1.0, 10.0)]),
    ])


def random_cent_instance(rng, n_individuals=None, max_alts=6,
                         u_cent_max=300, s_gram_max=10000):
    """Utilities on the cent grid, socials on the gram grid.

    Weight differences are then exact multiples of 0.01, so the DP oracle
    at scale 100 is exact.  Roughly a fifth of the social values are
    negative to exercise dominance removal.
    """
    if n_individuals is None:
        n_individuals = int(rng.integers(2, 51))
    individuals = []
    for i in range(n_individuals):
        k = int(rng.integers(1, max_alts + 1))
        alts = []
        for a in range(k):
            u = int(rng.integers(0, u_cent_max + 1)) / 100.0
            s = int(rng.integers(-s_gram_max // 4, s_gram_max + 1)) / 1000.0
            alts.append((a, u, s))
        individuals.append((i, alts))
    return build_instance(individuals)


def brute_force_optimum(instance, budget):
    """Independent welfare oracle: raw recursion over all assignments."""
    from incentives import default_alternative

    per_ind = []
    for ind in instance.individuals:
        d = default_alternative(ind)
        per_ind.append([(d.default_utility - a.utility,
                         a.social - d.default_social)
                        for a in ind.alternatives])

    best = 0.0

    def rec(i, spend, welf):
        nonlocal best
        if i == len(per_ind):
            best = max(best, welf)
            return
        for w, g in per_ind[i]:
            if spend + w <= budget:
                rec(i + 1, spend + w, welf + g)

    rec(0, 0.0, 0.0)
    return best


def assert_results_identical(a, b):
    """Field-by-field bit identity of two greedy results."""
    assert a.welfare == b.welfare
    assert a.budget_given == b.budget_given
    assert a.budget_used == b.budget_used
    assert a.split_item == b.split_item
    assert a.split_eff == b.split_eff
    assert a.gap_bound == b.gap_bound
    assert a.iterations == b.iterations
    assert a.resume_cursor == b.resume_cursor
    assert a.curve == b.curve
    assert dict(a.allocation.chosen) == dict(b.allocation.chosen)
    assert dict(a.allocation.incentives) == dict(b.allocation.incentives)


def zero_noise_map(instance):
    return {(ind.ind_id, alt.alt_id): 0.0
            for ind in instance.individuals
            for alt in ind.alternatives}


# --- brute-force hull oracle -------------------------------------------------

def hull_points(profile):
    return list(zip(profile.weights, profile.social_gains))


def hull_certified(removed_point, kept):
    """Certificate for one removed (weight, gain) point.

    Either a retained point weakly dominates it, or it lies on or below the
    segment between two consecutive retained points (collinear interiors
    are dropped by design, hence on-or-below).
    """
    w_r, g_r = removed_point
    for w_q, g_q in kept:
        if w_q <= w_r and g_q >= g_r:
            return True
    for (w_a, g_a), (w_b, g_b) in zip(kept, kept[1:]):
        if w_a <= w_r <= w_b and w_a < w_b:
            g_seg = g_a + (g_b - g_a) * (w_r - w_a) / (w_b - w_a)
            if g_seg >= g_r - 1e-9:
                return True
    return False


def check_profile(ind, profile):
    """Structural invariants plus a certificate for every removed point."""
    from incentives import default_alternative

    d = default_alternative(ind)
    assert profile.alt_ids[0] == d.alt_id
    assert profile.weights[0] == 0.0
    assert profile.social_gains[0] == 0.0

    w = profile.weights
    g = profile.social_gains
    assert all(w[k] < w[k + 1] for k in range(len(w) - 1))
    assert all(g[k] < g[k + 1] for k in range(len(g) - 1))
    effs = profile.incr_effs
    assert all(e > 0 for e in effs)
    assert all(effs[k + 1] < effs[k] for k in range(len(effs) - 1))
    assert all(iw > 0 for iw in profile.incr_weights)
    assert all(isoc > 0 for isoc in profile.incr_socials)
    # increments are consecutive differences
    for k in range(1, len(w)):
        assert w[k] - w[k - 1] == profile.incr_weights[k - 1]
        assert g[k] - g[k - 1] == profile.incr_socials[k - 1]

    kept = hull_points(profile)
    kept_ids = set(profile.alt_ids)
    for alt in ind.alternatives:
        if alt.alt_id in kept_ids:
            continue
        removed = (d.default_utility - alt.utility,
                   alt.social - d.default_social)
        assert hull_certified(removed, kept), (removed, kept)
