"""Geodesic distances, contact counts and neighbour flags.

Contact count of a pair (a, b) is the number of other languages M that lie
closer to both a and b than a and b are to each other:

    d(a, M) < d(a, b)  and  d(b, M) < d(a, b)

i.e. M is inside the intersection of the two discs of radius d(a, b)
centred on a and b.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import MissingCoordinates
from .pairtable import PairValueTable

EARTH_RADIUS_KM = 6371.0088


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0 or not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"coordinates out of range: {self.latitude}, {self.longitude}")


@dataclass(frozen=True)
class ContactConfig:
    neighbour_threshold: int = 10

    def __post_init__(self):
        if self.neighbour_threshold < 1:
            raise ValueError("neighbour_threshold must be >= 1")


def haversine_km(lat1, lon1, lat2, lon2):
    """Great-circle distance on a sphere; broadcasts over array arguments.

    Exactly symmetric in its two points.
    """
    phi1, phi2 = np.radians(lat1), np.radians(lat2)
    dphi = np.abs(phi2 - phi1)
    dlam = np.abs(np.radians(lon2) - np.radians(lon1))
    h = np.sin(dphi / 2.0) ** 2 + np.cos(phi1) * np.cos(phi2) * np.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def geodesic_km(a, b):
    return float(haversine_km(a.latitude, a.longitude, b.latitude, b.longitude))


def distance_matrix_km(lat, lon):
    """Symmetric all-pairs distance matrix with a zero diagonal."""
    lat = np.asarray(lat, dtype=np.float64)
    lon = np.asarray(lon, dtype=np.float64)
    d = haversine_km(lat[:, None], lon[:, None], lat[None, :], lon[None, :])
    d = np.triu(d, 1)
    return d + d.T


def _points(languages):
    located = [r for r in languages if r.latitude is not None]
    return (
        [r.id for r in located],
        np.array([r.latitude for r in located], dtype=np.float64),
        np.array([r.longitude for r in located], dtype=np.float64),
    )


def contact_count(languages, a, b):
    """Number of located languages in between ``a`` and ``b`` (direct O(n) scan)."""
    if a == b:
        raise ValueError("contact_count needs two distinct languages")
    by_id = {r.id: r for r in languages}
    for lang in (a, b):
        if lang not in by_id or by_id[lang].latitude is None:
            raise MissingCoordinates(f"{lang!r} has no coordinates")
    ids, lat, lon = _points(languages)
    ra, rb = by_id[a], by_id[b]
    dab = haversine_km(ra.latitude, ra.longitude, rb.latitude, rb.longitude)
    da = haversine_km(ra.latitude, ra.longitude, lat, lon)
    db = haversine_km(rb.latitude, rb.longitude, lat, lon)
    inside = (da < dab) & (db < dab)
    others = np.array([x not in (a, b) for x in ids])
    return int(np.count_nonzero(inside & others))


def count_in_between_naive(dist):
    """Reference O(n^3) count for every pair from a distance matrix."""
    n = dist.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            d = dist[a, b]
            c = 0
            for m in range(n):
                if m != a and m != b and dist[a, m] < d and dist[b, m] < d:
                    c += 1
            out[a, b] = out[b, a] = c
    return out


def count_in_between(dist, threads=1, chunk=256):
    """All-pairs contact counts from a symmetric distance matrix.

    For each a, candidates M are pre-filtered to those with
    d(a, M) < max d(a, b) over the current chunk of partners b, taken in
    order of increasing distance from a, so a chunk only scans the nearest
    part of the row.
    """
    dist = np.asarray(dist, dtype=np.float64)
    n = dist.shape[0]
    out = np.zeros((n, n), dtype=np.int64)

    def row(a):
        partners = np.arange(a + 1, n)
        if partners.size == 0:
            return
        da = dist[a]
        by_near = np.argsort(da, kind="stable")
        near_d = da[by_near]
        partners = partners[np.argsort(da[partners], kind="stable")]
        for s in range(0, partners.size, chunk):
            bs = partners[s:s + chunk]
            dab = da[bs]
            k = np.searchsorted(near_d, dab[-1], side="left")
            cand = by_near[:k]
            mask = (dist[np.ix_(bs, cand)] < dab[:, None]) & (da[cand][None, :] < dab[:, None])
            # a itself has d(b, a) = d(a, b), never strictly inside; b has
            # d(a, b) not < d(a, b). Neither can be counted.
            out[a, bs] = mask.sum(axis=1)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(row, range(n)))
    else:
        for a in range(n):
            row(a)
    upper = np.triu(out, 1)
    return upper + upper.T


def neighbour_flag(count, config=None):
    config = config or ContactConfig()
    if count < 0:
        raise ValueError("count must be non-negative")
    return 1 if count < config.neighbour_threshold else 0


def rescale_unit(table):
    """Min-max rescale table values into [0, 1]; a constant table maps to 0."""
    if len(table) == 0:
        raise ValueError("cannot rescale an empty table")
    v = table.values
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        scaled = np.zeros_like(v)
    else:
        scaled = np.clip((v - lo) / (hi - lo), 0.0, 1.0)
    return table.with_values(scaled, (0.0, 1.0))


def geo_tables(languages, threads=1):
    """Raw kilometre and contact-count tables over located languages.

    Returns ``(km_table, count_table, excluded_ids)``.
    """
    excluded = sorted(r.id for r in languages if r.latitude is None)
    ids, lat, lon = _points(languages)
    order = np.argsort(np.array(ids, dtype=object), kind="stable")
    ids = [ids[i] for i in order]
    lat, lon = lat[order], lon[order]
    n = len(ids)
    dist = distance_matrix_km(lat, lon)
    counts = count_in_between(dist, threads=threads)
    ia, ib = np.triu_indices(n, 1)
    km = PairValueTable(ids, ia, ib, dist[ia, ib], None, _checked=True)
    cnt = PairValueTable(ids, ia, ib, counts[ia, ib].astype(np.float64), None, _checked=True)
    return km, cnt, excluded


def write_contact_edges(languages, path, config=None, ego=None, threads=1):
    """Contact-graph edge list: raw km, raw count and neighbour flag per pair.

    With ``ego`` only pairs involving that language are written.
    """
    config = config or ContactConfig()
    km, cnt, _ = geo_tables(languages, threads=threads)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("id_a\tid_b\tgeo_km\tcontact_count\tneighbour\n")
        for ((a, b), d), c in zip(km.items(), cnt.values.tolist()):
            if ego is not None and ego not in (a, b):
                continue
            c = int(c)
            fh.write(f"{a}\t{b}\t{d!r}\t{c}\t{neighbour_flag(c, config)}\n")
