"""Show what the in-between count measures on a handful of real-ish locations.

For a pair (a, b) the count is the number of other languages closer to
both a and b than a and b are to each other. Nearby pairs with nothing in
between are flagged as neighbours.
"""

import numpy as np

from colexgraph import geo

PLACES = {
    "Lisbon": (38.72, -9.14),
    "Madrid": (40.42, -3.70),
    "Paris": (48.86, 2.35),
    "Berlin": (52.52, 13.40),
    "Warsaw": (52.23, 21.01),
    "Moscow": (55.76, 37.62),
    "Cairo": (30.04, 31.24),
    "Nairobi": (-1.29, 36.82),
}


def main():
    names = list(PLACES)
    lat = np.array([PLACES[n][0] for n in names])
    lon = np.array([PLACES[n][1] for n in names])
    km = geo.distance_matrix_km(lat, lon)
    counts = geo.count_in_between(km)
    assert np.array_equal(counts, geo.count_in_between_naive(km))

    print(f"{'pair':<22}{'km':>9}{'between':>9}  neighbour (< 3)")
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            flag = "yes" if counts[i, j] < 3 else ""
            print(f"{names[i] + '-' + names[j]:<22}{km[i, j]:9.0f}{counts[i, j]:9d}  {flag}")


if __name__ == "__main__":
    main()
