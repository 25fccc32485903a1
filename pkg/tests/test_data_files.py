"""Pin the bundled spin-system files to their hand-entered source values.

The checksums freeze the exact bytes; the spot checks below re-state the
underlying numbers by hand so an accidental regeneration of the files
cannot silently drift.
"""

import hashlib

import pytest

from qnmr.spins import bundled_system_path, load_spin_system

CHECKSUMS = {
    "dfh": "444f970eeb0683b21ef535b4e44a1ffbf049dcf398c4f1fb96f10b8c5d867933",
    "symm": "28ef30608cea12fc03861b4d3d26f91ac94484f91412f25ead50cb789b9fb0f8",
    "phosphorous": "f4fb927305d0b47297d9c74426d9b9a1c5f7fa4a42571a3e226ba31cea4889e5",
}


@pytest.mark.parametrize("name", sorted(CHECKSUMS))
def test_checksum(name):
    with open(bundled_system_path(name), "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    assert digest == CHECKSUMS[name]


def test_dfh_values():
    s = load_spin_system(bundled_system_path("dfh"))
    assert s.n_spins == 16
    assert s.species_indices("19F") == (2, 10)
    assert s.species_indices("1H") == tuple(
        k for k in range(16) if k not in (2, 10)
    )
    assert s.shifts_ppm == (
        1.7970, 1.7970, -184.1865, 4.6834, 1.6370, 1.6942,
        1.0092, 1.0092, 1.0092,
        4.6834, -184.1865, 1.6370, 1.6942,
        1.0092, 1.0092, 1.0092,
    )
    assert len(s.couplings_hz) == 33
    assert s.coupling(0, 1) == -15.1172
    assert s.coupling(0, 2) == 14.0478
    assert s.coupling(2, 3) == 49.6307
    assert s.coupling(2, 10) == 1.2295
    assert s.coupling(11, 12) == -14.4404
    assert s.coupling(5, 8) == 7.45
    assert s.coupling(12, 15) == 7.45


def test_dfh_mirror_symmetry():
    # the molecule has two equivalent halves; index map for the mirror
    s = load_spin_system(bundled_system_path("dfh"))
    mirror = {0: 1, 1: 0, 2: 10, 3: 9, 4: 11, 5: 12, 6: 13, 7: 14, 8: 15}
    mirror.update({v: k for k, v in mirror.items()})
    asymmetric = {(4, 5), (11, 12)}  # lone asymmetric entry in the source table
    for (i, j), value in s.couplings_hz.items():
        if (i, j) in asymmetric:
            continue
        mi, mj = sorted((mirror[i], mirror[j]))
        assert s.coupling(mi, mj) == value, (i, j)
    for k in range(16):
        assert s.shifts_ppm[k] == s.shifts_ppm[mirror[k]]
    assert s.coupling(4, 5) == 0.0
    assert s.coupling(11, 12) == -14.4404


def test_symm_values():
    s = load_spin_system(bundled_system_path("symm"))
    assert s.n_spins == 22
    assert s.species_indices("31P") == (0, 1)
    assert s.shifts_ppm[:4] == (-43.844, -43.844, 4.090, 4.090)
    assert set(s.shifts_ppm[4:]) == {1.354}
    expected = {(0, 1): 301.990, (0, 2): -321.62, (0, 3): -19.15,
                (1, 2): -19.15, (1, 3): -321.62}
    expected.update({(0, k): 15.63 for k in range(4, 13)})
    expected.update({(1, k): 15.63 for k in range(13, 22)})
    assert s.couplings_hz == expected


def test_phosphorous_values():
    s = load_spin_system(bundled_system_path("phosphorous"))
    assert s.n_spins == 34
    assert s.species_indices("31P") == tuple(range(7))
    assert s.shifts_ppm[:7] == (
        -99.60, -0.33, -0.33, -0.33, -156.70, -156.70, -156.70
    )
    assert set(s.shifts_ppm[7:]) == {0.21}
    expected = {}
    for k in (1, 2, 3):
        expected[(0, k)] = -323.22
    for k in (4, 5, 6):
        expected[(0, k)] = 46.18
    for pair in ((1, 2), (1, 3), (2, 3)):
        expected[pair] = -16.63
    for pair in ((1, 4), (2, 5), (3, 6)):
        expected[pair] = -354.82
    for pair in ((1, 5), (2, 6), (3, 4)):
        expected[pair] = 25.79
    for pair in ((1, 6), (2, 4), (3, 5)):
        expected[pair] = -9.04
    for pair in ((4, 5), (4, 6), (5, 6)):
        expected[pair] = -214.10
    for p, lo in ((1, 7), (2, 16), (3, 25)):
        for h in range(lo, lo + 9):
            expected[(p, h)] = 4.0
    assert s.couplings_hz == expected
