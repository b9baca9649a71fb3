#!/usr/bin/env python3
"""Smoke test for the heckecm_py extension module.

Build the extension first:

    cargo build -p heckecm-python            # or --release

then run this script from anywhere; it locates the built cdylib in the
workspace target directory and imports it under the module name python
expects.
"""

import pathlib
import shutil
import sys
import sysconfig
import tempfile

REPO = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libheckecm_py.so", "heckecm_py.dll", "libheckecm_py.dylib")
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p heckecm-python")
    stage = pathlib.Path(tempfile.mkdtemp(prefix="heckecm-py-"))
    shutil.copy(built, stage / ("heckecm_py" + suffix))
    sys.path.insert(0, str(stage))
    import heckecm_py

    return heckecm_py


def main():
    m = load_module()

    # Kronecker symbol and splitting data
    assert m.kronecker(-8, 3) == 1
    assert m.kronecker(-8, 5) == -1
    assert m.kronecker(-8, 2) == 0

    # class groups via reduced forms
    assert m.class_number(-8) == 1
    assert m.class_number(-20) == 2
    assert m.reduced_forms(-20) == [(1, 0, 5), (2, 2, 3)]

    # the weight-3 level-8 CM form: q - 2q^2 - 2q^3 + 4q^4 + 4q^6 - ...
    golden = [1, -2, -2, 4, 0, 4, 0, -8, -5, 0, 14, -8, 0, 0, 0, 16, 2, 10,
              -34, 0, 0, -28, 0, 16, 25]
    coeffs = m.synthesize_form(-8, 2, 25)
    assert [x for (x, y) in coeffs] == golden
    assert all(y == 0 for (_, y) in coeffs)

    # companion weights from the worked example
    assert m.companion_weight(3, 33) == 19
    assert m.companion_weight(3, 51) == 31
    assert m.companion_weight(3, 99) == 59

    # companion construction mod 33 reproduces the weight-19 expansion
    k_prime, h, twists, ok = m.companion(-8, 2, 33, 25)
    assert k_prime == 19 and ok and twists == []
    assert h[1][0] == -512 and h[2][0] == -3266
    assert h[24][0] == 3814697265625  # 5^18, since 5 is inert

    # huge coefficients survive the boundary exactly: a_25 of the mod-99
    # companion is 5^58
    k_prime, h59, _, ok = m.companion(-8, 2, 99, 25)
    assert k_prime == 59 and ok
    assert h59[24][0] == 5**58

    # class number two: anchored construction mod 9 (source twist d = 0)
    k_prime, _, twists, ok = m.companion(-20, 2, 9, 120, [0])
    assert k_prime == 5 and ok and len(twists) == 1

    # congruence checking and ordinarity
    assert m.verify_companion(-8, 2, 18, 33, 25)
    assert m.ordinary_at(-8, 2, 3, 25)
    assert not m.ordinary_at(-8, 2, 5, 25)
    assert m.detect_cm_form(-8, 2, 200) == (True, None)

    # hypothesis violations raise
    try:
        m.companion(-8, 2, 25, 10)
    except ValueError as e:
        assert "split" in str(e)
    else:
        raise AssertionError("M = 25 must be rejected: 5 is inert")

    print("smoke test passed")


if __name__ == "__main__":
    main()
