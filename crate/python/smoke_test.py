"""Builds the extension, imports it and checks a few known answers."""

import json
import os
import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "cubesum-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = os.path.join(ROOT, "target", "release", "libcubesum_py.so")
    out = tempfile.mkdtemp()
    shutil.copy(lib, os.path.join(out, "cubesum_py.so"))
    return out


def main():
    sys.path.insert(0, build())
    import cubesum_py as cs

    assert cs.cusp_classify(-1, 2) == cs.cusp_classify(1, 2)
    assert cs.cusp_classify(1, 36) == "∞"

    table = json.loads(cs.normalizer_report())
    assert table["pass"], table
    assert len(table["rows"]) == 12

    cert = json.loads(cs.certify("11"))
    assert cert["verdict"] == "cube_sum"
    a, b = Fraction(cert["a"]), Fraction(cert["b"])
    assert a**3 + b**3 == 22

    cert = json.loads(cs.certify("121"))
    assert cert["verdict"] == "not_a_cube_sum"
    assert float(cert["l_value"]) > 0

    try:
        cs.certify("8")
    except ValueError:
        pass
    else:
        raise AssertionError("a cube must be rejected")

    gz = json.loads(cs.gz_verify([11], [1]))
    assert gz["pass"] and gz["ratio_error"] < 1e-8, gz

    lv = json.loads(cs.lvalue("121"))
    assert lv["sign"] == -1
    print("smoke test ok")


if __name__ == "__main__":
    main()
