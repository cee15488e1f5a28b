#!/usr/bin/env python3
"""Rebuild the bundled reference certificates and the pattern registry.

Writes src/lscert/data/patterns.json and src/lscert/data/certs/{t2,t3,t7}.json.
The longer certificates (t15.json, t31.json) are produced by the generation
pipeline; run tools/generate_long_certificates.py AFTER this script, since it
re-syncs the registry entries to whatever those certificates actually achieve.

Every certificate written here is re-verified in exact arithmetic before it
lands on disk.
"""
from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lscert.certificate import (  # noqa: E402
    Certificate,
    _cert_to_obj,
    check_membership,
    minimal_epsilon,
    save_certificate,
)
from lscert.exact_linalg import RatMatrix, rat_from_decimal  # noqa: E402
from lscert.pep_builder import StepsizePattern  # noqa: E402
from lscert.two_step import bisect_dyadic_delta, two_step_certificate  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "lscert" / "data"

R = rat_from_decimal


def mat(rows: list[list[str]]) -> RatMatrix:
    return RatMatrix.from_rows([[R(v) for v in row] for row in rows])


def three_step_certificate() -> Certificate:
    """Exact reference certificate for h = (1.5, 4.9, 1.5) at Delta = 1e-4, eps = 0."""
    h = StepsizePattern((R("1.5"), R("4.9"), R("1.5")))
    lam = mat([
        ["0", "0", "0", "0", "0"],
        ["0", "0", "1.95", "0.003", "0.007"],
        ["0", "0.95", "0", "0.5", "0.5"],
        ["0", "0.006", "0", "0", "0.51"],
        ["0", "0.004", "0", "0.013", "0"],
    ])
    gam = mat([
        ["0", "0.005", "7.825", "3.9497", "4.0203"],
        ["0", "0", "-5.24", "-10.555", "0"],
        ["0", "0", "0", "7.9", "-5.315"],
        ["0", "0", "0", "0", "1.2947"],
        ["0", "0", "0", "0", "0"],
    ])
    return Certificate(h, R("0.0001"), Fraction(0), lam, gam)


def seven_step_certificate() -> Certificate:
    """Exact reference certificate for h = (1.5, 2.2, 1.5, 12.0, 1.5, 2.2, 1.5)
    at Delta = 1e-5, eps = 1e-9. Entries are dyadic-scale rationals."""
    h = StepsizePattern(tuple(R(v) for v in ("1.5", "2.2", "1.5", "12.0", "1.5", "2.2", "1.5")))
    lam_left = [
        ["0", "0", "0", "0", "0"],
        ["0", "0", "8837407518919583/4503599627370496",
         "5370688140802311/2305843009213693952", "960254226721649/144115188075855872"],
        ["0", "2191522964335457/2251799813685248", "0",
         "4118290538555273/2251799813685248", "2688409565283275/4503599627370496"],
        ["0", "6721678331720401/2305843009213693952", "4407991053556385/18014398509481984",
         "0", "5801123626984329/1125899906842624"],
        ["0", "1313681189860411/1152921504606846976", "2695784755734549/2251799813685248",
         "8068866010524833/2251799813685248", "0"],
        ["0", "1137203495150241/4611686018427387904", "4688926225212825/9223372036854775808",
         "4572972758977097/4611686018427387904", "1182579142099203/1152921504606846976"],
        ["0", "5789750435206701/18446744073709551616", "4956986009057139/9223372036854775808",
         "5204247088958345/4611686018427387904", "5375927246703545/9223372036854775808"],
        ["0", "7965115934238233/36893488147419103232", "6653418691702949/9223372036854775808",
         "4849791056907609/4611686018427387904", "7288685819438951/9223372036854775808"],
        ["0", "1977810093374139/9223372036854775808", "1222316311137735/1152921504606846976",
         "6194623724653895/4611686018427387904", "1504051934577545/1152921504606846976"],
    ]
    lam_right = [
        ["0", "0", "0", "0"],
        ["4697224493034383/9223372036854775808", "8368394272075953/2305843009213693952",
         "6128278626086993/9223372036854775808", "80543723501136599/36893488147419103232"],
        ["7733370871946025/4611686018427387904", "5388133457257119/2305843009213693952",
         "8119439550484479/4611686018427387904", "19797186857495837/9223372036854775808"],
        ["2740682573240027/576460752303423488", "5290333777740781/1152921504606846976",
         "4877381506142205/1152921504606846976", "12485929602009775/2305843009213693952"],
        ["8956652459407733/72057594037927936", "4723166920241497/18014398509481984",
         "5356440120675597/18014398509481984", "339319020784307309/1152921504606846976"],
        ["0", "772844649199827/4503599627370496",
         "2338413531710477/288230376151711744", "13381432557675475/2305843009213693952"],
        ["6929007831194361/288230376151711744", "0",
         "8173541145090013/36028797018963968", "3837009581398546887/18446744073709551616"],
        ["3923691798295005/144115188075855872", "1250438084247729/288230376151711744",
         "0", "18985683012247614283/36893488147419103232"],
        ["13037057806369/2251799813685248", "7367859533233689/576460752303423488",
         "2876396710542189/288230376151711744", "0"],
    ]
    gam_left = [
        ["0", "1445047782665419/360287970189639680", "4403953050470099/36028797018963968",
         "12063929807726837/144115188075855872", "3158567943322891003/144115188075855872"],
        ["0", "0", "-4876214136104831/140737488355328",
         "-8833525210676647/1125899906842624", "-2173342829362743/281474976710656"],
        ["0", "-3452744755754301/70368744177664", "0",
         "-6337493011708677/36028797018963968", "-6175482448055731/2251799813685248"],
        ["0", "5865189115672077/36028797018963968", "-7694464236006067/281474976710656",
         "0", "-5761085953121451/144115188075855872"],
        ["0", "8990085085489805/562949953421312", "8180724221663923/9007199254740992",
         "-170650240960227/70368744177664", "0"],
        ["0", "814636363991245/2251799813685248", "-5002382223044879/9007199254740992",
         "-5824324289872487/4503599627370496", "-5420042187723199/2251799813685248"],
        ["0", "3576868018334213/18014398509481984", "-3095322656598895/18014398509481984",
         "-4741216870166437/4503599627370496", "8742107678118927/18014398509481984"],
        ["0", "7467009600885335/72057594037927936", "7502387060304591/18014398509481984",
         "-2299019529082251/2251799813685248", "5226016391129105/4503599627370496"],
        ["0", "5171454268783955/18014398509481984", "4976089659881855/4503599627370496",
         "-849946842273963/1125899906842624", "4041378073126239/2251799813685248"],
    ]
    gam_right = [
        ["842771278878770475/288230376151711744", "1763107326300397405/288230376151711744",
         "490223898427757151/72057594037927936", "246036905476920105/36028797018963968"],
        ["-7575374264747013/1125899906842624", "-847735720154307/140737488355328",
         "-3644178695304033/562949953421312", "-2065817857485759/281474976710656"],
        ["256866650877453/562949953421312", "-2501054473773415/1125899906842624",
         "-1008218866207467/281474976710656", "-6366578400890641/2251799813685248"],
        ["4819157742253121/2251799813685248", "8130105639853323/18014398509481984",
         "2019419188776927/1125899906842624", "2348470109478957/281474976710656"],
        ["451884763914337/281474976710656", "7742823693376695/18014398509481984",
         "2908076698229235/2251799813685248", "-6004115926843261/1125899906842624"],
        ["0", "-3545908575737889/288230376151711744",
         "3082103085688847/18014398509481984", "3631847684938235/1125899906842624"],
        ["-6392823462111415/72057594037927936", "0",
         "226196870745667/9007199254740992", "-5233938836038739/2251799813685248"],
        ["-3454102047914875/9007199254740992", "-2760923356849777/36028797018963968",
         "0", "-664739622472857/2251799813685248"],
        ["-1957421956488181/4503599627370496", "-7174137438907087/4503599627370496",
         "-4503200630060789/36028797018963968", "0"],
    ]
    lam = mat([l + r for l, r in zip(lam_left, lam_right)])
    gam = mat([l + r for l, r in zip(gam_left, gam_right)])
    return Certificate(h, R("0.00001"), R("0.000000001"), lam, gam)


TABLE_PATTERNS = {
    "const1": "1",
    "t2": "2.9,1.5",
    "t3": "1.5,4.9,1.5",
    "t7": "1.5,2.2,1.5,12.0,1.5,2.2,1.5",
    "t15": "1.4,2.0,1.4,4.5,1.4,2.0,1.4,29.7,1.4,2.0,1.4,4.5,1.4,2.0,1.4",
    "t31": ("1.4,2.0,1.4,3.9,1.4,2.0,1.4,8.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4,72.3,"
            "1.4,2.0,1.4,3.9,1.4,2.0,1.4,8.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4"),
    "t63": ("1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4,14.2,"
            "1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4,164.0,"
            "1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4,14.2,"
            "1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4"),
    "t127": ("1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4,12.6,"
             "1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4,23.5,"
             "1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4,12.6,"
             "1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4,370.0,"
             "1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4,12.6,"
             "1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4,23.5,"
             "1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.5,1.4,2.0,1.4,3.9,1.4,2.0,1.4,12.6,"
             "1.4,2.0,1.4,3.9,1.4,2.0,1.4,7.2,1.4,2.0,1.4,3.9,1.4,2.0,1.4"),
}

# gap caps / slacks the long patterns are certified at (certificate files are
# authoritative where present; these feed simulations and rate evaluation)
PATTERN_META = {
    "const1": {"delta": "0.01", "epsilon": "0"},
    "t2": {"delta": None, "epsilon": "0"},  # delta filled from the bisection below
    "t3": {"delta": "0.0001", "epsilon": "0"},
    "t7": {"delta": "0.00001", "epsilon": "0.000000001"},
    "t15": {"delta": "0.000001", "epsilon": "0.000000001"},
    "t31": {"delta": "0.00000001", "epsilon": "0.00000000001"},
    "t63": {"delta": "0.0000001", "epsilon": "0.001"},
    "t127": {"delta": "0.00000001", "epsilon": "0.0001"},
}


def verify_or_die(name: str, cert: Certificate) -> None:
    rep = check_membership(cert)
    if not rep.overall:
        raise SystemExit(f"{name}: exact verification FAILED: {rep.failed_conditions()}")
    em = minimal_epsilon(cert.pattern, cert.Delta, cert.lam, cert.gam)
    print(f"{name}: verified exactly; eps_min = {em if isinstance(em, Fraction) else em}")


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "certs").mkdir(exist_ok=True)

    eta = Fraction(1, 10)
    d2 = bisect_dyadic_delta(eta)
    t2 = two_step_certificate(eta, d2)
    print(f"t2: bisected dyadic Delta = {d2} (~{float(d2):.6g})")
    t3 = three_step_certificate()
    t7 = seven_step_certificate()

    for name, cert in (("t2", t2), ("t3", t3), ("t7", t7)):
        verify_or_die(name, cert)
        save_certificate(cert, DATA / "certs" / f"{name}.json")

    meta = {}
    for name, text in TABLE_PATTERNS.items():
        entry = dict(PATTERN_META[name])
        entry["h"] = text.split(",")
        if name == "t2":
            entry["delta"] = f"{d2.numerator}/{d2.denominator}"
        meta[name] = entry
    (DATA / "patterns.json").write_text(json.dumps(meta, indent=1) + "\n")
    print(f"wrote {DATA / 'patterns.json'} with {len(meta)} patterns")


if __name__ == "__main__":
    main()
