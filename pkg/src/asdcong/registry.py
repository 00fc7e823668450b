"""The bundled worked examples: search, expand, compare with golden values, verify.

Each example in ``fixtures/examples.json`` has one or more runs.  A run
names the space, the modular function t (or the form g for the Phi_g
search), pins that fix the solution when the solution space is larger than
a line, and the golden data the pipeline must reproduce.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial, prod

from . import tables
from .char_eis import DirichletChar, classical_eisenstein
from .engine import (
    _as_series,
    expand_in_t,
    find_corollary,
    find_theorem1,
    find_theorem2,
    suite_modulus,
    verify_asd,
    verify_threeterm,
    verify_twisted,
)
from .qconstructors import EtaQuotient, jacobi_theta_sq
from .series_core import is_prime
from .spaces import SpaceSpec

EXACT_LIMIT = 150  # suites up to this index use exact coefficients


class UnknownExample(KeyError):
    pass


def example_ids(data_dir=None):
    return [e["id"] for e in tables.examples(data_dir)["examples"]]


def get_example(example_id, data_dir=None):
    for e in tables.examples(data_dir)["examples"]:
        if e["id"] == example_id:
            return e
    raise UnknownExample(f"unknown example {example_id!r}; known: {', '.join(example_ids(data_dir))}")


# closed forms ----------------------------------------------------------------------


def signed_binomial_sum(n):
    return (-1) ** n * sum(comb(n, k) ** 2 * comb(2 * k, k) * comb(2 * (n - k), n - k) for k in range(n + 1))


def central_binomial_squared(n):
    return comb(2 * n, n) ** 2


def quartic_product_squared(n):
    return Fraction(2 ** n * prod(4 * j + 1 for j in range(n)), factorial(n)) ** 2


CLOSED_FORMS = {
    "signed_binomial_sum": signed_binomial_sum,
    "central_binomial_squared": central_binomial_squared,
    "quartic_product_squared": quartic_product_squared,
}


# running ---------------------------------------------------------------------------


def _spec(run):
    return SpaceSpec(run["level"], run["character"], run["weight"])


def certificate_for(run, data_dir=None):
    spec = _spec(run)
    method = run["method"]
    if method == "theorem1":
        pins = {int(k): Fraction(v) for k, v in run["pins"].items()} if run.get("pins") else None
        return find_theorem1(spec, EtaQuotient.parse(run["t"], spec.level), pins=pins, data_dir=data_dir)
    if method == "corollary":
        certs = find_corollary(spec, EtaQuotient.parse(run["t"], spec.level), data_dir=data_dir)
        return certs[run.get("select", 0)]
    if method == "theorem2":
        f1 = Fraction(run["f1"]) if "f1" in run else None
        return find_theorem2(spec, EtaQuotient.parse(run["g"], spec.level), f1=f1, data_dir=data_dir)
    raise ValueError(f"unknown method {method!r}")


def _expected_f(run, prec):
    name = run.get("f_expected")
    if name is None:
        return None
    if name == "theta2":
        return jacobi_theta_sq(prec)
    if name == "classical_E12":
        return classical_eisenstein(12, 1, prec)
    return EtaQuotient.parse(name, run["level"]).series(prec)


def _combo_matches(cert, expected):
    want = sorted(
        (e["chi"], e["psi"], e.get("d", 1), Fraction(e["coefficient"])) for e in expected
    )
    have = sorted(
        (e.chi.kind, e.psi.kind, e.dilation, e.coefficient) for e in cert.combo.elements
    )
    return want == have


def _fmt(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _suite_primes(run, cert, prime_max):
    claimed = cert.excluded_primes
    if run.get("twist"):
        # the twisted congruence holds at every prime not dividing D * prod(beta d)
        upgrade = [p for p in range(2, prime_max + 1) if is_prime(p)]
        return [], upgrade
    up = run.get("upgrade")
    if up == "all":
        extra = [p for p in range(2, prime_max + 1) if is_prime(p) and not claimed(p)]
    else:
        extra = [p for p in (up or []) if p <= prime_max and not claimed(p)]
    return [p for p in range(2, prime_max + 1) if claimed(p)], extra


def _suite(run, cert, prime_max, bound, exact_b):
    claimed, extra = _suite_primes(run, cert, prime_max)
    primes = sorted(set(claimed) | set(extra))
    twist = DirichletChar(run["level"], run["twist"]) if run.get("twist") else None
    if bound <= EXACT_LIMIT and len(exact_b) > bound:
        seq, modulus = list(exact_b), None
    else:
        # primes dividing a denominator of f or t are checked on exact values
        D = cert.denominator_D
        good = [p for p in primes if D % p]
        modulus = suite_modulus(good, bound) if good else None
        seq = list(cert.expansion_mod(bound, modulus).b) if modulus else None
    reports = []
    for p in primes:
        status = "empirical at bound" if p in extra and not (twist is None and cert.excluded_primes(p)) else "claimed"
        if twist is not None:
            status = "claimed"
        if modulus is not None and cert.denominator_D % p == 0:
            top = min(bound, len(exact_b) - 1)
            b, m = list(exact_b), None
        else:
            top, b, m = bound, seq, modulus
        if twist is not None:
            reports.append(verify_twisted(b, p, twist, top, run["name"], status, m))
        else:
            reports.append(verify_asd(b, p, top, run["name"], status, m))
    return reports


def run_example(example_id, prime_max=13, index_bound=None, data_dir=None):
    """Reproduce one bundled example.  Returns a plain dict report with an
    overall ``ok`` flag; nothing is raised for mathematical mismatches."""
    ex = get_example(example_id, data_dir)
    runs_out = []
    ok = True
    for run in ex["runs"]:
        cert = certificate_for(run, data_dir)
        golden = [Fraction(x) for x in run["golden"]]
        n_exact = max(len(golden) - 1, run.get("closed_form_terms", 0))
        bound = index_bound if index_bound is not None else max(n_exact, 60)
        n_exact = max(n_exact, min(bound, EXACT_LIMIT))
        f = cert.f_series(n_exact + 1)
        t = cert.t_series(n_exact + 1)
        res = expand_in_t(f, t, n_exact)
        b = list(res.b)
        checks = {}
        checks["golden"] = b[: len(golden)] == golden
        checks["identity"] = cert.identity_holds()
        checks["reconstruction"] = expand_in_t(f, t, min(n_exact, 40)).reconstruction_ok()
        exp_f = _expected_f(run, cert.prec)
        if exp_f is not None:
            checks["f"] = cert.f.truncate(cert.prec) == exp_f.truncate(cert.prec)
        if "f_coefficients" in run:
            want = [Fraction(x) for x in run["f_coefficients"]]
            checks["f"] = cert.f.coefficient_list(0, len(want)) == want
        if "t_coefficients" in run:
            want = [Fraction(x) for x in run["t_coefficients"]]
            checks["t"] = cert.t.coefficient_list(0, len(want)) == want
        if "combo_expected" in run:
            checks["combo"] = _combo_matches(cert, run["combo_expected"])
        if "classical_expected" in run:
            want = sorted((Fraction(c), d) for c, d in run["classical_expected"])
            have = cert.combo.classical_terms()
            # the classical terms are stated for f * theta(t)/t, whose sign matches the combo
            checks["classical"] = have is not None and sorted(have) == want
        if "identity_expected" in run:
            want = [Fraction(x) for x in run["identity_expected"]]
            checks["identity_terms"] = cert.identity_series().coefficient_list(0, len(want)) == want
        if "closed_form" in run:
            cf = CLOSED_FORMS[run["closed_form"]]
            m = run["closed_form_terms"]
            checks["closed_form"] = all(b[n] == cf(n) for n in range(m + 1))
        if "predicate_text" in run:
            checks["predicate"] = cert.excluded_primes.render() == run["predicate_text"]
        if cert.table_agrees is not None:
            checks["table1"] = cert.table_agrees
        reports = _suite(run, cert, prime_max, bound, b)
        checks["congruences"] = all(r.verdict for r in reports)
        three = None
        if "threeterm" in run:
            three = _threeterm(run["threeterm"], cert, data_dir)
            checks["threeterm_golden"] = three["golden_ok"]
            checks["threeterm"] = all(r.verdict for r in three["reports"])
        run_ok = all(checks.values())
        ok = ok and run_ok
        runs_out.append(
            {
                "name": run["name"],
                "method": run["method"],
                "spec": cert.spec.to_record(),
                "b": [_fmt(x) for x in b[: max(len(golden), 9)]],
                "golden": [_fmt(x) for x in golden],
                "combo": cert.combo.render(),
                "combo_classical": cert.combo.render_classical(),
                "excluded_primes": cert.excluded_primes.render(),
                "sharp_primes": cert.sharp_primes.render(),
                "denominator_D": cert.denominator_D,
                "checks": checks,
                "ok": run_ok,
                "congruence_reports": [r.to_record() for r in reports],
                "threeterm_reports": [r.to_record() for r in three["reports"]] if three else None,
                "notes": list(cert.notes),
            }
        )
    return {"example": example_id, "title": ex["title"], "ok": ok, "runs": runs_out}


def threeterm_sequence(cert, f_kind, n):
    """Exact coefficients of g*f (or f) in t for the three-term check."""
    f = cert.f_series(n + 1)
    if f_kind == "g*f":
        f = _as_series(cert.source, n + 1, cert.spec.level) * f
    return expand_in_t(f, cert.t_series(n + 1), n)


def _threeterm(spec3, cert, data_dir=None):
    forms = {e["label"]: e for e in tables.eigenforms(data_dir)["eigenforms"]}
    eig = forms[spec3["eigenform"]]
    a = [Fraction(x) for x in eig["coeffs"]]
    bound = min(spec3["bound"], len(a) - 1)
    k = spec3["exponent"] - 1
    golden = [Fraction(x) for x in spec3["golden"]]
    exact = list(threeterm_sequence(cert, spec3["f"], len(golden) - 1).b)
    primes = spec3["primes"]
    modulus = suite_modulus(primes, bound)
    b = list(cert.expansion_mod(bound, modulus, numerator=spec3["f"]).b)
    reports = [verify_threeterm(b, a, k, p, bound, "b(g*f)", modulus=modulus) for p in primes]
    return {"golden_ok": exact == golden, "reports": reports}
