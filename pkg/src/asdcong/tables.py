"""Loading of the bundled data files (tables, generators, eigenforms, fixtures)."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path


class DataError(ValueError):
    pass


def _data_root(data_dir=None):
    if data_dir is not None:
        return Path(data_dir)
    return Path(str(resources.files("asdcong") / "data"))


@lru_cache(maxsize=32)
def load_json(name, data_dir=None):
    path = _data_root(data_dir) / name
    try:
        return json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise DataError(f"missing data file {path}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed JSON in {path}: {exc}") from exc


def generators(level, data_dir=None):
    """Curated eta-quotient generators of the given level."""
    return load_json("generators.json", data_dir)["levels"].get(str(level), [])


def tables(data_dir=None):
    return load_json("tables.json", data_dir)


def table1(data_dir=None):
    return tables(data_dir)["table1"]


def table2(data_dir=None):
    return tables(data_dir)["table2"]


def table3(data_dir=None):
    return tables(data_dir)["table3"]


def table4(data_dir=None):
    return tables(data_dir)["table4"]


def eigenforms(data_dir=None):
    return load_json("eigenforms.json", data_dir)


def examples(data_dir=None):
    return load_json("fixtures/examples.json", data_dir)


# parsed tables ---------------------------------------------------------------------


class TableData:
    """Tables 1-4 with eta quotients and characters parsed.

    ``to_json()`` gives back the plain dict, so parse -> serialize -> parse is
    the identity.  ``validate()`` lists every row that breaks its stated
    property; ``strict=True`` raises on the first batch instead.
    """

    def __init__(self, raw):
        from .char_eis import DirichletChar
        from .qconstructors import EtaQuotient

        self.raw = json.loads(json.dumps(raw))
        self.table1 = [dict(r, chi=DirichletChar(r["level"], r["character"])) for r in raw["table1"]]
        self.table2 = [dict(r, eta=EtaQuotient.parse(r["t"], r["level"])) for r in raw["table2"]]
        self.table3 = [dict(r, chi=DirichletChar(r["level"], r["character"])) for r in raw["table3"]]
        self.table4 = [
            dict(r, A_eta=EtaQuotient.parse(r["A"], r["level"]), B_eta=EtaQuotient.parse(r["B"], r["level"]))
            for r in raw["table4"]
        ]

    @classmethod
    def load(cls, data_dir=None, strict=False, max_weight=24):
        data = cls(tables(data_dir))
        if strict:
            problems = data.validate(max_weight)
            if problems:
                raise DataError("table validation failed: " + "; ".join(problems))
        return data

    @classmethod
    def from_json(cls, text):
        return cls(json.loads(text))

    def to_json(self):
        return json.dumps(self.raw, indent=1, sort_keys=True)

    def __eq__(self, other):
        return isinstance(other, TableData) and self.raw == other.raw

    @staticmethod
    def weights(row, max_weight=24):
        m, r = row["weight_modulus"], row["weight_residue"]
        return [k for k in range(1, max_weight + 1) if k % m == r]

    def validate(self, max_weight=24):
        from .qconstructors import is_holomorphic
        from .spaces import SpaceSpec, condition_star, dim_E, dim_M

        problems = []
        for r in self.table2:
            e = r["eta"]
            if e.weight != 0 or e.order_at_infinity != 1:
                problems.append(f"table2 level {r['level']}: {r['t']} is not q + O(q^2) of weight 0")
                continue
            s = e.series(3)
            if s.lead != 1 or s[1] != 1:
                problems.append(f"table2 level {r['level']}: {r['t']} does not start q + ...")
        for r in self.table4:
            for key in ("A_eta", "B_eta"):
                if not is_holomorphic(r[key]):
                    problems.append(f"table4 level {r['level']}: {r[key]} is not holomorphic")
        for r in self.table1:
            for k in self.weights(r, max_weight):
                if not condition_star(SpaceSpec(r["level"], r["character"], k)):
                    problems.append(f"table1 ({r['level']}, {r['character']}, k={k}): condition (*) fails")
        for r in self.table3:
            for k in self.weights(r, max_weight - 2):
                s = SpaceSpec(r["level"], r["character"], k)
                up = s.with_weight(k + 2)
                if dim_M(s) != dim_M(up) or dim_E(up) != 2:
                    problems.append(f"table3 ({r['level']}, {r['character']}, k={k}): dimensions differ")
        return problems
