"""DSE system specifications and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from ..cocycle import MellinSeries
from ..poly import as_fraction
from ..trees import PrimitiveInfo, check_name


class SpecError(ValueError):
    """Invalid specification; ``pointer`` is a JSON pointer to the culprit."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"
        self.message = message


def _frac_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


@dataclass
class ChargeStructure:
    """``s`` per equation and a split ``(u_e, w_e)`` per (primitive, place)
    with ``mu_e = u_e * 1_{i(p)} + w_e * s``."""

    s: dict
    split: dict = field(default_factory=dict)  # (label, place) -> (u, w)

    def split_for(self, p: PrimitiveInfo) -> dict:
        out = {}
        for e in p.places:
            if (p.label, e) in self.split:
                out[e] = self.split[(p.label, e)]
            elif len(p.places) == 1:
                out[e] = (Fraction(1), p.weight)
            else:
                raise SpecError(f"no charge split for place {e!r} of {p.label!r}", "/charge/split")
        return out


@dataclass
class DSESpec:
    equations: list
    primitives: list
    mellin: dict
    order: int
    charge: ChargeStructure | None = None

    def __post_init__(self):
        self.validate()

    # -- queries -----------------------------------------------------------
    @property
    def prims(self) -> dict:
        return {p.label: p for p in self.primitives}

    def primitives_of(self, i: str) -> list:
        return [p for p in self.primitives if p.equation == i]

    def is_single_place(self) -> bool:
        return all(len(p.places) == 1 for p in self.primitives)

    def with_order(self, order: int) -> "DSESpec":
        return DSESpec(list(self.equations), list(self.primitives), dict(self.mellin), order, self.charge)

    def with_mellin(self, mellin: Mapping[str, MellinSeries]) -> "DSESpec":
        return DSESpec(list(self.equations), list(self.primitives), dict(mellin), self.order, self.charge)

    def bind_random(self, seed: int) -> "DSESpec":
        return self.with_mellin({k: m.bind_random(seed) for k, m in self.mellin.items()})

    def edge_allowed(self, parent: PrimitiveInfo, place: str, child: PrimitiveInfo) -> bool:
        """Edges with a zero exponent force a zero coefficient."""
        return parent.mu_at(place, child.equation) != 0

    # -- validation -------------------------------------------------------
    def validate(self) -> None:
        if not self.equations:
            raise SpecError("at least one equation id is required", "/equations")
        if len(set(self.equations)) != len(self.equations):
            raise SpecError("duplicate equation ids", "/equations")
        for k, i in enumerate(self.equations):
            try:
                check_name(i, "equation id")
            except ValueError as exc:
                raise SpecError(str(exc), f"/equations/{k}") from None
        if not isinstance(self.order, int) or self.order < 0:
            raise SpecError("order must be a nonnegative integer", "/order")
        seen = set()
        for k, p in enumerate(self.primitives):
            ptr = f"/primitives/{k}"
            if p.label in seen:
                raise SpecError(f"duplicate primitive label {p.label!r}", ptr + "/label")
            seen.add(p.label)
            if p.equation not in self.equations:
                raise SpecError(f"unknown equation {p.equation!r}", ptr + "/equation")
            for ei, e in enumerate(p.places):
                for j in p.mu[e]:
                    if j not in self.equations:
                        raise SpecError(f"exponent for unknown equation {j!r}", f"{ptr}/places/{ei}/mu/{j}")
            if p.label not in self.mellin:
                raise SpecError(f"no Mellin series for {p.label!r}", ptr + "/mellin")
            if self.mellin[p.label].prim.places != p.places:
                raise SpecError("Mellin series places do not match", ptr + "/mellin")
        if self.charge is not None:
            self._validate_charge()

    def _validate_charge(self) -> None:
        ch = self.charge
        for j in ch.s:
            if j not in self.equations:
                raise SpecError(f"charge for unknown equation {j!r}", f"/charge/s/{j}")
        for k, p in enumerate(self.primitives):
            split = ch.split_for(p)
            if sum(u for u, _ in split.values()) != 1:
                raise SpecError(f"split values u for {p.label!r} must sum to 1", "/charge/split")
            if sum(w for _, w in split.values()) != p.weight:
                raise SpecError(f"split values w for {p.label!r} must sum to its weight", "/charge/split")
            for ei, e in enumerate(p.places):
                u, w = split[e]
                if w < 0:
                    raise SpecError("split w must be nonnegative", "/charge/split")
                for j in self.equations:
                    want = (u if j == p.equation else 0) + w * ch.s.get(j, Fraction(0))
                    if p.mu_at(e, j) != want:
                        raise SpecError(
                            f"exponent of {p.label!r} at {e!r} for {j!r} is {p.mu_at(e, j)}, "
                            f"charge relation needs {want}",
                            f"/primitives/{k}/places/{ei}/mu",
                        )

    # -- JSON ------------------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "equations": list(self.equations),
            "order": self.order,
            "primitives": [
                {
                    "label": p.label,
                    "weight": p.weight,
                    "equation": p.equation,
                    "places": [
                        {"name": e, "mu": {j: _frac_text(v) for j, v in sorted(p.mu[e].items())}}
                        for e in p.places
                    ],
                    "mellin": self.mellin[p.label].to_json(),
                }
                for p in self.primitives
            ],
        }
        if self.charge is not None:
            out["charge"] = {
                "s": {j: _frac_text(v) for j, v in sorted(self.charge.s.items())},
                "split": [
                    {"primitive": lab, "place": e, "u": _frac_text(u), "w": w}
                    for (lab, e), (u, w) in sorted(self.charge.split.items())
                ],
            }
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data) -> "DSESpec":
        return parse_spec(data)


def _need(obj, key, ptr, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise SpecError(f"missing key {key!r}", ptr)
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise SpecError(f"{key!r} has the wrong type", f"{ptr}/{key}")
    return v


def _rational(v, ptr) -> Fraction:
    try:
        if isinstance(v, bool):
            raise TypeError
        return as_fraction(v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise SpecError(f"not an exact rational: {v!r}", ptr) from None


def parse_spec(data) -> DSESpec:
    """Build a spec from parsed JSON (or a JSON string)."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}", "/") from None
    if not isinstance(data, dict):
        raise SpecError("spec must be a JSON object", "/")
    equations = _need(data, "equations", "", list)
    order = _need(data, "order", "", int)
    prims = []
    mellin = {}
    for k, pd in enumerate(_need(data, "primitives", "", list)):
        ptr = f"/primitives/{k}"
        label = _need(pd, "label", ptr, str)
        weight = _need(pd, "weight", ptr, int)
        eq = pd.get("equation", equations[0] if len(equations) == 1 else None)
        if eq is None:
            raise SpecError("missing key 'equation'", ptr)
        places = []
        mu = {}
        for ei, pl in enumerate(_need(pd, "places", ptr, list)):
            pptr = f"{ptr}/places/{ei}"
            name = _need(pl, "name", pptr, str)
            raw = pl.get("mu", {})
            if not isinstance(raw, dict):
                if len(equations) != 1:
                    raise SpecError("scalar mu needs a single-equation spec", pptr + "/mu")
                raw = {equations[0]: raw}
            mu[name] = {j: _rational(v, f"{pptr}/mu/{j}") for j, v in raw.items()}
            places.append(name)
        try:
            p = PrimitiveInfo(label, weight, eq, tuple(places), mu)
        except ValueError as exc:
            raise SpecError(str(exc), ptr) from None
        prims.append(p)
        md = pd.get("mellin", {})
        try:
            mellin[label] = MellinSeries.from_json(p, md)
        except (ValueError, KeyError, TypeError) as exc:
            raise SpecError(f"bad Mellin series: {exc}", ptr + "/mellin") from None
    charge = None
    if data.get("charge") is not None:
        cd = data["charge"]
        s = {j: _rational(v, f"/charge/s/{j}") for j, v in _need(cd, "s", "/charge", dict).items()}
        split = {}
        for k, sd in enumerate(cd.get("split", [])):
            sptr = f"/charge/split/{k}"
            place = _need(sd, "place", sptr, str)
            u = _rational(_need(sd, "u", sptr), sptr + "/u")
            w = _need(sd, "w", sptr, int)
            targets = [sd["primitive"]] if "primitive" in sd else [p.label for p in prims if place in p.places]
            if not targets:
                raise SpecError(f"no primitive has place {place!r}", sptr + "/place")
            for lab in targets:
                split[(lab, place)] = (u, w)
        charge = ChargeStructure(s, split)
    return DSESpec(list(equations), prims, mellin, order, charge)


def load_spec(path: str) -> DSESpec:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}", "/") from None
    return parse_spec(data)


def simple_spec(
    prims: Sequence[PrimitiveInfo],
    order: int,
    s: Mapping[str, Fraction] | None = None,
    split: Mapping[tuple, tuple] | None = None,
    mellin: Mapping[str, MellinSeries] | None = None,
    equations: Sequence[str] | None = None,
) -> DSESpec:
    """Convenience constructor with symbolic Mellin series by default."""
    prims = list(prims)
    if equations is None:
        equations = []
        for p in prims:
            if p.equation not in equations:
                equations.append(p.equation)
    m = {p.label: MellinSeries.symbolic(p) for p in prims}
    m.update(mellin or {})
    charge = None
    if s is not None:
        charge = ChargeStructure({j: as_fraction(v) for j, v in s.items()}, dict(split or {}))
    return DSESpec(list(equations), prims, m, order, charge)
