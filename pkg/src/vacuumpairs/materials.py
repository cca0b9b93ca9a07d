"""Built-in material library and (de)serialization of dispersion models.

Each library entry is a key-value document with fields
``{name, sellmeier: [[a, l], ...], resonances: [{center, amplitude, width}...]}``.
Sellmeier ``l`` values are squared resonance wavelengths in um^2.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .dispersion import (
    ConstantIndex,
    DispersionModel,
    LorentzianResonance,
    SellmeierModel,
)


class UnknownMaterialError(KeyError):
    """Requested material is not in the library."""


@lru_cache(maxsize=1)
def _library() -> dict:
    with resources.files(__package__).joinpath("materials.json").open("r") as fh:
        return json.load(fh)


def available_materials() -> list[str]:
    return sorted(_library().keys())


def model_from_dict(doc: dict) -> DispersionModel:
    """Build a DispersionModel from a material document."""
    if "constant_index" in doc:
        base = ConstantIndex(float(doc["constant_index"]))
    elif "sellmeier" in doc:
        base = SellmeierModel(
            terms=tuple((float(a), float(l)) for a, l in doc["sellmeier"]),
            name=str(doc.get("name", "")),
        )
    else:
        raise ValueError("material document needs 'sellmeier' or 'constant_index'")
    resonances = tuple(
        LorentzianResonance(
            center=float(r["center"]),
            amplitude=float(r["amplitude"]),
            width=float(r["width"]),
        )
        for r in doc.get("resonances", ())
    )
    return DispersionModel(base=base, resonances=resonances)


def model_to_dict(model: DispersionModel) -> dict:
    """Serialize a DispersionModel to the library document format."""
    doc: dict = {}
    if isinstance(model.base, ConstantIndex):
        doc["constant_index"] = model.base.n0
    else:
        doc["name"] = model.base.name
        doc["sellmeier"] = [[a, l] for a, l in model.base.terms]
    doc["resonances"] = [
        {"center": r.center, "amplitude": r.amplitude, "width": r.width}
        for r in model.resonances
    ]
    return doc


def get_material(name: str) -> DispersionModel:
    """Look up a material by name in the built-in library."""
    try:
        doc = _library()[name]
    except KeyError:
        raise UnknownMaterialError(
            f"unknown material {name!r}; available: {', '.join(available_materials())}"
        ) from None
    return model_from_dict(doc)


def load_material_file(path) -> DispersionModel:
    """Load a single-material document from a JSON file."""
    with open(path, "r") as fh:
        return model_from_dict(json.load(fh))
