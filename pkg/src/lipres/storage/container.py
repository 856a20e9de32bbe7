# -*- coding: utf-8 -*-

"""Versioned Model Container.

One `.npz` archive; arrays are stored under `section/name` keys and an
orjson header under `__header__` describes every section. Sections:
`aam`, `aam.lips` and `hmm`. Shared mixtures are stored once, so tying
survives a round trip.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import orjson

from ..aam.model import Aam, AppearanceModel, ShapeModel
from ..errors import ModelError
from ..geometry.mesh import Triangulation
from ..geometry.shape import Shape
from ..hmm.model import Gmm, Hmm, HmmSet
from ..imaging.image import Resolution

__all__ = (
    "FORMAT",
    "VERSION",
    "ModelBundle",
    "load_models",
    "save_models",
)

FORMAT = "lipres-models"
VERSION = 1
HEADER = "__header__"


@dataclass(frozen=True)
class ModelBundle:
    """Models read from or written to one container; absent sections are None."""

    aam: Optional[Aam] = None
    lips: Optional[Aam] = None
    hmms: Optional[HmmSet] = None


def _pack_aam(aam: Aam) -> tuple[dict[str, np.ndarray], dict[str, Any]]:
    sm, am = aam.shape_model, aam.appearance_model
    arrays = {
        "shape_mean": sm.mean.points,
        "shape_modes": sm.modes,
        "shape_eigenvalues": sm.eigenvalues,
        "appearance_mean": am.mean,
        "appearance_modes": am.modes,
        "appearance_eigenvalues": am.eigenvalues,
        "mask": am.mask,
        "triangles": aam.triangulation.triangles,
        "reference": aam.reference_shape.points,
    }
    meta = {
        "kind": "aam",
        "reference_scale": aam.reference_scale,
        "native_resolution": [aam.native_resolution.width, aam.native_resolution.height],
        "landmark_indices": list(aam.landmark_indices),
        "shape_retained": sm.retained_fraction,
        "shape_total_variance": sm.total_variance,
        "appearance_retained": am.retained_fraction,
        "appearance_total_variance": am.total_variance,
    }
    return arrays, meta


def _unpack_aam(arrays: dict[str, np.ndarray], meta: dict[str, Any]) -> Aam:
    shape_model = ShapeModel(
        mean=Shape(arrays["shape_mean"]),
        modes=arrays["shape_modes"],
        eigenvalues=arrays["shape_eigenvalues"],
        retained_fraction=float(meta["shape_retained"]),
        total_variance=float(meta["shape_total_variance"]),
    )
    appearance_model = AppearanceModel(
        mean=arrays["appearance_mean"],
        modes=arrays["appearance_modes"],
        eigenvalues=arrays["appearance_eigenvalues"],
        mask=arrays["mask"].astype(bool),
        retained_fraction=float(meta["appearance_retained"]),
        total_variance=float(meta["appearance_total_variance"]),
    )
    width, height = meta["native_resolution"]
    return Aam(
        shape_model=shape_model,
        appearance_model=appearance_model,
        triangulation=Triangulation(arrays["triangles"]),
        reference_shape=Shape(arrays["reference"]),
        reference_scale=float(meta["reference_scale"]),
        native_resolution=Resolution(int(width), int(height)),
        landmark_indices=tuple(int(i) for i in meta["landmark_indices"]),
    )


def _pack_hmms(hmms: HmmSet) -> tuple[dict[str, np.ndarray], dict[str, Any]]:
    gmms = hmms.gmms()
    index = {id(g): k for k, g in enumerate(gmms)}
    arrays: dict[str, np.ndarray] = {"var_floor": hmms.var_floor}
    for k, gmm in enumerate(gmms):
        arrays[f"gmm{k}_weights"] = gmm.weights
        arrays[f"gmm{k}_means"] = gmm.means
        arrays[f"gmm{k}_variances"] = gmm.variances
    models = []
    for label, hmm in hmms.models.items():
        arrays[f"trans_{label}"] = hmm.transitions
        models.append({"label": label, "states": [index[id(g)] for g in hmm.states]})
    meta = {
        "kind": "hmm",
        "n_gmms": len(gmms),
        "models": models,
        "tied": [[list(member) for member in group] for group in hmms.tied],
        "history": list(hmms.history),
    }
    return arrays, meta


def _unpack_hmms(arrays: dict[str, np.ndarray], meta: dict[str, Any]) -> HmmSet:
    gmms = [
        Gmm(arrays[f"gmm{k}_weights"], arrays[f"gmm{k}_means"], arrays[f"gmm{k}_variances"])
        for k in range(int(meta["n_gmms"]))
    ]
    models = {}
    for item in meta["models"]:
        label = item["label"]
        models[label] = Hmm(label, arrays[f"trans_{label}"], [gmms[k] for k in item["states"]])
    tied = [tuple((str(label), int(state)) for label, state in group) for group in meta["tied"]]
    return HmmSet(
        models=models,
        var_floor=arrays["var_floor"],
        tied=tied,
        history=[float(x) for x in meta["history"]],
    )


def save_models(
    file: Union[str, Path],
    aam: Optional[Aam] = None,
    lips: Optional[Aam] = None,
    hmms: Optional[HmmSet] = None,
) -> Path:
    """Write the given models into one container."""
    sections: dict[str, tuple[dict[str, np.ndarray], dict[str, Any]]] = {}
    if aam is not None:
        sections["aam"] = _pack_aam(aam)
    if lips is not None:
        sections["aam.lips"] = _pack_aam(lips)
    if hmms is not None:
        sections["hmm"] = _pack_hmms(hmms)
    if not sections:
        raise ModelError("nothing to save")

    header = {"format": FORMAT, "version": VERSION, "sections": {name: meta for name, (_, meta) in sections.items()}}
    payload = {HEADER: np.frombuffer(orjson.dumps(header, option=orjson.OPT_SORT_KEYS), dtype=np.uint8)}
    for name, (arrays, _) in sections.items():
        for key, value in arrays.items():
            payload[f"{name}/{key}"] = np.asarray(value)
    path = Path(file)
    with open(path, "wb") as fp:
        np.savez_compressed(fp, **payload)
    return path


def load_models(file: Union[str, Path]) -> ModelBundle:
    """Read every section of a container written by `save_models`."""
    try:
        with np.load(file, allow_pickle=False) as archive:
            payload = {key: archive[key] for key in archive.files}
    except (OSError, ValueError) as e:
        raise ModelError(f"{file}: not a model container ({e})") from None
    if HEADER not in payload:
        raise ModelError(f"{file}: container header missing")
    header = orjson.loads(payload.pop(HEADER).tobytes())
    if header.get("format") != FORMAT:
        raise ModelError(f"{file}: unknown container format `{header.get('format')}`")
    if header.get("version") != VERSION:
        raise ModelError(f"{file}: container version {header.get('version')} unsupported, expected {VERSION}")

    found: dict[str, Any] = {}
    for name, meta in header["sections"].items():
        prefix = f"{name}/"
        arrays = {key[len(prefix) :]: value for key, value in payload.items() if key.startswith(prefix)}
        try:
            if meta["kind"] == "aam":
                found[name] = _unpack_aam(arrays, meta)
            elif meta["kind"] == "hmm":
                found[name] = _unpack_hmms(arrays, meta)
            else:
                raise ModelError(f"{file}: unknown section kind `{meta['kind']}`")
        except KeyError as e:
            raise ModelError(f"{file}: section `{name}` lacks {e}") from None
    return ModelBundle(aam=found.get("aam"), lips=found.get("aam.lips"), hmms=found.get("hmm"))
