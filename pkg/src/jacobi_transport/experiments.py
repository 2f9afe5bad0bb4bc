"""Finite-scale reproductions of the ac-spectrum / transport dichotomy.

Every limit ``L -> inf`` is replaced by a sweep over a finite ``L_list`` and a
regression-based classifier.  Verdicts are heuristics at desk scale, not
theorem checks.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .errors import NumericalQualityWarning, ValidationError
from .leads import Lead
from .models import GOLDEN, JacobiModel, ModelError
from .periodic import periodize
from .spectral import EnergyGrid, tm_inverse_square_integrals
from .transfer import transfer_log_norms
from .transport import TWO_PI, EBBSpec, crystalline_current, lb_transmittance, steady_current, thouless_current

QUANTITIES = ("steady_current", "thouless_current", "crystalline_current", "tm_inverse_square_integral")
CURRENTS = QUANTITIES[:3]
DEFAULT_L_LIST = tuple(10 * 2**n for n in range(6))
LOG_FLOOR = 1e-300

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

_LEAD_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["free-half-line", "wide-band", "periodic-half-line", "table"]},
        "params": {"type": "object"},
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ExperimentConfig",
    "type": "object",
    "additionalProperties": False,
    "required": ["model"],
    "properties": {
        "model": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {
                    "enum": ["explicit", "explicit-list", "free", "periodic", "anderson", "almost-mathieu", "fibonacci"]
                },
                "params": {"type": "object"},
                "seed": {"type": ["integer", "null"], "minimum": 0, "maximum": 2**64 - 1},
                "length": {"type": ["integer", "null"], "minimum": 1},
            },
        },
        "quantity": {"enum": list(QUANTITIES)},
        "leads": {"type": "array", "minItems": 2, "maxItems": 2, "items": _LEAD_SCHEMA},
        "lambda": _NUM,
        "lambda_s": {"type": "number", "not": {"const": 0}},
        "window": {"type": "array", "minItems": 2, "maxItems": 2, "items": _NUM},
        "L_list": {"type": "array", "minItems": 2, "items": {"type": "integer", "minimum": 1}},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 2},
                "rule": {"enum": ["midpoint", "gauss-legendre"]},
            },
        },
        "eta": {"type": "number", "minimum": 0},
        "seed": {"type": ["integer", "null"], "minimum": 0, "maximum": 2**64 - 1},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": ["string", "null"]}, "stem": {"type": "string", "minLength": 1}},
        },
        "thresholds": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"slope_min": {"type": "number", "minimum": 0}, "value_max": _POS, "floor": _POS},
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "refine_rtol": _POS,
                "nodes_per_band": {"type": "integer", "minimum": 2},
            },
        },
        "workers": {"type": "integer", "minimum": 1},
    },
}

DEFAULTS = {
    "quantity": "steady_current",
    "leads": [{"kind": "free-half-line", "params": {}}, {"kind": "free-half-line", "params": {}}],
    "lambda": 1.0,
    "lambda_s": 1.0,
    "window": [-1.0, 1.0],
    "L_list": list(DEFAULT_L_LIST),
    "grid": {"n": 2000, "rule": "midpoint"},
    "eta": 1e-6,
    "seed": None,
    "output": {"dir": None, "stem": None},
    "thresholds": {"slope_min": 0.02, "value_max": 1e-3, "floor": 1e-3},
    "tolerances": {"refine_rtol": 1e-3, "nodes_per_band": 64},
    "workers": 1,
}


def _pointer(path) -> str:
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in path)


def validate_config(raw: dict) -> None:
    """Raise :class:`ValidationError` listing every violation with its JSON pointer."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        lines = [f"{_pointer(e.absolute_path)}: {e.message}" for e in errors]
        raise ValidationError("invalid experiment config:\n  " + "\n  ".join(lines))
    if "window" in raw and not raw["window"][0] < raw["window"][1]:
        raise ValidationError("invalid experiment config:\n  /window: need mu_l < mu_r")
    L = raw.get("L_list")
    if L is not None and any(b <= a for a, b in zip(L, L[1:])):
        raise ValidationError("invalid experiment config:\n  /L_list: must be strictly increasing")


def _merge(defaults: dict, raw: dict) -> dict:
    out = copy.deepcopy(defaults)
    for k, v in raw.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in ("model",):
            out[k] = {**out[k], **v}
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass
class ExperimentConfig:
    """Validated experiment description with every default filled in."""

    model: JacobiModel
    quantity: str
    leads: tuple[Lead, Lead]
    lam: float
    lambda_s: float
    window: tuple[float, float]
    L_list: tuple[int, ...]
    grid: EnergyGrid
    thresholds: dict
    tolerances: dict
    out_dir: str | None = None
    stem: str | None = None
    workers: int = 1
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> ExperimentConfig:
        validate_config(raw)
        cfg = _merge(DEFAULTS, raw)
        model_d = dict(cfg["model"])
        if cfg["seed"] is not None:
            model_d["seed"] = cfg["seed"]
        try:
            model = JacobiModel.from_dict(model_d)
        except (ModelError, KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"invalid experiment config:\n  /model: {exc!r}") from exc
        try:
            leads = tuple(Lead.from_dict(d) for d in cfg["leads"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"invalid experiment config:\n  /leads: {exc!r}") from exc
        lo, hi = map(float, cfg["window"])
        grid = EnergyGrid(lo, hi, cfg["grid"]["n"], cfg["grid"]["rule"], cfg["eta"])
        cfg["model"] = model.to_dict()
        cfg["seed"] = model.seed
        cfg["output"]["stem"] = cfg["output"]["stem"] or cfg["quantity"]
        return cls(
            model=model,
            quantity=cfg["quantity"],
            leads=leads,
            lam=float(cfg["lambda"]),
            lambda_s=float(cfg["lambda_s"]),
            window=(lo, hi),
            L_list=tuple(cfg["L_list"]),
            grid=grid,
            thresholds=cfg["thresholds"],
            tolerances=cfg["tolerances"],
            out_dir=cfg["output"]["dir"],
            stem=cfg["output"]["stem"],
            workers=cfg["workers"],
            raw=cfg,
        )

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ValidationError("invalid experiment config:\n  /: expected an object")
        return cls.from_dict(raw)

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        with open(path) as fh:
            return cls.from_json(fh.read())

    def materialized(self) -> dict:
        """The full config, defaults included, as recorded in output metadata."""
        return copy.deepcopy(self.raw)


def log_slope(L_list, values) -> float:
    """Least-squares slope of ``log(value)`` against ``L`` (values floored at 1e-300)."""
    L = np.asarray(L_list, dtype=float)
    y = np.log(np.maximum(np.asarray(values, dtype=float), LOG_FLOOR))
    return float(np.polyfit(L, y, 1)[0])


def classify(values, slope: float, slope_min: float = 0.02, value_max: float = 1e-3, floor: float = 1e-3) -> str:
    """Three-way verdict on a sequence indexed by increasing ``L``.

    "bounded-below" additionally requires the slope not to be clearly
    negative, so that tightening ``value_max`` can only turn a decaying
    verdict into "inconclusive".  A sequence that has reached exact zero (below
    the log floor) counts as decaying whatever its fitted slope.
    """
    values = np.asarray(values, dtype=float)
    reached_zero = values[-1] <= LOG_FLOOR
    if (slope < -slope_min or reached_zero) and values[-1] < value_max:
        return "decaying-to-zero"
    if np.min(values) > floor and slope >= -slope_min:
        return "bounded-below"
    return "inconclusive"


@dataclass
class Verdict:
    quantity: str
    L_list: tuple[int, ...]
    values: np.ndarray
    slope: float
    classification: str
    thresholds: dict

    @classmethod
    def from_values(cls, quantity, L_list, values, slope_min=0.02, value_max=1e-3, floor=1e-3) -> Verdict:
        values = np.asarray(values, dtype=float)
        slope = log_slope(L_list, values)
        thr = {"slope_min": slope_min, "value_max": value_max, "floor": floor}
        return cls(quantity, tuple(int(L) for L in L_list), values, slope, classify(values, slope, **thr), thr)

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "L_list": list(self.L_list),
            "values": [float(v) for v in self.values],
            "log_slope": self.slope,
            "classification": self.classification,
            "thresholds": dict(self.thresholds),
        }


def compute_quantity(
    quantity: str,
    model: JacobiModel,
    L_list,
    leads=(Lead.free(), Lead.free()),
    lam: float = 1.0,
    lambda_s: float = 1.0,
    window=(-1.0, 1.0),
    grid: EnergyGrid | None = None,
    refine_rtol: float = 1e-3,
    nodes_per_band: int = 64,
    workers: int = 1,
) -> np.ndarray:
    """The selected quantity at every ``L`` of ``L_list``, in order."""
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}")
    window = tuple(map(float, window))
    grid = (grid or EnergyGrid(*window)).on(*window)
    if quantity == "tm_inverse_square_integral":
        vals = tm_inverse_square_integrals(model, window, L_list, grid)
        if grid.n >= 4:
            coarse = tm_inverse_square_integrals(model, window, L_list, grid.coarsened())
            moved = np.abs(vals - coarse) > refine_rtol * np.maximum(vals, 1e-300) + 1e-15
            if np.any(moved):
                warnings.warn(
                    f"transfer integral moved under grid refinement at L = {np.asarray(L_list)[moved].tolist()}",
                    NumericalQualityWarning,
                    stacklevel=2,
                )
        return np.asarray(vals, dtype=float)

    def one(L):
        if quantity == "steady_current":
            return steady_current(EBBSpec(model, L, tuple(leads), lam, window, grid), refine_rtol).current
        per = periodize(model, L, lambda_s)
        if quantity == "thouless_current":
            return thouless_current(per, window)
        return crystalline_current(per, tuple(leads), lam, window, nodes_per_band)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return np.array(list(pool.map(one, L_list)), dtype=float)
    return np.array([one(L) for L in L_list], dtype=float)


@dataclass
class ExperimentRun:
    verdict: Verdict
    metadata: dict
    warnings: list[str]
    files: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        env = {"verdict": self.verdict.to_dict(), "metadata": self.metadata, "warnings": self.warnings}
        return json.dumps(env, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["L", "value"])
        for L, v in zip(self.verdict.L_list, self.verdict.values):
            w.writerow([L, repr(float(v))])
        return buf.getvalue()


def run_experiment(config: ExperimentConfig | dict, out_dir: str | None = None) -> ExperimentRun:
    """Sweep ``config.quantity`` over ``config.L_list``, classify, and write CSV + JSON.

    Files go to ``out_dir`` (or the config's output dir); nothing is written
    when neither is set.
    """
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    tol = config.tolerances
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericalQualityWarning)
        values = compute_quantity(
            config.quantity,
            config.model,
            config.L_list,
            config.leads,
            config.lam,
            config.lambda_s,
            config.window,
            config.grid,
            refine_rtol=tol["refine_rtol"],
            nodes_per_band=tol["nodes_per_band"],
            workers=config.workers,
        )
    messages = sorted({str(c.message) for c in caught if issubclass(c.category, NumericalQualityWarning)})
    verdict = Verdict.from_values(config.quantity, config.L_list, values, **config.thresholds)
    meta = {"config": config.materialized(), "label": "finite-L heuristic"}
    run = ExperimentRun(verdict, meta, messages)
    target = out_dir or config.out_dir
    if target:
        os.makedirs(target, exist_ok=True)
        for ext, text in (("csv", run.to_csv()), ("json", run.to_json())):
            path = os.path.join(target, f"{config.stem}.{ext}")
            with open(path, "w", newline="") as fh:
                fh.write(text)
            run.files[ext] = path
    return run


def zoo() -> dict[str, JacobiModel]:
    """The shipped model zoo used by the dichotomy checks."""
    return {
        "free": JacobiModel.free(),
        "anderson-W3": JacobiModel.anderson(3.0, 7),
        "almost-mathieu-0.5": JacobiModel.almost_mathieu(0.5, GOLDEN, 0.37),
        "almost-mathieu-2.0": JacobiModel.almost_mathieu(2.0, GOLDEN, 0.37),
    }


EXPECTED_ZOO = {
    "free": "bounded-below",
    "anderson-W3": "decaying-to-zero",
    "almost-mathieu-0.5": "bounded-below",
    "almost-mathieu-2.0": "decaying-to-zero",
}


def dichotomy(models=None, quantities=QUANTITIES, L_list=DEFAULT_L_LIST, window=(-1.0, 1.0), **kwargs):
    """``{model name: {quantity: Verdict}}`` on the zoo (or the given models)."""
    models = models or zoo()
    thr = {k: kwargs.pop(k) for k in ("slope_min", "value_max", "floor") if k in kwargs}
    out = {}
    for name, model in models.items():
        out[name] = {
            q: Verdict.from_values(q, L_list, compute_quantity(q, model, L_list, window=window, **kwargs), **thr)
            for q in quantities
        }
    return out


@dataclass
class AcetReport:
    """Finite-scale comparison of the conducting set and the bounded-transfer set.

    ``conductance[i, j]`` is ``D(L_i, E_j) / 2 pi``.  The headline pairing
    compares "conductance stays above ``conductance_threshold`` for every L"
    with "``||T_E(L)||`` stays below ``threshold`` for every L".  The pairing of
    the max-over-L conductance with the min-over-L norm (the
    :func:`sigma_ac_probe` proxy) is reported as ``agreement_liminf``.
    """

    energies: np.ndarray
    L_list: tuple[int, ...]
    conductance: np.ndarray
    max_norm: np.ndarray
    min_norm: np.ndarray
    threshold: float
    conductance_threshold: float

    @property
    def conducting(self) -> np.ndarray:
        return np.min(self.conductance, axis=0) > self.conductance_threshold

    @property
    def bounded(self) -> np.ndarray:
        return self.max_norm < self.threshold

    @property
    def agreement(self) -> float:
        return float(np.mean(self.conducting == self.bounded))

    @property
    def agreement_liminf(self) -> float:
        sometimes = np.max(self.conductance, axis=0) > self.conductance_threshold
        return float(np.mean(sometimes == (self.min_norm < self.threshold)))

    def rows(self):
        """``(E, min conductance, verdict)`` per node."""
        gmin = np.min(self.conductance, axis=0)
        for E, g, c, b in zip(self.energies, gmin, self.conducting, self.bounded):
            tag = ("conducting" if c else "non-conducting") + "/" + ("bounded" if b else "growing")
            yield float(E), float(g), tag

    def summary(self) -> dict:
        return {
            "L_list": list(self.L_list),
            "nodes": len(self.energies),
            "threshold": self.threshold,
            "conductance_threshold": self.conductance_threshold,
            "conducting_fraction": float(np.mean(self.conducting)),
            "bounded_fraction": float(np.mean(self.bounded)),
            "agreement": self.agreement,
            "agreement_liminf": self.agreement_liminf,
            "label": "finite-L heuristic",
        }


def acet_sets_probe(
    model: JacobiModel,
    grid: EnergyGrid,
    L_list,
    threshold: float = 100.0,
    leads=(Lead.free(), Lead.free()),
    lam: float = 1.0,
    conductance_threshold: float | None = None,
) -> AcetReport:
    """Per-node linear-response conductance and transfer norms over ``L_list``.

    The default conductance threshold ``2 / (pi threshold^2)`` is the
    band-centre conductance of a sample whose transfer matrix has norm
    ``threshold`` between free leads.
    """
    L_list = tuple(int(L) for L in L_list)
    if conductance_threshold is None:
        conductance_threshold = 2.0 / (np.pi * threshold**2)
    E = grid.nodes
    window = (grid.lo, grid.hi)
    G = np.empty((len(L_list), len(E)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalQualityWarning)
        for i, L in enumerate(L_list):
            G[i] = lb_transmittance(EBBSpec(model, L, tuple(leads), lam, window, grid), E) / TWO_PI
    logs = transfer_log_norms(model, E, L_list)
    return AcetReport(
        E, L_list, G, np.exp(np.max(logs, axis=0)), np.exp(np.min(logs, axis=0)), threshold, conductance_threshold
    )


@dataclass
class RateTable:
    """Empirical log-slopes side by side; no theoretical rate is implied."""

    rows: list[tuple[str, str, float, str, float]]
    label: str = "empirical"

    def slope(self, model: str, quantity: str) -> float:
        for m, q, s, _, _ in self.rows:
            if m == model and q == quantity:
                return s
        raise KeyError((model, quantity))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "quantity", "log_slope", "classification", "final_value"])
        for m, q, s, c, v in self.rows:
            w.writerow([m, q, repr(s), c, repr(v)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        cols = ("model", "quantity", "log_slope", "classification", "final_value")
        return {"label": self.label, "rows": [dict(zip(cols, r)) for r in self.rows]}


def rate_report(verdicts: dict[str, dict[str, Verdict]]) -> RateTable:
    """Tabulate fitted log-slopes per (model, quantity)."""
    n = sum(len(v) for v in verdicts.values())
    if n < 2:
        raise ValueError("rate_report needs at least two verdicts")
    rows = []
    for model in sorted(verdicts):
        for q in sorted(verdicts[model]):
            v = verdicts[model][q]
            rows.append((model, q, v.slope, v.classification, float(v.values[-1])))
    return RateTable(rows)


def period2_gapped() -> JacobiModel:
    """Period-2 chain ``a = 1, b = (1, -1, ...)`` with bands ``+-[1, sqrt 5]``."""
    return JacobiModel.periodic([1.0, 1.0], [1.0, -1.0])

