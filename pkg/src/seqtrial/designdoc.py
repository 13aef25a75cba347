"""Versioned JSON design-document schema.

A design document is the on-disk/wire form of a TrialDesign: every field
explicit, probabilities as decimals, seeds as unsigned integers.  The
loader validates structurally and reports the offending field path, so a
bad document fails fast with an actionable message.
"""

from __future__ import annotations

import json

from .betamath import BetaParams
from .engine import ArmPriors, Schedule, TrialDesign, UtilitySpec
from .errors import ConfigurationError

__all__ = ["SCHEMA_VERSION", "DesignValidationError", "design_to_dict", "design_from_dict",
           "load_design", "dump_design"]

SCHEMA_VERSION = 1


class DesignValidationError(ConfigurationError):
    """A design document failed validation; `path` names the bad field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _get(doc, path, key, kind, required=True, default=None):
    here = f"{path}.{key}" if path else key
    if key not in doc:
        if required:
            raise DesignValidationError(here, "missing required field")
        return default
    value = doc[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DesignValidationError(here, f"expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise DesignValidationError(here, f"expected an integer, got {value!r}")
        return value
    if kind is dict:
        if not isinstance(value, dict):
            raise DesignValidationError(here, f"expected an object, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise DesignValidationError(here, f"expected a string, got {value!r}")
        return value
    raise AssertionError(kind)


def _beta_params(doc, path):
    alpha = _get(doc, path, "alpha", float)
    beta = _get(doc, path, "beta", float)
    try:
        return BetaParams(alpha, beta)
    except Exception as exc:
        raise DesignValidationError(path, str(exc)) from exc


def _arm_priors(doc, path):
    return ArmPriors(
        control=_beta_params(_get(doc, path, "control", dict), f"{path}.control"),
        experimental=_beta_params(_get(doc, path, "experimental", dict), f"{path}.experimental"),
    )


def design_from_dict(doc: dict) -> TrialDesign:
    if not isinstance(doc, dict):
        raise DesignValidationError("", "design document must be a JSON object")
    version = _get(doc, "", "schema_version", int, required=False, default=SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise DesignValidationError("schema_version", f"unsupported version {version}")
    priors = _get(doc, "", "priors", dict)
    prior_e = _arm_priors(_get(priors, "priors", "efficacy", dict), "priors.efficacy")
    prior_f = _arm_priors(_get(priors, "priors", "futility", dict), "priors.futility")

    sched_doc = _get(doc, "", "schedule", dict, required=False, default={"type": "every", "step": 1})
    sched_type = _get(sched_doc, "schedule", "type", str, required=False, default="every")
    if sched_type == "every":
        schedule = Schedule(step=_get(sched_doc, "schedule", "step", int, required=False, default=1))
    elif sched_type == "explicit":
        pts = sched_doc.get("points")
        if not isinstance(pts, list) or not all(isinstance(p, int) for p in pts):
            raise DesignValidationError("schedule.points", "expected a list of integers")
        schedule = Schedule(points=tuple(pts))
    else:
        raise DesignValidationError("schedule.type", f"unknown type {sched_type!r}")

    util_doc = _get(doc, "", "utilities", dict, required=False, default={})
    utilities = UtilitySpec(
        gain_efficacy=_get(util_doc, "utilities", "gain_efficacy", float, required=False, default=2500.0),
        gain_futility=_get(util_doc, "utilities", "gain_futility", float, required=False, default=500.0),
        loss_efficacy=_get(util_doc, "utilities", "loss_efficacy", float, required=False, default=1000.0),
        loss_futility=_get(util_doc, "utilities", "loss_futility", float, required=False, default=1000.0),
        cost_per_patient=_get(util_doc, "utilities", "cost_per_patient", float, required=False, default=1.0),
        inconclusive_value=_get(util_doc, "utilities", "inconclusive_value", float, required=False, default=0.0),
    )
    try:
        return TrialDesign(
            prior_e=prior_e,
            prior_f=prior_f,
            eps_e=_get(doc, "", "eps_e", float),
            eps_f=_get(doc, "", "eps_f", float),
            delta=_get(doc, "", "delta", float),
            n_max=_get(doc, "", "n_max", int),
            horizon=_get(doc, "", "horizon", int, required=False, default=_get(doc, "", "n_max", int)),
            schedule=schedule,
            utilities=utilities,
            forward_reps=_get(doc, "", "forward_reps", int, required=False, default=1000),
            tail_mc_n=_get(doc, "", "tail_mc_n", int, required=False, default=1000),
            burn_in=_get(doc, "", "burn_in", int, required=False, default=0),
        )
    except DesignValidationError:
        raise
    except Exception as exc:
        raise DesignValidationError("design", str(exc)) from exc


def design_to_dict(design: TrialDesign) -> dict:
    def beta(p: BetaParams):
        return {"alpha": p.alpha, "beta": p.beta}

    sched = (
        {"type": "explicit", "points": list(design.schedule.points)}
        if design.schedule.points is not None
        else {"type": "every", "step": design.schedule.step}
    )
    u = design.utilities
    return {
        "schema_version": SCHEMA_VERSION,
        "priors": {
            "efficacy": {
                "control": beta(design.prior_e.control),
                "experimental": beta(design.prior_e.experimental),
            },
            "futility": {
                "control": beta(design.prior_f.control),
                "experimental": beta(design.prior_f.experimental),
            },
        },
        "eps_e": design.eps_e,
        "eps_f": design.eps_f,
        "delta": design.delta,
        "n_max": design.n_max,
        "horizon": design.horizon,
        "schedule": sched,
        "utilities": {
            "gain_efficacy": u.gain_efficacy,
            "gain_futility": u.gain_futility,
            "loss_efficacy": u.loss_efficacy,
            "loss_futility": u.loss_futility,
            "cost_per_patient": u.cost_per_patient,
            "inconclusive_value": u.inconclusive_value,
        },
        "forward_reps": design.forward_reps,
        "tail_mc_n": design.tail_mc_n,
        "burn_in": design.burn_in,
    }


def load_design(path) -> TrialDesign:
    """Read and validate a design document; parse errors carry line numbers."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DesignValidationError(
                f"{path}:{exc.lineno}:{exc.colno}", exc.msg
            ) from exc
    return design_from_dict(doc)


def dump_design(design: TrialDesign, path) -> None:
    with open(path, "w") as fh:
        json.dump(design_to_dict(design), fh, indent=2, sort_keys=True)
        fh.write("\n")
