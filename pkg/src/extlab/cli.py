"""Command-line front end.

All inputs and outputs are JSON.  Group references inside input files are
either a catalog name (``"D4"``), a path to a group file (relative to the
referring file) or an inline group object.  Exit codes: 0 success, 1 a
mathematical check failed, 2 invalid input.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import catalog
from .cochain import DEFAULT_SIZE_BOUND, CoefficientModule, cohomology
from .errors import CheckFailure, ExtlabError, ParseError, ValidationError
from .extensions import classify_extensions, make_extension, outer_action
from .groups import (
    Group,
    Subgroup,
    abelian_invariants,
    automorphism_group,
    center,
    fingerprint,
    inner_automorphisms,
    validate_group,
)
from .iterext import classify_iterexts, iterext_from_extension, make_iterext, mod_k_outer_action, theta0_module
from .sixterm import (
    build_sequence,
    dumps,
    get_instance,
    instance_from_extension,
    make_instance,
    replay_report,
)


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple = ()
    bound: int = DEFAULT_SIZE_BOUND
    threads: int = 1
    out: str | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.bound <= 0:
            raise ValidationError("--bound must be positive")
        if self.threads <= 0:
            raise ValidationError("--threads must be positive")
        if self.extra:
            raise ValidationError(f"unknown configuration fields {sorted(self.extra)}")


# ---------------------------------------------------------------------------
# loaders


def _read_json(path: Path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}") from None


def _keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ParseError(f"{path}: missing fields {missing}")
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        raise ParseError(f"{path}: unknown fields {unknown}")


def _int_list(v, what):
    if not isinstance(v, list) or not all(isinstance(x, int) for x in v):
        raise ParseError(f"{what} must be a list of integers")
    return v


def group_from_obj(obj, where: Path) -> Group:
    _keys(obj, where, ["table"], ["name"])
    t = obj["table"]
    if not isinstance(t, list) or not all(isinstance(r, list) and all(isinstance(x, int) for x in r) for r in t):
        raise ParseError(f"{where}: table must be a list of integer rows")
    try:
        arr = np.array(t, dtype=np.int64)
    except ValueError:
        raise ParseError(f"{where}: table rows have different lengths") from None
    return validate_group(arr, name=obj.get("name"))


def load_group(ref, base: Path) -> Group:
    """Catalog name, file path or inline object."""
    if isinstance(ref, dict):
        return group_from_obj(ref, base)
    if not isinstance(ref, str):
        raise ParseError(f"{base}: group reference must be a string or an object")
    if ref in catalog.ENTRIES:
        return catalog.get(ref)
    path = (base.parent / ref) if not Path(ref).is_absolute() else Path(ref)
    return group_from_obj(_read_json(path), path)


def _load_ref(ref, base: Path, loader):
    if isinstance(ref, str):
        path = base.parent / ref
        return loader(_read_json(path), path)
    return loader(ref, base)


def extension_from_obj(obj, where: Path):
    _keys(obj, where, ["K", "G", "Q", "i", "pi"])
    K, G, Q = (load_group(obj[k], where) for k in ("K", "G", "Q"))
    return make_extension(K, G, Q, _int_list(obj["i"], "i"), _int_list(obj["pi"], "pi"))


def iterext_from_obj(obj, where: Path):
    if isinstance(obj, dict) and "extension" in obj:
        _keys(obj, where, ["extension", "P"])
        ext = _load_ref(obj["extension"], where, extension_from_obj)
        return iterext_from_extension(ext, Subgroup(ext.Q, tuple(_int_list(obj["P"], "P"))))
    _keys(obj, where, ["knp", "pqr", "G", "j", "pi"])
    knp = _load_ref(obj["knp"], where, extension_from_obj)
    pqr = _load_ref(obj["pqr"], where, extension_from_obj)
    return make_iterext(knp, pqr, load_group(obj["G"], where), _int_list(obj["j"], "j"), _int_list(obj["pi"], "pi"))


def module_from_obj(obj, where: Path) -> CoefficientModule:
    _keys(obj, where, ["actor", "coeffs"], ["action", "name"])
    actor = load_group(obj["actor"], where)
    coeffs = load_group(obj["coeffs"], where)
    if "action" not in obj:
        return CoefficientModule.trivial(actor, coeffs, name=obj.get("name"))
    action = obj["action"]
    if not isinstance(action, list) or not all(isinstance(r, list) for r in action):
        raise ParseError(f"{where}: action must be a list of permutations")
    return CoefficientModule(actor, coeffs, np.array(action, dtype=np.int64), name=obj.get("name"))


def instance_from_obj(obj, where: Path):
    if isinstance(obj, dict) and "standard" in obj:
        _keys(obj, where, ["standard"])
        return get_instance(obj["standard"])
    if isinstance(obj, dict) and "extension" in obj:
        _keys(obj, where, ["extension", "P"], ["name"])
        ext = _load_ref(obj["extension"], where, extension_from_obj)
        return instance_from_extension(obj.get("name", where.stem), ext, _int_list(obj["P"], "P"))
    _keys(obj, where, ["K", "pqr", "theta"], ["name"])
    from .extensions import outer_action_from_automorphisms

    K = load_group(obj["K"], where)
    pqr = _load_ref(obj["pqr"], where, extension_from_obj)
    theta = outer_action_from_automorphisms(pqr.G, K, obj["theta"])
    return make_instance(obj.get("name", where.stem), K, pqr, theta)


# ---------------------------------------------------------------------------
# commands (pure functions returning JSON-ready dicts)


def cmd_group_validate(path: Path, cfg: RunConfig) -> dict:
    G = load_group(str(path), Path("<argument>"))
    aut = automorphism_group(G, max(G.order, 64))
    inn, _ = inner_automorphisms(G)
    rep = {
        "valid": True,
        "name": G.name,
        "order": G.order,
        "fingerprint": fingerprint(G),
        "center": list(center(G).members),
        "aut_order": aut.order,
        "inn_order": inn.order,
        "out_order": aut.order // inn.order,
        "identified_as": catalog.identify(G),
    }
    if G.is_abelian:
        rep["abelian_invariants"] = list(abelian_invariants(G))
    return rep


def cmd_cohomology(path: Path, degree: int, cfg: RunConfig) -> dict:
    M = module_from_obj(_read_json(path), Path(path))
    H = cohomology(degree, M, cfg.bound)
    out = H.report()
    out["cocycle_count"] = H.cocycle_count
    out["coboundary_count"] = H.coboundary_count
    return out


def cmd_ext_classify(path: Path, cfg: RunConfig) -> dict:
    base = extension_from_obj(_read_json(path), Path(path))
    cohomology(2, outer_action(base).center_module, cfg.bound)  # enforce --bound up front
    recs = classify_extensions(base, threads=cfg.threads)
    return {"kind": "extensions", "count": len(recs), "classes": [r.to_json() for r in recs]}


def cmd_iterext_classify(path: Path, cfg: RunConfig) -> dict:
    base = iterext_from_obj(_read_json(path), Path(path))
    Theta = mod_k_outer_action(base)
    cohomology(2, theta0_module(base)[0], cfg.bound)
    recs = classify_iterexts(base, threads=cfg.threads)
    return {
        "kind": "iterated extensions",
        "mod_k_outer_action": list(Theta.map),
        "count": len(recs),
        "classes": [r.to_json() for r in recs],
    }


def cmd_sixterm(path: Path, cfg: RunConfig) -> dict:
    inst = instance_from_obj(_read_json(path), Path(path))
    return build_sequence(inst, threads=cfg.threads, size_bound=cfg.bound)


def cmd_replay(path: Path, cfg: RunConfig) -> dict:
    cert = _read_json(path)
    fails = replay_report(cert)
    return {"replayed": str(Path(path).name), "ok": not fails, "failures": fails}


# ---------------------------------------------------------------------------
# click wiring


def _emit(obj: dict, cfg: RunConfig):
    text = dumps(obj)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _run(fn, cfg: RunConfig, *args, ok=lambda r: True):
    try:
        res = fn(*args, cfg)
    except CheckFailure as exc:
        click.echo(f"check failed: {type(exc).__name__}: {exc}", err=True)
        sys.exit(1)
    except ExtlabError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(2)
    _emit(res, cfg)
    sys.exit(0 if ok(res) else 1)


def _common(f):
    f = click.option("--seed", type=int, default=0, envvar="EXTLAB_SEED", show_default=True,
                     help="Seed recorded for randomized checks.")(f)
    f = click.option("--out", type=click.Path(dir_okay=False), default=None, envvar="EXTLAB_OUT",
                     help="Write JSON here instead of stdout.")(f)
    f = click.option("--threads", type=int, default=1, envvar="EXTLAB_THREADS", show_default=True)(f)
    f = click.option("--bound", type=int, default=DEFAULT_SIZE_BOUND, envvar="EXTLAB_BOUND", show_default=True,
                     help="Size bound for linear systems.")(f)
    return f


def _cfg(command, path, bound, threads, out, seed) -> RunConfig:
    try:
        return RunConfig(command, (str(path),), bound, threads, out, seed)
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


@click.group()
def main():
    """Extensions, iterated extensions and their six-term exact sequence."""


@main.group()
def group():
    """Finite groups given by multiplication tables."""


@group.command("validate")
@click.argument("path")
@_common
def group_validate(path, bound, threads, out, seed):
    """Validate a group file (or catalog name) and summarize it."""
    _run(cmd_group_validate, _cfg("group validate", path, bound, threads, out, seed), path)


@main.group()
def cohomology_cmd():
    """Group cohomology with coefficients in a finite abelian module."""


main.add_command(cohomology_cmd, name="cohomology")


@cohomology_cmd.command("compute")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--degree", type=click.IntRange(1, 2), default=2, show_default=True)
@_common
def cohomology_compute(path, degree, bound, threads, out, seed):
    """Compute H^n of a module file."""
    cfg = _cfg("cohomology compute", path, bound, threads, out, seed)
    _run(lambda p, c: cmd_cohomology(p, degree, c), cfg, Path(path))


@main.group()
def ext():
    """Extensions of K by Q."""


@ext.command("classify")
@click.argument("path", type=click.Path(dir_okay=False))
@_common
def ext_classify(path, bound, threads, out, seed):
    """All extensions with the outer action of the base, one per H^2 class."""
    _run(cmd_ext_classify, _cfg("ext classify", path, bound, threads, out, seed), Path(path))


@main.group()
def iterext():
    """Iterated extensions K -> N -> G."""


@iterext.command("classify")
@click.argument("path", type=click.Path(dir_okay=False))
@_common
def iterext_classify(path, bound, threads, out, seed):
    """All iterated extensions with the mod-K outer action of the base."""
    _run(cmd_iterext_classify, _cfg("iterext classify", path, bound, threads, out, seed), Path(path))


@main.group()
def sixterm():
    """The six-term exact sequence and its certificates."""


@sixterm.command("run")
@click.argument("path", type=click.Path(dir_okay=False))
@_common
def sixterm_run(path, bound, threads, out, seed):
    """Build and check the sequence; exit 0 iff every check passes."""
    _run(cmd_sixterm, _cfg("sixterm run", path, bound, threads, out, seed), Path(path),
         ok=lambda c: c["verdict"]["ok"])


@sixterm.command("replay")
@click.argument("path", type=click.Path(dir_okay=False))
@_common
def sixterm_replay(path, bound, threads, out, seed):
    """Re-verify a saved certificate from its witnesses."""
    _run(cmd_replay, _cfg("sixterm replay", path, bound, threads, out, seed), Path(path),
         ok=lambda r: r["ok"])


if __name__ == "__main__":  # pragma: no cover
    main()
