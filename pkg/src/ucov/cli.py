"""Command-line entry point: ``ucov <subcommand> ...``.

Exit status: 0 on success, 1 when a verification fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, IncompleteCertificate, ResourceLimitError, UcovError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
log = logging.getLogger("ucov")


class VerificationFailed(Exception):
    """Raised by a handler after writing its output, to request exit status 1."""


@dataclass
class RunConfig:
    subcommand: str
    q: int | None = None
    seed: int = 0
    budget: int | None = None
    jobs: int = 1
    cache_dir: str | None = None
    fmt: str = "json"
    out: str | None = None
    verbosity: int = 0
    options: dict = field(default_factory=dict)
    inputs: list = field(default_factory=list)  # paths read by the run, hashed into the manifest


# ---------------------------------------------------------------------------
# output helpers


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _jsonable(v) for k, v in r.items()})
    return buf.getvalue()


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def emit(cfg: RunConfig, text: str) -> None:
    data = text.encode()
    if cfg.out:
        p = Path(cfg.out)
        try:
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_bytes(data)
        except OSError as e:
            raise DomainError(f"cannot write {p}: {e}") from e
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    write_manifest(cfg, data)


def manifest_path(cfg: RunConfig) -> Path:
    if cfg.out:
        return Path(cfg.out + ".manifest.json")
    from .cache import cache_dir

    return cache_dir(cfg.cache_dir) / "manifests" / f"{cfg.subcommand}.manifest.json"


def write_manifest(cfg: RunConfig, output: bytes) -> Path | None:
    inputs = {}
    for path in cfg.inputs:
        try:
            inputs[str(path)] = _sha256(Path(path).read_bytes())
        except OSError:
            inputs[str(path)] = None
    conf = asdict(cfg)
    conf.pop("inputs")
    conf.pop("verbosity")
    man = {
        "tool": "ucov",
        "version": __version__,
        "config": _jsonable(conf),
        "inputs": inputs,
        "output_sha256": _sha256(output),
    }
    p = manifest_path(cfg)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")
    except OSError as e:
        log.warning("manifest not written: %s", e)
        return None
    return p


def _q(cfg: RunConfig) -> int:
    from .fields import as_prime_power

    if cfg.q is None:
        raise DomainError("--q is required")
    return as_prime_power(cfg.q).q


def _table(cfg: RunConfig):
    from .cache import load_or_build

    t, status = load_or_build(_q(cfg), cfg.cache_dir)
    log.info("U3(%d) table %s", t.q, status)
    return t, status


# ---------------------------------------------------------------------------
# handlers


def cmd_field(cfg: RunConfig) -> None:
    from .fields import as_prime_power, make_field

    pp = as_prime_power(_q(cfg))
    F = make_field(pp.p, pp.a)
    k = min(cfg.options.get("samples", 8), F.order)
    out = {
        "order": F.order,
        "p": F.p,
        "k": F.k,
        "modulus": list(F.modulus),
        "generator": F.gen,
        "generator_digits": F.digits(F.gen),
    }
    if F.tabled:
        out["exp"] = [int(v) for v in F.exp[:k]]
        out["add_table"] = [[F.add(a, b) for b in range(k)] for a in range(k)]
        out["mul_table"] = [[F.mul(a, b) for b in range(k)] for a in range(k)]
    emit(cfg, to_json(out))


def cmd_geometry(cfg: RunConfig) -> None:
    from .geometry import plane, self_polar_count

    q = _q(cfg)
    pl = plane(q)
    counts = pl.line_absolute_counts
    hist = {int(v): int(c) for v, c in zip(*np.unique(counts, return_counts=True))}
    out = {
        "q": q,
        "points": int(pl.n_points),
        "absolute": int(len(pl.absolute_ids)),
        "nonabsolute": int(len(pl.nonabsolute_ids)),
        "line_absolute_histogram": hist,
        "self_polar_triangles_formula": self_polar_count(q),
    }
    if q <= 5:
        out["self_polar_triangles_enumerated"] = int(len(pl.self_polar_triangles))
    if cfg.fmt == "csv":
        rows = [{"id": int(i), "x": c[0], "y": c[1], "z": c[2]} for i in pl.absolute_ids for c in [pl.coords[int(i)].tolist()]]
        emit(cfg, to_csv(rows))
        return
    out["absolute_points"] = [pl.coords[int(i)].tolist() for i in pl.absolute_ids]
    emit(cfg, to_json(out))
    if "self_polar_triangles_enumerated" in out and out["self_polar_triangles_enumerated"] != out["self_polar_triangles_formula"]:
        raise VerificationFailed("self-polar census disagrees with the closed form")


def cmd_group(cfg: RunConfig) -> None:
    from .cache import cache_path, load_or_build
    from .group import group_order

    q = _q(cfg)
    t, status = load_or_build(q, cfg.cache_dir, rebuild=cfg.options.get("rebuild", False))
    out = {
        "q": q,
        "order": t.order,
        "order_formula": group_order(q),
        "cache": str(cache_path(q, cfg.cache_dir)),
        "cache_status": status,
        "format": "UCOV1",
    }
    emit(cfg, to_json(out))
    if t.order != group_order(q):
        raise VerificationFailed("group order disagrees with the formula")


def cmd_classify(cfg: RunConfig) -> None:
    from .group import imaginary_triangle_batch, type_census

    t, _ = _table(cfg)
    census = type_census(t)
    ids = np.flatnonzero(t.etype == 3)
    sample = cfg.options.get("sample")
    if sample and len(ids) > sample:
        ids = np.sort(np.random.default_rng(cfg.seed).choice(ids, size=sample, replace=False))
    batch = imaginary_triangle_batch(t, ids)
    viol = {k: int(v) for k, v in batch.violations.items() if v}
    out = {"q": t.q, "census": census, "type3_checked": int(len(ids)), "violations": viol}
    emit(cfg, to_json(out))
    if viol:
        raise VerificationFailed(f"imaginary-triangle invariants fail: {viol}")


def cmd_graph(cfg: RunConfig) -> None:
    from .geometry import self_polar_count
    from .graph import build_graph, m_formula, triangle_census, write_dimacs

    q = _q(cfg)
    g = build_graph(q)
    if cfg.fmt == "dimacs":
        if not cfg.out:
            raise DomainError("--format dimacs needs --out")
        write_dimacs(g, cfg.out)
        write_manifest(cfg, Path(cfg.out).read_bytes())
        return
    tri = triangle_census(g)
    out = {
        "q": q,
        "vertices": g.n,
        "edges": int(np.triu(g.adj, 1).sum()),
        "loops": int(g.loops.sum()),
        "triangles": tri,
        "self_polar_triangles": self_polar_count(q),
        "m_formula": m_formula(q),
    }
    emit(cfg, to_json(out))
    if tri != self_polar_count(q):
        raise VerificationFailed("triangle census disagrees with the self-polar census")


def _trifree_subset(cfg: RunConfig, method: str):
    from .graph import VertexSubset, build_graph, greedy_trifree, subset_from_json, trifree_exact, trifree_search

    q = _q(cfg)
    if method == "none":
        return VertexSubset((), True), {}
    g = build_graph(q)
    if method == "greedy":
        return greedy_trifree(g, seed=cfg.seed), {}
    if method == "search":
        r = trifree_search(g, seed=cfg.seed, budget=cfg.budget or 10**5)
        return r.subset, {"moves": r.moves}
    if method == "exact":
        r = trifree_exact(g, node_limit=cfg.budget)
        return r.subset, {"optimum": r.optimum, "nodes": r.nodes}
    if method == "file":
        path = cfg.options.get("subset")
        if not path:
            raise DomainError("--trifree file needs --subset PATH")
        cfg.inputs.append(path)
        return subset_from_json(Path(path).read_text(), g), {}
    raise DomainError(f"unknown trifree method {method}")


def cmd_trifree(cfg: RunConfig) -> None:
    from .graph import m_formula

    method = cfg.options.get("method", "search")
    sub, extra = _trifree_subset(cfg, method)
    out = {"q": _q(cfg), "method": method, "size": len(sub), "ids": list(sub.ids), "triangle_free": sub.verified, "m_formula": m_formula(_q(cfg))}
    out.update(extra)
    emit(cfg, to_json(out))
    if not sub.verified:
        raise VerificationFailed("subset is not triangle-free")


def cmd_cover(cfg: RunConfig) -> None:
    from .cover import build_cover, verify_cover

    method = cfg.options.get("trifree", "none")
    sub, extra = _trifree_subset(cfg, method)
    t, _ = _table(cfg)
    c = build_cover(t.q, sub, t)
    out = {"q": t.q, "trifree": method, "S_size": len(sub), "subgroups": len(c), "declared_size": c.declared_size}
    out.update(extra)
    ok = True
    if cfg.options.get("verify"):
        cert = verify_cover(c, t)
        out["certificate"] = cert.as_dict()
        ok = cert.ok
    emit(cfg, to_json(out))
    if not ok:
        raise VerificationFailed("cover verification found an uncovered element")


def cmd_bounds(cfg: RunConfig) -> None:
    from .cover import bounds
    from .fields import prime_powers

    lo, hi = cfg.options.get("q_min", 7), cfg.options.get("q_max", 32)
    if lo > hi:
        raise DomainError("--q-min exceeds --q-max")
    rows = []
    for q in prime_powers(lo, hi):
        r = bounds(q).as_dict()
        rows.append(r)
    emit(cfg, to_csv(rows) if cfg.fmt == "csv" else to_json(rows))


def cmd_sigma(cfg: RunConfig) -> None:
    from .sigma import CoverInstance, exact_sigma, expand_cover, lp_lower_bound, sigma_of_group, small_group, su3_model
    from .sigma.u3 import sigma_u3

    kind = cfg.options.get("group", "u3")
    lp_only = cfg.options.get("lp_only", False)
    budget = cfg.budget or 10**6
    report: dict = {"group": kind}
    inst = cover_sets = None
    if kind == "file":
        path = cfg.options.get("instance")
        if not path:
            raise DomainError("--group file needs --instance PATH")
        cfg.inputs.append(path)
        inst = CoverInstance.from_json(Path(path).read_text())
        if lp_only:
            b = lp_lower_bound(inst)
            report.update(lp=b.value, lp_ceil=b.ceil, method=b.method)
        else:
            r = exact_sigma(inst, budget=budget, jobs=cfg.jobs)
            report.update(r.as_dict())
    elif kind == "small":
        name = cfg.options.get("name")
        if not name:
            raise DomainError("--group small needs --name")
        g = small_group(name)
        report["name"] = name
        if lp_only and not g.is_cyclic():
            from .sigma import all_subgroups_brute, reduce_instance

            inst = reduce_instance(g, all_subgroups_brute(g))
            b = lp_lower_bound(inst)
            report.update(lp=b.value, lp_ceil=b.ceil, method=b.method)
        else:
            gs = sigma_of_group(g, budget=budget)
            report["sigma"] = gs.sigma
            if gs.result is not None:
                report.update({k: v for k, v in gs.result.as_dict().items() if k != "sigma"})
            inst = gs.instance
    elif kind in ("u3", "su3"):
        q = _q(cfg)
        report["q"] = q
        if kind == "su3" and q == 2:
            gs = sigma_of_group(su3_model(2), budget=budget)
            report.update(sigma=gs.sigma, method="brute force on SU3(2)")
            report.update({k: v for k, v in gs.result.as_dict().items() if k != "sigma"})
            inst = gs.instance
        else:
            from .group import center_order

            t, _ = _table(cfg)
            if lp_only:
                from .sigma import harvest_maximals_u3, reduce_instance

                L = harvest_maximals_u3(q, t, seed=cfg.seed)
                L.require_complete()
                inst = reduce_instance(t, L)
                b = lp_lower_bound(inst)
                report.update(lp=b.value, lp_ceil=b.ceil, method=b.method)
            else:
                res = sigma_u3(q, t, seed=cfg.seed, budget=budget, jobs=cfg.jobs)
                report.update(res.as_dict())
                inst = res.instance
                cover_sets = [res.maximals.sets[j] for j in expand_cover(res.instance, res.result.cover)]
                if kind == "su3" and center_order(q) > 1:
                    report["method"] = "U3(q) value; SU3(q) is perfect with center of order 3 and every maximal subgroup contains the center"
                elif kind == "su3":
                    report["method"] = "SU3(q) = U3(q) (trivial center)"
    else:
        raise DomainError(f"unknown group kind {kind}")
    emit_inst = cfg.options.get("emit_instance")
    if emit_inst and inst is not None:
        Path(emit_inst).write_text(inst.to_json())
    emit_cover = cfg.options.get("emit_cover")
    if emit_cover and "cover" in report:
        payload = {"columns": report["cover"]}
        if cover_sets is not None:
            payload["subgroups"] = [np.asarray(s).tolist() for s in cover_sets]
        Path(emit_cover).write_text(to_json(payload))
    if cfg.fmt == "text":
        val = report.get("sigma", report.get("lp"))
        if val is None:
            val = f"[{report.get('lower')}, {report.get('upper')}]"
        emit(cfg, f"{_jsonable(val)}\n")
    else:
        emit(cfg, to_json(report))


HANDLERS = {
    "field": cmd_field,
    "geometry": cmd_geometry,
    "group": cmd_group,
    "classify": cmd_classify,
    "graph": cmd_graph,
    "trifree": cmd_trifree,
    "cover": cmd_cover,
    "bounds": cmd_bounds,
    "sigma": cmd_sigma,
}


def dispatch(cfg: RunConfig) -> int:
    handler = HANDLERS.get(cfg.subcommand)
    if handler is None:
        log.error("unknown subcommand %s", cfg.subcommand)
        return EXIT_USAGE
    try:
        handler(cfg)
    except VerificationFailed as e:
        log.error("verification failed: %s", e)
        return EXIT_FAIL
    except (DomainError, ValueError) as e:
        log.error("%s", e)
        return EXIT_USAGE
    except IncompleteCertificate as e:
        log.error("%s", e)
        return EXIT_FAIL
    except ResourceLimitError as e:
        log.error("resource limit: %s", e)
        return EXIT_FAIL
    except UcovError as e:
        log.error("%s", e)
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--cache-dir", default=None, help="defaults to $UCOV_CACHE_DIR or ~/.cache/ucov")
    common.add_argument("--out", default=None)
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="ucov", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ucov {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def add(name, formats=("json",), default="json", **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.add_argument("--format", dest="fmt", choices=formats, default=default)
        return sp

    sp = add("field", help="field tables")
    sp.add_argument("--q", type=int, required=True, help="field order")
    sp.add_argument("--samples", type=int, default=8)

    sp = add("geometry", ("json", "csv"), help="Hermitian plane censuses")
    sp.add_argument("--q", type=int, required=True)

    sp = add("group", help="build or load the U3(q) table cache")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--rebuild", action="store_true")

    sp = add("classify", help="element type census")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--sample", type=int, default=None, help="check this many Type3 elements")

    sp = add("graph", ("json", "dimacs"), help="polarity graph")
    sp.add_argument("--q", type=int, required=True)

    sp = add("trifree", help="triangle-free vertex sets")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--method", choices=("greedy", "search", "exact", "file"), default="search")
    sp.add_argument("--subset", default=None)

    sp = add("cover", help="explicit cover of U3(q)")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--trifree", choices=("none", "greedy", "search", "exact", "file"), default="none")
    sp.add_argument("--subset", default=None)
    sp.add_argument("--verify", action="store_true")

    sp = add("bounds", ("json", "csv"), help="lower and upper bounds over a range of q")
    sp.add_argument("--q-min", type=int, default=7)
    sp.add_argument("--q-max", type=int, default=32)

    sp = add("sigma", ("text", "json"), default="text", help="exact covering numbers")
    sp.add_argument("--group", choices=("u3", "su3", "file", "small"), default="u3")
    sp.add_argument("--q", type=int, default=None)
    sp.add_argument("--name", default=None, help="small group name, with --group small")
    sp.add_argument("--instance", default=None, help="cover instance JSON, with --group file")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--lp-only", action="store_true")
    sp.add_argument("--emit-cover", default=None)
    sp.add_argument("--emit-instance", default=None)
    return p


_GLOBAL = {"subcommand", "q", "seed", "budget", "jobs", "cache_dir", "fmt", "out", "verbose", "exact"}


def parse_config(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    opts = {k: v for k, v in vars(ns).items() if k not in _GLOBAL}
    return RunConfig(
        subcommand=ns.subcommand,
        q=getattr(ns, "q", None),
        seed=ns.seed,
        budget=ns.budget,
        jobs=ns.jobs,
        cache_dir=ns.cache_dir,
        fmt=ns.fmt,
        out=ns.out,
        verbosity=ns.verbose,
        options=opts,
    )


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as e:
        return int(e.code or 0) and EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity, 2), format="ucov: %(message)s")
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
