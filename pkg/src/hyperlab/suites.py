"""Declarative experiment specs and the suite runners behind the command line.

Every suite turns an :class:`ExperimentSpec` into CSV rows plus a JSON summary.
A row's ``verdict`` is ``pass`` or ``fail`` for asserted invariants and
``report`` for quantities whose constants are not pinned down.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .anticoncentration import (
    ConePair,
    boundary_measure,
    bucket_lemma_experiment,
    exact_interval_probability,
    interval_probability,
    lemma_bucket_minimum,
)
from .concentration import (
    ConeSampleSpec,
    VectorSystem,
    cone_chernoff_experiment,
    exact_moment,
    exact_norms,
    expectation_bound,
    mc_norm_samples,
    moment_bound,
    tail_bound_rademacher,
    tail_threshold_for,
    tightest_c2,
)
from .discrepancy import best_signs_exhaustive, best_signs_random, partition_search, signed_partition_bound, signs_from_partition
from .enumeration import MAX_ENUMERATION_N
from .errors import PreconditionError
from .forms import HyperbolicForm, form_from_descriptor
from .generators import VECTOR_GENERATORS, cone_vectors
from .mixed import DeltaQuery, delta_bound, lambda_max_mixed
from .montecarlo import STREAM_INSTANCE, TailEstimate, fraction_with_ci, trial_rng
from .spectra import eigenvalues, eigenvalues_batch, rank_batch, spectral_norm

SUITES = (
    "eig",
    "norms",
    "chernoff",
    "cone_chernoff",
    "anticoncentration",
    "discrepancy",
    "kadison_singer",
    "mixed",
    "verify_all",
)

CONE_VECTOR_KINDS = {"cone_uniform": "uniform_box", "cone_rank_one": "scaled_rank_one", "cone_half_band": "half_band"}
VECTOR_KINDS = tuple(VECTOR_GENERATORS) + tuple(CONE_VECTOR_KINDS)

# column order for every CSV; each file keeps the columns its rows use
CSV_COLUMNS = (
    "suite", "family", "item", "n", "d", "k", "r", "s", "q_or_delta", "t", "tau", "rho", "R", "eps", "sigma", "mu",
    "values", "p_hat", "ci_low", "ci_high", "found_value", "lambda_max_sum", "lambda_max_mixed",
    "delta_value", "bound", "implied_constant", "verdict", "seed", "trials",
)

EIGHT_DEVIATION_FLOOR = 1.0 - 2.0 / math.e
EXACT_TAIL_MAX_N = 20
EXACT_AGREEMENT_MAX_N = 14


# ---------------------------------------------------------------------------
# spec


@dataclass(frozen=True)
class ExperimentSpec:
    suite: str
    seed: int
    family: dict | None = None
    vectors: dict | None = None
    params: dict = field(default_factory=dict)
    output: str = "hyperlab_out"

    def __post_init__(self):
        if self.suite not in SUITES:
            raise PreconditionError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise PreconditionError("seed must be an integer in [0, 2^64)")
        if not isinstance(self.params, dict):
            raise PreconditionError("params must be an object")
        if "trials" in self.params and int(self.params["trials"]) < 1:
            raise PreconditionError("trials must be >= 1")
        if self.suite == "verify_all":
            return
        if not isinstance(self.family, dict):
            raise PreconditionError(f"suite {self.suite} needs a family descriptor")
        form_from_descriptor(self.family)
        _validate_vectors(self.vectors)
        missing = [p for p in REQUIRED_PARAMS.get(self.suite, ()) if p not in self.params]
        if missing:
            raise PreconditionError(f"suite {self.suite} needs params {missing}")
        if self.suite == "anticoncentration" and not any(p in self.params for p in ("delta", "rho", "bucket")):
            raise PreconditionError("anticoncentration needs at least one of delta, rho, bucket")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        if not isinstance(data, dict):
            raise PreconditionError("experiment spec must be a JSON object")
        unknown = set(data) - {"suite", "seed", "family", "vectors", "params", "output"}
        if unknown:
            raise PreconditionError(f"unknown spec fields {sorted(unknown)}")
        if "seed" not in data:
            raise PreconditionError("an explicit seed is required")
        if "suite" not in data:
            raise PreconditionError("spec needs a suite")
        return cls(
            suite=data["suite"],
            seed=data["seed"],
            family=data.get("family"),
            vectors=data.get("vectors"),
            params=dict(data.get("params") or {}),
            output=data.get("output", "hyperlab_out"),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PreconditionError(f"spec is not valid JSON: {exc}") from None
        return cls.from_dict(data)


REQUIRED_PARAMS = {
    "cone_chernoff": ("delta",),
    "anticoncentration": ("tau",),
    "kadison_singer": ("k",),
}


def _validate_vectors(vectors) -> None:
    if not isinstance(vectors, dict):
        raise PreconditionError("vectors must be {'explicit': [...]} or {'generator': name, 'n': count}")
    if "explicit" in vectors:
        if not vectors["explicit"]:
            raise PreconditionError("explicit vector list is empty")
        return
    kind = vectors.get("generator")
    if kind not in VECTOR_KINDS:
        raise PreconditionError(f"unknown vector generator {kind!r}; choose from {', '.join(VECTOR_KINDS)}")
    if int(vectors.get("n", 0)) < 1:
        raise PreconditionError("vector count n must be >= 1")
    if kind in CONE_VECTOR_KINDS and not float(vectors.get("R", 1.0)) > 0:
        raise PreconditionError("cone generators need R > 0")


def materialize_vectors(spec: ExperimentSpec, form: HyperbolicForm) -> np.ndarray:
    """The explicit vectors, or the seeded instance drawn from the generator."""
    v = spec.vectors
    if "explicit" in v:
        return np.atleast_2d(np.asarray(v["explicit"], dtype=float))
    rng = trial_rng(spec.seed, 0, STREAM_INSTANCE)
    kind, n = v["generator"], int(v["n"])
    if kind in CONE_VECTOR_KINDS:
        return cone_vectors(form, n, rng, CONE_VECTOR_KINDS[kind], float(v.get("R", 1.0)))
    return VECTOR_GENERATORS[kind](form, n, rng)


# ---------------------------------------------------------------------------
# results


@dataclass
class SuiteResult:
    suite: str
    rows: list[dict]
    summary: dict

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if r.get("verdict") == "fail")

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def family_label(form: HyperbolicForm) -> str:
    desc = form.describe()
    parts = [f"{key}={desc[key]}" for key in ("m", "d", "k") if key in desc]
    return f"{desc['type']}({','.join(parts)})"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def rows_to_csv(rows: list[dict]) -> str:
    used = {key for row in rows for key in row}
    extra = sorted(used - set(CSV_COLUMNS))
    if extra:
        raise ValueError(f"rows carry undeclared columns {extra}")
    columns = [c for c in CSV_COLUMNS if c in used]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _tail_cols(est: TailEstimate) -> dict:
    return {"p_hat": est.p_hat, "ci_low": est.ci_low, "ci_high": est.ci_high, "trials": est.trials}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def summary_json(spec: ExperimentSpec, result: SuiteResult, threads: int | None = None) -> str:
    verdicts: dict[str, int] = {}
    for row in result.rows:
        v = row.get("verdict", "report")
        verdicts[v] = verdicts.get(v, 0) + 1
    doc = {
        "schema": 1,
        "suite": spec.suite,
        "seed": spec.seed,
        "passed": result.passed,
        "verdicts": dict(sorted(verdicts.items())),
        "results": result.summary,
        "spec": spec.to_dict(),
        "versions": {"hyperlab": __version__, "numpy": np.__version__},
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# suites


def _base(spec, form, **cols) -> dict:
    return {"suite": spec.suite, "family": family_label(form), **cols}


def suite_eig(spec, form, xs, threads):
    rows, spectra = [], []
    for i, x in enumerate(xs):
        spec_i = eigenvalues(form, x)
        spectra.append(spec_i.to_json())
        rows.append(
            _base(spec, form, item=i, d=form.degree, values=" ".join(_fmt(v) for v in spec_i.values),
                  found_value=float(spectral_norm(spec_i)), verdict="pass")
        )
    return SuiteResult(spec.suite, rows, {"spectra": spectra})


def _enumerable(sys: VectorSystem) -> None:
    if sys.n > MAX_ENUMERATION_N:
        from .errors import BudgetError

        raise BudgetError(f"suite needs exact enumeration; n={sys.n} exceeds {MAX_ENUMERATION_N}")


def suite_norms(spec, form, xs, threads):
    sys = VectorSystem(form, xs)
    _enumerable(sys)
    s = max(1, sys.max_rank)
    common = dict(n=sys.n, d=form.degree, s=s, sigma=sys.sigma, seed=spec.seed)
    rows = []
    for q in spec.params.get("q", [1, 2, 3]):
        val, bnd = exact_moment(sys, int(q), threads), moment_bound(sys.sigma, s, int(q))
        rows.append(_base(spec, form, item="moment", q_or_delta=int(q), found_value=val, bound=bnd,
                          verdict=_verdict(val <= bnd * (1 + 1e-10)), **common))
    norms = exact_norms(sys, threads=threads)
    first, second = float(np.mean(norms)), float(np.mean(norms**2))
    bnd, q_star = expectation_bound(sys.sigma, s)
    rows.append(_base(spec, form, item="expectation", q_or_delta=q_star, found_value=first, bound=bnd,
                      verdict=_verdict(first <= bnd * (1 + 1e-10)), **common))
    summary = {"sigma": sys.sigma, "s": s, "mean_norm": first, "second_moment": second}
    if first > 0:
        ratio = math.sqrt(second) / first
        rows.append(_base(spec, form, item="khinchin", found_value=ratio, bound=math.sqrt(2),
                          verdict=_verdict(1 - 1e-12 <= ratio <= math.sqrt(2) + 1e-9), **common))
        summary["khinchin_ratio"] = ratio
    return SuiteResult(spec.suite, rows, summary)


def suite_chernoff(spec, form, xs, threads):
    sys = VectorSystem(form, xs)
    s = max(1, sys.max_rank)
    points = int(spec.params.get("t_points", 50))
    total = float(np.sum(sys.norms))
    grid = total * np.arange(1, points + 1) / points
    common = dict(n=sys.n, d=form.degree, s=s, sigma=sys.sigma, seed=spec.seed)
    rows = []
    exact = sys.n <= int(spec.params.get("exact_max_n", EXACT_TAIL_MAX_N))
    if exact:
        norms = exact_norms(sys, threads=threads)
        m2 = float(np.mean(norms**2))
        for t in grid:
            p = float(np.mean(norms > t))
            bnd = tail_bound_rademacher(t, m2)
            rows.append(_base(spec, form, t=t, p_hat=p, ci_low=p, ci_high=p, bound=bnd,
                              trials=2 * len(norms), verdict=_verdict(p <= bnd + 1e-12), **common))
    else:
        trials = int(spec.params.get("trials", 20000))
        norms = mc_norm_samples(sys, trials, spec.seed, threads=threads)
        m2 = float(np.mean(norms**2))
        for t in grid:
            est = TailEstimate.from_counts(t, int(np.sum(norms > t)), trials, spec.seed)
            bnd = tail_bound_rademacher(t, m2)
            rows.append(_base(spec, form, t=t, bound=bnd, verdict=_verdict(est.ci_low <= bnd),
                              **_tail_cols(est), **common))
    c2 = tightest_c2(norms, sys.sigma, s, grid) if sys.sigma > 0 else math.inf
    summary = {"second_moment": m2, "mode": "exact_enumeration" if exact else "monte_carlo", "tightest_c2": c2}
    return SuiteResult(spec.suite, rows, summary)


# (family descriptor, generator, n, R, delta): closed-form bounds fall in [1e-3, 0.9]
CONE_CHERNOFF_GRID = (
    ({"type": "product", "m": 4}, "uniform_box", 50, 0.2, 0.5),
    ({"type": "product", "m": 4}, "uniform_box", 50, 0.2, 0.35),
    ({"type": "product", "m": 3}, "uniform_box", 40, 1.0, 0.6),
    ({"type": "product", "m": 2}, "scaled_rank_one", 60, 1.0, 0.5),
    ({"type": "det_symmetric", "d": 3}, "uniform_box", 30, 0.5, 0.5),
    ({"type": "det_symmetric", "d": 3}, "scaled_rank_one", 60, 1.0, 0.7),
    ({"type": "det_symmetric", "d": 2}, "uniform_box", 40, 1.0, 0.4),
    ({"type": "lorentz", "m": 3}, "uniform_box", 40, 1.0, 0.5),
    ({"type": "lorentz", "m": 4}, "scaled_rank_one", 60, 1.0, 0.6),
    ({"type": "product", "m": 3}, "uniform_box", 40, 1.0, 0.35),
)

VACUOUS_BOUND = 0.9


def _cone_rows(spec, form, cfg_index, sample_spec, delta, trials, threads):
    res = cone_chernoff_experiment(sample_spec, delta, trials, spec.seed, threads)
    rows = []
    for branch, tail, bnd, mu in (("max", res.max_tail, res.bound_max, res.mu_max), ("min", res.min_tail, res.bound_min, res.mu_min)):
        verdict = _verdict(tail.ci_high <= bnd) if bnd <= VACUOUS_BOUND else "report"
        rows.append(_base(spec, form, item=f"{cfg_index}:{branch}", n=sample_spec.n, d=form.degree,
                          q_or_delta=delta, t=tail.threshold, mu=mu, R=sample_spec.R, bound=bnd,
                          verdict=verdict, seed=spec.seed, **_tail_cols(tail)))
    return rows, res


def suite_cone_chernoff(spec, form, xs, threads):
    """One configuration from the spec, or every entry of ``params['grid']``."""
    trials = int(spec.params.get("trials", 20000))
    configs = spec.params.get("grid")
    rows, summary = [], []
    if configs is None:
        v = spec.vectors
        if "generator" not in v or v["generator"] not in CONE_VECTOR_KINDS:
            raise PreconditionError("cone_chernoff needs a cone generator (cone_uniform, cone_rank_one, cone_half_band)")
        configs = [{"family": form.describe(), "generator": CONE_VECTOR_KINDS[v["generator"]], "n": int(v["n"]),
                    "R": float(v.get("R", 1.0)), "delta": float(spec.params["delta"])}]
    for i, cfg in enumerate(configs):
        f = form_from_descriptor(cfg["family"])
        sample_spec = ConeSampleSpec(f, int(cfg["n"]), cfg["generator"], float(cfg["R"]))
        r, res = _cone_rows(spec, f, i, sample_spec, float(cfg["delta"]), trials, threads)
        rows += r
        summary.append({"config": cfg, "mu_max": res.mu_max, "mu_min": res.mu_min,
                        "bound_max": res.bound_max, "bound_min": res.bound_min})
    return SuiteResult(spec.suite, rows, {"configs": summary})


def cone_chernoff_grid_params(trials: int) -> dict:
    grid = [{"family": f, "generator": g, "n": n, "R": R, "delta": d} for f, g, n, R, d in CONE_CHERNOFF_GRID]
    return {"delta": 0.5, "trials": trials, "grid": grid}


def suite_anticoncentration(spec, form, xs, threads):
    tau = float(spec.params["tau"])
    trials = int(spec.params.get("trials", 20000))
    label = f"{family_label(form)}|{family_label(form)}"
    rows, summary = [], {}
    pair = ConePair(form, form, xs, -xs, tau)
    common = dict(family=label, n=pair.n, tau=tau, seed=spec.seed)
    deltas = spec.params.get("delta")
    if deltas is not None:
        deltas = sorted(float(d) for d in np.atleast_1d(deltas))
        ests = [interval_probability(pair, d, trials, spec.seed, threads) for d in deltas]
        mono = all(a.p_hat <= b.p_hat for a, b in zip(ests, ests[1:]))
        for d, est in zip(deltas, ests):
            row = dict(suite=spec.suite, item="interval", q_or_delta=d, **_tail_cols(est), **common,
                       implied_constant=est.p_hat / d, verdict=_verdict(mono))
            rows.append(row)
            window = est.details["window"]
            rows.append(dict(suite=spec.suite, item="window", q_or_delta=d, **_tail_cols(window), **common,
                             implied_constant=window.p_hat / d, verdict="report"))
            if pair.n <= EXACT_AGREEMENT_MAX_N:
                ex = exact_interval_probability(pair, d)
                rows.append(dict(suite=spec.suite, item="interval_exact", q_or_delta=d, p_hat=ex.p_hat,
                                 ci_low=ex.ci_low, ci_high=ex.ci_high, **common,
                                 verdict=_verdict(est.ci_low <= ex.p_hat <= est.ci_high)))
        summary["interval_monotone"] = mono
    if "rho" in spec.params:
        rho = float(spec.params["rho"])
        est = boundary_measure(pair, rho, trials, spec.seed, threads)
        rows.append(dict(suite=spec.suite, item="boundary", rho=rho, **_tail_cols(est), **common,
                         implied_constant=est.details["implied_constant"], verdict="report"))
        summary["boundary"] = {"alpha": est.details["alpha"], "implied_constant": est.details["implied_constant"]}
    if "bucket" in spec.params:
        b = spec.params["bucket"]
        d = form.degree
        p = int(b.get("p", math.ceil(lemma_bucket_minimum(tau, d))))
        exp = bucket_lemma_experiment(form, xs, tau, p, int(b.get("hashes", 400)), spec.seed)
        rows.append(dict(suite=spec.suite, item="bucket", k=p, p_hat=exp.frequency, ci_high=exp.ci_high,
                         bound=exp.bound, trials=exp.hashes, verdict=_verdict(exp.passed), **common))
        summary["bucket"] = {"p": p, "bad": exp.bad, "min_good": int(exp.good_counts.min())}
    return SuiteResult(spec.suite, rows, summary)


def suite_discrepancy(spec, form, xs, threads):
    sys = VectorSystem(form, xs)
    trials = int(spec.params.get("trials", 10000))
    s = max(1, sys.max_rank)
    rank_one = sys.max_rank <= 1
    common = dict(n=sys.n, d=form.degree, s=s, sigma=sys.sigma, seed=spec.seed)
    rows, summary = [], {}
    eight = 8 * sys.sigma
    search = best_signs_random(sys, trials, spec.seed, threads)
    if sys.n <= MAX_ENUMERATION_N:
        signs, opt = best_signs_exhaustive(sys, threads)
        rows.append(_base(spec, form, item="exhaustive", found_value=opt, bound=eight,
                          verdict=_verdict(opt <= eight) if rank_one else "report", **common))
        rows.append(_base(spec, form, item="dominance", found_value=opt, bound=search.value,
                          verdict=_verdict(opt <= search.value), **common))
        summary["exhaustive"] = {"value": opt, "signs": signs.signs.tolist()}
        norms = exact_norms(sys, threads=threads)
        m2 = float(np.mean(norms**2))
        if m2 > 0:
            t = tail_threshold_for(0.01, m2)
            freq = float(np.mean(norms <= t))
            rows.append(_base(spec, form, item="high_probability", t=t, p_hat=freq, ci_low=freq, ci_high=freq,
                              bound=0.99, verdict=_verdict(freq >= 0.99), **common))
    flags = search.values <= eight
    freq, lo, hi = fraction_with_ci(flags)
    rows.append(_base(spec, form, item="random_at_8sigma", t=eight, p_hat=freq, ci_low=lo, ci_high=hi,
                      found_value=search.value, bound=EIGHT_DEVIATION_FLOOR, trials=trials,
                      verdict=_verdict(hi >= EIGHT_DEVIATION_FLOOR) if rank_one else "report", **common))
    summary["random"] = {"best": search.value, "success_at_8sigma": freq}
    return SuiteResult(spec.suite, rows, summary)


def suite_kadison_singer(spec, form, xs, threads):
    k = int(spec.params["k"])
    res = partition_search(form, xs, k, int(spec.params.get("budget", 2_000_000)), spec.seed, threads)
    common = dict(n=len(xs), d=form.degree, k=k, s=res.rank, r=res.rank, eps=res.eps, sigma=res.sigma, seed=spec.seed)
    rows = [
        _base(spec, form, item=res.method, found_value=res.max_part_norm, bound=res.remark_bound,
              verdict=_verdict(res.max_part_norm <= res.remark_bound * (1 + 1e-9)), **common)
    ]
    summary = {"method": res.method, "partition": res.partition.part_of.tolist(), "part_norms": res.part_norms}
    if res.sigma > 0:
        dval = res.delta_bound()
        rows.append(_base(spec, form, item="delta_bound", found_value=res.max_part_norm, delta_value=dval,
                          bound=dval, verdict="report", **common))
        summary["delta_bound"] = dval
    if k == 2:
        sign_sys = VectorSystem(form, xs)
        signs = signs_from_partition(res.partition)
        val = float(spectral_norm(eigenvalues_batch(form, (signs.signs @ sign_sys.vectors)[None, :]))[0])
        rows.append(_base(spec, form, item="signed", found_value=val, bound=signed_partition_bound(res.eps, res.sigma),
                          verdict="report", **common))
    return SuiteResult(spec.suite, rows, summary)


def suite_mixed(spec, form, xs, threads):
    xs = np.atleast_2d(xs)
    n = len(xs)
    eig = eigenvalues_batch(form, xs)
    tot = eigenvalues_batch(form, xs.sum(axis=0)[None, :])[0]
    lam_sum = float(tot[0])
    lam_mixed = lambda_max_mixed(form, xs)
    scale = max(1.0, float(np.abs(tot).max()))
    eps = float(eig.sum(axis=1).max())
    sigma = float(np.abs(tot).max())
    r = int(rank_batch(eig).max())
    common = dict(n=n, d=form.degree, r=r, eps=eps, sigma=sigma, lambda_max_sum=lam_sum,
                  lambda_max_mixed=lam_mixed, seed=spec.seed)
    rows = [_base(spec, form, item="sum_root", bound=lam_mixed,
                  verdict=_verdict(lam_sum <= lam_mixed + 1e-7 * scale), **common)]
    summary = {"lambda_max_sum": lam_sum, "lambda_max_mixed": lam_mixed}
    if sigma > 0 and eps > 0 and r >= 1:
        dval = sigma * delta_bound(DeltaQuery(eps / sigma, n, r))
        rows.append(_base(spec, form, item="mixed_root", delta_value=dval, bound=dval,
                          verdict=_verdict(lam_mixed <= dval * (1 + 1e-6)), **common))
        summary["delta_value"] = dval
    return SuiteResult(spec.suite, rows, summary)


RUNNERS = {
    "eig": suite_eig,
    "norms": suite_norms,
    "chernoff": suite_chernoff,
    "cone_chernoff": suite_cone_chernoff,
    "anticoncentration": suite_anticoncentration,
    "discrepancy": suite_discrepancy,
    "kadison_singer": suite_kadison_singer,
    "mixed": suite_mixed,
}


def _cone(kind, n, R):
    return {"generator": kind, "n": n, "R": R}


def verify_all_battery(seed: int) -> list[ExperimentSpec]:
    """Small fixed-budget configuration of every suite."""
    P = lambda m: {"type": "product", "m": m}  # noqa: E731
    D = lambda d: {"type": "det_symmetric", "d": d}  # noqa: E731
    L = lambda m: {"type": "lorentz", "m": m}  # noqa: E731
    bucket_tau = 1.0 / (100 * math.sqrt(math.log(4)))
    bucket_n = math.ceil(4.0 / bucket_tau**2) + 1
    specs = [
        ("eig", P(3), {"explicit": [[1, 2, 3]]}, {}),
        ("eig", D(3), {"generator": "gaussian", "n": 20}, {}),
        ("eig", L(4), {"generator": "gaussian", "n": 20}, {}),
        ("eig", {"type": "elementary_symmetric", "m": 4, "k": 2}, {"generator": "gaussian", "n": 10}, {}),
        ("norms", P(4), {"generator": "gaussian", "n": 10}, {}),
        ("norms", D(3), {"generator": "rank_one", "n": 10}, {}),
        ("norms", L(3), {"generator": "unit_norm", "n": 8}, {}),
        ("chernoff", P(4), {"generator": "unit_norm", "n": 12}, {}),
        ("chernoff", D(3), {"generator": "gaussian", "n": 10}, {}),
        ("cone_chernoff", P(4), _cone("cone_uniform", 50, 0.2), cone_chernoff_grid_params(4000)),
        ("anticoncentration", P(3), _cone("cone_half_band", 12, 0.25), {"tau": 0.25, "delta": [0.1, 0.3, 1.0], "rho": 0.05, "trials": 4000}),
        ("anticoncentration", P(4), _cone("cone_half_band", bucket_n, bucket_tau), {"tau": bucket_tau, "bucket": {"hashes": 100}}),
        ("discrepancy", P(4), {"generator": "rank_one", "n": 12}, {"trials": 2000}),
        ("discrepancy", D(3), {"generator": "rank_one", "n": 12}, {"trials": 2000}),
        ("kadison_singer", P(3), _cone("cone_rank_one", 10, 1.0), {"k": 2}),
        ("kadison_singer", D(2), _cone("cone_uniform", 8, 1.0), {"k": 3}),
        ("mixed", P(3), {"explicit": [[1, 0, 0]]}, {}),
        ("mixed", D(3), _cone("cone_uniform", 4, 1.0), {}),
        ("mixed", P(4), _cone("cone_rank_one", 5, 1.0), {}),
    ]
    return [ExperimentSpec(suite, seed, fam, vec, params) for suite, fam, vec, params in specs]


def run_suite(spec: ExperimentSpec, threads: int | None = None) -> SuiteResult:
    if spec.suite == "verify_all":
        rows, summary = [], []
        for sub in verify_all_battery(spec.seed):
            res = run_suite(sub, threads)
            rows += res.rows
            summary.append({"suite": sub.suite, "family": sub.family, "failures": res.failures})
        return SuiteResult(spec.suite, rows, {"battery": summary})
    form = form_from_descriptor(spec.family)
    xs = materialize_vectors(spec, form)
    return RUNNERS[spec.suite](spec, form, xs, threads)
