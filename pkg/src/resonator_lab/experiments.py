"""End-to-end instance verification, sweeps, and comparison tables.

A record packages everything one (q, x, c, eps) instance certifies: the
exhaustive maximum, the two moment bounds, the smooth-weight minorant with
its count floor, and flags for each link of the inequality chain.  Exact
links always hold; the link that discards the principal character is
empirical at finite q and simply reported.
"""

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .arith import iterated_log
from .characters import all_char_sums, build_group, delta_max, evaluate, unit_count_below
from .errors import DomainError, ResonatorLabError
from .resonator import (
    build_weights,
    friable_minorant,
    growth_check,
    minorant_psi_bound,
    resonance_moments,
    smoothness_level,
)
from .smooth import enumerate_smooth, psi, psi_coprime, resolve_budget

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

#: Above this many characters the exhaustive maximum is skipped and the
#: record keeps only the resonance lower bound.
DELTA_CHAR_CAP = 10**7

RECORD_COLUMNS = [
    "q",
    "x",
    "c",
    "eps",
    "delta_shrink",
    "composite_mode",
    "y",
    "u",
    "prime_weight",
    "delta_exact",
    "witness_index",
    "bound_all",
    "bound_nonprincipal",
    "s1_re",
    "s1_im",
    "s2",
    "s_principal",
    "log_normalization",
    "friable_minorant",
    "psi_y",
    "psi_y_shrunk",
    "psi_floor",
    "correction",
    "r2_log",
    "r2_budget",
    "r2_ratio",
    "r2_target",
    "supplementary_ratio",
    "resonance_ok",
    "minorant_quotient_ok",
    "minorant_psi_ok",
    "chain_ok",
    "delta_vs_psi_shrunk",
    "error",
]


@dataclass(frozen=True)
class ExperimentRecord:
    q: int
    x: int
    c: float = None
    eps: float = None
    delta_shrink: float = None
    composite_mode: bool = False
    y: float = None
    u: float = None
    prime_weight: float = None
    delta_exact: float = None
    witness_index: int = None
    bound_all: float = None
    bound_nonprincipal: float = None
    s1_re: float = None
    s1_im: float = None
    s2: float = None
    s_principal: float = None
    log_normalization: float = None
    friable_minorant: float = None
    psi_y: int = None
    psi_y_shrunk: int = None
    psi_floor: float = None
    correction: float = None
    r2_log: float = None
    r2_budget: float = None
    r2_ratio: float = None
    r2_target: float = None
    supplementary_ratio: float = None
    resonance_ok: bool = None
    minorant_quotient_ok: bool = None
    minorant_psi_ok: bool = None
    chain_ok: bool = None
    delta_vs_psi_shrunk: float = None
    error: str = None
    timings: dict = field(default=None, compare=False)

    def to_obj(self, include_timings=False):
        # Non-finite floats become null so the JSON stays strictly parseable.
        obj = {}
        for name in RECORD_COLUMNS:
            value = getattr(self, name)
            if isinstance(value, float) and not math.isfinite(value):
                value = None
            obj[name] = value
        if include_timings:
            obj["timings"] = self.timings
        return obj


def verify_instance(
    q,
    x,
    c=None,
    eps=0.1,
    delta_shrink=0.05,
    composite_mode=False,
    delta_cap=DELTA_CHAR_CAP,
    budget=None,
    table=None,
):
    """Run the whole certification pipeline on one (q, x) instance.

    Exact inequalities are asserted via their flags; asymptotic claims are
    only reported as ratios.  The exhaustive maximum is computed when
    phi(q) <= delta_cap.
    """
    if not 1 <= x < q:
        raise DomainError(f"need 1 <= x < q, got x={x}, q={q}")
    timings = {}
    t_all = time.perf_counter()

    t = time.perf_counter()
    cfg = build_weights(q, x, c=c, eps=eps, composite_mode=composite_mode, table=table)
    group = build_group(q, table=table)
    timings["setup"] = time.perf_counter() - t

    t = time.perf_counter()
    profile = all_char_sums(q, x, group=group)
    timings["profile"] = time.perf_counter() - t

    delta = witness = None
    if group.char_count <= delta_cap:
        t = time.perf_counter()
        delta, _ = delta_max(x, q, profile=profile)
        witness = profile.argmax_nonprincipal
        timings["delta"] = time.perf_counter() - t

    t = time.perf_counter()
    report = resonance_moments(q, x, cfg, profile=profile)
    minorant = friable_minorant(q, x, cfg, budget=budget)
    psi_floor, correction = minorant_psi_bound(q, x, cfg, budget=budget)
    growth = growth_check(q, x, cfg)
    timings["resonance"] = time.perf_counter() - t

    t = time.perf_counter()
    if composite_mode:
        psi_y = psi_coprime(x, cfg.y, q)
        psi_y_shrunk = psi_coprime(x, cfg.y * (1.0 - delta_shrink), q)
    else:
        psi_y = psi(x, cfg.y)
        psi_y_shrunk = psi(x, cfg.y * (1.0 - delta_shrink))
    timings["smooth"] = time.perf_counter() - t

    supplementary = None
    if composite_mode:
        lhs = iterated_log(2, q)
        rhs = math.log(1 + cfg.modulus.omega) * (iterated_log(2, x) - iterated_log(3, q))
        supplementary = lhs / rhs if rhs > 0 else math.inf

    scale = max(1.0, abs(minorant), abs(report.bound_all), delta or 0.0)
    tol = 1e-9 * scale
    resonance_ok = None if delta is None else bool(report.bound_nonprincipal <= delta + tol)
    minorant_quotient_ok = bool(minorant <= report.bound_all + tol)
    minorant_psi_ok = bool(minorant >= psi_floor - correction - tol)
    chain_ok = None
    if delta is not None:
        chain_ok = bool(
            resonance_ok
            and report.bound_nonprincipal >= minorant - tol
            and minorant_psi_ok
        )

    timings["total"] = time.perf_counter() - t_all
    log.info(
        "instance q=%d x=%d: y=%.3f delta=%s bound=%.4f minorant=%.4f (%.2fs)",
        q, x, cfg.y, f"{delta:.4f}" if delta is not None else "capped",
        report.bound_nonprincipal, minorant, timings["total"],
    )
    return ExperimentRecord(
        q=int(q),
        x=int(x),
        c=cfg.c,
        eps=cfg.eps,
        delta_shrink=float(delta_shrink),
        composite_mode=bool(composite_mode),
        y=cfg.y,
        u=cfg.u,
        prime_weight=cfg.weight_value,
        delta_exact=delta,
        witness_index=witness,
        bound_all=report.bound_all,
        bound_nonprincipal=report.bound_nonprincipal,
        s1_re=report.s1.real,
        s1_im=report.s1.imag,
        s2=report.s2,
        s_principal=report.s_principal,
        log_normalization=report.log_normalization,
        friable_minorant=minorant,
        psi_y=psi_y,
        psi_y_shrunk=psi_y_shrunk,
        psi_floor=psi_floor,
        correction=correction,
        r2_log=growth.log_r2,
        r2_budget=growth.budget,
        r2_ratio=growth.ratio_vs_log_q,
        r2_target=growth.target_exponent,
        supplementary_ratio=supplementary,
        resonance_ok=resonance_ok,
        minorant_quotient_ok=minorant_quotient_ok,
        minorant_psi_ok=minorant_psi_ok,
        chain_ok=chain_ok,
        delta_vs_psi_shrunk=(
            delta / psi_y_shrunk if delta is not None and psi_y_shrunk else None
        ),
        timings=timings,
    )


@dataclass(frozen=True)
class ExperimentSpec:
    """A sweep: moduli crossed with an x rule, plus shared parameters.

    Exactly one of ``x_values`` (explicit list), ``sigma`` (x from
    log x = (log q)^sigma), or ``a_exponent`` (x = (log q)^A) must be set.
    """

    q_list: tuple
    x_values: tuple = None
    sigma: float = None
    a_exponent: float = None
    c: float = None
    eps: float = 0.1
    delta_shrink: float = 0.05
    composite_mode: bool = False
    budget: int = None
    workers: int = 1
    output_csv: str = None
    output_json: str = None

    def __post_init__(self):
        rules = [self.x_values is not None, self.sigma is not None, self.a_exponent is not None]
        if sum(rules) != 1:
            raise DomainError("exactly one x rule (x_values | sigma | a_exponent) required")
        if self.sigma is not None and not 0 < self.sigma < 0.5:
            raise DomainError(f"need 0 < sigma < 1/2, got {self.sigma}")
        if self.a_exponent is not None and self.a_exponent <= 1:
            raise DomainError(f"need A > 1, got {self.a_exponent}")

    def instances(self):
        for q in self.q_list:
            if self.x_values is not None:
                for x in self.x_values:
                    yield int(q), int(x)
            elif self.sigma is not None:
                yield int(q), int(math.exp(math.log(q) ** self.sigma))
            else:
                yield int(q), int(math.log(q) ** self.a_exponent)


def _run_instance(args):
    spec, q, x = args
    try:
        return verify_instance(
            q,
            x,
            c=spec.c,
            eps=spec.eps,
            delta_shrink=spec.delta_shrink,
            composite_mode=spec.composite_mode,
            budget=spec.budget,
        )
    except ResonatorLabError as exc:
        return ExperimentRecord(q=int(q), x=int(x), error=f"{exc.code}: {exc}")


def sweep(spec):
    """Records for every instance of the spec, in deterministic order.

    Per-instance failures become records with the ``error`` field set;
    the sweep continues.  Instances are independent, so ``workers`` > 1
    distributes them across processes without changing the output.
    Output paths on the spec, when set, are written before returning.
    """
    jobs = [(spec, q, x) for q, x in spec.instances()]
    if spec.workers and spec.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            records = list(pool.map(_run_instance, jobs, chunksize=1))
    else:
        records = [_run_instance(job) for job in jobs]
    if spec.output_csv:
        with open(spec.output_csv, "w", newline="") as handle:
            records_to_csv(records, handle)
    if spec.output_json:
        with open(spec.output_json, "w") as handle:
            handle.write(records_to_json(records))
    return records


def conjecture_probe(q, x, a_exponent, top=5, budget=None, table=None):
    """Character sums against their smooth-sum predictions, no assertions.

    Uses the level y = (log q + log^2 x) (loglog q)^A and reports, for the
    ``top`` characters ranked by |S_chi(x)|, the twisted smooth sum next to
    the character sum.  The principal row reduces to the coprime count.
    """
    if q < 16:
        raise DomainError(f"need q >= 16, got {q}")
    group = build_group(q, table=table)
    lq = math.log(q)
    level = (lq + math.log(x) ** 2) * iterated_log(2, q) ** a_exponent
    values = enumerate_smooth(x, max(2.0, level), budget=budget)
    coprime = [int(n) for n in values if math.gcd(int(n), q) == 1]

    profile = all_char_sums(q, x, group=group)
    order = sorted(
        range(1, group.char_count),
        key=lambda j: (-abs(profile.sums[j]), j),
    )
    rows = []
    for flat in order[: max(0, int(top))]:
        chi = group.character_from_flat(flat)
        twisted = complex(sum(evaluate(chi, n) for n in coprime))
        s = complex(profile.sums[flat])
        rows.append(
            {
                "char_index": flat,
                "s_re": s.real,
                "s_im": s.imag,
                "twisted_re": twisted.real,
                "twisted_im": twisted.imag,
                "diff_abs": abs(s - twisted),
            }
        )
    return {
        "q": int(q),
        "x": int(x),
        "a_exponent": float(a_exponent),
        "y": level,
        "s_principal": float(unit_count_below(group, x)),
        "psi_principal": float(len(coprime)),
        "rows": rows,
    }


def levels_table(q, x, budget=None):
    """Competing smoothness levels and the smooth counts they give.

    Counts are omitted (None) when x exceeds the enumeration budget or a
    level degenerates below 2.
    """
    if q < 16:
        raise DomainError(f"need q >= 16, got {q}")
    lq = math.log(q)
    levels = [
        ("general_character_level", 8.0 / math.e**3 * lq),
        ("real_character_level", lq / 3.0),
        ("transition_level", lq * iterated_log(2, q)),
        ("resonator_level", smoothness_level(x, q, 0.25)),
    ]
    limit = resolve_budget(budget)
    rows = []
    for name, level in levels:
        count = None
        if level >= 2 and x <= limit:
            count = psi(x, level)
        rows.append({"name": name, "y": level, "psi": count})
    largest = max(rows, key=lambda r: r["y"])["name"]
    return {"q": int(q), "x": int(x), "rows": rows, "largest": largest}


def records_to_json(records, include_timings=False):
    obj = {
        "schema_version": SCHEMA_VERSION,
        "records": [r.to_obj(include_timings=include_timings) for r in records],
    }
    return json.dumps(obj, sort_keys=True)


def records_to_csv(records, stream):
    writer = csv.DictWriter(stream, fieldnames=RECORD_COLUMNS)
    writer.writeheader()
    for record in records:
        row = {}
        for name in RECORD_COLUMNS:
            value = getattr(record, name)
            if value is None:
                row[name] = ""
            elif isinstance(value, bool):
                row[name] = str(value).lower()
            elif isinstance(value, float):
                row[name] = f"{value:.12g}"
            else:
                row[name] = value
        writer.writerow(row)
