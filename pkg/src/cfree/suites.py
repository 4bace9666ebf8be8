"""Verification suites: seeded trial loops wiring construction to reports.

Each suite returns (reports, notes).  Suites are deterministic functions of
the run configuration; trials are seeded individually so parallel and serial
runs would agree.  The CLI and the acceptance tests drive the same functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from .analytic import (TwoStateElement, cfree_r_at, check_centered_resolvent_identity,
                       check_htilde_sum_identity, check_linearization_analytic, h,
                       k, k_inverse_numeric, realize_cfree_pair, realize_free_copies)
from .embeddings import (OperatorPair, adjoint_compatibility_check, embed_boolean,
                         embed_cfree, embed_free, embed_monotone, embed_orthogonal,
                         operator_norm)
from .errors import ConfigError
from .freecopies import (alternating_product_at_eta_tilde, build_free_copy_context,
                         rho)
from .independence import (check_boolean, check_cfree, check_free, check_monotone,
                           check_orthogonal)
from .reports import CheckReport, expect_failure, make_report
from .series import (TruncatedLaurentSeries, cfree_r_transform,
                     check_linearization_series, compositional_inverse,
                     free_r_from_moments, identity_series, k_series,
                     series_from_moments)
from .spaces import (ALPHA, BETA, H_SIDE, K_SIDE, BasisWord, PointedSpace,
                     cached_product_basis)
from .states import (MomentData, alternating_word_vector, moment_data,
                     moments_of_matrix, psi_center, psi_value, random_pair,
                     random_selfadjoint, trial_rng, vector_state)

SUITES = ("cfree", "free-copies", "specializations", "lambda-properties",
          "psi-product", "linearization-series", "linearization-analytic",
          "haagerup-lemmas", "all")

SERIES_SUITES = ("linearization-series",)

DEFAULT_DEPTH = {
    "cfree": 6,
    "free-copies": 8,
    "specializations": 6,
    "lambda-properties": 5,
    "psi-product": 6,
    "linearization-series": 10,
    "linearization-analytic": 7,
    "haagerup-lemmas": 9,
}

DEFAULT_TRIALS = {
    "free-copies": 3,
    "linearization-analytic": 2,
}


@dataclass
class RunConfig:
    """CLI-facing configuration; unset depth/order fall back per suite."""

    suite: str = "all"
    dims: tuple = (3, 3, 3, 3)
    depth: int | None = None
    order: int | None = None
    seed: int = 0
    trials: int | None = None
    tol: float = 1e-9
    out: str = "reports"
    fmt: str = "json"
    figures: bool = True
    trace: bool = False
    trace_rows: list = field(default_factory=list, repr=False)

    def depth_for(self, suite: str) -> int:
        return self.depth if self.depth is not None else DEFAULT_DEPTH[suite]

    def order_or(self, default: int) -> int:
        return self.order if self.order is not None else default

    def trials_for(self, suite: str) -> int:
        if self.trials is not None:
            return self.trials
        return DEFAULT_TRIALS.get(suite, 20)


def validate_config(cfg: RunConfig) -> None:
    if cfg.suite not in SUITES:
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    dims = tuple(cfg.dims)
    if len(dims) != 4 or any(int(d) < 1 for d in dims):
        raise ConfigError("dims must be four integers >= 1")
    if cfg.depth is not None and cfg.depth < 0:
        raise ConfigError("depth must be >= 0")
    if cfg.order is not None and cfg.order < 1:
        raise ConfigError("order must be >= 1")
    if cfg.trials is not None and cfg.trials < 0:
        raise ConfigError("trials must be >= 0")
    if cfg.tol <= 0:
        raise ConfigError("tol must be positive")
    if cfg.fmt not in ("json", "csv"):
        raise ConfigError("format must be json or csv")
    if cfg.suite in SERIES_SUITES and cfg.depth is not None and cfg.order is not None \
            and cfg.depth < cfg.order:
        raise ConfigError("series suites need depth >= order")
    if cfg.suite in ("free-copies", "cfree", "linearization-analytic") and dims[0] < 2:
        raise ConfigError(f"suite {cfg.suite} needs dim H_alpha >= 2")


def _ctx_tag(trial: int) -> dict:
    return {"trial": trial}


def _matrix_max_diff(a, b) -> float:
    d = a - b
    if hasattr(d, "tocoo"):
        d = d.tocoo()
        return float(np.max(np.abs(d.data))) if d.nnz else 0.0
    return float(np.max(np.abs(np.asarray(d)))) if np.asarray(d).size else 0.0


def _diff_report(name, a, b, tol, context=None) -> CheckReport:
    err = _matrix_max_diff(a, b)
    return CheckReport(name, complex(err), 0.0, err, err, float(tol),
                       err <= tol, dict(context or {}))


def _mixed_moment_agreement(name, route1, route2, max_len, tol, trial):
    """Compare mixed moments of alternating words up to max_len between two
    embedding routes ((op_a, op_b), vacuum) of the same two-sided family."""
    (a1, b1), vac1 = route1
    (a2, b2), vac2 = route2
    worst = 0.0
    for length in range(1, max_len + 1):
        for start in (ALPHA, BETA):
            w1, w2 = vac1, vac2
            for j in range(length):
                pick = (start + j) % 2
                w1 = (a1 if pick == ALPHA else b1).apply(w1)
                w2 = (a2 if pick == ALPHA else b2).apply(w2)
            worst = max(worst, abs(complex(np.vdot(vac1, w1))
                                   - complex(np.vdot(vac2, w2))))
    return CheckReport(name, complex(worst), 0.0, worst, worst, float(tol),
                       worst <= tol, _ctx_tag(trial))


# --------------------------------------------------------------------------
# specializations: degenerate two-sided products vs the direct classical
# constructions (free, Boolean, monotone, orthogonal)
# --------------------------------------------------------------------------

def _free_word_bijection(h_basis, k_basis):
    """Permutation sending each H-side word (letters, terminal) of the H=K
    degenerate case to the K-side word letters+(terminal,): positions in the
    K-side basis aligned to the H-side enumeration."""
    perm = np.empty(h_basis.count, dtype=np.int64)
    for i, w in enumerate(h_basis.words):
        if w.is_vacuum:
            target = BasisWord()
        else:
            target = BasisWord(w.letters + (w.terminal,))
        perm[i] = k_basis.index[target]
    return perm


def run_specializations(cfg: RunConfig):
    reports: list[CheckReport] = []
    notes: list[str] = []
    h_a, k_a, h_b, k_b = (int(d) for d in cfg.dims)
    depth = cfg.depth_for("specializations")
    trials = cfg.trials_for("specializations")
    tol_exact = 1e-12

    # --- free: H = K, the H side is the free product shifted by one letter
    dims_free = (h_a, h_a, h_b, h_b)
    hb_free = cached_product_basis(dims_free, depth, H_SIDE)
    kb_free = cached_product_basis(dims_free, depth + 1, K_SIDE)
    reports.append(make_report("free-basis-count", hb_free.count, kb_free.count, 0.5,
                               context={"case": "free"}))
    perm = _free_word_bijection(hb_free, kb_free)
    for t in range(trials):
        rng = trial_rng(cfg.seed, t)
        route_h, route_k = [], []
        for iota, dim in ((ALPHA, h_a), (BETA, h_b)):
            m = random_selfadjoint(rng, dim)
            op_h = embed_cfree(OperatorPair(iota, m, m), hb_free)
            op_k = embed_free(m, iota, kb_free)
            route_h.append(op_h)
            route_k.append(op_k)
            reports.append(_diff_report(
                f"free-embedding-match[{'ab'[iota]},t{t}]", op_h.dense(),
                op_k.dense()[np.ix_(perm, perm)], tol_exact, context=_ctx_tag(t)))
        reports.append(_mixed_moment_agreement(
            f"free-moment-agreement[t{t}]",
            (tuple(route_h), hb_free.vacuum_vector()),
            (tuple(route_k), kb_free.vacuum_vector()),
            min(6, depth), tol_exact, t))
        if min(h_a, h_b) >= 2:
            fam = [[embed_free(random_selfadjoint(rng, h_a), ALPHA, kb_free)],
                   [embed_free(random_selfadjoint(rng, h_b), BETA, kb_free)]]
            law = check_free(fam, kb_free.vacuum_vector(),
                             max_len=min(6, depth), tol=cfg.tol)
            summary = _law_summary(f"free-law[t{t}]", law, cfg.tol, t)
            if summary is not None:
                reports.append(summary)

    # --- boolean: trivial K spaces, s = 0 matches the non-unital embedding
    dims_bool = (h_a, 1, h_b, 1)
    hb_bool = cached_product_basis(dims_bool, depth, H_SIDE)
    reports.append(make_report("boolean-basis-count", hb_bool.count,
                               1 + (h_a - 1) + (h_b - 1), 0.5,
                               context={"case": "boolean"}))
    zero1 = np.zeros((1, 1), dtype=complex)
    for t in range(trials):
        rng = trial_rng(cfg.seed, t)
        ops = {}
        degens = {}
        for iota, dim in ((ALPHA, h_a), (BETA, h_b)):
            m = random_selfadjoint(rng, dim)
            direct = embed_boolean(m, iota, hb_bool)
            degen = embed_cfree(OperatorPair(iota, m, zero1), hb_bool)
            reports.append(_diff_report(
                f"boolean-embedding-match[{'ab'[iota]},t{t}]",
                direct.dense(), degen.dense(), tol_exact, context=_ctx_tag(t)))
            ops[iota] = direct
            degens[iota] = degen
        xi_bool = hb_bool.vacuum_vector()
        reports.append(_mixed_moment_agreement(
            f"boolean-moment-agreement[t{t}]",
            ((ops[ALPHA], ops[BETA]), xi_bool),
            ((degens[ALPHA], degens[BETA]), xi_bool), 6, tol_exact, t))
        law = check_boolean([[ops[ALPHA]], [ops[BETA]]], hb_bool.vacuum_vector(),
                            max_len=6, tol=cfg.tol)
        summary = _law_summary(f"boolean-law[t{t}]", law, cfg.tol, t)
        if summary is not None:
            reports.append(summary)

    # --- monotone: K_alpha trivial, H_beta identified with K_beta
    dims_mono = (h_a, 1, h_b, h_b)
    hb_mono = cached_product_basis(dims_mono, max(depth, 1), H_SIDE)
    reports.append(make_report("monotone-basis-count", hb_mono.count, h_a * h_b, 0.5,
                               context={"case": "monotone"}))
    for t in range(trials):
        rng = trial_rng(cfg.seed, t)
        ops = {}
        degens = {}
        for iota, dim in ((ALPHA, h_a), (BETA, h_b)):
            m = random_selfadjoint(rng, dim)
            direct = embed_monotone(m, iota, hb_mono)
            pair = OperatorPair(iota, m, zero1 if iota == ALPHA else m)
            degen = embed_cfree(pair, hb_mono)
            reports.append(_diff_report(
                f"monotone-embedding-match[{'ab'[iota]},t{t}]",
                direct.dense(), degen.dense(), tol_exact, context=_ctx_tag(t)))
            ops[iota] = direct
            degens[iota] = degen
        xi_mono = hb_mono.vacuum_vector()
        reports.append(_mixed_moment_agreement(
            f"monotone-moment-agreement[t{t}]",
            ((ops[ALPHA], ops[BETA]), xi_mono),
            ((degens[ALPHA], degens[BETA]), xi_mono), 6, tol_exact, t))
        law = check_monotone([[ops[ALPHA]], [ops[BETA]]], hb_mono.vacuum_vector(),
                             max_len=6, tol=cfg.tol)
        summary = _law_summary(f"monotone-law[t{t}]", law, cfg.tol, t)
        if summary is not None:
            reports.append(summary)

    # --- orthogonal: K_alpha and H_beta trivial
    dims_orth = (h_a, 1, 1, k_b)
    hb_orth = cached_product_basis(dims_orth, max(depth, 1), H_SIDE)
    reports.append(make_report("orthogonal-basis-count", hb_orth.count,
                               1 + (h_a - 1) + (k_b - 1) * (h_a - 1), 0.5,
                               context={"case": "orthogonal"}))
    psi_word = BasisWord((), (ALPHA, 1)) if h_a >= 2 else None
    for t in range(trials):
        rng = trial_rng(cfg.seed, t)
        ma = random_selfadjoint(rng, h_a)
        mb = random_selfadjoint(rng, k_b)
        dir_a = embed_orthogonal(ma, ALPHA, hb_orth)
        dir_b = embed_orthogonal(mb, BETA, hb_orth)
        deg_a = embed_cfree(OperatorPair(ALPHA, ma, zero1), hb_orth)
        deg_b = embed_cfree(OperatorPair(BETA, zero1, mb), hb_orth)
        reports.append(_diff_report(f"orthogonal-embedding-match[a,t{t}]",
                                    dir_a.dense(), deg_a.dense(), tol_exact,
                                    context=_ctx_tag(t)))
        reports.append(_diff_report(f"orthogonal-embedding-match[b,t{t}]",
                                    dir_b.dense(), deg_b.dense(), tol_exact,
                                    context=_ctx_tag(t)))
        reports.append(_mixed_moment_agreement(
            f"orthogonal-moment-agreement[t{t}]",
            ((dir_a, dir_b), hb_orth.vacuum_vector()),
            ((deg_a, deg_b), hb_orth.vacuum_vector()), 6, tol_exact, t))
        if psi_word is not None:
            law = check_orthogonal([[dir_a], [dir_b]], hb_orth.vacuum_vector(),
                                   hb_orth.basis_vector(psi_word), tol=cfg.tol)
            summary = _law_summary(f"orthogonal-law[t{t}]", law, cfg.tol, t)
            if summary is not None:
                reports.append(summary)

    # --- negative controls: each classical checker must flag its counterexample
    reports.extend(_specialization_negative_controls(cfg, notes))
    return reports, notes


def _specialization_negative_controls(cfg: RunConfig, notes):
    out = []
    h_a, k_a, h_b, k_b = (int(d) for d in cfg.dims)
    rng = trial_rng(cfg.seed, 10_001)
    if h_a >= 2 and h_b >= 2:
        # boolean violation: unital identity embeddings are not boolean independent
        dims_bool = (h_a, 1, h_b, 1)
        hb_bool = cached_product_basis(dims_bool, cfg.depth_for("specializations"), H_SIDE)
        one = np.ones((1, 1), dtype=complex)
        fam = [[embed_cfree(OperatorPair(ALPHA, random_selfadjoint(rng, h_a) +
                                         np.eye(h_a), one), hb_bool)],
               [embed_cfree(OperatorPair(BETA, random_selfadjoint(rng, h_b) +
                                         np.eye(h_b), one), hb_bool)]]
        law = check_boolean(fam, hb_bool.vacuum_vector(), max_len=4, tol=cfg.tol)
        out.append(expect_failure(max(law, key=lambda r: r.abs_err)))

        # monotone violation: swap the roles (embed the alpha operator with the
        # beta-side two-term formula and vice versa)
        dims_mono = (h_a, 1, h_b, h_b)
        hb_mono = cached_product_basis(dims_mono, max(cfg.depth_for("specializations"), 1),
                                       H_SIDE)
        fam = [[embed_monotone(random_selfadjoint(rng, h_b), BETA, hb_mono)],
               [embed_monotone(random_selfadjoint(rng, h_a), ALPHA, hb_mono)]]
        law = check_monotone(fam, hb_mono.vacuum_vector(), max_len=4, tol=cfg.tol)
        out.append(expect_failure(max(law, key=lambda r: r.abs_err)))
    else:
        notes.append("specializations: boolean/monotone negative controls need "
                     "dims H >= 2; skipped")
    if h_a >= 2 and k_b >= 2:
        # orthogonal violation: evaluate psi at a vector outside H_alpha^o
        dims_orth = (h_a, 1, 1, k_b)
        hb_orth = cached_product_basis(dims_orth, max(cfg.depth_for("specializations"), 1),
                                       H_SIDE)
        bad_psi = hb_orth.basis_vector(BasisWord(((BETA, 1),), (ALPHA, 1)))
        fam = [[embed_orthogonal(random_selfadjoint(rng, h_a), ALPHA, hb_orth)],
               [embed_orthogonal(random_selfadjoint(rng, k_b), BETA, hb_orth)]]
        law = check_orthogonal(fam, hb_orth.vacuum_vector(), bad_psi, tol=cfg.tol)
        out.append(expect_failure(max(law, key=lambda r: r.abs_err)))
    else:
        notes.append("specializations: orthogonal negative control needs "
                     "dim H_alpha, K_beta >= 2; skipped")
    return out


# --------------------------------------------------------------------------
# lambda-properties (operator algebra of the embedding)
# --------------------------------------------------------------------------

def _random_general(rng, n):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return m / max(nk.spectral_norm(m), 1e-12)


def run_lambda_properties(cfg: RunConfig):
    reports = []
    notes: list[str] = []
    dims = tuple(int(d) for d in cfg.dims)
    depth = cfg.depth_for("lambda-properties")
    basis = cached_product_basis(dims, depth, H_SIDE)
    all_big = all(d >= 2 for d in dims) and depth >= 1
    if not all_big:
        notes.append("lambda-properties: injectivity check needs depth >= 1 and "
                     "all dims >= 2; skipped")

    for t in range(cfg.trials_for("lambda-properties")):
        rng = trial_rng(cfg.seed, t)
        iota = t % 2
        dh, dk = dims[2 * iota], dims[2 * iota + 1]
        pair = OperatorPair(iota, _random_general(rng, dh), _random_general(rng, dk))
        lam = embed_cfree(pair, basis)

        nrm = operator_norm(lam.matrix)
        bound = max(nk.spectral_norm(pair.T), nk.spectral_norm(pair.S))
        excess = max(0.0, nrm - bound)
        reports.append(CheckReport(f"norm-bound[t{t}]", complex(nrm), complex(bound),
                                   excess, excess, 1e-10, excess <= 1e-10,
                                   _ctx_tag(t)))

        sa_pair = OperatorPair(iota, random_selfadjoint(rng, dh),
                               random_selfadjoint(rng, dk))
        sa = embed_cfree(sa_pair, basis)
        reports.append(_diff_report(f"selfadjoint-transfer[t{t}]", sa.matrix,
                                    sa.matrix.conj().T, 1e-12, _ctx_tag(t)))

        second = OperatorPair(iota, _random_general(rng, dh), _random_general(rng, dk))
        reports.append(_rename(adjoint_compatibility_check(pair, basis, second),
                               f"adjoint-multiplicativity[t{t}]", t))

        if all_big:
            sup_lam = float(np.max(np.abs(lam.matrix.data))) if lam.matrix.nnz else 0.0
            sup_pair = max(float(np.max(np.abs(pair.T))), float(np.max(np.abs(pair.S))))
            reports.append(make_report(f"injectivity-sup-entry[t{t}]", sup_lam,
                                       sup_pair, 1e-12, context=_ctx_tag(t)))

        # P / P-perp split: the home block depends only on T, the rest only on S
        other_pair_s = OperatorPair(iota, pair.T, _random_general(rng, dk))
        other_pair_t = OperatorPair(iota, _random_general(rng, dh), pair.S)
        home = basis.home_indices(iota)
        rest = np.setdiff1d(np.arange(basis.count), home)
        lam_s = embed_cfree(other_pair_s, basis)
        lam_t = embed_cfree(other_pair_t, basis)
        d1 = _matrix_max_diff(lam.matrix[:, home], lam_s.matrix[:, home])
        d2 = _matrix_max_diff(lam.matrix[:, rest], lam_t.matrix[:, rest]) if rest.size \
            else 0.0
        worst = max(d1, d2)
        reports.append(CheckReport(f"projection-split[t{t}]", complex(worst), 0.0,
                                   worst, worst, 1e-13, worst <= 1e-13, _ctx_tag(t)))

        # additivity and scalar homogeneity of the embedding map
        p2 = OperatorPair(iota, _random_general(rng, dh), _random_general(rng, dk))
        lam_sum = embed_cfree(OperatorPair(iota, pair.T + p2.T, pair.S + p2.S), basis)
        reports.append(_diff_report(f"additivity[t{t}]", lam_sum.matrix,
                                    (lam + embed_cfree(p2, basis)).matrix, 1e-13,
                                    _ctx_tag(t)))
        c = complex(rng.standard_normal() + 1j * rng.standard_normal())
        reports.append(_diff_report(f"scalar-homogeneity[t{t}]",
                                    embed_cfree(OperatorPair(iota, c * pair.T,
                                                             c * pair.S), basis).matrix,
                                    (c * lam).matrix, 1e-12, _ctx_tag(t)))
    return reports, notes


def _rename(report: CheckReport, name: str, trial: int) -> CheckReport:
    return CheckReport(name, report.lhs, report.rhs, report.abs_err, report.rel_err,
                       report.tolerance, report.passed,
                       {**report.context, "trial": trial})


def _law_summary(name, law, tol, trial) -> CheckReport | None:
    """Collapse a word-checker report list to one summary line; None when the
    enumeration was vacuous (depth too small for any word)."""
    if not law:
        return None
    worst = max(law, key=lambda r: r.rel_err)
    return CheckReport(name, worst.lhs, worst.rhs, worst.abs_err, worst.rel_err,
                       float(tol), all(r.passed for r in law), _ctx_tag(trial))


# --------------------------------------------------------------------------
# psi-product (state agreement, closed form, factorization at the vacuum)
# --------------------------------------------------------------------------

def run_psi_product(cfg: RunConfig):
    reports = []
    notes: list[str] = []
    dims = tuple(int(d) for d in cfg.dims)
    depth = cfg.depth_for("psi-product")
    h_basis = cached_product_basis(dims, depth, H_SIDE)
    k_basis = cached_product_basis(dims, depth, K_SIDE)
    xi = h_basis.vacuum_vector()
    eta = k_basis.vacuum_vector()
    word_len = min(5, depth) if depth >= 1 else 0

    for t in range(cfg.trials_for("psi-product")):
        rng = trial_rng(cfg.seed, t)
        pa = random_pair(rng, ALPHA, dims[0], dims[1])
        pb = random_pair(rng, BETA, dims[2], dims[3])

        for pair, tag in ((pa, "a"), (pb, "b")):
            lam = embed_cfree(pair, h_basis)
            reports.append(make_report(
                f"state-agreement-xi[{tag},t{t}]", vector_state(lam, xi),
                pair.T[0, 0], 1e-12, context=_ctx_tag(t)))
            lam_k = embed_free(pair.S, pair.index, k_basis)
            reports.append(make_report(
                f"state-agreement-eta[{tag},t{t}]", vector_state(lam_k, eta),
                pair.S[0, 0], 1e-12, context=_ctx_tag(t)))

        # closed form for alternating centered words vs direct application
        ca, cb = psi_center(pa), psi_center(pb)
        for n in range(1, word_len + 1):
            for start in (ALPHA, BETA):
                seq = [(ca if (start + j) % 2 == 0 else cb) for j in range(n)]
                closed = alternating_word_vector(seq, h_basis)
                acc = xi
                for p in seq:
                    acc = embed_cfree(p, h_basis).apply(acc)
                err = float(np.max(np.abs(closed - acc)))
                reports.append(CheckReport(
                    f"alternating-closed-form[len{n},start{'ab'[start]},t{t}]",
                    complex(err), 0.0, err, err, 1e-11, err <= 1e-11, _ctx_tag(t)))

        # factorization with marginal centering (the defining property)
        fams = [[embed_cfree(pa, h_basis)], [embed_cfree(pb, h_basis)]]
        vals = [[psi_value(pa)], [psi_value(pb)]]
        fact = check_cfree(fams, xi, psi_values=vals,
                           max_len=min(6, depth), tol=cfg.tol)
        summary = _law_summary(f"factorization[t{t}]", fact, cfg.tol, t)
        if summary is not None:
            reports.append(summary)

        # K-side freeness of the left regular representations
        if min(dims[1], dims[3]) >= 2:
            ffams = [[embed_free(pa.S, ALPHA, k_basis)],
                     [embed_free(pb.S, BETA, k_basis)]]
            law = check_free(ffams, eta, max_len=min(6, depth), tol=cfg.tol)
            summary = _law_summary(f"k-side-freeness[t{t}]", law, cfg.tol, t)
            if summary is not None:
                reports.append(summary)

    # negative control for the free checker: both families from one side
    if dims[1] >= 2 and depth >= 2:
        rng = trial_rng(cfg.seed, 10_002)
        s1 = random_selfadjoint(rng, dims[1])
        s2 = random_selfadjoint(rng, dims[1]) + 0.5 * s1
        s2 /= nk.spectral_norm(s2)
        fams = [[embed_free(s1, ALPHA, k_basis)], [embed_free(s2, ALPHA, k_basis)]]
        law = check_free(fams, eta, max_len=4, tol=cfg.tol)
        reports.append(expect_failure(max(law, key=lambda r: r.abs_err)))
    else:
        notes.append("psi-product: free negative control needs dim K_alpha >= 2 "
                     "and depth >= 2; skipped")
    return reports, notes


# --------------------------------------------------------------------------
# cfree (conditional factorization against the doubled two-state vector pair)
# --------------------------------------------------------------------------

def run_cfree(cfg: RunConfig):
    reports = []
    notes: list[str] = []
    dims = tuple(int(d) for d in cfg.dims)
    depth = cfg.depth_for("cfree")
    ctx = build_free_copy_context(PointedSpace(dims[0]), PointedSpace(dims[1]), depth)
    notes.append(f"cfree: doubled construction from (H_a, K_a) = ({dims[0]}, {dims[1]}); "
                 f"beta side has dims ({2 * dims[0]}, {2 * dims[1]})")
    xi, et = ctx.xi, ctx.eta_tilde
    max_len = min(6, depth - 1)

    for t in range(cfg.trials_for("cfree")):
        rng = trial_rng(cfg.seed, t)
        fam_a = [rho(random_selfadjoint(rng, dims[0]), random_selfadjoint(rng, dims[1]),
                     ALPHA, ctx) for _ in range(2)]
        fam_b = [rho(random_selfadjoint(rng, dims[0]), random_selfadjoint(rng, dims[1]),
                     BETA, ctx) for _ in range(2)]
        law = check_cfree([fam_a, fam_b], xi, psi_vec=et, max_len=max_len, tol=cfg.tol)
        summary = _law_summary(f"cfree-at-xi-eta[t{t}]", law, cfg.tol, t)
        if summary is not None:
            reports.append(summary)

    # negative control: the beta slot is filled with alpha-side operators
    rng = trial_rng(cfg.seed, 10_003)
    x1 = rho(random_selfadjoint(rng, dims[0]), random_selfadjoint(rng, dims[1]),
             ALPHA, ctx)
    x2 = rho(random_selfadjoint(rng, dims[0]), random_selfadjoint(rng, dims[1]),
             ALPHA, ctx)
    law = check_cfree([[x1], [x2]], xi, psi_vec=et, max_len=4, tol=cfg.tol)
    reports.append(expect_failure(max(law, key=lambda r: r.abs_err)))
    return reports, notes


# --------------------------------------------------------------------------
# free-copies (the doubled construction end to end)
# --------------------------------------------------------------------------

def run_free_copies(cfg: RunConfig):
    reports = []
    notes: list[str] = []
    dims = tuple(int(d) for d in cfg.dims)
    depth = cfg.depth_for("free-copies")
    ctx = build_free_copy_context(PointedSpace(dims[0]), PointedSpace(dims[1]), depth)
    xi, et = ctx.xi, ctx.eta_tilde
    reports.append(make_report("eta-tilde-norm", np.linalg.norm(et), 1.0, 1e-14))
    max_len = min(6, depth - 1)

    for t in range(cfg.trials_for("free-copies")):
        rng = trial_rng(cfg.seed, t)
        mats = [(random_selfadjoint(rng, dims[0]), random_selfadjoint(rng, dims[1]))
                for _ in range(4)]
        ra = [rho(mt, ms, ALPHA, ctx) for mt, ms in mats[:2]]
        rb = [rho(mt, ms, BETA, ctx) for mt, ms in mats[2:]]

        for (mt, ms), op, tag in ((mats[0], ra[0], "a"), (mats[2], rb[0], "b")):
            reports.append(make_report(f"agreement-xi[{tag},t{t}]",
                                       vector_state(op, xi), mt[0, 0], 1e-12,
                                       context=_ctx_tag(t)))
            reports.append(make_report(f"agreement-eta-tilde[{tag},t{t}]",
                                       vector_state(op, et), ms[0, 0], 1e-12,
                                       context=_ctx_tag(t)))

        law = check_cfree([ra, rb], xi, psi_vec=et, max_len=max_len, tol=cfg.tol)
        summary = _law_summary(f"cfree-at-xi-eta[t{t}]", law, cfg.tol, t)
        if summary is not None:
            reports.append(summary)
        law = check_free([ra, rb], et, max_len=max_len, tol=cfg.tol)
        summary = _law_summary(f"free-at-eta-tilde[t{t}]", law, cfg.tol, t)
        if summary is not None:
            reports.append(summary)

        # closed form of the alternating product at eta-tilde vs matrix route
        for r in range(1, (depth - 1) // 2 + 1):
            if 2 * r > max_len:
                break
            els = []
            for j in range(2 * r):
                mt = random_selfadjoint(rng, dims[0])
                ms = random_selfadjoint(rng, dims[1])
                ms = ms - ms[0, 0] * np.eye(dims[1])
                els.append((mt, ms))
            closed = alternating_product_at_eta_tilde(els, ctx)
            acc = et
            for pos, (mt, ms) in enumerate(els):
                acc = rho(mt, ms, ALPHA if pos % 2 == 0 else BETA, ctx).apply(acc)
            err = float(np.max(np.abs(closed - acc)))
            reports.append(CheckReport(f"eta-tilde-closed-form[r{r},t{t}]",
                                       complex(err), 0.0, err, err, 1e-11,
                                       err <= 1e-11, _ctx_tag(t)))
    return reports, notes


# --------------------------------------------------------------------------
# linearization-series (transform tower + series route)
# --------------------------------------------------------------------------

def run_linearization_series(cfg: RunConfig):
    reports = []
    notes: list[str] = []
    dims = tuple(int(d) for d in cfg.dims)
    depth = cfg.depth_for("linearization-series")
    order = cfg.order_or(8)
    if depth < order + 1:
        raise ConfigError("linearization-series needs depth >= order + 1")

    for t in range(cfg.trials_for("linearization-series")):
        rng = trial_rng(cfg.seed, t)
        pa = random_pair(rng, ALPHA, dims[0], dims[1])
        pb = random_pair(rng, BETA, dims[2], dims[3])

        # single-element tower on exact small-space moments
        n_mom = max(order + 1, 11)
        md_a = MomentData(n_mom, moments_of_matrix(pa.T, n_mom),
                          moments_of_matrix(pa.S, n_mom))
        h_psi = series_from_moments(md_a, "psi")
        kser = k_series(h_psi)
        kinv = compositional_inverse(kser)
        resid = (kser.compose(kinv) - identity_series(kinv.order)).max_abs_coeff()
        reports.append(CheckReport(f"compose-inverse-roundtrip[t{t}]", complex(resid),
                                   0.0, resid, resid, 1e-12, resid <= 1e-12,
                                   _ctx_tag(t)))

        r_a = cfree_r_transform(md_a)
        reports.append(make_report(f"r-at-zero[t{t}]", r_a.coefficient(0),
                                   pa.T[0, 0], 1e-12, context=_ctx_tag(t)))

        # free reduction: equal states reduce to the Voiculescu R-transform
        mono = moments_of_matrix(pa.S, n_mom)
        md_free = MomentData(n_mom, mono, mono)
        r_two_state = cfree_r_transform(md_free)
        r_free = free_r_from_moments(mono)
        gap = max(abs(r_two_state.coefficient(n) - r_free.coefficient(n))
                  for n in range(0, min(10, n_mom - 1) + 1))
        scale = max(1.0, r_free.max_abs_coeff())
        reports.append(CheckReport(f"free-reduction[t{t}]", complex(gap), 0.0,
                                   gap, gap / scale, 1e-10, gap / scale <= 1e-10,
                                   _ctx_tag(t)))

        # Cauchy-transform form of the definition, coefficientwise
        h_phi = series_from_moments(md_a, "phi")
        lhs = r_a.compose(kser)
        rhs = (constant_one_minus_recip(h_phi)).shift(-1)
        gap = _series_gap(lhs, rhs, min(lhs.order, rhs.order))
        reports.append(CheckReport(f"cauchy-identity[t{t}]", complex(gap), 0.0, gap,
                                   gap, 1e-10, gap <= 1e-10, _ctx_tag(t)))

        # series vs resolvent agreement within the analytic tail bound
        elem = TwoStateElement.two_sided(pa.T, _e0(dims[0]), pa.S, _e0(dims[1]),
                                         norm=max(nk.spectral_norm(pa.T),
                                                  nk.spectral_norm(pa.S)))
        tpt = 0.5 / max(elem.norm, 1e-6)
        h_exact = h(elem, tpt)
        h_trunc = series_from_moments(md_a, "psi")(tpt)
        q = elem.norm * tpt
        tail = (elem.norm * tpt) ** (n_mom + 1) / max(1.0 - q, 1e-6)
        err = abs(h_exact - h_trunc)
        reports.append(CheckReport(f"series-resolvent-agreement[t{t}]",
                                   complex(h_exact), complex(h_trunc), err, err,
                                   tail + 1e-12, err <= tail + 1e-12, _ctx_tag(t)))

        # Newton inversion residual inside the guarded disk
        worst_resid = 0.0
        for j in range(8):
            z = (1.0 / (12.0 * max(elem.norm, 1e-6))) * np.exp(2j * np.pi * j / 8)
            tv = k_inverse_numeric(elem, z, "k", rtol=1e-14)
            worst_resid = max(worst_resid, abs(k(elem, tv) - z) / (1.0 + abs(z)))
        reports.append(CheckReport(f"newton-inversion-residual[t{t}]",
                                   complex(worst_resid), 0.0, worst_resid,
                                   worst_resid, 1e-12, worst_resid <= 1e-12,
                                   _ctx_tag(t)))

        # point agreement of the analytic R with the order-12 series
        r12 = cfree_r_transform(MomentData(13, moments_of_matrix(pa.T, 13),
                                           moments_of_matrix(pa.S, 13)))
        zpt = 1.0 / (8.0 * max(elem.norm, 1e-6))
        reports.append(make_report(f"r-series-point-agreement[t{t}]",
                                   cfree_r_at(elem, zpt), r12(zpt), 1e-8,
                                   context=_ctx_tag(t)))

        # the linearization itself, on the operator model
        real = realize_cfree_pair(pa, pb, depth)
        md_pair_a = moment_data(real.lam_a, real.lam_sa, order + 1)
        md_pair_b = moment_data(real.lam_b, real.lam_sb, order + 1)
        md_sum = moment_data(real.lam_a + real.lam_b, real.lam_sa + real.lam_sb,
                             order + 1)
        rep = check_linearization_series(md_pair_a, md_pair_b, md_sum, order=order,
                                         tol=1e-8)
        reports.append(_rename(rep, f"linearization-series[t{t}]", t))
    return reports, notes


def _e0(n: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    return v


def constant_one_minus_recip(h_series):
    """1 - 1/h as a series (used by the Cauchy-transform identity)."""
    one = TruncatedLaurentSeries(0, (1.0,) + (0.0,) * h_series.order)
    return one - h_series.reciprocal()


def _series_gap(f, g, order: int) -> float:
    return max(abs(f.coefficient(n) - g.coefficient(n))
               for n in range(min(f.valuation, g.valuation), order + 1))


# --------------------------------------------------------------------------
# linearization-analytic (pointwise, on the psi-free doubled realization)
# --------------------------------------------------------------------------

def run_linearization_analytic(cfg: RunConfig):
    reports = []
    notes: list[str] = []
    dims = tuple(int(d) for d in cfg.dims)
    depth = cfg.depth_for("linearization-analytic")
    ctx = build_free_copy_context(PointedSpace(dims[0]), PointedSpace(dims[1]), depth)

    for t in range(cfg.trials_for("linearization-analytic")):
        rng = trial_rng(cfg.seed, t)
        x = (random_selfadjoint(rng, dims[0]), random_selfadjoint(rng, dims[1]))
        y = (random_selfadjoint(rng, dims[0]), random_selfadjoint(rng, dims[1]))
        elems = realize_free_copies(x, y, ctx)
        ea, eb, es = elems["a"], elems["b"], elems["sum"]
        rmin = min(1.0 / (6.0 * ea.norm), 1.0 / (6.0 * eb.norm),
                   1.0 / (6.0 * es.norm))
        for j in range(8):
            z = 0.5 * rmin * np.exp(2j * np.pi * j / 8)
            rep_id, rep_t = check_linearization_analytic(ea, eb, es, z,
                                                         tol=1e-8, t_tol=1e-9)
            reports.append(_rename(rep_id, f"linearization-analytic[z{j},t{t}]", t))
            reports.append(_rename(rep_t, f"psi-free-step[z{j},t{t}]", t))
            if cfg.trace:
                c = rep_id.context
                cfg.trace_rows.append({
                    "trial": t, "z": c["z"], "t1": c["t1"], "t2": c["t2"],
                    "t3": c["t3"], "t": c["t"],
                    "identity_resid": rep_id.abs_err, "t_resid": rep_t.abs_err})

        # cross-check one point against additivity of the pointwise transform
        zpt = 0.5 * rmin
        reports.append(make_report(
            f"r-additivity-point[t{t}]",
            cfree_r_at(es, zpt), cfree_r_at(ea, zpt) + cfree_r_at(eb, zpt),
            1e-8, context=_ctx_tag(t)))
    return reports, notes


# --------------------------------------------------------------------------
# haagerup-lemmas (centered resolvents and the h-tilde sum identity)
# --------------------------------------------------------------------------

def run_haagerup(cfg: RunConfig):
    reports = []
    notes: list[str] = []
    dims = tuple(int(d) for d in cfg.dims)
    depth = cfg.depth_for("haagerup-lemmas")

    for t in range(cfg.trials_for("haagerup-lemmas")):
        rng = trial_rng(cfg.seed, t)
        pa = random_pair(rng, ALPHA, dims[0], dims[1])
        pb = random_pair(rng, BETA, dims[2], dims[3])
        real = realize_cfree_pair(pa, pb, depth)
        ea, eb = real.element("a"), real.element("b")

        phase = np.exp(2j * np.pi * rng.uniform())
        t1 = 0.5 * phase / (4.0 * ea.norm)
        z = k(ea, t1)
        t2 = k_inverse_numeric(eb, z, "k", rtol=1e-14)

        # certified norm bounds for the centered resolvents give the rho budget
        qa = abs(t1) * ea.norm
        qb = abs(t2) * eb.norm
        bound = (2.0 * qa / (1.0 - qa)) * (2.0 * qb / (1.0 - qb))
        rho_c = 0.5 / bound

        rep = check_centered_resolvent_identity(ea, eb, t1, t2, rho_c, tol=cfg.tol)
        reports.append(_rename(rep, f"centered-resolvent[t{t}]", t))
        cent = max(rep.context["psi_centering_a"], rep.context["psi_centering_b"])
        reports.append(CheckReport(f"centered-resolvent-psi-zero[t{t}]",
                                   complex(cent), 0.0, cent, cent, 1e-12,
                                   cent <= 1e-12, _ctx_tag(t)))
        coeff = rep.context["coefficient_identity_resid"]
        reports.append(CheckReport(f"centered-resolvent-coefficients[t{t}]",
                                   complex(coeff), 0.0, coeff, coeff, 1e-12,
                                   coeff <= 1e-12, _ctx_tag(t)))
        rep2 = check_htilde_sum_identity(ea, eb, t1, tol=cfg.tol)
        reports.append(_rename(rep2, f"htilde-sum[t{t}]", t))
        if not rep2.context["t_inside_radius"]:
            reports.append(CheckReport(f"htilde-sum-radius[t{t}]", 1.0, 0.0, 1.0,
                                       1.0, 0.5, False, _ctx_tag(t)))
    return reports, notes


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

SUITE_RUNNERS = {
    "specializations": run_specializations,
    "lambda-properties": run_lambda_properties,
    "psi-product": run_psi_product,
    "cfree": run_cfree,
    "free-copies": run_free_copies,
    "linearization-series": run_linearization_series,
    "linearization-analytic": run_linearization_analytic,
    "haagerup-lemmas": run_haagerup,
}

NEEDS_DOUBLING = ("cfree", "free-copies", "linearization-analytic")


def run_suite(cfg: RunConfig) -> dict:
    """Run one suite (or all); returns {suite_name: (reports, notes)}."""
    validate_config(cfg)
    out = {}
    if cfg.suite == "all":
        for name in SUITES:
            if name == "all":
                continue
            if name in NEEDS_DOUBLING and int(cfg.dims[0]) < 2:
                out[name] = ([], [f"{name}: skipped (needs dim H_alpha >= 2)"])
                continue
            try:
                out[name] = SUITE_RUNNERS[name](cfg)
            except ConfigError as exc:
                out[name] = ([], [f"{name}: skipped ({exc})"])
        return out
    out[cfg.suite] = SUITE_RUNNERS[cfg.suite](cfg)
    return out
