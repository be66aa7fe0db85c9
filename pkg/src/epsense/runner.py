"""Task dispatch for batch runs and canned figure datasets."""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import eigenmodes as em
from . import full_model as fm
from . import scattering as sc
from .config import GridSpec, RunConfig, SensingSpec, SweepSpec, apply_value, check_sweep
from .errors import ConfigError, EPSenseError
from .params import Perturbation, SystemParams, derive
from .steady_state import solve_ideal, solve_self_consistent
from .tables import ERROR_COLUMN, ResultTable

NAN = math.nan
FIGURES = ("fig1", "fig2", "fig3", "fig4", "figS1")

DEFAULT_EIGEN_SWEEP = SweepSpec("alpha_in", 0.0, 600.0, 601)


def _pool_map(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        # map keeps input order
        return list(ex.map(fn, items))


def _points(cfg: RunConfig, default: SweepSpec | None = None):
    sweep = cfg.sweep or default
    if sweep is None:
        return None, [(None, cfg.params)]
    check_sweep(sweep)
    vals = sweep.values()
    return sweep.parameter, [(float(v), apply_value(cfg.params, sweep.parameter, float(v))) for v in vals]


def _guarded(fn, n_values: int):
    """Run ``fn``; on a numerical failure return NaNs and the error class name."""
    try:
        return tuple(fn()) + ("",)
    except EPSenseError as exc:
        return (NAN,) * n_values + (type(exc).__name__,)


def _table(cfg: RunConfig, name: str, columns: list[str]) -> ResultTable:
    return ResultTable(name=name, columns=columns + [ERROR_COLUMN],
                       provenance={"task": cfg.task, "config_sha256": cfg.digest()})


def _prefixed(key, cols):
    return ([key] if key else []) + cols


def _row(key, val, values):
    return ((val,) if key else ()) + values


DERIVE_COLS = ["r_1", "r_2", "g_tilde_1", "g_tilde_2", "Delta_m_1", "Delta_m_2", "J_tilde",
               "N_s_1", "N_s_2", "M_s_1", "M_s_2"]
STEADY_COLS = ["abs_alpha_1", "abs_alpha_2", "re_beta_1", "re_beta_2", "Delta_eff_1", "Delta_eff_2",
               "G_1", "G_2", "Gamma_1", "Gamma_2", "Gamma_eff_1", "Gamma_eff_2", "iterations"]
EIGEN_COLS = ["re_lambda_plus", "re_lambda_minus", "im_lambda_plus", "im_lambda_minus"]
EP_COLS = ["alpha_in_ep", "re_lambda_ep", "im_lambda_ep", "gap", "Gamma_ep"]
SENS_COLS = ["chi", "epsilon", "re_dl_plus", "re_dl_minus", "im_dl_plus", "im_dl_minus",
             "re_dl_plus_analytic", "re_dl_minus_analytic", "im_dl_plus_analytic", "im_dl_minus_analytic",
             "eta_numeric", "eta_analytic"]
SPECTRA_COLS = ["omega", "s11_sq", "s22_sq", "s_out_1", "s_out_2"]
VALIDATE_COLS = ["kappa", "g", "error_over_Gamma", "re_full_plus", "im_full_plus", "re_full_minus",
                 "im_full_minus", "re_eff_plus", "im_eff_plus", "re_eff_minus", "im_eff_minus"]


def _derive_row(p):
    d = derive(p)
    return tuple(getattr(d, c) for c in DERIVE_COLS)


def _steady_row(p, cfg):
    d = derive(p)
    s = solve_ideal(p, d, cfg.detuning) if cfg.steady == "ideal" else solve_self_consistent(p, d)
    return (abs(s.alpha_1), abs(s.alpha_2), s.beta_1.real, s.beta_2.real, s.Delta_eff_1, s.Delta_eff_2,
            s.G_1, s.G_2, s.Gamma_1, s.Gamma_2, s.Gamma_eff_1, s.Gamma_eff_2, s.iterations)


def _ep_row(p, cfg):
    ep = em.locate_ep(p, detuning=cfg.detuning)
    return ep.alpha_in_ep, ep.lambda_ep.real, ep.lambda_ep.imag, ep.gap, ep.Gamma_ep


def run_derive(cfg, threads=1):
    key, pts = _points(cfg)
    t = _table(cfg, "derive", _prefixed(key, DERIVE_COLS))
    for v, row in zip([v for v, _ in pts], _pool_map(lambda x: _guarded(lambda: _derive_row(x[1]), len(DERIVE_COLS)), pts, threads)):
        t.append(_row(key, v, row))
    return t


def run_steady(cfg, threads=1):
    key, pts = _points(cfg)
    t = _table(cfg, "steady", _prefixed(key, STEADY_COLS))
    rows = _pool_map(lambda x: _guarded(lambda: _steady_row(x[1], cfg), len(STEADY_COLS)), pts, threads)
    for (v, _), row in zip(pts, rows):
        t.append(_row(key, v, row))
    return t


def run_ep(cfg, threads=1):
    key, pts = _points(cfg)
    t = _table(cfg, "ep", _prefixed(key, EP_COLS))
    rows = _pool_map(lambda x: _guarded(lambda: _ep_row(x[1], cfg), len(EP_COLS)), pts, threads)
    for (v, _), row in zip(pts, rows):
        t.append(_row(key, v, row))
    return t


def run_eigen_sweep(cfg, threads=1):
    # sequential by design: branch labels depend on the previous point
    key, pts = _points(cfg, DEFAULT_EIGEN_SWEEP)
    t = _table(cfg, "eigen-sweep", _prefixed(key, EIGEN_COLS))
    ref = None
    for v, p in pts:
        try:
            h = em.effective_hamiltonian(p, cfg.detuning)
        except EPSenseError as exc:
            t.append(_row(key, v, (NAN,) * 4 + (type(exc).__name__,)))
            ref = None
            continue
        pair = em.eigenvalues(h)
        if ref is not None:
            pair = em.match_to(ref, h, pair)
        if ref is None or pair.gap > em.EP_GAP_TOL:
            ref = (em.eigenvector(h, pair.lambda_plus), em.eigenvector(h, pair.lambda_minus))
        lp, lm = pair.lambda_plus, pair.lambda_minus
        t.append(_row(key, v, (lp.real, lm.real, lp.imag, lm.imag, "")))
    return t


def _sens_rows(base: SystemParams, chi: float, scheme: str, parameter: str, eps_values, cfg, threads):
    p = base.with_chi(chi)
    n = len(SENS_COLS) - 2
    try:
        ep = em.locate_ep(p.unperturbed(), detuning=cfg.detuning)
    except EPSenseError as exc:
        return [(chi, e) + (NAN,) * n + (type(exc).__name__,) for e in eps_values]

    def one(eps):
        def compute():
            pert = replace(p.perturbation, **{parameter: eps})
            dp, dm = em.delta_lambda_numeric(p, pert, ep, cfg.detuning)
            ap, am = em.delta_lambda_analytic(p, pert, ep, cfg.detuning)
            eta_n, eta_a = em.enhancement_factor(p, pert, scheme, ep, cfg.detuning)
            return (dp.real, dm.real, dp.imag, dm.imag, ap.real, am.real, ap.imag, am.imag, eta_n, eta_a)
        return (chi, eps) + _guarded(compute, n)

    return _pool_map(one, list(eps_values), threads)


def default_sens_sweep(scheme: str) -> SweepSpec:
    if scheme == "splitting":
        return SweepSpec("delta_omega", 1e-5, 1e-2, 31, "log")
    # a positive mismatch only moves the dissipation, so the readout uses dg < 0
    return SweepSpec("delta_gamma", -1e-5, -1e-2, 31, "log")


def run_sens_sweep(cfg, threads=1):
    scheme = cfg.sensing.scheme
    sweep = cfg.sweep or default_sens_sweep(scheme)
    check_sweep(sweep)
    if sweep.parameter not in ("delta_omega", "delta_gamma", "delta_chi_1", "delta_chi_2"):
        raise ConfigError("sweep.parameter", "sens-sweep needs a perturbation field as the swept parameter")
    t = _table(cfg, f"sens-sweep-{scheme}", list(SENS_COLS))
    for chi in cfg.sensing.chi_values:
        for row in _sens_rows(cfg.params, chi, scheme, sweep.parameter, [float(x) for x in sweep.values()], cfg, threads):
            t.append(row)
    return t


def spectrum_grid(cfg: RunConfig) -> np.ndarray:
    g = cfg.grid
    centre = g.centre
    if centre is None:
        d = derive(cfg.params)
        centre = 0.5 * (d.Delta_m_1 + d.Delta_m_2)
    return np.linspace(centre - g.half_width, centre + g.half_width, g.points)


def run_spectra(cfg, threads=1):
    t = _table(cfg, "spectra", list(SPECTRA_COLS))
    omega = spectrum_grid(cfg)
    try:
        s = sc.output_spectrum(cfg.params, omega, cfg.detuning)
        for row in zip(s.omega, s.s11_sq, s.s22_sq, s.s_out_1, s.s_out_2):
            t.append(tuple(float(x) for x in row) + ("",))
        return t
    except sc.PoleHit:
        pass
    for w in omega:
        try:
            s = sc.output_spectrum(cfg.params, np.array([w]), cfg.detuning)
            t.append((float(w), float(s.s11_sq[0]), float(s.s22_sq[0]), float(s.s_out_1[0]), float(s.s_out_2[0]), ""))
        except EPSenseError as exc:
            t.append((float(w), NAN, NAN, NAN, NAN, type(exc).__name__))
    return t


def _validate_row(p, cfg):
    d = derive(p)
    st = solve_ideal(p, d, cfg.detuning)
    full = fm.mechanical_branch(fm.build_full_matrix(p, d, st))
    eff = em.eigenvalues(em.build_heff(p, d, st))
    err = fm.branch_error(p, cfg.detuning)
    return (p.g, err, full.lambda_plus.real, full.lambda_plus.imag, full.lambda_minus.real, full.lambda_minus.imag,
            eff.lambda_plus.real, eff.lambda_plus.imag, eff.lambda_minus.real, eff.lambda_minus.imag)


def run_validate(cfg, threads=1):
    t = _table(cfg, "validate", list(VALIDATE_COLS))
    p = cfg.params
    if cfg.validate.at_ep:
        try:
            p = em.locate_ep(p.unperturbed(), detuning=cfg.detuning).params.perturbed(p.perturbation)
        except EPSenseError as exc:
            for k in cfg.validate.kappas:
                t.append((k,) + (NAN,) * (len(VALIDATE_COLS) - 1) + (type(exc).__name__,))
            return t
    pts = [fm.with_kappa_at_fixed_damping(p, k) for k in cfg.validate.kappas]
    rows = _pool_map(lambda q: _guarded(lambda: _validate_row(q, cfg), len(VALIDATE_COLS) - 1), pts, threads)
    for q, row in zip(pts, rows):
        t.append((q.kappa,) + row)
    return t


_TASKS = {
    "derive": run_derive,
    "steady": run_steady,
    "ep": run_ep,
    "eigen-sweep": run_eigen_sweep,
    "sens-sweep": run_sens_sweep,
    "spectra": run_spectra,
    "validate": run_validate,
}


def run(config: RunConfig, threads: int = 1) -> ResultTable:
    """Dispatch ``config.task``; rows come out in input order regardless of ``threads``."""
    try:
        fn = _TASKS[config.task]
    except KeyError:
        raise ConfigError("task.name", f"unknown task {config.task!r}") from None
    return fn(config, threads)


# --- canned figure datasets -------------------------------------------------

def _digest(*cfgs: RunConfig) -> str:
    h = hashlib.sha256()
    for c in cfgs:
        h.update(c.to_text().encode("utf-8"))
    return h.hexdigest()


def _wide(name: str, key: str, parts: list[tuple[str, RunConfig, ResultTable]], value_cols: list[str]) -> ResultTable:
    cols = [key]
    for label, _, _ in parts:
        cols += [f"{c}__{label}" for c in value_cols]
    cols.append(ERROR_COLUMN)
    out = ResultTable(name, cols, provenance={"figure_panel": name, "config_sha256": _digest(*(c for _, c, _ in parts))})
    keys = parts[0][2].column(key)
    for i, k in enumerate(keys):
        row, errs = [k], []
        for _, _, tab in parts:
            r = dict(zip(tab.columns, tab.rows[i]))
            row += [r[c] for c in value_cols]
            if r[ERROR_COLUMN]:
                errs.append(r[ERROR_COLUMN])
        out.append(row + [";".join(errs)])
    return out


def _eigen_parts(base: SystemParams, variants, sweep: SweepSpec):
    parts = []
    for label, p in variants:
        cfg = RunConfig(task="eigen-sweep", params=p, sweep=sweep)
        parts.append((label, cfg, run(cfg)))
    return parts


def _splitting_table(name: str, parts) -> ResultTable:
    (_, c0, t0), (_, c1, t1) = parts
    out = ResultTable(name, ["alpha_in", "d_omega_plus", "d_omega_minus", ERROR_COLUMN],
                      provenance={"figure_panel": name, "config_sha256": _digest(c0, c1)})
    for r0, r1 in zip(t0.rows, t1.rows):
        out.append((r0[0], r1[1] - r0[1], r1[2] - r0[2], ";".join(e for e in (r0[-1], r1[-1]) if e)))
    return out


def _spectra_parts(variants, grid: GridSpec):
    parts = []
    for label, p in variants:
        cfg = RunConfig(task="spectra", params=p, grid=grid)
        parts.append((label, cfg, run(cfg)))
    return parts


def _fig1(base):
    sweep = DEFAULT_EIGEN_SWEEP
    bc = _eigen_parts(base, [("unperturbed", base), ("dw5e-3", base.perturbed(Perturbation(delta_omega=5e-3)))], sweep)
    de = _eigen_parts(base, [("unperturbed", base), ("dg5e-3", base.perturbed(Perturbation(delta_gamma=5e-3)))], sweep)
    return {"fig1_bc": _wide("fig1_bc", "alpha_in", bc, EIGEN_COLS),
            "fig1_de": _wide("fig1_de", "alpha_in", de, EIGEN_COLS)}


def _fig2(base):
    sweep = SweepSpec("alpha_in", 0.0, 800.0, 801)
    out = {}
    for chi, (pa, pb) in ((0.0, ("a", "b")), (0.3, ("c", "d"))):
        p = base.with_chi(chi)
        parts = _eigen_parts(p, [("unperturbed", p), ("dw2e-3", p.perturbed(Perturbation(delta_omega=2e-3)))], sweep)
        out[f"fig2_{pa}"] = _wide(f"fig2_{pa}", "alpha_in", parts, ["re_lambda_plus", "re_lambda_minus"])
        out[f"fig2_{pb}"] = _splitting_table(f"fig2_{pb}", parts)
    return out


def _sens(base, scheme, chis):
    cfg = RunConfig(task="sens-sweep", params=base, sensing=SensingSpec(scheme, tuple(chis)))
    return cfg, run(cfg)


def _fig3(base):
    out = {}
    for scheme, panel in (("splitting", "fig3_ab"), ("shifting", "fig3_cd")):
        cfg, t = _sens(base, scheme, (0.0, 0.5, 0.7))
        t.name = panel
        t.provenance["figure_panel"] = panel
        out[panel] = t
    return out


def _figS1(base):
    (c1, split), (c2, shift) = _sens(base, "splitting", (0.0,)), _sens(base, "shifting", (0.0,))
    prov = {"config_sha256": _digest(c1, c2)}
    a = ResultTable("figS1_a", ["epsilon", "sens_splitting", "sens_splitting_analytic", "sens_shifting",
                                "sens_shifting_analytic", ERROR_COLUMN], provenance={"figure_panel": "figS1_a", **prov})
    b = ResultTable("figS1_b", ["epsilon", "eta_splitting", "eta_splitting_analytic", "eta_shifting",
                                "eta_shifting_analytic", ERROR_COLUMN], provenance={"figure_panel": "figS1_b", **prov})
    ci = {c: i for i, c in enumerate(split.columns)}
    for rs, rh in zip(split.rows, shift.rows):
        eps = rs[ci["epsilon"]]
        err = ";".join(e for e in (rs[-1], rh[-1]) if e)
        etas = (rs[ci["eta_numeric"]], rs[ci["eta_analytic"]], rh[ci["eta_numeric"]], rh[ci["eta_analytic"]])
        a.append((eps,) + tuple(e * abs(eps) for e in etas) + (err,))
        b.append((eps,) + etas + (err,))
    return {"figS1_a": a, "figS1_b": b}


def _fig4(base):
    ep = em.locate_ep(base.unperturbed())
    pe = ep.params
    grid = GridSpec(centre=1.0, half_width=0.1, points=2001)
    drives = [("ep", pe), ("a350", replace(pe, alpha_in=350.0)), ("a250", replace(pe, alpha_in=250.0))]
    parts = _spectra_parts(drives, grid)
    out = {
        "fig4_ab": _wide("fig4_ab", "omega", parts, ["s11_sq", "s22_sq"]),
        "fig4_cd": _wide("fig4_cd", "omega", parts, ["s_out_1", "s_out_2"]),
    }
    nth = [(f"nth{n:g}", replace(pe, n_th_1=float(n), n_th_2=float(n))) for n in (0, 1, 5)]
    out["fig4_e"] = _wide("fig4_e", "omega", _spectra_parts(nth, grid), ["s_out_1"])
    chis = [(f"chi{c:g}", pe.with_chi(c)) for c in (0.0, 0.2, 0.3)]
    out["fig4_f"] = _wide("fig4_f", "omega", _spectra_parts(chis, GridSpec(0.95, 0.15, 2001)), ["s_out_1"])
    dws = [("unperturbed", pe), ("dw5e-3", pe.perturbed(Perturbation(delta_omega=5e-3)))]
    out["fig4_g"] = _wide("fig4_g", "omega", _spectra_parts(dws, grid), ["s_out_1"])
    dgs = [("unperturbed", pe), ("dg5e-3", pe.perturbed(Perturbation(delta_gamma=5e-3)))]
    out["fig4_h"] = _wide("fig4_h", "omega", _spectra_parts(dgs, grid), ["s_out_1"])
    return out


_FIGS = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "figS1": _figS1}


def figdata(figure: str, base: SystemParams | None = None) -> dict[str, ResultTable]:
    """One table per panel, with the caption parameters baked in."""
    try:
        builder = _FIGS[figure]
    except KeyError:
        raise ConfigError("figure", f"unknown figure {figure!r}; expected one of {list(FIGURES)}") from None
    return builder(base or SystemParams())
