"""Figure presets: single-point configurations and full curve sweeps.

Every preset is plain configuration text, so a preset and an equivalent
config file parse through the same code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .config import build_config, db_to_linear, make_metric, read_settings
from .model import UNLIMITED, CsiParams, Metric, SystemParams

_BASE = """
lam = 2
beta = 3
m = 2
eta = 20
p_m = 0dB
t_intf = -10dB
"""

PRESET_TEXT = {
    "fig2": "p_s = 10dB\nn_users = 100\nk_rank = 1\nmetric = avg_throughput",
    "fig3": "p_s = 10dB\nn_users = 30\nk_rank = 1\nmetric = avg_throughput",
    "fig4": "p_s = -20dB\nn_users = 100\nk_rank = 1\nmetric = avg_throughput",
    "fig5": "p_s = 5dB\nn_users = 100\nk_rank = 1\nmetric = eff_throughput\na_exp = 0.5",
    "fig6": "p_s = 0dB\nn_users = 30\nk_rank = 1\nmetric = eff_throughput\na_exp = 1",
    "fig7": "p_s = -10dB\nn_users = 30\nk_rank = 1\nmetric = outage\nx0 = 13dB",
    "fig8": "p_s = -5dB\nn_users = 100\nk_rank = 1\nmetric = avg_ber\nc = 0.5\nv = 0.5",
    "fig9": (
        "p_s = inf\nn_users = 40\nk_rank = 1\nmetric = eff_throughput\na_exp = 0.5\n"
        "rho = 0.9\ndelta = 1\ngamma0 = 0.1\neta_hat = 20\nbeta_hat = 3"
    ),
}

FIGURE_IDS = tuple(sorted(PRESET_TEXT))


def preset_settings(name: str) -> dict[str, str]:
    if name not in PRESET_TEXT:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(FIGURE_IDS)}")
    return read_settings((_BASE + PRESET_TEXT[name]).splitlines(), name)


def preset(name: str):
    """The :class:`RunConfig` of a figure's representative point."""
    return build_config(preset_settings(name))


@dataclass(frozen=True)
class CurvePoint:
    labels: tuple
    metric: Metric
    params: SystemParams
    csi: Optional[CsiParams] = None


@dataclass(frozen=True)
class FigureData:
    figure_id: str
    label_names: tuple[str, ...]
    points: tuple[CurvePoint, ...]


def _db_range(start: float, stop: float, step: float) -> list[float]:
    n = round((stop - start) / step)
    return [start + i * step for i in range(n + 1)]


def _p_s(db):
    return UNLIMITED if db is None else db_to_linear(db)


def _db_label(db):
    return "inf" if db is None else db


def figure(figure_id: str) -> FigureData:
    """All curve points of a figure, with the caption's parameters."""
    if figure_id not in PRESET_TEXT:
        raise KeyError(f"unknown figure {figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
    base = preset(figure_id)
    p, metric = base.params, base.metric
    pts: list[CurvePoint] = []

    if figure_id == "fig2":
        names = ("p_s_db", "k", "n_users")
        for ps in (10.0, None):
            for k in (1, 2, 3):
                for n in range(10, 201, 10):
                    q = p.replace(p_s=_p_s(ps), k_rank=k, n_users=n)
                    pts.append(CurvePoint((_db_label(ps), k, n), metric, q))
    elif figure_id == "fig3":
        names = ("n_users", "p_s_db")
        for n in (6, 30):
            for ps in _db_range(-10.0, 30.0, 2.0):
                pts.append(CurvePoint((n, ps), metric, p.replace(n_users=n, p_s=_p_s(ps))))
    elif figure_id == "fig4":
        names = ("p_s_db", "n_users", "t_intf_db")
        for ps in (-20.0, None):
            for n in (20, 100):
                for t in _db_range(-50.0, 0.0, 5.0):
                    q = p.replace(p_s=_p_s(ps), n_users=n, t_intf=db_to_linear(t))
                    pts.append(CurvePoint((_db_label(ps), n, t), metric, q))
    elif figure_id == "fig5":
        names = ("p_s_db", "k", "n_users")
        for ps in (5.0, None):
            for k in (1, 2, 4):
                for n in range(10, 201, 10):
                    q = p.replace(p_s=_p_s(ps), k_rank=k, n_users=n)
                    pts.append(CurvePoint((_db_label(ps), k, n), metric, q))
    elif figure_id == "fig6":
        names = ("p_s_db", "a_exp")
        for ps in (-10.0, 0.0, 10.0, None):
            for i in range(1, 21):
                a = i / 5.0
                q = p.replace(p_s=_p_s(ps))
                pts.append(CurvePoint((_db_label(ps), a), make_metric("eff_throughput", a_exp=a), q))
    elif figure_id == "fig7":
        names = ("p_s_db", "k", "t_intf_db")
        for ps in (-10.0, None):
            for k in (1, 2):
                for t in _db_range(-40.0, -5.0, 2.5):
                    q = p.replace(p_s=_p_s(ps), k_rank=k, t_intf=db_to_linear(t))
                    pts.append(CurvePoint((_db_label(ps), k, t), metric, q))
    elif figure_id == "fig8":
        names = ("p_s_db", "n_users")
        for ps in (-5.0, None):
            for n in range(10, 201, 10):
                pts.append(CurvePoint((_db_label(ps), n), metric, p.replace(p_s=_p_s(ps), n_users=n)))
    else:  # fig9
        names = ("a_exp", "k", "rho")
        for a in (0.0, 0.5):
            m = make_metric("eff_throughput", a_exp=a)
            for k in (1, 2):
                for i in range(11):
                    rho = (10 + i) / 20.0
                    csi = base.csi.replace(rho=rho)
                    pts.append(CurvePoint((a, k, rho), m, p.replace(k_rank=k), csi))
    return FigureData(figure_id, names, tuple(pts))
