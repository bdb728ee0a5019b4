"""Frozen reference values from independent high-precision computations."""

from underlay_evt.model import UNLIMITED

# Independent oracles: mpmath (30 digits) double integrals over the limit-law
# density and the ST power law, continuous part plus atom. Frozen here.
BER_ETVB_ONE = 0.2236127531132638  # unlimited, k=1, c=1, eta T v b = 1
BER_ORACLE = [
    # (k, p_s, b, value) at eta=20, T=0.1, c=v=0.5
    (1, 0.31622776601683794, 50.0, 0.0057133437372087785),
    (2, 0.31622776601683794, 50.0, 0.02050851130263878),
    (2, UNLIMITED, 50.0, 0.0004916614656973798),
    (3, 2.0, 5.0, 0.12160200864215842),
]
OUTAGE_ORACLE = [
    # (k, p_s, t_intf, b, x0, value) at eta=20
    (1, 0.1, 0.1, 20.0, 19.952623149688797, 0.904622592868319),
    (2, 0.1, 0.1, 20.0, 19.952623149688797, 0.9952996518189993),
    (2, UNLIMITED, 0.1, 20.0, 19.952623149688797, 0.30857225311220965),
    (1, 1.0, 0.01, 3.0, 2.0, 0.5904917361514366),
]
# E[log2(b P Z)] and -(1/A) log2 E[(b P Z)^-A] by mpmath double integrals
THROUGHPUT_ORACLE = [
    # (k, p_s, b, a_exp or None, value) at eta=20, T=0.1
    (1, 10.0, 100.0, None, 9.03461858510466),
    (1, 10.0, 100.0, 0.5, 8.250772807697201),
    (1, 10.0, 100.0, 2.0, 6.6420716905421475),
    (2, UNLIMITED, 100.0, None, 7.866653503439496),
    (2, UNLIMITED, 100.0, 0.5, 7.170938929387774),
    (2, UNLIMITED, 100.0, 2.0, 5.851374939414146),
    (3, 0.01, 500.0, None, 0.9906317108307844),
    (3, 0.01, 500.0, 0.5, 0.8566507741980065),
    (3, 0.01, 500.0, 2.0, 0.5294468445267843),
]
