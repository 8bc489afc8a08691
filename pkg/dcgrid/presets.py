# coding=utf-8
"""
Built-in scenario documents: the two-branch averaging-model grid checked at
several CPL powers, the low-capacitance averaging model of the switching
comparison, the controller-comparison grid and a sweep over its (P_L, C_L)
plane.
"""
import os

from .log_utils import get_default_logger
from .netmodel import parse_scenario
from .sweep import parse_sweep

log = get_default_logger(__name__)

_BRANCH = """
[[branch]]
v_ref = 100.0
r_p = {r_p}
r_q = {r_q}
l_q = {l_q}
r_t = {r_t}
l_t = {l_t}
c_b = {c_b}
controller = "proposed"
"""

_TAIL = """
[load]
c_l = {c_l}
r_l = {r_l}

[cpl]
p_l = {p_l}
v_min = 10.0
plug_in_time = {plug_in_time}

[sim]
t_end = {t_end}
abs_tol = 1e-08
rel_tol = 1e-06
initial_state = "zero"

[meta]
label = "{label}"
"""


def _document(label, branch, tail):
    return _BRANCH.format(**branch).lstrip() + _BRANCH.format(**branch) + _TAIL.format(label=label, **tail)


_TABLE_IV = dict(r_p=0.6, r_q=0.9, l_q=1.0, r_t=3.0, l_t=0.5, c_b=5.0)
_TABLE_VII = dict(r_p=0.6, r_q=0.9, l_q=0.01, r_t=4.0, l_t=0.5, c_b=0.1)
_TABLE_VIII = dict(r_p=5.0, r_q=1.25, l_q=2.0, r_t=0.01, l_t=0.5, c_b=0.01)

TABLE_IV_POWERS = (800.0, 805.0, 810.0, 825.0)


def table_iv(p_l=800.0, t_end=120.0):
    """Two identical branches, CPL plugged in at 20 s."""
    return _document(
        "two-branch grid, P_L = {:g} W".format(p_l),
        _TABLE_IV,
        dict(c_l=1.0, r_l=2.0, p_l=p_l, plug_in_time=20.0, t_end=t_end),
    )


def table_vii(p_l=500.0):
    """Averaging model of the switching-converter grid, CPL plugged in at 3 s."""
    return _document(
        "averaging model, P_L = {:g} W".format(p_l),
        _TABLE_VII,
        dict(c_l=0.1, r_l=20.0, p_l=p_l, plug_in_time=3.0, t_end=10.0),
    )


def table_viii(p_l=530.0, c_l=0.05):
    """Controller-comparison grid, CPL plugged in at 5 s."""
    return _document(
        "controller comparison, P_L = {:g} W".format(p_l),
        _TABLE_VIII,
        dict(c_l=c_l, r_l=10.0, p_l=p_l, plug_in_time=5.0, t_end=15.0),
    )


_SWEEP = """
[sweep]
mode = "Both"
workers = 1

[sweep.axis1]
path = "cpl.p_l"
min = 100.0
max = 2000.0
n = {n}

[sweep.axis2]
path = "load.c_l"
min = 0.01
max = 0.2
n = {n}

[sweep.simulate_near]
point = [1500.0, 0.07]
radius = 0.03
"""


def table_viii_sweep(n=50):
    """(P_L, C_L) sweep on the controller-comparison grid, simulating around (1500 W, 0.07 F)."""
    return table_viii() + _SWEEP.format(n=n)


def examples():
    """File name to document text of every built-in example."""
    docs = {}
    for p_l in TABLE_IV_POWERS:
        docs["tableIV_{:d}.toml".format(int(p_l))] = table_iv(p_l)
    docs["tableVII_500.toml"] = table_vii()
    docs["tableVIII_530.toml"] = table_viii()
    docs["tableVIII_sweep.toml"] = table_viii_sweep()
    return docs


def scenario(name):
    """Parse a built-in example by file name."""
    docs = examples()
    if name not in docs:
        raise KeyError("Unknown example {!r}, expected one of {}".format(name, sorted(docs)))
    if name.endswith("_sweep.toml"):
        return parse_sweep(docs[name])
    return parse_scenario(docs[name])


def write_examples(directory):
    """
    :param directory: created when missing
    :return: list of written paths
    """
    if not os.path.isdir(directory):
        os.makedirs(directory)
    written = []
    for name, text in sorted(examples().items()):
        path = os.path.join(directory, name)
        with open(path, "w") as file:
            file.write(text)
        written.append(path)
    log.info("Wrote %d example documents to %s", len(written), directory)
    return written
