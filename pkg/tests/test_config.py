import math

import numpy as np
import pytest

from gyrofp.config import (
    InitialCondition,
    RunConfig,
    cosine_field,
    frozen_potential,
    initial_distribution,
    initial_state,
    load_config,
    parse_config,
)
from gyrofp.io import write_snapshot
from gyrofp.solver import ConfigurationError, PhysicalParams

TEXT = """
[physics]
nu = 0.02
beta = 0.0
K = 8
N_u = 16   # nodes
[time]
t_end = 1.5
[initial]
modes = 1 0; 2 -1
amplitudes = 0.1, 0.2
[run]
mode = frozen_phi
frozen_phi = modes
phi_modes = 1 1
phi_amplitudes = 0.5
[monitors]
enabled = u_norm m_norm
abort = no
"""


def test_parse_full():
    cfg = parse_config(TEXT)
    assert cfg.params == PhysicalParams(nu=0.02, beta=0.0, K=8, N_u=16)
    assert cfg.t_end == 1.5 and cfg.dt_max == 0.05
    assert cfg.initial.modes == ((1, 0), (2, -1)) and cfg.initial.amplitudes == (0.1, 0.2)
    assert cfg.monitors == ("u_norm", "m_norm") and cfg.abort_on_violation is False
    phi = frozen_potential(cfg)
    assert abs(phi.coeffs[8 + 1, 8 + 1] - 0.25) < 1e-15
    st = initial_state(cfg)
    assert st.frozen_phi is not None


def test_defaults_from_empty():
    cfg = parse_config("")
    assert cfg == RunConfig()


@pytest.mark.parametrize(
    "text",
    [
        "[physics]\nnu = -1\n",
        "[physics]\nN_u = 2\n",
        "[physics]\ncolour = red\n",
        "[extras]\na = 1\n",
        "[time]\nt_end = soon\n",
        "[time]\ncfl = 1.5\n",
        "[run]\nmode = party\n",
        "[initial]\nmodes = 1 2 3\namplitudes = 0.1\n",
        "[initial]\nmodes = 1 0\n",
        "[monitors]\nenabled = energy\n",
        "[monitors]\nabort = maybe\n",
        "not an ini",
    ],
)
def test_bad_configs(text):
    with pytest.raises(ConfigurationError):
        parse_config(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "none.ini")


def test_negative_initial_datum_rejected():
    ic = InitialCondition(modes=((1, 0),), amplitudes=(1.5,))
    with pytest.raises(ConfigurationError):
        initial_distribution(ic, PhysicalParams(K=4, N_u=8))


def test_normalisation():
    f = initial_distribution(InitialCondition(), PhysicalParams(K=4, N_u=16))
    assert math.isclose(f.mass(), 1.0, rel_tol=1e-14)


def test_cosine_field_values():
    field = cosine_field(3, [(1, 0)], [2.0], [0.5])
    n = field.values().shape[0]
    x = 2 * np.pi * np.arange(n) / n
    assert np.allclose(field.values(), 2 * np.cos(x + 0.5)[:, None] * np.ones(n), atol=1e-14)
    with pytest.raises(ConfigurationError):
        cosine_field(3, [(4, 0)], [1.0])


def test_initial_from_snapshot(tmp_path):
    cfg = RunConfig(params=PhysicalParams(K=4, N_u=8))
    st = initial_state(cfg)
    write_snapshot(st, tmp_path / "init.gyrofp")
    (tmp_path / "c.ini").write_text("[physics]\nK = 4\nN_u = 8\n[initial]\nkind = file\npath = init.gyrofp\n")
    loaded = initial_state(load_config(tmp_path / "c.ini"))
    assert np.allclose(loaded.f.modal, st.f.modal, rtol=1e-15, atol=0)
    (tmp_path / "d.ini").write_text("[physics]\nK = 5\nN_u = 8\n[initial]\nkind = file\npath = init.gyrofp\n")
    with pytest.raises(ConfigurationError):
        initial_state(load_config(tmp_path / "d.ini"))
