"""Trainable joint time-vertex fractional Fourier transform.

Typical use::

    from jfrft import graphs, fracops, JointTransform

    gft = graphs.gft_factorize(graphs.shift_operator(g, "adjacency"))
    jt = JointTransform(0.5, 0.5, fracops.make_graph_fracop(gft), fracops.make_time_fracop(t))
"""
from .errors import ConfigError, JfrftError, NumericalError
from .filtering import DiagonalFilter, FilterMode, fixed_lowpass, snr_db, wiener_solve
from .fracops import FractionalOperator, make_graph_fracop, make_time_fracop
from .graphs import Graph, ShiftKind, gft_factorize, knn_graph, random_weighted_graph, shift_operator
from .learn import TrainConfig, TrainReport, train_denoiser, train_transform
from .signals import TimeVertexSignal
from .transform import JointTransform

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DiagonalFilter",
    "FilterMode",
    "FractionalOperator",
    "Graph",
    "JfrftError",
    "JointTransform",
    "NumericalError",
    "ShiftKind",
    "TimeVertexSignal",
    "TrainConfig",
    "TrainReport",
    "fixed_lowpass",
    "gft_factorize",
    "knn_graph",
    "make_graph_fracop",
    "make_time_fracop",
    "random_weighted_graph",
    "shift_operator",
    "snr_db",
    "train_denoiser",
    "train_transform",
    "wiener_solve",
]
