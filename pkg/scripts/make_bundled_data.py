"""Regenerate the bundled example dataset in ``src/jfrft/data``.

A 10-vertex k-NN graph over random planar points carries a 60-step signal
split into blocks of 6. In the (0.55, 0.45) joint fractional domain the
clean signal lives in the leading 6 x 4 corner and the noise in the
complementary corner, so the two separate exactly at those orders.
"""
from pathlib import Path

from jfrft.fracops import make_graph_fracop, make_time_fracop
from jfrft.graphs import gft_factorize, knn_graph, save_edge_list, shift_operator
from jfrft.signals import SyntheticSpec, TimeVertexSignal, gen_bandlimited, gen_highfreq_noise, make_rng, write_timeseries_csv
from jfrft.transform import JointTransform

N, T, M = 10, 6, 10
ORDERS = (0.55, 0.45)
SPEC = SyntheticSpec(sigma=0.2, overlap=0, k_band=6, l_band=4, seed=11)


def main(out=Path(__file__).resolve().parents[1] / "src" / "jfrft" / "data"):
    coords = make_rng(SPEC.seed).uniform(size=(N, 2))
    g = knn_graph(coords, k=3)
    jt = JointTransform(*ORDERS, make_graph_fracop(gft_factorize(shift_operator(g, "adjacency"))), make_time_fracop(T))
    x = gen_bandlimited(jt, SPEC.band, M, SPEC.seed)
    noise = gen_highfreq_noise(jt, SPEC.noise_spec(N, T), M)
    y = TimeVertexSignal(x.data + noise.data, T)
    out.mkdir(parents=True, exist_ok=True)
    save_edge_list(g, out / "knn10_edges.csv")
    write_timeseries_csv(x, out / "knn10_clean.csv")
    write_timeseries_csv(y, out / "knn10_noisy.csv")
    (out / "knn10_noise.json").write_text(SPEC.to_json() + "\n")


if __name__ == "__main__":
    main()
