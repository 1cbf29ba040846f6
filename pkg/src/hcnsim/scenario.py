"""Random single-cell layouts and the geometric primitives they feed."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidScenarioError
from .params import FadingMode, SystemParams

# Distances below this are treated as coincident nodes (the l^-n path loss
# would diverge); such layouts are rejected rather than clamped.
MIN_LINK_DISTANCE_M = 0.1


@dataclass(frozen=True)
class Scenario:
    """Sampled positions of the BS, cellular users, and D2D pair endpoints.

    All coordinates are meters inside [0, side_length]^2. ``channel_gains``
    holds per-link |h0|^2 draws for the cellular band and is present only in
    Rayleigh fading mode; keys are ``cell_bs`` (C,), ``d2d_bs`` (D,),
    ``cell_d2d`` (C, D) and ``d2d_d2d`` (D, D), each indexed transmitter
    first, receiver second.
    """

    bs_position: np.ndarray
    cellular_positions: np.ndarray
    d2d_tx_positions: np.ndarray
    d2d_rx_positions: np.ndarray
    channel_gains: dict[str, np.ndarray] | None = field(default=None)

    @property
    def num_cellular(self) -> int:
        return len(self.cellular_positions)

    @property
    def num_d2d(self) -> int:
        return len(self.d2d_tx_positions)

    def to_json(self) -> str:
        doc = {
            "bs_position": self.bs_position.tolist(),
            "cellular_positions": self.cellular_positions.tolist(),
            "d2d_tx_positions": self.d2d_tx_positions.tolist(),
            "d2d_rx_positions": self.d2d_rx_positions.tolist(),
        }
        if self.channel_gains is not None:
            doc["channel_gains"] = {
                k: v.tolist() for k, v in self.channel_gains.items()
            }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        doc = json.loads(text)
        gains = doc.get("channel_gains")
        return cls(
            bs_position=np.asarray(doc["bs_position"], dtype=float),
            cellular_positions=np.asarray(
                doc["cellular_positions"], dtype=float).reshape(-1, 2),
            d2d_tx_positions=np.asarray(
                doc["d2d_tx_positions"], dtype=float).reshape(-1, 2),
            d2d_rx_positions=np.asarray(
                doc["d2d_rx_positions"], dtype=float).reshape(-1, 2),
            channel_gains=None if gains is None else {
                k: np.asarray(v, dtype=float) for k, v in gains.items()
            },
        )


def generate_scenario(params: SystemParams) -> Scenario:
    """Draw a uniform random layout, deterministic given params.rng_seed.

    Cellular users and D2D transmitters are i.i.d. uniform over the square;
    each D2D receiver sits at its transmitter plus independent per-axis
    offsets uniform on [-a, a]. Offsets are rejected and resampled when the
    receiver would fall outside the area or (near-)coincide with its
    transmitter.
    """
    params.validate()
    rng = np.random.default_rng(params.rng_seed)
    side = params.side_length
    a = params.d2d_axis_offset_max
    C, D = params.num_cellular, params.num_d2d

    bs = np.array([side / 2.0, side / 2.0])
    cellular = rng.uniform(0.0, side, size=(C, 2))
    d2d_tx = rng.uniform(0.0, side, size=(D, 2))
    d2d_rx = np.empty((D, 2))
    for d in range(D):
        while True:
            offset = rng.uniform(-a, a, size=2)
            rx = d2d_tx[d] + offset
            if np.hypot(*offset) < MIN_LINK_DISTANCE_M:
                continue
            if 0.0 <= rx[0] <= side and 0.0 <= rx[1] <= side:
                d2d_rx[d] = rx
                break

    gains = None
    if params.fading_mode is FadingMode.RAYLEIGH:
        gains = {
            "cell_bs": rng.exponential(1.0, size=C),
            "d2d_bs": rng.exponential(1.0, size=D),
            "cell_d2d": rng.exponential(1.0, size=(C, D)),
            "d2d_d2d": rng.exponential(1.0, size=(D, D)),
        }

    return Scenario(bs, cellular, d2d_tx, d2d_rx, gains)


def distance(a, b) -> float:
    """Euclidean distance between two 2D points, meters."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))


def _angle_between_deg(u: np.ndarray, v: np.ndarray) -> float:
    nu = np.hypot(u[0], u[1])
    nv = np.hypot(v[0], v[1])
    if nu == 0.0 or nv == 0.0:
        raise InvalidScenarioError("zero-length direction vector")
    cosang = np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0)
    return float(np.degrees(np.arccos(cosang)))


def off_boresight_angles(interferer_link, victim_link) -> tuple[float, float]:
    """Angles (degrees) between boresights and the cross-link directions.

    Each link is a ((tx_x, tx_y), (rx_x, rx_y)) pair of points. The first
    returned angle is at the interferer's transmitter between its own
    boresight (toward its own receiver) and the direction to the victim's
    receiver; the second is at the victim's receiver between its boresight
    (toward its own transmitter) and the direction to the interferer's
    transmitter. Both lie in [0, 180]. For identical links both are 0.
    """
    itx = np.asarray(interferer_link[0], dtype=float)
    irx = np.asarray(interferer_link[1], dtype=float)
    vtx = np.asarray(victim_link[0], dtype=float)
    vrx = np.asarray(victim_link[1], dtype=float)
    if np.array_equal(itx, irx) or np.array_equal(vtx, vrx):
        raise InvalidScenarioError("degenerate zero-length link")
    if np.array_equal(itx, vtx) and np.array_equal(irx, vrx):
        return (0.0, 0.0)
    tx_angle = _angle_between_deg(irx - itx, vrx - itx)
    rx_angle = _angle_between_deg(vtx - vrx, itx - vrx)
    return (tx_angle, rx_angle)
