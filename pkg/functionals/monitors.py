"""
Node-wise sign monitors of a snapshot.
"""

import numpy as np
from dataclasses import asdict, dataclass
from typing import Dict, Optional

from flow.rescaling import type_iii_product
from geometry.compute import signed_expander_residual
from geometry.snapshot import HypersurfaceSnapshot


@dataclass(frozen=True)
class SignRecord:
    min_residual: float          # min(H + <x,nu>)
    max_residual: float          # max(H + <x,nu>)
    min_mean_curvature: float    # min H
    max_normal_part: float       # max <x,nu>
    max_tilt: float              # max V
    type_iii: float              # t max|A|^2 in physical time
    min_factorization: float     # min (<x,nu> - H)(<x,nu> + H)
    max_factorization: float     # max (<x,nu> - H)(<x,nu> + H)
    spacing: float               # Minimum edge length h

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def _selection(snapshot: HypersurfaceSnapshot, window: Optional[float], trim_ends: int) -> np.ndarray:
    mask = np.ones(snapshot.node_count, dtype=bool)
    if window is not None:
        mask &= snapshot.radius_sq <= window ** 2
    if trim_ends > 0 and not snapshot.representation.closed:
        rep = snapshot.representation
        if not rep.start_on_axis:
            mask[:trim_ends] = False
        if not rep.end_on_axis:
            mask[-trim_ends:] = False
    return mask


def sign_monitors(snapshot: HypersurfaceSnapshot, window: Optional[float] = None,
                  trim_ends: int = 0) -> SignRecord:
    """
    Sign scalars over the nodes of a snapshot.

    Args:
        snapshot: Snapshot with cached geometry
        window: Only nodes with |x| <= window, all nodes when None
        trim_ends: Open (non-axis) ends drop this many nodes
    """
    geo = snapshot.require_geometry()
    mask = _selection(snapshot, window, trim_ends)
    residual = signed_expander_residual(snapshot)[mask]
    factorization = (geo.normal_part[mask] - geo.mean_curvature[mask]) * residual
    return SignRecord(
        min_residual=float(np.min(residual)),
        max_residual=float(np.max(residual)),
        min_mean_curvature=float(np.min(geo.mean_curvature[mask])),
        max_normal_part=float(np.max(geo.normal_part[mask])),
        max_tilt=float(np.max(geo.tilt[mask])),
        type_iii=float(type_iii_product(np.max(geo.second_fundamental_sq), snapshot.time, snapshot.clock)),
        min_factorization=float(np.min(factorization)),
        max_factorization=float(np.max(factorization)),
        spacing=geo.spacing,
    )
