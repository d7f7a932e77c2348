"""
Equations and reference quantities for the flows and monitors.
"""

import math

# (name, LaTeX, description) per flow variant; echoed into run reports
FLOW_EQUATIONS = {
    'mcf': ("Mean curvature flow",
            r"\partial_t x = \vec{H} = -H\nu",
            "Normal speed equal to mean curvature; clock t"),
    'drifting_mcf': ("Drifting mean curvature flow",
                     r"\partial_t x = -H\nu + \frac{x^T}{2t+1}",
                     "Same images as MCF, tangential drift makes the expander density pointwise monotone; clock t"),
    'normalized_mcf': ("Normalized mean curvature flow",
                       r"\partial_s \bar{x} = -\bar{H}\bar{\nu} - \bar{x}",
                       "Similarity variables x/sqrt(2t+1), s = log(2t+1)/2; clock s"),
    'normalized_drifting_mcf': ("Normalized drifting mean curvature flow",
                                r"\partial_s \tilde{x} = -\tilde{H}\tilde{\nu} - \langle\tilde{x},\tilde{\nu}\rangle\tilde{\nu}",
                                "Pure normal motion by the expander residual; expanders are fixed points; clock s"),
}

# Monitored quantity per monitor name: (name, LaTeX); used for figure titles
MONITOR_EQUATIONS = {
    'density_rate': ('Expander density', r'\rho = (t+\tfrac12)^{-n/2} e^{|x|^2/(4(t+\frac12))}'),
    'normalized_density_rate': ('Normalized expander density', r'\tilde{\rho} = e^{\frac12|\tilde{x}|^2}'),
    'weighted_mass': ('Weighted mass', r'\int e^{\frac12|\tilde{x}|^2-|x_0|^2}\,d\tilde{\mu}_s'),
    'deficit_vanishing': ('Expander deficit', r'\int (H+\langle x,\nu\rangle)^2\,w\,d\mu'),
    'huisken_entropy': ('Huisken entropy', r'\int (4\pi(T-t))^{-n/2} e^{-|x|^2/(4(T-t))}\,d\mu'),
    'integrated_density': ('Integrated expander density', r'\int \rho\,d\mu_t'),
    'type_iii': ('Curvature scale', r'(T-t)\max|A|^2'),
    'radius_error': ('Radius error', r'|\bar{R}(t) - R(t)| / R(t)'),
    'gauge_equivalence': ('Gauge equivalence', r'd_H(M^{MCF}_t, M^{drift}_t) / \bar{h}'),
    'gradient_growth': ('Largest graph slope', r'\sup |u_r|'),
}


def sphere_volume(k: int) -> float:
    """Volume of the unit k-sphere S^k in R^{k+1} (S^0 counts two points)."""
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


def flow_equation(variant: str) -> str:
    """Plain-text description of a flow variant for reports."""
    try:
        name, latex, description = FLOW_EQUATIONS[variant]
    except KeyError:
        raise ValueError(f"Unknown flow variant: {variant}")
    return f"{name}: {latex} ({description})"
