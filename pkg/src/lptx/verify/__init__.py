"""Inequality harness: one experiment per estimate, each returning an :class:`EstimateReport`."""
from .experiments import (MultiIndex, alpha_exponent, band_support, check_commutator,
                          check_interpolation, check_logL1, check_multilinear,
                          check_simplex_combinatorics, check_trifrequency, default_triples,
                          mu_weight, probe_log_loss, sweep_delta0, tri_vanishes)
from .report import EstimateReport, Verdict, linear_fit

# experiment id -> (estimate it exercises, entry point name)
CATALOG = {
    "logL1": ("L1 bound with a logarithmic correction for a CZ operator", "check_logL1"),
    "commutator": ("commutator of a high-frequency CZ power with a band atom", "check_commutator"),
    "trifrequency": ("tri-frequency decay of band-localized products", "check_trifrequency"),
    "multilinear": ("geometric growth of multilinear CZ chains", "check_multilinear"),
    "interpolation": ("2^(-k/2) sup-norm gain for the time-derivative part", "check_interpolation"),
    "simplex": ("mixed L1/L2 bound for ordered simplex integrals", "check_simplex_combinatorics"),
    "log-loss": ("single logarithmic loss in sup_t ||u||_1", "probe_log_loss"),
    "delta0-sweep": ("geometric bound on the Dyson terms", "sweep_delta0"),
}


def list_experiments() -> list[str]:
    return [f"{k} → {v[0]}" for k, v in CATALOG.items()]


__all__ = [
    "CATALOG", "list_experiments", "EstimateReport", "Verdict", "linear_fit", "MultiIndex",
    "alpha_exponent", "mu_weight", "band_support", "tri_vanishes", "default_triples",
    "check_logL1", "check_commutator", "check_trifrequency", "check_multilinear",
    "check_interpolation", "check_simplex_combinatorics", "probe_log_loss", "sweep_delta0",
]
