"""Interaction kernels: evaluation and admissibility."""

from cocircular.kernels.admissibility import check_admissible
from cocircular.kernels.functions import eval_f, eval_G, eval_g, eval_g_prime

__all__ = ["check_admissible", "eval_f", "eval_G", "eval_g", "eval_g_prime"]
