from .engine import (COMPONENTS, DEFAULT_OPTIONS, METRICS, MODES, Estimate, SimOptions,
                     SinrBreakdown, TrialBatch, TrialOutcome, comm_sinr, dump_trials,
                     estimate_coverage, estimate_from_samples, estimate_rate, link_sinr,
                     links_needed, pack_params, run_trial, select_sinr, simulate)

__all__ = ["COMPONENTS", "DEFAULT_OPTIONS", "METRICS", "MODES", "Estimate", "SimOptions",
           "SinrBreakdown", "TrialBatch", "TrialOutcome", "comm_sinr", "dump_trials",
           "estimate_coverage", "estimate_from_samples", "estimate_rate", "link_sinr",
           "links_needed", "pack_params", "run_trial", "select_sinr", "simulate"]
