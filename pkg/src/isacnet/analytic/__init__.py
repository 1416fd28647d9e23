"""Deterministic evaluation of the coverage and rate expressions."""
from .laplace import (clutter_psi, inter_clutter_core, lt_direct, lt_inter_clutter_bi,
                      lt_inter_clutter_mono, lt_intra_clutter_bi, lt_intra_clutter_mono)
from .sensing import (MODES, CoverageResult, RateResult, avg_coverage_networked,
                      bistatic_coverages, coverage_bistatic, coverage_mono, coverage_networked,
                      fuse, mono_factors, rate_sensing)
from .comm import (alzer_k, comm_only_config, coverage_comm, lt_comm_los, lt_comm_nlos,
                   rate_comm, rate_comm_only)
