"""Grid-based property checks, conjecture scans and the full verification suite."""

from .checks import (
    check_convexity,
    check_counterexample,
    check_limit,
    check_monotone,
    check_sandwich,
    check_sign,
    combine,
    step_comparison,
)
from .grids import Grid
from .outcome import CheckOutcome, ConjectureScan
from .report import VerificationReport, scans_csv, scans_json
from .scans import scan_conjecture_gi, scan_conjecture_h, scan_open_problem
from .suite import SuiteConfig, claim_ids, run_full_suite

__all__ = [
    "Grid", "CheckOutcome", "ConjectureScan", "VerificationReport", "SuiteConfig",
    "check_monotone", "check_convexity", "check_sign", "check_limit", "check_sandwich",
    "check_counterexample", "step_comparison", "combine", "scan_conjecture_h",
    "scan_conjecture_gi", "scan_open_problem", "run_full_suite", "claim_ids",
    "scans_csv", "scans_json",
]
