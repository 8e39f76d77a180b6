"""Monte Carlo power analysis: Python bindings over the C++ core."""

try:  # installed layout: the extension lives inside the package
    from ._powsim import (
        binom_exact_test,
        cdf,
        ci_width,
        estimate_power,
        list_scenarios,
        oracle,
        power_curve,
        quantile,
        sample,
        solve_sample_size,
        t_test_one_sample,
        wilcoxon_signed_rank,
    )
except ImportError:  # build-tree layout: extension on sys.path
    from _powsim import (
        binom_exact_test,
        cdf,
        ci_width,
        estimate_power,
        list_scenarios,
        oracle,
        power_curve,
        quantile,
        sample,
        solve_sample_size,
        t_test_one_sample,
        wilcoxon_signed_rank,
    )

__all__ = [
    "binom_exact_test",
    "cdf",
    "ci_width",
    "estimate_power",
    "list_scenarios",
    "oracle",
    "power_curve",
    "quantile",
    "sample",
    "solve_sample_size",
    "t_test_one_sample",
    "wilcoxon_signed_rank",
]
