"""
Reference tables.

Published empirical sizes of the sum, max and combo tests at alpha = 0.05
over 1000 replications, n = 200 (one sample) or n1 = n2 = 100 (two
samples). Keyed by distribution, then covariance, then statistic; each
list runs over P_GRID.

"""

DISTRIBUTIONS = ["A1", "A2", "A3"]

COVARIANCES = ["B1", "B2", "B3"]

STATISTICS = ("sum", "max", "com")

P_GRID = [200, 400, 600]

ONE_SAMPLE_N = 200
TWO_SAMPLE_N = (100, 100)

SIZES_ONE = {
    "A1": {
        "B1": {"sum": [0.072, 0.056, 0.053], "max": [0.058, 0.069, 0.065], "com": [0.058, 0.050, 0.052]},
        "B2": {"sum": [0.072, 0.061, 0.047], "max": [0.055, 0.068, 0.058], "com": [0.054, 0.069, 0.056]},
        "B3": {"sum": [0.065, 0.060, 0.067], "max": [0.064, 0.048, 0.066], "com": [0.053, 0.056, 0.063]},
    },
    "A2": {
        "B1": {"sum": [0.046, 0.051, 0.058], "max": [0.025, 0.036, 0.033], "com": [0.041, 0.046, 0.047]},
        "B2": {"sum": [0.041, 0.042, 0.057], "max": [0.031, 0.040, 0.033], "com": [0.044, 0.049, 0.048]},
        "B3": {"sum": [0.055, 0.054, 0.050], "max": [0.033, 0.043, 0.047], "com": [0.045, 0.049, 0.045]},
    },
    "A3": {
        "B1": {"sum": [0.043, 0.054, 0.055], "max": [0.047, 0.038, 0.049], "com": [0.037, 0.049, 0.051]},
        "B2": {"sum": [0.054, 0.054, 0.036], "max": [0.040, 0.036, 0.050], "com": [0.046, 0.045, 0.039]},
        "B3": {"sum": [0.044, 0.049, 0.049], "max": [0.053, 0.043, 0.042], "com": [0.064, 0.053, 0.040]},
    },
}

SIZES_TWO = {
    "A1": {
        "B1": {"sum": [0.050, 0.067, 0.055], "max": [0.044, 0.052, 0.066], "com": [0.056, 0.067, 0.052]},
        "B2": {"sum": [0.062, 0.049, 0.070], "max": [0.042, 0.054, 0.061], "com": [0.063, 0.056, 0.066]},
        "B3": {"sum": [0.059, 0.062, 0.042], "max": [0.051, 0.059, 0.049], "com": [0.057, 0.058, 0.061]},
    },
    "A2": {
        "B1": {"sum": [0.059, 0.056, 0.053], "max": [0.036, 0.040, 0.029], "com": [0.040, 0.049, 0.052]},
        "B2": {"sum": [0.055, 0.058, 0.048], "max": [0.034, 0.027, 0.034], "com": [0.044, 0.037, 0.050]},
        "B3": {"sum": [0.048, 0.051, 0.055], "max": [0.036, 0.024, 0.046], "com": [0.058, 0.056, 0.049]},
    },
    "A3": {
        "B1": {"sum": [0.065, 0.069, 0.054], "max": [0.041, 0.049, 0.048], "com": [0.044, 0.063, 0.053]},
        "B2": {"sum": [0.057, 0.057, 0.058], "max": [0.038, 0.044, 0.042], "com": [0.044, 0.048, 0.047]},
        "B3": {"sum": [0.060, 0.059, 0.049], "max": [0.033, 0.047, 0.049], "com": [0.054, 0.050, 0.059]},
    },
}


def get_reference_size(statistic, dist, cov, p, two_sample=False):
    """
    Look up a published size; returns None for cells that were not run.
    """
    table = SIZES_TWO if two_sample else SIZES_ONE
    try:
        return table[dist][cov][statistic][P_GRID.index(p)]
    except (KeyError, ValueError):
        return None
