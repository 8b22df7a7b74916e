import os


class SearchConfig:
    MAX_WIDTH = int(os.getenv("XORGADGET_SEARCH_MAX_WIDTH", "5"))
    MAX_AUX = int(os.getenv("XORGADGET_SEARCH_MAX_AUX", "3"))

    NODE_LIMIT = int(os.getenv("XORGADGET_SEARCH_NODE_LIMIT", "200000"))

    HEURISTIC_RANDOM_STARTS = int(os.getenv("XORGADGET_SEARCH_RANDOM_STARTS", "8"))
    HEURISTIC_ITERATIONS = int(os.getenv("XORGADGET_SEARCH_ITERATIONS", "25"))

    # floating point LP results are only trusted after rounding to these denominators
    DUAL_DENOMINATOR = 1 << 12
    PRIMAL_DENOMINATOR = 1 << 12
    TOLERANCE = 1e-7

    WARM_START_GADGETS = ("tree", "tree-balanced", "clique", "chancellor", "direct")
