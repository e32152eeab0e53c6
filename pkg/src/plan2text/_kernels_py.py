"""Pure-Python twin of the compiled edit-distance kernel."""

BACKEND = "python"


def levenshtein_ids(a, b):
    """Unit-cost edit distance (insert/delete/substitute) between id sequences."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        ai = a[i - 1]
        curr = [i] + [0] * lb
        for j in range(1, lb + 1):
            best = prev[j - 1] + (0 if b[j - 1] == ai else 1)
            tmp = prev[j] + 1
            if tmp < best:
                best = tmp
            tmp = curr[j - 1] + 1
            if tmp < best:
                best = tmp
            curr[j] = best
        prev = curr
    return prev[lb]
