"""Pure-Python Elo update loop; same contract and arithmetic as the compiled kernel."""

import math


def run_updates(ratings, pair_i, pair_j, u_win, probs, gain, stride, start_step, out, row, winners):
    r = ratings.tolist()
    p = probs.tolist()
    pi = pair_i.tolist()
    pj = pair_j.tolist()
    uw = u_win.tolist()
    w = [0] * len(pi)
    exp = math.exp
    for t in range(len(pi)):
        i = pi[t]
        j = pj[t]
        if uw[t] < p[i][j]:
            s = 1.0
            w[t] = i
        else:
            s = 0.0
            w[t] = j
        delta = gain * (s - 1.0 / (1.0 + exp(-(r[i] - r[j]))))
        r[i] = r[i] + delta
        r[j] = r[j] - delta
        if (start_step + t + 1) % stride == 0:
            out[row] = r
            row += 1
    ratings[:] = r
    winners[:] = w
    return row
