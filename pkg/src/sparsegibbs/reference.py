"""Published mean (sd) test errors for the simulation study, 20 replications per cell.

Keys are ``(model, innovation, n)``; values map each method to ``(mean, sd)``.
"""
from __future__ import annotations

_ROWS = """
align1 uniform  100  0.165 0.022  0.165 0.023  0.182 0.029
align1 gaussian 100  0.167 0.023  0.161 0.023  0.173 0.027
align2 uniform  100  0.163 0.020  0.169 0.022  0.178 0.022
align2 gaussian 100  0.172 0.033  0.179 0.040  0.201 0.049
align3 uniform  100  0.174 0.022  0.179 0.028  0.201 0.040
align3 gaussian 100  0.179 0.025  0.182 0.025  0.202 0.031
align1 uniform  1000 0.163 0.005  0.163 0.005  0.166 0.005
align1 gaussian 1000 0.160 0.005  0.160 0.005  0.162 0.005
align2 uniform  1000 0.164 0.004  0.166 0.004  0.167 0.004
align2 gaussian 1000 0.160 0.008  0.161 0.008  0.163 0.008
align3 uniform  1000 0.171 0.005  0.172 0.006  0.175 0.006
align3 gaussian 1000 0.173 0.009  0.173 0.009  0.176 0.010
"""


def _parse(text: str) -> dict:
    table = {}
    for line in text.strip().splitlines():
        model, innov, n, *nums = line.split()
        vals = [float(x) for x in nums]
        table[(model, innov, int(n))] = {m: (vals[2 * i], vals[2 * i + 1])
                                         for i, m in enumerate(("gibbs", "aic", "full"))}
    return table


REFERENCE_TABLE = _parse(_ROWS)

# allowed absolute deviation of a summary mean from the reference, by n
TOLERANCE = {100: 0.02, 1000: 0.01}
