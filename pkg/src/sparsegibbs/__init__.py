"""Sparse Gibbs (exponentially weighted) aggregation for time-series prediction.

Modules: ``core`` (series, parameters, risks), ``simulate``, ``basis``,
``prior``, ``sampler`` (reversible-jump MCMC and quadrature oracle),
``baselines`` (AR least squares, Yule-Walker, AIC), ``bounds`` (oracle
inequality arithmetic and concentration checks), ``experiment`` and ``cli``.
"""
__version__ = "0.1.0"
