"""Exact algebra of regular F-manifolds in canonical coordinates, Gibbons-Tsarev residuals,
Pavlov-chain reductions and their numerical verification."""

__version__ = "0.1.0"
