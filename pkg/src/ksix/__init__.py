"""Exact computation of unital K-theoretic extension invariants over f.g. abelian groups."""
