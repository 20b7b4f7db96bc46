from polymat.poly_matrix import GramPoly, PolyMatrix, PsdProfile, chebyshev_grid

__all__ = ["GramPoly", "PolyMatrix", "PsdProfile", "chebyshev_grid"]
