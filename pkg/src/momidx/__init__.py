"""Matrix indexes of Hermitian moment matrices: Szego, density and bounded point evaluation tests."""

__version__ = "0.1.0"
