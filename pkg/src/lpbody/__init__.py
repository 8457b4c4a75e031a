"""Star bodies in C^n, complex and real L_p-intersection bodies, and
numerical checks of their structural properties."""

__version__ = "0.1.0"
