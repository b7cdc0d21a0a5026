"""Ground-state collective spin coupled dispersively to two polarization modes."""

__version__ = "0.1.0"
