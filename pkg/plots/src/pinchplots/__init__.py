from .figures import KINDS, FigureError, FigureSpec, build_figure, plot

__version__ = "0.1.0"

__all__ = ["KINDS", "FigureError", "FigureSpec", "build_figure", "plot", "__version__"]
