"""Separations, tangles, S-trees and brambles of finite graphs, with re-checkable certificates."""

__version__ = "0.1.0"
