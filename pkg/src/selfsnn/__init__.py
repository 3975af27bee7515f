"""Spiking cognitive-architecture toolkit: bodily, autonomous and social self experiments."""

__version__ = "0.1.0"
