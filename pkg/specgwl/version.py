"""Represents current specgwl version"""
__version__ = (0, 4, 1)
