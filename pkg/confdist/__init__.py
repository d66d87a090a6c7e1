"""
confdist - weighted post* saturation for recursive state machines.
"""
__version__ = "0.3.0"
