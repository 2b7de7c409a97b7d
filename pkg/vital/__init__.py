"""
ViTaL - vision + touch physical-property inference

Encodes an object photo and a tactile sensor clip, feeds them to a language
model with a structured rating prompt, and checks the scores against
instrument measurements with Spearman rank correlation.
"""

__version__ = "0.1.0"
