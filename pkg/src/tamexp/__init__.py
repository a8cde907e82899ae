"""Tame automorphism groups of polynomial rings over finite fields.

Subpackages cover field arithmetic (ff), sparse polynomial endomorphisms
(polyring), the generator alphabet and its affine action (tame), word
synthesis for derived transvections (synth), orbit structure of the affine
action (orbits), permutation-group certification (permgrp), Schreier-graph
spectra and Kazhdan bounds (spectra), and the command-line driver (cli).
"""

__version__ = "0.1.0"
