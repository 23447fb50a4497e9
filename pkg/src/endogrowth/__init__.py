"""Growth rates and algebraic entropy of endomorphisms of finitely generated groups.

Two independent routes to the growth rate of an endomorphism: closed forms
(spectral data of exact integer matrices) and empirical estimation from exact
word lengths on Cayley balls.  The CLI cross-validates them on bundled
example groups.
"""

__version__ = "0.1.0"
