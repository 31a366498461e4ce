"""
Services package for the MOLS toolkit.

- gf_engine: GF(p^n) with exponent labels, trace and (almost) self-dual bases
- curves: additive curves as adjacency matrices, composition, generator matrices
- latin: Latin squares from curves, standardization, orthogonality, minisquares
- transforms: CNOT and local Type S / Type F operations and their permutations
- monomials: Pauli monomials, commuting classes and the numeric MUB check
"""
