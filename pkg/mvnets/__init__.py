"""
Exact compiler between cellular automata, DMV formulas and ReLU/σ networks.
"""
