"""Multi-UAV cooperative anti-jamming channel selection: a jammer-leader /
UAV-follower game with locally altruistic UAV utilities, learned by
stochastic learning automata and checked against exhaustive equilibria."""

__version__ = "0.1.0"
