"""Small bundled networks used by the tests, demos and acceptance runs."""

from .dcopf import Bus, Generator, Line, Network


def onebus_2gen(demand: float = 0.5) -> Network:
    """One bus, two generators (costs 1 and 2, capacity 1 p.u. each), no lines."""
    return Network(
        base_mva=100.0,
        buses=[Bus(1, demand, slack=True)],
        generators=[Generator(1, 1.0, 0.0, 1.0), Generator(1, 2.0, 0.0, 1.0)],
        lines=[],
    )


def tri_3bus(demands=(0.3, 0.3)) -> Network:
    """Triangle network, susceptance 10 on every line, limits 0.4 p.u.

    One generator per bus with costs 1, 2, 3 and capacity 1 p.u.; demands sit
    at buses 2 and 3, bus 1 is the slack.
    """
    d2, d3 = demands
    return Network(
        base_mva=100.0,
        buses=[Bus(1, 0.0, slack=True), Bus(2, d2), Bus(3, d3)],
        generators=[Generator(1, 1.0, 0.0, 1.0), Generator(2, 2.0, 0.0, 1.0),
                    Generator(3, 3.0, 0.0, 1.0)],
        lines=[Line(1, 2, 10.0, 0.4), Line(1, 3, 10.0, 0.4), Line(2, 3, 10.0, 0.4)],
    )


BUNDLED = {"onebus-2gen": onebus_2gen, "tri-3bus": tri_3bus}
