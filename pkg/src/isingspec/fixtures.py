"""Named reference graphs used throughout the test battery and CLI.

These are the classic small pairs exhibiting the separation between graph
invariants: equal/unequal energy spectra, field-refined spectra, adjacency
spectra.  Edge lists are stored verbatim in the published 1-indexed notation
(including duplicate pairs, which collapse under simple-graph semantics).

Note on the 27-vertex pair: the printed list for G27 dedupes to 34 edges
while G27p dedupes to 35, so the two graphs as printed cannot be cospectral
(their edge counts differ).  G27c adds the single edge {8,12} to G27; that is
the unique one-edge completion making the pair adjacency-cospectral, and it
restores every invariant relation the pair is known for.  Use (G27c, G27p)
as the working cospectral pair.
"""

from __future__ import annotations

from .graphs import Graph, parse_edge_list

_TABLE: dict[str, tuple[int, str]] = {
    "G1": (7, "1,5;1,7;2,6;2,7;3,7"),
    "G2": (7, "1,5;2,6;2,7;3,6;3,7"),
    "G3": (4, "1,4;2,4"),
    "G4": (4, "1,3;2,4"),
    "G13": (
        13,
        "1,8;1,10;1,11;1,13;2,9;2,11;2,13;3,10;3,13;4,10;5,11;6,12;7,12;9,12;12,13",
    ),
    "G13p": (
        13,
        "1,8;1,10;1,11;1,13;2,9;2,11;2,13;3,10;3,11;4,10;5,12;6,12;7,13;8,12;12,13",
    ),
    "G27": (
        27,
        "1,14;1,17;2,14;2,22;3,4;3,5;4,3;4,10;4,12;5,3;5,11;5,13;6,7;6,8;6,15;"
        "7,10;7,11;8,13;9,12;9,13;9,14;10,15;11,15;14,15;16,17;16,21;17,18;18,19;"
        "19,20;20,21;22,23;22,27;23,24;24,25;25,26;26,27",
    ),
    "G27p": (
        27,
        "1,14;1,17;2,14;2,23;3,4;3,5;4,3;4,10;4,11;5,12;5,13;6,7;6,8;6,15;7,10;"
        "7,12;8,11;8,13;9,12;9,13;9,14;10,15;11,15;14,15;16,17;16,21;17,18;18,19;"
        "19,20;20,21;22,23;22,27;23,24;24,25;25,26;26,27",
    ),
}
_TABLE["G27c"] = (27, _TABLE["G27"][1] + ";8,12")

FIXTURE_NAMES: tuple[str, ...] = tuple(_TABLE)


def fixture(name: str) -> Graph:
    """Return the named reference graph (deduplicated simple graph)."""
    try:
        n, text = _TABLE[name]
    except KeyError:
        raise KeyError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}"
        ) from None
    return parse_edge_list(text, n)
