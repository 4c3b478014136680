"""Identifier-free design primitives.

A chart is abstracted into a multiset of dot-path tokens that name atomic
design facts without any entity identifiers or field names, e.g. a
log-scaled quantitative color channel becomes {color, color.quantitative,
color.log}.  Layered duplicates are preserved (multiset semantics).

Token forms:

    mark.<type>                 per layer
    <channel>                   per encoding
    <channel>.<fieldtype>       quantitative | nominal | temporal | boolean | count
    <channel>.<aggregate>       mean | sum | count   (skipped for the count
                                sentinel, whose field token already says count)
    <channel>.binned            plus <channel>.binned.<n> with the bin count
    <channel>.stack.<mode>      for stacked encodings
    <channel>.<scaletype>       per scale: linear | log | ordinal | categorical
    facet.<direction>
    coordinates.<system>
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable

from .spec import Aggregate, Channel, ChartSpec, DType, Stack

#: PrimitiveToken is a plain dot-path string.
PrimitiveToken = str

_DTYPE_TOKEN = {
    DType.NUMBER: "quantitative",
    DType.STRING: "nominal",
    DType.DATETIME: "temporal",
    DType.BOOLEAN: "boolean",
}

_ROLES = tuple(ch.value for ch in Channel) + ("mark", "facet", "coordinates")


def abstract_primitives(spec: ChartSpec) -> Counter:
    """Tokenize a chart into its multiset of identifier-free primitives."""
    tokens: Counter = Counter()
    for mark in spec.marks:
        tokens[f"mark.{mark.mtype.value}"] += 1
        for enc in mark.encodings:
            ch = enc.channel.value
            tokens[ch] += 1
            if enc.is_count:
                tokens[f"{ch}.count"] += 1
            else:
                fld = spec.resolve(enc.field)
                assert fld is not None
                tokens[f"{ch}.{_DTYPE_TOKEN[fld.dtype]}"] += 1
                if enc.aggregate is not Aggregate.NONE:
                    tokens[f"{ch}.{enc.aggregate.value}"] += 1
            if enc.bin is not None:
                tokens[f"{ch}.binned"] += 1
                tokens[f"{ch}.binned.{enc.bin}"] += 1
            if enc.stack is not Stack.NONE:
                tokens[f"{ch}.stack.{enc.stack.value}"] += 1
    for scale in spec.scales:
        tokens[f"{scale.channel.value}.{scale.stype.value}"] += 1
    if spec.facet is not None:
        tokens[f"facet.{spec.facet.direction.value}"] += 1
    tokens[f"coordinates.{spec.coordinates.value}"] += 1
    return tokens


def token_role(token: PrimitiveToken) -> str:
    """Group key for a token: its channel, or mark/facet/coordinates."""
    head = token.split(".", 1)[0]
    if head not in _ROLES:
        raise ValueError(f"unrecognized primitive token {token!r}")
    return head


def sorted_tokens(tokens: Counter) -> list[PrimitiveToken]:
    """Multiset expanded to a sorted list (deterministic wire form)."""
    out: list[PrimitiveToken] = []
    for tok in sorted(tokens):
        out.extend([tok] * tokens[tok])
    return out


def build_vocabulary(specs: Iterable[ChartSpec]) -> tuple[PrimitiveToken, ...]:
    """Sorted union of all tokens appearing in the given charts."""
    vocab: set[PrimitiveToken] = set()
    for spec in specs:
        vocab.update(abstract_primitives(spec).keys())
    return tuple(sorted(vocab))
