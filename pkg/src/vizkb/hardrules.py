"""Hard-constraint validation.

Hard constraints mark a chart as illegal rather than merely dispreferred.
The built-in rule set H1-H7 is a fixed, code-level reconstruction of a
representative subset (the canonical catalog is much larger and is not
published as a closed list):

    H1  at most one scale type per channel
    H2  log scale requires a number field with extent.min > 0
    H3  ordinal/categorical scale requires a string/boolean or binned field
    H4  bin only on number fields
    H5  bar/area/line marks require at least one positional channel
    H6  channels unique within a mark
    H7  facet field must be discrete (string/boolean, or number with a bin)

Structural defects (unresolved field references, channels without exactly
one scale) raise StructuralError instead of appearing in the violation list.
"""

from __future__ import annotations

from dataclasses import dataclass

from .spec import (
    Aggregate,
    Channel,
    ChartSpec,
    DType,
    MarkType,
    POSITIONAL_CHANNELS,
    ScaleType,
    StructuralError,
    _channel_index,
)

RULE_IDS = ("H1", "H2", "H3", "H4", "H5", "H6", "H7")


@dataclass(frozen=True)
class HardViolation:
    rule: str
    message: str


def _structural_check(spec: ChartSpec) -> None:
    problems: list[str] = []
    for _, enc in spec.iter_encodings():
        try:
            spec.resolve(enc.field)
        except StructuralError as err:
            problems.append(str(err))
    if spec.facet is not None:
        try:
            spec.resolve(spec.facet.field)
        except StructuralError as err:
            problems.append(f"facet: {err}")
    used = spec.used_channels()
    scaled = [s.channel for s in spec.scales]
    for ch in sorted(used, key=_channel_index):
        if ch not in scaled:
            problems.append(f"channel {ch.value} has no scale")
    for ch in scaled:
        if ch not in used:
            problems.append(f"scale on unused channel {ch.value}")
    if problems:
        raise StructuralError("; ".join(problems))


def validate(spec: ChartSpec) -> list[HardViolation]:
    """Return every violated hard constraint; empty list means valid.

    Raises StructuralError when the spec is malformed (which is distinct
    from violating a rule).
    """
    _structural_check(spec)
    violations: list[HardViolation] = []

    # H1: at most one scale per channel
    by_channel: dict[Channel, list[ScaleType]] = {}
    for s in spec.scales:
        by_channel.setdefault(s.channel, []).append(s.stype)
    for ch in sorted(by_channel, key=_channel_index):
        types = by_channel[ch]
        if len(types) > 1:
            violations.append(
                HardViolation(
                    "H1",
                    f"channel {ch.value} has {len(types)} scales "
                    f"({', '.join(t.value for t in types)})",
                )
            )

    # H2/H3: scale type versus bound field, per (scale, encoding)
    for s in sorted(spec.scales, key=lambda s: _channel_index(s.channel)):
        for _, enc in spec.iter_encodings():
            if enc.channel is not s.channel:
                continue
            fld = spec.resolve(enc.field)
            if s.stype is ScaleType.LOG:
                if fld is None or fld.dtype is not DType.NUMBER:
                    violations.append(
                        HardViolation(
                            "H2",
                            f"log scale on {s.channel.value} requires a number "
                            f"field, got {enc.field!r}",
                        )
                    )
                elif fld.extent is None or fld.extent[0] <= 0:
                    violations.append(
                        HardViolation(
                            "H2",
                            f"log scale on {s.channel.value} requires "
                            f"extent.min > 0 ({enc.field!r})",
                        )
                    )
            if s.stype in (ScaleType.ORDINAL, ScaleType.CATEGORICAL):
                discrete = (
                    fld is not None and fld.dtype in (DType.STRING, DType.BOOLEAN)
                ) or enc.bin is not None
                if not discrete:
                    violations.append(
                        HardViolation(
                            "H3",
                            f"{s.stype.value} scale on {s.channel.value} requires "
                            f"a string/boolean or binned field ({enc.field!r})",
                        )
                    )

    # H4: bin only on number fields
    for _, enc in spec.iter_encodings():
        if enc.bin is None:
            continue
        fld = spec.resolve(enc.field)
        if fld is None or fld.dtype is not DType.NUMBER:
            violations.append(
                HardViolation("H4", f"bin on non-number field {enc.field!r}")
            )
    if spec.facet is not None and spec.facet.bin is not None:
        ffld = spec.resolve(spec.facet.field)
        if ffld is None or ffld.dtype is not DType.NUMBER:
            violations.append(
                HardViolation("H4", f"facet bin on non-number field {spec.facet.field!r}")
            )

    # H5: bar/area/line need a positional channel
    for i, mark in enumerate(spec.marks):
        if mark.mtype in (MarkType.BAR, MarkType.AREA, MarkType.LINE):
            channels = {e.channel for e in mark.encodings}
            if not channels & POSITIONAL_CHANNELS:
                violations.append(
                    HardViolation(
                        "H5",
                        f"layer {i} ({mark.mtype.value}) has no positional channel",
                    )
                )

    # H6: channels unique per mark
    for i, mark in enumerate(spec.marks):
        seen: set[Channel] = set()
        dupes: set[Channel] = set()
        for e in mark.encodings:
            if e.channel in seen:
                dupes.add(e.channel)
            seen.add(e.channel)
        for ch in sorted(dupes, key=_channel_index):
            violations.append(
                HardViolation("H6", f"layer {i} uses channel {ch.value} more than once")
            )

    # H7: facet field discrete
    if spec.facet is not None:
        ffld = spec.resolve(spec.facet.field)
        assert ffld is not None
        discrete = ffld.dtype in (DType.STRING, DType.BOOLEAN) or (
            ffld.dtype is DType.NUMBER and spec.facet.bin is not None
        )
        if not discrete:
            violations.append(
                HardViolation(
                    "H7",
                    f"facet field {spec.facet.field!r} is not discrete "
                    f"(string/boolean or binned number)",
                )
            )

    violations.sort(key=lambda v: (v.rule, v.message))
    return violations


def is_valid(spec: ChartSpec) -> bool:
    return not validate(spec)
