"""Finite-frame Dempster-Shafer machinery.

Frames hold up to 16 atoms; subsets are encoded as bit patterns over the
atom ordering, so power-set iteration and intersection stay trivial.
Mass functions are immutable once built and safe to share across workers.
"""

from __future__ import annotations

from typing import Dict, Iterable, Mapping, Tuple

from .errors import FrameError, InvalidFocalError, TotalConflictError

MAX_FRAME_SIZE = 16

# Masses whose sum strays further than this from 1 are rejected.
MASS_TOL = 1e-9
# Focal elements below this weight are dropped after combination.
PRUNE_EPS = 1e-12


class Frame:
    """An ordered frame of discernment; atoms are unique non-empty labels."""

    __slots__ = ("_atoms", "_index")

    def __init__(self, atoms: Iterable[str]):
        atoms = tuple(atoms)
        if not atoms:
            raise FrameError("frame needs at least one atom")
        if len(atoms) > MAX_FRAME_SIZE:
            raise FrameError(f"frame size {len(atoms)} exceeds cap {MAX_FRAME_SIZE}")
        if len(set(atoms)) != len(atoms):
            raise FrameError(f"duplicate atom labels in {atoms!r}")
        if any(not a for a in atoms):
            raise FrameError("atom labels must be non-empty")
        self._atoms = atoms
        self._index = {a: i for i, a in enumerate(atoms)}

    @property
    def atoms(self) -> Tuple[str, ...]:
        return self._atoms

    @property
    def size(self) -> int:
        return len(self._atoms)

    @property
    def full_set(self) -> int:
        """Bit pattern of the whole frame (the ignorance set)."""
        return (1 << len(self._atoms)) - 1

    def subset(self, labels: Iterable[str]) -> int:
        """Encode a collection of atom labels as a bit pattern."""
        bits = 0
        for label in labels:
            try:
                bits |= 1 << self._index[label]
            except KeyError:
                raise FrameError(f"atom {label!r} not in frame {self._atoms}") from None
        return bits

    def labels(self, bits: int) -> Tuple[str, ...]:
        """Decode a bit pattern back into atom labels."""
        if bits < 0 or bits > self.full_set:
            raise FrameError(f"bit pattern {bits:#x} outside frame of size {self.size}")
        return tuple(a for i, a in enumerate(self._atoms) if bits >> i & 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Frame) and self._atoms == other._atoms

    def __hash__(self) -> int:
        return hash(self._atoms)

    def __repr__(self) -> str:
        return f"Frame({list(self._atoms)!r})"


# The two frames used throughout: influence/passivity and opinion polarity.
OMEGA = Frame(("I", "P"))
THETA = Frame(("Pos", "Neg", "Neut"))


class MassFunction:
    """A normal basic belief assignment: non-empty focal sets, masses sum to 1."""

    __slots__ = ("_frame", "_masses")

    def __init__(self, frame: Frame, masses: Mapping[int, float]):
        total = 0.0
        clean: Dict[int, float] = {}
        full = frame.full_set
        for bits, value in masses.items():
            if bits == 0:
                if value != 0.0:
                    raise FrameError("normal BBA cannot assign mass to the empty set")
                continue
            if bits < 0 or bits > full:
                raise FrameError(f"focal {bits:#x} not a subset of the frame")
            if value < 0.0:
                raise FrameError(f"negative mass {value} on focal {bits:#x}")
            if value == 0.0:
                continue
            clean[bits] = clean.get(bits, 0.0) + value
            total += value
        if abs(total - 1.0) > MASS_TOL:
            raise FrameError(f"masses sum to {total}, expected 1")
        self._frame = frame
        self._masses = clean

    @property
    def frame(self) -> Frame:
        return self._frame

    def mass(self, bits: int) -> float:
        """Mass of a subset given as a bit pattern (0 for non-focal sets)."""
        if bits < 0 or bits > self._frame.full_set:
            raise FrameError(f"subset {bits:#x} outside the frame")
        return self._masses.get(bits, 0.0)

    def mass_of(self, labels: Iterable[str]) -> float:
        """Mass of a subset given as atom labels."""
        return self.mass(self._frame.subset(labels))

    def focal_sets(self) -> Dict[int, float]:
        """Copy of the focal-set map (bit pattern -> mass)."""
        return dict(self._masses)

    def items_by_labels(self) -> Dict[Tuple[str, ...], float]:
        return {self._frame.labels(b): v for b, v in sorted(self._masses.items())}

    def is_vacuous(self) -> bool:
        return self._masses == {self._frame.full_set: 1.0}

    def approx_equal(self, other: "MassFunction", tol: float = 1e-9) -> bool:
        if self._frame != other._frame:
            return False
        keys = set(self._masses) | set(other._masses)
        return all(abs(self.mass(k) - other.mass(k)) <= tol for k in keys)

    def __repr__(self) -> str:
        parts = ", ".join(
            f"{{{','.join(self._frame.labels(b))}}}={v:.6g}"
            for b, v in sorted(self._masses.items())
        )
        return f"MassFunction({parts})"


def vacuous(frame: Frame) -> MassFunction:
    """Total ignorance: all mass on the full frame."""
    return MassFunction(frame, {frame.full_set: 1.0})


def simple_bba(frame: Frame, focal: int, alpha: float) -> MassFunction:
    """Simple BBA with m(focal) = 1 - alpha and m(frame) = alpha.

    ``focal`` is a bit pattern; it must be a non-empty subset of the frame,
    and may equal the full frame only in the degenerate alpha = 1 case
    (which is just the vacuous BBA).
    """
    if not 0.0 <= alpha <= 1.0:
        raise InvalidFocalError(f"alpha {alpha} outside [0, 1]")
    if focal == 0:
        raise InvalidFocalError("focal element must be non-empty")
    if focal < 0 or focal > frame.full_set:
        raise FrameError(f"focal {focal:#x} not a subset of the frame")
    if focal == frame.full_set:
        if alpha < 1.0:
            raise InvalidFocalError("focal equal to the frame requires alpha = 1")
        return vacuous(frame)
    return MassFunction(frame, {focal: 1.0 - alpha, frame.full_set: alpha})


def dempster_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dempster's rule: conjunctive combination renormalized by 1 - K.

    Raises :class:`TotalConflictError` when the sources fully contradict
    (K = 1). Focal elements lighter than ``PRUNE_EPS`` are dropped and the
    remainder renormalized, keeping focal sets sparse.
    """
    if m1.frame != m2.frame:
        raise FrameError(f"cannot combine over {m1.frame} and {m2.frame}")
    # Collect all intersection terms, then accumulate them in a canonical
    # order so combine(a, b) == combine(b, a) bit for bit.
    terms = []
    for b, mb in m1.focal_sets().items():
        for c, mc in m2.focal_sets().items():
            terms.append((b & c, mb * mc))
    terms.sort()
    conflict = 0.0
    combined: Dict[int, float] = {}
    for bits, value in terms:
        if bits == 0:
            conflict += value
        else:
            combined[bits] = combined.get(bits, 0.0) + value
    denom = 1.0 - conflict
    if denom <= PRUNE_EPS:
        raise TotalConflictError(f"total conflict (K = {conflict})")
    scaled = {b: v / denom for b, v in combined.items() if v / denom >= PRUNE_EPS}
    total = sum(scaled.values())
    return MassFunction(m1.frame, {b: v / total for b, v in scaled.items()})
