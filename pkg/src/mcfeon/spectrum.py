"""Frequency-slot occupancy per (link, core) with bitmask continuity scans.

Each (link, core) pair holds one Python int whose bit s is set when slot s
is occupied. Continuity over a route is a bitwise OR across the route's
links; contiguity queries become shift-and-mask scans, which keeps the
per-request cost flat even for full grids.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple


class SpectrumError(RuntimeError):
    """Grid corruption or misuse; indicates an engine bug, not blocking."""


@dataclass(frozen=True)
class SlotBlock:
    start: int
    size: int

    @property
    def end(self) -> int:
        return self.start + self.size


class SpectrumGrid:
    """Slot ownership for every (link, core, slot) of one simulation."""

    def __init__(self, num_links: int, cores: int, slots: int):
        if num_links < 1 or cores < 1 or slots < 0:
            raise ValueError("grid needs >=1 link, >=1 core and >=0 slots")
        self.num_links = num_links
        self.cores = cores
        self.slots = slots
        self.full_mask = (1 << slots) - 1
        self._masks: List[List[int]] = [[0] * cores for _ in range(num_links)]
        # connection id -> (link ids, core, start, size)
        self._owners: Dict[int, Tuple[Tuple[int, ...], int, int, int]] = {}
        self.occupied_slot_count = 0

    # -- queries ---------------------------------------------------------

    def free_mask(self, link_ids: Sequence[int], core: int) -> int:
        """Bitmask of slots free on `core` across every listed link."""
        occupied = 0
        for lid in link_ids:
            occupied |= self._masks[lid][core]
        return ~occupied & self.full_mask

    def find_blocks(
        self,
        link_ids: Sequence[int],
        core: int,
        need: int,
        max_blocks: int,
        region_mask: Optional[int] = None,
    ) -> List[SlotBlock]:
        """Maximal runs of jointly-free slots with size >= need, ascending.

        Returns up to max_blocks blocks; an empty list is the normal answer
        for a congested route. `region_mask` restricts the scan to a slot
        region (blocks never cross its boundary).
        """
        if need < 1:
            raise ValueError(f"need must be >= 1, got {need}")
        free = self.free_mask(link_ids, core)
        if region_mask is not None:
            free &= region_mask
        blocks: List[SlotBlock] = []
        pos = 0
        x = free
        while x and len(blocks) < max_blocks:
            zeros = (x & -x).bit_length() - 1
            x >>= zeros
            pos += zeros
            run = (~x & (x + 1)).bit_length() - 1
            if run >= need:
                blocks.append(SlotBlock(pos, run))
            x >>= run
            pos += run
        return blocks

    def first_fit(
        self,
        link_ids: Sequence[int],
        core: int,
        need: int,
        region_mask: Optional[int] = None,
    ) -> Optional[int]:
        """Lowest start slot of a jointly-free run of `need` slots, or None."""
        free = self.free_mask(link_ids, core)
        if region_mask is not None:
            free &= region_mask
        m = free
        for _ in range(need - 1):
            m &= m >> 1
            if not m:
                return None
        if not m:
            return None
        return (m & -m).bit_length() - 1

    def is_free(
        self, link_ids: Sequence[int], core: int, start: int, size: int
    ) -> bool:
        if start < 0 or size < 1 or start + size > self.slots:
            return False
        block_mask = ((1 << size) - 1) << start
        for lid in link_ids:
            if self._masks[lid][core] & block_mask:
                return False
        return True

    def connection(self, conn_id: int) -> Tuple[Tuple[int, ...], int, int, int]:
        return self._owners[conn_id]

    @property
    def active_connections(self) -> int:
        return len(self._owners)

    # -- mutation --------------------------------------------------------

    def allocate(
        self, link_ids: Sequence[int], core: int, block: SlotBlock, conn_id: int
    ) -> None:
        """Mark `block` occupied by conn_id on `core` of every listed link.

        The caller must have verified availability; a collision here means
        the engine skipped its checks and is raised, never swallowed.
        """
        if conn_id in self._owners:
            raise SpectrumError(f"connection {conn_id} already holds an allocation")
        if not (0 <= core < self.cores):
            raise SpectrumError(f"core {core} outside [0, {self.cores})")
        if block.start < 0 or block.size < 1 or block.end > self.slots:
            raise SpectrumError(f"block {block} outside [0, {self.slots})")
        block_mask = ((1 << block.size) - 1) << block.start
        for lid in link_ids:
            if self._masks[lid][core] & block_mask:
                raise SpectrumError(
                    f"collision on link {lid} core {core} slots "
                    f"[{block.start}, {block.end})"
                )
        for lid in link_ids:
            self._masks[lid][core] |= block_mask
        self._owners[conn_id] = (tuple(link_ids), core, block.start, block.size)
        self.occupied_slot_count += block.size * len(link_ids)

    def release(self, conn_id: int) -> Tuple[Tuple[int, ...], int, int, int]:
        """Free every slot owned by conn_id. Double release raises."""
        try:
            link_ids, core, start, size = self._owners.pop(conn_id)
        except KeyError:
            raise SpectrumError(f"unknown connection id {conn_id}") from None
        block_mask = ((1 << size) - 1) << start
        for lid in link_ids:
            if self._masks[lid][core] & block_mask != block_mask:
                raise SpectrumError(
                    f"grid corruption: connection {conn_id} slots already free "
                    f"on link {lid}"
                )
            self._masks[lid][core] ^= block_mask
        self.occupied_slot_count -= size * len(link_ids)
        return link_ids, core, start, size

    def clear(self) -> None:
        for row in self._masks:
            for core in range(self.cores):
                row[core] = 0
        self._owners.clear()
        self.occupied_slot_count = 0

    # -- integrity -------------------------------------------------------

    def verify(self) -> None:
        """Rebuild the grid from connection records and compare.

        Catches overlap, orphaned bits and counter drift; intended for test
        builds and periodic checks inside long runs.
        """
        rebuilt = [[0] * self.cores for _ in range(self.num_links)]
        total = 0
        for conn_id, (link_ids, core, start, size) in self._owners.items():
            block_mask = ((1 << size) - 1) << start
            for lid in link_ids:
                if rebuilt[lid][core] & block_mask:
                    raise SpectrumError(
                        f"overlap: connection {conn_id} shares slots on link {lid}"
                    )
                rebuilt[lid][core] |= block_mask
            total += size * len(link_ids)
        if rebuilt != self._masks:
            raise SpectrumError("grid bitmaps do not match connection records")
        if total != self.occupied_slot_count:
            raise SpectrumError(
                f"occupied-slot counter {self.occupied_slot_count} != {total}"
            )

    def occupancy_string(self, link_id: int, core: int) -> str:
        """Debug dump: slot 0 first, '1' = occupied."""
        mask = self._masks[link_id][core]
        return "".join("1" if mask >> s & 1 else "0" for s in range(self.slots))
