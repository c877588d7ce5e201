"""Representations: maps from generator ids to exact matrices."""

from __future__ import annotations

from typing import Dict

from .matrices import ExactMatrix


class Representation:
    """A finite-dimensional representation over exact scalars.

    Instances compare by identity; evaluation caches key off the object.
    """

    def __init__(self, name: str, dim: int, images: Dict[str, ExactMatrix]):
        for gid, m in images.items():
            if m.dim != dim:
                raise ValueError(f"image of {gid} has dim {m.dim}, expected {dim}")
        self.name = name
        self.dim = dim
        self.images = dict(images)

    def image(self, gid: str) -> ExactMatrix:
        try:
            return self.images[gid]
        except KeyError:
            raise KeyError(f"generator {gid!r} has no image in representation {self.name!r}") from None

    def extended(self, extra: Dict[str, ExactMatrix]) -> "Representation":
        imgs = dict(self.images)
        imgs.update(extra)
        return Representation(self.name, self.dim, imgs)

    def dual(self) -> "Representation":
        """The dual representation g -> -g^T (an algebra map on the envelope)."""
        return Representation(
            self.name + "-dual",
            self.dim,
            {gid: -m.transpose() for gid, m in self.images.items()},
        )

    def __repr__(self):
        return f"Representation({self.name!r}, dim={self.dim}, gens={len(self.images)})"
